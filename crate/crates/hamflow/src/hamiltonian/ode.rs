//! Fundamental solutions of `u' = J S_λ(t) u` and propagation of subspaces.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::symplectic::{lagrangian_from_matrix, subspace_gap, LagrangianFrame};

use super::family::HamiltonianFamily;
use super::splitting::stable_unstable_splitting;

/// Budget for `||Ψ^T J Ψ - J||`.
pub const TOL_SYMP: f64 = 1e-8;
/// Default step for subspace propagation.
pub const DEFAULT_STEP: f64 = 0.005;
/// Budget for the gap between truncations `T` and `1.5 T`.
pub const TOL_TRUNCATION: f64 = 1e-6;
/// Isotropy budget for propagated Lagrangian frames.
pub const TOL_LAGRANGIAN: f64 = 1e-8;

const MAX_HALVINGS: u32 = 10;

/// Classical fourth-order step for `Y' = J S_λ(t) Y`.
pub fn rk4_step(fam: &HamiltonianFamily, lam: f64, t: f64, h: f64, y: &Mat) -> Mat {
    let f = |s: f64, y: &Mat| fam.generator(lam, s) * y;
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &(y + &k1 * (0.5 * h)));
    let k3 = f(t + 0.5 * h, &(y + &k2 * (0.5 * h)));
    let k4 = f(t + h, &(y + &k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// `Ψ_λ` on a uniform grid of `[-t0, t0]` with `Ψ_λ(0) = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSolution {
    pub lambda: f64,
    pub times: Vec<f64>,
    pub psi: Vec<Mat>,
    /// `max_t ||Ψ^T J Ψ - J||`.
    pub symplectic_residual: f64,
    /// RK4 substeps per grid interval after step halving.
    pub substeps: usize,
}

impl FundamentalSolution {
    /// `Ψ^{-1} = -J Ψ^T J` at grid index `i`.
    pub fn inverse_at(&self, j: &Mat, i: usize) -> Mat {
        -(j * self.psi[i].transpose() * j)
    }
}

fn symplectic_residual(j: &Mat, psi: &Mat) -> f64 {
    linalg::max_abs(&(psi.transpose() * j * psi - j))
}

/// Integrate outward from `t = 0` on `steps` (even) intervals of `[-t0, t0]`,
/// halving the step while the symplectic residual exceeds [`TOL_SYMP`].
pub fn fundamental_solution(
    fam: &HamiltonianFamily,
    lam: f64,
    t0: f64,
    steps: usize,
) -> Result<FundamentalSolution> {
    if !(t0 > 0.0) || steps < 2 || steps % 2 != 0 {
        return Err(Error::InvalidArgument(format!("need t0 > 0 and an even step count, got {t0}, {steps}")));
    }
    let dim = fam.dim();
    let j = fam.space().j().clone();
    let h = 2.0 * t0 / steps as f64;
    let half = steps / 2;
    let times: Vec<f64> = (0..=steps).map(|i| -t0 + i as f64 * h).collect();
    let mut sub = 1usize;
    for _ in 0..=MAX_HALVINGS {
        let mut psi = vec![Mat::identity(dim, dim); steps + 1];
        let hs = h / sub as f64;
        for dir in [1i64, -1] {
            let mut y = Mat::identity(dim, dim);
            let mut t = 0.0;
            for k in 1..=half {
                for _ in 0..sub {
                    y = rk4_step(fam, lam, t, dir as f64 * hs, &y);
                    t += dir as f64 * hs;
                }
                let idx = (half as i64 + dir * k as i64) as usize;
                psi[idx] = y.clone();
            }
        }
        let residual = psi.iter().map(|p| symplectic_residual(&j, p)).fold(0.0f64, f64::max);
        if residual.is_finite() && residual <= TOL_SYMP {
            return Ok(FundamentalSolution { lambda: lam, times, psi, symplectic_residual: residual, substeps: sub });
        }
        sub *= 2;
    }
    Err(Error::Integration(format!(
        "symplectic residual above {TOL_SYMP:.1e} after {MAX_HALVINGS} step halvings"
    )))
}

/// Push the span of `frame` from `t_from` to `t_to`, re-orthonormalizing every step.
pub fn propagate_subspace(
    frame: &Mat,
    fam: &HamiltonianFamily,
    lam: f64,
    t_from: f64,
    t_to: f64,
    h_max: f64,
) -> Result<Mat> {
    if !(h_max > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let span = t_to - t_from;
    let count = ((span.abs() / h_max).ceil() as usize).max(1);
    let h = span / count as f64;
    let mut y = linalg::qr_orthonormalize(frame);
    let mut t = t_from;
    for _ in 0..count {
        y = linalg::qr_orthonormalize(&rk4_step(fam, lam, t, h, &y));
        t += h;
    }
    if y.iter().any(|x| !x.is_finite()) {
        return Err(Error::Integration(format!("non-finite frame at lambda = {lam}")));
    }
    Ok(y)
}

/// A propagated Lagrangian with its truncation certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedSpace {
    pub frame: LagrangianFrame,
    pub truncation: f64,
    /// Gap between the results started at `T` and at `1.5 T`.
    pub certificate_gap: f64,
}

/// `V⁺(J S_λ(-∞))` and `V⁻(J S_λ(+∞))`.
pub fn asymptotic_frames(fam: &HamiltonianFamily, lam: f64) -> Result<(Mat, Mat)> {
    let (gm, gp) = fam.asymptotic_generators(lam);
    Ok((stable_unstable_splitting(&gm)?.unstable, stable_unstable_splitting(&gp)?.stable))
}

fn certified(
    fam: &HamiltonianFamily,
    lam: f64,
    start: &Mat,
    from: f64,
    from_far: f64,
    t0: f64,
    truncation: f64,
) -> Result<PropagatedSpace> {
    let a = propagate_subspace(start, fam, lam, from, t0, DEFAULT_STEP)?;
    let b = propagate_subspace(start, fam, lam, from_far, t0, DEFAULT_STEP)?;
    let gap = subspace_gap(&a, &b)?;
    if gap > TOL_TRUNCATION {
        return Err(Error::Truncation { gap, tol: TOL_TRUNCATION });
    }
    let frame = lagrangian_from_matrix(&a, fam.space(), TOL_LAGRANGIAN)?;
    Ok(PropagatedSpace { frame, truncation, certificate_gap: gap })
}

/// `E^u_λ(t0)`: `V⁺(J S_λ(-∞))` propagated forward from `-T`.
pub fn unstable_space(fam: &HamiltonianFamily, lam: f64, t0: f64, truncation: f64) -> Result<PropagatedSpace> {
    if !(truncation > 0.0) || t0 < -truncation {
        return Err(Error::InvalidArgument(format!("t0 = {t0} lies before -T = {}", -truncation)));
    }
    let (vplus, _) = asymptotic_frames(fam, lam)?;
    certified(fam, lam, &vplus, -truncation, -1.5 * truncation, t0, truncation)
}

/// `E^s_λ(t0)`: `V⁻(J S_λ(+∞))` propagated backward from `+T`.
pub fn stable_space(fam: &HamiltonianFamily, lam: f64, t0: f64, truncation: f64) -> Result<PropagatedSpace> {
    if !(truncation > 0.0) || t0 > truncation {
        return Err(Error::InvalidArgument(format!("t0 = {t0} lies beyond T = {truncation}")));
    }
    let (_, vminus) = asymptotic_frames(fam, lam)?;
    certified(fam, lam, &vminus, truncation, 1.5 * truncation, t0, truncation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::family::autonomous;

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let zero = HamiltonianFamily::new(
            "zero",
            1,
            std::sync::Arc::new(|_| Mat::zeros(2, 2)),
            std::sync::Arc::new(|_, _| Mat::zeros(2, 2)),
            std::sync::Arc::new(|_| Mat::zeros(2, 2)),
            std::sync::Arc::new(|_| Mat::zeros(2, 2)),
            1.0,
        )
        .unwrap();
        let fs = fundamental_solution(&zero, 0.5, 1.0, 8).unwrap();
        assert!(fs.psi.iter().all(|p| linalg::max_abs(&(p - Mat::identity(2, 2))) == 0.0));
        let frame = Mat::from_column_slice(2, 1, &[0.6, 0.8]);
        let out = propagate_subspace(&frame, &zero, 0.0, 0.0, 3.0, 0.1).unwrap();
        assert!(subspace_gap(&out, &frame).unwrap() < 1e-14);
    }

    #[test]
    fn constant_coefficients_match_exponential() {
        let f = autonomous(1).unwrap();
        let fs = fundamental_solution(&f, 0.0, 1.0, 200).unwrap();
        let jb = f.generator(0.0, 0.0);
        let exact = linalg::expm(&jb);
        assert!(linalg::max_abs(&(fs.psi.last().unwrap() - &exact)) < 1e-8);
        assert!(fs.symplectic_residual <= TOL_SYMP);
        let inv = fs.inverse_at(f.space().j(), 200);
        assert!(linalg::max_abs(&(inv * &exact - Mat::identity(2, 2))) < 1e-8);
    }

    #[test]
    fn autonomous_spaces_are_asymptotic_splitting() {
        let f = autonomous(2).unwrap();
        let (vplus, vminus) = asymptotic_frames(&f, 0.0).unwrap();
        for t0 in [-2.0, 0.0, 3.0] {
            let u = unstable_space(&f, 0.0, t0, 10.0).unwrap();
            let s = stable_space(&f, 0.0, t0, 10.0).unwrap();
            assert!(subspace_gap(u.frame.columns(), &vplus).unwrap() < 1e-8);
            assert!(subspace_gap(s.frame.columns(), &vminus).unwrap() < 1e-8);
        }
    }
}
