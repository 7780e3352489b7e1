//! Discretized boundary-value operators `u ↦ J u' + S(t) u` on `[a, b]` with
//! Lagrangian boundary conditions `u(a) ∈ Λ₀`, `u(b) ∈ Λ₁`.
//!
//! Piecewise-linear nodal values with every element integral taken at the
//! midpoint. On one element with nodes `u₀, u₁` the symmetrized form
//! `½∫(⟨J u', v⟩ + ⟨u, J v'⟩) + ∫⟨S u, v⟩` becomes
//!
//! ```text
//!   [[ hS/4,          J/2 + hS/4 ],
//!    [ -J/2 + hS/4,   hS/4       ]]
//! ```
//!
//! and the mass is `h/4` on all four blocks. The alternating mode
//! `(-1)^i c` has zero mass, which keeps it away from the zero eigenvalue;
//! it lies in the constrained space only when `Λ₀ ∩ Λ₁ ≠ {0}`, and it is then
//! a common null vector of stiffness and mass, removed by
//! [`pencil_eigenvalues`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Mat};
use crate::spectral_flow::{
    argument_winding, certified_flow, det_arg_pivots, round_turns, FlowCertificate, SpectralSource,
};
use crate::symplectic::{LagrangianFrame, SymplecticSpace};

use super::family::HamiltonianFamily;
use super::ode::{stable_space, unstable_space};

/// Mass eigenvalues below this fraction of the largest are treated as zero.
pub const MASS_RTOL: f64 = 1e-8;
/// Isotropy budget for boundary frames.
pub const TOL_BOUNDARY: f64 = 1e-8;
/// Endpoint eigenvalues below this magnitude signal a kernel.
pub const PENCIL_KERNEL_TOL: f64 = 1e-7;

/// Reduced stiffness and mass on the coefficient space
/// `[α, u₁, …, u_{N-1}, β]` with `u₀ = F₀ α`, `u_N = F₁ β`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValueOperator {
    pub stiffness: Mat,
    pub mass: Mat,
    pub left: Mat,
    pub right: Mat,
    pub interval: (f64, f64),
    pub intervals: usize,
    pub n: usize,
}

impl BoundaryValueOperator {
    pub fn size(&self) -> usize {
        self.stiffness.nrows()
    }

    /// `||K - K^T|| / max(1, ||K||)`.
    pub fn symmetry_residual(&self) -> f64 {
        let k = &self.stiffness;
        linalg::max_abs(&(k - k.transpose())) / linalg::max_abs(k).max(1.0)
    }

    /// Finite generalized eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        pencil_eigenvalues(&self.stiffness, &self.mass)
    }

    /// The `count` eigenvalues of smallest magnitude, ascending.
    pub fn eigenvalues_near_zero(&self, count: usize) -> Vec<f64> {
        let mut e = self.eigenvalues();
        e.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        e.truncate(count);
        e.sort_by(f64::total_cmp);
        e
    }

    /// Number of eigenvalues with `|σ| ≤ tol`.
    pub fn kernel_dimension(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|x| x.abs() <= tol).count()
    }

    /// `K + i s M`.
    pub fn shifted_complex(&self, s: f64) -> CMat {
        let mut c = linalg::to_complex(&self.stiffness);
        for (z, m) in c.iter_mut().zip(self.mass.iter()) {
            *z += Complex64::new(0.0, s * m);
        }
        c
    }
}

/// Finite eigenvalues of `K x = μ M x` with `M` positive semidefinite.
///
/// Directions where `M` vanishes are eliminated by a Schur complement, and
/// common null vectors of `K` and `M` are dropped.
pub fn pencil_eigenvalues(k: &Mat, m: &Mat) -> Vec<f64> {
    let (d, v) = linalg::symmetric_eigen(m);
    let dmax = d.iter().fold(0.0f64, |a, &x| a.max(x));
    if dmax <= 0.0 {
        return Vec::new();
    }
    let keep: Vec<usize> = (0..d.len()).filter(|&i| d[i] > MASS_RTOL * dmax).collect();
    let drop: Vec<usize> = (0..d.len()).filter(|&i| d[i] <= MASS_RTOL * dmax).collect();
    let rows = k.nrows();
    let mut kc = linalg::symmetrize(k);
    if !drop.is_empty() {
        let z = Mat::from_fn(rows, drop.len(), |i, j| v[(i, drop[j])]);
        let kz = &kc * &z;
        let k22 = z.transpose() * &kz;
        let (e, w) = linalg::symmetric_eigen(&k22);
        let scale = linalg::max_abs(&kc).max(1.0);
        let mut pinv = Mat::zeros(drop.len(), drop.len());
        for (i, &ev) in e.iter().enumerate() {
            if ev.abs() > 1e-10 * scale {
                let wi = w.column(i);
                pinv += (wi * wi.transpose()) / ev;
            }
        }
        kc -= &kz * pinv * kz.transpose();
    }
    let p = Mat::from_fn(rows, keep.len(), |i, j| v[(i, keep[j])] / d[keep[j]].sqrt());
    let c = p.transpose() * kc * p;
    linalg::symmetric_eigenvalues(&c)
}

/// `Pᵀ X P` for the boundary reduction `P`.
fn reduce(full: &Mat, f0: &Mat, f1: &Mat, d: usize, nodes: usize) -> Mat {
    let n = f0.ncols();
    let fsize = d * nodes;
    let inner = d * (nodes - 2);
    let rsize = 2 * n + inner;
    // Column transform.
    let mut xp = Mat::zeros(fsize, rsize);
    xp.columns_mut(0, n).copy_from(&(full.columns(0, d) * f0));
    xp.columns_mut(n, inner).copy_from(&full.columns(d, inner));
    xp.columns_mut(n + inner, n).copy_from(&(full.columns(fsize - d, d) * f1));
    // Row transform.
    let mut out = Mat::zeros(rsize, rsize);
    out.rows_mut(0, n).copy_from(&(f0.transpose() * xp.rows(0, d)));
    out.rows_mut(n, inner).copy_from(&xp.rows(d, inner));
    out.rows_mut(n + inner, n).copy_from(&(f1.transpose() * xp.rows(fsize - d, d)));
    out
}

fn check_frame(space: &SymplecticSpace, f: &LagrangianFrame, which: &str) -> Result<()> {
    if f.dim() != space.dim() || f.n() != space.n() {
        return Err(Error::DimensionMismatch(format!("{which} boundary frame has shape {}x{}", f.dim(), f.n())));
    }
    let r = f.isotropy_residual(space);
    if r > TOL_BOUNDARY {
        return Err(Error::NotLagrangian { residual: r, tol: TOL_BOUNDARY });
    }
    Ok(())
}

/// Assemble `J u' + S(t) u` on `[a, b]` with `intervals` elements.
pub fn assemble_operator<F>(
    space: &SymplecticSpace,
    l0: &LagrangianFrame,
    l1: &LagrangianFrame,
    a: f64,
    b: f64,
    intervals: usize,
    s: F,
) -> Result<BoundaryValueOperator>
where
    F: Fn(f64) -> Mat,
{
    if intervals < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 intervals, got {intervals}")));
    }
    if !(b > a) {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    check_frame(space, l0, "left")?;
    check_frame(space, l1, "right")?;
    let d = space.dim();
    let nodes = intervals + 1;
    let h = (b - a) / intervals as f64;
    let j = space.j();
    let mut k = Mat::zeros(d * nodes, d * nodes);
    let mut m = Mat::zeros(d * nodes, d * nodes);
    let quarter = Mat::identity(d, d) * (h / 4.0);
    for e in 0..intervals {
        let sm = linalg::symmetrize(&s(a + (e as f64 + 0.5) * h)) * (h / 4.0);
        let (r0, r1) = (e * d, (e + 1) * d);
        for (ri, ci, extra) in [(r0, r0, None), (r0, r1, Some(0.5)), (r1, r0, Some(-0.5)), (r1, r1, None)] {
            let mut blk = k.view_mut((ri, ci), (d, d));
            blk += &sm;
            if let Some(c) = extra {
                blk += j * c;
            }
            let mut mb = m.view_mut((ri, ci), (d, d));
            mb += &quarter;
        }
    }
    let (f0, f1) = (l0.columns(), l1.columns());
    Ok(BoundaryValueOperator {
        stiffness: reduce(&k, f0, f1, d, nodes),
        mass: reduce(&m, f0, f1, d, nodes),
        left: f0.clone(),
        right: f1.clone(),
        interval: (a, b),
        intervals,
        n: space.n(),
    })
}

/// `Q u = J u'` on `[a, b]` with `u(a) ∈ Λ₀`, `u(b) ∈ Λ₁`.
pub fn assemble_q_operator(
    space: &SymplecticSpace,
    l0: &LagrangianFrame,
    l1: &LagrangianFrame,
    a: f64,
    b: f64,
    intervals: usize,
) -> Result<BoundaryValueOperator> {
    let d = space.dim();
    assemble_operator(space, l0, l1, a, b, intervals, |_| Mat::zeros(d, d))
}

/// Sizes for the truncated operator `A⁰_λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A0Config {
    /// The operator lives on `[-t0, t0]`.
    pub half_length: f64,
    /// Asymptotic splittings are propagated from `∓T`.
    pub truncation: f64,
    pub intervals: usize,
}

impl A0Config {
    /// `T` from the family, `t0 = T/2`, and `N` elements.
    pub fn for_family(fam: &HamiltonianFamily, intervals: usize) -> Self {
        let t = fam.default_truncation();
        Self { half_length: 0.5 * t, truncation: t, intervals }
    }
}

/// `(E^u_λ(-t0), E^s_λ(t0))`.
pub fn a0_boundary_frames(
    fam: &HamiltonianFamily,
    lam: f64,
    cfg: &A0Config,
) -> Result<(LagrangianFrame, LagrangianFrame)> {
    if !(cfg.half_length > 0.0 && cfg.half_length <= cfg.truncation) {
        return Err(Error::InvalidArgument(format!(
            "half length {} must lie in (0, T = {}]",
            cfg.half_length, cfg.truncation
        )));
    }
    let u = unstable_space(fam, lam, -cfg.half_length, cfg.truncation)?;
    let s = stable_space(fam, lam, cfg.half_length, cfg.truncation)?;
    Ok((u.frame, s.frame))
}

/// `A⁰_λ u = J u' + S_λ(t) u` on `[-t0, t0]` with `u(-t0) ∈ E^u_λ(-t0)`, `u(t0) ∈ E^s_λ(t0)`.
pub fn assemble_a0_operator(fam: &HamiltonianFamily, lam: f64, cfg: &A0Config) -> Result<BoundaryValueOperator> {
    let (l0, l1) = a0_boundary_frames(fam, lam, cfg)?;
    assemble_operator(fam.space(), &l0, &l1, -cfg.half_length, cfg.half_length, cfg.intervals, |t| fam.s(lam, t))
}

pub type OperatorFn<'a> = dyn Fn(f64) -> Result<BoundaryValueOperator> + Sync + 'a;

/// `λ ↦` operator pencil, tracked inside the window `(-w, w)`.
pub struct PencilPath<'a> {
    build: Box<OperatorFn<'a>>,
    window: f64,
    lo: f64,
    hi: f64,
}

impl<'a> PencilPath<'a> {
    pub fn new(build: Box<OperatorFn<'a>>, window: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(window > 0.0) || !(hi > lo) {
            return Err(Error::InvalidArgument(format!("window {window} on [{lo}, {hi}]")));
        }
        Ok(Self { build, window, lo, hi })
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn operator(&self, lam: f64) -> Result<BoundaryValueOperator> {
        (self.build)(lam.clamp(self.lo, self.hi))
    }

    /// Spectral flow with its certificate. Endpoints must be invertible.
    pub fn flow(&self, initial: usize) -> Result<FlowCertificate> {
        for lam in [self.lo, self.hi] {
            let e = self.operator(lam)?.eigenvalues();
            let smallest = e.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
            if smallest <= PENCIL_KERNEL_TOL {
                return Err(Error::EndpointKernel { lambda: lam, value: smallest });
            }
        }
        certified_flow(self, self.lo, self.hi, initial)
    }

    /// Winding of `det(K + isM) / det(K - isM)` around the rectangle, halved.
    ///
    /// The quotient stays continuous across the parameters where an
    /// alternating mode makes both determinants vanish identically in `s`.
    pub fn chern(&self, margin: f64, half_height: f64, samples: usize) -> Result<i64> {
        let arg = |l: f64, s: f64| -> Result<f64> {
            let mut lam = l.clamp(self.lo, self.hi);
            for attempt in 0..4 {
                let op = self.operator(lam)?;
                let (a, ratio) = det_arg_pivots(&op.shifted_complex(s))?;
                if ratio > 1e-12 || attempt == 3 {
                    return Ok(2.0 * a);
                }
                // Step off a common null vector; the quotient is continuous there.
                let nudge = 1e-6 * (attempt + 1) as f64;
                lam = if lam + nudge <= self.hi { lam + nudge } else { lam - nudge };
            }
            unreachable!()
        };
        let turns = argument_winding(arg, self.lo - margin, self.hi + margin, half_height, samples)?;
        round_turns(0.5 * turns)
    }
}

fn directed_distance(from: &[f64], to: &[f64]) -> f64 {
    from.iter()
        .map(|x| to.iter().fold(f64::INFINITY, |m, y| m.min((x - y).abs())))
        .fold(0.0f64, f64::max)
}

impl SpectralSource for PencilPath<'_> {
    fn spectrum_at(&self, lam: f64) -> Result<Vec<f64>> {
        Ok(self.operator(lam)?.eigenvalues())
    }

    /// Largest distance from a windowed eigenvalue at one node to the full
    /// spectrum at another, over the three node pairs.
    fn drift(&self, a: (f64, &[f64]), mid: (f64, &[f64]), b: (f64, &[f64])) -> Result<f64> {
        let w = self.window;
        let clip = |s: &[f64]| -> Vec<f64> { s.iter().copied().filter(|x| x.abs() < w).collect() };
        let (ca, cm, cb) = (clip(a.1), clip(mid.1), clip(b.1));
        let d = [
            directed_distance(&ca, b.1),
            directed_distance(&cb, a.1),
            directed_distance(&ca, mid.1),
            directed_distance(&cm, a.1),
            directed_distance(&cm, b.1),
            directed_distance(&cb, mid.1),
        ];
        Ok(d.iter().copied().fold(0.0f64, f64::max))
    }

    fn window(&self) -> Option<f64> {
        Some(self.window)
    }

    fn zero_tol(&self) -> f64 {
        1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::standard_space;
    use std::f64::consts::PI;

    fn line(theta: f64) -> LagrangianFrame {
        LagrangianFrame::from_orthonormal(Mat::from_column_slice(2, 1, &[theta.cos(), theta.sin()]))
    }

    #[test]
    fn assembly_is_symmetric_with_psd_mass() {
        let s = standard_space(1).unwrap();
        let op = assemble_q_operator(&s, &line(1.0), &line(0.0), 0.0, 1.0, 16).unwrap();
        assert_eq!(op.size(), 32);
        assert!(op.symmetry_residual() < 1e-14);
        assert!(linalg::symmetric_eigenvalues(&op.mass)[0] > -1e-14);
        assert!(assemble_q_operator(&s, &line(1.0), &line(0.0), 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn q_branch_near_zero() {
        // Oracle: u(1) = exp(-μJ) u(0) must return to the line at angle 0.
        let s = standard_space(1).unwrap();
        for lam in [0.3, 0.7] {
            let op = assemble_q_operator(&s, &line(PI * lam + PI / 2.0), &line(0.0), 0.0, 1.0, 200).unwrap();
            let e = op.eigenvalues_near_zero(1)[0];
            assert!((e - (PI * lam - PI / 2.0)).abs() < 5e-3, "λ = {lam}: {e}");
        }
    }

    #[test]
    fn equal_boundary_lines_give_kernel() {
        let s = standard_space(2).unwrap();
        let f = LagrangianFrame::from_orthonormal(Mat::identity(4, 4).columns(0, 2).into_owned());
        let op = assemble_q_operator(&s, &f, &f, 0.0, 1.0, 20).unwrap();
        assert_eq!(op.kernel_dimension(1e-8), 2);
    }

    #[test]
    fn transversal_lines_have_a_spectral_gap() {
        // Kernel of exp(-μJ)Λ₀ ∩ Λ₁ for Λ₀ ⟂ Λ₁ sits at μ = ±π/2.
        let s = standard_space(1).unwrap();
        let op = assemble_q_operator(&s, &line(PI / 2.0), &line(0.0), 0.0, 1.0, 64).unwrap();
        let e = op.eigenvalues_near_zero(1)[0];
        assert!(e.abs() > PI / 2.0 - 1e-2);
    }
}
