//! Seeded random generators for paths, Lagrangians and Hamiltonian families.
//! Every generator is deterministic in its seed.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hamiltonian::family::{reflection, HamiltonianFamily};
use crate::linalg::{self, CMat, Mat};
use crate::maslov::{self, FrameFn, LagrangianPath};
use crate::spectral_flow::SymmetricMatrixPath;
use crate::symplectic::{realify, standard_space, LagrangianFrame, SymplecticSpace};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut Rng64, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn random_symmetric(rng: &mut Rng64, dim: usize, scale: f64) -> Mat {
    let g = gaussian_matrix(rng, dim, dim);
    (&g + g.transpose()) * (0.5 * scale)
}

pub fn random_hermitian(rng: &mut Rng64, n: usize, scale: f64) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&g + g.adjoint()) * Complex64::new(0.5 * scale, 0.0)
}

/// Haar-distributed unitary: QR of a complex Gaussian with the phases of `R` removed.
pub fn random_unitary(rng: &mut Rng64, n: usize) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut c = q.column_mut(j);
        c *= phase;
    }
    q
}

/// Random real orthogonal matrix.
pub fn random_orthogonal(rng: &mut Rng64, n: usize) -> Mat {
    let g = gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut c = q.column_mut(j);
            c *= -1.0;
        }
    }
    q
}

/// `exp(i t H)` for Hermitian `H`.
pub fn unitary_exp(h: &CMat, t: f64) -> CMat {
    let e = SymmetricEigen::new(h.clone());
    let d = CMat::from_diagonal(&e.eigenvalues.map(|x| Complex64::from_polar(1.0, t * x)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// `U · span[I; 0]` in the standard space.
pub fn lagrangian_from_unitary(u: &CMat, space: &SymplecticSpace) -> LagrangianFrame {
    let n = space.n();
    let r = realify(u, space);
    LagrangianFrame::from_orthonormal(r.columns(0, n).into_owned())
}

pub fn random_lagrangian(rng: &mut Rng64, space: &SymplecticSpace) -> LagrangianFrame {
    lagrangian_from_unitary(&random_unitary(rng, space.n()), space)
}

/// Path `λ ↦ U exp(iλH) · span[I; 0]` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryLagrangianPath {
    pub start: CMat,
    pub generator: CMat,
}

impl UnitaryLagrangianPath {
    pub fn random(rng: &mut Rng64, n: usize, scale: f64) -> Self {
        Self { start: random_unitary(rng, n), generator: random_hermitian(rng, n, scale) }
    }

    pub fn frame_fn(&self, space: &SymplecticSpace) -> FrameFn {
        let (u, h, s) = (self.start.clone(), self.generator.clone(), space.clone());
        Arc::new(move |l| Ok(lagrangian_from_unitary(&(&u * unitary_exp(&h, l)), &s)))
    }

    pub fn path(&self, space: &SymplecticSpace, grid: usize) -> Result<LagrangianPath> {
        LagrangianPath::from_fn(space.clone(), self.frame_fn(space), 0.0, 1.0, grid)
    }
}

/// A pair of unitary Lagrangian paths transversal at `λ = 0` and `λ = 1`
/// with margin above `min_margin`; resampled until admissible.
pub fn random_admissible_pair(
    rng: &mut Rng64,
    n: usize,
    scale: f64,
    min_margin: f64,
) -> Result<(UnitaryLagrangianPath, UnitaryLagrangianPath)> {
    let space = standard_space(n)?;
    for _ in 0..1000 {
        let p0 = UnitaryLagrangianPath::random(rng, n, scale);
        let p1 = UnitaryLagrangianPath::random(rng, n, scale);
        let (f0, f1) = (p0.frame_fn(&space), p1.frame_fn(&space));
        let ok = [0.0, 1.0]
            .iter()
            .all(|&l| maslov::transversality_margin(&space, &f0(l).unwrap(), &f1(l).unwrap()) > min_margin);
        if ok {
            return Ok((p0, p1));
        }
    }
    Err(Error::Numerical("no admissible pair after 1000 draws".into()))
}

/// Piecewise-linear symmetric path with `segments` pieces and endpoint
/// spectra at least `min_gap` away from 0.
pub fn random_symmetric_path(
    rng: &mut Rng64,
    dim: usize,
    segments: usize,
    scale: f64,
    min_gap: f64,
) -> Result<SymmetricMatrixPath> {
    let gap = |m: &Mat| linalg::symmetric_eigenvalues(m).iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    let endpoint = |rng: &mut Rng64| -> Result<Mat> {
        for _ in 0..1000 {
            let m = random_symmetric(rng, dim, scale);
            if gap(&m) > min_gap {
                return Ok(m);
            }
        }
        Err(Error::Numerical("no invertible endpoint after 1000 draws".into()))
    };
    let mut nodes = vec![endpoint(rng)?];
    for _ in 1..segments {
        nodes.push(random_symmetric(rng, dim, scale));
    }
    nodes.push(endpoint(rng)?);
    SymmetricMatrixPath::piecewise_linear(nodes)
}

/// Symmetric `S` with `JS` hyperbolic: `Rᵀ diag(D₁, -D₂) R` for a random
/// `J`-commuting orthogonal `R` and `D` in `[lo, hi]`. `JS` has eigenvalues `±sqrt(d₁d₂)`.
pub fn random_hyperbolic_symmetric(rng: &mut Rng64, n: usize, lo: f64, hi: f64) -> Result<Mat> {
    let space = standard_space(n)?;
    let r = realify(&random_unitary(rng, n), &space);
    let d = Mat::from_diagonal(&linalg::col(
        &(0..2 * n).map(|_| rng.gen_range(lo..hi)).collect::<Vec<_>>(),
    ));
    Ok(r.transpose() * reflection(n) * d * r)
}

/// Random family satisfying the asymptotic assumptions: hyperbolic limits
/// joined by a `tanh` profile plus a `λ`-scaled `sech` bump.
pub fn random_family(rng: &mut Rng64, n: usize) -> Result<HamiltonianFamily> {
    let sm = random_hyperbolic_symmetric(rng, n, 0.5, 2.0)?;
    let sp = random_hyperbolic_symmetric(rng, n, 0.5, 2.0)?;
    let bump = random_symmetric(rng, 2 * n, 0.5);
    let decay = rng.gen_range(0.5..1.5);
    let diff = &sp - &sm;
    let (d1, d2, z) = (diff.clone(), diff, Mat::zeros(2 * n, 2 * n));
    HamiltonianFamily::new(
        "random",
        n,
        Arc::new(move |_| sm.clone()),
        Arc::new(move |l, t| {
            let chi = 0.5 * (1.0 + (t / decay).tanh());
            &d1 * chi + &bump * (l / (t / decay).cosh())
        }),
        Arc::new(move |_| z.clone()),
        Arc::new(move |_| d2.clone()),
        decay,
    )
}

/// A path with exactly one crossing with `W = span[I; 0]`: `k` coordinate
/// lines rotate through the horizontal at `λ₀` in direction `sign`, the
/// others stay at fixed transversal angles, all conjugated by a random `O(n)`.
#[derive(Clone)]
pub struct SingleCrossing {
    pub path: LagrangianPath,
    pub reference: LagrangianFrame,
    pub lambda0: f64,
    pub dim: usize,
    pub sign: i64,
}

pub fn single_crossing_path(rng: &mut Rng64, n: usize, k: usize, sign: i64) -> Result<SingleCrossing> {
    if k == 0 || k > n || sign.abs() != 1 {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n and sign = ±1, got k = {k}, sign = {sign}")));
    }
    let space = standard_space(n)?;
    let lambda0 = rng.gen_range(0.2..0.8);
    let rates: Vec<f64> = (0..k).map(|_| rng.gen_range(1.0..2.0)).collect();
    let fixed: Vec<f64> = (k..n).map(|_| rng.gen_range(0.3..PI - 0.3)).collect();
    let o = random_orthogonal(rng, n);
    let rot = linalg::block_diag(&o, &o);
    let f: FrameFn = Arc::new(move |l| {
        let angles: Vec<f64> =
            rates.iter().map(|a| sign as f64 * a * (l - lambda0)).chain(fixed.iter().copied()).collect();
        let c = Mat::from_diagonal(&linalg::col(&angles.iter().map(|t| t.cos()).collect::<Vec<_>>()));
        let s = Mat::from_diagonal(&linalg::col(&angles.iter().map(|t| t.sin()).collect::<Vec<_>>()));
        Ok(LagrangianFrame::from_orthonormal(&rot * linalg::vstack(&c, &s)))
    });
    let eye = Mat::identity(2 * n, 2 * n);
    let reference = LagrangianFrame::from_orthonormal(eye.columns(0, n).into_owned());
    Ok(SingleCrossing {
        path: LagrangianPath::from_fn(space, f, 0.0, 1.0, 8)?,
        reference,
        lambda0,
        dim: k,
        sign,
    })
}
