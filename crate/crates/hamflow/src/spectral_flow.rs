//! Spectral flow of symmetric or Hermitian matrix paths, certified by
//! spectral-projection counting, and the determinant-winding route.
//!
//! A subinterval `[a, b]` is accepted once some `ε` keeps a distance from
//! every endpoint eigenvalue magnitude that exceeds the eigenvalue drift
//! bound on `[a, b]` (Weyl). Then no eigenvalue meets `±ε` inside and the
//! count of eigenvalues in `[0, ε]` at `b` minus that at `a` is the local flow.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Mat};
use crate::maslov::{uniform_grid, widest_gap};

pub const MAX_DEPTH: usize = 40;
pub const DEFAULT_INITIAL: usize = 16;
pub const DEFAULT_MARGIN: f64 = 0.05;
pub const DEFAULT_CONTOUR_SAMPLES: usize = 256;
/// Relative size below which an eigenvalue is treated as zero.
pub const ZERO_RTOL: f64 = 1e-12;
/// Relative size below which an endpoint eigenvalue signals a kernel.
pub const KERNEL_RTOL: f64 = 1e-10;

pub type RealFn = Arc<dyn Fn(f64) -> Mat + Send + Sync>;
pub type HermitianFn = Arc<dyn Fn(f64) -> CMat + Send + Sync>;

#[derive(Clone)]
enum Evaluator {
    Real(RealFn),
    Hermitian(HermitianFn),
}

/// `λ ↦ A(λ)` on `[lo, hi]`, real symmetric or complex Hermitian.
#[derive(Clone)]
pub struct SymmetricMatrixPath {
    eval: Evaluator,
    dim: usize,
    lipschitz: Option<f64>,
    lo: f64,
    hi: f64,
}

impl SymmetricMatrixPath {
    pub fn real(dim: usize, f: RealFn) -> Self {
        Self { eval: Evaluator::Real(f), dim, lipschitz: None, lo: 0.0, hi: 1.0 }
    }

    pub fn hermitian(dim: usize, f: HermitianFn) -> Self {
        Self { eval: Evaluator::Hermitian(f), dim, lipschitz: None, lo: 0.0, hi: 1.0 }
    }

    /// Declare `||A(λ) - A(μ)|| ≤ L |λ - μ|`; drift is then bounded without sampling.
    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    /// Piecewise-linear interpolation of symmetric nodes over `[0, 1]`.
    pub fn piecewise_linear(nodes: Vec<Mat>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument("need at least two nodes".into()));
        }
        let dim = nodes[0].nrows();
        let segs = nodes.len() - 1;
        let mut lip = 0.0f64;
        for w in nodes.windows(2) {
            lip = lip.max(linalg::symmetric_norm(&(&w[1] - &w[0])) * segs as f64);
        }
        let nodes = Arc::new(nodes);
        let f: RealFn = Arc::new(move |l| {
            let x = l.clamp(0.0, 1.0) * segs as f64;
            let k = (x.floor() as usize).min(segs - 1);
            let t = x - k as f64;
            &nodes[k] * (1.0 - t) + &nodes[k + 1] * t
        });
        Ok(Self::real(dim, f).with_lipschitz(lip))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn is_real(&self) -> bool {
        matches!(self.eval, Evaluator::Real(_))
    }

    /// Matrix at `λ`, clamped to the domain, as a complex matrix.
    pub fn evaluate_complex(&self, lam: f64) -> CMat {
        let l = lam.clamp(self.lo, self.hi);
        match &self.eval {
            Evaluator::Real(f) => linalg::to_complex(&f(l)),
            Evaluator::Hermitian(f) => f(l),
        }
    }

    /// Real matrix at `λ`; `None` for Hermitian paths.
    pub fn evaluate_real(&self, lam: f64) -> Option<Mat> {
        let l = lam.clamp(self.lo, self.hi);
        match &self.eval {
            Evaluator::Real(f) => Some(f(l)),
            Evaluator::Hermitian(_) => None,
        }
    }

    /// Sorted eigenvalues at `λ`.
    pub fn spectrum(&self, lam: f64) -> Vec<f64> {
        let l = lam.clamp(self.lo, self.hi);
        match &self.eval {
            Evaluator::Real(f) => linalg::symmetric_eigenvalues(&f(l)),
            Evaluator::Hermitian(f) => linalg::hermitian_eigenvalues(&f(l)),
        }
    }

    /// Largest symmetry defect `||A - A^*||` at `λ`.
    pub fn symmetry_residual(&self, lam: f64) -> f64 {
        let a = self.evaluate_complex(lam);
        (&a - a.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// `λ ↦ A(λ) + δ I`.
    pub fn shifted(&self, delta: f64) -> Self {
        let eval = match &self.eval {
            Evaluator::Real(f) => {
                let f = f.clone();
                let dim = self.dim;
                Evaluator::Real(Arc::new(move |l| f(l) + Mat::identity(dim, dim) * delta))
            }
            Evaluator::Hermitian(f) => {
                let f = f.clone();
                let dim = self.dim;
                Evaluator::Hermitian(Arc::new(move |l| {
                    f(l) + CMat::identity(dim, dim) * Complex64::new(delta, 0.0)
                }))
            }
        };
        Self { eval, ..self.clone() }
    }

    /// `λ ↦ A(lo + hi - λ)`.
    pub fn reversed(&self) -> Self {
        let (lo, hi) = (self.lo, self.hi);
        let eval = match &self.eval {
            Evaluator::Real(f) => {
                let f = f.clone();
                Evaluator::Real(Arc::new(move |l| f(lo + hi - l)))
            }
            Evaluator::Hermitian(f) => {
                let f = f.clone();
                Evaluator::Hermitian(Arc::new(move |l| f(lo + hi - l)))
            }
        };
        Self { eval, ..self.clone() }
    }

    /// Restriction to `[a, b]`, keeping the original parameter.
    pub fn restricted(&self, a: f64, b: f64) -> Result<Self> {
        if !(a >= self.lo && b <= self.hi && b > a) {
            return Err(Error::InvalidArgument(format!(
                "[{a}, {b}] not inside [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(Self { lo: a, hi: b, ..self.clone() })
    }

    /// Concatenation on `[0, 1]`: first half runs `p`, second half runs `q`.
    pub fn concatenate(p: &Self, q: &Self) -> Result<Self> {
        if p.dim != q.dim {
            return Err(Error::DimensionMismatch("paths of different sizes".into()));
        }
        let (pl, ph, ql, qh) = (p.lo, p.hi, q.lo, q.hi);
        let lip = match (p.lipschitz, q.lipschitz) {
            (Some(a), Some(b)) => Some(2.0 * (a * (ph - pl)).max(b * (qh - ql))),
            _ => None,
        };
        let (pc, qc) = (p.clone(), q.clone());
        let eval = match (&p.eval, &q.eval) {
            (Evaluator::Real(_), Evaluator::Real(_)) => Evaluator::Real(Arc::new(move |l| {
                if l <= 0.5 {
                    pc.evaluate_real(pl + 2.0 * l * (ph - pl)).expect("real path")
                } else {
                    qc.evaluate_real(ql + (2.0 * l - 1.0) * (qh - ql)).expect("real path")
                }
            })),
            _ => Evaluator::Hermitian(Arc::new(move |l| {
                if l <= 0.5 {
                    pc.evaluate_complex(pl + 2.0 * l * (ph - pl))
                } else {
                    qc.evaluate_complex(ql + (2.0 * l - 1.0) * (qh - ql))
                }
            })),
        };
        Ok(Self { eval, dim: p.dim, lipschitz: lip, lo: 0.0, hi: 1.0 })
    }

    fn difference_norm(&self, a: f64, b: f64) -> f64 {
        match &self.eval {
            Evaluator::Real(f) => linalg::symmetric_norm(&(f(b) - f(a))),
            Evaluator::Hermitian(f) => linalg::spectral_norm_c(&(f(b) - f(a))),
        }
    }

    fn scale(&self) -> f64 {
        let s0 = self.spectrum(self.lo);
        let s1 = self.spectrum(self.hi);
        s0.iter().chain(s1.iter()).fold(1.0f64, |m, x| m.max(x.abs()))
    }
}

/// A source of spectra over a parameter interval, with a drift bound.
pub trait SpectralSource: Sync {
    /// Eigenvalues (ascending) at `λ`.
    fn spectrum_at(&self, lam: f64) -> Result<Vec<f64>>;
    /// Bound on how far any eigenvalue on `[a, b]` strays from the union of
    /// the endpoint spectra. `mid` is the spectrum at the midpoint.
    fn drift(&self, a: (f64, &[f64]), mid: (f64, &[f64]), b: (f64, &[f64])) -> Result<f64>;
    /// Only eigenvalues with `|σ| < window` take part; `None` means all.
    fn window(&self) -> Option<f64>;
    /// Eigenvalues with `|σ|` below this count as zero.
    fn zero_tol(&self) -> f64;
}

impl SpectralSource for SymmetricMatrixPath {
    fn spectrum_at(&self, lam: f64) -> Result<Vec<f64>> {
        let a = self.evaluate_complex(lam);
        let scale = a.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        let r = self.symmetry_residual(lam);
        if r > 1e-10 * scale {
            return Err(Error::Structure { what: "path symmetry", residual: r, tol: 1e-10 * scale });
        }
        Ok(self.spectrum(lam))
    }

    fn drift(&self, a: (f64, &[f64]), mid: (f64, &[f64]), b: (f64, &[f64])) -> Result<f64> {
        if let Some(l) = self.lipschitz {
            return Ok(0.5 * l * (b.0 - a.0));
        }
        Ok(self
            .difference_norm(a.0, b.0)
            .max(self.difference_norm(a.0, mid.0))
            .max(self.difference_norm(mid.0, b.0)))
    }

    fn window(&self) -> Option<f64> {
        None
    }

    fn zero_tol(&self) -> f64 {
        ZERO_RTOL * self.scale()
    }
}

/// One accepted subinterval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowStep {
    pub lo: f64,
    pub hi: f64,
    pub eps: f64,
    /// Eigenvalues in `[0, ε]` at `lo` and at `hi`.
    pub count_lo: usize,
    pub count_hi: usize,
    pub drift: f64,
    pub margin: f64,
}

/// Certified partition for a spectral-flow computation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlowCertificate {
    pub steps: Vec<FlowStep>,
    pub total: i64,
}

impl FlowCertificate {
    pub fn partition(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.steps.iter().map(|s| s.lo).collect();
        if let Some(s) = self.steps.last() {
            p.push(s.hi);
        }
        p
    }
}

fn count_window(spec: &[f64], eps: f64, zero: f64) -> usize {
    spec.iter().filter(|&&x| x >= -zero && x <= eps).count()
}

/// Certified spectral flow of any spectral source over `[lo, hi]`.
pub fn certified_flow<S: SpectralSource + ?Sized>(
    src: &S,
    lo: f64,
    hi: f64,
    initial: usize,
) -> Result<FlowCertificate> {
    let grid = uniform_grid(lo, hi, initial)?;
    let spectra = grid
        .par_iter()
        .map(|&l| src.spectrum_at(l))
        .collect::<Result<Vec<_>>>()?;
    let zero = src.zero_tol();
    let pieces: Vec<Result<Vec<FlowStep>>> = (0..grid.len() - 1)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            certify(src, (grid[i], &spectra[i]), (grid[i + 1], &spectra[i + 1]), zero, 0, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut steps = Vec::new();
    for p in pieces {
        steps.extend(p?);
    }
    let total = steps.iter().map(|s| s.count_hi as i64 - s.count_lo as i64).sum();
    Ok(FlowCertificate { steps, total })
}

fn certify<S: SpectralSource + ?Sized>(
    src: &S,
    a: (f64, &[f64]),
    b: (f64, &[f64]),
    zero: f64,
    depth: usize,
    out: &mut Vec<FlowStep>,
) -> Result<()> {
    let lm = 0.5 * (a.0 + b.0);
    let sm = src.spectrum_at(lm)?;
    let drift = src.drift(a, (lm, &sm), b)?;
    let cap = match src.window() {
        Some(w) => w,
        None => {
            let top = a.1.iter().chain(b.1.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
            2.0 * top + 4.0 * drift + 1.0
        }
    };
    let mags = a.1.iter().chain(b.1.iter()).map(|x| x.abs());
    let (eps, margin) = widest_gap(mags, cap);
    if margin > drift * (1.0 + 1e-9) + zero {
        out.push(FlowStep {
            lo: a.0,
            hi: b.0,
            eps,
            count_lo: count_window(a.1, eps, zero),
            count_hi: count_window(b.1, eps, zero),
            drift,
            margin,
        });
        return Ok(());
    }
    if depth >= MAX_DEPTH {
        return Err(Error::RefinementExhausted {
            lo: a.0,
            hi: b.0,
            reason: format!("drift {drift:.3e} against spectral margin {margin:.3e}"),
        });
    }
    certify(src, a, (lm, &sm), zero, depth + 1, out)?;
    certify(src, (lm, &sm), b, zero, depth + 1, out)
}

fn check_endpoints(path: &SymmetricMatrixPath) -> Result<()> {
    let tol = KERNEL_RTOL * path.scale();
    for lam in [path.lo, path.hi] {
        let s = path.spectrum(lam);
        let smallest = s.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        if smallest <= tol {
            return Err(Error::EndpointKernel { lambda: lam, value: smallest });
        }
    }
    Ok(())
}

/// Spectral flow with its certificate. Endpoints must be invertible.
pub fn spectral_flow(path: &SymmetricMatrixPath) -> Result<(i64, FlowCertificate)> {
    check_endpoints(path)?;
    let cert = certified_flow(path, path.lo, path.hi, DEFAULT_INITIAL)?;
    Ok((cert.total, cert))
}

/// Same as [`spectral_flow`] with a caller-chosen initial grid.
pub fn spectral_flow_with_grid(path: &SymmetricMatrixPath, initial: usize) -> Result<(i64, FlowCertificate)> {
    check_endpoints(path)?;
    let cert = certified_flow(path, path.lo, path.hi, initial)?;
    Ok((cert.total, cert))
}

/// `A(λ) = -P₋ + (λ - 1/2) P₀ + P₊` with `rank P₀ = 1`.
pub fn normalization_path(dim_minus: usize, dim_plus: usize) -> Result<SymmetricMatrixPath> {
    if dim_minus < 1 || dim_plus < 1 {
        return Err(Error::InvalidArgument("both complementary dimensions must be at least 1".into()));
    }
    let dim = dim_minus + 1 + dim_plus;
    let f: RealFn = Arc::new(move |l| {
        let mut a = Mat::zeros(dim, dim);
        for i in 0..dim_minus {
            a[(i, i)] = -1.0;
        }
        a[(dim_minus, dim_minus)] = l - 0.5;
        for i in dim_minus + 1..dim {
            a[(i, i)] = 1.0;
        }
        a
    });
    Ok(SymmetricMatrixPath::real(dim, f).with_lipschitz(1.0))
}

/// Flow of the shifted path together with a warning when `δ` is large
/// relative to the endpoint spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedFlow {
    pub value: i64,
    pub certificate: FlowCertificate,
    pub warning: Option<String>,
}

/// Spectral flow of `λ ↦ A(λ) + δ I`.
pub fn shifted_flow(path: &SymmetricMatrixPath, delta: f64) -> Result<ShiftedFlow> {
    let tol = KERNEL_RTOL * path.scale();
    let smallest_nonzero = [path.lo, path.hi]
        .iter()
        .flat_map(|&l| path.spectrum(l))
        .map(f64::abs)
        .filter(|&x| x > tol)
        .fold(f64::INFINITY, f64::min);
    let warning = (delta.abs() >= 0.5 * smallest_nonzero).then(|| {
        format!("|delta| = {:.3e} is not below half the smallest nonzero endpoint eigenvalue {smallest_nonzero:.3e}", delta.abs())
    });
    let (value, certificate) = spectral_flow(&path.shifted(delta))?;
    Ok(ShiftedFlow { value, certificate, warning })
}

/// The same path regarded as a path of Hermitian matrices.
pub fn complexify_path(path: &SymmetricMatrixPath) -> SymmetricMatrixPath {
    let p = path.clone();
    let f: HermitianFn = Arc::new(move |l| p.evaluate_complex(l));
    SymmetricMatrixPath { eval: Evaluator::Hermitian(f), ..path.clone() }
}

/// Argument of `det(m)` and the ratio of smallest to largest LU pivot magnitude.
pub fn det_arg_pivots(m: &CMat) -> Result<(f64, f64)> {
    let lu = m.clone().lu();
    let u = lu.u();
    let mut arg = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..u.nrows() {
        let p = u[(i, i)];
        let r = p.norm();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::Numerical("determinant vanishes on the contour".into()));
        }
        arg += p.arg();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if lu.p().determinant::<f64>() < 0.0 {
        arg += std::f64::consts::PI;
    }
    Ok((arg, lo / hi))
}

/// Argument of `det(m)` from the LU pivots, and `log|det m|`.
pub fn det_arg(m: &CMat) -> Result<(f64, f64)> {
    let lu = m.clone().lu();
    let u = lu.u();
    let mut arg = 0.0;
    let mut logabs = 0.0;
    for i in 0..u.nrows() {
        let p = u[(i, i)];
        let r = p.norm();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::Numerical("determinant vanishes on the contour".into()));
        }
        arg += p.arg();
        logabs += r.ln();
    }
    if lu.p().determinant::<f64>() < 0.0 {
        arg += std::f64::consts::PI;
    }
    Ok((arg, logabs))
}

pub(crate) fn wrap(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x % two_pi;
    if y > std::f64::consts::PI {
        y -= two_pi;
    } else if y <= -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

/// Winding number of `(λ, s) ↦ det F(λ, s)` along the positively oriented
/// boundary of `[lam_lo, lam_hi] x [-half_height, half_height]`.
pub fn determinant_winding<F>(f: F, lam_lo: f64, lam_hi: f64, half_height: f64, samples: usize) -> Result<i64>
where
    F: Fn(f64, f64) -> CMat + Sync,
{
    let turns = argument_winding(|l, s| det_arg(&f(l, s)).map(|r| r.0), lam_lo, lam_hi, half_height, samples)?;
    round_turns(turns)
}

/// Nearest integer to an accumulated winding, rejecting non-integral totals.
pub fn round_turns(turns: f64) -> Result<i64> {
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(Error::Numerical(format!("accumulated winding {turns} is not an integer")));
    }
    Ok(rounded as i64)
}

/// Accumulated turns of a continuous argument function around the rectangle
/// boundary. Each accepted step changes the argument by less than `π/2` and
/// agrees with the sum of its two half steps.
pub fn argument_winding<F>(arg: F, lam_lo: f64, lam_hi: f64, half_height: f64, samples: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    if !(lam_hi > lam_lo) || !(half_height > 0.0) || samples < 8 {
        return Err(Error::InvalidArgument("degenerate contour".into()));
    }
    let corners = [
        (lam_lo, -half_height),
        (lam_hi, -half_height),
        (lam_hi, half_height),
        (lam_lo, half_height),
    ];
    let width = lam_hi - lam_lo;
    let perimeter = 2.0 * width + 4.0 * half_height;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for k in 0..4 {
        let (x0, y0) = corners[k];
        let (x1, y1) = corners[(k + 1) % 4];
        let len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
        let m = ((samples as f64 * len / perimeter).ceil() as usize).max(4);
        for j in 0..m {
            let t = j as f64 / m as f64;
            pts.push((x0 + t * (x1 - x0), y0 + t * (y1 - y0)));
        }
    }
    pts.push(pts[0]);
    let args = pts.par_iter().map(|&(l, s)| arg(l, s)).collect::<Result<Vec<f64>>>()?;
    let total: f64 = (0..pts.len() - 1)
        .into_par_iter()
        .map(|i| arg_increment(&arg, pts[i], args[i], pts[i + 1], args[i + 1], 0))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok(total / (2.0 * std::f64::consts::PI))
}

fn arg_increment<F>(arg: &F, p: (f64, f64), ap: f64, q: (f64, f64), aq: f64, depth: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let step = wrap(aq - ap);
    let mid = (0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1));
    let am = arg(mid.0, mid.1)?;
    let first = wrap(am - ap);
    let second = wrap(aq - am);
    let consistent = (first + second - step).abs() < 1e-8;
    if step.abs() < std::f64::consts::FRAC_PI_2 && first.abs() < std::f64::consts::FRAC_PI_2 && consistent {
        return Ok(step);
    }
    if depth >= 40 {
        return Err(Error::RefinementExhausted {
            lo: p.0,
            hi: q.0,
            reason: format!("argument step {step:.3} on the contour at s in [{}, {}]", p.1, q.1),
        });
    }
    Ok(arg_increment(arg, p, ap, mid, am, depth + 1)? + arg_increment(arg, mid, am, q, aq, depth + 1)?)
}

/// Winding of `det(A(λ) + i s I)` around
/// `[lo - margin, hi + margin] x [-half_height, half_height]`; the path is
/// extended constantly outside its domain.
pub fn chern_winding(
    path: &SymmetricMatrixPath,
    margin: f64,
    half_height: f64,
    samples: usize,
) -> Result<i64> {
    check_endpoints(path)?;
    let dim = path.dim;
    let p = path.clone();
    determinant_winding(
        move |l, s| p.evaluate_complex(l) + CMat::identity(dim, dim) * Complex64::new(0.0, s),
        path.lo - margin,
        path.hi + margin,
        half_height,
        samples,
    )
}

/// Default contour height `max_λ ||A(λ)||_max + 1`, estimated on a grid.
pub fn default_half_height(path: &SymmetricMatrixPath) -> f64 {
    let grid = uniform_grid(path.lo, path.hi, 64).expect("valid domain");
    grid.iter()
        .map(|&l| path.evaluate_complex(l).iter().fold(0.0f64, |m, z| m.max(z.norm())))
        .fold(0.0f64, f64::max)
        + 1.0
}

/// [`chern_winding`] with the default margin, height and sample count.
pub fn chern_winding_default(path: &SymmetricMatrixPath) -> Result<i64> {
    chern_winding(path, DEFAULT_MARGIN, default_half_height(path), DEFAULT_CONTOUR_SAMPLES)
}

/// `1 x 1` path `λ ↦ [c₀ + c₁ λ]`.
pub fn scalar_linear_path(c0: f64, c1: f64) -> SymmetricMatrixPath {
    let f: RealFn = Arc::new(move |l| DMatrix::from_element(1, 1, c0 + c1 * l));
    SymmetricMatrixPath::real(1, f).with_lipschitz(c1.abs())
}
