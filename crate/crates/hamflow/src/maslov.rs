//! Winding numbers of unitary paths and Maslov indices of Lagrangian paths.
//!
//! The winding number counts eigenphases of `d(λ)` in the arc `[π, π + ε]`
//! at the two ends of each subinterval. Subintervals are bisected until a
//! certified `ε` exists: every eigenphase of the endpoint unitaries keeps an
//! arc distance from `±ε` larger than the sampled drift of the path, so no
//! eigenvalue can reach `e^{i(π±ε)}` inside. The normalization is that
//! `d(λ) = e^{2πiλ}` has winding `+1`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Mat};
use crate::symplectic::{
    self, souriau_map, LagrangianFrame, SymplecticSpace, TOL_EIG,
};

/// Largest allowed `||U(b) - U(a)||` on an accepted subinterval.
pub const CONTINUITY_BUDGET: f64 = 0.4;
/// Eigenphases this close to `π` (measured after the shift) count as sitting on it.
pub const ZERO_PHASE_TOL: f64 = 1e-9;
pub const MAX_DEPTH: usize = 48;
pub const DEFAULT_SAMPLES: usize = 16;
pub const DEFAULT_CROSSING_GRID: usize = 64;
pub const DEFAULT_FD_STEP: f64 = 1e-4;

pub type UnitaryFn = Arc<dyn Fn(f64) -> Result<CMat> + Send + Sync>;
pub type FrameFn = Arc<dyn Fn(f64) -> Result<LagrangianFrame> + Send + Sync>;

/// Sampled path of unitaries with an optional evaluator used for refinement.
#[derive(Clone)]
pub struct UnitaryPath {
    samples: Vec<(f64, CMat)>,
    refine: Option<UnitaryFn>,
}

impl UnitaryPath {
    pub fn from_samples(samples: Vec<(f64, CMat)>) -> Result<Self> {
        check_grid(samples.iter().map(|s| s.0))?;
        for (lam, u) in &samples {
            let n = u.nrows();
            let r = linalg::spectral_norm_c(&(u * u.adjoint() - CMat::identity(n, n)));
            if r > 1e-8 {
                return Err(Error::Structure { what: "sample unitarity", residual: r, tol: 1e-8 })
                    .map_err(|e| annotate(e, *lam));
            }
        }
        Ok(Self { samples, refine: None })
    }

    pub fn from_fn(f: UnitaryFn, lo: f64, hi: f64, initial: usize) -> Result<Self> {
        let grid = uniform_grid(lo, hi, initial)?;
        let samples = grid
            .par_iter()
            .map(|&l| f(l).map(|u| (l, u)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { samples, refine: Some(f) })
    }

    pub fn samples(&self) -> &[(f64, CMat)] {
        &self.samples
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }
}

fn annotate(e: Error, lam: f64) -> Error {
    match e {
        Error::Structure { what, residual, tol } => {
            Error::Numerical(format!("{what} at lambda = {lam}: residual {residual:.3e} > {tol:.3e}"))
        }
        other => other,
    }
}

fn check_grid(grid: impl Iterator<Item = f64>) -> Result<()> {
    let g: Vec<f64> = grid.collect();
    if g.len() < 2 {
        return Err(Error::InvalidArgument("a path needs at least two samples".into()));
    }
    if g.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("sample parameters must be strictly increasing".into()));
    }
    Ok(())
}

pub(crate) fn uniform_grid(lo: f64, hi: f64, intervals: usize) -> Result<Vec<f64>> {
    if !(hi > lo) || intervals == 0 {
        return Err(Error::InvalidArgument(format!("bad grid [{lo}, {hi}] with {intervals} intervals")));
    }
    Ok((0..=intervals)
        .map(|k| {
            if k == intervals {
                hi
            } else {
                lo + (hi - lo) * k as f64 / intervals as f64
            }
        })
        .collect())
}

/// Eigenphases shifted by `π`: `ψ = arg(-z) ∈ (-π, π]`, so `ψ = 0` is the eigenvalue `-1`.
pub fn shifted_phases(u: &CMat) -> Vec<f64> {
    let mut p: Vec<f64> = linalg::unitary_eigenvalues(u).into_iter().map(|z| (-z).arg()).collect();
    p.sort_by(f64::total_cmp);
    p
}

/// Number of eigenphases in `[π, π + ε]`.
pub fn count_arc(phases: &[f64], eps: f64) -> usize {
    phases.iter().filter(|&&p| p >= -ZERO_PHASE_TOL && p <= eps).count()
}

/// Pick `ε` in the widest gap of the given magnitudes inside `[0, cap]`;
/// returns `(ε, margin)` where margin is the distance from `ε` to the nearest value.
pub(crate) fn widest_gap(values: impl Iterator<Item = f64>, cap: f64) -> (f64, f64) {
    let mut v: Vec<f64> = values.filter(|x| *x < cap).collect();
    v.push(0.0);
    v.push(cap);
    v.sort_by(f64::total_cmp);
    let mut best = (cap / 2.0, -1.0);
    for w in v.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        if half > best.1 {
            best = (0.5 * (w[0] + w[1]), half);
        }
    }
    best
}

/// Chordal distance bound turned into an arc bound on eigenphase motion.
fn arc_of(drift: f64) -> f64 {
    2.0 * (0.5 * drift).min(1.0).asin()
}

#[derive(Clone)]
struct UNode {
    lam: f64,
    u: CMat,
    phases: Vec<f64>,
}

impl UNode {
    fn new(lam: f64, u: CMat) -> Self {
        let phases = shifted_phases(&u);
        Self { lam, u, phases }
    }
}

/// One accepted subinterval of a winding computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingStep {
    pub lo: f64,
    pub hi: f64,
    pub eps: f64,
    pub count_lo: usize,
    pub count_hi: usize,
}

/// Accepted partition with the per-subinterval `ε` and counts.
#[derive(Debug, Clone, PartialEq)]
pub struct WindingCertificate {
    pub steps: Vec<WindingStep>,
    pub total: i64,
}

/// Winding number of a unitary path through `-1`.
pub fn winding_number(d: &UnitaryPath) -> Result<i64> {
    Ok(winding_certificate(d)?.total)
}

pub fn winding_certificate(d: &UnitaryPath) -> Result<WindingCertificate> {
    let nodes: Vec<UNode> =
        d.samples.par_iter().map(|(l, u)| UNode::new(*l, u.clone())).collect();
    let pieces: Vec<Result<Vec<WindingStep>>> = nodes
        .par_windows(2)
        .map(|w| {
            let mut out = Vec::new();
            certify_unitary(&w[0], &w[1], d.refine.as_ref(), 0, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut steps = Vec::new();
    for p in pieces {
        steps.extend(p?);
    }
    let total = steps.iter().map(|s| s.count_hi as i64 - s.count_lo as i64).sum();
    Ok(WindingCertificate { steps, total })
}

fn certify_unitary(
    a: &UNode,
    b: &UNode,
    refine: Option<&UnitaryFn>,
    depth: usize,
    out: &mut Vec<WindingStep>,
) -> Result<()> {
    let mid = match refine {
        Some(f) => {
            let lm = 0.5 * (a.lam + b.lam);
            Some(UNode::new(lm, f(lm)?))
        }
        None => None,
    };
    let mut drift = linalg::spectral_norm_c(&(&b.u - &a.u));
    if let Some(m) = &mid {
        drift = drift
            .max(linalg::spectral_norm_c(&(&m.u - &a.u)))
            .max(linalg::spectral_norm_c(&(&m.u - &b.u)));
    }
    let mags = a.phases.iter().chain(b.phases.iter()).map(|p| p.abs());
    let (eps, margin) = widest_gap(mags, std::f64::consts::PI);
    let reach = arc_of(drift);
    if drift <= CONTINUITY_BUDGET && margin > 1.05 * reach + 1e-12 {
        out.push(WindingStep {
            lo: a.lam,
            hi: b.lam,
            eps,
            count_lo: count_arc(&a.phases, eps),
            count_hi: count_arc(&b.phases, eps),
        });
        return Ok(());
    }
    match mid {
        Some(m) if depth < MAX_DEPTH => {
            certify_unitary(a, &m, refine, depth + 1, out)?;
            certify_unitary(&m, b, refine, depth + 1, out)
        }
        _ => Err(Error::RefinementExhausted {
            lo: a.lam,
            hi: b.lam,
            reason: format!(
                "drift {drift:.3e} (arc {reach:.3e}) against phase margin {margin:.3e}"
            ),
        }),
    }
}

/// Sampled path of Lagrangian frames in a fixed symplectic space.
#[derive(Clone)]
pub struct LagrangianPath {
    space: SymplecticSpace,
    samples: Vec<(f64, LagrangianFrame)>,
    refine: Option<FrameFn>,
}

impl LagrangianPath {
    pub fn from_samples(space: SymplecticSpace, samples: Vec<(f64, LagrangianFrame)>) -> Result<Self> {
        check_grid(samples.iter().map(|s| s.0))?;
        for (_, f) in &samples {
            if f.dim() != space.dim() || f.n() != space.n() {
                return Err(Error::DimensionMismatch("frame does not fit the space".into()));
            }
        }
        Ok(Self { space, samples, refine: None })
    }

    pub fn from_fn(space: SymplecticSpace, f: FrameFn, lo: f64, hi: f64, initial: usize) -> Result<Self> {
        let grid = uniform_grid(lo, hi, initial)?;
        let samples = grid
            .par_iter()
            .map(|&l| f(l).map(|fr| (l, fr)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, samples, refine: Some(f) })
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn samples(&self) -> &[(f64, LagrangianFrame)] {
        &self.samples
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    pub fn is_refinable(&self) -> bool {
        self.refine.is_some()
    }

    /// Frame at `lam`: evaluator if present, else an exact sample.
    pub fn evaluate(&self, lam: f64) -> Result<LagrangianFrame> {
        if let Some(f) = &self.refine {
            return f(lam);
        }
        self.samples
            .iter()
            .find(|(l, _)| *l == lam)
            .map(|(_, f)| f.clone())
            .ok_or_else(|| Error::InvalidArgument(format!("no sample at lambda = {lam} and no evaluator")))
    }

    /// The reverse path `λ ↦ Λ(lo + hi - λ)` on the same domain.
    pub fn reversed(&self) -> LagrangianPath {
        let (lo, hi) = self.domain();
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|(l, f)| (reflect(lo, hi, *l), f.clone()))
            .collect();
        let refine = self.refine.clone().map(|f| -> FrameFn { Arc::new(move |l| f(reflect(lo, hi, l))) });
        LagrangianPath { space: self.space.clone(), samples, refine }
    }

    /// Restriction to `[a, b]` inside the domain.
    pub fn restricted(&self, a: f64, b: f64) -> Result<LagrangianPath> {
        let (lo, hi) = self.domain();
        if !(a >= lo && b <= hi && b > a) {
            return Err(Error::InvalidArgument(format!("[{a}, {b}] not inside [{lo}, {hi}]")));
        }
        match &self.refine {
            Some(f) => {
                let mut samples: Vec<(f64, LagrangianFrame)> =
                    self.samples.iter().filter(|(l, _)| *l > a && *l < b).cloned().collect();
                samples.insert(0, (a, f(a)?));
                samples.push((b, f(b)?));
                Ok(LagrangianPath { space: self.space.clone(), samples, refine: Some(f.clone()) })
            }
            None => {
                let samples: Vec<(f64, LagrangianFrame)> =
                    self.samples.iter().filter(|(l, _)| *l >= a && *l <= b).cloned().collect();
                if samples.first().map(|s| s.0) != Some(a) || samples.last().map(|s| s.0) != Some(b) {
                    return Err(Error::InvalidArgument(
                        "restriction endpoints must be samples of a non-refinable path".into(),
                    ));
                }
                LagrangianPath::from_samples(self.space.clone(), samples)
            }
        }
    }

    /// Image path under the Souriau map relative to `w`.
    pub fn souriau_path(&self, w: &LagrangianFrame) -> Result<UnitaryPath> {
        let space = self.space.clone();
        let samples = self
            .samples
            .par_iter()
            .map(|(l, f)| souriau_map(w, f, &space).map(|u| (*l, u)))
            .collect::<Result<Vec<_>>>()?;
        let refine = self.refine.clone().map(|f| -> UnitaryFn {
            let w = w.clone();
            let space = space.clone();
            Arc::new(move |l| souriau_map(&w, &f(l)?, &space))
        });
        Ok(UnitaryPath { samples, refine })
    }
}

fn reflect(lo: f64, hi: f64, l: f64) -> f64 {
    // Exact at the endpoints so reversed grids keep their end samples.
    if l == lo {
        hi
    } else if l == hi {
        lo
    } else {
        lo + hi - l
    }
}

/// Maslov index of a path against a fixed Lagrangian: winding of the Souriau image.
pub fn maslov_index(path: &LagrangianPath, w: &LagrangianFrame) -> Result<i64> {
    if w.dim() != path.space.dim() {
        return Err(Error::DimensionMismatch("reference frame does not fit the path's space".into()));
    }
    winding_number(&path.souriau_path(w)?)
}

/// Diagonal `Δ = {(x, x)}` of `E x E`, Lagrangian for `diag(J, -J)`.
pub fn diagonal_frame(dim: usize) -> LagrangianFrame {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let eye = Mat::identity(dim, dim) * s;
    LagrangianFrame::from_orthonormal(linalg::vstack(&eye, &eye))
}

/// Product frame `Λ₁ x Λ₂` in `E x E`.
pub fn product_frame(a: &LagrangianFrame, b: &LagrangianFrame) -> LagrangianFrame {
    LagrangianFrame::from_orthonormal(linalg::block_diag(a.columns(), b.columns()))
}

/// Path of products `Λ₁(λ) x Λ₂(λ)` in the doubled space.
pub fn pair_path(p1: &LagrangianPath, p2: &LagrangianPath) -> Result<LagrangianPath> {
    if p1.space.dim() != p2.space.dim() || p1.domain() != p2.domain() {
        return Err(Error::DimensionMismatch("pair paths must share space and domain".into()));
    }
    let space = p1.space.doubled();
    match (&p1.refine, &p2.refine) {
        (Some(f1), Some(f2)) => {
            let (f1, f2) = (f1.clone(), f2.clone());
            let f: FrameFn = Arc::new(move |l| Ok(product_frame(&f1(l)?, &f2(l)?)));
            let mut grid: Vec<f64> =
                p1.samples.iter().chain(p2.samples.iter()).map(|s| s.0).collect();
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let samples = grid
                .par_iter()
                .map(|&l| f(l).map(|fr| (l, fr)))
                .collect::<Result<Vec<_>>>()?;
            Ok(LagrangianPath { space, samples, refine: Some(f) })
        }
        _ => {
            if p1.samples.len() != p2.samples.len()
                || p1.samples.iter().zip(&p2.samples).any(|(a, b)| a.0 != b.0)
            {
                return Err(Error::InvalidArgument(
                    "non-refinable pair paths need identical sample grids".into(),
                ));
            }
            let samples = p1
                .samples
                .iter()
                .zip(&p2.samples)
                .map(|(a, b)| (a.0, product_frame(&a.1, &b.1)))
                .collect();
            LagrangianPath::from_samples(space, samples)
        }
    }
}

/// Maslov index of a path of pairs: the product path against the diagonal.
pub fn maslov_index_pair(p1: &LagrangianPath, p2: &LagrangianPath) -> Result<i64> {
    let prod = pair_path(p1, p2)?;
    maslov_index(&prod, &diagonal_frame(p1.space.dim()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Restriction to `[lo, λ₀]`.
    Left,
    /// Restriction to `[λ₀, hi]`.
    Right,
}

/// Maslov index of the restriction to one side of `λ₀`.
pub fn partial_maslov_index(
    path: &LagrangianPath,
    w: &LagrangianFrame,
    lambda0: f64,
    side: Side,
) -> Result<i64> {
    let (lo, hi) = path.domain();
    if !(lambda0 > lo && lambda0 < hi) {
        return Err(Error::InvalidArgument(format!("split point {lambda0} outside ({lo}, {hi})")));
    }
    let piece = match side {
        Side::Left => path.restricted(lo, lambda0)?,
        Side::Right => path.restricted(lambda0, hi)?,
    };
    maslov_index(&piece, w)
}

/// Diagnostics for one crossing `Λ(λ₀) ∩ W ≠ {0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingRecord {
    pub lambda0: f64,
    pub intersection_dim: usize,
    /// Signature of the crossing form; `None` for non-regular crossings.
    pub signature: Option<i64>,
    pub regular: bool,
    /// Eigenvalues of the crossing form in an orthonormal basis of the intersection.
    pub form_eigenvalues: Vec<f64>,
    /// Difference between the step-`h` and step-`h/2` forms.
    pub richardson_delta: f64,
    pub at_endpoint: bool,
}

/// `A_λ` in the frame `F0` of `Λ(λ₀)`, from `Λ(λ) = {u + J A_λ u}`.
fn graph_operator(space: &SymplecticSpace, f0: &Mat, f: &Mat, lam: f64) -> Result<Mat> {
    let jf0 = space.j() * f0;
    let x = f0.transpose() * f;
    let y = jf0.transpose() * f;
    let sv = linalg::singular_values(&x);
    if sv.last().copied().unwrap_or(0.0) < 1e-3 {
        return Err(Error::GraphUnsolvable(lam));
    }
    let xinv = x.try_inverse().ok_or(Error::GraphUnsolvable(lam))?;
    Ok(linalg::symmetrize(&(y * xinv)))
}

/// Signature of the crossing form `Γ[u] = d/dλ ω(u, J A_λ u)` at `λ₀`.
pub fn crossing_form_index(
    path: &LagrangianPath,
    w: &LagrangianFrame,
    lambda0: f64,
    h: f64,
) -> Result<CrossingRecord> {
    let space = &path.space;
    let (lo, hi) = path.domain();
    if !(h > 0.0) || lambda0 - h < lo || lambda0 + h > hi {
        return Err(Error::InvalidArgument(format!(
            "difference step {h} at {lambda0} leaves the domain [{lo}, {hi}]"
        )));
    }
    let f0 = path.evaluate(lambda0)?;
    let f0m = f0.columns().clone();
    // Coordinates c with F0 c ∈ W: (J F_W)^T F0 c = 0.
    let wperp = space.j() * w.columns();
    let coords = linalg::null_space_abs(&(wperp.transpose() * &f0m), TOL_EIG);
    let k = coords.ncols();
    let at_endpoint = lambda0 - lo < 1e-8 || hi - lambda0 < 1e-8;
    if k == 0 {
        return Ok(CrossingRecord {
            lambda0,
            intersection_dim: 0,
            signature: Some(0),
            regular: true,
            form_eigenvalues: Vec::new(),
            richardson_delta: 0.0,
            at_endpoint,
        });
    }
    let form = |step: f64| -> Result<Mat> {
        let ap = graph_operator(space, &f0m, path.evaluate(lambda0 + step)?.columns(), lambda0 + step)?;
        let am = graph_operator(space, &f0m, path.evaluate(lambda0 - step)?.columns(), lambda0 - step)?;
        Ok(coords.transpose() * ((ap - am) / (2.0 * step)) * &coords)
    };
    let g_h = form(h)?;
    let g_half = form(0.5 * h)?;
    let richardson_delta = linalg::max_abs(&(&g_half - &g_h));
    let extrapolated = (&g_half * 4.0 - &g_h) / 3.0;
    let eig = linalg::symmetric_eigenvalues(&extrapolated);
    let scale = eig.iter().fold(1.0f64, |a, &x| a.max(x.abs()));
    let tol = (1e-6 * scale).max(10.0 * richardson_delta);
    let regular = eig.iter().all(|x| x.abs() > tol);
    let signature = regular.then(|| {
        eig.iter().filter(|&&x| x > 0.0).count() as i64 - eig.iter().filter(|&&x| x < 0.0).count() as i64
    });
    Ok(CrossingRecord {
        lambda0,
        intersection_dim: k,
        signature,
        regular,
        form_eigenvalues: eig,
        richardson_delta,
        at_endpoint,
    })
}

/// Sine of the smallest principal angle between two Lagrangians.
pub fn transversality_margin(space: &SymplecticSpace, a: &LagrangianFrame, b: &LagrangianFrame) -> f64 {
    let m = b.columns().transpose() * space.j() * a.columns();
    linalg::singular_values(&m).last().copied().unwrap_or(0.0)
}

/// Locate parameters where a pair of Lagrangians intersects: scan the
/// transversality margin on a grid, then golden-section search each local
/// minimum down to `1e-10` in `λ`. Returns the located parameters.
pub fn scan_crossings<F>(
    space: &SymplecticSpace,
    eval: F,
    lo: f64,
    hi: f64,
    grid: usize,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<(LagrangianFrame, LagrangianFrame)> + Sync,
{
    let g = |l: f64| -> Result<f64> {
        let (a, b) = eval(l)?;
        Ok(transversality_margin(space, &a, &b))
    };
    let pts = uniform_grid(lo, hi, grid)?;
    let vals = pts.par_iter().map(|&l| g(l)).collect::<Result<Vec<f64>>>()?;
    let scale = vals.iter().fold(0.0f64, |m, &v| m.max(v));
    let flat = 1e-12 * scale.max(1.0);
    // Flat stretches carry no isolated minimum; a vanishing one is reported directly.
    let candidates: Vec<usize> = (0..pts.len())
        .filter(|&i| {
            let left = if i > 0 { vals[i - 1] } else { f64::INFINITY };
            let right = if i + 1 < pts.len() { vals[i + 1] } else { f64::INFINITY };
            vals[i] <= left && vals[i] <= right && (vals[i] < left - flat || vals[i] < right - flat || vals[i] < 1e-7)
        })
        .collect();
    let located = candidates
        .par_iter()
        .map(|&i| {
            let a = pts[i.saturating_sub(1)];
            let b = pts[(i + 1).min(pts.len() - 1)];
            golden_min(&g, a, b, 1e-10)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut found: Vec<f64> = Vec::new();
    for (lstar, gstar) in located {
        if gstar < 1e-7 && found.iter().all(|&x| (x - lstar).abs() > 1e-8) {
            found.push(lstar);
        }
    }
    found.sort_by(f64::total_cmp);
    Ok(found)
}

fn golden_min(g: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut gc = g(c)?;
    let mut gd = g(d)?;
    while b - a > tol {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d)?;
        }
    }
    let mut best = (0.5 * (a + b), g(0.5 * (a + b))?);
    for &(x, gx) in &[(a, g(a)?), (b, g(b)?)] {
        if gx < best.1 {
            best = (x, gx);
        }
    }
    Ok(best)
}

/// Crossings of a path with `W`, each with its crossing-form record.
pub fn find_crossings(
    path: &LagrangianPath,
    w: &LagrangianFrame,
    grid: usize,
    h: f64,
) -> Result<Vec<CrossingRecord>> {
    let (lo, hi) = path.domain();
    let lams = scan_crossings(path.space(), |l| Ok((path.evaluate(l)?, w.clone())), lo, hi, grid)?;
    lams.into_iter()
        .map(|l| {
            let dim = symplectic::intersection_dimension(w, &path.evaluate(l)?, path.space(), TOL_EIG)?.dim;
            let interior = l - h >= lo && l + h <= hi;
            if interior {
                let mut rec = crossing_form_index(path, w, l, h)?;
                rec.intersection_dim = rec.intersection_dim.max(dim);
                Ok(rec)
            } else {
                Ok(CrossingRecord {
                    lambda0: l,
                    intersection_dim: dim,
                    signature: None,
                    regular: false,
                    form_eigenvalues: Vec::new(),
                    richardson_delta: 0.0,
                    at_endpoint: true,
                })
            }
        })
        .collect()
}

/// Shifted eigenphases of `d(λ)` nearest to the crossing value, for tabulation.
pub fn phases_near_pi(u: &CMat, count: usize) -> Vec<f64> {
    let mut p = shifted_phases(u);
    p.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    p.truncate(count);
    p
}

/// Scalar unitary `e^{iθ}` as a `1 x 1` matrix.
pub fn scalar_unitary(theta: f64) -> CMat {
    CMat::from_element(1, 1, Complex64::from_polar(1.0, theta))
}
