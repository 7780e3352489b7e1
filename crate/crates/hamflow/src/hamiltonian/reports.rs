//! Index reports: spectral flow of a discretized operator path against the
//! Maslov index of the matching Lagrangian pair path, with an optional
//! determinant-winding third opinion and discretization convergence rows.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::maslov::{
    self, diagonal_frame, maslov_index_pair, pair_path, partial_maslov_index, scan_crossings, FrameFn,
    LagrangianPath, Side,
};
use crate::spectral_flow::{FlowCertificate, DEFAULT_INITIAL, DEFAULT_MARGIN};
use crate::symplectic::{self, intersection_dimension, LagrangianFrame, SymplecticSpace, TOL_EIG};

use super::bvp::{assemble_a0_operator, assemble_q_operator, A0Config, PencilPath};
use super::family::HamiltonianFamily;
use super::ode::{stable_space, unstable_space};
use super::splitting::stable_unstable_splitting;

/// Intersections closer than this to the domain ends count as endpoint crossings.
pub const ENDPOINT_ZONE: f64 = 1e-6;
/// Minimum transversality margin at the ends of an admissible pair path.
pub const TOL_ADMISSIBLE: f64 = 1e-6;
pub const DEFAULT_INTERVALS: usize = 128;
pub const DEFAULT_DELTA: f64 = 1e-2;
pub const DEFAULT_CHERN_SAMPLES: usize = 64;

/// Parameter where the two Lagrangians of a pair meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCrossing {
    pub lambda: f64,
    pub dim: usize,
    pub at_endpoint: bool,
}

/// Integers recomputed at a refined discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCheck {
    pub label: String,
    pub truncation: Option<f64>,
    pub intervals: usize,
    pub sfl: i64,
    pub maslov: i64,
}

/// Non-invertible endpoints: the flow is taken for `S + δI` and corrected by
/// the partial indices of the shift homotopy at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralCase {
    pub delta: f64,
    /// Maslov index of the unshifted pair path.
    pub raw_maslov: i64,
    pub shifted_sfl: i64,
    pub correction_start: i64,
    pub correction_end: i64,
    /// `correction_start + shifted_sfl - correction_end`.
    pub corrected: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    TheoremA,
    TheoremB,
    CorollaryA,
}

impl ReportKind {
    pub fn key(self) -> &'static str {
        match self {
            ReportKind::TheoremA => "theorem-a",
            ReportKind::TheoremB => "theorem-b",
            ReportKind::CorollaryA => "corollary-a",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    pub kind: ReportKind,
    pub label: String,
    pub sfl: i64,
    /// Absent in the general case, where `sfl` is the corrected integer.
    pub certificate: Option<FlowCertificate>,
    pub maslov: i64,
    pub chern: Option<i64>,
    pub crossings: Vec<KernelCrossing>,
    pub truncation: Option<f64>,
    pub half_length: Option<f64>,
    pub intervals: usize,
    pub grid: usize,
    pub window: f64,
    pub convergence: Vec<ConvergenceCheck>,
    pub general_case: Option<GeneralCase>,
    /// Further integers reported for comparison only; they do not enter the agreement flags.
    pub auxiliary: Vec<(String, i64)>,
}

impl IndexReport {
    pub fn agreement(&self) -> bool {
        self.sfl == self.maslov
    }

    /// `None` when no third opinion was computed.
    pub fn chern_agreement(&self) -> Option<bool> {
        self.chern.map(|c| c == self.sfl)
    }

    pub fn convergence_agreement(&self) -> bool {
        self.convergence.iter().all(|c| c.sfl == self.sfl && c.maslov == self.maslov)
    }

    pub fn general_case_agreement(&self) -> bool {
        self.general_case.as_ref().map_or(true, |g| g.corrected == g.raw_maslov)
    }

    pub fn all_agree(&self) -> bool {
        self.agreement()
            && self.chern_agreement().unwrap_or(true)
            && self.convergence_agreement()
            && self.general_case_agreement()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    /// Initial uniform `λ` grid for every certified integer.
    pub grid: usize,
    /// `T`; `None` uses the family default.
    pub truncation: Option<f64>,
    /// `t0`; `None` uses `T/2`.
    pub half_length: Option<f64>,
    pub intervals: usize,
    pub third_opinion: bool,
    pub convergence: bool,
    pub delta: f64,
    pub contour_samples: usize,
    /// Transversality margin at or below which an endpoint counts as a kernel.
    pub endpoint_tol: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_INITIAL,
            truncation: None,
            half_length: None,
            intervals: DEFAULT_INTERVALS,
            third_opinion: false,
            convergence: false,
            delta: DEFAULT_DELTA,
            contour_samples: DEFAULT_CHERN_SAMPLES,
            endpoint_tol: TOL_ADMISSIBLE,
        }
    }
}

impl ReportOptions {
    pub fn a0_config(&self, fam: &HamiltonianFamily) -> A0Config {
        let t = self.truncation.unwrap_or_else(|| fam.default_truncation());
        A0Config { half_length: self.half_length.unwrap_or(0.5 * t), truncation: t, intervals: self.intervals }
    }
}

fn frame_path(space: &SymplecticSpace, f: FrameFn, grid: usize) -> Result<LagrangianPath> {
    LagrangianPath::from_fn(space.clone(), f, 0.0, 1.0, grid)
}

/// Crossings of a pair of Lagrangian paths on `[0, 1]`, with intersection dimensions.
pub fn pair_crossings<F>(space: &SymplecticSpace, eval: F, grid: usize) -> Result<Vec<KernelCrossing>>
where
    F: Fn(f64) -> Result<(LagrangianFrame, LagrangianFrame)> + Sync,
{
    let lams = scan_crossings(space, &eval, 0.0, 1.0, grid)?;
    lams.into_iter()
        .map(|l| {
            let (a, b) = eval(l)?;
            let dim = intersection_dimension(&a, &b, space, TOL_EIG)?.dim.max(1);
            Ok(KernelCrossing { lambda: l, dim, at_endpoint: l < ENDPOINT_ZONE || l > 1.0 - ENDPOINT_ZONE })
        })
        .collect()
}

/// Parameters with `E^u_λ(t0) ∩ E^s_λ(t0) ≠ {0}`.
pub fn kernel_crossings(fam: &HamiltonianFamily, grid: usize, t0: f64, truncation: f64) -> Result<Vec<KernelCrossing>> {
    pair_crossings(
        fam.space(),
        |l| Ok((unstable_space(fam, l, t0, truncation)?.frame, stable_space(fam, l, t0, truncation)?.frame)),
        grid,
    )
}

fn check_admissible(space: &SymplecticSpace, p0: &LagrangianPath, p1: &LagrangianPath, tol: f64) -> Result<()> {
    for lam in [0.0, 1.0] {
        let m = maslov::transversality_margin(space, &p0.evaluate(lam)?, &p1.evaluate(lam)?);
        if m <= tol {
            return Err(Error::EndpointKernel { lambda: lam, value: m });
        }
    }
    Ok(())
}

/// Spectral flow of `Q_λ u = J u'` on `[a, b]` with `u(a) ∈ Λ₀(λ)`, `u(b) ∈ Λ₁(λ)`
/// against the Maslov index of the pair `(Λ₀, Λ₁)`, both over `λ ∈ [0, 1]`.
pub fn theorem_b_report(
    l0: FrameFn,
    l1: FrameFn,
    space: &SymplecticSpace,
    a: f64,
    b: f64,
    opts: &ReportOptions,
) -> Result<IndexReport> {
    if !(b > a) {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let p0 = frame_path(space, l0.clone(), opts.grid)?;
    let p1 = frame_path(space, l1.clone(), opts.grid)?;
    check_admissible(space, &p0, &p1, opts.endpoint_tol)?;
    let maslov = maslov_index_pair(&p0, &p1)?;
    let window = PI / (4.0 * (b - a));
    let build = |n: usize| {
        let (l0, l1, space) = (l0.clone(), l1.clone(), space.clone());
        PencilPath::new(Box::new(move |l| assemble_q_operator(&space, &l0(l)?, &l1(l)?, a, b, n)), window, 0.0, 1.0)
    };
    let pencil = build(opts.intervals)?;
    let cert = pencil.flow(opts.grid)?;
    let chern = if opts.third_opinion {
        Some(pencil.chern(DEFAULT_MARGIN, window, opts.contour_samples)?)
    } else {
        None
    };
    let mut convergence = Vec::new();
    if opts.convergence {
        let fine = build(2 * opts.intervals)?.flow(opts.grid)?;
        convergence.push(ConvergenceCheck {
            label: "mesh-doubled".into(),
            truncation: None,
            intervals: 2 * opts.intervals,
            sfl: fine.total,
            maslov,
        });
    }
    let crossings = pair_crossings(space, |l| Ok((l0(l)?, l1(l)?)), maslov::DEFAULT_CROSSING_GRID)?;
    Ok(IndexReport {
        kind: ReportKind::TheoremB,
        label: "lagrangian-pair".into(),
        sfl: cert.total,
        certificate: Some(cert),
        maslov,
        chern,
        crossings,
        truncation: None,
        half_length: None,
        intervals: opts.intervals,
        grid: opts.grid,
        window,
        convergence,
        general_case: None,
        auxiliary: Vec::new(),
    })
}

/// Smallest `|μ|` over `μ ∈ σ(J S_λ(±∞) )` shifted along the imaginary axis:
/// `min_ξ min |eig(S_λ(±∞) + iξJ)|` over a sample of `λ` and `ξ`.
pub fn asymptotic_gap(fam: &HamiltonianFamily, lambdas: &[f64]) -> f64 {
    let j = fam.space().j().clone();
    let xis: Vec<f64> = (0..=64).map(|k| -8.0 + 0.25 * k as f64).collect();
    lambdas
        .par_iter()
        .map(|&l| {
            let mut best = f64::INFINITY;
            for s in [fam.s_minus(l), fam.s_plus(l)] {
                for &xi in &xis {
                    let mut h = linalg::to_complex(&s);
                    for (z, jv) in h.iter_mut().zip(j.iter()) {
                        *z += num_complex::Complex64::new(0.0, xi * jv);
                    }
                    let e = linalg::hermitian_eigenvalues(&h);
                    best = best.min(e.iter().fold(f64::INFINITY, |m, x| m.min(x.abs())));
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min)
}

fn a0_window(fam: &HamiltonianFamily, cfg: &A0Config, grid: usize) -> Result<f64> {
    let lams: Vec<f64> = (0..=grid).map(|k| k as f64 / grid as f64).collect();
    let gap = asymptotic_gap(fam, &lams);
    let w = 0.5 * (PI / (4.0 * cfg.half_length)).min(gap);
    if !(w > 0.0) {
        return Err(Error::NotHyperbolic { margin: gap });
    }
    Ok(w)
}

fn a0_pencil<'a>(fam: &'a HamiltonianFamily, cfg: A0Config, window: f64) -> Result<PencilPath<'a>> {
    PencilPath::new(Box::new(move |l| assemble_a0_operator(fam, l, &cfg)), window, 0.0, 1.0)
}

fn boundary_pair_paths(fam: &HamiltonianFamily, truncation: f64, grid: usize) -> Result<(LagrangianPath, LagrangianPath)> {
    let (fu, fs) = (fam.clone(), fam.clone());
    let eu: FrameFn = Arc::new(move |l| Ok(unstable_space(&fu, l, 0.0, truncation)?.frame));
    let es: FrameFn = Arc::new(move |l| Ok(stable_space(&fs, l, 0.0, truncation)?.frame));
    Ok((frame_path(fam.space(), eu, grid)?, frame_path(fam.space(), es, grid)?))
}

/// Index of the shift homotopy `s ↦ (E^u, E^s)(S_λ + sδI)`, `s ∈ [0, 1]`, at fixed `λ`.
fn shift_correction(fam: &HamiltonianFamily, lam: f64, delta: f64, truncation: f64, grid: usize) -> Result<i64> {
    let (fu, fs) = (fam.clone(), fam.clone());
    let eu: FrameFn = Arc::new(move |s| Ok(unstable_space(&fu.shifted(s * delta), lam, 0.0, truncation)?.frame));
    let es: FrameFn = Arc::new(move |s| Ok(stable_space(&fs.shifted(s * delta), lam, 0.0, truncation)?.frame));
    let pu = LagrangianPath::from_fn(fam.space().clone(), eu, -1.0, 1.0, 2 * grid)?;
    let ps = LagrangianPath::from_fn(fam.space().clone(), es, -1.0, 1.0, 2 * grid)?;
    let prod = pair_path(&pu, &ps)?;
    partial_maslov_index(&prod, &diagonal_frame(fam.dim()), 0.0, Side::Right)
}

/// Spectral flow of the truncated operators `A⁰_λ` on `[-t0, t0]` against
/// the Maslov index of `(E^u_λ(0), E^s_λ(0))`.
///
/// If an endpoint operator has a kernel the flow is computed for `S + δI`,
/// and the report carries the partial-index corrections.
pub fn theorem_a_report(fam: &HamiltonianFamily, opts: &ReportOptions) -> Result<IndexReport> {
    let cfg = opts.a0_config(fam);
    let window = a0_window(fam, &cfg, opts.grid)?;
    let (eu, es) = boundary_pair_paths(fam, cfg.truncation, opts.grid)?;
    let maslov = maslov_index_pair(&eu, &es)?;
    let pencil = a0_pencil(fam, cfg, window)?;
    // The discretized endpoint spectrum is only O(h²) accurate, so kernels are
    // detected on the Lagrangian side.
    let flow = check_admissible(fam.space(), &eu, &es, opts.endpoint_tol).and_then(|_| pencil.flow(opts.grid));
    let (sfl, certificate, general_case, third) = match flow {
        Ok(cert) => {
            let third = if opts.third_opinion {
                Some(pencil.chern(DEFAULT_MARGIN, window, opts.contour_samples)?)
            } else {
                None
            };
            (cert.total, Some(cert), None, third)
        }
        Err(Error::EndpointKernel { .. }) => {
            let delta = opts.delta;
            let shifted = fam.shifted(delta);
            let shifted_sfl = a0_pencil(&shifted, cfg, window)?.flow(opts.grid)?.total;
            let c0 = shift_correction(fam, 0.0, delta, cfg.truncation, opts.grid)?;
            let c1 = shift_correction(fam, 1.0, delta, cfg.truncation, opts.grid)?;
            let g = GeneralCase {
                delta,
                raw_maslov: maslov,
                shifted_sfl,
                correction_start: c0,
                correction_end: c1,
                corrected: c0 + shifted_sfl - c1,
            };
            (g.corrected, None, Some(g), None)
        }
        Err(e) => return Err(e),
    };
    let mut convergence = Vec::new();
    if opts.convergence && general_case.is_none() {
        let wide = A0Config { truncation: 2.0 * cfg.truncation, ..cfg };
        let (eu2, es2) = boundary_pair_paths(fam, wide.truncation, opts.grid)?;
        convergence.push(ConvergenceCheck {
            label: "truncation-doubled".into(),
            truncation: Some(wide.truncation),
            intervals: cfg.intervals,
            sfl: a0_pencil(fam, wide, window)?.flow(opts.grid)?.total,
            maslov: maslov_index_pair(&eu2, &es2)?,
        });
        let fine = A0Config { intervals: 2 * cfg.intervals, ..cfg };
        convergence.push(ConvergenceCheck {
            label: "mesh-doubled".into(),
            truncation: Some(cfg.truncation),
            intervals: fine.intervals,
            sfl: a0_pencil(fam, fine, window)?.flow(opts.grid)?.total,
            maslov,
        });
    }
    let crossings = kernel_crossings(fam, maslov::DEFAULT_CROSSING_GRID, 0.0, cfg.truncation)?;
    Ok(IndexReport {
        kind: ReportKind::TheoremA,
        label: fam.name().to_string(),
        sfl,
        certificate,
        maslov,
        chern: third,
        crossings,
        truncation: Some(cfg.truncation),
        half_length: Some(cfg.half_length),
        intervals: cfg.intervals,
        grid: opts.grid,
        window,
        convergence,
        general_case,
        auxiliary: Vec::new(),
    })
}

/// Periodicity budget for [`corollary_a_report`].
pub const TOL_PERIODIC: f64 = 1e-10;

/// For `S_0 ≡ S_1`: the spectral flow against the Maslov index of the
/// asymptotic pair `(V⁺(J S_λ(+∞)), V⁻(J S_λ(-∞)))`.
pub fn corollary_a_report(fam: &HamiltonianFamily, opts: &ReportOptions) -> Result<IndexReport> {
    let defect = fam.periodicity_defect();
    if defect > TOL_PERIODIC {
        return Err(Error::Structure { what: "periodicity S_0 = S_1", residual: defect, tol: TOL_PERIODIC });
    }
    let mut report = theorem_a_report(fam, opts)?;
    let asymptotic = asymptotic_pair_index(fam, 1.0, opts.grid)?;
    let reversed_ends = asymptotic_pair_index(fam, -1.0, opts.grid)?;
    report.kind = ReportKind::CorollaryA;
    report.auxiliary.push(("theorem-a-maslov".into(), report.maslov));
    report.auxiliary.push(("reversed-ends-maslov".into(), reversed_ends));
    report.maslov = asymptotic;
    for c in &mut report.convergence {
        c.maslov = asymptotic;
    }
    Ok(report)
}

/// Maslov index of `(V⁺(J S_λ(side·∞)), V⁻(J S_λ(-side·∞)))`.
///
/// `side = 1` is the pair `(E^u(+∞), E^s(-∞))`; `side = -1` swaps the ends.
pub fn asymptotic_pair_index(fam: &HamiltonianFamily, side: f64, grid: usize) -> Result<i64> {
    let (fu, fs) = (fam.clone(), fam.clone());
    let space = fam.space().clone();
    let (su, ss) = (space.clone(), space.clone());
    let pick = move |g: (Mat, Mat), s: f64| if s > 0.0 { g.1 } else { g.0 };
    let vplus: FrameFn = Arc::new(move |l| {
        let g = pick(fu.asymptotic_generators(l), side);
        symplectic::lagrangian_from_matrix(&stable_unstable_splitting(&g)?.unstable, &su, 1e-8)
    });
    let vminus: FrameFn = Arc::new(move |l| {
        let g = pick(fs.asymptotic_generators(l), -side);
        symplectic::lagrangian_from_matrix(&stable_unstable_splitting(&g)?.stable, &ss, 1e-8)
    });
    maslov_index_pair(&frame_path(&space, vplus, grid)?, &frame_path(&space, vminus, grid)?)
}

/// One row of the eigenvalue/eigenphase track table.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRow {
    pub lambda: f64,
    /// Pencil eigenvalues of smallest magnitude, ascending.
    pub eigenvalues: Vec<f64>,
    /// Souriau eigenphases of the pair nearest the crossing value, shifted to 0.
    pub phases: Vec<f64>,
    pub intersection_dim: usize,
}

fn track_rows<P, O>(space: &SymplecticSpace, lambdas: &[f64], count: usize, pair: P, op: O) -> Result<Vec<TrackRow>>
where
    P: Fn(f64) -> Result<(LagrangianFrame, LagrangianFrame)> + Sync,
    O: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    let doubled = space.doubled();
    let diag = diagonal_frame(space.dim());
    lambdas
        .par_iter()
        .map(|&l| {
            let (a, b) = pair(l)?;
            let prod = maslov::product_frame(&a, &b);
            let u = symplectic::souriau_map(&diag, &prod, &doubled)?;
            let mut phases = maslov::phases_near_pi(&u, count.min(2 * space.n()));
            phases.sort_by(f64::total_cmp);
            let intersection_dim = intersection_dimension(&a, &b, space, TOL_EIG)?.dim;
            Ok(TrackRow { lambda: l, eigenvalues: op(l)?, phases, intersection_dim })
        })
        .collect()
}

/// Tracks of `A⁰_λ` and of `(E^u_λ(0), E^s_λ(0))` on a uniform grid.
pub fn a0_tracks(fam: &HamiltonianFamily, opts: &ReportOptions, rows: usize, count: usize) -> Result<Vec<TrackRow>> {
    let cfg = opts.a0_config(fam);
    let lams: Vec<f64> = (0..=rows).map(|k| k as f64 / rows as f64).collect();
    track_rows(
        fam.space(),
        &lams,
        count,
        |l| Ok((unstable_space(fam, l, 0.0, cfg.truncation)?.frame, stable_space(fam, l, 0.0, cfg.truncation)?.frame)),
        |l| Ok(assemble_a0_operator(fam, l, &cfg)?.eigenvalues_near_zero(2 * count)),
    )
}

/// Tracks of `Q_λ` on `[a, b]` and of the pair `(Λ₀, Λ₁)`.
pub fn q_tracks(
    l0: FrameFn,
    l1: FrameFn,
    space: &SymplecticSpace,
    a: f64,
    b: f64,
    intervals: usize,
    rows: usize,
    count: usize,
) -> Result<Vec<TrackRow>> {
    let lams: Vec<f64> = (0..=rows).map(|k| k as f64 / rows as f64).collect();
    track_rows(
        space,
        &lams,
        count,
        |l| Ok((l0(l)?, l1(l)?)),
        |l| Ok(assemble_q_operator(space, &l0(l)?, &l1(l)?, a, b, intervals)?.eigenvalues_near_zero(2 * count)),
    )
}

/// `Λ(λ) = span(cos θ e1 + sin θ e2)` with `θ = πλ + π/2`, paired with `span e1`.
pub fn gamma_nor_pair() -> (FrameFn, FrameFn) {
    let line = |theta: f64| LagrangianFrame::from_orthonormal(Mat::from_column_slice(2, 1, &[theta.cos(), theta.sin()]));
    (Arc::new(move |l| Ok(line(PI * l + PI / 2.0))), Arc::new(move |_| Ok(line(0.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::family::autonomous;
    use crate::symplectic::standard_space;

    #[test]
    fn gamma_nor_theorem_b() {
        let (l0, l1) = gamma_nor_pair();
        let s = standard_space(1).unwrap();
        let opts = ReportOptions { intervals: 64, third_opinion: true, ..Default::default() };
        let r = theorem_b_report(l0, l1, &s, 0.0, 1.0, &opts).unwrap();
        assert_eq!((r.sfl, r.maslov, r.chern), (1, 1, Some(1)));
        assert_eq!(r.crossings.len(), 1);
        assert!((r.crossings[0].lambda - 0.5).abs() < 1e-6);
        assert!(r.all_agree());
    }

    #[test]
    fn autonomous_theorem_a_is_zero() {
        let f = autonomous(1).unwrap();
        let opts = ReportOptions { intervals: 48, grid: 4, ..Default::default() };
        let r = theorem_a_report(&f, &opts).unwrap();
        assert_eq!((r.sfl, r.maslov), (0, 0));
        assert!(r.crossings.is_empty());
    }

    #[test]
    fn inadmissible_pair_is_rejected() {
        let s = standard_space(1).unwrap();
        let line = |_l: f64| Ok(LagrangianFrame::from_orthonormal(Mat::from_column_slice(2, 1, &[1.0, 0.0])));
        let r = theorem_b_report(Arc::new(line), Arc::new(line), &s, 0.0, 1.0, &ReportOptions::default());
        assert!(matches!(r, Err(Error::EndpointKernel { .. })));
    }
}
