//! Seeded property checks shared by the proptest suites and the acceptance runner.
//! Each check draws its inputs from the seed and returns a description on failure.
#![allow(dead_code)]

use std::f64::consts::PI;

use hamflow::ensembles::{self, random_lagrangian, Rng64, UnitaryLagrangianPath};
use hamflow::hamiltonian::family::HamiltonianFamily;
use hamflow::hamiltonian::ode::{asymptotic_frames, fundamental_solution, propagate_subspace};
use hamflow::hamiltonian::splitting::relative_dimension;
use hamflow::linalg::{self, CMat, Mat};
use hamflow::maslov::{self, maslov_index, maslov_index_pair, partial_maslov_index, LagrangianPath, Side};
use hamflow::spectral_flow::{
    chern_winding_default, complexify_path, shifted_flow, spectral_flow, spectral_flow_with_grid,
    SymmetricMatrixPath,
};
use hamflow::symplectic::{
    gap_distance, intersection_dimension, lagrangian_from_matrix, souriau_map, standard_space, LagrangianFrame,
    SymplecticSpace, TOL_EIG,
};
use num_complex::Complex64;
use rand::Rng;

pub type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub fn frame(m: Mat, space: &SymplecticSpace) -> LagrangianFrame {
    lagrangian_from_matrix(&m, space, 1e-8).expect("Lagrangian")
}

pub fn line(theta: f64) -> LagrangianFrame {
    frame(Mat::from_column_slice(2, 1, &[theta.cos(), theta.sin()]), &standard_space(1).unwrap())
}

fn small_n(rng: &mut Rng64) -> usize {
    rng.gen_range(1..=3)
}

/// Souriau images are unitary within `1e-10`.
pub fn souriau_unitarity(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let n = rng.gen_range(1..=4);
    let s = ok(standard_space(n))?;
    let (w, l) = (random_lagrangian(&mut rng, &s), random_lagrangian(&mut rng, &s));
    let u = ok(souriau_map(&w, &l, &s))?;
    let r = linalg::spectral_norm_c(&(&u * u.adjoint() - CMat::identity(n, n)));
    ensure!(r <= 1e-10, "unitarity residual {r:.3e} at n = {n}");
    Ok(())
}

/// `dim(L ∩ W)` equals the multiplicity of `-1` in the Souriau image, on pairs with a prescribed intersection.
pub fn intersection_count(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let n = rng.gen_range(1..=4);
    let k = rng.gen_range(0..=n);
    let s = ok(standard_space(n))?;
    let u = ensembles::random_unitary(&mut rng, n);
    let phases: Vec<Complex64> = (0..n)
        .map(|j| if j < k { Complex64::new(1.0, 0.0) } else { Complex64::from_polar(1.0, rng.gen_range(0.3..PI - 0.3)) })
        .collect();
    let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(phases));
    let l = ensembles::lagrangian_from_unitary(&u, &s);
    let w = ensembles::lagrangian_from_unitary(&(&u * d), &s);
    let dim = ok(intersection_dimension(&w, &l, &s, TOL_EIG))?;
    ensure!(dim.dim == k && dim.rank_oracle == k, "expected {k}, Souriau {} rank {}", dim.dim, dim.rank_oracle);
    Ok(())
}

/// Gap metric: identity, symmetry, triangle inequality and the bound 1.
pub fn gap_axioms(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let n = rng.gen_range(1..=4);
    let s = ok(standard_space(n))?;
    let (a, b, c) = (random_lagrangian(&mut rng, &s), random_lagrangian(&mut rng, &s), random_lagrangian(&mut rng, &s));
    let d = |x: &LagrangianFrame, y: &LagrangianFrame| gap_distance(x, y).unwrap();
    ensure!(d(&a, &a) <= 1e-12, "d(a, a) = {:.3e}", d(&a, &a));
    ensure!((d(&a, &b) - d(&b, &a)).abs() <= 1e-12, "asymmetric gap");
    ensure!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12, "triangle inequality fails");
    ensure!(d(&a, &b) <= 1.0 + 1e-12, "gap {:.3e} above 1", d(&a, &b));
    Ok(())
}

/// `||Ψᵀ J Ψ - J|| ≤ 1e-8` on random asymptotically hyperbolic families.
pub fn symplectic_residual(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let n = small_n(&mut rng);
    let fam = ok(ensembles::random_family(&mut rng, n))?;
    let lam = rng.gen_range(0.0..1.0);
    let fs = ok(fundamental_solution(&fam, lam, 3.0, 200))?;
    ensure!(fs.symplectic_residual <= 1e-8, "residual {:.3e}", fs.symplectic_residual);
    let j = fam.space().j();
    let inv = fs.inverse_at(j, 0);
    let r = linalg::max_abs(&(inv * &fs.psi[0] - Mat::identity(2 * n, 2 * n)));
    ensure!(r <= 1e-8, "inverse identity residual {r:.3e}");
    // Propagated Lagrangians stay Lagrangian.
    let start = random_lagrangian(&mut rng, fam.space());
    let out = ok(propagate_subspace(start.columns(), &fam, lam, -2.0, 2.0, 0.01))?;
    let iso = linalg::max_abs(&(out.transpose() * j * &out));
    ensure!(iso <= 1e-8, "propagated isotropy {iso:.3e}");
    Ok(())
}

/// `dim(V, W) = -dim(W, V) = dim W - dim V` on random frames.
pub fn relative_dimension_antisymmetry(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let d = rng.gen_range(2..=8);
    let (k1, k2) = (rng.gen_range(1..=d), rng.gen_range(1..=d));
    let v = linalg::qr_orthonormalize(&ensembles::gaussian_matrix(&mut rng, d, k1));
    let w = linalg::qr_orthonormalize(&ensembles::gaussian_matrix(&mut rng, d, k2));
    let (vw, wv) = (ok(relative_dimension(&v, &w))?, ok(relative_dimension(&w, &v))?);
    ensure!(vw == -wv, "dim(V, W) = {vw}, dim(W, V) = {wv}");
    ensure!(vw == k2 as i64 - k1 as i64, "dim(V, W) = {vw} for dims {k1}, {k2}");
    Ok(())
}

/// `dim(V⁻(JS(+∞)), V⁻(JS(-∞))) = 0` for random families.
pub fn fredholm_index_zero(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let n = small_n(&mut rng);
    let fam = ok(ensembles::random_family(&mut rng, n))?;
    index_zero_for(&fam, rng.gen_range(0.0..1.0))
}

pub fn index_zero_for(fam: &HamiltonianFamily, lam: f64) -> Check {
    let (gm, gp) = fam.asymptotic_generators(lam);
    let vm = ok(hamflow::hamiltonian::splitting::stable_unstable_splitting(&gm))?.stable;
    let vp = ok(hamflow::hamiltonian::splitting::stable_unstable_splitting(&gp))?.stable;
    let idx = ok(relative_dimension(&vp, &vm))?;
    ensure!(idx == 0, "index {idx} for {}", fam.name());
    let (vplus, vminus) = ok(asymptotic_frames(fam, lam))?;
    for f in [vplus, vminus] {
        let iso = linalg::max_abs(&(f.transpose() * fam.space().j() * &f));
        ensure!(iso <= 1e-8, "asymptotic frame isotropy {iso:.3e}");
    }
    Ok(())
}

/// Random path and reference transversal at both ends, and a transversal split point.
fn maslov_setup(rng: &mut Rng64) -> std::result::Result<(SymplecticSpace, LagrangianPath, LagrangianFrame, f64), String> {
    let n = small_n(rng);
    let s = ok(standard_space(n))?;
    for _ in 0..200 {
        let p = UnitaryLagrangianPath::random(rng, n, 2.0);
        let w = random_lagrangian(rng, &s);
        let f = p.frame_fn(&s);
        let mu = rng.gen_range(0.2..0.8);
        let transversal = [0.0, mu, 1.0]
            .iter()
            .all(|&l| maslov::transversality_margin(&s, &f(l).unwrap(), &w) > 0.05);
        if transversal {
            return Ok((s.clone(), ok(p.path(&s, 8))?, w, mu));
        }
    }
    Err("no transversal setup".into())
}

/// `μ(Λ) = μ(Λ|[0, μ]) + μ(Λ|[μ, 1])` and `μ(reversed) = -μ`.
pub fn maslov_concatenation_and_reversal(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let (_, p, w, mu) = maslov_setup(&mut rng)?;
    let total = ok(maslov_index(&p, &w))?;
    let left = ok(maslov_index(&ok(p.restricted(0.0, mu))?, &w))?;
    let right = ok(maslov_index(&ok(p.restricted(mu, 1.0))?, &w))?;
    ensure!(total == left + right, "{total} != {left} + {right}");
    let rev = ok(maslov_index(&p.reversed(), &w))?;
    ensure!(rev == -total, "reversed {rev}, forward {total}");
    Ok(())
}

/// The same two laws for the index of pairs.
pub fn pair_concatenation_and_reversal(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let n = small_n(&mut rng);
    let (a, b) = ok(ensembles::random_admissible_pair(&mut rng, n, 2.0, 0.05))?;
    let s = ok(standard_space(n))?;
    let (fa, fb) = (a.frame_fn(&s), b.frame_fn(&s));
    let mut mu = 0.5;
    for _ in 0..200 {
        mu = rng.gen_range(0.2..0.8);
        if maslov::transversality_margin(&s, &fa(mu).unwrap(), &fb(mu).unwrap()) > 0.05 {
            break;
        }
    }
    let (pa, pb) = (ok(a.path(&s, 8))?, ok(b.path(&s, 8))?);
    let total = ok(maslov_index_pair(&pa, &pb))?;
    let left = ok(maslov_index_pair(&ok(pa.restricted(0.0, mu))?, &ok(pb.restricted(0.0, mu))?))?;
    let right = ok(maslov_index_pair(&ok(pa.restricted(mu, 1.0))?, &ok(pb.restricted(mu, 1.0))?))?;
    ensure!(total == left + right, "{total} != {left} + {right}");
    let rev = ok(maslov_index_pair(&pa.reversed(), &pb.reversed()))?;
    ensure!(rev == -total, "reversed {rev}, forward {total}");
    Ok(())
}

/// Random piecewise-linear path with invertible ends and an invertible split point.
fn flow_setup(rng: &mut Rng64) -> std::result::Result<(SymmetricMatrixPath, f64), String> {
    let dim = rng.gen_range(1..=8);
    let p = ok(ensembles::random_symmetric_path(rng, dim, 3, 1.0, 0.05))?;
    for _ in 0..200 {
        let mu = rng.gen_range(0.2..0.8);
        if p.spectrum(mu).iter().all(|x| x.abs() > 0.05) {
            return Ok((p, mu));
        }
    }
    Err("no invertible split point".into())
}

/// `sfl` is additive under splitting and concatenation and odd under reversal.
pub fn flow_concatenation_and_reversal(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let (p, mu) = flow_setup(&mut rng)?;
    let total = ok(spectral_flow(&p))?.0;
    let (a, b) = (ok(p.restricted(0.0, mu))?, ok(p.restricted(mu, 1.0))?);
    let (left, right) = (ok(spectral_flow(&a))?.0, ok(spectral_flow(&b))?.0);
    ensure!(total == left + right, "{total} != {left} + {right}");
    let joined = ok(spectral_flow(&ok(SymmetricMatrixPath::concatenate(&a, &b))?))?.0;
    ensure!(joined == total, "concatenated {joined}, whole {total}");
    let rev = ok(spectral_flow(&p.reversed()))?.0;
    ensure!(rev == -total, "reversed {rev}, forward {total}");
    Ok(())
}

/// `sfl(A + δI) = sfl(A)` for `δ` a thousandth of the endpoint gap.
pub fn flow_shift_invariance(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let (p, _) = flow_setup(&mut rng)?;
    let (lo, hi) = p.domain();
    let gap = [lo, hi].iter().flat_map(|&l| p.spectrum(l)).fold(f64::INFINITY, |m, x| m.min(x.abs()));
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let shifted = ok(shifted_flow(&p, sign * 1e-3 * gap))?;
    let plain = ok(spectral_flow(&p))?.0;
    ensure!(shifted.value == plain, "shifted {} plain {plain}", shifted.value);
    ensure!(shifted.warning.is_none(), "unexpected warning");
    Ok(())
}

/// Real and complexified paths have the same flow.
pub fn flow_complexification(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let (p, _) = flow_setup(&mut rng)?;
    let (r, c) = (ok(spectral_flow(&p))?.0, ok(spectral_flow(&complexify_path(&p)))?.0);
    ensure!(r == c, "real {r}, complexified {c}");
    Ok(())
}

/// Partial indices of a single crossing path follow the sign of the total index.
pub fn midpoint_dichotomy(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let n = small_n(&mut rng);
    let k = rng.gen_range(1..=n);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let c = ok(ensembles::single_crossing_path(&mut rng, n, k, sign))?;
    let total = ok(maslov_index(&c.path, &c.reference))?;
    let left = ok(partial_maslov_index(&c.path, &c.reference, c.lambda0, Side::Left))?;
    let right = ok(partial_maslov_index(&c.path, &c.reference, c.lambda0, Side::Right))?;
    let k = k as i64;
    ensure!(total == sign * k, "total {total}, expected {}", sign * k);
    let expected = if sign > 0 { (k, 0) } else { (0, -k) };
    ensure!((left, right) == expected, "partials ({left}, {right}), expected {expected:?}");
    Ok(())
}

/// Integers do not change when the initial grids or contour sampling are refined.
pub fn refinement_stability(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let (p, _) = flow_setup(&mut rng)?;
    let (a, b) = (ok(spectral_flow_with_grid(&p, 4))?.0, ok(spectral_flow_with_grid(&p, 32))?.0);
    ensure!(a == b, "flow {a} vs {b} under grid refinement");
    let n = small_n(&mut rng);
    let s = ok(standard_space(n))?;
    let path = UnitaryLagrangianPath::random(&mut rng, n, 2.0);
    let w = random_lagrangian(&mut rng, &s);
    let f = path.frame_fn(&s);
    if [0.0, 1.0].iter().all(|&l| maslov::transversality_margin(&s, &f(l).unwrap(), &w) > 0.05) {
        let m4 = ok(maslov_index(&ok(path.path(&s, 4))?, &w))?;
        let m32 = ok(maslov_index(&ok(path.path(&s, 32))?, &w))?;
        ensure!(m4 == m32, "Maslov {m4} vs {m32} under grid refinement");
    }
    let c = ok(chern_winding_default(&p))?;
    let c2 = ok(hamflow::spectral_flow::chern_winding(
        &p,
        0.05,
        hamflow::spectral_flow::default_half_height(&p),
        1024,
    ))?;
    ensure!(c == c2, "winding {c} vs {c2} under contour refinement");
    Ok(())
}

/// `chern_winding == spectral_flow` on a random piecewise-linear path.
pub fn chern_equals_flow(seed: u64) -> Check {
    let mut rng = ensembles::rng(seed);
    let dim = rng.gen_range(1..=8);
    let p = ok(ensembles::random_symmetric_path(&mut rng, dim, 3, 1.0, 0.05))?;
    let (s, c) = (ok(spectral_flow(&p))?.0, ok(chern_winding_default(&p))?);
    ensure!(s == c, "flow {s}, winding {c} at dim {dim}");
    Ok(())
}

/// All property checks of the randomized suites, by name.
pub const PROPERTIES: &[(&str, fn(u64) -> Check)] = &[
    ("souriau unitarity", souriau_unitarity),
    ("intersection count", intersection_count),
    ("gap metric axioms", gap_axioms),
    ("symplectic residual", symplectic_residual),
    ("relative dimension antisymmetry", relative_dimension_antisymmetry),
    ("Fredholm index zero", fredholm_index_zero),
    ("Maslov concatenation/reversal", maslov_concatenation_and_reversal),
    ("pair Maslov concatenation/reversal", pair_concatenation_and_reversal),
    ("flow concatenation/reversal", flow_concatenation_and_reversal),
    ("flow shift invariance", flow_shift_invariance),
    ("flow complexification", flow_complexification),
    ("single-crossing partial indices", midpoint_dichotomy),
    ("refinement stability", refinement_stability),
];

/// `Λ₀ = span(cos θ, sin θ)` with `θ = πλ + π/2` and `Λ₁ = span e1` on `[0, 1]`:
/// the exact eigenvalue branch through 0 is `πλ - π/2`.
pub fn q_branch(lam: f64, intervals: usize) -> (f64, usize) {
    let s = standard_space(1).unwrap();
    let op = hamflow::hamiltonian::assemble_q_operator(&s, &line(PI * lam + PI / 2.0), &line(0.0), 0.0, 1.0, intervals)
        .unwrap();
    let exact = PI * lam - PI / 2.0;
    let eig = op.eigenvalues();
    let nearest = eig.iter().copied().min_by(|a, b| (a - exact).abs().total_cmp(&(b - exact).abs())).unwrap();
    let cluster = eig.iter().filter(|x| (*x - exact).abs() < 0.5).count();
    (nearest, cluster)
}

/// Empirical order of the branch error across `N, 2N, 4N`.
pub fn q_orders(lam: f64, base: usize) -> (f64, f64) {
    let exact = PI * lam - PI / 2.0;
    let e: Vec<f64> = [base, 2 * base, 4 * base].iter().map(|&n| (q_branch(lam, n).0 - exact).abs()).collect();
    ((e[0] / e[1]).log2(), (e[1] / e[2]).log2())
}

/// Signed `A⁰` eigenvalue nearest 0.
pub fn a0_nearest(fam: &HamiltonianFamily, lam: f64, cfg: &hamflow::hamiltonian::A0Config) -> f64 {
    hamflow::hamiltonian::assemble_a0_operator(fam, lam, cfg).unwrap().eigenvalues_near_zero(1)[0]
}

/// Zero of the nearest-to-0 `A⁰` eigenvalue in `[lo, hi]` by bisection.
pub fn a0_zero(fam: &HamiltonianFamily, cfg: &hamflow::hamiltonian::A0Config, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut fa = a0_nearest(fam, a, cfg);
    assert!(fa * a0_nearest(fam, b, cfg) < 0.0, "no sign change in [{lo}, {hi}]");
    for _ in 0..40 {
        let m = 0.5 * (a + b);
        let fm = a0_nearest(fam, m, cfg);
        if fm * fa <= 0.0 {
            b = m;
        } else {
            (a, fa) = (m, fm);
        }
    }
    0.5 * (a + b)
}

/// Crossing `λ` of the discretized `A⁰` path, Richardson-extrapolated from `N` and `2N`.
pub fn a0_zero_extrapolated(fam: &HamiltonianFamily, intervals: usize, lo: f64, hi: f64) -> f64 {
    let coarse = hamflow::hamiltonian::A0Config::for_family(fam, intervals);
    let fine = hamflow::hamiltonian::A0Config { intervals: 2 * intervals, ..coarse };
    let (z1, z2) = (a0_zero(fam, &coarse, lo, hi), a0_zero(fam, &fine, lo, hi));
    (4.0 * z2 - z1) / 3.0
}
