//! Fast fixed-seed checks of the normalizations and the index identities.

use serde::Serialize;

use hamflow::ensembles::{self, random_admissible_pair, random_symmetric_path};
use hamflow::hamiltonian::family::autonomous;
use hamflow::hamiltonian::reports::gamma_nor_pair;
use hamflow::hamiltonian::{theorem_a_report, theorem_b_report, ReportOptions};
use hamflow::linalg::CMat;
use hamflow::maslov::{maslov_index, LagrangianPath};
use num_complex::Complex64;
use hamflow::spectral_flow::{chern_winding_default, determinant_winding, normalization_path, spectral_flow};
use hamflow::symplectic::standard_space;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

type Check = fn() -> hamflow::Result<(bool, String)>;

fn rotating_line_index() -> hamflow::Result<(bool, String)> {
    let (l0, l1) = gamma_nor_pair();
    let p = LagrangianPath::from_fn(standard_space(1)?, l0, 0.0, 1.0, 8)?;
    let mu = maslov_index(&p, &l1(0.0)?)?;
    Ok((mu == 1, format!("maslov = {mu}")))
}

fn normalization_flow() -> hamflow::Result<(bool, String)> {
    let s = spectral_flow(&normalization_path(1, 1)?)?.0;
    Ok((s == 1, format!("sfl = {s}")))
}

fn scalar_winding() -> hamflow::Result<(bool, String)> {
    let w = determinant_winding(|l, s| CMat::from_element(1, 1, Complex64::new(l - 0.5, s)), -0.05, 1.05, 2.0, 64)?;
    Ok((w == 1, format!("winding = {w}")))
}

fn rotating_line_pair() -> hamflow::Result<(bool, String)> {
    let (l0, l1) = gamma_nor_pair();
    let opts = ReportOptions { intervals: 48, ..Default::default() };
    let r = theorem_b_report(l0, l1, &standard_space(1)?, 0.0, 1.0, &opts)?;
    Ok((r.sfl == 1 && r.maslov == 1, format!("sfl = {}, maslov = {}", r.sfl, r.maslov)))
}

fn autonomous_family() -> hamflow::Result<(bool, String)> {
    let opts = ReportOptions { intervals: 48, grid: 4, ..Default::default() };
    let r = theorem_a_report(&autonomous(1)?, &opts)?;
    Ok((r.sfl == 0 && r.maslov == 0, format!("sfl = {}, maslov = {}", r.sfl, r.maslov)))
}

fn random_windings() -> hamflow::Result<(bool, String)> {
    let mut bad = 0;
    for seed in 0..20u64 {
        let mut rng = ensembles::rng(seed);
        let p = random_symmetric_path(&mut rng, 1 + seed as usize % 6, 3, 1.0, 0.05)?;
        if spectral_flow(&p)?.0 != chern_winding_default(&p)? {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("{bad} of 20 disagree")))
}

fn random_pairs() -> hamflow::Result<(bool, String)> {
    let space = standard_space(2)?;
    let mut bad = 0;
    for seed in 0..3u64 {
        let mut rng = ensembles::rng(100 + seed);
        let (a, b) = random_admissible_pair(&mut rng, 2, 1.0, 0.05)?;
        let opts = ReportOptions { intervals: 24, ..Default::default() };
        if !theorem_b_report(a.frame_fn(&space), b.frame_fn(&space), &space, 0.0, 1.0, &opts)?.agreement() {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("{bad} of 3 disagree")))
}

const CHECKS: &[(&str, Check)] = &[
    ("rotating-line-maslov", rotating_line_index),
    ("normalization-flow", normalization_flow),
    ("scalar-winding", scalar_winding),
    ("rotating-line-pair", rotating_line_pair),
    ("autonomous-family", autonomous_family),
    ("random-windings", random_windings),
    ("random-pairs", random_pairs),
];

pub fn run_selftests() -> Vec<SelfTestResult> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let (pass, detail) = match check() {
                Ok(r) => r,
                Err(e) => (false, e.to_string()),
            };
            SelfTestResult { name: name.to_string(), pass, detail }
        })
        .collect()
}
