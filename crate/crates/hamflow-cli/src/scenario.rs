//! Scenario execution: build the family, run the selected reports, write artifacts.

use std::path::PathBuf;
use std::sync::Arc;

use hamflow::hamiltonian::reports::{a0_tracks, gamma_nor_pair, q_tracks, TrackRow};
use hamflow::hamiltonian::{
    builtin, corollary_a_report, stable_space, theorem_a_report, theorem_b_report, HamiltonianFamily, IndexReport,
};
use hamflow::maslov::FrameFn;
use hamflow::symplectic::standard_space;

use crate::config::{PairChoice, ScenarioConfig, Selection};
use crate::error::CliError;
use crate::output::{self, artifact_path};
use crate::selftest::{run_selftests, SelfTestResult};

pub struct RunArtifacts {
    pub reports: Vec<IndexReport>,
    pub selftests: Vec<SelfTestResult>,
    pub tracks: Vec<TrackRow>,
    pub files: Vec<PathBuf>,
}

impl RunArtifacts {
    pub fn all_agree(&self) -> bool {
        self.reports.iter().all(IndexReport::all_agree) && self.selftests.iter().all(|s| s.pass)
    }

    /// One line per disagreeing report or failed self-test.
    pub fn diff_summary(&self) -> String {
        let mut lines = Vec::new();
        for r in self.reports.iter().filter(|r| !r.all_agree()) {
            let mut parts = vec![format!("sfl {} vs maslov {}", r.sfl, r.maslov)];
            if let Some(c) = r.chern.filter(|&c| c != r.sfl) {
                parts.push(format!("winding {c}"));
            }
            for c in r.convergence.iter().filter(|c| c.sfl != r.sfl || c.maslov != r.maslov) {
                parts.push(format!("{}: sfl {} maslov {}", c.label, c.sfl, c.maslov));
            }
            if let Some(g) = r.general_case.as_ref().filter(|g| g.corrected != g.raw_maslov) {
                parts.push(format!("corrected {} vs raw maslov {}", g.corrected, g.raw_maslov));
            }
            lines.push(format!("{}: {}", r.kind.key(), parts.join(", ")));
        }
        for s in self.selftests.iter().filter(|s| !s.pass) {
            lines.push(format!("selftest {}: {}", s.name, s.detail));
        }
        lines.join("\n")
    }
}

fn family(cfg: &ScenarioConfig) -> Result<HamiltonianFamily, CliError> {
    builtin(&cfg.family.id, &cfg.family_params()).map_err(|e| CliError::Config(e.to_string()))
}

/// The `theorem-b` pair on `[0, 1]`.
fn pair(cfg: &ScenarioConfig, fam: &HamiltonianFamily) -> (FrameFn, FrameFn) {
    match cfg.reports.pair {
        PairChoice::GammaNor => gamma_nor_pair(),
        PairChoice::Boundary => {
            let t = cfg.report_options().a0_config(fam).truncation;
            let (fu, fs) = (fam.clone(), fam.clone());
            (
                Arc::new(move |l| Ok(hamflow::hamiltonian::unstable_space(&fu, l, 0.0, t)?.frame)),
                Arc::new(move |l| Ok(stable_space(&fs, l, 0.0, t)?.frame)),
            )
        }
    }
}

/// Tracks of the `Q` pencil when `theorem-b` is selected, of `A⁰` otherwise.
pub fn tracks(cfg: &ScenarioConfig) -> Result<Vec<TrackRow>, CliError> {
    let fam = family(cfg)?;
    let n = &cfg.numerics;
    if cfg.reports.run.contains(&Selection::TheoremB) {
        let (l0, l1) = pair(cfg, &fam);
        let space = if cfg.reports.pair == PairChoice::GammaNor { standard_space(1)? } else { fam.space().clone() };
        Ok(q_tracks(l0, l1, &space, 0.0, 1.0, n.intervals, n.track_rows, n.track_count)?)
    } else {
        Ok(a0_tracks(&fam, &cfg.report_options(), n.track_rows, n.track_count)?)
    }
}

fn phase_columns(cfg: &ScenarioConfig) -> usize {
    let n = if cfg.reports.run.contains(&Selection::TheoremB) && cfg.reports.pair == PairChoice::GammaNor {
        1
    } else {
        cfg.family.n
    };
    cfg.numerics.track_count.min(2 * n)
}

pub fn write_tracks(cfg: &ScenarioConfig, rows: &[TrackRow]) -> Result<PathBuf, CliError> {
    let path = artifact_path(&cfg.output.dir, output::TRACKS_FILE);
    output::write_atomic(&path, &output::tracks_table(rows, cfg.numerics.track_count, phase_columns(cfg))?)?;
    Ok(path)
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunArtifacts, CliError> {
    let fam = family(cfg)?;
    let opts = cfg.report_options();
    let mut reports = Vec::new();
    let mut selftests = Vec::new();
    for sel in &cfg.reports.run {
        match sel {
            Selection::TheoremA => reports.push(theorem_a_report(&fam, &opts)?),
            Selection::CorollaryA => reports.push(corollary_a_report(&fam, &opts)?),
            Selection::TheoremB => {
                let (l0, l1) = pair(cfg, &fam);
                let space = if cfg.reports.pair == PairChoice::GammaNor { standard_space(1)? } else { fam.space().clone() };
                reports.push(theorem_b_report(l0, l1, &space, 0.0, 1.0, &opts)?);
            }
            Selection::SelfTests => selftests.extend(run_selftests()),
        }
    }
    let rows = tracks(cfg)?;
    let dir = &cfg.output.dir;
    let mut files = vec![write_tracks(cfg, &rows)?];
    for (name, bytes) in [
        (output::CROSSINGS_FILE, output::crossings_table(&reports)?),
        (output::CONVERGENCE_FILE, output::convergence_table(&reports)?),
        (output::REPORT_FILE, output::report_document(cfg, &reports, &selftests)?),
    ] {
        let path = artifact_path(dir, name);
        output::write_atomic(&path, &bytes)?;
        files.push(path);
    }
    Ok(RunArtifacts { reports, selftests, tracks: rows, files })
}
