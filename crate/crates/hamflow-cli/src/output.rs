//! Artifact files. Every file is written to a temporary sibling and renamed.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use hamflow::hamiltonian::reports::TrackRow;
use hamflow::hamiltonian::IndexReport;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::selftest::SelfTestResult;

pub const REPORT_FILE: &str = "report.toml";
pub const TRACKS_FILE: &str = "tracks.csv";
pub const CROSSINGS_FILE: &str = "crossings.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Numeric(format!("i/o: {}", e.error)))?;
    Ok(())
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Numeric(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Numeric(format!("csv: {e}")))
}

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn tracks_table(rows: &[TrackRow], count: usize, phases: usize) -> Result<Vec<u8>, CliError> {
    let mut header = vec!["lambda".to_string()];
    header.extend((1..=2 * count).map(|k| format!("eig_{k}")));
    header.extend((1..=phases).map(|k| format!("phase_{k}")));
    header.push("intersection_dim".into());
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![num(r.lambda)];
            v.extend((0..2 * count).map(|k| r.eigenvalues.get(k).map_or(String::new(), |x| num(*x))));
            v.extend((0..phases).map(|k| r.phases.get(k).map_or(String::new(), |x| num(*x))));
            v.push(r.intersection_dim.to_string());
            v
        })
        .collect();
    csv_bytes(&header, &body)
}

pub fn crossings_table(reports: &[IndexReport]) -> Result<Vec<u8>, CliError> {
    let mut rows: Vec<(f64, Vec<String>)> = reports
        .iter()
        .flat_map(|r| {
            r.crossings.iter().map(move |c| {
                (c.lambda, vec![r.kind.key().to_string(), num(c.lambda), c.dim.to_string(), c.at_endpoint.to_string()])
            })
        })
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1[0].cmp(&b.1[0])));
    let header: Vec<String> = ["report", "lambda", "dim", "at_endpoint"].iter().map(|s| s.to_string()).collect();
    csv_bytes(&header, &rows.into_iter().map(|r| r.1).collect::<Vec<_>>())
}

pub fn convergence_table(reports: &[IndexReport]) -> Result<Vec<u8>, CliError> {
    let mut rows = Vec::new();
    for r in reports {
        rows.push(vec![
            r.kind.key().to_string(),
            "base".into(),
            r.truncation.map_or(String::new(), num),
            r.intervals.to_string(),
            r.sfl.to_string(),
            r.maslov.to_string(),
            r.agreement().to_string(),
        ]);
        for c in &r.convergence {
            rows.push(vec![
                r.kind.key().to_string(),
                c.label.clone(),
                c.truncation.map_or(String::new(), num),
                c.intervals.to_string(),
                c.sfl.to_string(),
                c.maslov.to_string(),
                (c.sfl == r.sfl && c.maslov == r.maslov).to_string(),
            ]);
        }
    }
    let header: Vec<String> =
        ["report", "label", "truncation", "intervals", "sfl", "maslov", "agrees"].iter().map(|s| s.to_string()).collect();
    csv_bytes(&header, &rows)
}

#[derive(Serialize)]
struct ReportDoc {
    scenario: ScenarioConfig,
    summary: Summary,
    report: Vec<ReportEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    selftest: Vec<SelfTestResult>,
}

#[derive(Serialize)]
struct Summary {
    all_agree: bool,
    reports: usize,
    selftests_passed: usize,
    selftests_total: usize,
}

#[derive(Serialize)]
struct GeneralCaseEntry {
    delta: f64,
    raw_maslov: i64,
    shifted_sfl: i64,
    correction_start: i64,
    correction_end: i64,
    corrected: i64,
}

#[derive(Serialize)]
struct ReportEntry {
    kind: &'static str,
    label: String,
    sfl: i64,
    maslov: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    chern: Option<i64>,
    agreement: bool,
    all_agree: bool,
    intervals: usize,
    grid: usize,
    window: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    half_length: Option<f64>,
    flow_steps: usize,
    crossings: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    general_case: Option<GeneralCaseEntry>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    auxiliary: BTreeMap<String, i64>,
}

impl From<&IndexReport> for ReportEntry {
    fn from(r: &IndexReport) -> Self {
        Self {
            kind: r.kind.key(),
            label: r.label.clone(),
            sfl: r.sfl,
            maslov: r.maslov,
            chern: r.chern,
            agreement: r.agreement(),
            all_agree: r.all_agree(),
            intervals: r.intervals,
            grid: r.grid,
            window: r.window,
            truncation: r.truncation,
            half_length: r.half_length,
            flow_steps: r.certificate.as_ref().map_or(0, |c| c.steps.len()),
            crossings: r.crossings.iter().map(|c| c.lambda).collect(),
            general_case: r.general_case.as_ref().map(|g| GeneralCaseEntry {
                delta: g.delta,
                raw_maslov: g.raw_maslov,
                shifted_sfl: g.shifted_sfl,
                correction_start: g.correction_start,
                correction_end: g.correction_end,
                corrected: g.corrected,
            }),
            auxiliary: r.auxiliary.iter().cloned().collect(),
        }
    }
}

pub fn report_document(
    cfg: &ScenarioConfig,
    reports: &[IndexReport],
    selftests: &[SelfTestResult],
) -> Result<Vec<u8>, CliError> {
    let passed = selftests.iter().filter(|s| s.pass).count();
    let doc = ReportDoc {
        scenario: cfg.clone(),
        summary: Summary {
            all_agree: reports.iter().all(IndexReport::all_agree) && passed == selftests.len(),
            reports: reports.len(),
            selftests_passed: passed,
            selftests_total: selftests.len(),
        },
        report: reports.iter().map(ReportEntry::from).collect(),
        selftest: selftests.to_vec(),
    };
    toml::to_string(&doc).map(String::into_bytes).map_err(|e| CliError::Numeric(format!("report encoding: {e}")))
}

pub fn artifact_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
