//! Black-box runs of the `hamflow` binary against scenario fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hamflow"))
}

/// Writes `body` plus an `[output]` section pointing into `dir`.
fn scenario(dir: &TempDir, name: &str, body: &str) -> (PathBuf, PathBuf) {
    let out = dir.path().join(format!("{name}-out"));
    let path = dir.path().join(format!("{name}.toml"));
    let text = format!("{body}\n[output]\ndir = {:?}\n", out.to_str().unwrap());
    std::fs::write(&path, text).unwrap();
    (path, out)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

/// Rows of a CSV artifact as `f64` cells (empty cells become NaN).
fn table(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

#[test]
fn families_lists_four_entries_with_assumption_flags() {
    let o = run(&["families"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with(' ') && l.contains("yes")).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split_whitespace().nth(1) == Some("yes")));
    let rotating = rows.iter().find(|r| r.starts_with("rotating-asymptotics")).unwrap();
    assert_eq!(rotating.split_whitespace().nth(3), Some("yes"));
}

#[test]
fn autonomous_theorem_a_reports_zero() {
    let dir = TempDir::new().unwrap();
    let (cfg, out) = scenario(&dir, "auto", "[family]\nid = \"autonomous\"\n[numerics]\nintervals = 48\ngrid = 4\ntrack_rows = 12");
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: toml::Value = toml::from_str(&read(&out.join("report.toml"))).unwrap();
    let r = &report["report"][0];
    assert_eq!((r["sfl"].as_integer(), r["maslov"].as_integer()), (Some(0), Some(0)));
    assert_eq!(report["summary"]["all_agree"].as_bool(), Some(true));
    // No sign change in any tracked eigenvalue column.
    let (header, rows) = table(&out.join("tracks.csv"));
    for (k, h) in header.iter().enumerate().filter(|(_, h)| h.starts_with("eig_")) {
        let first = rows[0][k].signum();
        assert!(rows.iter().all(|r| r[k].signum() == first), "column {h} changes sign");
    }
}

#[test]
fn gamma_pair_reports_one_and_tracks_slope_pi() {
    let dir = TempDir::new().unwrap();
    let body = "[family]\nid = \"gamma-nor-embedding\"\n[numerics]\nintervals = 64\ntrack_rows = 20\n[reports]\nrun = [\"theorem-b\"]\npair = \"gamma-nor\"";
    let (cfg, out) = scenario(&dir, "gamma", body);
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let report: toml::Value = toml::from_str(&read(&out.join("report.toml"))).unwrap();
    let r = &report["report"][0];
    assert_eq!((r["sfl"].as_integer(), r["maslov"].as_integer()), (Some(1), Some(1)));
    let (header, rows) = table(&out.join("tracks.csv"));
    let eig: Vec<usize> = (0..header.len()).filter(|&k| header[k].starts_with("eig_")).collect();
    let nearest = |r: &Vec<f64>| eig.iter().map(|&k| r[k]).min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
    // Rows at λ = 0.45 and 0.55 bracket the zero at 1/2.
    let (a, b) = (&rows[9], &rows[11]);
    let slope = (nearest(b) - nearest(a)) / (b[0] - a[0]);
    assert!((slope - std::f64::consts::PI).abs() < 1e-2, "slope {slope}");
    assert_eq!(rows[10][header.len() - 1], 1.0);
}

#[test]
fn sech_default_lists_one_crossing_with_consistent_columns() {
    let dir = TempDir::new().unwrap();
    let (cfg, out) = scenario(&dir, "sech", "[family]\nid = \"sech-perturbation\"\n[numerics]\nintervals = 64\ntrack_rows = 32");
    let o = run(&["run", cfg.to_str().unwrap(), "--third-opinion"]);
    assert_eq!(code(&o), 0);
    let (_, crossings) = table(&out.join("crossings.csv"));
    assert_eq!(crossings.len(), 1);
    let lam = crossings[0][1];
    assert!((lam - 0.75).abs() < 1e-3);
    // The eigenphase nearest 0 and the eigenvalue nearest 0 change sign in the same grid cell.
    let (header, rows) = table(&out.join("tracks.csv"));
    let pick = |prefix: &str, r: &Vec<f64>| {
        (0..header.len())
            .filter(|&k| header[k].starts_with(prefix))
            .map(|k| r[k])
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap()
    };
    let cell = |prefix: &str| {
        rows.windows(2).position(|w| pick(prefix, &w[0]) * pick(prefix, &w[1]) < 0.0).map(|i| rows[i][0])
    };
    let (e, p) = (cell("eig_"), cell("phase_"));
    assert!(e.is_some() && e == p, "eigenvalue cell {e:?}, phase cell {p:?}");
    assert!(e.unwrap() <= lam && lam <= e.unwrap() + 1.0 / 32.0);
}

#[test]
fn configuration_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("unknown-key", "[family]\nid = \"autonomous\"\nspeed = 3"),
        ("bad-range", "[family]\nid = \"autonomous\"\n[numerics]\nintervals = 1"),
        ("bad-report", "[family]\nid = \"autonomous\"\n[reports]\nrun = [\"theorem-q\"]"),
        ("unknown-family", "[family]\nid = \"pendulum\""),
        ("bad-toml", "[family\nid = 1"),
    ];
    for (name, body) in cases {
        let (cfg, _) = scenario(&dir, name, body);
        assert_eq!(code(&run(&["run", cfg.to_str().unwrap()])), 2, "{name}");
    }
    assert_eq!(code(&run(&["run", "/nonexistent/scenario.toml"])), 2);
    let (cfg, _) = scenario(&dir, "ok", "[family]\nid = \"autonomous\"");
    assert_eq!(code(&run(&["run", cfg.to_str().unwrap(), "--tol", "-1"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let o = bin().args(["run", cfg.to_str().unwrap()]).env("HAMFLOW_THREADS", "many").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn unconverged_truncation_exits_three() {
    let dir = TempDir::new().unwrap();
    let (cfg, _) = scenario(&dir, "short", "[family]\nid = \"sech-perturbation\"\n[numerics]\nintervals = 32\ngrid = 4");
    let o = run(&["run", cfg.to_str().unwrap(), "--trunc", "1.0"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncation"));
}

#[test]
fn disagreement_exits_one_with_summary() {
    let dir = TempDir::new().unwrap();
    let body = "[family]\nid = \"rotating-asymptotics\"\n[numerics]\nintervals = 48\ntrack_rows = 8\n[reports]\nrun = [\"corollary-a\"]";
    let (cfg, out) = scenario(&dir, "rot", body);
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("corollary-a: sfl 1 vs maslov -1"));
    // Artifacts are still written for inspection.
    assert!(out.join("report.toml").exists());
}

#[test]
fn runs_are_deterministic_and_honor_overrides() {
    let dir = TempDir::new().unwrap();
    let (cfg, out) = scenario(&dir, "det", "[family]\nid = \"gamma-nor-embedding\"\n[numerics]\ntrack_rows = 8");
    let other = dir.path().join("second");
    let args = ["run", cfg.to_str().unwrap(), "--mesh", "48", "--grid", "8"];
    assert_eq!(code(&bin().args(args).env("HAMFLOW_THREADS", "1").output().unwrap()), 0);
    let o = run(&[&args[..], &["--out", other.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0);
    for f in ["tracks.csv", "crossings.csv", "convergence.csv"] {
        assert_eq!(read(&out.join(f)), read(&other.join(f)), "{f}");
    }
    let a: toml::Value = toml::from_str(&read(&out.join("report.toml"))).unwrap();
    let b: toml::Value = toml::from_str(&read(&other.join("report.toml"))).unwrap();
    assert_eq!(a["report"], b["report"]);
    assert_eq!(a["report"][0]["intervals"].as_integer(), Some(48));
    assert_eq!(a["report"][0]["grid"].as_integer(), Some(8));
}

#[test]
fn tracks_verb_writes_only_the_track_table() {
    let dir = TempDir::new().unwrap();
    let (cfg, out) = scenario(&dir, "tr", "[family]\nid = \"autonomous\"\n[numerics]\nintervals = 32\ntrack_rows = 4");
    assert_eq!(code(&run(&["tracks", cfg.to_str().unwrap()])), 0);
    let mut files: Vec<String> =
        std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    files.sort();
    assert_eq!(files, vec!["tracks.csv"]);
    assert_eq!(table(&out.join("tracks.csv")).1.len(), 5);
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() >= 7 && text.lines().all(|l| l.starts_with("PASS")));
}
