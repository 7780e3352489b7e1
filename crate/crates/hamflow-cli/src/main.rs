//! `hamflow`: run index scenarios from TOML files and write report and table artifacts.
//!
//! Exit status: 0 when every agreement flag holds, 1 on disagreement,
//! 2 on configuration errors, 3 on numerical or i/o failures.

mod config;
mod error;
mod output;
mod scenario;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Overrides, ScenarioConfig};
use error::CliError;

/// Thread count for the `λ` sweeps; all cores when unset.
const THREADS_ENV: &str = "HAMFLOW_THREADS";

#[derive(Parser)]
#[command(name = "hamflow", version, about = "Spectral flow and Maslov index scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the reports selected in a scenario file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Write only the eigenvalue/eigenphase track table.
    Tracks {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// List the builtin families.
    Families,
    /// Run fixed-seed self-tests.
    Selftest,
}

#[derive(Args)]
struct OverrideArgs {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Initial λ grid size.
    #[arg(long)]
    grid: Option<usize>,
    /// Truncation T.
    #[arg(long)]
    trunc: Option<f64>,
    /// Number of elements N.
    #[arg(long)]
    mesh: Option<usize>,
    /// Endpoint transversality tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Also compute the determinant winding.
    #[arg(long)]
    third_opinion: bool,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides {
            out: a.out,
            grid: a.grid,
            truncation: a.trunc,
            intervals: a.mesh,
            tolerance: a.tol,
            third_opinion: a.third_opinion,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} = {v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn load(path: &PathBuf, overrides: OverrideArgs) -> Result<ScenarioConfig, CliError> {
    ScenarioConfig::load(path)?.apply(&overrides.into())
}

fn families() {
    println!("{:<22} {:<5} {:<5} {:<5}  parameters / summary", "id", "A1", "A2", "A3");
    for e in hamflow::hamiltonian::catalog() {
        let flag = |b: bool| if b { "yes" } else { "no" };
        println!(
            "{:<22} {:<5} {:<5} {:<5}  {}",
            e.id,
            flag(e.hyperbolic),
            flag(e.decaying),
            flag(e.periodic),
            e.parameters
        );
        println!("{:<40}{}", "", e.summary);
    }
    println!("A1: hyperbolic asymptotic generators. A2: exponential decay to the limits. A3: periodic in lambda.");
}

fn run(path: PathBuf, overrides: OverrideArgs) -> Result<(), CliError> {
    let cfg = load(&path, overrides)?;
    let art = scenario::run_scenario(&cfg)?;
    for r in &art.reports {
        println!(
            "{}: sfl = {}, maslov = {}{} [{}]",
            r.kind.key(),
            r.sfl,
            r.maslov,
            r.chern.map_or(String::new(), |c| format!(", winding = {c}")),
            if r.all_agree() { "agree" } else { "DISAGREE" }
        );
    }
    for s in &art.selftests {
        println!("selftest {}: {} ({})", s.name, if s.pass { "PASS" } else { "FAIL" }, s.detail);
    }
    println!("tracks: {} rows", art.tracks.len());
    for f in &art.files {
        println!("wrote {}", f.display());
    }
    if art.all_agree() {
        Ok(())
    } else {
        Err(CliError::Disagreement(art.diff_summary()))
    }
}

fn tracks(path: PathBuf, overrides: OverrideArgs) -> Result<(), CliError> {
    let cfg = load(&path, overrides)?;
    let rows = scenario::tracks(&cfg)?;
    println!("wrote {}", scenario::write_tracks(&cfg, &rows)?.display());
    Ok(())
}

fn selftest() -> Result<(), CliError> {
    let results = selftest::run_selftests();
    for s in &results {
        println!("{} {}: {}", if s.pass { "PASS" } else { "FAIL" }, s.name, s.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|s| !s.pass).map(|s| s.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Disagreement(format!("self-tests failed: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match cli.command {
        Command::Run { config, overrides } => run(config, overrides),
        Command::Tracks { config, overrides } => tracks(config, overrides),
        Command::Families => {
            families();
            Ok(())
        }
        Command::Selftest => selftest(),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
