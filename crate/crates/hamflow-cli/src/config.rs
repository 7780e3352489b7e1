//! Scenario files: one TOML document with flat sections, unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hamflow::hamiltonian::reports::{DEFAULT_CHERN_SAMPLES, DEFAULT_DELTA, DEFAULT_INTERVALS, TOL_ADMISSIBLE};
use hamflow::hamiltonian::{FamilyParams, ReportOptions};
use hamflow::spectral_flow::DEFAULT_INITIAL;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub family: FamilySection,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub reports: Reports,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    pub id: String,
    #[serde(default = "default_n")]
    pub n: usize,
    pub amplitude: Option<f64>,
    pub decay_scale: Option<f64>,
    pub winding: Option<i32>,
}

fn default_n() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// Initial uniform `λ` grid.
    pub grid: usize,
    /// `T`; the family default when absent.
    pub truncation: Option<f64>,
    /// `t0`; `T/2` when absent.
    pub half_length: Option<f64>,
    /// Elements `N` of the discretized operators.
    pub intervals: usize,
    /// Endpoint transversality margin.
    pub tolerance: f64,
    pub contour_samples: usize,
    pub third_opinion: bool,
    pub convergence: bool,
    pub delta: f64,
    pub track_rows: usize,
    pub track_count: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            grid: DEFAULT_INITIAL,
            truncation: None,
            half_length: None,
            intervals: DEFAULT_INTERVALS,
            tolerance: TOL_ADMISSIBLE,
            contour_samples: DEFAULT_CHERN_SAMPLES,
            third_opinion: false,
            convergence: false,
            delta: DEFAULT_DELTA,
            track_rows: 64,
            track_count: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    TheoremA,
    TheoremB,
    CorollaryA,
    SelfTests,
}

/// Lagrangian pair used by `theorem-b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairChoice {
    /// `(E^u_λ(0), E^s_λ(0))` of the configured family.
    #[default]
    Boundary,
    /// A line rotating by `πλ` against a fixed line in `R²`.
    GammaNor,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Reports {
    pub run: Vec<Selection>,
    pub pair: PairChoice,
}

impl Default for Reports {
    fn default() -> Self {
        Self { run: vec![Selection::TheoremA], pair: PairChoice::Boundary }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: PathBuf::from("hamflow-out") }
    }
}

/// Command-line values that replace config entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub truncation: Option<f64>,
    pub intervals: Option<usize>,
    pub tolerance: Option<f64>,
    pub third_opinion: bool,
}

fn range<T: PartialOrd + std::fmt::Display>(key: &str, v: T, lo: T, hi: T) -> Result<(), CliError> {
    if v >= lo && v <= hi {
        Ok(())
    } else {
        Err(CliError::Config(format!("{key} = {v} outside [{lo}, {hi}]")))
    }
}

fn positive(key: &str, v: f64, hi: f64) -> Result<(), CliError> {
    if v > 0.0 && v <= hi {
        Ok(())
    } else {
        Err(CliError::Config(format!("{key} = {v} outside (0, {hi}]")))
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(mut self, o: &Overrides) -> Result<Self, CliError> {
        if let Some(d) = &o.out {
            self.output.dir = d.clone();
        }
        if let Some(g) = o.grid {
            self.numerics.grid = g;
        }
        if let Some(t) = o.truncation {
            self.numerics.truncation = Some(t);
        }
        if let Some(n) = o.intervals {
            self.numerics.intervals = n;
        }
        if let Some(t) = o.tolerance {
            self.numerics.tolerance = t;
        }
        self.numerics.third_opinion |= o.third_opinion;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let f = &self.family;
        range("family.n", f.n, 1, 8)?;
        if let Some(a) = f.amplitude {
            range("family.amplitude", a, -20.0, 20.0)?;
        }
        if let Some(d) = f.decay_scale {
            positive("family.decay_scale", d, 10.0)?;
        }
        if let Some(w) = f.winding {
            range("family.winding", w, -4, 4)?;
        }
        let n = &self.numerics;
        range("numerics.grid", n.grid, 2, 1024)?;
        range("numerics.intervals", n.intervals, 4, 4096)?;
        if let Some(t) = n.truncation {
            positive("numerics.truncation", t, 200.0)?;
        }
        if let Some(h) = n.half_length {
            positive("numerics.half_length", h, n.truncation.unwrap_or(200.0))?;
        }
        positive("numerics.tolerance", n.tolerance, 0.1)?;
        range("numerics.contour_samples", n.contour_samples, 8, 4096)?;
        positive("numerics.delta", n.delta, 0.5)?;
        range("numerics.track_rows", n.track_rows, 1, 4096)?;
        range("numerics.track_count", n.track_count, 1, 16)?;
        if self.reports.run.is_empty() {
            return Err(CliError::Config("reports.run is empty".into()));
        }
        if self.reports.pair == PairChoice::GammaNor && self.reports.run.contains(&Selection::TheoremB) && f.n != 1 {
            return Err(CliError::Config("pair = \"gamma-nor\" needs family.n = 1".into()));
        }
        Ok(())
    }

    pub fn family_params(&self) -> FamilyParams {
        let d = FamilyParams::default();
        FamilyParams {
            n: self.family.n,
            amplitude: self.family.amplitude.unwrap_or(d.amplitude),
            decay_scale: self.family.decay_scale,
            winding: self.family.winding.unwrap_or(d.winding),
        }
    }

    pub fn report_options(&self) -> ReportOptions {
        let n = &self.numerics;
        ReportOptions {
            grid: n.grid,
            truncation: n.truncation,
            half_length: n.half_length,
            intervals: n.intervals,
            third_opinion: n.third_opinion,
            convergence: n.convergence,
            delta: n.delta,
            contour_samples: n.contour_samples,
            endpoint_tol: n.tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ScenarioConfig::parse("[family]\nid = \"autonomous\"\n").unwrap();
        assert_eq!(c.family.n, 1);
        assert_eq!(c.reports.run, vec![Selection::TheoremA]);
        assert_eq!(c.numerics.intervals, DEFAULT_INTERVALS);
    }

    #[test]
    fn unknown_keys_and_bad_ranges_are_rejected() {
        assert!(ScenarioConfig::parse("[family]\nid = \"autonomous\"\ncolour = 1\n").is_err());
        assert!(ScenarioConfig::parse("[family]\nid = \"autonomous\"\n[numerics]\nintervals = 2\n").is_err());
        assert!(ScenarioConfig::parse("[family]\nid = \"autonomous\"\n[reports]\nrun = [\"theorem-z\"]\n").is_err());
        assert!(ScenarioConfig::parse("[family]\nid = \"autonomous\"\nn = 0\n").is_err());
    }

    #[test]
    fn overrides_replace_config_values() {
        let c = ScenarioConfig::parse("[family]\nid = \"autonomous\"\n").unwrap();
        let o = Overrides { grid: Some(8), intervals: Some(64), third_opinion: true, ..Default::default() };
        let c = c.apply(&o).unwrap();
        assert_eq!((c.numerics.grid, c.numerics.intervals, c.numerics.third_opinion), (8, 64, true));
        assert!(c.apply(&Overrides { tolerance: Some(-1.0), ..Default::default() }).is_err());
    }
}
