//! Verification suites. Each suite runs one family of checks over seeded
//! random trials and condenses the outcome into a `Report` whose JSON form is
//! a pure function of the configuration.

mod numrange;
mod preserver;
mod pseudo;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::random::stream_rng;
use crate::report::{Witness, Worst};

/// Suite names accepted by `run_suite`.
pub const SUITES: [&str; 12] = [
    "rank-one-psr",
    "pseudo-properties",
    "lwq",
    "hausdorff",
    "midpoint",
    "axioms",
    "zero-product",
    "invariance",
    "norm-identity",
    "orthogonality",
    "shift-demo",
    "classify-c",
];

/// Witnesses kept per report.
const MAX_WITNESSES: usize = 8;

/// Suite parameters. Unset fields fall back to per-suite defaults.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub seed: u64,
    pub dims: Option<Vec<usize>>,
    pub trials: Option<usize>,
    /// Single dimension for the axiom and shift suites.
    pub n: Option<usize>,
    /// Region grid resolution.
    pub grid: Option<usize>,
    /// Overrides of named tolerances, e.g. `tolerance` for the suite's main one.
    pub tolerances: BTreeMap<String, f64>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(seed: u64) -> RunConfig {
        RunConfig {
            seed,
            ..RunConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(dims) = &self.dims {
            if dims.is_empty() {
                return Err(Error::InvalidParameter("dims must not be empty".into()));
            }
            if let Some(d) = dims.iter().find(|&&d| d < 3) {
                return Err(Error::InvalidParameter(format!("dims must be >= 3, got {d}")));
            }
        }
        if self.trials == Some(0) {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if let Some(g) = self.grid {
            if g < 8 {
                return Err(Error::InvalidParameter(format!("grid must be >= 8, got {g}")));
            }
        }
        for (k, v) in &self.tolerances {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::InvalidParameter(format!("tolerance {k} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    fn dims_or(&self, default: &[usize]) -> Vec<usize> {
        self.dims.clone().unwrap_or_else(|| default.to_vec())
    }

    fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    /// Seed of sub-experiment `tag`, independent of the other tags.
    fn sub_seed(&self, tag: u64) -> u64 {
        stream_rng(self.seed, tag).gen()
    }
}

/// JSON report of one suite run. Field order is fixed; metrics are sorted by
/// name. Runtime is kept out so reruns compare byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub pass: bool,
    pub max_violation: f64,
    pub tolerance: f64,
    pub witnesses: Vec<Witness>,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub suite: String,
    pub pass: bool,
    pub max_violation: f64,
    pub runtime: f64,
    pub artifacts: Vec<PathBuf>,
    pub report: Report,
}

/// Accumulates a suite's outcome; `pass` is derived from the violation and
/// tolerance only.
struct Builder {
    suite: &'static str,
    seed: u64,
    dims: Vec<usize>,
    trials: usize,
    tolerance: f64,
    worst: Worst,
    witnesses: Vec<Witness>,
    metrics: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl Builder {
    fn new(suite: &'static str, cfg: &RunConfig, dims: Vec<usize>, trials: usize, tolerance: f64) -> Builder {
        Builder {
            suite,
            seed: cfg.seed,
            dims,
            trials,
            tolerance,
            worst: Worst::default(),
            witnesses: Vec::new(),
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Offers a violation in the units of `tolerance`.
    fn violation(&mut self, value: f64, witness: impl FnOnce() -> Witness) {
        self.worst.offer(value, witness);
    }

    /// Counts of failed expectations enter as violations `count` against a
    /// tolerance of 0.
    fn failures(&mut self, count: usize, witness: impl FnOnce() -> Witness) {
        self.violation(count as f64, witness);
    }

    fn witness(&mut self, w: Witness) {
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    fn max_metric(&mut self, name: &str, value: f64) {
        let e = self.metrics.entry(name.to_string()).or_insert(f64::NEG_INFINITY);
        if value > *e || value.is_nan() {
            *e = value;
        }
    }

    fn add_metric(&mut self, name: &str, value: f64) {
        *self.metrics.entry(name.to_string()).or_insert(0.0) += value;
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(mut self) -> Report {
        // margins (negative violations) stay in the metrics
        let max_violation = match self.worst.max_or_zero() {
            v if v < 0.0 => 0.0,
            v => v,
        };
        let pass = max_violation <= self.tolerance;
        if let Some(w) = self.worst.witness.take() {
            if max_violation > 0.0 || !pass {
                self.witnesses.insert(0, w);
                self.witnesses.truncate(MAX_WITNESSES);
            }
        }
        Report {
            suite: self.suite.to_string(),
            seed: self.seed,
            dims: self.dims,
            trials: self.trials,
            pass,
            max_violation,
            tolerance: self.tolerance,
            witnesses: self.witnesses,
            metrics: self.metrics,
            notes: self.notes,
        }
    }
}

/// Runs one suite and, when `out_dir` is set, writes `<suite>.json` there.
pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<SuiteResult> {
    cfg.validate()?;
    let start = Instant::now();
    let report = match name {
        "rank-one-psr" => pseudo::rank_one_psr(cfg)?,
        "pseudo-properties" => pseudo::pseudo_properties(cfg)?,
        "lwq" => numrange::lwq(cfg)?,
        "hausdorff" => numrange::hausdorff(cfg)?,
        "midpoint" => numrange::midpoint(cfg)?,
        "classify-c" => numrange::classify_c(cfg)?,
        "axioms" => preserver::axioms(cfg)?,
        "zero-product" => preserver::zero_product(cfg)?,
        "invariance" => preserver::invariance(cfg)?,
        "norm-identity" => preserver::norm_identity(cfg)?,
        "orthogonality" => preserver::orthogonality(cfg)?,
        "shift-demo" => preserver::shift_demo(cfg)?,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unknown suite {name:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    let runtime = start.elapsed().as_secs_f64();
    let mut artifacts = Vec::new();
    if let Some(dir) = &cfg.out_dir {
        artifacts.push(write_report(dir, &report)?);
    }
    Ok(SuiteResult {
        suite: report.suite.clone(),
        pass: report.pass,
        max_violation: report.max_violation,
        runtime,
        artifacts,
        report,
    })
}

fn write_report(dir: &Path, report: &Report) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.json", report.suite));
    std::fs::write(&path, report.to_json() + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_suite("nope", &RunConfig::new(1)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::new(1);
        cfg.dims = Some(vec![3, 2]);
        assert!(cfg.validate().is_err());
        cfg.dims = Some(vec![3]);
        cfg.trials = Some(0);
        assert!(cfg.validate().is_err());
        cfg.trials = Some(1);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn builder_pass_follows_tolerance() {
        let cfg = RunConfig::new(0);
        let mut b = Builder::new("x", &cfg, vec![3], 1, 1e-6);
        b.violation(5e-7, || Witness::new("w", 5e-7, ""));
        let r = b.finish();
        assert!(r.pass && r.max_violation == 5e-7);
        let mut b = Builder::new("x", &cfg, vec![3], 1, 0.0);
        b.failures(2, || Witness::new("w", 2.0, ""));
        let r = b.finish();
        assert!(!r.pass && r.witnesses.len() == 1);
    }
}
