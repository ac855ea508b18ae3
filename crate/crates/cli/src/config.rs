//! Experiment configuration documents (JSON, `schema_version` 1).

use std::fs;
use std::path::{Path, PathBuf};

use levyito_core::recover::RecoveryConfig;
use levyito_core::simulate::SimConfig;
use serde::{Deserialize, Serialize};

use crate::checks::REGISTRY;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Full paths up to this many replicates in `auto` mode; terminal values above.
pub const FULL_PATH_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathOutput {
    #[default]
    Auto,
    Full,
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpFunction {
    /// `f(x) = x₁`
    #[default]
    Identity,
    /// `f(x) = 1`
    One,
    /// `f(x) = |x|²`
    Square,
}

impl JumpFunction {
    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            JumpFunction::Identity => x[0],
            JumpFunction::One => 1.0,
            JumpFunction::Square => x.iter().map(|v| v * v).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckParams {
    /// Evaluation time; the horizon when absent.
    pub time: Option<f64>,
    /// ECF test points, applied along each coordinate axis.
    pub u_points: Vec<f64>,
    /// Factorization grid for the independence checks.
    pub pair_u_points: Vec<f64>,
    /// Region for counts, moments, covariance and the strong Markov restart.
    pub region: String,
    pub first_region: String,
    pub second_region: String,
    pub jump_function: JumpFunction,
    /// Restart lag `s` of the strong Markov check.
    pub lag: f64,
    /// Martingale check: `u` along the first axis and the earlier time `s`
    /// (half the evaluation time when absent; must be a grid time).
    pub martingale_u: f64,
    pub martingale_s: Option<f64>,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self {
            time: None,
            u_points: (-10..=10).map(|k| f64::from(k) * 0.5).collect(),
            pair_u_points: (-2..=2).map(f64::from).collect(),
            region: "|x| in [1,inf)".into(),
            first_region: "[1,inf)".into(),
            second_region: "(-inf,-1]".into(),
            jump_function: JumpFunction::Identity,
            lag: 0.5,
            martingale_u: 1.0,
            martingale_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Triplet document; relative paths resolve against the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triplet: Option<PathBuf>,
    /// Tabulated exponent for `recover`: CSV with header `u,re,im`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_table: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimConfig<f64>>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub check_params: CheckParams,
    #[serde(default)]
    pub recovery: RecoveryConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub path_output: PathOutput,
}

fn default_replicates() -> usize {
    1
}

/// Command-line values that override the document.
#[derive(Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub checks: Option<String>,
    pub replicates: Option<usize>,
}

#[derive(Debug)]
pub struct Loaded {
    pub config: ExperimentConfig,
    pub base: PathBuf,
}

impl Loaded {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn output_dir(&self) -> CliResult<PathBuf> {
        self.config
            .output_dir
            .as_deref()
            .map(|p| self.resolve(p))
            .ok_or_else(|| CliError::usage("no output directory: pass --out or set output_dir"))
    }
}

pub fn load(path: &Path, o: Overrides) -> CliResult<Loaded> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("config {}: {e}", path.display())))?;
    if config.schema_version != SCHEMA_VERSION {
        return Err(CliError::data(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            config.schema_version
        )));
    }
    let cwd = std::env::current_dir().map_err(|e| CliError::usage(e.to_string()))?;
    let base = path.parent().map_or_else(|| cwd.clone(), |p| cwd.join(p));
    if let Some(s) = o.seed {
        config.seed = s;
    }
    if let Some(n) = o.replicates {
        config.replicates = n;
    }
    if let Some(c) = o.checks {
        config.checks = c.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    }
    if let Some(out) = o.out {
        // flag paths are relative to the working directory
        config.output_dir = Some(cwd.join(out));
    }
    if config.replicates == 0 {
        return Err(CliError::usage("replicates must be at least 1"));
    }
    for c in &config.checks {
        if !REGISTRY.iter().any(|(name, _)| name == c) {
            let names: Vec<&str> = REGISTRY.iter().map(|(n, _)| *n).collect();
            return Err(CliError::usage(format!(
                "unknown check '{c}'; available: {}",
                names.join(", ")
            )));
        }
    }
    let loaded = Loaded { config, base };
    for p in [&loaded.config.triplet, &loaded.config.psi_table].into_iter().flatten() {
        let full = loaded.resolve(p);
        if !full.is_file() {
            return Err(CliError::usage(format!("referenced file {} does not exist", full.display())));
        }
    }
    Ok(loaded)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, text: &str) -> PathBuf {
        let p = dir.join("c.json");
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn defaults_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), r#"{"schema_version":1,"seed":4}"#);
        let l = load(&p, Overrides::default()).unwrap();
        assert_eq!(l.config.seed, 4);
        assert_eq!(l.config.replicates, 1);
        assert_eq!(l.config.check_params.u_points.len(), 21);
        let l = load(
            &p,
            Overrides {
                seed: Some(9),
                checks: Some("ecf, strong_markov".into()),
                replicates: Some(10),
                out: None,
            },
        )
        .unwrap();
        assert_eq!(l.config.seed, 9);
        assert_eq!(l.config.checks, ["ecf", "strong_markov"]);
        assert_eq!(l.config.replicates, 10);
    }

    #[test]
    fn fail_closed() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), r#"{"schema_version":1,"check_params":{"lagg":1.0}}"#);
        assert_eq!(load(&p, Overrides::default()).unwrap_err().code, crate::error::EXIT_DATA);
        let p = write(dir.path(), r#"{"schema_version":1,"replicates":0}"#);
        assert_eq!(load(&p, Overrides::default()).unwrap_err().code, crate::error::EXIT_USAGE);
    }
}
