use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Not enough data to decide; distinct from failure.
    Inconclusive,
}

/// One tested statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub statistic: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Component {
    /// Passes iff `|statistic − expected| ≤ tolerance`.
    pub fn band(name: impl Into<String>, statistic: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            expected,
            tolerance,
            pass: (statistic - expected).abs() <= tolerance,
        }
    }

    /// Passes iff `statistic ≥ threshold` (p-values, retained fractions).
    pub fn at_least(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            expected: threshold,
            tolerance: 0.0,
            pass: statistic >= threshold,
        }
    }

    fn severity(&self) -> f64 {
        if self.tolerance > 0.0 {
            (self.statistic - self.expected).abs() / self.tolerance
        } else if self.pass {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Outcome of one check. The headline `statistic`, `expected` and
/// `tolerance` are those of the worst component; `pass` requires every
/// component to pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub statistic: f64,
    pub expected: f64,
    pub tolerance: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: Option<u64>,
    pub pass: bool,
    pub status: CheckStatus,
    /// How the tolerance was derived and what passing means.
    pub rule: String,
    pub components: Vec<Component>,
}

impl CheckReport {
    pub fn from_components(
        check: impl Into<String>,
        n: usize,
        seed: Option<u64>,
        rule: impl Into<String>,
        components: Vec<Component>,
    ) -> Self {
        let worst = components
            .iter()
            .max_by(|a, b| a.severity().total_cmp(&b.severity()))
            .cloned();
        let pass = components.iter().all(|c| c.pass);
        let (statistic, expected, tolerance) = worst
            .map(|c| (c.statistic, c.expected, c.tolerance))
            .unwrap_or((0.0, 0.0, 0.0));
        Self {
            check: check.into(),
            statistic,
            expected,
            tolerance,
            n,
            seed,
            pass,
            status: if pass {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            rule: rule.into(),
            components,
        }
    }

    pub fn inconclusive(mut self, reason: &str) -> Self {
        self.pass = false;
        self.status = CheckStatus::Inconclusive;
        self.rule = format!("{}; inconclusive: {reason}", self.rule);
        self
    }

    /// Stable JSON array for CI diffing.
    pub fn to_json_array(reports: &[CheckReport]) -> String {
        serde_json::to_string_pretty(reports).expect("reports always serialize")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inconclusive => "INCONCLUSIVE",
        };
        write!(
            f,
            "{tag} {}: statistic {:.6} vs expected {:.6} (tolerance {:.6}, N = {})",
            self.check, self.statistic, self.expected, self.tolerance, self.n
        )
    }
}
