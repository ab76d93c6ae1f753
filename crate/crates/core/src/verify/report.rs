use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Direction in which a residual is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Pass when the worst (largest) value is at most the tolerance.
    AtMost,
    /// Pass when the worst (smallest) value is at least the tolerance.
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The claim is known not to hold for these inputs and indeed fails.
    ExpectedFail,
    /// A hypothesis of the claim is violated; nothing was measured.
    Skipped,
}

/// One asserted check aggregated over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub anchor: String,
    /// Worst value over the grid in the direction of `bound`.
    pub residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub status: CheckStatus,
    pub pass: bool,
    pub samples: usize,
    pub worst_point: Option<Vec<f64>>,
    pub note: Option<String>,
}

impl CheckResult {
    /// Aggregates `(value, point)` samples; NaN values count as failures.
    pub fn aggregate(
        name: &str,
        anchor: &str,
        bound: Bound,
        tolerance: f64,
        samples: &[(f64, Vec<f64>)],
    ) -> Self {
        let mut worst: Option<&(f64, Vec<f64>)> = None;
        for s in samples {
            let better = match worst {
                None => true,
                Some(w) if s.0.is_nan() => !w.0.is_nan(),
                Some(w) => match bound {
                    Bound::AtMost => s.0 > w.0,
                    Bound::AtLeast => s.0 < w.0,
                },
            };
            if better {
                worst = Some(s);
            }
        }
        let residual = worst.map_or(f64::NAN, |w| w.0);
        let pass = match bound {
            Bound::AtMost => residual <= tolerance,
            Bound::AtLeast => residual >= tolerance,
        };
        Self {
            name: name.into(),
            anchor: anchor.into(),
            residual,
            tolerance,
            bound,
            status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
            pass,
            samples: samples.len(),
            worst_point: worst.map(|w| w.1.clone()),
            note: None,
        }
    }

    /// A check whose hypothesis does not hold.
    pub fn skipped(name: &str, anchor: &str, bound: Bound, tolerance: f64, reason: String) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            residual: f64::NAN,
            tolerance,
            bound,
            status: CheckStatus::Skipped,
            pass: false,
            samples: 0,
            worst_point: None,
            note: Some(reason),
        }
    }

    /// Marks a failing check as expected; it then counts as passing.
    pub fn expect_failure(mut self, reason: &str) -> Self {
        if !self.pass {
            self.status = CheckStatus::ExpectedFail;
            self.pass = true;
        }
        self.note = Some(reason.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A recorded quantity that is deliberately not asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub anchor: String,
    pub value: f64,
    pub note: String,
    pub detail: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GridMetadata {
    pub counts: Vec<usize>,
    pub ranges: Vec<(f64, f64)>,
    pub jitter: f64,
    pub seed: u64,
    pub evaluated: usize,
    pub excluded: usize,
}

/// Outcome of a scenario. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
    pub informational: Vec<Measurement>,
    pub grids: Vec<GridMetadata>,
}

impl VerificationReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            pass: true,
            checks: Vec::new(),
            informational: Vec::new(),
            grids: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
        self.refresh();
    }

    pub fn inform(&mut self, m: Measurement) {
        self.informational.push(m);
    }

    /// Appends the checks, measurements and grids of `other`.
    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.informational.extend(other.informational);
        self.grids.extend(other.grids);
        self.refresh();
    }

    /// Prefixes every check and measurement name with `prefix/`.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for c in &mut self.checks {
            c.name = format!("{prefix}/{}", c.name);
        }
        for m in &mut self.informational {
            m.name = format!("{prefix}/{}", m.name);
        }
        self
    }

    fn refresh(&mut self) {
        self.pass = self.checks.iter().all(|c| c.pass);
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
