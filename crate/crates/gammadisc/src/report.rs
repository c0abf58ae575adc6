//! Structured pass/fail records for the verification drivers.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: CheckStatus,
    pub residual: f64,
    pub details: String,
}

/// An ordered list of named checks with residuals; global status is pass
/// iff no check failed. Residuals are always stored finite.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(
        &mut self,
        name: impl Into<String>,
        pass: bool,
        residual: f64,
        details: impl Into<String>,
    ) {
        let (status, residual) = if !residual.is_finite() {
            (CheckStatus::Fail, f64::MAX)
        } else if pass {
            (CheckStatus::Pass, residual)
        } else {
            (CheckStatus::Fail, residual)
        };
        self.checks.push(CheckRecord {
            name: name.into(),
            status,
            residual,
            details: details.into(),
        });
    }

    pub fn skip(&mut self, name: impl Into<String>, details: impl Into<String>) {
        self.checks.push(CheckRecord {
            name: name.into(),
            status: CheckStatus::Skipped,
            residual: 0.0,
            details: details.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .count()
    }

    pub fn find(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The same report with every check name prefixed, for merging suites.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for c in &mut self.checks {
            c.name = format!("{prefix}/{}", c.name);
        }
        self
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }
}
