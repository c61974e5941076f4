use serde::{Deserialize, Serialize};

/// Default tolerance on oriented slack.
pub const DEFAULT_TOL: f64 = 1e-8;

/// One evaluated inequality or identity.
///
/// `slack ≥ 0` means the inequality holds. Identities use
/// `slack = −|lhs − rhs|`. Slack is measured in units of
/// `max(1, |lhs|, |rhs|)`, so that checks on large spheres (where both sides
/// grow like `r^{n-2}`) are judged at the precision the arithmetic can carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub tol: f64,
}

fn scale(lhs: f64, rhs: f64) -> f64 {
    1f64.max(lhs.abs()).max(rhs.abs())
}

impl InequalityReport {
    /// Report for `lhs ≥ rhs`.
    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::from_slack(name, lhs, rhs, (lhs - rhs) / scale(lhs, rhs))
    }

    /// Report for the identity `lhs = rhs`.
    pub fn identity(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::from_slack(name, lhs, rhs, -(lhs - rhs).abs() / scale(lhs, rhs))
    }

    pub fn from_slack(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self { name: name.into(), lhs, rhs, slack, satisfied: slack >= -DEFAULT_TOL, tol: DEFAULT_TOL }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        // NaN slack never satisfies.
        self.satisfied = self.slack >= -tol;
        self
    }
}
