//! Machine-readable pass/fail reports emitted by the verification suites.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one verification suite.
///
/// `trials` is the requested number of random trials (0 for exhaustive
/// suites), `checked` the number of individual identities or candidates
/// actually covered.  On failure `counterexample` carries a full
/// serialization of the offending operands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub status: Status,
    pub trials: u64,
    pub checked: u64,
    pub seed: Option<u64>,
    pub counterexample: Option<serde_json::Value>,
}

impl CheckReport {
    pub fn pass(suite: impl Into<String>, trials: u64, checked: u64, seed: Option<u64>) -> Self {
        CheckReport {
            suite: suite.into(),
            status: Status::Pass,
            trials,
            checked,
            seed,
            counterexample: None,
        }
    }

    pub fn fail(
        suite: impl Into<String>,
        trials: u64,
        checked: u64,
        seed: Option<u64>,
        counterexample: serde_json::Value,
    ) -> Self {
        CheckReport {
            suite: suite.into(),
            status: Status::Fail,
            trials,
            checked,
            seed,
            counterexample: Some(counterexample),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Folds several suite reports into one, keeping the first failure.
    pub fn merge(suite: impl Into<String>, parts: &[CheckReport]) -> Self {
        let mut out = CheckReport::pass(
            suite,
            parts.iter().map(|r| r.trials).sum(),
            parts.iter().map(|r| r.checked).sum(),
            parts.iter().find_map(|r| r.seed),
        );
        for part in parts {
            if !part.passed() && out.counterexample.is_none() {
                out.status = Status::Fail;
                out.counterexample = Some(serde_json::json!({
                    "suite": part.suite,
                    "witness": part.counterexample,
                }));
            }
        }
        out
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
        };
        write!(f, "{}: {} (checked {})", self.suite, status, self.checked)
    }
}
