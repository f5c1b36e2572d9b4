use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// Passed with the inequality attained (rigidity case).
    Equality,
    NotApplicable,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Equality => "EQUALITY",
            Status::NotApplicable => "NOT_APPLICABLE",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one named check. `FAIL` exactly when the violation exceeds
/// the tolerance (a NaN violation fails).
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub suite: String,
    pub check: String,
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub status: Status,
    pub max_violation: f64,
    pub tolerance: f64,
    pub samples: usize,
}

impl CheckReport {
    pub fn evaluate(
        suite: &str,
        check: &str,
        model: impl ToString,
        max_violation: f64,
        tolerance: f64,
        samples: usize,
    ) -> Self {
        let status = if max_violation <= tolerance { Status::Pass } else { Status::Fail };
        CheckReport {
            suite: suite.into(),
            check: check.into(),
            model: model.to_string(),
            params: BTreeMap::new(),
            status,
            max_violation,
            tolerance,
            samples,
        }
    }

    pub fn not_applicable(suite: &str, check: &str, model: impl ToString) -> Self {
        CheckReport {
            status: Status::NotApplicable,
            ..Self::evaluate(suite, check, model, 0.0, 0.0, 0)
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    /// Upgrades a pass to `EQUALITY`; failures stay failures.
    pub fn with_equality(mut self, attained: bool) -> Self {
        if attained && self.status == Status::Pass {
            self.status = Status::Equality;
        }
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}
