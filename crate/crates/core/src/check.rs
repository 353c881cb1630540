use serde::Serialize;
use serde_json::Value;

/// Outcome of one named verification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub counterexample: Option<Value>,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckResult { name: name.into(), pass: true, counterexample: None }
    }

    pub fn fail(name: impl Into<String>, counterexample: Value) -> Self {
        CheckResult { name: name.into(), pass: false, counterexample: Some(counterexample) }
    }

    /// Pass unless a counterexample was found.
    pub fn from_counterexample(name: impl Into<String>, counterexample: Option<Value>) -> Self {
        match counterexample {
            None => Self::pass(name),
            Some(c) => Self::fail(name, c),
        }
    }
}
