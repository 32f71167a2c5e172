//! Pass/fail reports shared by the verification routines.

use serde::Serialize;
use serde_json::Value;

/// Witnesses kept per report; further failures are only counted.
pub const MAX_WITNESSES: usize = 25;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub message: String,
    pub witness: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub kind: String,
    pub lambda: Option<Vec<usize>>,
    pub n: usize,
    pub checked: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    /// Check-specific extras such as counts or the compression factor.
    pub details: Value,
}

impl Report {
    pub fn new(kind: &str, lambda: Option<Vec<usize>>, n: usize) -> Self {
        Report {
            kind: kind.to_string(),
            lambda,
            n,
            checked: 0,
            failure_count: 0,
            failures: Vec::new(),
            details: Value::Object(Default::default()),
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn check(&mut self, ok: bool, message: impl FnOnce() -> String, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.fail(message(), witness());
        }
    }

    pub fn fail(&mut self, message: String, witness: Value) {
        self.failure_count += 1;
        if self.failures.len() < MAX_WITNESSES {
            self.failures.push(Failure { message, witness });
        }
    }

    pub fn set_detail(&mut self, key: &str, value: impl Serialize) {
        if let Value::Object(m) = &mut self.details {
            m.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        }
    }

    /// Folds another report's counts and witnesses into this one.
    pub fn absorb(&mut self, other: Report) {
        self.checked += other.checked;
        self.failure_count += other.failure_count;
        let room = MAX_WITNESSES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }

    /// One line: kind, instance, verdict, count.
    pub fn summary(&self) -> String {
        let inst = match &self.lambda {
            Some(l) => format!(" lambda=({}) n={}", join(l), self.n),
            None => format!(" n={}", self.n),
        };
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        format!("{}{}: {} ({} checks, {} failures)", self.kind, inst, verdict, self.checked, self.failure_count)
    }
}

pub(crate) fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
