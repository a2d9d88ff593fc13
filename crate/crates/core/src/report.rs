//! Machine-readable command reports.

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;

/// How a result value is compared against its tolerance.
#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `|value| <= tolerance`.
    AbsLe,
    /// `value <= tolerance`.
    Le,
    /// `value >= -tolerance`.
    Ge,
}

impl Criterion {
    pub fn holds(self, value: f64, tolerance: f64) -> bool {
        match self {
            Criterion::AbsLe => value.abs() <= tolerance,
            Criterion::Le => value <= tolerance,
            Criterion::Ge => value >= -tolerance,
        }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// Non-finite values serialize as `null` and never pass.
    pub value: f64,
    pub tolerance: f64,
    pub criterion: Criterion,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64, criterion: Criterion) -> Self {
        CheckResult {
            name: name.into(),
            value,
            tolerance,
            criterion,
            pass: value.is_finite() && criterion.holds(value, tolerance),
        }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        ErrorInfo {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub inputs: Value,
    pub results: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The schema reports conform to.
pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

impl Report {
    pub fn new(command: impl Into<String>, inputs: Value) -> Self {
        Report {
            command: command.into(),
            version: VERSION.to_string(),
            inputs,
            results: Vec::new(),
            data: Value::Null,
            error: None,
        }
    }

    pub fn push(&mut self, result: CheckResult) {
        self.results.push(result);
    }

    pub fn with_error(mut self, e: &Error) -> Self {
        self.error = Some(ErrorInfo::from(e));
        self
    }

    pub fn all_pass(&self) -> bool {
        self.error.is_none() && self.results.iter().all(|r| r.pass)
    }

    /// 0 if every result passes, 1 on a failed result, 2 on an error.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json_string(self)
    }
}
