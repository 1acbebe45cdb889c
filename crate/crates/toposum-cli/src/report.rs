//! The JSON report shape shared by every checking subcommand. Reals
//! travel as decimal strings tagged with their precision so no consumer
//! ever rounds them through a binary double.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use toposum::Real;

#[derive(Serialize)]
pub struct RealField {
    pub decimal: String,
    pub prec_bits: usize,
}

impl RealField {
    pub fn new(x: &Real) -> Self {
        RealField {
            decimal: x.to_decimal_string(),
            prec_bits: x.prec(),
        }
    }
}

#[derive(Serialize)]
pub struct CheckReport {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<RealField>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<RealField>,
    /// Exact value when the computation stayed rational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<String>,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckReport {
            name: name.to_string(),
            value: None,
            error_bound: None,
            rational: None,
            passed,
            detail,
        }
    }

    pub fn with_value(mut self, x: &Real) -> Self {
        self.value = Some(RealField::new(x));
        self
    }

    pub fn with_error_bound(mut self, x: &Real) -> Self {
        self.error_bound = Some(RealField::new(x));
        self
    }

    pub fn with_rational(mut self, s: String) -> Self {
        self.rational = Some(s);
        self
    }
}

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<&'static str, String>,
    pub results: Vec<CheckReport>,
    pub passed: bool,
    pub wall_ms: u128,
}

impl Report {
    pub fn new(command: &str) -> (Self, Instant) {
        (
            Report {
                command: command.to_string(),
                inputs: BTreeMap::new(),
                results: Vec::new(),
                passed: true,
                wall_ms: 0,
            },
            Instant::now(),
        )
    }

    pub fn input(&mut self, key: &'static str, value: impl ToString) {
        self.inputs.insert(key, value.to_string());
    }

    pub fn push(&mut self, check: CheckReport) {
        self.passed &= check.passed;
        self.results.push(check);
    }

    /// Stamp the clock and write the report to `path`, or stdout.
    pub fn emit(mut self, started: Instant, path: Option<&Path>) -> std::io::Result<bool> {
        self.wall_ms = started.elapsed().as_millis();
        let body = serde_json::to_string_pretty(&self).expect("report serialization");
        match path {
            Some(p) => std::fs::write(p, body + "\n")?,
            None => println!("{body}"),
        }
        Ok(self.passed)
    }
}
