//! Command reports: a list of identity checks plus titled sections of exact
//! values, rendered as text or as JSON.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CheckResult;
use crate::jets::scalar::render;
use crate::jets::{GaussianRational, Jet, JetMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub label: String,
    /// Exact value: a Gaussian rational or a polynomial in `x1..xn`.
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section {
            title: title.into(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, label: impl Into<String>, value: impl Into<String>) {
        self.entries.push(Entry {
            label: label.into(),
            value: value.into(),
        });
    }

    pub fn scalar(&mut self, label: impl Into<String>, value: &GaussianRational) {
        self.push(label, render(value));
    }

    pub fn jet(&mut self, label: impl Into<String>, value: &Jet) {
        self.push(label, value.to_poly_string());
    }

    /// Upper-triangular components of an antisymmetric matrix, skipping zeros.
    pub fn two_form(&mut self, name: &str, m: &JetMatrix) {
        for k in 0..m.rows() {
            for l in (k + 1)..m.cols() {
                if !m.get(k, l).is_zero() {
                    self.jet(format!("{name}[{}][{}]", k + 1, l + 1), m.get(k, l));
                }
            }
        }
    }

    pub fn base_matrix(&mut self, name: &str, m: &[Vec<GaussianRational>]) {
        for (k, row) in m.iter().enumerate() {
            for (l, v) in row.iter().enumerate().skip(k + 1) {
                self.scalar(format!("{name}[{}][{}](0)", k + 1, l + 1), v);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub exit_code: i32,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::MalformedInput(_) => "malformed_input",
            Error::Shape(_) => "shape",
            Error::Degeneracy { .. } => "degeneracy",
            Error::InvalidGeometry { .. } => "invalid_geometry",
            Error::InternalConsistency { .. } => "internal_consistency",
            Error::Order { .. } => "order",
            Error::Grading(_) => "grading",
            Error::Divisibility(_) => "divisibility",
            Error::Syntax { .. } => "syntax",
            Error::VariableIndex { .. } => "variable_index",
            Error::Io(_) => "io",
        };
        ErrorInfo {
            kind: kind.into(),
            exit_code: e.exit_code(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jet_order: Option<u32>,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub sections: Vec<Section>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            chart: None,
            jet_order: None,
            passed: true,
            checks: Vec::new(),
            sections: Vec::new(),
            error: None,
        }
    }

    pub fn check(&mut self, c: CheckResult) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn checks(&mut self, cs: impl IntoIterator<Item = CheckResult>) {
        for c in cs {
            self.check(c);
        }
    }

    pub fn fail(&mut self, e: &Error) {
        self.passed = false;
        self.error = Some(e.into());
    }

    /// 0 pass, 1 failed check, 2 bad input, 3 internal inconsistency.
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) => e.exit_code,
            None if self.passed => 0,
            None => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "akdq {}", self.command);
        if let Some(chart) = &self.chart {
            let _ = write!(s, ": {chart}");
        }
        if let Some(k) = self.jet_order {
            let _ = write!(s, " (jet order {k})");
        }
        s.push('\n');
        for c in &self.checks {
            let _ = write!(s, "[{}] {}", if c.passed { "pass" } else { "FAIL" }, c.identity);
            if let Some(w) = &c.witness {
                let _ = write!(s, "  -- {w}");
            }
            s.push('\n');
        }
        for section in &self.sections {
            let _ = writeln!(s, "== {} ==", section.title);
            for e in &section.entries {
                let _ = writeln!(s, "{} = {}", e.label, e.value);
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "error ({}): {}", e.kind, e.message);
        }
        let verdict = if self.passed { "pass" } else { "fail" };
        let _ = writeln!(s, "verdict: {verdict}");
        s
    }
}
