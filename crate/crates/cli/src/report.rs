use std::fmt::Write as _;

use qudit_gates::rational::{exact_decimal, Rational};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// A measured value compared against its expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// `measured` as a dyadic fraction, when it is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl Check {
    pub fn within(name: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        let ok = (measured - expected).abs() <= tolerance;
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            expected,
            tolerance,
            exact: None,
        }
    }

    /// Like [`Check::within`], also recording the exact fraction.
    pub fn probability(name: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            exact: Rational::dyadic(measured, 1e-12).map(|r| r.to_string()),
            ..Self::within(name, measured, expected, tolerance)
        }
    }

    pub fn count(name: &str, measured: usize, expected: usize) -> Self {
        Self::within(name, measured as f64, expected as f64, 0.0)
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Self::count(name, usize::from(ok), 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<f64>,
}

impl Report {
    pub fn new(command: String, checks: Vec<Check>, results: Value) -> Self {
        let status = if checks.iter().all(|c| c.status == Status::Pass) {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            command,
            status,
            checks,
            results,
            duration_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check", "status", "measured", "expected", "tolerance", "exact"])?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                status_word(c.status).to_string(),
                exact_decimal(c.measured),
                exact_decimal(c.expected),
                fmt_tol(c.tolerance),
                c.exact.clone().unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.command, status_word(self.status).to_uppercase());
        for c in &self.checks {
            let exact = c.exact.as_deref().map(|e| format!(" ({e})")).unwrap_or_default();
            let _ = writeln!(
                out,
                "  [{}] {}: {}{exact} vs {} (tol {})",
                status_word(c.status),
                c.name,
                exact_decimal(c.measured),
                exact_decimal(c.expected),
                fmt_tol(c.tolerance)
            );
        }
        if let Value::Object(map) = &self.results {
            for (k, v) in map {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        if let Some(ms) = self.duration_ms {
            let _ = writeln!(out, "  duration = {ms:.3} ms");
        }
        out
    }
}

fn fmt_tol(t: f64) -> String {
    if t == 0.0 {
        "0".into()
    } else {
        format!("{t:e}")
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
    }
}

/// A probability as its float value, exact decimal text and fraction.
pub fn probability_value(p: f64) -> Value {
    serde_json::json!({
        "value": p,
        "decimal": exact_decimal(p),
        "exact": Rational::dyadic(p, 1e-12).map(|r| r.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_is_conjunction() {
        let ok = Check::within("a", 1.0, 1.0, 0.0);
        let bad = Check::within("b", 1.5, 1.0, 0.1);
        assert!(Report::new("x".into(), vec![ok.clone()], Value::Null).passed());
        assert!(!Report::new("x".into(), vec![ok, bad], Value::Null).passed());
        assert!(Report::new("x".into(), vec![], Value::Null).passed());
    }

    #[test]
    fn probability_check_records_fraction() {
        let c = Check::probability("p", 0.125 + 1e-17, 0.125, 1e-9);
        assert_eq!(c.exact.as_deref(), Some("1/8"));
        assert_eq!(c.status, Status::Pass);
        assert_eq!(Check::probability("p", 0.3, 0.3, 0.0).exact, None);
    }

    #[test]
    fn csv_lists_checks() {
        let r = Report::new(
            "cost --qubits 3".into(),
            vec![Check::count("two-site gates", 3, 3)],
            Value::Null,
        );
        let text = r.to_csv().unwrap();
        assert_eq!(
            text,
            "check,status,measured,expected,tolerance,exact\ntwo-site gates,pass,3,3,0,\n"
        );
    }
}
