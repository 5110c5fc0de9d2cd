use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::numerics::scalar::rational_to_f64;
use crate::numerics::Scalar;

/// Outcome of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The precondition did not hold, so no verdict on the conclusion.
    HypothesisFailed,
    /// Diagnostic run with no pass/fail semantics.
    Diagnostic,
}

/// One row of a Monte Carlo or sweep curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub parameter: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Structured evidence for an inequality check or an experiment.
///
/// Field order and map ordering are fixed so serialized reports are
/// byte-stable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub status: Status,
    pub summary: String,
    pub metrics: BTreeMap<String, Value>,
    pub violations: Vec<Value>,
    pub curve: Vec<CurvePoint>,
    pub caveats: Vec<String>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, status: Status, summary: impl Into<String>) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            status,
            summary: summary.into(),
            metrics: BTreeMap::new(),
            violations: Vec::new(),
            curve: Vec::new(),
            caveats: Vec::new(),
        }
    }

    pub fn metric(mut self, key: &str, value: impl Serialize) -> Self {
        self.metrics.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
        self
    }

    pub fn caveat(mut self, text: impl Into<String>) -> Self {
        self.caveats.push(text.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.metrics.get(key)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).and_then(Value::as_f64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV of the curve. The first line is a `#` comment carrying the
    /// precision of the numeric columns.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("# float64 columns, shortest round-trip decimal\n");
        out.push_str("parameter,estimate,stderr,n_samples,seed\n");
        for p in &self.curve {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                p.parameter, p.estimate, p.stderr, p.n_samples, p.seed
            );
        }
        out
    }
}

/// JSON view of a scalar: exact rationals as `"p/q"`, enclosures by center
/// and radius. `approx` is a float convenience copy.
pub fn scalar_json(x: &Scalar) -> Value {
    match x {
        Scalar::Exact(r) => json!({"exact": r.to_string(), "approx": rational_to_f64(r)}),
        Scalar::Guarded(g) => json!({
            "center": g.center_decimal(40),
            "radius": format!("{:e}", rational_to_f64(&g.radius())),
            "approx": g.to_f64(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_stable() {
        let r = ExperimentReport::new("x", Status::Pass, "ok")
            .metric("b", 2)
            .metric("a", 1.5);
        let s = r.to_json();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: ExperimentReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_header() {
        let mut r = ExperimentReport::new("m", Status::Diagnostic, "");
        r.curve.push(CurvePoint {
            parameter: 20.0,
            estimate: 0.5,
            stderr: 0.01,
            n_samples: 100,
            seed: 7,
        });
        let csv = r.curve_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], "parameter,estimate,stderr,n_samples,seed");
        assert_eq!(lines[2], "20,0.5,0.01,100,7");
    }
}
