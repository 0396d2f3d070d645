//! Verification report records and witness helpers.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::exactnum::{decimal, fmt_rational, PerturbedRational, QuadraticNumber, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Analytic input that is cited rather than computed.
    Assumed,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Assumed => "assumed",
        })
    }
}

/// Field order is the serialized column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: String,
    pub status: Status,
    pub witness: Option<Value>,
    pub millis: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Exact value plus a decimal rendering.
pub fn w_rat(r: &Rational) -> Value {
    json!({ "exact": fmt_rational(r), "decimal": decimal(r, 12) })
}

pub fn w_pert(p: &PerturbedRational) -> Value {
    json!({ "exact": p.to_string(), "decimal": decimal(&p.base, 12) })
}

pub fn w_quad(q: &QuadraticNumber) -> Value {
    json!({ "exact": q.to_string(), "decimal": format!("{:.12}", q.to_f64()) })
}
