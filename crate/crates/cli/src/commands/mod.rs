pub mod expand;
pub mod experiment;
pub mod verify;
pub mod zeros;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::report::Row;

/// One checked identity.
pub fn check_row(suite: &str, anchor: &str, parameters: Value, passed: bool, residual: Option<f64>, tolerance: Option<f64>) -> Row {
    let mut r = Row::new();
    r.insert("suite".into(), json!(suite));
    r.insert("identity".into(), json!(anchor));
    r.insert("parameters".into(), parameters);
    r.insert("status".into(), json!(if passed { "pass" } else { "fail" }));
    r.insert("residual".into(), residual.map_or(Value::Null, |v| json!(v)));
    r.insert("tolerance".into(), tolerance.map_or(Value::Null, |v| json!(v)));
    r
}

pub fn cjson(v: Complex64) -> Value {
    json!([v.re, v.im])
}

pub fn point_string(z: &[Complex64]) -> String {
    z.iter().map(|c| format!("{}{:+}i", c.re, c.im)).collect::<Vec<_>>().join(";")
}
