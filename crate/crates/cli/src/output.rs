use hecke_core::chebyshev_moments::ScaledValue;
use hecke_core::exact_arith::{BigInt, Rat};
use serde_json::{json, Map, Value};

/// Bumped whenever a payload shape changes.
pub const SCHEMA_VERSION: &str = "1";

fn versions() -> Value {
    json!({"tool": env!("CARGO_PKG_VERSION"), "schema": SCHEMA_VERSION})
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn envelope(command: &str, params: &Map<String, Value>, result: Value) -> String {
    canonical(&json!({
        "command": command,
        "params": params,
        "result": result,
        "versions": versions(),
    }))
}

pub fn error_envelope(command: &str, params: &Map<String, Value>, reason: &str, message: &str) -> String {
    canonical(&json!({
        "command": command,
        "params": params,
        "error": {"reason": reason, "message": message},
        "versions": versions(),
    }))
}

pub fn big(v: &BigInt) -> Value {
    Value::String(v.to_string())
}

pub fn rat(v: &Rat) -> Value {
    json!({"num": v.numer().to_string(), "den": v.denom().to_string()})
}

pub fn rat_text(v: &Rat) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// `{"int", "scale", "log2_scale_num", "float", "float_error"}` for `int / prod p^(h/2)`;
/// `log2_scale_num` is `log2` of the divisor.
pub fn scaled(v: &ScaledValue) -> Value {
    let (f, err) = v.to_f64_with_error();
    json!({
        "int": v.int.to_string(),
        "scale": v.scale.iter().map(|&(p, h)| json!([p, h])).collect::<Vec<_>>(),
        "log2_scale_num": v.log2_scale() / 2.0,
        "float": f,
        "float_error": err,
    })
}

/// A flat table for CSV output.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
    }
}
