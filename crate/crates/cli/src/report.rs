//! JSON rendering. Every expression is emitted as a string in the chart's
//! own variable names, and every object uses sorted keys, so equal inputs
//! give byte-identical reports.

use std::collections::BTreeMap;

use num_rational::BigRational;
use projconf::Tensor;
use serde_json::{json, Map, Value};
use symkernel::{Chart, Expr};

pub fn expr(chart: &Chart, e: &Expr) -> Value {
    Value::String(chart.render(e))
}

pub fn exprs(chart: &Chart, es: &[Expr]) -> Value {
    Value::Array(es.iter().map(|e| expr(chart, e)).collect())
}

pub fn rational(q: &BigRational) -> Value {
    Value::String(q.to_string())
}

pub fn rationals(qs: &[BigRational]) -> Value {
    Value::Array(qs.iter().map(rational).collect())
}

/// Nested arrays, outermost index first; a scalar becomes a bare string.
pub fn tensor(t: &Tensor) -> Value {
    fn level(t: &Tensor, prefix: &mut Vec<usize>) -> Value {
        if prefix.len() == t.rank() {
            return expr(t.chart(), t.get(prefix));
        }
        let items = (0..t.dim())
            .map(|i| {
                prefix.push(i);
                let v = level(t, prefix);
                prefix.pop();
                v
            })
            .collect();
        Value::Array(items)
    }
    level(t, &mut Vec::new())
}

/// A residual: whether it vanishes, and the tensor itself.
pub fn residual(t: &Tensor) -> Value {
    json!({ "zero": t.is_zero(), "components": tensor(t) })
}

/// Whether a command's headline property held.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Fails => 2,
        }
    }
}

pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub records: Map<String, Value>,
    pub verdict: Verdict,
    /// Milliseconds per analysis; only present when requested.
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut top = Map::new();
        top.insert("tool".into(), json!("projconf"));
        top.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        top.insert("command".into(), json!(self.command));
        top.insert("input_digest".into(), json!(self.input_digest));
        top.insert("verdict".into(), json!(if self.verdict == Verdict::Holds { "holds" } else { "fails" }));
        top.insert("records".into(), Value::Object(self.records.clone()));
        if let Some(t) = &self.timings {
            top.insert("timings_ms".into(), json!(t));
        }
        let mut s = String::new();
        layout(&Value::Object(top), 0, &mut s);
        s.push('\n');
        s
    }
}

/// Objects one key per line; arrays inline unless they hold objects, so a
/// tensor stays on a single line.
fn layout(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    let compact = |v: &Value| serde_json::to_string(v).expect("JSON values always serialize");
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&compact(&Value::String(k.clone())));
                out.push_str(": ");
                layout(item, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                layout(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        other => out.push_str(&compact(other)),
    }
}
