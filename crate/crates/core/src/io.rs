//! JSON documents: matrix input and report output.
//!
//! Input is either `{"order": n, "entries": [[[re, im], ...], ...]}` or
//! `{"jordan": ...}` where the Jordan part is `{"blocks": [...]}` or a bare
//! block list. A block is `{"re", "im", "size"}`, `{"lambda", "size"}` or
//! `[lambda, size]`; a scalar `lambda` is either a number or `[re, im]`.
//!
//! Output floats are written with 17 significant digits and complex numbers
//! as `[re, im]` pairs, so equal values always print identically.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::classify::MatrixInput;
use crate::constructors::ApportionCertificate;
use crate::error::{Error, Result};
use crate::jordan::{JordanBlock, JordanSpec};
use crate::matrix::{ComplexMatrix, C64};
use crate::report::{Bounds, ClassificationReport, ConstantSet};
use crate::search::{SearchOutcome, SigmaReport};
use crate::uniform::UniformityReport;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(parse_err(format!("{what} is not finite")))
    }
}

fn number(v: &Value, what: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| parse_err(format!("{what} must be a number")))?;
    finite(x, what)
}

fn scalar(v: &Value, what: &str) -> Result<C64> {
    match v {
        Value::Number(_) => Ok(C64::new(number(v, what)?, 0.0)),
        Value::Array(p) if p.len() == 2 => Ok(C64::new(number(&p[0], what)?, number(&p[1], what)?)),
        _ => Err(parse_err(format!("{what} must be a number or an [re, im] pair"))),
    }
}

fn size(v: &Value) -> Result<usize> {
    match v.as_u64() {
        Some(k) if k >= 1 => Ok(k as usize),
        _ => Err(parse_err("block size must be a positive integer")),
    }
}

fn block(v: &Value) -> Result<JordanBlock> {
    match v {
        Value::Array(p) if p.len() == 2 => Ok(JordanBlock::new(scalar(&p[0], "eigenvalue")?, size(&p[1])?)),
        Value::Object(o) => {
            let k = size(o.get("size").ok_or_else(|| parse_err("block without size"))?)?;
            let lambda = if let Some(l) = o.get("lambda") {
                scalar(l, "eigenvalue")?
            } else {
                let re = o.get("re").map(|x| number(x, "re")).transpose()?.unwrap_or(0.0);
                let im = o.get("im").map(|x| number(x, "im")).transpose()?.unwrap_or(0.0);
                C64::new(re, im)
            };
            Ok(JordanBlock::new(lambda, k))
        }
        _ => Err(parse_err("Jordan block must be [lambda, size] or an object")),
    }
}

pub fn parse_jordan(v: &Value) -> Result<JordanSpec> {
    let list = match v {
        Value::Array(list) => list,
        Value::Object(o) => o
            .get("blocks")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("jordan object needs a \"blocks\" array"))?,
        _ => return Err(parse_err("jordan must be a block list or {\"blocks\": [...]}")),
    };
    let blocks = list.iter().map(block).collect::<Result<Vec<_>>>()?;
    JordanSpec::new(blocks).map_err(|e| parse_err(e.to_string()))
}

pub fn parse_entries(v: &Value, order: Option<usize>) -> Result<ComplexMatrix> {
    let rows = v.as_array().ok_or_else(|| parse_err("entries must be an array of rows"))?;
    let n = rows.len();
    if n == 0 {
        return Err(parse_err("entries is empty"));
    }
    if let Some(k) = order {
        if k != n {
            return Err(parse_err(format!("order {k} does not match {n} rows")));
        }
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| parse_err(format!("row {i} is not an array")))?;
        if row.len() != n {
            return Err(parse_err(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        for x in row {
            data.push(scalar(x, "entry")?);
        }
    }
    ComplexMatrix::new(n, n, data).map_err(|e| parse_err(e.to_string()))
}

/// Parses a matrix document from already decoded JSON.
pub fn document_from_value(v: &Value) -> Result<MatrixInput> {
    let o = v.as_object().ok_or_else(|| parse_err("document must be a JSON object"))?;
    let order = match o.get("order") {
        None => None,
        Some(x) => Some(x.as_u64().filter(|&k| k >= 1).ok_or_else(|| parse_err("order must be a positive integer"))?
            as usize),
    };
    match (o.get("entries"), o.get("jordan")) {
        (Some(e), None) => Ok(MatrixInput::Entries(parse_entries(e, order)?)),
        (None, Some(j)) => {
            let spec = parse_jordan(j)?;
            if let Some(k) = order {
                if k != spec.order() {
                    return Err(parse_err(format!("order {k} does not match Jordan order {}", spec.order())));
                }
            }
            Ok(MatrixInput::Jordan(spec))
        }
        (Some(_), Some(_)) => Err(parse_err("document has both \"entries\" and \"jordan\"")),
        (None, None) => Err(parse_err("document needs \"entries\" or \"jordan\"")),
    }
}

pub fn parse_document(text: &str) -> Result<MatrixInput> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    document_from_value(&v)
}

pub fn complex_value(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_value(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).into_iter().map(complex_value).collect())).collect())
}

/// A matrix as an input document, so it can be fed back in.
pub fn matrix_document(m: &ComplexMatrix) -> Value {
    json!({ "order": m.rows(), "entries": matrix_value(m) })
}

pub fn spec_value(spec: &JordanSpec) -> Value {
    Value::Array(spec.blocks().iter().map(|b| json!([complex_value(b.lambda), b.size])).collect())
}

pub fn constants_value(set: &ConstantSet) -> Value {
    let mut o = Map::new();
    o.insert("kind".into(), json!(set.kind()));
    o.insert("form".into(), json!(set.to_string()));
    o.insert("exact".into(), json!(set.is_exact()));
    match set {
        ConstantSet::OpenHalfLine(lo)
        | ConstantSet::ClosedHalfLine(lo)
        | ConstantSet::SupersetOfOpenHalfLine(lo)
        | ConstantSet::SupersetOfClosedHalfLine(lo) => {
            o.insert("lower".into(), json!(lo));
        }
        ConstantSet::FiniteSet(v) | ConstantSet::SupersetOfFinite(v) => {
            o.insert("values".into(), json!(v));
        }
        ConstantSet::Unknown { lower_bound } => {
            o.insert("lower_bound".into(), json!(lower_bound));
        }
        ConstantSet::ZeroOnly => {
            o.insert("values".into(), json!([0.0]));
        }
        ConstantSet::Empty => {}
    }
    Value::Object(o)
}

pub fn bounds_value(b: &Bounds) -> Value {
    json!({ "trace": b.trace, "hadamard": b.hadamard, "max": b.max() })
}

pub fn certificate_value(c: &ApportionCertificate) -> Value {
    json!({
        "theorem_tag": c.theorem_tag.name(),
        "kappa": c.kappa,
        "M": matrix_value(&c.m),
        "Minv": matrix_value(&c.m_inv),
        "B": matrix_value(&c.b),
    })
}

pub fn uniformity_value(r: &UniformityReport) -> Value {
    json!({ "is_uniform": r.is_uniform, "kappa": r.kappa, "defect": r.defect })
}

pub fn report_value(r: &ClassificationReport) -> Value {
    json!({
        "verdict": format!("{:?}", r.verdict),
        "constants": constants_value(&r.constants),
        "theorem_tag": r.theorem_tag,
        "bounds": bounds_value(&r.bounds),
        "approximate_eigen": r.approximate_eigen,
        "jordan": r.spec.as_ref().map(spec_value),
        "certificate": r.certificate.as_ref().map(certificate_value),
    })
}

pub fn search_value(o: &SearchOutcome, transcript: bool) -> Value {
    let mut v = json!({
        "found": o.found,
        "best_defect": o.best_defect,
        "restarts_used": o.restarts_used,
        "certificate": o.certificate.as_ref().map(certificate_value),
    });
    if transcript {
        v["transcript"] = Value::Array(
            o.transcript
                .iter()
                .map(|r| {
                    json!({
                        "restart": r.restart,
                        "iterations": r.iterations,
                        "objective": r.objective,
                        "defect": r.defect,
                    })
                })
                .collect(),
        );
    }
    v
}

pub fn sigma_value(s: &SigmaReport, transcript: bool) -> Value {
    let steps = s
        .steps
        .iter()
        .map(|st| {
            json!({
                "m": st.m,
                "verdict": format!("{:?}", st.verdict),
                "source": format!("{:?}", st.source),
                "apportionable": st.apportionable,
                "search": st.outcome.as_ref().map(|o| search_value(o, transcript)),
            })
        })
        .collect();
    json!({
        "sigma_upper_empirical": s.sigma_upper_empirical,
        "sigma_theory_upper": s.sigma_theory_upper,
        "steps": Value::Array(steps),
    })
}

fn write_float(out: &mut String, x: f64) {
    if x.is_finite() {
        let _ = write!(out, "{x:.16e}");
    } else {
        out.push_str("null");
    }
}

fn is_leaf(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

// arrays of scalars, and arrays of those (matrix rows), stay on one line
fn inline(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| is_leaf(x) || matches!(x, Value::Array(b) if b.iter().all(is_leaf))),
        Value::Object(o) => o.is_empty(),
        _ => true,
    }
}

fn write_compact(out: &mut String, v: &Value) {
    match v {
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => {
                let _ = write!(out, "{u}");
            }
            (None, Some(i)) => {
                let _ = write!(out, "{i}");
            }
            _ => write_float(out, n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_compact(out, x);
            }
            out.push(']');
        }
        Value::Object(o) => {
            out.push('{');
            for (i, (k, x)) in o.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_compact(out, x);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

fn write_pretty(out: &mut String, v: &Value, depth: usize) {
    if inline(v) {
        write_compact(out, v);
        return;
    }
    let pad = "  ".repeat(depth + 1);
    match v {
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad);
                write_pretty(out, x, depth + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push(']');
        }
        Value::Object(o) => {
            out.push_str("{\n");
            for (i, (k, x)) in o.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_pretty(out, x, depth + 1);
                out.push_str(if i + 1 < o.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push('}');
        }
        _ => unreachable!(),
    }
}

/// Serializes with 17 significant digits for every float.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_pretty(&mut out, v, 0);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_forms() {
        let a = parse_document(r#"{"jordan": [[0, 2], [[1, -1], 1]]}"#).unwrap();
        let b = parse_document(r#"{"jordan": {"blocks": [{"re": 0, "im": 0, "size": 2}, {"lambda": [1, -1], "size": 1}]}}"#)
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.order(), 3);
    }

    #[test]
    fn entries() {
        let d = parse_document(r#"{"order": 2, "entries": [[[1,0],[0,0]],[[0,0],[-1,0]]]}"#).unwrap();
        assert_eq!(d, MatrixInput::Entries(ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])));
    }

    #[test]
    fn rejects() {
        for bad in [
            "{",
            "[]",
            r#"{}"#,
            r#"{"entries": [[[1,0]]], "jordan": [[1,1]]}"#,
            r#"{"order": 3, "entries": [[[1,0]]]}"#,
            r#"{"entries": [[[1,0],[0,0]]]}"#,
            r#"{"jordan": [[1, 0]]}"#,
            r#"{"entries": [["x"]]}"#,
        ] {
            assert!(matches!(parse_document(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn floats_round_trip() {
        let x = 0.1 + 0.2;
        let s = to_json_string(&json!({ "x": x, "m": matrix_value(&ComplexMatrix::diag(&[C64::new(x, -1e-300)])) }));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap().to_bits(), x.to_bits());
        assert_eq!(back["m"][0][0][1].as_f64().unwrap(), -1e-300);
        assert!(s.contains("3.0000000000000004e-1"));
    }

    #[test]
    fn document_round_trip() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 / 7.0, -(j as f64) / 3.0));
        let text = to_json_string(&matrix_document(&m));
        assert_eq!(parse_document(&text).unwrap(), MatrixInput::Entries(m));
    }
}
