//! JSON schemas for every artifact the CLI reads or writes. Integers are
//! emitted as JSON numbers when they fit 53 bits and as decimal strings
//! otherwise, so interchange is lossless in both directions.

use flasque_core::arith::{BaseField, FieldTowerSpec, TowerVariant};
use flasque_core::brauer::{LocalInvariantVector, RClassReport};
use flasque_core::exactlin::FiniteAbelianGroup;
use flasque_core::family::FamilyReport;
use flasque_core::gmod::{FiniteGroup, GLattice, Generator};
use flasque_core::tate::ResolutionCheck;
use flasque_core::IntMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::{json, Map, Value};
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug)]
pub struct JsonError(pub String);

impl std::fmt::Display for JsonError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "malformed JSON: {}", self.0)
    }
}

impl std::error::Error for JsonError {}

fn err<T>(msg: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError(msg.into()))
}

const SAFE_BITS: u64 = 53;

pub fn bigint_to_value(x: &BigInt) -> Value {
    if x.abs() < (BigInt::from(1) << SAFE_BITS) {
        let as_i64 = i64::try_from(x).expect("fits after the 53-bit check");
        json!(as_i64)
    } else {
        json!(x.to_string())
    }
}

pub fn bigint_from_value(v: &Value) -> Result<BigInt, JsonError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else {
                err(format!("non-integral number {}", n))
            }
        }
        Value::String(s) => {
            BigInt::from_str(s).map_err(|_| JsonError(format!("bad integer string {:?}", s)))
        }
        other => err(format!("expected integer, found {}", other)),
    }
}

pub fn matrix_to_value(m: &IntMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array((0..m.cols()).map(|j| bigint_to_value(m.at(i, j))).collect()))
        .collect();
    Value::Array(rows)
}

/// Parses [[...], ...]; `expect_cols` disambiguates empty matrices.
pub fn matrix_from_value(v: &Value, expect_cols: Option<usize>) -> Result<IntMatrix, JsonError> {
    let rows = v
        .as_array()
        .ok_or_else(|| JsonError("matrix must be an array".into()))?;
    let mut entries = Vec::new();
    let mut cols = expect_cols;
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| JsonError("matrix row must be an array".into()))?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c == row.len() => {}
            Some(c) => return err(format!("ragged matrix: {} vs {}", c, row.len())),
        }
        for e in row {
            entries.push(bigint_from_value(e)?);
        }
    }
    let cols = cols.unwrap_or(0);
    Ok(IntMatrix::new(rows.len(), cols, entries))
}

pub fn group_to_value(g: &FiniteGroup) -> Value {
    let n = g.order();
    let table: Vec<Value> = (0..n)
        .map(|a| Value::Array((0..n).map(|b| json!(g.op(a, b))).collect()))
        .collect();
    json!({
        "order": n,
        "table": table,
        "generators": g
            .generators()
            .iter()
            .map(|gen| json!({"name": gen.name, "index": gen.index}))
            .collect::<Vec<_>>(),
    })
}

pub fn group_from_value(v: &Value) -> Result<FiniteGroup, JsonError> {
    let order = v["order"]
        .as_u64()
        .ok_or_else(|| JsonError("group.order missing".into()))? as usize;
    let table_rows = v["table"]
        .as_array()
        .ok_or_else(|| JsonError("group.table missing".into()))?;
    let mut table = Vec::with_capacity(order * order);
    for row in table_rows {
        for e in row
            .as_array()
            .ok_or_else(|| JsonError("table row must be an array".into()))?
        {
            table.push(
                e.as_u64()
                    .ok_or_else(|| JsonError("table entry must be a number".into()))?
                    as usize,
            );
        }
    }
    let mut generators = Vec::new();
    if let Some(gens) = v["generators"].as_array() {
        for g in gens {
            generators.push(Generator {
                name: g["name"]
                    .as_str()
                    .ok_or_else(|| JsonError("generator.name missing".into()))?
                    .to_string(),
                index: g["index"]
                    .as_u64()
                    .ok_or_else(|| JsonError("generator.index missing".into()))?
                    as usize,
            });
        }
    }
    FiniteGroup::from_table(order, table, generators).map_err(|e| JsonError(e.to_string()))
}

pub fn lattice_to_value(x: &GLattice) -> Value {
    let mut action = Map::new();
    for (gen, m) in x.group().generators().iter().zip(x.generator_action()) {
        action.insert(gen.name.clone(), matrix_to_value(m));
    }
    let mut obj = Map::new();
    obj.insert("group".into(), group_to_value(x.group()));
    obj.insert("rank".into(), json!(x.rank()));
    obj.insert("action".into(), Value::Object(action));
    if let Some(labels) = x.labels() {
        obj.insert("labels".into(), json!(labels));
    }
    Value::Object(obj)
}

pub fn lattice_from_value(v: &Value) -> Result<GLattice, JsonError> {
    let group = Arc::new(group_from_value(&v["group"])?);
    let rank = v["rank"]
        .as_u64()
        .ok_or_else(|| JsonError("lattice.rank missing".into()))? as usize;
    let action_obj = v["action"]
        .as_object()
        .ok_or_else(|| JsonError("lattice.action missing".into()))?;
    let mut action = Vec::new();
    for gen in group.generators() {
        let m = action_obj
            .get(&gen.name)
            .ok_or_else(|| JsonError(format!("action for generator {} missing", gen.name)))?;
        action.push(matrix_from_value(m, Some(rank))?);
    }
    let labels = match v.get("labels") {
        Some(Value::Array(ls)) => Some(
            ls.iter()
                .map(|l| {
                    l.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| JsonError("label must be a string".into()))
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        _ => None,
    };
    GLattice::new(group, action, labels).map_err(|e| JsonError(e.to_string()))
}

pub fn abelian_group_to_value(g: &FiniteAbelianGroup) -> Value {
    json!({
        "invariant_factors": g.invariant_factors.iter().map(bigint_to_value).collect::<Vec<_>>(),
        "free_rank": g.free_rank,
        "display": g.to_string(),
    })
}

pub fn tower_to_value(t: &FieldTowerSpec) -> Value {
    let base = match &t.base {
        BaseField::Rational => json!("Q"),
        BaseField::Quadratic(d) => json!({"sqrt": d}),
        BaseField::PAdic(p) => json!({"padic": p}),
    };
    let variant = match &t.variant {
        TowerVariant::Constant => json!("constant"),
        TowerVariant::Twisted { a } => json!({"twisted_a": a}),
    };
    json!({"base": base, "s": t.s, "variant": variant})
}

pub fn tower_from_value(v: &Value) -> Result<FieldTowerSpec, JsonError> {
    let base = match &v["base"] {
        Value::String(s) if s == "Q" => BaseField::Rational,
        Value::Object(o) if o.contains_key("sqrt") => BaseField::Quadratic(
            o["sqrt"]
                .as_i64()
                .ok_or_else(|| JsonError("base.sqrt must be an integer".into()))?,
        ),
        Value::Object(o) if o.contains_key("padic") => BaseField::PAdic(
            o["padic"]
                .as_u64()
                .ok_or_else(|| JsonError("base.padic must be a prime".into()))?,
        ),
        other => return err(format!("unknown base {}", other)),
    };
    let s = v["s"]
        .as_u64()
        .ok_or_else(|| JsonError("tower.s missing".into()))? as u32;
    let variant = match &v["variant"] {
        Value::String(s) if s == "constant" => TowerVariant::Constant,
        Value::Object(o) if o.contains_key("twisted_a") => TowerVariant::Twisted {
            a: o["twisted_a"]
                .as_i64()
                .ok_or_else(|| JsonError("variant.twisted_a must be an integer".into()))?,
        },
        other => return err(format!("unknown variant {}", other)),
    };
    FieldTowerSpec::new(base, s, variant).map_err(|e| JsonError(e.to_string()))
}

/// CLI tower syntax: "Q", "Q(sqrt D)", "Qp:P".
pub fn parse_base(text: &str) -> Result<BaseField, JsonError> {
    let t = text.trim();
    if t == "Q" {
        return Ok(BaseField::Rational);
    }
    if let Some(rest) = t.strip_prefix("Q(sqrt").and_then(|r| r.strip_suffix(')')) {
        let d: i64 = rest
            .trim()
            .parse()
            .map_err(|_| JsonError(format!("bad discriminant in {:?}", text)))?;
        return Ok(BaseField::Quadratic(d));
    }
    if let Some(rest) = t.strip_prefix("Qp:") {
        let p: u64 = rest
            .trim()
            .parse()
            .map_err(|_| JsonError(format!("bad prime in {:?}", text)))?;
        return Ok(BaseField::PAdic(p));
    }
    err(format!(
        "unrecognized base syntax {:?} (expected Q, Q(sqrt D), or Qp:P)",
        text
    ))
}

pub fn fraction_to_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn fraction_from_string(s: &str) -> Result<BigRational, JsonError> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer =
        BigInt::from_str(n.trim()).map_err(|_| JsonError(format!("bad fraction {:?}", s)))?;
    let denom =
        BigInt::from_str(d.trim()).map_err(|_| JsonError(format!("bad fraction {:?}", s)))?;
    if denom.is_zero() {
        return err(format!("zero denominator in {:?}", s));
    }
    Ok(BigRational::new(numer, denom))
}

use num_traits::Zero;

pub fn invariant_vector_to_value(v: &LocalInvariantVector) -> Value {
    let mut obj = Map::new();
    for (label, value) in &v.entries {
        obj.insert(label.clone(), json!(fraction_to_string(value)));
    }
    Value::Object(obj)
}

pub fn invariant_vector_from_value(v: &Value) -> Result<LocalInvariantVector, JsonError> {
    let obj = v
        .as_object()
        .ok_or_else(|| JsonError("vector must be an object".into()))?;
    let mut entries = std::collections::BTreeMap::new();
    for (label, value) in obj {
        let s = value
            .as_str()
            .ok_or_else(|| JsonError("fraction must be a string".into()))?;
        let q = fraction_from_string(s)?;
        if !q.is_zero() {
            entries.insert(label.clone(), q);
        }
    }
    Ok(LocalInvariantVector { entries })
}

pub fn rclass_report_to_value(r: &RClassReport) -> Value {
    json!({
        "tower": tower_to_value(&r.tower),
        "S": r.s.iter().map(|p| p.label()).collect::<Vec<_>>(),
        "Sf": r.sf.iter().map(|p| p.label()).collect::<Vec<_>>(),
        "r": r.r,
        "representatives": r.representatives.iter().map(invariant_vector_to_value).collect::<Vec<_>>(),
        "trace": r.trace,
    })
}

pub fn resolution_check_to_value(c: &ResolutionCheck) -> Value {
    json!({
        "pass": c.pass(),
        "composite_zero": c.composite_zero,
        "exact": c.exact,
        "q_is_permutation": c.q_is_permutation,
        "dual_surjectivity": c
            .dual_surjectivity
            .iter()
            .map(|(h, ok)| json!({"subgroup": h, "surjective": ok}))
            .collect::<Vec<_>>(),
        "kernel_flasque": c.kernel_flasque.flasque,
        "failures": c.failures(),
    })
}

pub fn family_report_to_value(r: &FamilyReport) -> Value {
    json!({
        "s": r.params.s,
        "s0": r.params.s0,
        "m": r.params.m,
        "epsilon": r.params.epsilon,
        "pass": r.pass(),
        "items": r
            .items
            .iter()
            .map(|i| json!({"name": i.name, "pass": i.pass, "detail": i.detail}))
            .collect::<Vec<_>>(),
    })
}
