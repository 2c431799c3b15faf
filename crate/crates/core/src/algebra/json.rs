//! JSON form of algebra descriptors and elements:
//! `{"algebra": {...}, "terms": [{"word": ..., "re": r, "im": i}]}`.
//!
//! Words are `"unit"` or the canonical group string for group functions,
//! `{"cr": [...], "an": [...]}` for CAR, `{"m", "n"}` for the torus and
//! `{"m", "n", "p"}` for the rotation algebra.

use std::sync::Arc;

use serde_json::{json, Value};

use super::{Algebra, AlgebraElement, BasisWord, CarWord, GroupAdapter, GroupSpec};
use crate::error::{Error, Result};
use crate::scalar::{scalar_from_json, Scalar};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn algebra_to_json<S: Scalar>(alg: &Algebra<S>) -> Value {
    match alg {
        Algebra::Group(g) => json!({"family": "group", "group": g}),
        Algebra::Car => json!({"family": "car"}),
        Algebra::Torus { lambda } => {
            let (re, im) = lambda.parts_to_json();
            json!({"family": "torus", "lambda": [re, im]})
        }
        Algebra::Rotation => json!({"family": "rotation"}),
    }
}

pub fn algebra_from_json<S: Scalar>(v: &Value) -> Result<Arc<Algebra<S>>> {
    let family = v.get("family").and_then(Value::as_str).ok_or_else(|| parse_err("algebra.family missing"))?;
    match family {
        "group" => {
            let g: GroupSpec = serde_json::from_value(v.get("group").cloned().unwrap_or(Value::Null))
                .map_err(|e| parse_err(format!("algebra.group: {e}")))?;
            Ok(Algebra::group(g))
        }
        "car" => Ok(Algebra::car()),
        "torus" => {
            let lambda = v
                .get("lambda")
                .and_then(scalar_from_json::<S>)
                .ok_or_else(|| parse_err("algebra.lambda missing or malformed"))?;
            Algebra::torus(lambda)
        }
        "rotation" => Ok(Algebra::rotation()),
        other => Err(parse_err(format!("unknown algebra family {other:?}"))),
    }
}

pub fn word_to_json<S: Scalar>(alg: &Algebra<S>, w: &BasisWord) -> Value {
    match (alg, w) {
        (_, BasisWord::GroupUnit) => json!("unit"),
        (Algebra::Group(g), BasisWord::GroupFn(e)) => json!(g.canonical(e)),
        (_, BasisWord::GroupFn(e)) => json!(e),
        (_, BasisWord::Car(cw)) => json!({"cr": cw.cr, "an": cw.an}),
        (_, BasisWord::Torus { m, n }) => json!({"m": m, "n": n}),
        (_, BasisWord::Rotation { m, n, p }) => json!({"m": m, "n": n, "p": p}),
    }
}

fn int_field(v: &Value, key: &str) -> Result<i64> {
    match v.get(key) {
        None => Ok(0),
        Some(x) => x.as_i64().ok_or_else(|| parse_err(format!("word.{key} is not an integer"))),
    }
}

fn sites_field(v: &Value, key: &str) -> Result<Vec<u32>> {
    match v.get(key) {
        None => Ok(vec![]),
        Some(x) => serde_json::from_value(x.clone()).map_err(|e| parse_err(format!("word.{key}: {e}"))),
    }
}

pub fn word_from_json<S: Scalar>(alg: &Algebra<S>, v: &Value) -> Result<BasisWord> {
    match alg {
        Algebra::Group(g) => match v {
            Value::String(s) if s == "unit" => Ok(BasisWord::GroupUnit),
            Value::String(s) => Ok(BasisWord::GroupFn(g.parse(s)?)),
            Value::Number(n) => {
                let k = n.as_i64().ok_or_else(|| parse_err("group word is not an integer"))?;
                Ok(BasisWord::GroupFn(g.parse(&k.to_string())?))
            }
            _ => Err(parse_err(format!("bad group word {v}"))),
        },
        Algebra::Car => {
            if v.as_str() == Some("unit") {
                return Ok(BasisWord::Car(CarWord::unit()));
            }
            let cw = CarWord { cr: sites_field(v, "cr")?, an: sites_field(v, "an")? };
            if !cw.is_normal() {
                return Err(parse_err(format!("CAR word {v} is not normal ordered")));
            }
            Ok(BasisWord::Car(cw))
        }
        Algebra::Torus { .. } => Ok(BasisWord::Torus { m: int_field(v, "m")?, n: int_field(v, "n")? }),
        Algebra::Rotation => Ok(BasisWord::Rotation {
            m: int_field(v, "m")?,
            n: int_field(v, "n")?,
            p: int_field(v, "p")?,
        }),
    }
}

pub fn element_to_json<S: Scalar>(x: &AlgebraElement<S>) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .iter()
        .map(|(w, c)| {
            let (re, im) = c.parts_to_json();
            json!({"word": word_to_json(x.algebra(), w), "re": re, "im": im})
        })
        .collect();
    json!({"algebra": algebra_to_json(x.algebra()), "terms": terms})
}

/// Terms only, against a known algebra.
pub fn terms_from_json<S: Scalar>(alg: &Arc<Algebra<S>>, v: &Value) -> Result<AlgebraElement<S>> {
    let arr = v.as_array().ok_or_else(|| parse_err("terms must be an array"))?;
    let mut out = AlgebraElement::zero(alg);
    for t in arr {
        let w = word_from_json(alg, t.get("word").ok_or_else(|| parse_err("term.word missing"))?)?;
        let c = S::parts_from_json(t.get("re").unwrap_or(&Value::Null), t.get("im").unwrap_or(&Value::Null))
            .ok_or_else(|| parse_err("term coefficient malformed"))?;
        out.add_term(w, c, 0.0);
    }
    Ok(out)
}

pub fn element_from_json<S: Scalar>(v: &Value) -> Result<AlgebraElement<S>> {
    let alg = algebra_from_json::<S>(v.get("algebra").ok_or_else(|| parse_err("algebra missing"))?)?;
    terms_from_json(&alg, v.get("terms").unwrap_or(&Value::Array(vec![])))
}
