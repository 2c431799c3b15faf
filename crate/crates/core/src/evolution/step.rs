use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{scalar_from_json, Scalar};

/// A piecewise-constant `K`-valued function on `[0, T)`, zero beyond `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction<S> {
    dim: usize,
    breaks: Vec<f64>,
    values: Vec<Vec<S>>,
}

/// One constant piece of a common refinement.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece<S> {
    pub start: f64,
    pub len: f64,
    pub xi: Vec<S>,
    pub eta: Vec<S>,
}

impl<S: Scalar> StepFunction<S> {
    /// `breaks = [0 = t_0 < … < t_m = T]`, one value per interval.
    pub fn new(dim: usize, breaks: Vec<f64>, values: Vec<Vec<S>>) -> Result<Self> {
        if breaks.first() != Some(&0.0) {
            return Err(Error::InvalidParameter("step function breakpoints must start at 0".into()));
        }
        if breaks.iter().any(|t| !t.is_finite()) || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("step function breakpoints must be strictly increasing".into()));
        }
        if values.len() + 1 != breaks.len() {
            return Err(Error::LengthMismatch { expected: breaks.len() - 1, got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
        Ok(StepFunction { dim, breaks, values })
    }

    pub fn zero(dim: usize, horizon: f64) -> Self {
        Self::constant(horizon, vec![S::zero(); dim])
    }

    pub fn constant(horizon: f64, v: Vec<S>) -> Self {
        let dim = v.len();
        if horizon <= 0.0 {
            return StepFunction { dim, breaks: vec![0.0], values: vec![] };
        }
        StepFunction { dim, breaks: vec![0.0, horizon], values: vec![v] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        *self.breaks.last().expect("nonempty breaks")
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[Vec<S>] {
        &self.values
    }

    /// The value on the interval containing `t` (right-continuous).
    pub fn value_at(&self, t: f64) -> Vec<S> {
        if t < 0.0 || t >= self.horizon() {
            return vec![S::zero(); self.dim];
        }
        let k = self.breaks.partition_point(|&b| b <= t) - 1;
        self.values[k].clone()
    }

    /// `θ_s f = f(· + s)`, horizon `T − s`.
    pub fn shift(&self, s: f64) -> Self {
        if s <= 0.0 {
            return self.clone();
        }
        if s >= self.horizon() {
            return StepFunction { dim: self.dim, breaks: vec![0.0], values: vec![] };
        }
        let mut breaks = vec![0.0];
        let mut values = Vec::new();
        for (k, v) in self.values.iter().enumerate() {
            let end = self.breaks[k + 1];
            if end > s {
                breaks.push(end - s);
                values.push(v.clone());
            }
        }
        StepFunction { dim: self.dim, breaks, values }
    }

    /// Common refinement of `f` and `g` on `[from, to)`.
    pub fn refine(f: &Self, g: &Self, from: f64, to: f64) -> Result<Vec<Piece<S>>> {
        if f.dim != g.dim {
            return Err(Error::DimensionMismatch { expected: f.dim, got: g.dim });
        }
        let mut pts: Vec<f64> =
            f.breaks.iter().chain(&g.breaks).cloned().filter(|&t| t > from && t < to).collect();
        pts.push(from);
        pts.push(to);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Ok(pts
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                Piece { start: w[0], len: w[1] - w[0], xi: f.value_at(mid), eta: g.value_at(mid) }
            })
            .collect())
    }

    /// `⟨f 1_{[from,∞)}, g 1_{[from,∞)}⟩`.
    pub fn inner_from(f: &Self, g: &Self, from: f64) -> Result<S> {
        let to = f.horizon().max(g.horizon());
        let mut acc = S::zero();
        if to <= from {
            return Ok(acc);
        }
        for p in Self::refine(f, g, from, to)? {
            acc = acc + inner(&p.xi, &p.eta) * S::from_f64_parts(p.len, 0.0);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        let values: Vec<Vec<Value>> = self
            .values
            .iter()
            .map(|v| {
                v.iter()
                    .map(|c| {
                        let (re, im) = c.parts_to_json();
                        json!([re, im])
                    })
                    .collect()
            })
            .collect();
        json!({ "T": self.horizon(), "breaks": self.breaks, "values": values })
    }

    /// `{"T": T, "breaks": [...], "values": [[...], ...]}`; `breaks` may omit
    /// the endpoints `0` and `T`.
    pub fn from_json(dim: usize, v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("step function: {m}"));
        let horizon = v.get("T").and_then(Value::as_f64).ok_or_else(|| bad("missing \"T\""))?;
        let mut breaks: Vec<f64> = match v.get("breaks") {
            Some(Value::Array(a)) => a.iter().map(|b| b.as_f64().ok_or_else(|| bad("non-numeric break"))).collect::<Result<_>>()?,
            None => vec![],
            _ => return Err(bad("\"breaks\" must be an array")),
        };
        if breaks.first() != Some(&0.0) {
            breaks.insert(0, 0.0);
        }
        if breaks.last() != Some(&horizon) && horizon > 0.0 {
            breaks.push(horizon);
        }
        let values = match v.get("values") {
            Some(Value::Array(rows)) => rows
                .iter()
                .map(|row| match row {
                    Value::Array(cs) => cs
                        .iter()
                        .map(|c| scalar_from_json::<S>(c).ok_or_else(|| bad("bad coordinate")))
                        .collect::<Result<Vec<S>>>(),
                    _ => Err(bad("each value must be an array")),
                })
                .collect::<Result<Vec<_>>>()?,
            _ => return Err(bad("missing \"values\"")),
        };
        Self::new(dim, breaks, values)
    }
}

/// `⟨ξ, η⟩`, conjugate-linear on the left.
pub fn inner<S: Scalar>(xi: &[S], eta: &[S]) -> S {
    xi.iter().zip(eta).fold(S::zero(), |acc, (a, b)| acc + a.conj() * b.clone())
}

pub fn norm<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|c| c.abs().powi(2)).sum::<f64>().sqrt()
}

/// `ξ̂ = ω + ξ`.
pub fn hat<S: Scalar>(v: &[S]) -> Vec<S> {
    let mut out = Vec::with_capacity(v.len() + 1);
    out.push(S::one());
    out.extend(v.iter().cloned());
    out
}
