//! Experiment configuration files (JSON, `"schema": 1`).
//!
//! ```json
//! {
//!   "schema": 1,
//!   "mode": "exact",
//!   "generator": {"family": "torus", "lambda": [0, 1], "a": 0, "b": 0, "c1": 1, "c2": 1},
//!   "elements": [[{"word": {"m": 1, "n": 0}, "re": 1}]],
//!   "validate": {"tol": 0, "depth": 2, "hoprod_n": 3, "random_words": 4},
//!   "growth": {"n_max": 12, "slack": 0.1, "l1_cap": 50000},
//!   "semigroup": {"times": [0, 0.5, 1], "tol": 1e-10},
//!   "compare": {"times": [0.1, 0.5, 1], "tol": 1e-12, "floor": 1e-8},
//!   "iterate": {"n": 3, "cap": 400000}
//! }
//! ```
//!
//! Generator families:
//! - `walk`: `group` (`{"kind": "integers"}` by default), `moves` (canonical
//!   group strings), `transitions` (one closed form or table per move).
//! - `exclusion`: `sites`, `alpha` as `[[i, j, value], ...]`, optional `eta`
//!   as `[[i, value], ...]`; or `chain: {"n": n, "amp": a}`.
//! - `torus`: `lambda`, `a`, `b`, `c1`, `c2`; `torus_gauge`: `lambda`, `mu`, `nu`;
//!   `rotation`: `c1`, `c2`.
//!
//! Any family accepts `corrupt_tau: {"word": w, "add": c}`, which adds
//! `c·w` to `τ(w)` (a negative control for validation).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::Value;

use crate::algebra::json::{terms_from_json, word_from_json};
use crate::algebra::{Algebra, AlgebraElement, GroupAdapter, GroupSpec};
use crate::error::{Error, Result};
use crate::generator::{
    exclusion_generator, rotation_generator, torus_gauge_generator, torus_generator, walk_generator, ExclusionParams,
    Family, FlowGenerator, TransitionSpec,
};
use crate::qrw::{GrowthOptions, DEFAULT_ENTRY_CAP};
use crate::scalar::{scalar_from_json, Scalar};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    /// Residual tolerance; `None` means 0 in exact mode and 1e-10 in float mode.
    pub tol: Option<f64>,
    pub depth: usize,
    /// Highest order of the product-formula check (0 disables it).
    pub hoprod_n: usize,
    /// Extra random products of 3 or 4 generating elements.
    pub random_words: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig { tol: None, depth: 2, hoprod_n: 3, random_words: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemigroupConfig {
    pub times: Vec<f64>,
    pub tol: f64,
    /// Step functions; when both are present the cocycle matrix element
    /// `ĵ_t[f, g]` is reported instead of `T_t`.
    pub f: Option<Value>,
    pub g: Option<Value>,
}

impl Default for SemigroupConfig {
    fn default() -> Self {
        SemigroupConfig { times: vec![0.0, 0.5, 1.0], tol: 1e-10, f: None, g: None }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub times: Vec<f64>,
    pub tol: f64,
    /// Absolute slack added to the certified budgets.
    pub floor: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig { times: vec![0.1, 0.5, 1.0], tol: 1e-12, floor: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterateConfig {
    pub n: usize,
    pub cap: usize,
}

impl Default for IterateConfig {
    fn default() -> Self {
        IterateConfig { n: 2, cap: DEFAULT_ENTRY_CAP }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: u64,
    #[serde(default)]
    pub mode: Option<Mode>,
    pub generator: Value,
    /// Term arrays; defaults to the family's generating elements.
    #[serde(default)]
    pub elements: Option<Vec<Value>>,
    #[serde(default)]
    pub validate: ValidateConfig,
    #[serde(default)]
    pub growth: GrowthOptions,
    #[serde(default)]
    pub semigroup: SemigroupConfig,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub iterate: IterateConfig,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema {} (expected {SCHEMA_VERSION})", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn generator<S: Scalar>(&self) -> Result<FlowGenerator<S>> {
        build_generator(&self.generator)
    }

    pub fn elements<S: Scalar>(&self, phi: &FlowGenerator<S>) -> Result<Vec<AlgebraElement<S>>> {
        match &self.elements {
            None => Ok(phi.generating_elements()),
            Some(list) => list.iter().map(|v| terms_from_json(phi.algebra(), v)).collect(),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(format!("generator: {}", msg.into()))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing {key:?}")))
}

fn scalar<S: Scalar>(v: &Value, key: &str) -> Result<S> {
    scalar_from_json(field(v, key)?).ok_or_else(|| bad(format!("{key:?} is not a number")))
}

fn scalar_or<S: Scalar>(v: &Value, key: &str, default: S) -> Result<S> {
    match v.get(key) {
        None => Ok(default),
        Some(x) => scalar_from_json(x).ok_or_else(|| bad(format!("{key:?} is not a number"))),
    }
}

fn int_or(v: &Value, key: &str, default: i64) -> Result<i64> {
    match v.get(key) {
        None => Ok(default),
        Some(x) => x.as_i64().ok_or_else(|| bad(format!("{key:?} must be an integer"))),
    }
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(v, key)?.as_array().ok_or_else(|| bad(format!("{key:?} must be an array")))
}

fn site(v: &Value) -> Result<u32> {
    v.as_u64().and_then(|s| u32::try_from(s).ok()).ok_or_else(|| bad(format!("bad site {v}")))
}

fn torus_algebra<S: Scalar>(v: &Value) -> Result<Arc<Algebra<S>>> {
    Algebra::torus(scalar_or(v, "lambda", S::i())?)
}

fn exclusion_params<S: Scalar>(v: &Value) -> Result<ExclusionParams<S>> {
    if let Some(ch) = v.get("chain") {
        let n = ch.get("n").and_then(Value::as_u64).ok_or_else(|| bad("chain.n missing"))?;
        let n = u32::try_from(n).map_err(|_| bad("chain.n too large"))?;
        return Ok(ExclusionParams::chain(n, scalar_or(ch, "amp", S::one())?));
    }
    let sites = array(v, "sites")?.iter().map(site).collect::<Result<Vec<_>>>()?;
    let mut alpha = BTreeMap::new();
    for a in array(v, "alpha")? {
        match a.as_array().map(Vec::as_slice) {
            Some([i, j, c]) => {
                let c = scalar_from_json(c).ok_or_else(|| bad(format!("bad amplitude {c}")))?;
                alpha.insert((site(i)?, site(j)?), c);
            }
            _ => return Err(bad("alpha entries are [i, j, value]")),
        }
    }
    let mut eta = BTreeMap::new();
    if v.get("eta").is_some() {
        for e in array(v, "eta")? {
            match e.as_array().map(Vec::as_slice) {
                Some([i, c]) => {
                    eta.insert(site(i)?, scalar_from_json(c).ok_or_else(|| bad(format!("bad energy {c}")))?);
                }
                _ => return Err(bad("eta entries are [i, value]")),
            }
        }
    }
    ExclusionParams::new(sites, alpha, eta)
}

/// A generator from its JSON description.
pub fn build_generator<S: Scalar>(v: &Value) -> Result<FlowGenerator<S>> {
    let family = field(v, "family")?.as_str().ok_or_else(|| bad("\"family\" must be a string"))?;
    let phi = match family {
        "walk" => {
            let group: GroupSpec = match v.get("group") {
                None => GroupSpec::Integers,
                Some(g) => serde_json::from_value(g.clone()).map_err(|e| bad(format!("group: {e}")))?,
            };
            let moves = array(v, "moves")?
                .iter()
                .map(|m| match m {
                    Value::String(s) => group.parse(s),
                    Value::Number(n) => group.parse(&n.to_string()),
                    _ => Err(bad(format!("bad move {m}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let transitions = array(v, "transitions")?
                .iter()
                .map(|t| TransitionSpec::parse(&group, t))
                .collect::<Result<Vec<_>>>()?;
            walk_generator(group, moves, transitions)?
        }
        "exclusion" => exclusion_generator(exclusion_params(v)?)?,
        "torus" => {
            let alg = torus_algebra::<S>(v)?;
            torus_generator(&alg, int_or(v, "a", 0)?, int_or(v, "b", 0)?, scalar(v, "c1")?, scalar(v, "c2")?)?
        }
        "torus_gauge" => {
            let alg = torus_algebra::<S>(v)?;
            torus_gauge_generator(&alg, scalar(v, "mu")?, scalar(v, "nu")?)?
        }
        "rotation" => rotation_generator(scalar(v, "c1")?, scalar(v, "c2")?)?,
        other => return Err(bad(format!("unknown family {other:?}"))),
    };
    match v.get("corrupt_tau") {
        None => Ok(phi),
        Some(c) => corrupt_tau(phi, c),
    }
}

fn corrupt_tau<S: Scalar>(phi: FlowGenerator<S>, v: &Value) -> Result<FlowGenerator<S>> {
    let alg = phi.algebra().clone();
    let word = word_from_json(&alg, field(v, "word")?)?;
    let add: S = scalar(v, "add")?;
    let basis = phi.basis().clone();
    let phi = Arc::new(phi);
    let inner = phi.clone();
    Ok(FlowGenerator::from_rule(&alg, basis, Family::Custom, move |w| {
        let mut m = (*inner.apply_word(w)?).clone();
        if *w == word {
            m.add(0, 0, &AlgebraElement::term(inner.algebra(), add.clone(), w.clone()));
        }
        Ok(m)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{default_sample, validate};
    use crate::scalar::{Exact, C64};

    fn cfg(generator: &str) -> Config {
        Config::parse(&format!(r#"{{"schema": 1, "generator": {generator}}}"#)).unwrap()
    }

    #[test]
    fn parses_every_family() {
        let gens = [
            r#"{"family": "walk", "moves": ["1", "-1"], "transitions": ["constant", {"constant": [0, 1]}]}"#,
            r#"{"family": "walk", "group": {"kind": "lattice", "dim": 2}, "moves": ["(1,0)", "(0,1)"], "transitions": ["constant", "constant:2"]}"#,
            r#"{"family": "exclusion", "sites": [1, 2], "alpha": [[1, 2, 1], [2, 1, 1]], "eta": [[1, "1/2"]]}"#,
            r#"{"family": "exclusion", "chain": {"n": 3, "amp": 1}}"#,
            r#"{"family": "torus", "lambda": [0, 1], "c1": 1, "c2": 1}"#,
            r#"{"family": "torus_gauge", "mu": [0, 1], "nu": 1}"#,
            r#"{"family": "rotation", "c1": 1, "c2": [0, 1]}"#,
        ];
        for g in gens {
            let c = cfg(g);
            let phi = c.generator::<Exact>().unwrap();
            let xs = c.elements(&phi).unwrap();
            assert!(!xs.is_empty());
            assert!(validate(&phi, &default_sample(&xs, 1), 0.0).unwrap().pass(), "{g}");
            assert!(c.generator::<C64>().is_ok());
        }
    }

    #[test]
    fn corrupted_tau_is_flagged() {
        let c = cfg(r#"{"family": "torus", "c1": 1, "c2": 1, "corrupt_tau": {"word": {"m": 1, "n": 0}, "add": 1}}"#);
        let phi = c.generator::<Exact>().unwrap();
        let rep = validate(&phi, &default_sample(&c.elements(&phi).unwrap(), 2), 0.0).unwrap();
        assert!(rep.failing_identities().contains(&"tau".to_string()));
    }

    #[test]
    fn explicit_elements_and_defaults() {
        let c = Config::parse(
            r#"{"schema": 1, "generator": {"family": "torus", "c1": 1, "c2": 1},
                "elements": [[{"word": {"m": 1, "n": 1}, "re": 2}]], "growth": {"n_max": 8}}"#,
        )
        .unwrap();
        let phi = c.generator::<Exact>().unwrap();
        assert_eq!(c.elements(&phi).unwrap().len(), 1);
        assert_eq!(c.growth.n_max, 8);
        assert_eq!(c.growth.slack, 0.1);
        assert_eq!(c.semigroup, SemigroupConfig::default());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Config::parse(r#"{"schema": 2, "generator": {}}"#), Err(Error::Parse(_))));
        assert!(matches!(Config::parse("not json"), Err(Error::Parse(_))));
        assert!(matches!(Config::parse(r#"{"schema": 1}"#), Err(Error::Parse(_))));
        let c = cfg(r#"{"family": "klein"}"#);
        assert!(matches!(c.generator::<Exact>(), Err(Error::Parse(_))));
        let c = cfg(r#"{"family": "exclusion", "sites": [1], "alpha": [[1, 2, 1]]}"#);
        assert!(matches!(c.generator::<Exact>(), Err(Error::SiteOutside(2))));
    }
}
