//! Example builders: walks on groups, the exclusion process, the torus flows,
//! the rotation-algebra flow and the bounded form `δ(x) = zx − π(x)z`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::Value;

use crate::algebra::words::{b, bs, uv, uvz};
use crate::algebra::{Algebra, AlgebraElement, BasisWord, GroupAdapter, GroupElem, GroupSpec, Site};
use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::scalar::{parse_rational, scalar_from_json, Scalar};

use super::{validate, Components, Family, FlowGenerator, MultiplicityBasis};

// ---------------------------------------------------------------- walks

/// A transition function `g ↦ t_h(g)`.
#[derive(Clone, Debug, PartialEq)]
pub enum TransitionSpec<S> {
    Constant(S),
    /// `base^{g_1}` in the first coordinate.
    Power { base: S },
    /// `value` when `g_1 ≥ threshold`, else 0.
    ZeroBelow { threshold: i64, value: S },
    Table { values: BTreeMap<GroupElem, S>, default: S },
}

impl<S: Scalar> TransitionSpec<S> {
    pub fn at(&self, g: &GroupElem) -> S {
        match self {
            TransitionSpec::Constant(c) => c.clone(),
            TransitionSpec::Power { base } => base.powi(g[0]),
            TransitionSpec::ZeroBelow { threshold, value } => {
                if g[0] >= *threshold {
                    value.clone()
                } else {
                    S::zero()
                }
            }
            TransitionSpec::Table { values, default } => values.get(g).cloned().unwrap_or_else(|| default.clone()),
        }
    }

    /// Parses `"constant"`, `"constant:c"`, `"power:B^g"`, `"zero-below:K"`,
    /// or an object `{"constant": c}`, `{"power": B}`,
    /// `{"zero_below": K, "value": c}`, `{"table": {"g": c, …}, "default": c}`.
    pub fn parse(group: &GroupSpec, v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("transition {v}: {m}"));
        let num = |x: &Value| scalar_from_json::<S>(x).ok_or_else(|| bad("bad coefficient"));
        match v {
            Value::String(s) => {
                let (kind, arg) = s.split_once(':').map_or((s.as_str(), None), |(k, a)| (k, Some(a)));
                match kind {
                    "constant" => Ok(TransitionSpec::Constant(match arg {
                        None => S::one(),
                        Some(a) => num(&Value::String(a.into()))?,
                    })),
                    "power" => {
                        let a = arg.ok_or_else(|| bad("missing base"))?;
                        let base = a.strip_suffix("^g").ok_or_else(|| bad("expected power:B^g"))?;
                        let r = parse_rational(base).ok_or_else(|| bad("bad base"))?;
                        Ok(TransitionSpec::Power { base: num(&Value::String(r.to_string()))? })
                    }
                    "zero-below" => {
                        let k = arg.and_then(|a| a.trim().parse::<i64>().ok()).ok_or_else(|| bad("bad threshold"))?;
                        Ok(TransitionSpec::ZeroBelow { threshold: k, value: S::one() })
                    }
                    _ => Err(bad("unknown closed form")),
                }
            }
            Value::Object(o) => {
                if let Some(c) = o.get("constant") {
                    Ok(TransitionSpec::Constant(num(c)?))
                } else if let Some(p) = o.get("power") {
                    Ok(TransitionSpec::Power { base: num(p)? })
                } else if let Some(k) = o.get("zero_below") {
                    let threshold = k.as_i64().ok_or_else(|| bad("bad threshold"))?;
                    let value = o.get("value").map(num).transpose()?.unwrap_or_else(S::one);
                    Ok(TransitionSpec::ZeroBelow { threshold, value })
                } else if let Some(Value::Object(tab)) = o.get("table") {
                    let mut values = BTreeMap::new();
                    for (k, c) in tab {
                        values.insert(group.parse(k)?, num(c)?);
                    }
                    let default = o.get("default").map(num).transpose()?.unwrap_or_else(S::zero);
                    Ok(TransitionSpec::Table { values, default })
                } else {
                    Err(bad("unknown transition object"))
                }
            }
            Value::Number(_) | Value::Array(_) => Ok(TransitionSpec::Constant(num(v)?)),
            _ => Err(bad("unsupported form")),
        }
    }
}

/// The walk generator on `C_0(G) ⊕ C1` with moves `H` and transition
/// functions `t_h`:
/// `φ(x) = [[Σ|t_h|²(x∘λ_h − x), Σ conj(t_h)(x∘λ_h − x)⟨f_h|],
///          [Σ t_h(x∘λ_h − x)|f_h⟩, Σ(x∘λ_h − x)|f_h⟩⟨f_h|]]`.
pub fn walk_generator<S: Scalar>(
    group: GroupSpec,
    moves: Vec<GroupElem>,
    transitions: Vec<TransitionSpec<S>>,
) -> Result<FlowGenerator<S>> {
    if moves.is_empty() {
        return Err(Error::InvalidParameter("H must be non-empty".into()));
    }
    if moves.len() != transitions.len() {
        return Err(Error::LengthMismatch { expected: moves.len(), got: transitions.len() });
    }
    let mut seen = BTreeSet::new();
    for h in &moves {
        if !group.contains(h) {
            return Err(Error::InvalidParameter(format!("move {h:?} is not a group element")));
        }
        if *h == group.identity() {
            return Err(Error::InvalidParameter("the identity may not be a move".into()));
        }
        if !seen.insert(h.clone()) {
            return Err(Error::InvalidParameter(format!("repeated move {h:?}")));
        }
    }
    let alg = Algebra::group(group.clone());
    let labels = moves.iter().map(|h| format!("f_{}", group.canonical(h))).collect();
    let basis = MultiplicityBasis::new(labels)?;
    let inv: Vec<GroupElem> = moves.iter().map(|h| group.inverse(h)).collect();

    // x∘λ_h − x on e_k, weighted by the function `w`: w(h⁻¹k) e_{h⁻¹k} − w(k) e_k
    let shifted = {
        let alg = alg.clone();
        let group = group.clone();
        let inv = inv.clone();
        Arc::new(move |w: &BasisWord, k: usize, weight: &dyn Fn(&GroupElem) -> S| -> AlgebraElement<S> {
            match w {
                BasisWord::GroupFn(g) => {
                    let hg = group.multiply(&inv[k], g);
                    let mut out = AlgebraElement::term(&alg, weight(&hg), BasisWord::GroupFn(hg));
                    out.add_scaled(&-weight(g), &AlgebraElement::word(&alg, w.clone()));
                    out
                }
                _ => AlgebraElement::zero(&alg),
            }
        })
    };
    let d = moves.len();
    let t = Arc::new(transitions.clone());

    let pi = {
        let (alg, group, inv) = (alg.clone(), group.clone(), inv.clone());
        Box::new(move |w: &BasisWord| {
            Ok((0..d)
                .map(|k| {
                    let img = match w {
                        BasisWord::GroupFn(g) => AlgebraElement::word(&alg, BasisWord::GroupFn(group.multiply(&inv[k], g))),
                        _ => AlgebraElement::word(&alg, w.clone()),
                    };
                    ((k + 1, k + 1), img)
                })
                .collect())
        })
    };
    let delta = {
        let (sh, t) = (shifted.clone(), t.clone());
        Box::new(move |w: &BasisWord| Ok((0..d).map(|k| (k + 1, sh(w, k, &|g| t[k].at(g)))).collect()))
    };
    let delta_dag = {
        let (sh, t) = (shifted.clone(), t.clone());
        Box::new(move |w: &BasisWord| Ok((0..d).map(|k| (k + 1, sh(w, k, &|g| t[k].at(g).conj()))).collect()))
    };
    let tau = {
        let (sh, t, alg) = (shifted, t, alg.clone());
        Box::new(move |w: &BasisWord| {
            let mut out = AlgebraElement::zero(&alg);
            for k in 0..d {
                out = &out + &sh(w, k, &|g| t[k].at(g).norm_sqr());
            }
            Ok(out)
        })
    };
    Ok(FlowGenerator::from_components(
        &alg,
        basis,
        Family::Walk { group, moves, transitions },
        Components { pi, delta, delta_dag: Some(delta_dag), tau },
    ))
}

/// Walk-specific closed forms.
impl<S: Scalar> FlowGenerator<S> {
    fn walk_parts(&self) -> Result<(&GroupSpec, &[GroupElem], &[TransitionSpec<S>])> {
        match self.family() {
            Family::Walk { group, moves, transitions } => Ok((group, moves, transitions)),
            _ => Err(Error::InvalidParameter("not a walk generator".into())),
        }
    }

    /// `‖m_e(g)‖ = 1 + Σ_h |t_h(g)|²`.
    pub fn walk_me_norm(&self, g: &GroupElem) -> Result<f64> {
        let (_, _, t) = self.walk_parts()?;
        Ok(1.0 + t.iter().map(|th| th.at(g).abs().powi(2)).sum::<f64>())
    }

    /// `‖m_h(g)‖ = 1 + |t_h(g)|²` for the `k`-th move.
    pub fn walk_mh_norm(&self, k: usize, g: &GroupElem) -> Result<f64> {
        let (_, _, t) = self.walk_parts()?;
        Ok(1.0 + t[k].at(g).abs().powi(2))
    }

    /// `sup |t_h(h_j⁻¹⋯h_1⁻¹ g)|` over paths of length `≤ n` in `H ∪ {e}`.
    pub fn walk_m_bound(&self, g: &GroupElem, n: usize) -> Result<f64> {
        let (group, moves, t) = self.walk_parts()?;
        let inv: Vec<GroupElem> = moves.iter().map(|h| group.inverse(h)).collect();
        let mut seen: BTreeSet<GroupElem> = BTreeSet::from([g.clone()]);
        let mut frontier = vec![g.clone()];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &frontier {
                for hi in &inv {
                    let q = group.multiply(hi, p);
                    if seen.insert(q.clone()) {
                        next.push(q);
                    }
                }
            }
            frontier = next;
        }
        Ok(seen.iter().flat_map(|p| t.iter().map(move |th| th.at(p).abs())).fold(0.0, f64::max))
    }

    /// `(1 + |H| + 2|H|M_g²)^n`.
    pub fn walk_growth_bound(&self, g: &GroupElem, n: usize) -> Result<f64> {
        let (_, moves, _) = self.walk_parts()?;
        let h = moves.len() as f64;
        let m = self.walk_m_bound(g, n)?;
        Ok((1.0 + h + 2.0 * h * m * m).powi(n as i32))
    }
}

// ------------------------------------------------------------ exclusion

#[derive(Clone, Debug, PartialEq)]
pub struct ExclusionParams<S> {
    /// The finite site set `I`, sorted.
    pub sites: Vec<Site>,
    /// Non-zero amplitudes `α_{i,j}`.
    pub alpha: BTreeMap<(Site, Site), S>,
    /// Real energies `η_i`.
    pub eta: BTreeMap<Site, S>,
}

impl<S: Scalar> ExclusionParams<S> {
    pub fn new(sites: Vec<Site>, alpha: BTreeMap<(Site, Site), S>, eta: BTreeMap<Site, S>) -> Result<Self> {
        let mut sites = sites;
        sites.sort_unstable();
        sites.dedup();
        let inside = |s: &Site| sites.binary_search(s).is_ok();
        for &(i, j) in alpha.keys() {
            if !inside(&i) || !inside(&j) {
                return Err(Error::SiteOutside(if inside(&i) { j } else { i }));
            }
        }
        for (i, e) in &eta {
            if !inside(i) {
                return Err(Error::SiteOutside(*i));
            }
            if e.conj() != *e {
                return Err(Error::InvalidParameter(format!("energy at site {i} is not real")));
            }
        }
        let alpha = alpha.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        Ok(ExclusionParams { sites, alpha, eta })
    }

    /// Nearest-neighbour chain `1..=n` with all amplitudes `amp` and no energy.
    pub fn chain(n: u32, amp: S) -> Self {
        let mut alpha = BTreeMap::new();
        for i in 1..n {
            alpha.insert((i, i + 1), amp.clone());
            alpha.insert((i + 1, i), amp.clone());
        }
        ExclusionParams { sites: (1..=n).collect(), alpha, eta: BTreeMap::new() }
    }

    pub fn alpha(&self, i: Site, j: Site) -> S {
        self.alpha.get(&(i, j)).cloned().unwrap_or_else(S::zero)
    }

    pub fn eta(&self, i: Site) -> S {
        self.eta.get(&i).cloned().unwrap_or_else(S::zero)
    }

    /// `supp(i) = {j : α_{i,j} ≠ 0}`.
    pub fn supp(&self, i: Site) -> Vec<Site> {
        self.alpha.keys().filter(|&&(a, _)| a == i).map(|&(_, j)| j).collect()
    }

    pub fn supp_plus(&self, i: Site) -> Vec<Site> {
        let mut s = self.supp(i);
        s.push(i);
        s.sort_unstable();
        s.dedup();
        s
    }

    /// `J⁺ = ∪_{k∈J} supp⁺(k)`.
    pub fn enlarge(&self, j: &[Site]) -> Vec<Site> {
        let mut out: Vec<Site> = j.iter().flat_map(|&k| self.supp_plus(k)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `|α_{i,j}| = |α_{j,i}|` for all pairs.
    pub fn is_symmetric(&self) -> bool {
        self.alpha.keys().all(|&(i, j)| self.alpha(i, j).norm_sqr() == self.alpha(j, i).norm_sqr())
    }

    /// Ordered pairs carrying a multiplicity vector `f_{i,j}`.
    pub fn pairs(&self) -> Vec<(Site, Site)> {
        let mut set: BTreeSet<(Site, Site)> = BTreeSet::new();
        for &(i, j) in self.alpha.keys() {
            set.insert((i, j));
            set.insert((j, i));
        }
        set.into_iter().collect()
    }

    /// `λ_i = −iη_i − ½ Σ_{j∈supp(i)} |α_{j,i}|²`.
    pub fn lambda(&self, i: Site) -> S {
        let mut acc = -(S::i() * self.eta(i));
        let half = S::from_ratio(1, 2);
        for j in self.supp(i) {
            acc = acc - half.clone() * self.alpha(j, i).norm_sqr();
        }
        acc
    }
}

/// The symmetric-exclusion generator: `π = id`, `δ_{i,j}(x) = [t_{i,j}, x]`
/// with `t_{i,j} = α_{i,j} b*_j b_i`, and
/// `τ(x) = i[h, x] − ½ Σ (t*[t, x] + [x, t*]t)`.
pub fn exclusion_generator<S: Scalar>(params: ExclusionParams<S>) -> Result<FlowGenerator<S>> {
    let alg = Algebra::<S>::car();
    let pairs = params.pairs();
    let labels = pairs.iter().map(|(i, j)| format!("f_{{{i},{j}}}")).collect();
    let basis = MultiplicityBasis::new(labels)?;
    let hops: Vec<AlgebraElement<S>> = pairs
        .iter()
        .map(|&(i, j)| (&bs(&alg, j) * &b(&alg, i)).scale(&params.alpha(i, j)))
        .collect();
    let hops_dag: Vec<AlgebraElement<S>> = hops.iter().map(AlgebraElement::star).collect();
    let numbers: Vec<(S, AlgebraElement<S>)> = params
        .sites
        .iter()
        .map(|&i| (params.eta(i), &bs(&alg, i) * &b(&alg, i)))
        .filter(|(e, _)| !e.is_zero())
        .collect();
    let d = pairs.len();
    let sites = Arc::new(params.sites.clone());
    let hops = Arc::new(hops);
    let hops_dag = Arc::new(hops_dag);

    let word = {
        let (alg, sites) = (alg.clone(), sites.clone());
        Arc::new(move |w: &BasisWord| -> Result<AlgebraElement<S>> {
            if let BasisWord::Car(cw) = w {
                if let Some(s) = cw.sites().find(|s| sites.binary_search(s).is_err()) {
                    return Err(Error::SupportEscapes(format!("site {s} of {w} is outside {sites:?}")));
                }
            }
            Ok(AlgebraElement::word(&alg, w.clone()))
        })
    };
    let pi = {
        let word = word.clone();
        Box::new(move |w: &BasisWord| {
            let x = word(w)?;
            Ok((1..=d).map(|k| ((k, k), x.clone())).collect())
        })
    };
    let delta = {
        let (word, hops) = (word.clone(), hops.clone());
        Box::new(move |w: &BasisWord| {
            let x = word(w)?;
            hops.iter().enumerate().map(|(k, t)| Ok((k + 1, t.commutator(&x)?))).collect()
        })
    };
    let delta_dag = {
        let (word, hops_dag) = (word.clone(), hops_dag.clone());
        Box::new(move |w: &BasisWord| {
            let x = word(w)?;
            hops_dag.iter().enumerate().map(|(k, td)| Ok((k + 1, x.commutator(td)?))).collect()
        })
    };
    let tau = {
        let alg = alg.clone();
        Box::new(move |w: &BasisWord| {
            let x = word(w)?;
            let mut out = AlgebraElement::zero(&alg);
            for (e, n) in &numbers {
                out.add_scaled(&(S::i() * e.clone()), &n.commutator(&x)?);
            }
            let half = -S::from_ratio(1, 2);
            for (t, td) in hops.iter().zip(hops_dag.iter()) {
                let a = td * &t.commutator(&x)?;
                let c = &x.commutator(td)? * t;
                out.add_scaled(&half, &(&a + &c));
            }
            Ok(out)
        })
    };
    Ok(FlowGenerator::from_components(
        &alg,
        basis,
        Family::Exclusion(params),
        Components { pi, delta, delta_dag: Some(delta_dag), tau },
    ))
}

impl<S: Scalar> FlowGenerator<S> {
    pub fn exclusion_params(&self) -> Option<&ExclusionParams<S>> {
        match self.family() {
            Family::Exclusion(p) => Some(p),
            _ => None,
        }
    }

    /// `B_{i,j} = 1{j=i}λ_i|ω⟩⟨ω| + |ω⟩⟨α_{i,j} f_{i,j}| − |α_{j,i} f_{j,i}⟩⟨ω|`
    /// as a dense `(1+d)×(1+d)` matrix.
    pub fn exclusion_b(&self, i: Site, j: Site) -> Result<Vec<Vec<S>>> {
        let p = self.exclusion_params().ok_or_else(|| Error::InvalidParameter("not an exclusion generator".into()))?;
        let dim = self.dim();
        let mut m = vec![vec![S::zero(); dim]; dim];
        if i == j {
            m[0][0] = p.lambda(i);
        }
        if let Some(k) = self.basis().index_of(&format!("f_{{{i},{j}}}")) {
            m[0][k] = m[0][k].clone() + p.alpha(i, j).conj();
        }
        if let Some(k) = self.basis().index_of(&format!("f_{{{j},{i}}}")) {
            m[k][0] = m[k][0].clone() - p.alpha(j, i);
        }
        Ok(m)
    }
}

// ---------------------------------------------------------------- torus

fn torus_lambda<S: Scalar>(alg: &Algebra<S>) -> Result<S> {
    match alg {
        Algebra::Torus { lambda } => Ok(lambda.clone()),
        _ => Err(Error::AlgebraMismatch),
    }
}

fn torus_mn(w: &BasisWord) -> (i64, i64) {
    match w {
        BasisWord::Torus { m, n } => (*m, *n),
        _ => unreachable!("torus rule applied to {w:?}"),
    }
}

/// The two-noise torus generator: `δ = (c1·ₐδ, c2·δ_b)`, gauge diagonal
/// `(π_{1,λ^a} − id, π_{λ^{−b},1} − id)` and
/// `τ(U^mV^n) = −½(|c1|²m² + |c2|²n²)U^mV^n`.
pub fn torus_generator<S: Scalar>(alg: &Arc<Algebra<S>>, a: i64, b_: i64, c1: S, c2: S) -> Result<FlowGenerator<S>> {
    let lambda = torus_lambda(alg)?;
    let w_ = |alg: &Arc<Algebra<S>>, c: S, m: i64, n: i64| AlgebraElement::term(alg, c, BasisWord::Torus { m, n });
    let pi = {
        let (alg, l) = (alg.clone(), lambda.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n) = torus_mn(w);
            Ok(vec![((1, 1), w_(&alg, l.powi(a * n), m, n)), ((2, 2), w_(&alg, l.powi(-b_ * m), m, n))])
        })
    };
    let delta = {
        let (alg, l, c1, c2) = (alg.clone(), lambda.clone(), c1.clone(), c2.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n) = torus_mn(w);
            Ok(vec![
                (1, w_(&alg, c1.clone() * S::from_i64(m), a + m, n)),
                (2, w_(&alg, c2.clone() * S::from_i64(n) * l.powi(-b_ * m), m, b_ + n)),
            ])
        })
    };
    let delta_dag = {
        let (alg, l, c1, c2) = (alg.clone(), lambda.clone(), c1.clone(), c2.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n) = torus_mn(w);
            Ok(vec![
                (1, w_(&alg, -(c1.conj() * S::from_i64(m) * l.powi(a * n)), m - a, n)),
                (2, w_(&alg, -(c2.conj() * S::from_i64(n)), m, n - b_)),
            ])
        })
    };
    let tau = {
        let (alg, k1, k2) = (alg.clone(), c1.norm_sqr(), c2.norm_sqr());
        Box::new(move |w: &BasisWord| {
            let (m, n) = torus_mn(w);
            let c = -(k1.clone() * S::from_i64(m * m) + k2.clone() * S::from_i64(n * n)) * S::from_ratio(1, 2);
            Ok(w_(&alg, c, m, n))
        })
    };
    Ok(FlowGenerator::from_components(
        alg,
        MultiplicityBasis::numbered(2),
        Family::Torus { a, b: b_, c1, c2 },
        Components { pi, delta, delta_dag: Some(delta_dag), tau },
    ))
}

/// The gauge torus generator: `δ(U^mV^n) = (1 − μ^mν^n)/(1 − μ)·U^mV^n`,
/// `δ† = −μδ`, `τ = μ(1 − μ)⁻¹δ`, gauge block `π_{μ,ν} − id`.
pub fn torus_gauge_generator<S: Scalar>(alg: &Arc<Algebra<S>>, mu: S, nu: S) -> Result<FlowGenerator<S>> {
    torus_lambda(alg)?;
    if mu == S::one() || (mu.to_c64() - crate::scalar::C64::new(1.0, 0.0)).norm() < 1e-14 {
        return Err(Error::InvalidParameter("mu must differ from 1".into()));
    }
    for (name, v) in [("mu", &mu), ("nu", &nu)] {
        if (v.abs() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("|{name}| must be 1")));
        }
    }
    let phase = {
        let (mu, nu) = (mu.clone(), nu.clone());
        move |m: i64, n: i64| mu.powi(m) * nu.powi(n)
    };
    let coef = {
        let (mu, phase) = (mu.clone(), phase.clone());
        move |m: i64, n: i64| (S::one() - phase(m, n)) / (S::one() - mu.clone())
    };
    let w_ = |alg: &Arc<Algebra<S>>, c: S, w: &BasisWord| AlgebraElement::term(alg, c, w.clone());
    let pi = {
        let alg = alg.clone();
        Box::new(move |w: &BasisWord| {
            let (m, n) = torus_mn(w);
            Ok(vec![((1, 1), w_(&alg, phase(m, n), w))])
        })
    };
    let delta = {
        let (alg, coef) = (alg.clone(), coef.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n) = torus_mn(w);
            Ok(vec![(1, w_(&alg, coef(m, n), w))])
        })
    };
    let delta_dag = {
        let (alg, coef, mu) = (alg.clone(), coef.clone(), mu.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n) = torus_mn(w);
            Ok(vec![(1, w_(&alg, -(mu.clone() * coef(m, n)), w))])
        })
    };
    let tau = {
        let (alg, mu) = (alg.clone(), mu.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n) = torus_mn(w);
            let k = mu.clone() / (S::one() - mu.clone());
            Ok(w_(&alg, k * coef(m, n), w))
        })
    };
    Ok(FlowGenerator::from_components(
        alg,
        MultiplicityBasis::numbered(1),
        Family::TorusGauge { mu, nu },
        Components { pi, delta, delta_dag: Some(delta_dag), tau },
    ))
}

// ------------------------------------------------------------- rotation

/// The Bellissard map on the rotation algebra: `δ = c1δ_1 + c2δ_2`, `π = id`
/// and `τ(U^mV^nZ^p) = −(½|c1|²m² + ½|c2|²n² + c̄1c2·mn + (c̄1c2 − c1c̄2)p)`.
pub fn rotation_generator<S: Scalar>(c1: S, c2: S) -> Result<FlowGenerator<S>> {
    let alg = Algebra::<S>::rotation();
    let mnp = |w: &BasisWord| match w {
        BasisWord::Rotation { m, n, p } => (*m, *n, *p),
        _ => unreachable!("rotation rule applied to {w:?}"),
    };
    let w_ = |alg: &Arc<Algebra<S>>, c: S, w: &BasisWord| AlgebraElement::term(alg, c, w.clone());
    let pi = {
        let alg = alg.clone();
        Box::new(move |w: &BasisWord| Ok(vec![((1, 1), w_(&alg, S::one(), w))]))
    };
    let delta = {
        let (alg, c1, c2) = (alg.clone(), c1.clone(), c2.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n, _) = mnp(w);
            Ok(vec![(1, w_(&alg, c1.clone() * S::from_i64(m) + c2.clone() * S::from_i64(n), w))])
        })
    };
    let delta_dag = {
        let (alg, c1, c2) = (alg.clone(), c1.clone(), c2.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n, _) = mnp(w);
            Ok(vec![(1, w_(&alg, -(c1.conj() * S::from_i64(m) + c2.conj() * S::from_i64(n)), w))])
        })
    };
    let tau = {
        let (alg, c1, c2) = (alg.clone(), c1.clone(), c2.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n, p) = mnp(w);
            let half = S::from_ratio(1, 2);
            let x = c1.conj() * c2.clone();
            let c = half.clone() * c1.norm_sqr() * S::from_i64(m * m)
                + half * c2.norm_sqr() * S::from_i64(n * n)
                + x.clone() * S::from_i64(m * n)
                + (x.clone() - x.conj()) * S::from_i64(p);
            Ok(w_(&alg, -c, w))
        })
    };
    Ok(FlowGenerator::from_components(
        &alg,
        MultiplicityBasis::numbered(1),
        Family::Rotation { c1, c2 },
        Components { pi, delta, delta_dag: Some(delta_dag), tau },
    ))
}

// -------------------------------------------------------------- bounded

/// A diagonal automorphism acting on basis words by a phase.
#[derive(Clone, Debug, PartialEq)]
pub enum WordAutomorphism<S> {
    Identity,
    /// CAR parity: `(−1)^{|w|}` on a word of length `|w|`.
    Parity,
    /// `U^mV^n ↦ μ^mν^n U^mV^n`.
    TorusGauge { mu: S, nu: S },
}

impl<S: Scalar> WordAutomorphism<S> {
    pub fn phase(&self, w: &BasisWord) -> S {
        match (self, w) {
            (WordAutomorphism::Identity, _) => S::one(),
            (WordAutomorphism::Parity, BasisWord::Car(cw)) => {
                if (cw.cr.len() + cw.an.len()) % 2 == 0 {
                    S::one()
                } else {
                    -S::one()
                }
            }
            (WordAutomorphism::TorusGauge { mu, nu }, BasisWord::Torus { m, n }) => mu.powi(*m) * nu.powi(*n),
            _ => S::one(),
        }
    }
}

/// Data for the bounded form: self-adjoint `h`, `z = Σ z_k ⊗ |f_k⟩` and
/// `π = diag(θ_1, …, θ_d)`.
#[derive(Clone, Debug)]
pub struct BoundedData<S: Scalar> {
    pub h: AlgebraElement<S>,
    pub z: Vec<AlgebraElement<S>>,
    pub theta: Vec<WordAutomorphism<S>>,
}

/// `δ(x) = zx − π(x)z`, `τ(x) = i[h, x] − ½{z*z, x} + z*π(x)z`.
pub fn bounded_generator<S: Scalar>(data: BoundedData<S>) -> Result<FlowGenerator<S>> {
    let d = data.z.len();
    if data.theta.len() != d {
        return Err(Error::LengthMismatch { expected: d, got: data.theta.len() });
    }
    if data.h.star() != data.h {
        return Err(Error::InvalidParameter("h must be self-adjoint".into()));
    }
    let alg = data.h.algebra().clone();
    for z in &data.z {
        if !z.same_algebra(&data.h) {
            return Err(Error::AlgebraMismatch);
        }
    }
    let z = Arc::new(data.z);
    let zs: Arc<Vec<AlgebraElement<S>>> = Arc::new(z.iter().map(AlgebraElement::star).collect());
    let mut zz = AlgebraElement::zero(&alg);
    for (a, b_) in zs.iter().zip(z.iter()) {
        zz = &zz + &(a * b_);
    }
    let theta = Arc::new(data.theta);
    let h = data.h;

    let pi = {
        let (alg, theta) = (alg.clone(), theta.clone());
        Box::new(move |w: &BasisWord| {
            Ok((0..d)
                .map(|k| ((k + 1, k + 1), AlgebraElement::term(&alg, theta[k].phase(w), w.clone())))
                .collect())
        })
    };
    let delta = {
        let (alg, theta, z) = (alg.clone(), theta.clone(), z.clone());
        Box::new(move |w: &BasisWord| {
            let x = AlgebraElement::word(&alg, w.clone());
            Ok((0..d)
                .map(|k| {
                    let px = x.scale(&theta[k].phase(w));
                    (k + 1, &(&z[k] * &x) - &(&px * &z[k]))
                })
                .collect())
        })
    };
    let tau = {
        let alg = alg.clone();
        Box::new(move |w: &BasisWord| {
            let x = AlgebraElement::word(&alg, w.clone());
            let mut out = h.commutator(&x)?.scale(&S::i());
            out.add_scaled(&-S::from_ratio(1, 2), &zz.anticommutator(&x)?);
            for k in 0..d {
                let px = x.scale(&theta[k].phase(w));
                out = &out + &(&(&zs[k] * &px) * &z[k]);
            }
            Ok(out)
        })
    };
    Ok(FlowGenerator::from_components(
        &alg,
        MultiplicityBasis::numbered(d),
        Family::Bounded,
        Components { pi, delta, delta_dag: None, tau },
    ))
}

// ------------------------------------------------------------ generators

impl<S: Scalar> FlowGenerator<S> {
    /// A generating set of the algebra appropriate for the family.
    pub fn generating_elements(&self) -> Vec<AlgebraElement<S>> {
        let alg = self.algebra();
        match (self.family(), alg.as_ref()) {
            (Family::Walk { group, moves, .. }, _) => group
                .ball(&[group.identity()], moves, 1)
                .into_iter()
                .map(|g| AlgebraElement::word(alg, BasisWord::GroupFn(g)))
                .collect(),
            (Family::Exclusion(p), _) => {
                p.sites.iter().flat_map(|&i| [b(alg, i), bs(alg, i)]).collect()
            }
            (_, Algebra::Torus { .. }) => vec![uv(alg, 1, 0), uv(alg, 0, 1), uv(alg, -1, 0), uv(alg, 0, -1)],
            (_, Algebra::Rotation) => vec![
                uvz(alg, 1, 0, 0),
                uvz(alg, 0, 1, 0),
                uvz(alg, 0, 0, 1),
                uvz(alg, -1, 0, 0),
                uvz(alg, 0, -1, 0),
                uvz(alg, 0, 0, -1),
            ],
            _ => vec![],
        }
    }
}

// ------------------------------------------------------------------ nogo

#[derive(Clone, Debug)]
pub struct NogoReport {
    /// `c1·c̄2 = c̄1·c2`.
    pub compatible: bool,
    /// `c1·c̄2` as a float pair.
    pub product: (f64, f64),
    /// Validation of the diagonal witness generator on `{U, V}`.
    pub witness: VerificationReport,
}

/// Decides whether `δ = c1·₀δ + c2·δ_0` admits a compatible `τ` on the
/// torus, and runs the diagonal candidate
/// `τ(U^mV^n) = −(½|c1|²m² + ½|c2|²n² + c̄1c2·mn)U^mV^n` through `validate`
/// on `{U, V}` as a witness (it passes exactly when compatible).
pub fn nogo_check<S: Scalar>(c1: S, c2: S) -> Result<NogoReport> {
    let prod = c1.clone() * c2.conj();
    let compatible = if S::EXACT { prod == prod.conj() } else { prod.to_c64().im.abs() <= 1e-12 * prod.abs().max(1.0) };
    let alg = Algebra::torus(S::i())?;
    let w_ = |alg: &Arc<Algebra<S>>, c: S, w: &BasisWord| AlgebraElement::term(alg, c, w.clone());
    let pi = {
        let alg = alg.clone();
        Box::new(move |w: &BasisWord| Ok(vec![((1, 1), w_(&alg, S::one(), w))]))
    };
    let delta = {
        let (alg, c1, c2) = (alg.clone(), c1.clone(), c2.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n) = torus_mn(w);
            Ok(vec![(1, w_(&alg, c1.clone() * S::from_i64(m) + c2.clone() * S::from_i64(n), w))])
        })
    };
    let tau = {
        let (alg, c1, c2) = (alg.clone(), c1.clone(), c2.clone());
        Box::new(move |w: &BasisWord| {
            let (m, n) = torus_mn(w);
            let half = S::from_ratio(1, 2);
            let c = half.clone() * c1.norm_sqr() * S::from_i64(m * m)
                + half * c2.norm_sqr() * S::from_i64(n * n)
                + c1.conj() * c2.clone() * S::from_i64(m * n);
            Ok(w_(&alg, -c, w))
        })
    };
    let phi = FlowGenerator::from_components(
        &alg,
        MultiplicityBasis::numbered(1),
        Family::Custom,
        Components { pi, delta, delta_dag: None, tau },
    );
    let tol = if S::EXACT { 0.0 } else { 1e-12 };
    let mut witness = validate(&phi, &[uv(&alg, 1, 0), uv(&alg, 0, 1)], tol)?;
    witness.title = "nogo witness".into();
    let p = prod.to_c64();
    Ok(NogoReport { compatible, product: (p.re, p.im), witness })
}
