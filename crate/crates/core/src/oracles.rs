//! Brute-force references computed without the flow-generator machinery:
//! truncated CTMC exponentials for group walks, the torus multiplier, the
//! Jordan–Wigner superoperator exponential for the exclusion process, and a
//! Choi-matrix positivity test.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::car::{all_words, jw_annihilator, jw_word};
use crate::algebra::json::element_to_json;
use crate::algebra::{Algebra, AlgebraElement, BasisWord, GroupAdapter, GroupElem, GroupSpec, Site};
use crate::error::{Error, Result};
use crate::generator::{ExclusionParams, TransitionSpec};
use crate::report::fmt_e12;
use crate::scalar::{Scalar, C64};

/// Largest site set accepted by the superoperator oracle.
pub const SUPEROP_MAX_SITES: usize = 5;
/// Choi matrices pass when their smallest eigenvalue is at least `−CHOI_TOL`.
pub const CHOI_TOL: f64 = 1e-10;
/// Accuracy assumed for dense matrix exponentials.
pub const EXPM_TOL: f64 = 1e-12;

const MAX_PADDING_ROUNDS: usize = 8;
const MAX_PADDED_STATES: usize = 4000;

fn to_c64s<S: Scalar>(xs: &[TransitionSpec<S>]) -> Vec<TransitionSpec<C64>> {
    xs.iter()
        .map(|t| match t {
            TransitionSpec::Constant(c) => TransitionSpec::Constant(c.to_c64()),
            TransitionSpec::Power { base } => TransitionSpec::Power { base: base.to_c64() },
            TransitionSpec::ZeroBelow { threshold, value } => {
                TransitionSpec::ZeroBelow { threshold: *threshold, value: value.to_c64() }
            }
            TransitionSpec::Table { values, default } => TransitionSpec::Table {
                values: values.iter().map(|(g, c)| (g.clone(), c.to_c64())).collect(),
                default: default.to_c64(),
            },
        })
        .collect()
}

/// `e^{tL}x` on an inner window, with the escape bound for the padded
/// truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct CtmcResult {
    pub window: Vec<GroupElem>,
    /// `(e^{tL}x)(g)` for `g` in the window, constant part included.
    pub values: Vec<C64>,
    /// Row sums of the truncated `e^{tL}` on the window.
    pub row_sums: Vec<f64>,
    pub padding: usize,
    pub states: usize,
    pub error_bound: f64,
}

impl CtmcResult {
    pub fn to_json(&self, group: &GroupSpec) -> Value {
        let values: Vec<Value> = self
            .window
            .iter()
            .zip(&self.values)
            .map(|(g, v)| json!({ "g": group.canonical(g), "re": v.re, "im": v.im }))
            .collect();
        json!({ "values": values, "padding": self.padding, "states": self.states, "error_bound": self.error_bound })
    }

    pub fn to_csv(&self, group: &GroupSpec) -> String {
        let mut s = String::from("g,re,im,row_sum\n");
        for ((g, v), r) in self.window.iter().zip(&self.values).zip(&self.row_sums) {
            s += &format!("{},{},{},{}\n", group.canonical(g), fmt_e12(v.re), fmt_e12(v.im), fmt_e12(*r));
        }
        s
    }
}

fn exit_rate(rates: &[TransitionSpec<C64>], g: &GroupElem) -> f64 {
    rates.iter().map(|t| t.at(g).norm_sqr()).sum()
}

/// The classical walk with jumps `g → hg` at rate `|t_h(g)|²`, started from
/// each window state, applied to the group function `x`. The chain lives
/// on the ball of radius `m = ⌈6·rate·t + 10⌉` around the window and the
/// support of `x` and is killed on leaving it; the killing probability is
/// at most `(rate·t)^m/m!`.
pub fn ctmc_expm<S: Scalar>(
    group: &GroupSpec,
    moves: &[GroupElem],
    transitions: &[TransitionSpec<S>],
    window: &[GroupElem],
    t: f64,
    x: &AlgebraElement<C64>,
) -> Result<CtmcResult> {
    let Algebra::Group(spec) = x.algebra().as_ref() else {
        return Err(Error::AlgebraMismatch);
    };
    if spec != group {
        return Err(Error::AlgebraMismatch);
    }
    if moves.len() != transitions.len() {
        return Err(Error::LengthMismatch { expected: moves.len(), got: transitions.len() });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be finite and nonnegative, got {t}")));
    }
    let rates = to_c64s(transitions);
    let constant = x.unit_coeff();
    let mut window: Vec<GroupElem> = window.to_vec();
    window.sort();
    window.dedup();
    let mut seeds = window.clone();
    for w in x.terms().keys() {
        if let BasisWord::GroupFn(g) = w {
            seeds.push(g.clone());
        }
    }

    let mut rate = seeds.iter().map(|g| exit_rate(&rates, g)).fold(0.0, f64::max);
    let mut states = seeds.clone();
    let mut padding = 0;
    let mut settled = false;
    for _ in 0..MAX_PADDING_ROUNDS {
        let pad = (6.0 * rate * t + 10.0).ceil();
        if pad > MAX_PADDED_STATES as f64 {
            return Err(Error::ResourceCap { entries: pad as usize, cap: MAX_PADDED_STATES });
        }
        padding = pad as usize;
        states = group.ball(&seeds, moves, padding);
        if states.len() > MAX_PADDED_STATES {
            return Err(Error::ResourceCap { entries: states.len(), cap: MAX_PADDED_STATES });
        }
        let r = states.iter().map(|g| exit_rate(&rates, g)).fold(0.0, f64::max);
        if r <= rate {
            settled = true;
            break;
        }
        rate = r;
    }
    if !settled {
        return Err(Error::InvalidParameter("window too small: rates keep growing with the padding".into()));
    }

    let index: BTreeMap<&GroupElem, usize> = states.iter().enumerate().map(|(k, g)| (g, k)).collect();
    let n = states.len();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for (a, g) in states.iter().enumerate() {
        for (h, th) in moves.iter().zip(&rates) {
            let r = th.at(g).norm_sqr();
            if r == 0.0 {
                continue;
            }
            l[(a, a)] -= r;
            if let Some(&b) = index.get(&group.multiply(h, g)) {
                l[(a, b)] += r;
            }
        }
    }
    let e = (l * t).exp();

    let mut f = DVector::<C64>::zeros(n);
    let mut sup: f64 = 0.0;
    for (w, c) in x.terms() {
        if let BasisWord::GroupFn(g) = w {
            f[index[g]] = *c;
            sup = sup.max(c.norm());
        }
    }
    let ec = e.map(|v| C64::new(v, 0.0));
    let ef = &ec * &f;

    let mut values = Vec::with_capacity(window.len());
    let mut row_sums = Vec::with_capacity(window.len());
    for g in &window {
        let a = index[g];
        values.push(constant + ef[a]);
        row_sums.push(e.row(a).sum());
    }
    let rt = rate * t;
    let mut escape = 1.0;
    for k in 1..=padding {
        escape *= rt / k as f64;
    }
    let error_bound = sup * escape + EXPM_TOL * sup.max(constant.norm());
    Ok(CtmcResult { window, values, row_sums, padding, states: n, error_bound })
}

/// `e^{−t(|c1|²m² + |c2|²n²)/2}`.
pub fn torus_multiplier(t: f64, m: i64, n: i64, c1: C64, c2: C64) -> C64 {
    let (m, n) = (m as f64, n as f64);
    C64::new((-t * (c1.norm_sqr() * m * m + c2.norm_sqr() * n * n) / 2.0).exp(), 0.0)
}

/// The exclusion generator `τ` as a matrix on `vec(X)` (column-major) for
/// `X` in the Jordan–Wigner representation on `sites`.
#[derive(Clone, Debug)]
pub struct CarSuperop {
    pub sites: Vec<Site>,
    pub matrix: DMatrix<C64>,
}

impl CarSuperop {
    /// `τ(X) = i[H, X] − ½Σ(T*T X + X T*T) + Σ T* X T`, `H = Σ η_i b*_i b_i`
    /// and `T = α_{i,j} b*_j b_i`, built from `vec(AXB) = (Bᵀ ⊗ A) vec X`.
    pub fn new<S: Scalar>(params: &ExclusionParams<S>) -> Result<Self> {
        let sites = params.sites.clone();
        if sites.len() > SUPEROP_MAX_SITES {
            return Err(Error::ResourceCap { entries: sites.len(), cap: SUPEROP_MAX_SITES });
        }
        let dim = 1usize << sites.len();
        let id = DMatrix::<C64>::identity(dim, dim);
        let ann: BTreeMap<Site, DMatrix<C64>> =
            sites.iter().map(|&s| Ok((s, jw_annihilator(&sites, s)?))).collect::<Result<_>>()?;
        let mut h = DMatrix::<C64>::zeros(dim, dim);
        for (&s, a) in &ann {
            h += a.adjoint() * a * params.eta(s).to_c64();
        }
        let i = C64::new(0.0, 1.0);
        let mut l = (id.kronecker(&h) - h.transpose().kronecker(&id)) * i;
        for (&(p, q), amp) in &params.alpha {
            let t = ann[&q].adjoint() * &ann[&p] * amp.to_c64();
            let td = t.adjoint();
            let tt = &td * &t;
            l -= (id.kronecker(&tt) + tt.transpose().kronecker(&id)) * C64::new(0.5, 0.0);
            l += t.transpose().kronecker(&td);
        }
        Ok(CarSuperop { sites, matrix: l })
    }

    pub fn dim(&self) -> usize {
        1 << self.sites.len()
    }

    pub fn apply(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        apply_vec(&self.matrix, x)
    }

    pub fn expm(&self, t: f64) -> DMatrix<C64> {
        (&self.matrix * C64::new(t, 0.0)).exp()
    }
}

fn apply_vec(op: &DMatrix<C64>, x: &DMatrix<C64>) -> DMatrix<C64> {
    let n = x.nrows();
    let v = DVector::from_column_slice(x.as_slice());
    let out = op * v;
    DMatrix::from_column_slice(n, n, out.as_slice())
}

/// Normal-ordered CAR element with the given Jordan–Wigner matrix. The
/// images of the `4^|J|` normal words form a basis of the matrix algebra,
/// so the coefficients solve a square linear system.
pub fn car_from_matrix(alg: &std::sync::Arc<Algebra<C64>>, sites: &[Site], m: &DMatrix<C64>) -> Result<AlgebraElement<C64>> {
    let words = all_words(sites);
    let dim = 1usize << sites.len();
    let n = words.len();
    let mut basis = DMatrix::<C64>::zeros(dim * dim, n);
    for (k, w) in words.iter().enumerate() {
        let jw = jw_word(sites, w)?;
        basis.column_mut(k).copy_from_slice(jw.as_slice());
    }
    let rhs = DVector::from_column_slice(m.as_slice());
    let coef = basis
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("Jordan–Wigner word images are singular".into()))?;
    let terms = words.into_iter().zip(coef.iter()).map(|(w, c)| (BasisWord::Car(w), *c));
    AlgebraElement::from_terms(alg, terms)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleElement {
    pub value: AlgebraElement<C64>,
    pub error_bound: f64,
}

impl OracleElement {
    pub fn to_json(&self) -> Value {
        json!({ "value": element_to_json(&self.value), "error_bound": self.error_bound })
    }
}

/// `e^{tτ}(x)` for the exclusion process, through the dense superoperator.
pub fn car_superop_expm<S: Scalar>(params: &ExclusionParams<S>, t: f64, x: &AlgebraElement<C64>) -> Result<OracleElement> {
    if !matches!(x.algebra().as_ref(), Algebra::Car) {
        return Err(Error::AlgebraMismatch);
    }
    if let Some(s) = x.car_sites().into_iter().find(|s| params.sites.binary_search(s).is_err()) {
        return Err(Error::SiteOutside(s));
    }
    let op = CarSuperop::new(params)?;
    let xm = x.jw_matrix(&op.sites)?;
    let ym = apply_vec(&op.expm(t), &xm);
    let value = car_from_matrix(x.algebra(), &op.sites, &ym)?;
    let scale = x.norm_bound().value.max(1.0);
    Ok(OracleElement { value, error_bound: EXPM_TOL * scale * op.dim() as f64 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChoiReport {
    pub t: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

/// Smallest eigenvalue of the Choi matrix `Σ |i⟩⟨j| ⊗ e^{tτ}(|i⟩⟨j|)`.
pub fn choi_positivity(op: &CarSuperop, t: f64) -> ChoiReport {
    let dim = op.dim();
    let e = op.expm(t);
    let mut choi = DMatrix::<C64>::zeros(dim * dim, dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let col = e.column(i + j * dim);
            for b in 0..dim {
                for a in 0..dim {
                    choi[(i * dim + a, j * dim + b)] = col[a + b * dim];
                }
            }
        }
    }
    let herm = (&choi + choi.adjoint()) * C64::new(0.5, 0.0);
    let min_eigenvalue = SymmetricEigen::new(herm).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    ChoiReport { t, min_eigenvalue, pass: min_eigenvalue >= -CHOI_TOL }
}
