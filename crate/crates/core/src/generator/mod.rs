//! Flow generators `φ : A_0 → A_0 ⊗ B(K̂)` stored by their action on basis
//! words.
//!
//! Block layout over `{ω, f_1, …, f_d}`:
//!
//! ```text
//! [ τ(x)   δ†(x)          ]
//! [ δ(x)   π(x) − x ⊗ 1   ]
//! ```

pub mod builders;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::algebra::{Algebra, AlgebraElement, BasisWord};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use builders::{
    bounded_generator, WordAutomorphism, exclusion_generator, nogo_check, rotation_generator, torus_gauge_generator,
    torus_generator, walk_generator, BoundedData, ExclusionParams, NogoReport, TransitionSpec,
};
pub use validate::{carre_du_champ, default_sample, validate};

/// Labels of an orthonormal basis of `K`; index 0 of `K̂` is `ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityBasis {
    labels: Vec<String>,
}

impl MultiplicityBasis {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::InvalidParameter(format!("duplicate multiplicity label {l:?}")));
            }
        }
        Ok(MultiplicityBasis { labels })
    }

    /// `f_1, …, f_d`.
    pub fn numbered(d: usize) -> Self {
        MultiplicityBasis { labels: (1..=d).map(|k| format!("f_{k}")).collect() }
    }

    pub fn d(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label).map(|k| k + 1)
    }

    /// `ξ̂ = ω + ξ` as coordinates `(1, ξ_1, …, ξ_d)`.
    pub fn hat<S: Scalar>(&self, xi: &[S]) -> Result<Vec<S>> {
        if xi.len() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), got: xi.len() });
        }
        let mut v = Vec::with_capacity(xi.len() + 1);
        v.push(S::one());
        v.extend(xi.iter().cloned());
        Ok(v)
    }
}

/// A `(1+d)×(1+d)` array of algebra elements, stored sparsely.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMatrix<S: Scalar> {
    algebra: Arc<Algebra<S>>,
    dim: usize,
    entries: BTreeMap<(usize, usize), AlgebraElement<S>>,
}

impl<S: Scalar> GeneratorMatrix<S> {
    pub fn zero(algebra: &Arc<Algebra<S>>, dim: usize) -> Self {
        GeneratorMatrix { algebra: algebra.clone(), dim, entries: BTreeMap::new() }
    }

    /// `x ⊗ m` for a scalar matrix `m`.
    pub fn from_scalar_matrix(x: &AlgebraElement<S>, m: &[Vec<S>]) -> Self {
        let mut out = Self::zero(x.algebra(), m.len());
        for (i, row) in m.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                out.add(i, j, &x.scale(c));
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn algebra(&self) -> &Arc<Algebra<S>> {
        &self.algebra
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), AlgebraElement<S>> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> AlgebraElement<S> {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(|| AlgebraElement::zero(&self.algebra))
    }

    pub fn add(&mut self, i: usize, j: usize, x: &AlgebraElement<S>) {
        assert!(i < self.dim && j < self.dim, "block ({i},{j}) outside dimension {}", self.dim);
        if x.is_zero() {
            return;
        }
        let sum = match self.entries.get(&(i, j)) {
            Some(old) => old + x,
            None => x.clone(),
        };
        if sum.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), sum);
        }
    }

    pub fn add_scaled(&mut self, c: &S, other: &Self) {
        for (&(i, j), x) in &other.entries {
            self.add(i, j, &x.scale(c));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&-S::one(), other);
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&S::one(), other);
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(&self.algebra, self.dim);
        out.add_scaled(c, self);
        out
    }

    /// `A (y ⊗ 1)`.
    pub fn mul_right(&self, y: &AlgebraElement<S>) -> Self {
        let mut out = Self::zero(&self.algebra, self.dim);
        for (&(i, j), x) in &self.entries {
            out.add(i, j, &(x * y));
        }
        out
    }

    /// `(x ⊗ 1) A`.
    pub fn mul_left(&self, x: &AlgebraElement<S>) -> Self {
        let mut out = Self::zero(&self.algebra, self.dim);
        for (&(i, j), y) in &self.entries {
            out.add(i, j, &(x * y));
        }
        out
    }

    /// `A B`, or `A Δ B` when `skip_vacuum` drops the middle index 0.
    pub fn matmul(&self, other: &Self, skip_vacuum: bool) -> Self {
        let mut out = Self::zero(&self.algebra, self.dim);
        let mut by_row: BTreeMap<usize, Vec<(usize, &AlgebraElement<S>)>> = BTreeMap::new();
        for (&(k, j), y) in &other.entries {
            by_row.entry(k).or_default().push((j, y));
        }
        for (&(i, k), x) in &self.entries {
            if skip_vacuum && k == 0 {
                continue;
            }
            if let Some(row) = by_row.get(&k) {
                for &(j, y) in row {
                    out.add(i, j, &(x * y));
                }
            }
        }
        out
    }

    /// Blockwise adjoint: `(A†)_{ij} = (A_{ji})*`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.algebra, self.dim);
        for (&(i, j), x) in &self.entries {
            out.add(j, i, &x.star());
        }
        out
    }

    /// `Σ_{ij} ‖A_{ij}‖`-bound; zero exactly when the matrix is zero.
    pub fn residual(&self) -> f64 {
        self.entries.values().map(|x| x.norm_bound().value).sum()
    }

    /// The `(ξ, χ)` compression `Σ_ij conj(ξ_i) χ_j A_ij`.
    pub fn compress(&self, xi: &[S], chi: &[S]) -> Result<AlgebraElement<S>> {
        for v in [xi, chi] {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
            }
        }
        let mut out = AlgebraElement::zero(&self.algebra);
        for (&(i, j), x) in &self.entries {
            let c = xi[i].conj() * chi[j].clone();
            if !c.is_zero() {
                out.add_scaled(&c, x);
            }
        }
        Ok(out)
    }

    /// Rows and columns `1..dim` only.
    pub fn lower_right(&self) -> Self {
        let mut out = Self::zero(&self.algebra, self.dim);
        for (&(i, j), x) in &self.entries {
            if i > 0 && j > 0 {
                out.add(i, j, x);
            }
        }
        out
    }

    pub fn column0(&self) -> Self {
        let mut out = Self::zero(&self.algebra, self.dim);
        for (&(i, j), x) in &self.entries {
            if i > 0 && j == 0 {
                out.add(i, j, x);
            }
        }
        out
    }

    pub fn row0(&self) -> Self {
        let mut out = Self::zero(&self.algebra, self.dim);
        for (&(i, j), x) in &self.entries {
            if i == 0 && j > 0 {
                out.add(i, j, x);
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Display for GeneratorMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&(i, j), x) in &self.entries {
            writeln!(f, "[{i},{j}] {x}")?;
        }
        Ok(())
    }
}

/// Parameters of the builder that produced a generator.
#[derive(Clone, Debug, PartialEq)]
pub enum Family<S> {
    Custom,
    Bounded,
    Walk {
        group: crate::algebra::GroupSpec,
        moves: Vec<crate::algebra::GroupElem>,
        transitions: Vec<TransitionSpec<S>>,
    },
    Exclusion(ExclusionParams<S>),
    Torus { a: i64, b: i64, c1: S, c2: S },
    TorusGauge { mu: S, nu: S },
    Rotation { c1: S, c2: S },
}

impl<S> Family<S> {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Custom => "custom",
            Family::Bounded => "bounded",
            Family::Walk { .. } => "walk",
            Family::Exclusion(_) => "exclusion",
            Family::Torus { .. } => "torus",
            Family::TorusGauge { .. } => "torus_gauge",
            Family::Rotation { .. } => "rotation",
        }
    }
}

type Rule<S> = dyn Fn(&BasisWord) -> Result<GeneratorMatrix<S>> + Send + Sync;

/// Per-word component rules for [`FlowGenerator::from_components`]. Indices
/// of `π` and `δ` outputs are 1-based positions in `K̂`.
pub struct Components<S: Scalar> {
    pub pi: Box<dyn Fn(&BasisWord) -> Result<Vec<((usize, usize), AlgebraElement<S>)>> + Send + Sync>,
    pub delta: Box<dyn Fn(&BasisWord) -> Result<Vec<(usize, AlgebraElement<S>)>> + Send + Sync>,
    /// Explicit `δ†`; derived as `δ†(x) = δ(x*)*` when absent.
    pub delta_dag: Option<Box<dyn Fn(&BasisWord) -> Result<Vec<(usize, AlgebraElement<S>)>> + Send + Sync>>,
    pub tau: Box<dyn Fn(&BasisWord) -> Result<AlgebraElement<S>> + Send + Sync>,
}

pub struct FlowGenerator<S: Scalar> {
    algebra: Arc<Algebra<S>>,
    basis: MultiplicityBasis,
    family: Family<S>,
    rule: Box<Rule<S>>,
    cache: RwLock<HashMap<BasisWord, Arc<GeneratorMatrix<S>>>>,
}

impl<S: Scalar> fmt::Debug for FlowGenerator<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlowGenerator")
            .field("algebra", &self.algebra.family())
            .field("family", &self.family.tag())
            .field("d", &self.basis.d())
            .finish()
    }
}

impl<S: Scalar> FlowGenerator<S> {
    /// A generator from a raw word rule; the rule must return matrices of
    /// dimension `1 + d`.
    pub fn from_rule(
        algebra: &Arc<Algebra<S>>,
        basis: MultiplicityBasis,
        family: Family<S>,
        rule: impl Fn(&BasisWord) -> Result<GeneratorMatrix<S>> + Send + Sync + 'static,
    ) -> Self {
        FlowGenerator {
            algebra: algebra.clone(),
            basis,
            family,
            rule: Box::new(rule),
            cache: RwLock::new(HashMap::new()),
        }
    }

    /// Assembles the block matrix from `π`, `δ`, `δ†` and `τ`. No
    /// validation is performed.
    pub fn from_components(
        algebra: &Arc<Algebra<S>>,
        basis: MultiplicityBasis,
        family: Family<S>,
        parts: Components<S>,
    ) -> Self {
        let dim = basis.d() + 1;
        let alg = algebra.clone();
        let rule = move |w: &BasisWord| -> Result<GeneratorMatrix<S>> {
            let x = AlgebraElement::word(&alg, w.clone());
            let mut m = GeneratorMatrix::zero(&alg, dim);
            let check = |k: usize| {
                if k == 0 || k >= dim {
                    Err(Error::DimensionMismatch { expected: dim - 1, got: k })
                } else {
                    Ok(())
                }
            };
            m.add(0, 0, &(parts.tau)(w)?);
            for (k, v) in (parts.delta)(w)? {
                check(k)?;
                m.add(k, 0, &v);
            }
            let dag = match &parts.delta_dag {
                Some(rule) => rule(w)?,
                None => {
                    let (phase, sw) = alg.word_star(w);
                    let cp = phase.conj();
                    (parts.delta)(&sw)?.into_iter().map(|(k, v)| (k, v.star().scale(&cp))).collect()
                }
            };
            for (k, v) in dag {
                check(k)?;
                m.add(0, k, &v);
            }
            for ((i, j), v) in (parts.pi)(w)? {
                check(i)?;
                check(j)?;
                m.add(i, j, &v);
            }
            for k in 1..dim {
                m.add(k, k, &-&x);
            }
            Ok(m)
        };
        Self::from_rule(algebra, basis, family, rule)
    }

    pub fn algebra(&self) -> &Arc<Algebra<S>> {
        &self.algebra
    }

    pub fn basis(&self) -> &MultiplicityBasis {
        &self.basis
    }

    pub fn d(&self) -> usize {
        self.basis.d()
    }

    pub fn dim(&self) -> usize {
        self.basis.d() + 1
    }

    pub fn family(&self) -> &Family<S> {
        &self.family
    }

    /// `φ(w)` for a basis word (memoised).
    pub fn apply_word(&self, w: &BasisWord) -> Result<Arc<GeneratorMatrix<S>>> {
        if let Some(hit) = self.cache.read().expect("generator cache poisoned").get(w) {
            return Ok(hit.clone());
        }
        let m = (self.rule)(w)?;
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: m.dim() });
        }
        let m = Arc::new(m);
        self.cache.write().expect("generator cache poisoned").insert(w.clone(), m.clone());
        Ok(m)
    }

    pub fn apply(&self, x: &AlgebraElement<S>) -> Result<GeneratorMatrix<S>> {
        if !x.same_algebra(&AlgebraElement::zero(&self.algebra)) {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = GeneratorMatrix::zero(&self.algebra, self.dim());
        for (w, c) in x.terms() {
            out.add_scaled(c, self.apply_word(w)?.as_ref());
        }
        Ok(out)
    }

    pub fn tau(&self, x: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        Ok(self.apply(x)?.get(0, 0))
    }

    /// `δ(x)` as its `d` components.
    pub fn delta(&self, x: &AlgebraElement<S>) -> Result<Vec<AlgebraElement<S>>> {
        let m = self.apply(x)?;
        Ok((1..self.dim()).map(|k| m.get(k, 0)).collect())
    }

    pub fn delta_dag(&self, x: &AlgebraElement<S>) -> Result<Vec<AlgebraElement<S>>> {
        let m = self.apply(x)?;
        Ok((1..self.dim()).map(|k| m.get(0, k)).collect())
    }

    /// `π(x)` embedded in rows/cols `1..=d`.
    pub fn pi(&self, x: &AlgebraElement<S>) -> Result<GeneratorMatrix<S>> {
        let mut m = self.apply(x)?.lower_right();
        for k in 1..self.dim() {
            m.add(k, k, x);
        }
        Ok(m)
    }

    /// `φ^ξ_χ(x) = Σ_ij conj(ξ_i) χ_j φ(x)_ij` for `ξ, χ ∈ K̂`.
    pub fn slice_one(&self, x: &AlgebraElement<S>, xi: &[S], chi: &[S]) -> Result<AlgebraElement<S>> {
        self.apply(x)?.compress(xi, chi)
    }

    /// `φ(w) = Σ_{w'} w' ⊗ M_{w,w'}` with scalar matrices `M_{w,w'}`.
    pub fn word_decomposition(&self, w: &BasisWord) -> Result<BTreeMap<BasisWord, Vec<Vec<S>>>> {
        let m = self.apply_word(w)?;
        let dim = self.dim();
        let mut out: BTreeMap<BasisWord, Vec<Vec<S>>> = BTreeMap::new();
        for (&(i, j), x) in m.entries() {
            for (w2, c) in x.terms() {
                let mat = out.entry(w2.clone()).or_insert_with(|| vec![vec![S::zero(); dim]; dim]);
                mat[i][j] = mat[i][j].clone() + c.clone();
            }
        }
        Ok(out)
    }
}
