//! Concrete *-algebras over sparse basis expansions.
//!
//! Four families are supported:
//!
//! * `C_0(G) ⊕ C1` for a discrete group `G` (pointwise product, indicator
//!   basis `e_g` plus the adjoined unit);
//! * the CAR algebra, with words normal ordered as creators before
//!   annihilators, each list strictly increasing;
//! * the non-commutative torus `UV = λVU`, basis `U^m V^n`;
//! * the universal rotation algebra `UV = ZVU`, `Z` central, basis
//!   `U^m V^n Z^p`.
//!
//! Elements are finite maps from [`BasisWord`] to coefficients with no
//! stored zeros.

pub mod car;
pub mod group;
pub mod json;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;

pub use car::{CarWord, Site};
pub use group::{GroupAdapter, GroupElem, GroupSpec};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C64};

/// Largest site count for which Jordan–Wigner norms are computed.
pub const JW_NORM_MAX_SITES: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub enum Algebra<S> {
    Group(GroupSpec),
    Car,
    Torus { lambda: S },
    Rotation,
}

impl<S: Scalar> Algebra<S> {
    pub fn group(spec: GroupSpec) -> Arc<Self> {
        Arc::new(Algebra::Group(spec))
    }

    pub fn car() -> Arc<Self> {
        Arc::new(Algebra::Car)
    }

    pub fn torus(lambda: S) -> Result<Arc<Self>> {
        let modulus = lambda.abs();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("|lambda| = {modulus}, expected 1")));
        }
        if S::EXACT && lambda.norm_sqr() != S::one() {
            return Err(Error::InvalidParameter("lambda is not exactly unimodular".into()));
        }
        Ok(Arc::new(Algebra::Torus { lambda }))
    }

    pub fn rotation() -> Arc<Self> {
        Arc::new(Algebra::Rotation)
    }

    pub fn is_commutative(&self) -> bool {
        match self {
            Algebra::Group(_) => true,
            Algebra::Torus { lambda } => *lambda == S::one(),
            Algebra::Car | Algebra::Rotation => false,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Algebra::Group(_) => "group",
            Algebra::Car => "car",
            Algebra::Torus { .. } => "torus",
            Algebra::Rotation => "rotation",
        }
    }

    pub fn unit_word(&self) -> BasisWord {
        match self {
            Algebra::Group(_) => BasisWord::GroupUnit,
            Algebra::Car => BasisWord::Car(CarWord::unit()),
            Algebra::Torus { .. } => BasisWord::Torus { m: 0, n: 0 },
            Algebra::Rotation => BasisWord::Rotation { m: 0, n: 0, p: 0 },
        }
    }

    pub fn owns(&self, w: &BasisWord) -> bool {
        match (self, w) {
            (Algebra::Group(spec), BasisWord::GroupFn(g)) => spec.contains(g),
            (Algebra::Group(_), BasisWord::GroupUnit) => true,
            (Algebra::Car, BasisWord::Car(cw)) => cw.is_normal(),
            (Algebra::Torus { .. }, BasisWord::Torus { .. }) => true,
            (Algebra::Rotation, BasisWord::Rotation { .. }) => true,
            _ => false,
        }
    }

    /// Normal form of the product of two basis words.
    pub fn word_product(&self, a: &BasisWord, b: &BasisWord) -> Vec<(S, BasisWord)> {
        match (self, a, b) {
            (Algebra::Group(_), BasisWord::GroupUnit, w) | (Algebra::Group(_), w, BasisWord::GroupUnit) => {
                vec![(S::one(), w.clone())]
            }
            (Algebra::Group(_), BasisWord::GroupFn(g), BasisWord::GroupFn(h)) => {
                if g == h {
                    vec![(S::one(), a.clone())]
                } else {
                    vec![]
                }
            }
            (Algebra::Car, BasisWord::Car(x), BasisWord::Car(y)) => car::word_product(x, y)
                .into_iter()
                .map(|(w, c)| (S::from_i64(c), BasisWord::Car(w)))
                .collect(),
            (Algebra::Torus { lambda }, BasisWord::Torus { m, n }, BasisWord::Torus { m: m2, n: n2 }) => {
                // V^n U^{m2} = λ^{-n m2} U^{m2} V^n
                let phase = lambda.powi(-n * m2);
                vec![(phase, BasisWord::Torus { m: m + m2, n: n + n2 })]
            }
            (
                Algebra::Rotation,
                BasisWord::Rotation { m, n, p },
                BasisWord::Rotation { m: m2, n: n2, p: p2 },
            ) => vec![(
                S::one(),
                BasisWord::Rotation { m: m + m2, n: n + n2, p: p + p2 - n * m2 },
            )],
            _ => panic!("word {a:?} or {b:?} does not belong to the {} algebra", self.family()),
        }
    }

    /// The adjoint of a basis word as `coefficient · word`.
    pub fn word_star(&self, w: &BasisWord) -> (S, BasisWord) {
        match (self, w) {
            (Algebra::Group(_), _) => (S::one(), w.clone()),
            (Algebra::Car, BasisWord::Car(cw)) => {
                let (sign, sw) = car::word_star(cw);
                (S::from_i64(sign), BasisWord::Car(sw))
            }
            (Algebra::Torus { lambda }, BasisWord::Torus { m, n }) => {
                (lambda.powi(-m * n), BasisWord::Torus { m: -m, n: -n })
            }
            (Algebra::Rotation, BasisWord::Rotation { m, n, p }) => {
                (S::one(), BasisWord::Rotation { m: -m, n: -n, p: -p - m * n })
            }
            _ => panic!("word {w:?} does not belong to the {} algebra", self.family()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisWord {
    GroupUnit,
    GroupFn(GroupElem),
    Car(CarWord),
    Torus { m: i64, n: i64 },
    Rotation { m: i64, n: i64, p: i64 },
}

impl fmt::Display for BasisWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisWord::GroupUnit => write!(f, "1"),
            BasisWord::GroupFn(g) => {
                let parts: Vec<String> = g.iter().map(|v| v.to_string()).collect();
                write!(f, "e[{}]", parts.join(","))
            }
            BasisWord::Car(w) => {
                if w.is_unit() {
                    return write!(f, "1");
                }
                let mut parts: Vec<String> = w.cr.iter().map(|s| format!("b*{s}")).collect();
                parts.extend(w.an.iter().map(|s| format!("b{s}")));
                write!(f, "{}", parts.join(" "))
            }
            BasisWord::Torus { m, n } => write!(f, "U^{m}V^{n}"),
            BasisWord::Rotation { m, n, p } => write!(f, "U^{m}V^{n}Z^{p}"),
        }
    }
}

/// Upper bound for a C*-norm, flagged when it is the exact value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBound {
    pub value: f64,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct AlgebraElement<S: Scalar> {
    algebra: Arc<Algebra<S>>,
    terms: BTreeMap<BasisWord, S>,
}

impl<S: Scalar> PartialEq for AlgebraElement<S> {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other) && self.terms == other.terms
    }
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero(algebra: &Arc<Algebra<S>>) -> Self {
        AlgebraElement { algebra: algebra.clone(), terms: BTreeMap::new() }
    }

    pub fn one(algebra: &Arc<Algebra<S>>) -> Self {
        Self::word(algebra, algebra.unit_word())
    }

    pub fn word(algebra: &Arc<Algebra<S>>, w: BasisWord) -> Self {
        Self::term(algebra, S::one(), w)
    }

    pub fn term(algebra: &Arc<Algebra<S>>, c: S, w: BasisWord) -> Self {
        debug_assert!(algebra.owns(&w), "{w:?} not in {}", algebra.family());
        let mut out = Self::zero(algebra);
        out.add_term(w, c, 0.0);
        out
    }

    pub fn scalar(algebra: &Arc<Algebra<S>>, c: S) -> Self {
        Self::term(algebra, c, algebra.unit_word())
    }

    pub fn from_terms(algebra: &Arc<Algebra<S>>, terms: impl IntoIterator<Item = (BasisWord, S)>) -> Result<Self> {
        let mut out = Self::zero(algebra);
        for (w, c) in terms {
            if !algebra.owns(&w) {
                return Err(Error::AlgebraMismatch);
            }
            out.add_term(w, c, 1.0);
        }
        Ok(out)
    }

    pub fn algebra(&self) -> &Arc<Algebra<S>> {
        &self.algebra
    }

    pub fn terms(&self) -> &BTreeMap<BasisWord, S> {
        &self.terms
    }

    pub fn coeff(&self, w: &BasisWord) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn same_algebra(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    /// Largest coefficient modulus; the scale used by float drop tolerances.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    pub(crate) fn add_term(&mut self, w: BasisWord, c: S, scale: f64) {
        use std::collections::btree_map::Entry;
        // on a finite group 1 = Σ e_g, so the unit is never stored
        if let (BasisWord::GroupUnit, Algebra::Group(spec)) = (&w, self.algebra.as_ref()) {
            if let Some(n) = spec.order() {
                for k in 0..n as i64 {
                    self.add_term(BasisWord::GroupFn(vec![k]), c.clone(), scale);
                }
                return;
            }
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                if !c.negligible(scale) {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.negligible(scale) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let scale = if S::EXACT { 0.0 } else { self.max_abs().max(other.max_abs()) };
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone(), scale);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: &S, other: &Self) {
        assert!(self.same_algebra(other), "algebra mismatch");
        let scale = if S::EXACT { 0.0 } else { self.max_abs().max(other.max_abs() * c.abs()) };
        let unit = *c == S::one();
        for (w, d) in &other.terms {
            let v = if unit { d.clone() } else { c.clone() * d.clone() };
            self.add_term(w.clone(), v, scale);
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(&self.algebra);
        if c.is_zero() {
            return out;
        }
        for (w, d) in &self.terms {
            let v = c.clone() * d.clone();
            if !v.is_zero() {
                out.terms.insert(w.clone(), v);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let scale = if S::EXACT { 0.0 } else { self.max_abs() * other.max_abs() };
        let mut out = Self::zero(&self.algebra);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let words = self.algebra.word_product(wa, wb);
                if words.is_empty() {
                    continue;
                }
                let prod = ca.clone() * cb.clone();
                for (c, w) in words {
                    out.add_term(w, prod.clone() * c, scale);
                }
            }
        }
        Ok(out)
    }

    pub fn star(&self) -> Self {
        let mut out = Self::zero(&self.algebra);
        for (w, c) in &self.terms {
            let (phase, sw) = self.algebra.word_star(w);
            out.add_term(sw, c.conj() * phase, 0.0);
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.try_sub(&other.mul(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.try_add(&other.mul(self)?)
    }

    /// Sites touched by a CAR element.
    pub fn car_sites(&self) -> Vec<Site> {
        let mut sites: Vec<Site> = self
            .terms
            .keys()
            .filter_map(|w| match w {
                BasisWord::Car(cw) => Some(cw.sites().collect::<Vec<_>>()),
                _ => None,
            })
            .flatten()
            .collect();
        sites.sort_unstable();
        sites.dedup();
        sites
    }

    /// Sup-norm of a group function: the value at points outside the
    /// finite support is the unit coefficient.
    fn group_sup(&self, spec: &GroupSpec) -> f64 {
        let unit = self.coeff(&BasisWord::GroupUnit);
        let mut sup: f64 = 0.0;
        let mut support = 0u64;
        for (w, c) in &self.terms {
            if let BasisWord::GroupFn(_) = w {
                support += 1;
                sup = sup.max((unit.clone() + c.clone()).abs());
            }
        }
        let covers_group = spec.order().is_some_and(|n| support >= n);
        if !covers_group {
            sup = sup.max(unit.abs());
        }
        sup
    }

    /// Certified C*-norm upper bound: the sum of coefficient moduli (every
    /// basis word has norm at most one), or the exact sup-norm for group
    /// functions.
    pub fn norm_bound(&self) -> NormBound {
        if let Algebra::Group(spec) = self.algebra.as_ref() {
            return NormBound { value: self.group_sup(spec), exact: true };
        }
        let value = self.terms.values().map(Scalar::abs).sum();
        NormBound { value, exact: self.terms.len() <= 1 }
    }

    /// The exact C*-norm when it is available for the family.
    pub fn norm_exact(&self) -> Option<f64> {
        match self.algebra.as_ref() {
            Algebra::Group(spec) => Some(self.group_sup(spec)),
            _ if self.terms.len() <= 1 => Some(self.max_abs()),
            Algebra::Car => {
                let sites = self.car_sites();
                if sites.len() > JW_NORM_MAX_SITES {
                    return None;
                }
                let m = self.jw_matrix(&sites).ok()?;
                Some(spectral_norm(&m))
            }
            _ => None,
        }
    }

    /// A certified lower bound for the C*-norm. For the torus and the
    /// rotation algebra the coefficient functional is a state, so every
    /// coefficient modulus is a lower bound.
    pub fn norm_lower(&self) -> f64 {
        match self.algebra.as_ref() {
            Algebra::Torus { .. } | Algebra::Rotation => self.max_abs(),
            _ => self.norm_exact().unwrap_or(0.0),
        }
    }

    /// Jordan–Wigner matrix on the ordered site list.
    pub fn jw_matrix(&self, sites: &[Site]) -> Result<DMatrix<C64>> {
        if !matches!(self.algebra.as_ref(), Algebra::Car) {
            return Err(Error::AlgebraMismatch);
        }
        let dim = 1usize << sites.len();
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for (w, c) in &self.terms {
            let BasisWord::Car(cw) = w else { unreachable!() };
            m += car::jw_word(sites, cw)? * c.to_c64();
        }
        Ok(m)
    }

    /// The coefficient-of-unit functional (the trace for the torus and the
    /// rotation algebra).
    pub fn unit_coeff(&self) -> S {
        self.coeff(&self.algebra.unit_word())
    }

    pub fn to_float(&self) -> AlgebraElement<C64>
    where
        S: Scalar,
    {
        let algebra = Arc::new(match self.algebra.as_ref() {
            Algebra::Group(g) => Algebra::Group(g.clone()),
            Algebra::Car => Algebra::Car,
            Algebra::Torus { lambda } => Algebra::Torus { lambda: lambda.to_c64() },
            Algebra::Rotation => Algebra::Rotation,
        });
        AlgebraElement {
            algebra,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.to_c64())).collect(),
        }
    }

    /// Re-homes the element onto an equal descriptor (shared pointer).
    pub fn rehome(mut self, algebra: &Arc<Algebra<S>>) -> Result<Self> {
        if *algebra.as_ref() != *self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        self.algebra = algebra.clone();
        Ok(self)
    }
}

pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

impl<S: Scalar> fmt::Display for AlgebraElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let z = c.to_c64();
                format!("({}{:+}i)·{}", z.re, z.im, w)
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<S: Scalar> Add for &AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn add(self, rhs: Self) -> AlgebraElement<S> {
        self.try_add(rhs).expect("algebra mismatch")
    }
}

impl<S: Scalar> Sub for &AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn sub(self, rhs: Self) -> AlgebraElement<S> {
        self.try_sub(rhs).expect("algebra mismatch")
    }
}

impl<S: Scalar> Mul for &AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn mul(self, rhs: Self) -> AlgebraElement<S> {
        AlgebraElement::mul(self, rhs).expect("algebra mismatch")
    }
}

impl<S: Scalar> Neg for &AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn neg(self) -> AlgebraElement<S> {
        AlgebraElement {
            algebra: self.algebra.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c.clone())).collect(),
        }
    }
}

/// Convenience constructors for the named generators of each family.
pub mod words {
    use super::*;

    pub fn e<S: Scalar>(alg: &Arc<Algebra<S>>, g: GroupElem) -> AlgebraElement<S> {
        AlgebraElement::word(alg, BasisWord::GroupFn(g))
    }

    pub fn b<S: Scalar>(alg: &Arc<Algebra<S>>, i: Site) -> AlgebraElement<S> {
        AlgebraElement::word(alg, BasisWord::Car(CarWord::annihilator(i)))
    }

    pub fn bs<S: Scalar>(alg: &Arc<Algebra<S>>, i: Site) -> AlgebraElement<S> {
        AlgebraElement::word(alg, BasisWord::Car(CarWord::creator(i)))
    }

    pub fn uv<S: Scalar>(alg: &Arc<Algebra<S>>, m: i64, n: i64) -> AlgebraElement<S> {
        AlgebraElement::word(alg, BasisWord::Torus { m, n })
    }

    pub fn uvz<S: Scalar>(alg: &Arc<Algebra<S>>, m: i64, n: i64, p: i64) -> AlgebraElement<S> {
        AlgebraElement::word(alg, BasisWord::Rotation { m, n, p })
    }
}

#[cfg(test)]
mod tests;
