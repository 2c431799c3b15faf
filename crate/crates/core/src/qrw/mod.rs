//! Quantum random walks `φ_{n+1} = (φ_n ⊗ ι) ∘ φ` as sparse tensors.
//!
//! Slot `k` of a depth-`n` tensor pairs with `(ξ_k, χ_k)` when slicing, so
//! slot `n` carries the first application of `φ` and slot 1 the last.

mod growth;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::algebra::json::element_to_json;
use crate::algebra::car::Site;
use crate::algebra::words::b;
use crate::algebra::{Algebra, AlgebraElement};
use crate::error::{Error, Result};
use crate::generator::{FlowGenerator, GeneratorMatrix};
use crate::scalar::Scalar;

pub use growth::{
    growth_profile, product_closure_bound, word_dp_bounds, GrowthClass, GrowthOptions, GrowthProfile, Probe,
};

pub type Index = SmallVec<[u16; 8]>;

/// Default cap on stored entries during iteration.
pub const DEFAULT_ENTRY_CAP: usize = 400_000;

/// An element of `A ⊗ B(K̂)^{⊗n}` stored as `(row, col) ↦ A`-entry.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator<S: Scalar> {
    algebra: Arc<Algebra<S>>,
    depth: usize,
    dim: usize,
    entries: BTreeMap<(Index, Index), AlgebraElement<S>>,
}

impl<S: Scalar> TensorOperator<S> {
    pub fn zero(algebra: &Arc<Algebra<S>>, depth: usize, dim: usize) -> Self {
        TensorOperator { algebra: algebra.clone(), depth, dim, entries: BTreeMap::new() }
    }

    /// Depth 0: a bare algebra element.
    pub fn scalar(x: &AlgebraElement<S>, dim: usize) -> Self {
        let mut t = Self::zero(x.algebra(), 0, dim);
        t.add(Index::new(), Index::new(), x);
        t
    }

    pub fn from_matrix(m: &GeneratorMatrix<S>) -> Self {
        let mut t = Self::zero(m.algebra(), 1, m.dim());
        for (&(i, j), x) in m.entries() {
            t.add(Index::from_slice(&[i as u16]), Index::from_slice(&[j as u16]), x);
        }
        t
    }

    /// `x ⊗ m^{⊗n}` for a scalar matrix `m`.
    pub fn kron_power(x: &AlgebraElement<S>, m: &[Vec<S>], n: usize) -> Self {
        let dim = m.len();
        let mut layer: Vec<(Index, Index, S)> = vec![(Index::new(), Index::new(), S::one())];
        for _ in 0..n {
            let mut next = Vec::new();
            for (r, c, v) in &layer {
                for (i, row) in m.iter().enumerate() {
                    for (j, a) in row.iter().enumerate() {
                        if a.is_zero() {
                            continue;
                        }
                        let mut r2 = r.clone();
                        r2.push(i as u16);
                        let mut c2 = c.clone();
                        c2.push(j as u16);
                        next.push((r2, c2, v.clone() * a.clone()));
                    }
                }
            }
            layer = next;
        }
        let mut t = Self::zero(x.algebra(), n, dim);
        for (r, c, v) in layer {
            t.add(r, c, &x.scale(&v));
        }
        t
    }

    /// `P^{⊗k}` with `P = 1 − |ω⟩⟨ω|`, tensored with the unit.
    pub fn delta_projector(algebra: &Arc<Algebra<S>>, dim: usize, k: usize) -> Self {
        let mut p = vec![vec![S::zero(); dim]; dim];
        for (i, row) in p.iter_mut().enumerate().skip(1) {
            row[i] = S::one();
        }
        Self::kron_power(&AlgebraElement::one(algebra), &p, k)
    }

    pub fn algebra(&self) -> &Arc<Algebra<S>> {
        &self.algebra
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &BTreeMap<(Index, Index), AlgebraElement<S>> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: &[u16], c: &[u16]) -> AlgebraElement<S> {
        self.entries
            .get(&(Index::from_slice(r), Index::from_slice(c)))
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(&self.algebra))
    }

    pub fn add(&mut self, r: Index, c: Index, x: &AlgebraElement<S>) {
        debug_assert!(r.len() == self.depth && c.len() == self.depth);
        self.add_scaled_entry(r, c, &S::one(), x);
    }

    /// `add` without cloning `x` when the slot is empty.
    pub fn add_owned(&mut self, r: Index, c: Index, x: AlgebraElement<S>) {
        debug_assert!(r.len() == self.depth && c.len() == self.depth);
        if x.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.entries.entry((r, c)) {
            Entry::Vacant(v) => {
                v.insert(x);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_scaled(&S::one(), &x);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_scaled_entry(&mut self, r: Index, c: Index, k: &S, x: &AlgebraElement<S>) {
        if x.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.entries.entry((r, c)) {
            Entry::Vacant(v) => {
                let y = if *k == S::one() { x.clone() } else { x.scale(k) };
                if !y.is_zero() {
                    v.insert(y);
                }
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_scaled(k, x);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if *self.algebra != *other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        if self.depth != other.depth {
            return Err(Error::LengthMismatch { expected: self.depth, got: other.depth });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    pub fn add_tensor(&mut self, k: &S, other: &Self) -> Result<()> {
        self.check_shape(other)?;
        for ((r, c), x) in &other.entries {
            self.add_scaled_entry(r.clone(), c.clone(), k, x);
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_tensor(&-S::one(), other)?;
        Ok(out)
    }

    pub fn scale(&self, k: &S) -> Self {
        let mut out = Self::zero(&self.algebra, self.depth, self.dim);
        for ((r, c), x) in &self.entries {
            out.add_scaled_entry(r.clone(), c.clone(), k, x);
        }
        out
    }

    /// Entrywise adjoint with transposed indices.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.algebra, self.depth, self.dim);
        for ((r, c), x) in &self.entries {
            out.add(c.clone(), r.clone(), &x.star());
        }
        out
    }

    /// `Σ ‖entry‖`: an upper bound for the operator norm, since every matrix
    /// unit has norm one.
    pub fn l1_bound(&self) -> f64 {
        self.entries.values().map(|x| x.norm_bound().value).sum()
    }

    /// Product in `A ⊗ B(K̂)^{⊗n}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_delta(other, &vec![false; self.depth])
    }

    /// `S · Δ · T` where `Δ` projects out `ω` in the slots flagged by
    /// `kill`.
    pub fn mul_delta(&self, other: &Self, kill: &[bool]) -> Result<Self> {
        self.check_shape(other)?;
        if kill.len() != self.depth {
            return Err(Error::LengthMismatch { expected: self.depth, got: kill.len() });
        }
        let mut by_row: BTreeMap<&Index, Vec<(&Index, &AlgebraElement<S>)>> = BTreeMap::new();
        for ((r, c), y) in &other.entries {
            if r.iter().zip(kill).any(|(&m, &k)| k && m == 0) {
                continue;
            }
            by_row.entry(r).or_default().push((c, y));
        }
        let mut out = Self::zero(&self.algebra, self.depth, self.dim);
        for ((r, m), x) in &self.entries {
            if let Some(row) = by_row.get(m) {
                for (c, y) in row {
                    out.add(r.clone(), (*c).clone(), &(x * y));
                }
            }
        }
        Ok(out)
    }

    /// `T(n, α)`: slot `j` of `T` moves to position `α_j`; identity elsewhere.
    /// `alpha` holds 1-based positions in increasing order.
    pub fn embed(&self, n: usize, alpha: &[usize]) -> Result<Self> {
        if alpha.len() != self.depth {
            return Err(Error::LengthMismatch { expected: self.depth, got: alpha.len() });
        }
        if alpha.windows(2).any(|w| w[0] >= w[1]) || alpha.iter().any(|&a| a == 0 || a > n) {
            return Err(Error::InvalidParameter(format!("embedding positions {alpha:?} not increasing in 1..={n}")));
        }
        let free: Vec<usize> = (1..=n).filter(|i| !alpha.contains(i)).collect();
        let fill = self.dim.pow(free.len() as u32);
        let mut out = Self::zero(&self.algebra, n, self.dim);
        for ((r, c), x) in &self.entries {
            for code in 0..fill {
                let mut ri: Index = SmallVec::from_elem(0, n);
                let mut ci: Index = SmallVec::from_elem(0, n);
                for (j, &a) in alpha.iter().enumerate() {
                    ri[a - 1] = r[j];
                    ci[a - 1] = c[j];
                }
                let mut rest = code;
                for &p in &free {
                    let v = (rest % self.dim) as u16;
                    rest /= self.dim;
                    ri[p - 1] = v;
                    ci[p - 1] = v;
                }
                out.add(ri, ci, x);
            }
        }
        Ok(out)
    }

    /// `(1 ⊗ ⟨ξ_1| ⊗ ⋯ ⊗ ⟨ξ_n|) T (1 ⊗ |χ_1⟩ ⊗ ⋯ ⊗ |χ_n⟩)`.
    pub fn slice(&self, xi: &[Vec<S>], chi: &[Vec<S>]) -> Result<AlgebraElement<S>> {
        for v in [xi, chi] {
            if v.len() != self.depth {
                return Err(Error::LengthMismatch { expected: self.depth, got: v.len() });
            }
            if let Some(bad) = v.iter().find(|u| u.len() != self.dim) {
                return Err(Error::DimensionMismatch { expected: self.dim, got: bad.len() });
            }
        }
        let mut out = AlgebraElement::zero(&self.algebra);
        for ((r, c), x) in &self.entries {
            let mut k = S::one();
            for s in 0..self.depth {
                k = k * xi[s][r[s] as usize].conj() * chi[s][c[s] as usize].clone();
                if k.is_zero() {
                    break;
                }
            }
            if !k.is_zero() {
                out.add_scaled(&k, x);
            }
        }
        Ok(out)
    }

    /// Compresses the last slot only.
    pub fn slice_last(&self, xi: &[S], chi: &[S]) -> Result<Self> {
        if self.depth == 0 {
            return Err(Error::LengthMismatch { expected: 1, got: 0 });
        }
        for v in [xi, chi] {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
            }
        }
        let last = self.depth - 1;
        let mut out = Self::zero(&self.algebra, last, self.dim);
        for ((r, c), x) in &self.entries {
            let k = xi[r[last] as usize].conj() * chi[c[last] as usize].clone();
            if !k.is_zero() {
                out.add_scaled_entry(Index::from_slice(&r[..last]), Index::from_slice(&c[..last]), &k, x);
            }
        }
        Ok(out)
    }

    /// One JSON object per line: `{"r":[...],"c":[...],"elem":{...}}`.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for ((r, c), x) in &self.entries {
            let line = serde_json::json!({ "r": r.to_vec(), "c": c.to_vec(), "elem": element_to_json(x) });
            let _ = writeln!(s, "{line}");
        }
        s
    }
}

/// `φ_n(x)` with the default entry cap.
pub fn iterate<S: Scalar>(phi: &FlowGenerator<S>, x: &AlgebraElement<S>, n: usize) -> Result<TensorOperator<S>> {
    iterate_with_cap(phi, x, n, DEFAULT_ENTRY_CAP)
}

pub fn iterate_with_cap<S: Scalar>(
    phi: &FlowGenerator<S>,
    x: &AlgebraElement<S>,
    n: usize,
    cap: usize,
) -> Result<TensorOperator<S>> {
    let mut t = TensorOperator::scalar(x, phi.dim());
    for _ in 0..n {
        t = step(phi, &t, cap)?;
    }
    Ok(t)
}

/// `φ_0(x), …, φ_n(x)`.
pub fn iterates<S: Scalar>(phi: &FlowGenerator<S>, x: &AlgebraElement<S>, n: usize) -> Result<Vec<TensorOperator<S>>> {
    let mut out = vec![TensorOperator::scalar(x, phi.dim())];
    for _ in 0..n {
        let next = step(phi, out.last().expect("nonempty"), DEFAULT_ENTRY_CAP)?;
        out.push(next);
    }
    Ok(out)
}

/// `φ_{n+1} = (φ ⊗ ι^{⊗n}) ∘ φ_n`: the new slot is prepended.
fn step<S: Scalar>(phi: &FlowGenerator<S>, t: &TensorOperator<S>, cap: usize) -> Result<TensorOperator<S>> {
    let mut out = TensorOperator::zero(phi.algebra(), t.depth + 1, phi.dim());
    for ((r, c), x) in &t.entries {
        for (w, k) in x.terms() {
            let m = phi.apply_word(w)?;
            for (&(i, j), y) in m.entries() {
                let mut r2 = Index::with_capacity(r.len() + 1);
                r2.push(i as u16);
                r2.extend_from_slice(r);
                let mut c2 = Index::with_capacity(c.len() + 1);
                c2.push(j as u16);
                c2.extend_from_slice(c);
                out.add_scaled_entry(r2, c2, k, y);
            }
        }
        if out.len() > cap {
            return Err(Error::ResourceCap { entries: out.len(), cap });
        }
    }
    Ok(out)
}

/// `φ^{ξ_1}_{χ_1} ∘ ⋯ ∘ φ^{ξ_n}_{χ_n}(x)` by `n` one-step slices.
pub fn sequential_slice<S: Scalar>(
    phi: &FlowGenerator<S>,
    x: &AlgebraElement<S>,
    xi: &[Vec<S>],
    chi: &[Vec<S>],
) -> Result<AlgebraElement<S>> {
    if xi.len() != chi.len() {
        return Err(Error::LengthMismatch { expected: xi.len(), got: chi.len() });
    }
    let mut y = x.clone();
    for (a, b) in xi.iter().zip(chi).rev() {
        y = phi.slice_one(&y, a, b)?;
    }
    Ok(y)
}

/// The nested-sum form `φ_n(b_{i_0}) = Σ b_{i_n} ⊗ B_{i_{n−1},i_n} ⊗ ⋯ ⊗ B_{i_0,i_1}`
/// of the symmetric exclusion walk, built directly from the `B` blocks.
pub fn exclusion_closed_form<S: Scalar>(phi: &FlowGenerator<S>, i0: Site, n: usize) -> Result<TensorOperator<S>> {
    let p = phi.exclusion_params().ok_or_else(|| Error::InvalidParameter("not an exclusion generator".into()))?;
    let mut layer: Vec<(Site, Index, Index, S)> = vec![(i0, Index::new(), Index::new(), S::one())];
    for _ in 0..n {
        let mut next = Vec::new();
        for (i, r, c, v) in &layer {
            for j in p.supp_plus(*i) {
                let bm = phi.exclusion_b(*i, j)?;
                for (a, row) in bm.iter().enumerate() {
                    for (bcol, e) in row.iter().enumerate() {
                        if e.is_zero() {
                            continue;
                        }
                        let mut r2 = Index::with_capacity(r.len() + 1);
                        r2.push(a as u16);
                        r2.extend_from_slice(r);
                        let mut c2 = Index::with_capacity(c.len() + 1);
                        c2.push(bcol as u16);
                        c2.extend_from_slice(c);
                        next.push((j, r2, c2, v.clone() * e.clone()));
                    }
                }
            }
        }
        layer = next;
    }
    let alg = phi.algebra();
    let mut t = TensorOperator::zero(alg, n, phi.dim());
    for (j, r, c, v) in layer {
        t.add_scaled_entry(r, c, &v, &b(alg, j));
    }
    Ok(t)
}

#[cfg(test)]
mod tests;
