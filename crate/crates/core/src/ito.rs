//! The higher-order Itô product formula
//!
//! ```text
//! φ_n(xy) = Σ_{α∪β={1..n}} φ_|α|(x; n, α) Δ(n, α∩β) φ_|β|(y; n, β)
//! ```
//!
//! Each pair `(α, β)` is a ternary label per slot (x only, y only, both),
//! enumerated as a counter so the `3^n` terms are never stored. The overlap
//! projection `Δ` is applied as an index filter on the contracted slots.

use std::collections::HashMap;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::generator::FlowGenerator;
use crate::qrw::{iterates, Index, TensorOperator};
use crate::report::VerificationReport;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    X,
    Y,
    Both,
}

/// A summed expansion together with the number of `(α, β)` terms visited.
#[derive(Clone, Debug)]
pub struct Expansion<S: Scalar> {
    pub tensor: TensorOperator<S>,
    pub terms: usize,
}

fn labels(code: usize, n: usize) -> Vec<Slot> {
    let mut c = code;
    (0..n)
        .map(|_| {
            let s = [Slot::X, Slot::Y, Slot::Both][c % 3];
            c /= 3;
            s
        })
        .collect()
}

fn expand<S: Scalar>(
    phi: &FlowGenerator<S>,
    x: &AlgebraElement<S>,
    y: &AlgebraElement<S>,
    n: usize,
    max_part: usize,
) -> Result<Expansion<S>> {
    let k = max_part.min(n);
    let xs = iterates(phi, x, k)?;
    let ys = iterates(phi, y, k)?;
    Ok(expand_with(phi, &xs, &ys, n, max_part))
}

fn expand_with<S: Scalar>(
    phi: &FlowGenerator<S>,
    xs: &[TensorOperator<S>],
    ys: &[TensorOperator<S>],
    n: usize,
    max_part: usize,
) -> Expansion<S> {
    let mut out = TensorOperator::zero(phi.algebra(), n, phi.dim());
    let mut terms = 0;
    for code in 0..3usize.pow(n as u32) {
        let lab = labels(code, n);
        let alpha: Vec<usize> = (0..n).filter(|&s| lab[s] != Slot::Y).collect();
        let beta: Vec<usize> = (0..n).filter(|&s| lab[s] != Slot::X).collect();
        if alpha.len() > max_part || beta.len() > max_part {
            continue;
        }
        terms += 1;
        add_term(&mut out, &lab, &alpha, &beta, &xs[alpha.len()], &ys[beta.len()]);
    }
    Expansion { tensor: out, terms }
}

fn add_term<S: Scalar>(
    out: &mut TensorOperator<S>,
    lab: &[Slot],
    alpha: &[usize],
    beta: &[usize],
    tx: &TensorOperator<S>,
    ty: &TensorOperator<S>,
) {
    let n = lab.len();
    // for each slot: its position inside the x and y tensors
    let mut ax = vec![usize::MAX; n];
    let mut by = vec![usize::MAX; n];
    for (j, &s) in alpha.iter().enumerate() {
        ax[s] = j;
    }
    for (j, &s) in beta.iter().enumerate() {
        by[s] = j;
    }
    let both: Vec<usize> = (0..n).filter(|&s| lab[s] == Slot::Both).collect();

    let mut ybuckets: HashMap<Vec<u16>, Vec<(&Index, &Index, &AlgebraElement<S>)>> = HashMap::new();
    for ((r, c), v) in ty.entries() {
        let key: Vec<u16> = both.iter().map(|&s| r[by[s]]).collect();
        if key.contains(&0) {
            continue;
        }
        ybuckets.entry(key).or_default().push((r, c, v));
    }
    for ((rx, cx), vx) in tx.entries() {
        let key: Vec<u16> = both.iter().map(|&s| cx[ax[s]]).collect();
        let Some(bucket) = ybuckets.get(&key) else { continue };
        for (ry, cy, vy) in bucket {
            let mut r = Index::with_capacity(n);
            let mut c = Index::with_capacity(n);
            for s in 0..n {
                match lab[s] {
                    Slot::X => {
                        r.push(rx[ax[s]]);
                        c.push(cx[ax[s]]);
                    }
                    Slot::Y => {
                        r.push(ry[by[s]]);
                        c.push(cy[by[s]]);
                    }
                    Slot::Both => {
                        r.push(rx[ax[s]]);
                        c.push(cy[by[s]]);
                    }
                }
            }
            out.add_owned(r, c, vx * *vy);
        }
    }
}

/// The right-hand side of the product formula, over all `3^n` label strings.
pub fn hoprod_rhs<S: Scalar>(
    phi: &FlowGenerator<S>,
    x: &AlgebraElement<S>,
    y: &AlgebraElement<S>,
    n: usize,
) -> Result<Expansion<S>> {
    expand(phi, x, y, n, n)
}

/// `φ_{n,N]}(xy)`: the formula restricted to `|α|, |β| ≤ N`.
pub fn truncated_product<S: Scalar>(
    phi: &FlowGenerator<S>,
    x: &AlgebraElement<S>,
    y: &AlgebraElement<S>,
    n: usize,
    cap_n: usize,
) -> Result<Expansion<S>> {
    if n > 2 * cap_n {
        return Err(Error::InvalidParameter(format!("truncated product needs n ≤ 2N, got n={n}, N={cap_n}")));
    }
    expand(phi, x, y, n, cap_n)
}

/// Compares the formula with `φ_n(xy)` for every `k ≤ n`.
pub fn verify_hoprod<S: Scalar>(
    phi: &FlowGenerator<S>,
    x: &AlgebraElement<S>,
    y: &AlgebraElement<S>,
    n: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(format!("higher-order product formula ({})", phi.family().tag()));
    let xy = x.mul(y)?;
    let xs = iterates(phi, x, n)?;
    let ys = iterates(phi, y, n)?;
    let lhs = iterates(phi, &xy, n)?;
    for k in 0..=n {
        let rhs = expand_with(phi, &xs, &ys, k, k);
        let diff = lhs[k].sub(&rhs.tensor)?;
        let subject = format!("n={k}; x={x}; y={y}");
        if !rep.record("hoprod", subject, diff.l1_bound(), tol) {
            for ((r, c), v) in diff.entries().iter().take(3) {
                rep.note(format!("n={k} entry r={:?} c={:?}: {v}", r.as_slice(), c.as_slice()));
            }
        }
    }
    Ok(rep)
}
