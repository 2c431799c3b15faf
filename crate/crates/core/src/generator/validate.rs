use crate::algebra::AlgebraElement;
use crate::error::Result;
use crate::report::VerificationReport;
use crate::scalar::Scalar;

use super::{FlowGenerator, GeneratorMatrix};

/// Generating elements plus all their products of length `2..=depth`,
/// zeros and duplicates removed.
pub fn default_sample<S: Scalar>(gens: &[AlgebraElement<S>], depth: usize) -> Vec<AlgebraElement<S>> {
    let mut out: Vec<AlgebraElement<S>> = Vec::new();
    let push = |out: &mut Vec<AlgebraElement<S>>, x: AlgebraElement<S>| {
        if !x.is_zero() && !out.contains(&x) {
            out.push(x);
        }
    };
    for g in gens {
        push(&mut out, g.clone());
    }
    let mut layer: Vec<AlgebraElement<S>> = gens.to_vec();
    for _ in 2..=depth {
        let mut next = Vec::new();
        for x in &layer {
            for g in gens {
                let p = x * g;
                if !p.is_zero() {
                    next.push(p.clone());
                    push(&mut out, p);
                }
            }
        }
        layer = next;
    }
    out
}

fn label<S: Scalar>(x: &AlgebraElement<S>) -> String {
    let s = x.to_string();
    if s.len() > 60 {
        format!("{}…", &s[..s.char_indices().nth(57).map_or(s.len(), |(i, _)| i)])
    } else {
        s
    }
}

/// Checks the structure relations of a flow generator on `sample`:
///
/// * `phi-one`: `φ(1) = 0`;
/// * `star`: `φ(x*) = φ(x)†`;
/// * `ito`: `φ(xy) = φ(x)(y⊗1) + (x⊗1)φ(y) + φ(x)Δφ(y)`;
/// * `tau`: `τ(xy) − τ(x)y − xτ(y) = δ†(x)δ(y)`;
/// * `pi-mult`, `pi-unit`: `π` is a unital homomorphism;
/// * `delta-deriv`: `δ(xy) = δ(x)y + π(x)δ(y)`.
///
/// Pair identities run over all ordered pairs of the sample.
pub fn validate<S: Scalar>(
    phi: &FlowGenerator<S>,
    sample: &[AlgebraElement<S>],
    tol: f64,
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(format!("flow generator ({})", phi.family().tag()));
    let alg = phi.algebra();
    let one = AlgebraElement::one(alg);
    let dim = phi.dim();

    rep.record("phi-one", "1", phi.apply(&one)?.residual(), tol);
    let mut id = GeneratorMatrix::zero(alg, dim);
    for k in 1..dim {
        id.add(k, k, &one);
    }
    rep.record("pi-unit", "1", phi.pi(&one)?.sub(&id).residual(), tol);

    let phis: Vec<GeneratorMatrix<S>> = sample.iter().map(|x| phi.apply(x)).collect::<Result<_>>()?;
    let pis: Vec<GeneratorMatrix<S>> = sample.iter().map(|x| phi.pi(x)).collect::<Result<_>>()?;

    for (x, px) in sample.iter().zip(&phis) {
        let r = phi.apply(&x.star())?.sub(&px.adjoint()).residual();
        rep.record("star", label(x), r, tol);
    }

    for (ix, x) in sample.iter().enumerate() {
        for (iy, y) in sample.iter().enumerate() {
            let subject = format!("x={}; y={}", label(x), label(y));
            let (px, py) = (&phis[ix], &phis[iy]);
            let xy = x * y;
            let pxy = phi.apply(&xy)?;

            let rhs = px.mul_right(y).plus(&py.mul_left(x)).plus(&px.matmul(py, true));
            rep.record("ito", subject.clone(), pxy.sub(&rhs).residual(), tol);

            let cdc = &(&pxy.get(0, 0) - &(&px.get(0, 0) * y)) - &(x * &py.get(0, 0));
            let dd = px.row0().matmul(&py.column0(), false).get(0, 0);
            rep.record("tau", subject.clone(), (&cdc - &dd).norm_bound().value, tol);

            let pi_xy = phi.pi(&xy)?;
            rep.record("pi-mult", subject.clone(), pi_xy.sub(&pis[ix].matmul(&pis[iy], false)).residual(), tol);

            let dxy = pxy.column0();
            let rhs = px.column0().mul_right(y).plus(&pis[ix].matmul(&py.column0(), false));
            rep.record("delta-deriv", subject, dxy.sub(&rhs).residual(), tol);
        }
    }
    Ok(rep)
}

/// `Γ(x, y) = ½(τ(xy) − τ(x)y − xτ(y))`.
pub fn carre_du_champ<S: Scalar>(
    phi: &FlowGenerator<S>,
    x: &AlgebraElement<S>,
    y: &AlgebraElement<S>,
) -> Result<AlgebraElement<S>> {
    let xy = x.mul(y)?;
    let g = &(&phi.tau(&xy)? - &(&phi.tau(x)? * y)) - &(x * &phi.tau(y)?);
    Ok(g.scale(&S::from_ratio(1, 2)))
}
