//! Series evaluation of `exp(t φ^ξ̂_χ̂)`, the vacuum semigroup
//! `T_t = exp(tτ)` and cocycle matrix elements `ĵ_t[f, g](x)` for step
//! functions, each with a certified truncation error.
//!
//! Tail bounds use `‖(φ^{ξ_1}_{χ_1} ∘ ⋯ ∘ φ^{ξ_n}_{χ_n})(x)‖ ≤ Π‖ξ_i‖‖χ_i‖ C_x M_x^n`,
//! so every input needs growth constants `(C_x, M_x)`.

mod step;

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::json::element_to_json;
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::generator::FlowGenerator;
use crate::qrw::{growth_profile, product_closure_bound, GrowthOptions, GrowthProfile, Probe};
use crate::report::VerificationReport;
use crate::scalar::{Scalar, C64};

pub use step::{hat, inner, norm, Piece, StepFunction};

/// Hard limit on series length.
pub const MAX_SERIES_TERMS: usize = 2000;

/// `‖φ_n(x)‖ ≤ c·m^n` for all `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthCertificate {
    pub c: f64,
    pub m: f64,
}

impl GrowthCertificate {
    pub fn new(c: f64, m: f64) -> Result<Self> {
        if !(c >= 0.0 && m >= 0.0 && c.is_finite() && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("growth constants must be finite and nonnegative: ({c}, {m})")));
        }
        Ok(GrowthCertificate { c, m })
    }

    pub fn from_profile<S: Scalar>(p: &GrowthProfile<S>) -> Result<Self> {
        match p.certificate() {
            Some((c, m)) => Self::new(c, m),
            None => Err(Error::NotCertified(format!("{} grows {}", p.x, p.class.label()))),
        }
    }
}

/// Growth constants read off a default growth profile.
pub fn certify<S: Scalar>(
    phi: &FlowGenerator<S>,
    x: &AlgebraElement<S>,
    options: &GrowthOptions,
) -> Result<GrowthCertificate> {
    GrowthCertificate::from_profile(&growth_profile(phi, x, options, &Probe::Corners)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesResult<S: Scalar> {
    pub value: AlgebraElement<S>,
    pub terms_used: usize,
    pub error_bound: f64,
}

impl<S: Scalar> SeriesResult<S> {
    pub fn to_json(&self) -> Value {
        json!({ "value": element_to_json(&self.value), "terms_used": self.terms_used, "error_bound": self.error_bound })
    }
}

/// Allowance for accumulated float rounding in a partial sum whose terms
/// have the given norm bounds.
fn rounding_allowance<S: Scalar>(term_norms: f64, terms: usize) -> f64 {
    if S::EXACT {
        0.0
    } else {
        8.0 * f64::EPSILON * term_norms * (terms as f64 + 1.0)
    }
}

fn c64_exp<S: Scalar>(z: C64) -> S {
    S::from_c64(z.exp())
}

/// `Σ_{n ≤ N} t^n (φ^ξ_χ)^n(x) / n!` for `ξ, χ ∈ K̂` (full `1+d` coordinates),
/// with `N` the first order whose tail `C Σ_{n>N} q^n/n!`, `q = t‖ξ‖‖χ‖M`,
/// is below `tol`.
pub fn slice_exp<S: Scalar>(
    phi: &FlowGenerator<S>,
    xi: &[S],
    chi: &[S],
    t: f64,
    x: &AlgebraElement<S>,
    cert: &GrowthCertificate,
    tol: f64,
) -> Result<SeriesResult<S>> {
    for v in [xi, chi] {
        if v.len() != phi.dim() {
            return Err(Error::DimensionMismatch { expected: phi.dim(), got: v.len() });
        }
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be finite and nonnegative, got {t}")));
    }
    if t == 0.0 || x.is_zero() {
        return Ok(SeriesResult { value: x.clone(), terms_used: 0, error_bound: 0.0 });
    }
    let q = t * norm(xi) * norm(chi) * cert.m;
    let mut sum = x.clone();
    let mut y = x.clone();
    let mut coef = 1.0f64;
    let mut bound_k = cert.c;
    let mut term_norms = x.norm_bound().value;
    for k in 1..=MAX_SERIES_TERMS {
        y = phi.slice_one(&y, xi, chi)?;
        coef *= t / k as f64;
        bound_k *= q / k as f64;
        if y.is_zero() {
            return Ok(SeriesResult { value: sum, terms_used: k, error_bound: rounding_allowance::<S>(term_norms, k) });
        }
        sum.add_scaled(&S::from_f64_parts(coef, 0.0), &y);
        term_norms += coef * y.norm_bound().value;
        let next = bound_k * q / (k + 1) as f64;
        let ratio = q / (k + 2) as f64;
        if ratio < 1.0 {
            let tail = next / (1.0 - ratio);
            if tail <= tol {
                let err = tail + rounding_allowance::<S>(term_norms, k);
                return Ok(SeriesResult { value: sum, terms_used: k, error_bound: err });
            }
        }
    }
    Err(Error::Numerical(format!("series for {x} did not reach tolerance {tol:e} in {MAX_SERIES_TERMS} terms")))
}

/// `T_t(x) = exp(tτ)(x)`.
pub fn vacuum_semigroup<S: Scalar>(
    phi: &FlowGenerator<S>,
    t: f64,
    x: &AlgebraElement<S>,
    cert: &GrowthCertificate,
    tol: f64,
) -> Result<SeriesResult<S>> {
    let one = AlgebraElement::one(phi.algebra());
    if !phi.tau(&one)?.is_zero() {
        return Err(Error::Numerical("τ(1) ≠ 0, so T_t(1) ≠ 1".into()));
    }
    let w = vacuum(phi.dim());
    slice_exp(phi, &w, &w, t, x, cert, tol)
}

fn vacuum<S: Scalar>(dim: usize) -> Vec<S> {
    let mut w = vec![S::zero(); dim];
    w[0] = S::one();
    w
}

struct IntervalMap<S> {
    len: f64,
    xi: Vec<S>,
    eta: Vec<S>,
    kappa: S,
    kappa_abs: f64,
    hat_norms: f64,
}

fn interval_maps<S: Scalar>(f: &StepFunction<S>, g: &StepFunction<S>, from: f64, to: f64) -> Result<Vec<IntervalMap<S>>> {
    Ok(StepFunction::refine(f, g, from, to)?
        .into_iter()
        .map(|p| {
            let ip = inner(&p.xi, &p.eta).to_c64() * p.len;
            IntervalMap {
                len: p.len,
                kappa: c64_exp(ip),
                kappa_abs: ip.re.exp(),
                hat_norms: norm(&hat(&p.xi)) * norm(&hat(&p.eta)),
                xi: hat(&p.xi),
                eta: hat(&p.eta),
            }
        })
        .collect())
}

/// `Π_k |e^{ℓ_k⟨ξ_k,η_k⟩}| e^{ℓ_k ‖ξ̂_k‖‖η̂_k‖ m}`: bounds how `ĵ` on
/// `[from, to)` magnifies the constant of an input with growth rate `m`.
fn magnification<S>(maps: &[IntervalMap<S>], m: f64) -> f64 {
    maps.iter().map(|p| p.kappa_abs * (p.len * p.hat_norms * m).exp()).product()
}

fn check_pair<S: Scalar>(phi: &FlowGenerator<S>, f: &StepFunction<S>, g: &StepFunction<S>) -> Result<()> {
    for h in [f, g] {
        if h.dim() != phi.d() {
            return Err(Error::DimensionMismatch { expected: phi.d(), got: h.dim() });
        }
    }
    if f.horizon() != g.horizon() {
        return Err(Error::InvalidParameter(format!(
            "mismatched horizons {} and {}",
            f.horizon(),
            g.horizon()
        )));
    }
    Ok(())
}

fn cocycle_inner<S: Scalar>(
    phi: &FlowGenerator<S>,
    f: &StepFunction<S>,
    g: &StepFunction<S>,
    t: f64,
    x: &AlgebraElement<S>,
    cert: &GrowthCertificate,
    tol: f64,
) -> Result<(SeriesResult<S>, GrowthCertificate)> {
    check_pair(phi, f, g)?;
    let maps = interval_maps(f, g, 0.0, t)?;
    let count = maps.len().max(1) as f64;
    let mut y = x.clone();
    let mut c_cur = cert.c;
    let mut err = 0.0;
    let mut terms = 0;
    // latest interval first
    for (k, p) in maps.iter().enumerate().rev() {
        let outer = magnification(&maps[..k], cert.m);
        let here = GrowthCertificate { c: c_cur, m: cert.m };
        let r = slice_exp(phi, &p.xi, &p.eta, p.len, &y, &here, tol / (count * outer))?;
        let grow = p.kappa_abs * (p.len * p.hat_norms * cert.m).exp();
        err = grow * err + p.kappa_abs * r.error_bound;
        c_cur *= grow;
        terms += r.terms_used;
        y = r.value.scale(&p.kappa);
    }
    Ok((SeriesResult { value: y, terms_used: terms, error_bound: err }, GrowthCertificate { c: c_cur, m: cert.m }))
}

/// `ĵ_t[f, g](x)`: interval maps `e^{ℓ⟨ξ,η⟩} exp(ℓ φ^{ξ̂}_{η̂})` composed with
/// the latest interval innermost.
pub fn cocycle_matrix_element<S: Scalar>(
    phi: &FlowGenerator<S>,
    f: &StepFunction<S>,
    g: &StepFunction<S>,
    t: f64,
    x: &AlgebraElement<S>,
    cert: &GrowthCertificate,
    tol: f64,
) -> Result<SeriesResult<S>> {
    Ok(cocycle_inner(phi, f, g, t, x, cert, tol)?.0)
}

/// Compares `T_{s+t}(x)` with `T_s(T_t(x))` and records `T_t(1) = 1`.
pub fn semigroup_check<S: Scalar>(
    phi: &FlowGenerator<S>,
    s: f64,
    t: f64,
    x: &AlgebraElement<S>,
    cert: &GrowthCertificate,
    tol: f64,
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(format!("semigroup law ({})", phi.family().tag()));
    let one = AlgebraElement::one(phi.algebra());
    let unit = vacuum_semigroup(phi, s + t, &one, &GrowthCertificate { c: 1.0, m: 0.0 }, tol)?;
    rep.record("unital", format!("t={}", s + t), (&unit.value - &one).norm_bound().value, 0.0);

    let lhs = vacuum_semigroup(phi, s + t, x, cert, tol)?;
    let mid = vacuum_semigroup(phi, t, x, cert, tol)?;
    let grow = (t * cert.m).exp();
    let rhs = vacuum_semigroup(phi, s, &mid.value, &GrowthCertificate { c: cert.c * grow, m: cert.m }, tol)?;
    let budget = lhs.error_bound + rhs.error_bound + (s * cert.m).exp() * mid.error_bound + tol;
    let residual = (&lhs.value - &rhs.value).norm_bound().value;
    rep.record("semigroup", format!("s={s}; t={t}; x={x}"), residual, budget);
    Ok(rep)
}

/// `ĵ_s[f, g](a c − c a)` with `c = ĵ_{t−s}[θ_s f, θ_s g](b)`.
#[allow(clippy::too_many_arguments)]
pub fn commutator_matrix_element<S: Scalar>(
    phi: &FlowGenerator<S>,
    f: &StepFunction<S>,
    g: &StepFunction<S>,
    s: f64,
    t: f64,
    a: &AlgebraElement<S>,
    b: &AlgebraElement<S>,
    cert_a: &GrowthCertificate,
    cert_b: &GrowthCertificate,
    tol: f64,
) -> Result<SeriesResult<S>> {
    if !(0.0 <= s && s < t) {
        return Err(Error::InvalidParameter(format!("commutator needs 0 ≤ s < t, got s={s}, t={t}")));
    }
    check_pair(phi, f, g)?;
    let (c, cert_c) = cocycle_inner(phi, &f.shift(s), &g.shift(s), t - s, b, cert_b, tol / 4.0)?;
    let comm = a.commutator(&c.value)?;
    let (cp, mp) = product_closure_bound(cert_a.c, cert_a.m, cert_c.c, cert_c.m);
    let cert_p = GrowthCertificate { c: 2.0 * cp, m: mp };
    let out = cocycle_matrix_element(phi, f, g, s, &comm, &cert_p, tol / 2.0)?;
    let maps = interval_maps(f, g, 0.0, s)?;
    // the error in c enters only through [a, c − c̃], which vanishes identically
    // in a commutative algebra
    let carried =
        if phi.algebra().is_commutative() { 0.0 } else { magnification(&maps, mp) * 2.0 * cert_a.c * c.error_bound };
    Ok(SeriesResult {
        value: out.value,
        terms_used: c.terms_used + out.terms_used,
        error_bound: out.error_bound + carried,
    })
}

#[cfg(test)]
mod tests;
