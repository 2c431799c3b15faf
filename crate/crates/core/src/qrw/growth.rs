use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{spectral_norm, AlgebraElement, BasisWord};
use crate::error::{Error, Result};
use crate::generator::FlowGenerator;
use crate::report::fmt_e12;
use crate::scalar::{Scalar, C64};

use super::{step, TensorOperator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthOptions {
    /// Largest depth `N`.
    pub n_max: usize,
    /// Allowed relative spread of successive ratios in the window `[N/2, N]`.
    pub slack: f64,
    /// Materialise `φ_n(x)` for the ℓ1 bound while it has at most this many
    /// entries.
    pub l1_cap: usize,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions { n_max: 12, slack: 0.1, l1_cap: 50_000 }
    }
}

/// Lower-bound recipes: each pair `(ξ, χ)` gives `‖(φ^ξ_χ)^n(x)‖/(‖ξ‖‖χ‖)^n`.
#[derive(Clone, Debug)]
pub enum Probe<S> {
    /// `(f_k, ω)`, `(ω, f_k)` for every `k`, and `(ω, ω)`.
    Corners,
    Slices(Vec<(Vec<S>, Vec<S>)>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum GrowthClass {
    Geometric { c: f64, m: f64 },
    SuperGeometric,
    Inconclusive,
}

impl GrowthClass {
    pub fn label(&self) -> &'static str {
        match self {
            GrowthClass::Geometric { .. } => "geometric",
            GrowthClass::SuperGeometric => "super-geometric",
            GrowthClass::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GrowthProfile<S: Scalar> {
    pub x: AlgebraElement<S>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub class: GrowthClass,
    pub options: GrowthOptions,
}

impl<S: Scalar> GrowthProfile<S> {
    /// `(C_x, M_x)` when the profile is geometric.
    pub fn certificate(&self) -> Option<(f64, f64)> {
        match self.class {
            GrowthClass::Geometric { c, m } => Some((c, m)),
            _ => None,
        }
    }

    /// `n,upper,lower,class` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,upper,lower,class\n");
        for (n, (u, l)) in self.upper.iter().zip(&self.lower).enumerate() {
            let _ = writeln!(s, "{n},{},{},{}", fmt_e12(*u), fmt_e12(*l), self.class.label());
        }
        s
    }
}

struct WordDp<'a, S: Scalar> {
    phi: &'a FlowGenerator<S>,
    edges: HashMap<BasisWord, Vec<(BasisWord, f64)>>,
    memo: HashMap<(BasisWord, usize), f64>,
}

impl<S: Scalar> WordDp<'_, S> {
    fn edges(&mut self, w: &BasisWord) -> Result<Vec<(BasisWord, f64)>> {
        if let Some(e) = self.edges.get(w) {
            return Ok(e.clone());
        }
        let dim = self.phi.dim();
        let mut out = Vec::new();
        for (w2, m) in self.phi.word_decomposition(w)? {
            let dm = DMatrix::<C64>::from_fn(dim, dim, |i, j| m[i][j].to_c64());
            let nrm = spectral_norm(&dm);
            if nrm > 0.0 {
                out.push((w2, nrm));
            }
        }
        self.edges.insert(w.clone(), out.clone());
        Ok(out)
    }

    /// `U_k(w)`, with `U_0 = 1` and `U_k(w) = Σ_{w'} ‖M_{w,w'}‖ U_{k−1}(w')`.
    fn bound(&mut self, w: &BasisWord, k: usize) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        if let Some(&v) = self.memo.get(&(w.clone(), k)) {
            return Ok(v);
        }
        let mut acc = 0.0;
        for (w2, nrm) in self.edges(w)? {
            acc += nrm * self.bound(&w2, k - 1)?;
        }
        self.memo.insert((w.clone(), k), acc);
        Ok(acc)
    }
}

/// Word-recursive upper bounds for `‖φ_n(x)‖`, `n = 0..=n_max`: writing
/// `φ(w) = Σ_{w'} w' ⊗ M_{w,w'}`, `‖φ_n(w)‖ ≤ Σ_{w'} ‖M_{w,w'}‖ ‖φ_{n−1}(w')‖`.
pub fn word_dp_bounds<S: Scalar>(phi: &FlowGenerator<S>, x: &AlgebraElement<S>, n_max: usize) -> Result<Vec<f64>> {
    let mut dp = WordDp { phi, edges: HashMap::new(), memo: HashMap::new() };
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = 0.0;
        for (w, c) in x.terms() {
            acc += c.abs() * dp.bound(w, n)?;
        }
        out.push(acc);
    }
    Ok(out)
}

fn vec_norm<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|c| c.abs().powi(2)).sum::<f64>().sqrt()
}

/// Certified upper and lower bounds for `‖φ_n(x)‖` and the resulting growth
/// verdict.
pub fn growth_profile<S: Scalar>(
    phi: &FlowGenerator<S>,
    x: &AlgebraElement<S>,
    options: &GrowthOptions,
    probe: &Probe<S>,
) -> Result<GrowthProfile<S>> {
    let n_max = options.n_max;
    if n_max < 2 {
        return Err(Error::InvalidParameter("growth profile needs N ≥ 2".into()));
    }
    let mut upper = word_dp_bounds(phi, x, n_max)?;
    upper[0] = upper[0].min(x.norm_bound().value);

    let mut t = TensorOperator::scalar(x, phi.dim());
    for u in upper.iter_mut().skip(1) {
        match step(phi, &t, options.l1_cap) {
            Ok(next) => {
                t = next;
                *u = u.min(t.l1_bound());
            }
            Err(Error::ResourceCap { .. }) => break,
            Err(e) => return Err(e),
        }
    }

    let dim = phi.dim();
    let probes: Vec<(Vec<S>, Vec<S>)> = match probe {
        Probe::Slices(p) => p.clone(),
        Probe::Corners => {
            let unit = |k: usize| (0..dim).map(|i| if i == k { S::one() } else { S::zero() }).collect::<Vec<S>>();
            let mut p = vec![(unit(0), unit(0))];
            for k in 1..dim {
                p.push((unit(k), unit(0)));
                p.push((unit(0), unit(k)));
            }
            p
        }
    };
    let mut lower = vec![0.0; n_max + 1];
    lower[0] = x.norm_lower();
    for (xi, chi) in &probes {
        let scale = vec_norm(xi) * vec_norm(chi);
        if scale == 0.0 {
            continue;
        }
        let mut y = x.clone();
        for n in 1..=n_max {
            y = phi.slice_one(&y, xi, chi)?;
            if y.is_zero() {
                break;
            }
            lower[n] = f64::max(lower[n], y.norm_lower() / scale.powi(n as i32));
        }
    }

    let class = classify(&upper, &lower, options.slack);
    Ok(GrowthProfile { x: x.clone(), upper, lower, class, options: options.clone() })
}

fn classify(upper: &[f64], lower: &[f64], slack: f64) -> GrowthClass {
    let n_max = upper.len() - 1;
    let lo = n_max / 2;

    let lw = &lower[lo..];
    if lw.iter().all(|&v| v > 0.0) {
        let q: Vec<f64> = lw.windows(2).map(|w| w[1] / w[0]).collect();
        let monotone = q.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
        if monotone && q[q.len() - 1] >= (1.0 + slack) * q[0] {
            return GrowthClass::SuperGeometric;
        }
    }

    if let Some(z) = upper.iter().position(|&u| u == 0.0) {
        if upper[z..].iter().all(|&u| u == 0.0) {
            let m = (0..z.saturating_sub(1)).map(|n| upper[n + 1] / upper[n]).fold(0.0, f64::max);
            let c = (0..z).map(|n| upper[n] / m.powi(n as i32)).fold(0.0, f64::max);
            return if z == 0 { GrowthClass::Geometric { c: 0.0, m: 0.0 } } else { GrowthClass::Geometric { c, m } };
        }
        return GrowthClass::Inconclusive;
    }

    let r: Vec<f64> = upper[lo..].windows(2).map(|w| w[1] / w[0]).collect();
    let (rmin, rmax) = r.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    if rmax <= (1.0 + slack) * rmin {
        let c = upper.iter().enumerate().map(|(n, &u)| u / rmax.powi(n as i32)).fold(0.0, f64::max);
        return GrowthClass::Geometric { c, m: rmax };
    }
    GrowthClass::Inconclusive
}

/// Growth constants for `xy`: `(C_x C_y, M_x + M_x M_y + M_y)`.
pub fn product_closure_bound(cx: f64, mx: f64, cy: f64, my: f64) -> (f64, f64) {
    (cx * cy, mx + mx * my + my)
}
