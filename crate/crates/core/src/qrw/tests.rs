use proptest::prelude::*;

use super::*;
use crate::algebra::words::{bs, e, uv};
use crate::algebra::GroupSpec;
use crate::generator::{exclusion_generator, torus_generator, walk_generator, ExclusionParams, TransitionSpec};
use crate::scalar::{Exact, C64};

fn q(n: i64) -> Exact {
    Exact::from_i64(n)
}

fn torus(a: i64, c1: i64, c2: i64) -> FlowGenerator<Exact> {
    let t = Algebra::torus(Exact::i()).unwrap();
    torus_generator(&t, a, 0, q(c1), q(c2)).unwrap()
}

fn walk() -> FlowGenerator<Exact> {
    walk_generator(
        GroupSpec::Integers,
        vec![vec![1], vec![-1]],
        vec![TransitionSpec::Constant(q(1)), TransitionSpec::Constant(Exact::i())],
    )
    .unwrap()
}

fn m_u() -> Vec<Vec<Exact>> {
    let h = Exact::from_ratio(-1, 2);
    vec![vec![h, q(-1), q(0)], vec![q(1), q(0), q(0)], vec![q(0), q(0), q(0)]]
}

fn unit(dim: usize, k: usize) -> Vec<Exact> {
    (0..dim).map(|i| if i == k { q(1) } else { q(0) }).collect()
}

#[test]
fn depth_zero_is_identity() {
    let phi = torus(0, 1, 1);
    let x = &uv(phi.algebra(), 2, 1) + &uv(phi.algebra(), 0, -1);
    let t = iterate(&phi, &x, 0).unwrap();
    assert_eq!(t.depth(), 0);
    assert_eq!(t.get(&[], &[]), x);
    assert_eq!(t.slice(&[], &[]).unwrap(), x);
}

#[test]
fn torus_iterate_is_product_form() {
    let phi = torus(0, 1, 1);
    let u = uv(phi.algebra(), 1, 0);
    for n in 0..=4 {
        assert_eq!(iterate(&phi, &u, n).unwrap(), TensorOperator::kron_power(&u, &m_u(), n));
    }
}

#[test]
fn one_step_vacuum_slice_is_tau() {
    let phi = walk();
    let x = e(phi.algebra(), vec![0]);
    let t = iterate(&phi, &x, 1).unwrap();
    let w = vec![unit(3, 0)];
    assert_eq!(t.slice(&w, &w).unwrap(), phi.tau(&x).unwrap());
}

#[test]
fn shifted_torus_corner_slice_is_factorial() {
    let phi = torus(1, 1, 0);
    let u = uv(phi.algebra(), 1, 0);
    for n in 1..=4 {
        let t = iterate(&phi, &u, n).unwrap();
        let xi = vec![unit(3, 1); n];
        let chi = vec![unit(3, 0); n];
        let fact: i64 = (1..=n as i64).product();
        let expect = uv(phi.algebra(), n as i64 + 1, 0).scale(&q(fact));
        assert_eq!(t.slice(&xi, &chi).unwrap(), expect);
        assert_eq!(sequential_slice(&phi, &u, &xi, &chi).unwrap(), expect);
    }
}

#[test]
fn exclusion_matches_nested_sum() {
    let a = q(1) + Exact::i();
    let alpha = std::collections::BTreeMap::from([((1, 2), a.clone()), ((2, 1), a.conj()), ((2, 3), q(2)), ((3, 2), q(2))]);
    let eta = std::collections::BTreeMap::from([(1, q(1)), (3, q(-2))]);
    let phi = exclusion_generator(ExclusionParams::new(vec![1, 2, 3], alpha, eta).unwrap()).unwrap();
    for n in 0..=3 {
        for i in [1, 2] {
            let x = crate::algebra::words::b(phi.algebra(), i);
            assert_eq!(iterate(&phi, &x, n).unwrap(), exclusion_closed_form(&phi, i, n).unwrap(), "n={n} i={i}");
        }
    }
}

#[test]
fn appending_slice_law() {
    let phi = walk();
    let x = &e(phi.algebra(), vec![0]) + &e(phi.algebra(), vec![2]).scale(&Exact::i());
    let xi = vec![q(1), q(2), Exact::i()];
    let chi = vec![q(1), q(0), q(-1)];
    for n in 0..=2 {
        let lhs = iterate(&phi, &x, n + 1).unwrap().slice_last(&xi, &chi).unwrap();
        let rhs = iterate(&phi, &phi.slice_one(&x, &xi, &chi).unwrap(), n).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn star_covariance() {
    let phi = exclusion_generator(ExclusionParams::chain(2, q(1) + Exact::i())).unwrap();
    let c = phi.algebra().clone();
    let x = &bs(&c, 1) * &crate::algebra::words::b(&c, 2);
    for n in 0..=2 {
        assert_eq!(iterate(&phi, &x.star(), n).unwrap(), iterate(&phi, &x, n).unwrap().adjoint());
    }
}

#[test]
fn embed_places_slots() {
    let t = Algebra::torus(Exact::i()).unwrap();
    let x = uv(&t, 1, 0);
    // depth-3 tensor A ⊗ E_{01} ⊗ E_{10} ⊗ E_{11} on K̂ = C²
    let mut s = TensorOperator::zero(&t, 3, 2);
    s.add(Index::from_slice(&[0, 1, 1]), Index::from_slice(&[1, 0, 1]), &x);
    let out = s.embed(5, &[1, 3, 4]).unwrap();
    assert_eq!(out.len(), 4);
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        assert_eq!(out.get(&[0, a, 1, 1, b], &[1, a, 0, 1, b]), x);
    }
    assert_eq!(s.embed(3, &[1, 2, 3]).unwrap(), s);
    assert!(s.embed(5, &[1, 3]).is_err());
    assert!(s.embed(5, &[3, 1, 4]).is_err());
}

#[test]
fn embedded_projector_is_delta_filter() {
    let phi = torus(0, 1, 1);
    let alg = phi.algebra().clone();
    let x = uv(&alg, 1, 0);
    let y = &uv(&alg, 1, 0) + &uv(&alg, 0, 1);
    let sx = iterate(&phi, &x, 2).unwrap().embed(3, &[1, 3]).unwrap();
    let sy = iterate(&phi, &y, 2).unwrap().embed(3, &[2, 3]).unwrap();
    let delta = TensorOperator::delta_projector(&alg, 3, 1).embed(3, &[3]).unwrap();
    let lhs = sx.mul(&delta).unwrap().mul(&sy).unwrap();
    let rhs = sx.mul_delta(&sy, &[false, false, true]).unwrap();
    assert_eq!(lhs, rhs);
    assert!(!rhs.is_zero());
}

#[test]
fn embed_is_unital_and_multiplicative() {
    let phi = walk();
    let g = phi.algebra().clone();
    let a = iterate(&phi, &e(&g, vec![0]), 2).unwrap();
    let b = iterate(&phi, &e(&g, vec![1]), 2).unwrap();
    let alpha = [1, 3];
    let lhs = a.mul(&b).unwrap().embed(3, &alpha).unwrap();
    let rhs = a.embed(3, &alpha).unwrap().mul(&b.embed(3, &alpha).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
    let one = TensorOperator::kron_power(&AlgebraElement::one(&g), &[unit(3, 0), unit(3, 1), unit(3, 2)], 2);
    let one3 = TensorOperator::kron_power(&AlgebraElement::one(&g), &[unit(3, 0), unit(3, 1), unit(3, 2)], 3);
    assert_eq!(one.embed(3, &alpha).unwrap(), one3);
}

#[test]
fn resource_cap_is_enforced() {
    let phi = torus(1, 1, 1);
    let u = uv(phi.algebra(), 1, 0);
    assert!(matches!(iterate_with_cap(&phi, &u, 4, 5), Err(Error::ResourceCap { .. })));
}

#[test]
fn json_lines_dump() {
    let phi = torus(0, 1, 0);
    let dump = iterate(&phi, &uv(phi.algebra(), 1, 0), 1).unwrap().to_json_lines();
    let first: serde_json::Value = serde_json::from_str(dump.lines().next().unwrap()).unwrap();
    assert_eq!(first["r"], serde_json::json!([0]));
    assert_eq!(first["c"], serde_json::json!([0]));
    assert_eq!(first["elem"]["terms"][0]["word"], serde_json::json!({"m": 1, "n": 0}));
}

// growth

#[test]
fn torus_growth_is_geometric_with_m_u_norm() {
    let phi = torus(0, 1, 1);
    let u = uv(phi.algebra(), 1, 0);
    let prof = growth_profile(&phi, &u, &GrowthOptions::default(), &Probe::Corners).unwrap();
    let m = crate::algebra::spectral_norm(&nalgebra::DMatrix::from_fn(3, 3, |i, j| m_u()[i][j].to_c64()));
    let (c, mx) = prof.certificate().expect("geometric");
    assert!((mx - m).abs() < 1e-12 * m, "{mx} vs {m}");
    assert!((c - 1.0).abs() < 1e-9);
    for n in 0..=12 {
        assert!((prof.upper[n] - m.powi(n as i32)).abs() <= 1e-12 * m.powi(n as i32));
        assert!(prof.lower[n] <= prof.upper[n]);
    }
}

#[test]
fn shifted_torus_is_super_geometric() {
    let phi = torus(1, 1, 0);
    let u = uv(phi.algebra(), 1, 0);
    let opts = GrowthOptions { n_max: 10, ..Default::default() };
    let prof = growth_profile(&phi, &u, &opts, &Probe::Corners).unwrap();
    assert_eq!(prof.class, GrowthClass::SuperGeometric);
    let mut fact = 1.0;
    for n in 1..=10 {
        fact *= n as f64;
        assert!(prof.lower[n] >= fact);
        assert!(prof.lower[n] <= prof.upper[n] * (1.0 + 1e-12));
    }
}

#[test]
fn walk_growth_respects_moment_bound() {
    let phi = walk_generator(
        GroupSpec::Integers,
        vec![vec![1], vec![-1]],
        vec![TransitionSpec::ZeroBelow { threshold: 0, value: q(1) }, TransitionSpec::Constant(Exact::from_ratio(1, 2))],
    )
    .unwrap();
    let g = vec![2];
    let x = e(phi.algebra(), g.clone());
    let prof = growth_profile(&phi, &x, &GrowthOptions { n_max: 10, ..Default::default() }, &Probe::Corners).unwrap();
    for n in 0..=10 {
        let bound = phi.walk_growth_bound(&g, n).unwrap();
        assert!(prof.upper[n] <= bound * (1.0 + 1e-12), "n={n}: {} > {bound}", prof.upper[n]);
    }
    assert!(prof.certificate().is_some());
}

#[test]
fn zero_generator_profile() {
    let phi = torus(0, 0, 0);
    let prof = growth_profile(&phi, &uv(phi.algebra(), 3, 1), &GrowthOptions::default(), &Probe::Corners).unwrap();
    assert_eq!(prof.class, GrowthClass::Geometric { c: 1.0, m: 0.0 });
    let csv = prof.to_csv();
    assert!(csv.starts_with("n,upper,lower,class\n0,1.000000000000e+00,1.000000000000e+00,geometric\n"));
}

#[test]
fn product_closure_examples() {
    assert_eq!(product_closure_bound(1.0, 1.0, 1.0, 1.0), (1.0, 3.0));
    assert_eq!(product_closure_bound(2.5, 4.0, 1.0, 0.0), (2.5, 4.0));
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_matches_binomial_sum(cx in 0.1f64..3.0, mx in 0.0f64..3.0, cy in 0.1f64..3.0, my in 0.0f64..3.0) {
        let (c, m) = product_closure_bound(cx, mx, cy, my);
        for n in 0..=8u64 {
            let mut s = 0.0;
            for k in 0..=n {
                let mut inner = 0.0;
                for l in 0..=k {
                    inner += binom(k, l) * my.powi((n - k + l) as i32);
                }
                s += binom(n, k) * mx.powi(k as i32) * inner;
            }
            let lhs = c * m.powi(n as i32) / (cx * cy);
            prop_assert!((s - lhs).abs() <= 1e-9 * lhs.max(1.0));
        }
    }

    #[test]
    fn slicing_iteration_consistency(
        coords in proptest::collection::vec((-2i64..=2, -2i64..=2), 18),
        m in -2i64..=2,
        n in -1i64..=1,
        depth in 1usize..=3,
    ) {
        let phi = torus(1, 1, 1);
        let x = uv(phi.algebra(), m, n);
        let vecs: Vec<Vec<Exact>> = coords
            .chunks(3)
            .map(|ch| ch.iter().map(|&(a, b)| Exact::new(num_rational::BigRational::from_integer(a.into()), num_rational::BigRational::from_integer(b.into()))).collect())
            .collect();
        let (xi, chi) = (&vecs[..depth], &vecs[3..3 + depth]);
        let t = iterate(&phi, &x, depth).unwrap();
        prop_assert_eq!(t.slice(xi, chi).unwrap(), sequential_slice(&phi, &x, xi, chi).unwrap());
    }

    #[test]
    fn slice_norm_bound(raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12), depth in 1usize..=2) {
        let t = Algebra::torus(C64::new(0.6, 0.8)).unwrap();
        let phi = torus_generator(&t, 1, -1, C64::new(0.7, 0.2), C64::new(-0.3, 1.1)).unwrap();
        let x = uv(&t, 1, 1);
        let prof = growth_profile(&phi, &x, &GrowthOptions { n_max: 2, ..Default::default() }, &Probe::Corners).unwrap();
        let vecs: Vec<Vec<C64>> = raw.chunks(3).map(|ch| ch.iter().map(|&(a, b)| C64::new(a, b)).collect()).collect();
        let (xi, chi) = (&vecs[..depth], &vecs[2..2 + depth]);
        let scale: f64 = xi.iter().chain(chi).map(|v| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()).product();
        let s = sequential_slice(&phi, &x, xi, chi).unwrap();
        prop_assert!(s.norm_lower() <= scale * prof.upper[depth] * (1.0 + 1e-12));
    }
}
