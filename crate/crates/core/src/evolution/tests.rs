use super::*;
use crate::algebra::words::{e, uv};
use crate::algebra::{Algebra, GroupSpec};
use crate::generator::{torus_generator, walk_generator, TransitionSpec};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn torus() -> FlowGenerator<C64> {
    let t = Algebra::torus(C64::i()).unwrap();
    torus_generator(&t, 0, 0, c(1.0, 0.0), c(1.0, 0.0)).unwrap()
}

fn poisson() -> FlowGenerator<C64> {
    walk_generator(GroupSpec::Integers, vec![vec![1]], vec![TransitionSpec::Constant(c(1.0, 0.0))]).unwrap()
}

fn lazy_walk() -> FlowGenerator<C64> {
    walk_generator(
        GroupSpec::Integers,
        vec![vec![1], vec![-1]],
        vec![TransitionSpec::Constant(c(0.8, 0.0)), TransitionSpec::Constant(c(0.0, 0.6))],
    )
    .unwrap()
}

fn cert(phi: &FlowGenerator<C64>, x: &AlgebraElement<C64>) -> GrowthCertificate {
    certify(phi, x, &GrowthOptions::default()).unwrap()
}

fn dist(a: &AlgebraElement<C64>, b: &AlgebraElement<C64>) -> f64 {
    (a - b).norm_bound().value
}

#[test]
fn time_zero_is_identity() {
    let phi = torus();
    let x = uv(phi.algebra(), 1, 2);
    let r = vacuum_semigroup(&phi, 0.0, &x, &cert(&phi, &x), 1e-12).unwrap();
    assert_eq!(r.value, x);
    assert_eq!(r.error_bound, 0.0);
}

#[test]
fn torus_semigroup_damps_u() {
    let phi = torus();
    let u = uv(phi.algebra(), 1, 0);
    let k = cert(&phi, &u);
    for t in [0.1, 0.5, 1.0, 2.0] {
        let r = vacuum_semigroup(&phi, t, &u, &k, 1e-12).unwrap();
        assert!(dist(&r.value, &u.scale(&c((-t / 2.0).exp(), 0.0))) <= 1e-11);
        assert!(r.error_bound <= 1e-11);
    }
}

#[test]
fn poisson_walk_closed_form() {
    let phi = poisson();
    let x = e(phi.algebra(), vec![0]);
    let k = cert(&phi, &x);
    let t = 1.3f64;
    let r = vacuum_semigroup(&phi, t, &x, &k, 1e-12).unwrap();
    let mut fact = 1.0;
    for j in 0..25i64 {
        if j > 0 {
            fact *= j as f64;
        }
        let expect = (-t).exp() * t.powi(j as i32) / fact;
        let got = r.value.coeff(&word(-j));
        assert!((got - c(expect, 0.0)).norm() <= 1e-11, "k={}: {got} vs {expect}", -j);
    }
    assert!(r.value.coeff(&word(1)).norm() <= 1e-15);
}

fn word(k: i64) -> crate::algebra::BasisWord {
    crate::algebra::BasisWord::GroupFn(vec![k])
}

#[test]
fn semigroup_is_unital() {
    let phi = lazy_walk();
    let one = AlgebraElement::one(phi.algebra());
    let r = vacuum_semigroup(&phi, 3.0, &one, &cert(&phi, &one), 1e-12).unwrap();
    assert!(dist(&r.value, &one) <= 1e-14);
}

#[test]
fn walk_semigroup_is_substochastic() {
    let phi = lazy_walk();
    for g in [0i64, 3] {
        let x = e(phi.algebra(), vec![g]);
        let r = vacuum_semigroup(&phi, 0.7, &x, &cert(&phi, &x), 1e-12).unwrap();
        for v in r.value.terms().values() {
            assert!(v.im.abs() <= 1e-12);
            assert!(v.re >= -1e-12 && v.re <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn rejects_generator_with_nonzero_tau_one() {
    let t = Algebra::torus(C64::i()).unwrap();
    let good = std::sync::Arc::new(torus_generator(&t, 0, 0, c(1.0, 0.0), c(0.0, 0.0)).unwrap());
    let g2 = good.clone();
    let bad = FlowGenerator::from_rule(&t, good.basis().clone(), crate::generator::Family::Custom, move |w| {
        let x = AlgebraElement::word(g2.algebra(), w.clone());
        let mut m = g2.apply(&x)?;
        m.add(0, 0, &x.scale(&c(0.5, 0.0)));
        Ok(m)
    });
    let u = uv(&t, 1, 0);
    let k = GrowthCertificate::new(1.0, 2.0).unwrap();
    assert!(matches!(vacuum_semigroup(&bad, 1.0, &u, &k, 1e-10), Err(Error::Numerical(_))));
}

#[test]
fn semigroup_law_on_torus() {
    let phi = torus();
    let x = uv(phi.algebra(), 1, 1);
    let rep = semigroup_check(&phi, 0.5, 0.5, &x, &cert(&phi, &x), 1e-12).unwrap();
    assert!(rep.pass(), "{rep}");
    let r = vacuum_semigroup(&phi, 1.0, &x, &cert(&phi, &x), 1e-12).unwrap();
    assert!(dist(&r.value, &x.scale(&c((-1.0f64).exp(), 0.0))) <= 1e-11);
}

#[test]
fn semigroup_law_on_walk() {
    let phi = lazy_walk();
    let x = &e(phi.algebra(), vec![0]) + &e(phi.algebra(), vec![2]).scale(&c(0.0, 1.0));
    let rep = semigroup_check(&phi, 0.3, 0.9, &x, &cert(&phi, &x), 1e-11).unwrap();
    assert!(rep.pass(), "{rep}");
}

#[test]
fn truncation_error_is_sound() {
    let phi = lazy_walk();
    let x = e(phi.algebra(), vec![0]);
    let k = cert(&phi, &x);
    let tight = vacuum_semigroup(&phi, 1.5, &x, &k, 1e-14).unwrap();
    for tol in [1e-2, 1e-4, 1e-7] {
        let loose = vacuum_semigroup(&phi, 1.5, &x, &k, tol).unwrap();
        assert!(loose.error_bound <= tol * (1.0 + 1e-9) + 1e-12);
        assert!(loose.terms_used < tight.terms_used);
        assert!(dist(&loose.value, &tight.value) <= loose.error_bound + tight.error_bound);
    }
}

#[test]
fn cocycle_with_zero_functions_is_semigroup() {
    let phi = lazy_walk();
    let x = e(phi.algebra(), vec![1]);
    let k = cert(&phi, &x);
    let z = StepFunction::zero(2, 2.0);
    let a = cocycle_matrix_element(&phi, &z, &z, 1.2, &x, &k, 1e-12).unwrap();
    let b = vacuum_semigroup(&phi, 1.2, &x, &k, 1e-12).unwrap();
    assert!(dist(&a.value, &b.value) <= a.error_bound + b.error_bound);
}

#[test]
fn single_interval_torus_cocycle() {
    let phi = torus();
    let u = uv(phi.algebra(), 1, 0);
    let xi = vec![c(0.3, -0.2), c(0.1, 0.4)];
    let eta = vec![c(-0.5, 0.1), c(0.2, 0.2)];
    let t = 0.8;
    let f = StepFunction::constant(1.0, xi.clone());
    let g = StepFunction::constant(1.0, eta.clone());
    let r = cocycle_matrix_element(&phi, &f, &g, t, &u, &cert(&phi, &u), 1e-12).unwrap();
    let m = phi.apply(&u).unwrap().compress(&hat(&xi), &hat(&eta)).unwrap();
    let mu = m.coeff(&crate::algebra::BasisWord::Torus { m: 1, n: 0 });
    let expect = ((inner(&xi, &eta) + mu) * t).exp();
    assert!(dist(&r.value, &u.scale(&expect)) <= 1e-11, "{} vs {expect}", r.value);
}

#[test]
fn equal_intervals_merge() {
    let phi = lazy_walk();
    let x = e(phi.algebra(), vec![0]);
    let xi = vec![c(0.2, 0.1), c(-0.3, 0.0)];
    let eta = vec![c(0.1, 0.0), c(0.0, 0.5)];
    let f2 = StepFunction::new(2, vec![0.0, 0.4, 0.8], vec![xi.clone(), xi.clone()]).unwrap();
    let g2 = StepFunction::new(2, vec![0.0, 0.4, 0.8], vec![eta.clone(), eta.clone()]).unwrap();
    let f1 = StepFunction::constant(0.8, xi);
    let g1 = StepFunction::constant(0.8, eta);
    let k = cert(&phi, &x);
    let a = cocycle_matrix_element(&phi, &f2, &g2, 0.8, &x, &k, 1e-12).unwrap();
    let b = cocycle_matrix_element(&phi, &f1, &g1, 0.8, &x, &k, 1e-12).unwrap();
    assert!(dist(&a.value, &b.value) <= a.error_bound + b.error_bound + 1e-12);
}

fn two_piece() -> (StepFunction<C64>, StepFunction<C64>) {
    let f = StepFunction::new(
        2,
        vec![0.0, 0.5, 1.0, 1.6],
        vec![vec![c(0.3, 0.0), c(0.0, 0.2)], vec![c(-0.1, 0.1), c(0.4, 0.0)], vec![c(0.0, 0.0), c(0.2, -0.3)]],
    )
    .unwrap();
    let g = StepFunction::new(
        2,
        vec![0.0, 0.7, 1.6],
        vec![vec![c(0.1, -0.2), c(0.3, 0.0)], vec![c(0.0, 0.4), c(-0.2, 0.1)]],
    )
    .unwrap();
    (f, g)
}

#[test]
fn cocycle_law() {
    let phi = lazy_walk();
    let x = &e(phi.algebra(), vec![0]) + &e(phi.algebra(), vec![-1]).scale(&c(0.5, 0.0));
    let k = cert(&phi, &x);
    let (f, g) = two_piece();
    for (s, t) in [(0.3, 0.9), (0.6, 0.6), (1.0, 0.5)] {
        let whole = cocycle_matrix_element(&phi, &f, &g, s + t, &x, &k, 1e-12).unwrap();
        let (inner_r, k2) = cocycle_inner(&phi, &f.shift(s), &g.shift(s), t, &x, &k, 1e-12).unwrap();
        let outer = cocycle_matrix_element(&phi, &f, &g, s, &inner_r.value, &k2, 1e-12).unwrap();
        let carried = magnification(&interval_maps(&f, &g, 0.0, s).unwrap(), k.m) * inner_r.error_bound;
        let budget = whole.error_bound + outer.error_bound + carried + 1e-12;
        assert!(dist(&whole.value, &outer.value) <= budget, "s={s} t={t}");
    }
}

#[test]
fn cocycle_solves_integral_equation() {
    let phi = lazy_walk();
    let x = e(phi.algebra(), vec![0]);
    let k = cert(&phi, &x);
    let (f, g) = two_piece();
    let full = |t: f64| -> AlgebraElement<C64> {
        let r = cocycle_matrix_element(&phi, &f, &g, t, &x, &k, 1e-14).unwrap();
        let w = StepFunction::inner_from(&f, &g, t).unwrap().exp();
        r.value.scale(&w)
    };
    let h = 1e-4;
    for t in [0.25, 0.85, 1.3] {
        let fd = (&full(t + h) - &full(t - h)).scale(&c(0.5 / h, 0.0));
        let y = phi.slice_one(&x, &hat(&f.value_at(t)), &hat(&g.value_at(t))).unwrap();
        let r = cocycle_matrix_element(&phi, &f, &g, t, &y, &cert(&phi, &y), 1e-14).unwrap();
        let w = StepFunction::inner_from(&f, &g, t).unwrap().exp();
        let deriv = r.value.scale(&w);
        let rel = dist(&fd, &deriv) / deriv.norm_bound().value.max(1e-300);
        assert!(rel <= 1e-5, "t={t}: relative error {rel:e}");
    }
}

#[test]
fn cocycle_rejects_mismatched_inputs() {
    let phi = lazy_walk();
    let x = e(phi.algebra(), vec![0]);
    let k = cert(&phi, &x);
    let f = StepFunction::zero(2, 1.0);
    let g = StepFunction::zero(2, 2.0);
    assert!(matches!(cocycle_matrix_element(&phi, &f, &g, 0.5, &x, &k, 1e-10), Err(Error::InvalidParameter(_))));
    let f3 = StepFunction::zero(3, 1.0);
    assert!(matches!(
        cocycle_matrix_element(&phi, &f3, &f3, 0.5, &x, &k, 1e-10),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn commuting_algebra_commutator_vanishes() {
    let phi = lazy_walk();
    let a = e(phi.algebra(), vec![0]);
    let b = e(phi.algebra(), vec![1]);
    let (f, g) = two_piece();
    let r = commutator_matrix_element(&phi, &f, &g, 0.5, 1.2, &a, &b, &cert(&phi, &a), &cert(&phi, &b), 1e-10).unwrap();
    assert!(r.value.norm_bound().value <= r.error_bound.max(1e-12));
}

#[test]
fn torus_commutator_is_visible() {
    let phi = torus();
    let a = uv(phi.algebra(), 1, 0);
    let b = uv(phi.algebra(), 0, 1);
    let (f, g) = two_piece();
    let r = commutator_matrix_element(&phi, &f, &g, 0.5, 1.2, &a, &b, &cert(&phi, &a), &cert(&phi, &b), 1e-10).unwrap();
    assert!(r.value.norm_bound().value > 1e-3 + r.error_bound);
}

#[test]
fn commutator_needs_ordered_times() {
    let phi = torus();
    let a = uv(phi.algebra(), 1, 0);
    let f = StepFunction::zero(2, 2.0);
    let k = cert(&phi, &a);
    assert!(commutator_matrix_element(&phi, &f, &f, 1.0, 1.0, &a, &a, &k, &k, 1e-10).is_err());
}

#[test]
fn super_geometric_element_not_certified() {
    let t = Algebra::torus(C64::i()).unwrap();
    let phi = torus_generator(&t, 1, 0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    let u = uv(&t, 1, 0);
    assert!(matches!(certify(&phi, &u, &GrowthOptions::default()), Err(Error::NotCertified(_))));
}

#[test]
fn step_function_json_round_trip() {
    let (f, _) = two_piece();
    let back = StepFunction::<C64>::from_json(2, &f.to_json()).unwrap();
    assert_eq!(back, f);
    let v = serde_json::json!({"T": 1.0, "values": [[[0.5, 0.0], [0.0, 1.0]]]});
    let s = StepFunction::<C64>::from_json(2, &v).unwrap();
    assert_eq!(s.breaks(), &[0.0, 1.0]);
    assert_eq!(s.value_at(0.99), vec![c(0.5, 0.0), c(0.0, 1.0)]);
    assert_eq!(s.value_at(1.0), vec![c(0.0, 0.0); 2]);
}

#[test]
fn refine_and_shift() {
    let (f, g) = two_piece();
    let p = StepFunction::refine(&f, &g, 0.0, 1.6).unwrap();
    let starts: Vec<f64> = p.iter().map(|q| q.start).collect();
    assert_eq!(starts, vec![0.0, 0.5, 0.7, 1.0]);
    let s = f.shift(0.6);
    assert!((s.horizon() - 1.0).abs() < 1e-15);
    assert_eq!(s.value_at(0.0), f.value_at(0.6));
    assert_eq!(s.value_at(0.5), f.value_at(1.1));
}
