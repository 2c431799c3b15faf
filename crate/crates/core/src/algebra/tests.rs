use super::words::*;
use super::*;
use crate::scalar::Exact;
use proptest::prelude::*;

fn q(n: i64) -> Exact {
    Exact::from_i64(n)
}

fn torus_i() -> Arc<Algebra<Exact>> {
    Algebra::torus(Exact::i()).unwrap()
}

#[test]
fn torus_vu_is_lambda_inverse_uv() {
    let t = torus_i();
    let vu = &uv(&t, 0, 1) * &uv(&t, 1, 0);
    assert_eq!(vu, AlgebraElement::term(&t, -Exact::i(), BasisWord::Torus { m: 1, n: 1 }));
    let uv_ = &uv(&t, 1, 0) * &uv(&t, 0, 1);
    assert_eq!(uv_, uv(&t, 1, 1));
}

#[test]
fn torus_star_phase() {
    let t = torus_i();
    // (UV)* = V*U* = λ^{-1} U^{-1}V^{-1}
    let s = uv(&t, 1, 1).star();
    assert_eq!(s, AlgebraElement::term(&t, -Exact::i(), BasisWord::Torus { m: -1, n: -1 }));
    let direct = &uv(&t, 0, -1) * &uv(&t, -1, 0);
    assert_eq!(s, direct);
    assert_eq!(&s * &uv(&t, 1, 1), AlgebraElement::one(&t));
}

#[test]
fn car_products() {
    let c = Algebra::<Exact>::car();
    assert!((&b(&c, 1) * &b(&c, 1)).is_zero());
    let one = AlgebraElement::one(&c);
    let n1 = &bs(&c, 1) * &b(&c, 1);
    assert_eq!(&b(&c, 1) * &bs(&c, 1), &one - &n1);
    assert_eq!(b(&c, 1).star(), bs(&c, 1));
}

#[test]
fn group_products_and_norms() {
    let g = Algebra::<Exact>::group(GroupSpec::Integers);
    assert_eq!(&e(&g, vec![2]) * &e(&g, vec![2]), e(&g, vec![2]));
    assert!((&e(&g, vec![2]) * &e(&g, vec![3])).is_zero());
    assert_eq!(e(&g, vec![2]).star(), e(&g, vec![2]));
    let x = &e(&g, vec![0]).scale(&q(3)) - &AlgebraElement::one(&g);
    assert_eq!(x.norm_bound(), NormBound { value: 2.0, exact: true });
    let unit_only = AlgebraElement::scalar(&g, q(-4));
    assert_eq!(unit_only.norm_bound().value, 4.0);
}

#[test]
fn finite_group_sup_ignores_missing_outside() {
    let g = Algebra::<Exact>::group(GroupSpec::Cyclic { n: 2 });
    // e_0 + e_1 = 1 on Z/2
    let x = &e(&g, vec![0]) + &e(&g, vec![1]);
    assert_eq!(x.norm_bound().value, 1.0);
    let y = &x - &AlgebraElement::one(&g);
    assert_eq!(y.norm_bound().value, 0.0);
}

#[test]
fn norms_of_torus_and_car() {
    let t = torus_i();
    let x = uv(&t, 1, 1).scale(&q(2));
    assert_eq!(x.norm_bound(), NormBound { value: 2.0, exact: true });
    let c = Algebra::<Exact>::car();
    let y = &b(&c, 1) + &b(&c, 2);
    assert_eq!(y.norm_bound(), NormBound { value: 2.0, exact: false });
    assert!((y.norm_exact().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert!((b(&c, 1).norm_exact().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn jw_small_cases() {
    let c = Algebra::<Exact>::car();
    let id = AlgebraElement::one(&c).jw_matrix(&[1]).unwrap();
    assert_eq!(id, DMatrix::<C64>::identity(2, 2));
    let n = (&bs(&c, 1) * &b(&c, 1)).jw_matrix(&[1]).unwrap();
    assert_eq!(n, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)])));
    assert!(matches!(b(&c, 3).jw_matrix(&[1, 2]), Err(Error::SiteOutside(3))));
}

#[test]
fn mismatched_algebras() {
    let t = torus_i();
    let c = Algebra::<Exact>::car();
    assert_eq!(uv(&t, 1, 0).mul(&b(&c, 1)).unwrap_err(), Error::AlgebraMismatch);
    assert_eq!(uv(&t, 1, 0).mul(&b(&c, 1)).unwrap_err().to_string(), "algebra mismatch");
}

#[test]
fn bad_lambda_rejected() {
    assert!(Algebra::torus(Exact::from_i64(2)).is_err());
    assert!(Algebra::torus(C64::new(0.6, 0.8)).is_ok());
}

#[test]
fn rotation_relation() {
    let r = Algebra::<Exact>::rotation();
    let u = uvz(&r, 1, 0, 0);
    let v = uvz(&r, 0, 1, 0);
    let z = uvz(&r, 0, 0, 1);
    assert_eq!(&u * &v, &(&z * &v) * &u);
    assert_eq!(&z * &u, &u * &z);
    assert_eq!(&u.star() * &u, AlgebraElement::one(&r));
    let w = uvz(&r, 2, -1, 3);
    assert_eq!(&w.star() * &w, AlgebraElement::one(&r));
    assert_eq!(&w * &w.star(), AlgebraElement::one(&r));
}

#[test]
fn json_round_trip() {
    let t = torus_i();
    let x = &uv(&t, 1, 2).scale(&Exact::from_ratio(1, 3)) + &uv(&t, -1, 0).scale(&Exact::i());
    let v = json::element_to_json(&x);
    let back: AlgebraElement<Exact> = json::element_from_json(&v).unwrap();
    assert_eq!(back, x);
    let g = Algebra::<Exact>::group(GroupSpec::Heisenberg);
    let y = &e(&g, vec![1, 0, -2]) + &AlgebraElement::one(&g);
    let back: AlgebraElement<Exact> = json::element_from_json(&json::element_to_json(&y)).unwrap();
    assert_eq!(back, y);
    let c = Algebra::<Exact>::car();
    let z = &(&bs(&c, 2) * &b(&c, 1)) + &b(&c, 4);
    let back: AlgebraElement<Exact> = json::element_from_json(&json::element_to_json(&z)).unwrap();
    assert_eq!(back, z);
}

// random elements

fn coeff() -> impl Strategy<Value = Exact> {
    (-3i64..=3, -3i64..=3).prop_map(|(a, b)| Exact::from_i64(a) + Exact::i() * Exact::from_i64(b))
}

fn torus_elem() -> impl Strategy<Value = AlgebraElement<Exact>> {
    proptest::collection::vec((coeff(), -2i64..=2, -2i64..=2), 1..4).prop_map(|ts| {
        let t = torus_i();
        AlgebraElement::from_terms(&t, ts.into_iter().map(|(c, m, n)| (BasisWord::Torus { m, n }, c))).unwrap()
    })
}

fn rotation_elem() -> impl Strategy<Value = AlgebraElement<Exact>> {
    proptest::collection::vec((coeff(), -2i64..=2, -2i64..=2, -1i64..=1), 1..4).prop_map(|ts| {
        let r = Algebra::rotation();
        AlgebraElement::from_terms(&r, ts.into_iter().map(|(c, m, n, p)| (BasisWord::Rotation { m, n, p }, c))).unwrap()
    })
}

fn car_word() -> impl Strategy<Value = CarWord> {
    (0u32..8, 0u32..8).prop_map(|(cm, am)| {
        let pick = |mask: u32| (1..=3).filter(|k| mask >> (k - 1) & 1 == 1).collect();
        CarWord { cr: pick(cm), an: pick(am) }
    })
}

fn car_elem() -> impl Strategy<Value = AlgebraElement<Exact>> {
    proptest::collection::vec((coeff(), car_word()), 1..4).prop_map(|ts| {
        let c = Algebra::car();
        AlgebraElement::from_terms(&c, ts.into_iter().map(|(k, w)| (BasisWord::Car(w), k))).unwrap()
    })
}

fn group_elem() -> impl Strategy<Value = AlgebraElement<Exact>> {
    (coeff(), proptest::collection::vec((coeff(), -3i64..=3), 0..4)).prop_map(|(u, ts)| {
        let g = Algebra::group(GroupSpec::Integers);
        let mut x = AlgebraElement::scalar(&g, u);
        for (c, k) in ts {
            x = &x + &AlgebraElement::term(&g, c, BasisWord::GroupFn(vec![k]));
        }
        x
    })
}

fn any_triple() -> impl Strategy<Value = [AlgebraElement<Exact>; 3]> {
    prop_oneof![
        (torus_elem(), torus_elem(), torus_elem()).prop_map(|(a, b, c)| [a, b, c]),
        (rotation_elem(), rotation_elem(), rotation_elem()).prop_map(|(a, b, c)| [a, b, c]),
        (car_elem(), car_elem(), car_elem()).prop_map(|(a, b, c)| [a, b, c]),
        (group_elem(), group_elem(), group_elem()).prop_map(|(a, b, c)| [a, b, c]),
    ]
}

fn letter_chain() -> impl Strategy<Value = Vec<(u32, bool)>> {
    proptest::collection::vec((1u32..=4, any::<bool>()), 1..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms([x, y, z] in any_triple()) {
        // torus elements built separately share an equal descriptor
        let y = y.rehome(x.algebra()).unwrap();
        let z = z.rehome(x.algebra()).unwrap();
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        let one = AlgebraElement::one(x.algebra());
        prop_assert_eq!(&one * &x, x.clone());
        prop_assert_eq!(&x * &one, x.clone());
    }

    #[test]
    fn involution_axioms([x, y, _z] in any_triple(), c in coeff()) {
        let y = y.rehome(x.algebra()).unwrap();
        prop_assert_eq!(x.star().star(), x.clone());
        prop_assert_eq!((&x * &y).star(), &y.star() * &x.star());
        prop_assert_eq!((&x.scale(&c) + &y).star(), &x.star().scale(&c.conj()) + &y.star());
    }

    #[test]
    fn car_normal_form_matches_jw(chain in letter_chain()) {
        let c = Algebra::<Exact>::car();
        let sites = [1, 2, 3, 4];
        let mut prod = AlgebraElement::one(&c);
        let mut mat = DMatrix::<C64>::identity(16, 16);
        for (s, dag) in chain {
            let g = if dag { bs(&c, s) } else { b(&c, s) };
            mat *= g.jw_matrix(&sites).unwrap();
            prod = &prod * &g;
        }
        prop_assert!((prod.jw_matrix(&sites).unwrap() - mat).norm() < 1e-12);
    }

    #[test]
    fn jw_is_a_star_representation(x in car_elem(), y in car_elem()) {
        let sites = [1, 2, 3];
        let jx = x.jw_matrix(&sites).unwrap();
        let jy = y.jw_matrix(&sites).unwrap();
        prop_assert!(((&x * &y).jw_matrix(&sites).unwrap() - &jx * &jy).norm() < 1e-12);
        prop_assert!((x.star().jw_matrix(&sites).unwrap() - jx.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn torus_trace(x in torus_elem(), y in torus_elem()) {
        let y = y.rehome(x.algebra()).unwrap();
        prop_assert_eq!((&x * &y).unit_coeff(), (&y * &x).unit_coeff());
    }

    #[test]
    fn c_star_bound(x in car_elem(), y in car_elem(), gx in group_elem(), gy in group_elem()) {
        let xy = &x * &y;
        if let Some(exact) = xy.norm_exact() {
            prop_assert!(x.norm_bound().value * y.norm_bound().value >= exact - 1e-12);
        }
        let g = &gx * &gy;
        prop_assert!(gx.norm_bound().value * gy.norm_bound().value >= g.norm_exact().unwrap() - 1e-12);
        prop_assert!(x.norm_lower() <= x.norm_bound().value + 1e-12);
    }
}

#[test]
fn float_ring_residual_is_small() {
    let t = Algebra::torus(C64::new(0.6, 0.8)).unwrap();
    let x = &uv(&t, 1, 2).scale(&C64::new(0.3, -1.1)) + &uv(&t, -1, 1);
    let y = &uv(&t, 2, -1) + &uv(&t, 0, 1).scale(&C64::new(0.0, 2.0));
    let z = &uv(&t, -1, -1).scale(&C64::new(1.5, 0.5)) + &AlgebraElement::one(&t);
    let lhs = &(&x * &y) * &z;
    let rhs = &x * &(&y * &z);
    let scale = x.norm_bound().value * y.norm_bound().value * z.norm_bound().value;
    assert!((&lhs - &rhs).norm_bound().value <= 1e-12 * scale);
}

#[test]
fn commutativity_by_family() {
    assert!(Algebra::<Exact>::group(GroupSpec::Integers).is_commutative());
    assert!(Algebra::torus(Exact::from_i64(1)).unwrap().is_commutative());
    assert!(!Algebra::torus(Exact::i()).unwrap().is_commutative());
    assert!(!Algebra::<Exact>::car().is_commutative());
    assert!(!Algebra::<Exact>::rotation().is_commutative());
}
