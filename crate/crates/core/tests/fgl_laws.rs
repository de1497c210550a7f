use std::collections::BTreeMap;

use fglab::algebra::{Int, Rat};
use fglab::fgl::{
    buchstaber_fgl, exp_contract_violation, fgl_exp, fgl_log, generic_ab, mu_registry, tate_fgl, tate_invariant_diff,
    tate_s, CurveParams,
};
use fglab::levels::{tate_specialization, tate_specialization_with};
use fglab::polyring::{Polynomial, VarRegistry};
use fglab::series::{Exp, Series};
use proptest::prelude::*;

#[test]
fn additive_and_multiplicative_laws() {
    let reg = VarRegistry::new([("beta", 1u32)]).unwrap();
    let one = Series::<Int>::one(&["u"], &reg, 6).unwrap();
    let add = buchstaber_fgl(&one, &one, 6).unwrap();
    assert_eq!(add.series().terms().count(), 2);
    let mut a = one.clone();
    a.add_term(Exp::uni(1), Polynomial::var(&reg, "beta").unwrap());
    let mult = buchstaber_fgl(&a, &one, 6).unwrap();
    assert_eq!(mult.coeff(1, 1), Polynomial::var(&reg, "beta").unwrap());
    assert_eq!(mult.series().terms().count(), 3);
}

#[test]
fn tate_coefficients_low_order() {
    let reg = mu_registry();
    let law = tate_fgl(&CurveParams::<Int>::generic(&reg).unwrap(), 4).unwrap();
    let p = |s: &str| Polynomial::<Int>::parse(&reg, s).unwrap();
    assert_eq!(law.coeff(1, 1), p("-mu1"));
    assert_eq!(law.coeff(1, 2), p("-mu2"));
    assert_eq!(law.coeff(2, 2), p("mu1*mu2 - 3*mu3"));
}

#[test]
fn tate_invariant_differential_from_law_and_closed_form() {
    let reg = mu_registry();
    let mu = CurveParams::<Int>::generic(&reg).unwrap();
    let law = tate_fgl(&mu, 8).unwrap();
    let from_law = law.invariant_diff().unwrap();
    let closed = tate_invariant_diff(&mu, 8).unwrap();
    assert!(from_law.first_difference(&closed, from_law.order()).unwrap().is_none());
}

#[test]
fn tate_exponential_satisfies_the_addition_contract() {
    let mu = CurveParams::<Int>::generic(&mu_registry()).unwrap();
    let law = tate_fgl(&mu, 7).unwrap().to_rat();
    let f = fgl_exp(&law).unwrap();
    assert!(exp_contract_violation(&law, &f, 7).unwrap().is_none());
    let g = fgl_log(&law).unwrap();
    let id = Series::compose(&g, &f).unwrap();
    assert!(id.first_difference(&Series::var(&["z"], law.registry(), 0, 7).unwrap(), 7).unwrap().is_none());
}

#[test]
fn level2_tangent_identity() {
    // mu1 = mu3 = mu4 = mu6 = 0: F(u, v)(1 + mu2 u v) = u + v
    let reg = mu_registry();
    let mut bind = BTreeMap::new();
    for k in ["mu1", "mu3", "mu4", "mu6"] {
        bind.insert(k.to_string(), Polynomial::<Rat>::zero(&reg));
    }
    let mu = CurveParams::<Rat>::generic(&reg).unwrap().specialize(&bind).unwrap();
    let law = tate_fgl(&mu, 9).unwrap();
    let vars = ["u", "v"];
    let u = Series::var(&vars, &reg, 0, 9).unwrap();
    let v = Series::var(&vars, &reg, 1, 9).unwrap();
    let mut factor = Series::one(&vars, &reg, 9).unwrap();
    factor.add_term(Exp::bi(1, 1), Polynomial::var(&reg, "mu2").unwrap());
    let lhs = law.series().mul(&factor).unwrap();
    assert!(lhs.first_difference(&u.add(&v).unwrap(), 9).unwrap().is_none());
}

#[test]
fn level3_printed_sign_fails_and_corrected_sign_holds() {
    let printed = [("mu2", "-mu1^2"), ("mu4", "mu1*mu3"), ("mu6", "-1/3*mu3^2")];
    let t = tate_specialization_with(3, &printed, 8).unwrap();
    let (e, c) = t.difference.expect("printed bindings should not match");
    assert_eq!(e, Exp::bi(4, 1));
    assert_eq!(c, Polynomial::parse(t.tate.registry(), "-4*mu1*mu3").unwrap());
    assert!(tate_specialization(3, 10).unwrap().holds());
    assert!(tate_specialization(2, 10).unwrap().holds());
}

#[test]
fn tate_s_satisfies_its_cubic() {
    let reg = mu_registry();
    let mu = CurveParams::<Int>::generic(&reg).unwrap();
    let s = tate_s(&mu, 9).unwrap();
    let u = Series::var(&["u"], &reg, 0, 9).unwrap();
    let rhs = u
        .pow(3)
        .unwrap()
        .add(&u.mul(&s).unwrap().scale(&mu.mu1))
        .unwrap()
        .add(&u.mul(&u).unwrap().mul(&s).unwrap().scale(&mu.mu2))
        .unwrap()
        .add(&s.mul(&s).unwrap().scale(&mu.mu3))
        .unwrap()
        .add(&u.mul(&s).unwrap().mul(&s).unwrap().scale(&mu.mu4))
        .unwrap()
        .add(&s.pow(3).unwrap().scale(&mu.mu6))
        .unwrap();
    assert!(s.first_difference(&rhs, 9).unwrap().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn buchstaber_gauge_invariance(ca in -7i64..=7, cb in -7i64..=7) {
        let order = 6;
        let reg = VarRegistry::buchstaber(order);
        let (a, b) = generic_ab::<Int>(&reg, order).unwrap();
        let base = buchstaber_fgl(&a, &b, order).unwrap();
        let mut a2 = a.clone();
        a2.add_term(Exp::uni(2), Polynomial::from_i64(&reg, ca));
        let mut b2 = b.clone();
        b2.add_term(Exp::uni(1), Polynomial::from_i64(&reg, cb));
        let moved = buchstaber_fgl(&a2, &b2, order).unwrap();
        prop_assert!(base.series().first_difference(moved.series(), order).unwrap().is_none());
    }

    #[test]
    fn buchstaber_law_is_commutative_and_unital(seed in 0u32..6) {
        let order = 6;
        let reg = VarRegistry::buchstaber(order);
        let (a, b) = generic_ab::<Int>(&reg, order).unwrap();
        let law = buchstaber_fgl(&a, &b, order).unwrap();
        let i = 1 + seed % (order - 1);
        for j in 1..=order - i {
            prop_assert_eq!(law.coeff(i, j), law.coeff(j, i));
        }
        prop_assert!(law.coeff(i, 0).is_zero() || i == 1);
    }
}
