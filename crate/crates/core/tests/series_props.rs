use std::sync::Arc;

use fglab::algebra::Rat;
use fglab::polyring::{qpoly, Polynomial, VarRegistry};
use fglab::series::{Exp, Series};
use proptest::prelude::*;

const ORDER: u32 = 7;

fn reg() -> Arc<VarRegistry> {
    VarRegistry::new([("a", 1u32)]).unwrap()
}

fn series(reg: &Arc<VarRegistry>, head: &[i64], tail: &[(i64, i64)]) -> Series<Rat> {
    let mut coeffs: Vec<Polynomial<Rat>> = head.iter().map(|&c| Polynomial::from_i64(reg, c)).collect();
    for &(n, d) in tail {
        let c = Rat::new(n.into(), d.into());
        coeffs.push(Polynomial::constant(reg, c));
    }
    coeffs.truncate(ORDER as usize + 1);
    Series::univariate("t", reg, coeffs, ORDER).unwrap()
}

fn tail() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-9i64..=9, 1i64..=4), ORDER as usize - 1)
}

#[test]
fn geometric_series_inverse() {
    let r = reg();
    let a = qpoly(&r, "a").unwrap();
    let mut s = Series::one(&["t"], &r, ORDER).unwrap();
    s.add_term(Exp::uni(1), -a.clone());
    let inv = s.invert().unwrap();
    for k in 0..=ORDER {
        assert_eq!(inv.coeff_uni(k), a.pow(k));
    }
}

#[test]
fn exact_division_loses_one_order() {
    let r = reg();
    let x = Series::<Rat>::var(&["u", "v"], &r, 0, 5).unwrap();
    let y = Series::var(&["u", "v"], &r, 1, 5).unwrap();
    let num = x.mul(&x).unwrap().sub(&y.mul(&y).unwrap()).unwrap();
    let q = num.divide_exact(&x.sub(&y).unwrap()).unwrap();
    assert_eq!(q.order(), 4);
    assert!(q.first_difference(&x.add(&y).unwrap().truncate(4), 4).unwrap().is_none());
}

proptest! {
    #[test]
    fn derivative_inverts_integral(t in tail()) {
        let s = series(&reg(), &[3], &t).truncate(ORDER - 1);
        let back = s.integrate(0).unwrap().derivative(0).unwrap();
        prop_assert!(back.first_difference(&s, ORDER - 1).unwrap().is_none());
    }

    #[test]
    fn reverse_is_an_involution(t in tail()) {
        let s = series(&reg(), &[0, 1], &t);
        let back = s.reverse().unwrap().reverse().unwrap();
        prop_assert!(back.first_difference(&s, ORDER).unwrap().is_none());
        let id = Series::compose(&s, &s.reverse().unwrap()).unwrap();
        prop_assert!(id.first_difference(&Series::var(&["t"], &reg(), 0, ORDER).unwrap(), ORDER).unwrap().is_none());
    }

    #[test]
    fn invert_and_sqrt(t in tail()) {
        let r = reg();
        let s = series(&r, &[1], &t);
        let one = Series::one(&["t"], &r, ORDER).unwrap();
        prop_assert!(s.mul(&s.invert().unwrap()).unwrap().first_difference(&one, ORDER).unwrap().is_none());
        let root = s.sqrt().unwrap();
        prop_assert!(root.mul(&root).unwrap().first_difference(&s, ORDER).unwrap().is_none());
    }

    #[test]
    fn composition_is_associative(t1 in tail(), t2 in tail(), t3 in tail()) {
        let r = reg();
        let (f, g, h) = (series(&r, &[0, 1], &t1), series(&r, &[0, 2], &t2), series(&r, &[0, -1], &t3));
        let left = Series::compose(&Series::compose(&f, &g).unwrap(), &h).unwrap();
        let right = Series::compose(&f, &Series::compose(&g, &h).unwrap()).unwrap();
        prop_assert!(left.first_difference(&right, ORDER).unwrap().is_none());
    }
}
