//! Genus-level checks on exponentials: the Krichever equation, the
//! Hirzebruch functional equation, and `CP^n` values from the logarithm.

use serde::Serialize;

use crate::algebra::{Coeff, Rat};
use crate::error::{Error, Result};
use crate::fgl::FormalGroupLaw;
use crate::polyring::Polynomial;
use crate::series::{Exp, Series};

/// `f f''' - 3 f' f'' = 6 q1 f'^2 + 12 q2 f f' + 12 q3 f^2`, fitted at the
/// three lowest degrees.
#[derive(Debug, Clone)]
pub struct KricheverFit {
    pub q1: Polynomial<Rat>,
    pub q2: Polynomial<Rat>,
    pub q3: Polynomial<Rat>,
    /// Highest degree at which the residual is known.
    pub checked_through: u32,
    /// Nonzero residual coefficients `(k, [z^k])` for `3 <= k <= checked_through`.
    pub residuals: Vec<(u32, Polynomial<Rat>)>,
}

impl KricheverFit {
    pub fn holds(&self) -> bool {
        self.residuals.is_empty()
    }
}

fn check_normalized(f: &Series<Rat>) -> Result<()> {
    if f.nvars() != 1 {
        return Err(Error::FormalVariableMismatch("expected a univariate series".into()));
    }
    if !f.coeff_uni(0).is_zero() || !f.coeff_uni(1).is_one() {
        return Err(Error::BadNormalization);
    }
    Ok(())
}

/// Fit `q1, q2, q3` from the degrees 0, 1, 2 of the Krichever equation and
/// report the residual through degree `order - 2` (with `f` known through
/// `order`).
pub fn krichever_fit(f: &Series<Rat>, order: u32) -> Result<KricheverFit> {
    check_normalized(f)?;
    if order < 6 {
        return Err(Error::Usage("krichever fit needs order >= 6".into()));
    }
    if f.order() < order {
        return Err(Error::OrderTooSmall { requested: order, available: f.order() });
    }
    let f = f.truncate(order);
    let d1 = f.derivative(0)?;
    let d2 = d1.derivative(0)?;
    let d3 = d2.derivative(0)?;
    let lhs = f.mul(&d3)?.sub(&d1.mul(&d2)?.scale_int(3))?;
    let fp2 = d1.mul(&d1)?;
    let ffp = f.mul(&d1)?;
    let ff = f.mul(&f)?;
    let through = order - 2;
    let l = |k| lhs.coeff_uni(k);
    let rat = |n: i64, d: i64| Rat::new(n.into(), d.into());
    let q1 = l(0).scale(&rat(1, 6));
    let q2 = (&l(1) - &(&q1 * &fp2.coeff_uni(1)).scale(&rat(6, 1))).scale(&rat(1, 12));
    let q3 = (&(&l(2) - &(&q1 * &fp2.coeff_uni(2)).scale(&rat(6, 1))) - &(&q2 * &ffp.coeff_uni(2)).scale(&rat(12, 1)))
        .scale(&rat(1, 12));
    let rhs = fp2.scale(&q1.scale(&rat(6, 1))).add(&ffp.scale(&q2.scale(&rat(12, 1))))?.add(&ff.scale(&q3.scale(&rat(12, 1))))?;
    let resid = lhs.sub(&rhs)?.truncate(through);
    let mut residuals = Vec::new();
    for k in 0..=through {
        let c = resid.coeff_uni(k);
        if !c.is_zero() {
            if k < 3 {
                return Err(Error::Internal(format!("fit left a residual at degree {k}")));
            }
            residuals.push((k, c));
        }
    }
    Ok(KricheverFit { q1, q2, q3, checked_through: through, residuals })
}

/// Outcome of the Hirzebruch functional equation check.
#[derive(Debug, Clone)]
pub struct HfeReport {
    pub n: usize,
    pub degree: u32,
    /// Constant term of the sum, read off.
    pub c: Polynomial<Rat>,
    /// Nonzero coefficients of the sum minus `c` through `degree`.
    pub defect: Vec<(Exp, Polynomial<Rat>)>,
}

impl HfeReport {
    pub fn holds(&self) -> bool {
        self.defect.is_empty()
    }
}

pub const HFE_VARS: [&str; 4] = ["z1", "z2", "z3", "z4"];

/// `sum_i prod_{j != i} 1/f(z_j - z_i) - c` through total degree `degree`.
///
/// With `f = z phi` and `psi = 1/phi`, the sum times the Vandermonde
/// `V = prod_{a<b} (z_b - z_a)` is `sum_i (-1)^i V_i prod_{j != i} psi(z_j - z_i)`
/// where `V_i` omits `z_i`; the quotient by `V` is taken factor by factor.
pub fn hirzebruch_defect(f: &Series<Rat>, n: usize, degree: u32) -> Result<HfeReport> {
    check_normalized(f)?;
    if !(2..=4).contains(&n) {
        return Err(Error::Usage(format!("n must be in 2..=4, got {n}")));
    }
    let pairs = (n * (n - 1) / 2) as u32;
    let work = degree + pairs;
    if f.order() < work + 1 {
        return Err(Error::OrderTooSmall { requested: work + 1, available: f.order() });
    }
    let reg = f.registry().clone();
    let vars = &HFE_VARS[..n];
    let z = Series::var(&["z"], &reg, 0, work + 1)?;
    let phi = f.truncate(work + 1).divide_exact(&z)?;
    let psi = phi.invert()?;
    let zs: Vec<Series<Rat>> = (0..n).map(|i| Series::var(vars, &reg, i, work)).collect::<Result<_>>()?;
    let diff = |b: usize, a: usize| zs[b].sub(&zs[a]);

    let mut psi_at = std::collections::BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                psi_at.insert((j, i), Series::compose(&psi, &diff(j, i)?)?);
            }
        }
    }
    let mut total = Series::zero(vars, &reg, work)?;
    for i in 0..n {
        let mut term = Series::one(vars, &reg, work)?;
        for a in 0..n {
            for b in a + 1..n {
                if a != i && b != i {
                    term = term.mul(&diff(b, a)?)?;
                }
            }
        }
        for j in 0..n {
            if j != i {
                term = term.mul(&psi_at[&(j, i)])?;
            }
        }
        total = if i % 2 == 0 { total.add(&term)? } else { total.sub(&term)? };
    }
    let mut sum = total;
    for a in 0..n {
        for b in a + 1..n {
            sum = sum.divide_exact(&diff(b, a)?.with_order(sum.order()))?;
        }
    }
    let sum = sum.truncate(degree);
    if sum.order() < degree {
        return Err(Error::Internal("Vandermonde division lost precision".into()));
    }
    let c = sum.coeff(Exp::default());
    let defect = sum.terms().filter(|(e, _)| e.degree() > 0).map(|(e, p)| (*e, p.clone())).collect();
    Ok(HfeReport { n, degree, c, defect })
}

/// `value_n = (n + 1) g_{n+1}`, the `CP^n` value of the genus of `F`.
#[derive(Debug, Clone, Serialize)]
pub struct CpnValue {
    pub n: u32,
    pub value: String,
    pub integral: bool,
}

/// `CP^n` values for `n < order` from the logarithm of `F`.
pub fn cpn_coefficients<C: Coeff>(fgl: &FormalGroupLaw<C>, order: u32) -> Result<Vec<(u32, Polynomial<Rat>)>> {
    if fgl.order() < order {
        return Err(Error::OrderTooSmall { requested: order, available: fgl.order() });
    }
    let g = crate::fgl::fgl_log(&fgl.truncate(order))?;
    let mut out = Vec::new();
    for n in 0..order {
        let c = g.coeff_uni(n + 1).scale(&Rat::from_i64(n as i64 + 1));
        out.push((n, c));
    }
    Ok(out)
}

/// [`cpn_coefficients`] with integrality flags, for reports.
pub fn cpn_report<C: Coeff>(fgl: &FormalGroupLaw<C>, order: u32) -> Result<Vec<CpnValue>> {
    Ok(cpn_coefficients(fgl, order)?
        .into_iter()
        .map(|(n, v)| CpnValue { n, integral: v.is_integral(), value: v.to_string() })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{qpoly, VarRegistry};

    fn reg() -> std::sync::Arc<VarRegistry> {
        VarRegistry::new([("eps", 2u32)]).unwrap()
    }

    #[test]
    fn identity_fits_trivially() {
        let r = reg();
        let f = Series::var(&["z"], &r, 0, 8).unwrap();
        let fit = krichever_fit(&f, 8).unwrap();
        assert!(fit.q1.is_zero() && fit.q2.is_zero() && fit.q3.is_zero());
        assert!(fit.holds());
    }

    #[test]
    fn sine_like_fit() {
        // f = tan-like odd series from the log of (u+v)/(1+eps uv)
        let r = reg();
        let eps = qpoly(&r, "eps").unwrap();
        let u = Series::var(&["u"], &r, 0, 12).unwrap();
        let omega = Series::one(&["u"], &r, 12).unwrap().add(&u.mul(&u).unwrap().scale(&eps)).unwrap();
        let g = omega.invert().unwrap().integrate(0).unwrap().truncate(12);
        let f = g.reverse().unwrap();
        let fit = krichever_fit(&f, 12).unwrap();
        assert!(fit.holds());
        assert!(fit.q1.is_zero());
    }

    #[test]
    fn odd_function_two_points() {
        let r = reg();
        let coeffs: Vec<Polynomial<Rat>> = (0..=9)
            .map(|k| match k {
                1 => Polynomial::one(&r),
                3 => qpoly(&r, "eps").unwrap(),
                5 => qpoly(&r, "eps^2/3").unwrap(),
                _ => Polynomial::zero(&r),
            })
            .collect();
        let f = Series::univariate("z", &r, coeffs, 9).unwrap();
        let h = hirzebruch_defect(&f, 2, 6).unwrap();
        assert!(h.holds());
        assert!(h.c.is_zero());
    }
}
