//! Formal group laws: the Buchstaber rational form, the Tate addition law,
//! associativity defects, invariant differentials, logarithms, exponentials,
//! and the Weierstrass `p` route to the Tate exponential.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Coeff, Int, Rat};
use crate::error::{Error, Result};
use crate::polyring::{Polynomial, VarRegistry};
use crate::series::{Exp, LaurentSeries, Series};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Buchstaber,
    Tate,
    SolvedLevel(u8),
    Custom,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Buchstaber => write!(f, "buchstaber"),
            Provenance::Tate => write!(f, "tate"),
            Provenance::SolvedLevel(n) => write!(f, "solved-level-{n}"),
            Provenance::Custom => write!(f, "custom"),
        }
    }
}

/// `F(u, v) = u + v + sum a_{i,j} u^i v^j`, exact for `i + j <= order`.
#[derive(Clone, Debug)]
pub struct FormalGroupLaw<C: Coeff> {
    series: Series<C>,
    provenance: Provenance,
}

impl<C: Coeff> FormalGroupLaw<C> {
    /// Wrap a bivariate series, checking `F(u,0) = u`, `F(0,v) = v` and symmetry.
    pub fn from_series(series: Series<C>, provenance: Provenance) -> Result<Self> {
        if series.nvars() != 2 {
            return Err(Error::FormalVariableMismatch("a formal group law has two variables".into()));
        }
        let o = series.order();
        for (e, c) in series.terms() {
            let (i, j) = (e.0[0] as u32, e.0[1] as u32);
            let unit_term = (i, j) == (1, 0) || (i, j) == (0, 1);
            if (i == 0 || j == 0) && !(unit_term && c.is_one()) {
                return Err(Error::Verification(format!("F(u,0) != u at u^{i} v^{j}")));
            }
            if series.coeff(Exp::bi(j, i)) != *c {
                return Err(Error::Verification(format!("a_{{{i},{j}}} != a_{{{j},{i}}}")));
            }
        }
        if o >= 1 && (!series.coeff(Exp::bi(1, 0)).is_one() || !series.coeff(Exp::bi(0, 1)).is_one()) {
            return Err(Error::Verification("linear part is not u + v".into()));
        }
        Ok(FormalGroupLaw { series, provenance })
    }

    pub fn order(&self) -> u32 {
        self.series.order()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        self.series.registry()
    }

    /// `a_{i,j}` for `i, j >= 1`.
    pub fn coeff(&self, i: u32, j: u32) -> Polynomial<C> {
        self.series.coeff(Exp::bi(i, j))
    }

    /// The law as a series in `(u, v)`.
    pub fn series(&self) -> &Series<C> {
        &self.series
    }

    pub fn truncate(&self, order: u32) -> Self {
        FormalGroupLaw { series: self.series.truncate(order), provenance: self.provenance.clone() }
    }

    /// Every `a_{i,j}` homogeneous of weight `i + j - 1`.
    pub fn is_graded(&self) -> bool {
        self.series.is_graded(1)
    }

    /// `F(X, Y)` for series `X`, `Y` without constant terms.
    pub fn eval(&self, x: &Series<C>, y: &Series<C>) -> Result<Series<C>> {
        self.series.substitute(&[x.clone(), y.clone()])
    }

    /// Nonzero coefficients of `F(u, F(v, w)) - F(F(u, v), w)` of total
    /// degree `<= order`; each sits at weight `i + j + k - 1`.
    pub fn assoc_defect(&self, order: u32) -> Result<Vec<(Exp, Polynomial<C>)>> {
        if order > self.order() {
            return Err(Error::OrderTooSmall { requested: order, available: self.order() });
        }
        let f = self.series.truncate(order);
        let vars = ["u", "v", "w"];
        let reg = self.registry();
        let u = Series::var(&vars, reg, 0, order)?;
        let w = Series::var(&vars, reg, 2, order)?;
        let fuv = f.map_vars(&vars, &[0, 1])?;
        let fvw = f.map_vars(&vars, &[1, 2])?;
        let left = f.substitute(&[u, fvw])?;
        let right = f.substitute(&[fuv, w])?;
        let diff = left.sub(&right)?;
        Ok(diff.terms().map(|(e, c)| (*e, c.clone())).collect())
    }

    /// `omega(u) = dF/dv (u, 0) = 1 + sum a_{n,1} u^n`, of order `order - 1`.
    pub fn invariant_diff(&self) -> Result<Series<C>> {
        let o = self.order().saturating_sub(1);
        let reg = self.registry();
        let mut coeffs = vec![Polynomial::one(reg)];
        for n in 1..=o {
            coeffs.push(self.coeff(n, 1));
        }
        Series::univariate("u", reg, coeffs, o)
    }

    pub fn to_json(&self) -> FglJson {
        let mut table = Vec::new();
        for (e, c) in self.series.terms() {
            let (i, j) = (e.0[0] as u32, e.0[1] as u32);
            if i >= 1 && j >= i {
                table.push(FglEntryJson { i, j, poly: c.to_string() });
            }
        }
        FglJson {
            order: self.order(),
            provenance: self.provenance.to_string(),
            domain: C::DOMAIN.to_string(),
            table,
        }
    }
}

impl FormalGroupLaw<Rat> {
    /// `g(u) = integral du / omega(u)`.
    pub fn log(&self) -> Result<Series<Rat>> {
        self.invariant_diff()?.invert()?.integrate(0)
    }

    /// `f = g^{-1}`, as a series in `z`.
    pub fn exp(&self) -> Result<Series<Rat>> {
        let g = self.log()?;
        let f = g.reverse()?;
        f.map_vars(&["z"], &[0])
    }
}

impl FormalGroupLaw<Int> {
    pub fn to_rat(&self) -> FormalGroupLaw<Rat> {
        FormalGroupLaw { series: self.series.to_rat(), provenance: self.provenance.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FglEntryJson {
    pub i: u32,
    pub j: u32,
    pub poly: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FglJson {
    pub order: u32,
    pub provenance: String,
    pub domain: String,
    pub table: Vec<FglEntryJson>,
}

/// Logarithm of any law over `Z`, computed over `Q`.
pub fn fgl_log<C: Coeff>(f: &FormalGroupLaw<C>) -> Result<Series<Rat>> {
    rat_law(f).log()
}

/// Exponential of any law over `Z`, computed over `Q`.
pub fn fgl_exp<C: Coeff>(f: &FormalGroupLaw<C>) -> Result<Series<Rat>> {
    rat_law(f).exp()
}

fn rat_law<C: Coeff>(f: &FormalGroupLaw<C>) -> FormalGroupLaw<Rat> {
    let series = f.series.map_coeffs(f.registry(), |p| Ok(p.to_rat())).expect("registry unchanged");
    FormalGroupLaw { series, provenance: f.provenance.clone() }
}

/// First coefficient where `f(x + y)` and `F(f(x), f(y))` differ, if any.
pub fn exp_contract_violation(
    law: &FormalGroupLaw<Rat>,
    f: &Series<Rat>,
    order: u32,
) -> Result<Option<(Exp, Polynomial<Rat>)>> {
    let order = order.min(law.order()).min(f.order());
    let vars = ["x", "y"];
    let reg = law.registry();
    let f = f.truncate(order);
    let x = Series::var(&vars, reg, 0, order)?;
    let y = Series::var(&vars, reg, 1, order)?;
    let lhs = f.substitute(&[x.add(&y)?])?;
    let fx = f.map_vars(&vars, &[0])?;
    let fy = f.map_vars(&vars, &[1])?;
    let rhs = law.truncate(order).eval(&fx, &fy)?;
    lhs.first_difference(&rhs, order)
}

/// Generic `A(u)`, `B(u)` over `reg`: `A_k`, `B_k` are the registry variables
/// of those names where present and zero otherwise; `A_2 = B_1 = 0`.
pub fn generic_ab<C: Coeff>(reg: &Arc<VarRegistry>, order: u32) -> Result<(Series<C>, Series<C>)> {
    let mut a = vec![Polynomial::one(reg)];
    let mut b = vec![Polynomial::one(reg)];
    for k in 1..=order {
        a.push(reg.index_of(&format!("A{k}")).map_or_else(|| Polynomial::zero(reg), |i| Polynomial::var_at(reg, i)));
        b.push(reg.index_of(&format!("B{k}")).map_or_else(|| Polynomial::zero(reg), |i| Polynomial::var_at(reg, i)));
    }
    Ok((Series::univariate("u", reg, a, order)?, Series::univariate("u", reg, b, order)?))
}

/// `F = (u^2 A(v) - v^2 A(u)) / (u B(v) - v B(u))` through total degree `order`.
///
/// `A` and `B` must be univariate with constant term 1 and known through
/// degree `order - 1`. Any `u^2` term of `A` and `u` term of `B` cancels
/// identically from numerator and denominator.
pub fn buchstaber_fgl<C: Coeff>(a: &Series<C>, b: &Series<C>, order: u32) -> Result<FormalGroupLaw<C>> {
    if a.nvars() != 1 || b.nvars() != 1 {
        return Err(Error::FormalVariableMismatch("A and B must be univariate".into()));
    }
    if !a.coeff_uni(0).is_one() || !b.coeff_uni(0).is_one() {
        return Err(Error::Usage("A(0) = B(0) = 1 is required".into()));
    }
    if order < 1 {
        return Err(Error::Usage("order must be at least 1".into()));
    }
    let need = order - 1;
    for s in [a, b] {
        if s.order() < need {
            return Err(Error::OrderTooSmall { requested: need, available: s.order() });
        }
    }
    let reg = a.registry();
    let vars = ["u", "v"];
    let mut num = Series::zero(&vars, reg, order + 1)?;
    let mut den = Series::zero(&vars, reg, order)?;
    for (e, c) in a.terms() {
        let k = e.0[0] as u32;
        if k <= need {
            num.add_term(Exp::bi(2, k), c.clone());
            num.add_term(Exp::bi(k, 2), -c);
        }
    }
    for (e, c) in b.terms() {
        let k = e.0[0] as u32;
        if k <= need {
            den.add_term(Exp::bi(1, k), c.clone());
            den.add_term(Exp::bi(k, 1), -c);
        }
    }
    let mut diff = Series::zero(&vars, reg, order + 1)?;
    diff.add_term(Exp::bi(1, 0), Polynomial::one(reg));
    diff.add_term(Exp::bi(0, 1), -Polynomial::one(reg));
    let nq = num.divide_exact(&diff)?;
    let dq = den.divide_exact(&diff.truncate(order))?;
    let f = nq.mul(&dq.invert()?)?.truncate(order);
    if f.order() < order {
        return Err(Error::Internal(format!("lost precision: order {} < {order}", f.order())));
    }
    FormalGroupLaw::from_series(f, Provenance::Buchstaber)
}

/// Weierstrass parameters `mu = (mu1, mu2, mu3, mu4, mu6)` as polynomials.
#[derive(Clone, Debug)]
pub struct CurveParams<C: Coeff> {
    pub mu1: Polynomial<C>,
    pub mu2: Polynomial<C>,
    pub mu3: Polynomial<C>,
    pub mu4: Polynomial<C>,
    pub mu6: Polynomial<C>,
}

pub const MU_NAMES: [(&str, u32); 5] = [("mu1", 1), ("mu2", 2), ("mu3", 3), ("mu4", 4), ("mu6", 6)];

pub fn mu_registry() -> Arc<VarRegistry> {
    VarRegistry::new(MU_NAMES).expect("canonical names are valid")
}

impl<C: Coeff> CurveParams<C> {
    /// The parameters as free variables of `reg` (which must contain them).
    pub fn generic(reg: &Arc<VarRegistry>) -> Result<Self> {
        Ok(CurveParams {
            mu1: Polynomial::var(reg, "mu1")?,
            mu2: Polynomial::var(reg, "mu2")?,
            mu3: Polynomial::var(reg, "mu3")?,
            mu4: Polynomial::var(reg, "mu4")?,
            mu6: Polynomial::var(reg, "mu6")?,
        })
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        self.mu1.registry()
    }

    /// Apply `bindings` (by name) to every parameter.
    pub fn specialize(&self, bindings: &BTreeMap<String, Polynomial<C>>) -> Result<Self> {
        let reg = self.registry().clone();
        let s = |p: &Polynomial<C>| p.substitute(bindings, &reg, false);
        Ok(CurveParams { mu1: s(&self.mu1)?, mu2: s(&self.mu2)?, mu3: s(&self.mu3)?, mu4: s(&self.mu4)?, mu6: s(&self.mu6)? })
    }

    pub fn to_rat(&self) -> CurveParams<Rat> {
        CurveParams {
            mu1: self.mu1.to_rat(),
            mu2: self.mu2.to_rat(),
            mu3: self.mu3.to_rat(),
            mu4: self.mu4.to_rat(),
            mu6: self.mu6.to_rat(),
        }
    }
}

/// The series `s(u)` solving `s = u^3 + mu1 u s + mu2 u^2 s + mu3 s^2 + mu4 u s^2 + mu6 s^3`.
pub fn tate_s<C: Coeff>(mu: &CurveParams<C>, order: u32) -> Result<Series<C>> {
    if order < 3 {
        return Err(Error::Usage("tate_s needs order >= 3".into()));
    }
    let reg = mu.registry();
    let u = Series::var(&["u"], reg, 0, order)?;
    let u2 = u.mul(&u)?;
    let u3 = u2.mul(&u)?;
    let lin = u.scale(&mu.mu1).add(&u2.scale(&mu.mu2))?;
    let mut s = u3.clone();
    // each pass fixes at least one more degree
    for _ in 0..order {
        let s2 = s.mul(&s)?;
        let s3 = s2.mul(&s)?;
        let next = u3
            .add(&lin.mul(&s)?)?
            .add(&s2.scale(&mu.mu3))?
            .add(&u.mul(&s2)?.scale(&mu.mu4))?
            .add(&s3.scale(&mu.mu6))?
            .truncate(order);
        if next.first_difference(&s, order)?.is_none() {
            return Ok(next);
        }
        s = next;
    }
    Err(Error::Internal("tate_s iteration did not settle".into()))
}

/// The Tate addition law, expanded from its closed form with the
/// auxiliaries `m`, `k`, `n`.
pub fn tate_fgl<C: Coeff>(mu: &CurveParams<C>, order: u32) -> Result<FormalGroupLaw<C>> {
    if order < 2 {
        return Err(Error::Usage("tate_fgl needs order >= 2".into()));
    }
    let reg = mu.registry();
    let o = order + 1;
    let vars = ["u", "v"];
    let s1 = tate_s(mu, o.max(3))?;
    let su = s1.map_vars(&vars, &[0])?;
    let sv = s1.map_vars(&vars, &[1])?;
    let u = Series::var(&vars, reg, 0, o)?;
    let v = Series::var(&vars, reg, 1, o)?;
    let one = Series::one(&vars, reg, o)?;
    let umv = u.sub(&v)?;
    let m = su.sub(&sv)?.divide_exact(&umv)?;
    let k = u.mul(&sv)?.sub(&v.mul(&su)?)?.divide_exact(&umv)?;
    let uv = u.mul(&v)?;

    let cubic = |x: &Series<C>| -> Result<Series<C>> {
        let x2 = x.mul(x)?;
        let x3 = x2.mul(x)?;
        one.add(&x.scale(&mu.mu2))?.add(&x2.scale(&mu.mu4))?.add(&x3.scale(&mu.mu6))
    };
    let denom_k = one.sub(&k.scale(&mu.mu3))?.sub(&k.mul(&k)?.scale(&mu.mu6))?;
    let inv_k = denom_k.invert()?;
    let cubic_m = cubic(&m)?;
    let n = m.add(&uv.mul(&cubic_m)?.mul(&inv_k)?)?;
    let cubic_n = cubic(&n)?;

    let mu1 = Series::constant(&vars, mu.mu1.clone(), o)?;
    let mu4 = Series::constant(&vars, mu.mu4.clone(), o)?;
    let inner = mu1.add(&m.scale(&mu.mu3))?.add(&mu4.add(&m.scale(&mu.mu6).scale_int(2))?.mul(&k)?)?;
    let first = u.add(&v)?.sub(&uv.mul(&inner)?.mul(&inv_k)?)?;
    let f = first.mul(&cubic_m)?.mul(&cubic_n.invert()?)?.mul(&inv_k)?.truncate(order);
    if f.order() < order {
        return Err(Error::Internal(format!("lost precision: order {} < {order}", f.order())));
    }
    FormalGroupLaw::from_series(f, Provenance::Tate)
}

/// `omega(u) = 1 - mu1 u - mu2 u^2 - 2 mu3 s - 2 mu4 u s - 3 mu6 s^2`.
pub fn tate_invariant_diff<C: Coeff>(mu: &CurveParams<C>, order: u32) -> Result<Series<C>> {
    let reg = mu.registry();
    let o = order.max(3);
    let s = tate_s(mu, o)?;
    let u = Series::var(&["u"], reg, 0, o)?;
    let one = Series::one(&["u"], reg, o)?;
    let out = one
        .sub(&u.scale(&mu.mu1))?
        .sub(&u.mul(&u)?.scale(&mu.mu2))?
        .sub(&s.scale(&mu.mu3).scale_int(2))?
        .sub(&u.mul(&s)?.scale(&mu.mu4).scale_int(2))?
        .sub(&s.mul(&s)?.scale(&mu.mu6).scale_int(3))?;
    Ok(out.truncate(order))
}

/// `(g2, g3)` of the standard Weierstrass model.
pub fn weierstrass_from_mu<C: Coeff>(mu: &CurveParams<C>) -> (Polynomial<Rat>, Polynomial<Rat>) {
    let mu = mu.to_rat();
    let reg = mu.registry().clone();
    let c = |n: i64, d: i64| Polynomial::constant(&reg, Rat::new(n.into(), d.into()));
    let nu2 = &(&(&mu.mu1 * &mu.mu1) + &(&c(4, 1) * &mu.mu2)) * &c(1, 6);
    let m13 = &mu.mu1 * &mu.mu3;
    let g2 = &(&(&c(3, 1) * &(&nu2 * &nu2)) - &(&c(2, 1) * &m13)) - &(&c(4, 1) * &mu.mu4);
    let g3 = &(&(&(&(-&nu2.pow(3)) + &(&nu2 * &m13)) - &(&mu.mu3 * &mu.mu3)) + &(&c(2, 1) * &(&nu2 * &mu.mu4)))
        - &(&c(4, 1) * &mu.mu6);
    (g2, g3)
}

/// `p(z) = z^-2 + sum_{k>=2} c_k z^{2k-2}`, solved from
/// `p'^2 = 4 p^3 - g2 p - g3`. The body is `P = z^2 p` through `z^order`.
pub fn wp_series(g2: &Polynomial<Rat>, g3: &Polynomial<Rat>, order: u32) -> Result<LaurentSeries<Rat>> {
    let reg = g2.registry().clone();
    if !VarRegistry::same(&reg, g3.registry()) {
        return Err(Error::RegistryMismatch);
    }
    let vars = ["z"];
    let z = Series::var(&vars, &reg, 0, order)?;
    let z4 = z.pow(4)?;
    let z6 = z.pow(6)?;
    let mut p = Series::one(&vars, &reg, order)?;
    let mut k = 2u32;
    while 2 * k <= order {
        // with c_k still zero, the z^{2k} residual of the equation is (8k+4) c_k
        let lhs = {
            let t = z.mul(&p.derivative(0)?)?.with_order(order).sub(&p.scale_int(2))?;
            t.mul(&t)?
        };
        let rhs = p.pow(3)?.scale_int(4).sub(&z4.mul(&p)?.scale(g2))?.sub(&z6.scale(g3))?;
        let resid = lhs.sub(&rhs)?.coeff_uni(2 * k);
        let ck = resid.scale(&Rat::new(1.into(), (8 * k as i64 + 4).into()));
        p.add_term(Exp::uni(2 * k), ck);
        k += 1;
    }
    Ok(LaurentSeries { shift: -2, body: p })
}

/// Expansion of `-2 (p - (4 mu2 + mu1^2)/12) / (p' - mu1 p + mu1 (4 mu2 + mu1^2)/12 - mu3)`
/// through `z^order`.
pub fn tate_exp_via_wp<C: Coeff>(mu: &CurveParams<C>, order: u32) -> Result<Series<Rat>> {
    let mu = mu.to_rat();
    let reg = mu.registry().clone();
    let (g2, g3) = weierstrass_from_mu(&mu);
    let wp = wp_series(&g2, &g3, order)?;
    let p = wp.body;
    let vars = ["z"];
    let z = Series::var(&vars, &reg, 0, order)?;
    let z2 = z.mul(&z)?;
    let z3 = z2.mul(&z)?;
    let twelfth = Rat::new(1.into(), 12.into());
    let c = (&(&mu.mu2 * &Polynomial::from_i64(&reg, 4)) + &(&mu.mu1 * &mu.mu1)).scale(&twelfth);
    let kappa = &mu.mu1 * &c;
    // z^2 p = P and z^3 p' = z P' - 2 P
    let num = p.sub(&z2.scale(&c))?.scale_int(-2);
    let zdp = z.mul(&p.derivative(0)?)?.with_order(order);
    let den = zdp
        .sub(&p.scale_int(2))?
        .sub(&z.mul(&p)?.scale(&mu.mu1))?
        .add(&z3.scale(&(&kappa - &mu.mu3)))?;
    let f = z.mul(&num.mul(&den.invert()?)?)?.truncate(order);
    if !f.coeff_uni(0).is_zero() || !f.coeff_uni(1).is_one() {
        return Err(Error::Internal("pole cancellation failed in the p-function quotient".into()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{qpoly, zpoly};

    fn uni(reg: &Arc<VarRegistry>, cs: &[&str], order: u32) -> Series<Int> {
        Series::univariate("u", reg, cs.iter().map(|s| zpoly(reg, s).unwrap()).collect(), order).unwrap()
    }

    #[test]
    fn additive_and_multiplicative() {
        let reg = VarRegistry::new([("beta", 1)]).unwrap();
        let one = uni(&reg, &["1"], 8);
        let f = buchstaber_fgl(&one, &one, 8).unwrap();
        assert_eq!(f.series().terms().count(), 2);
        let a = uni(&reg, &["1", "beta"], 8);
        let f = buchstaber_fgl(&a, &one, 8).unwrap();
        let terms: Vec<String> = f.series().terms().map(|(e, c)| format!("{:?}{}", &e.0[..2], c)).collect();
        assert_eq!(terms, ["[1, 0]1", "[0, 1]1", "[1, 1]beta"]);
        assert!(f.assoc_defect(8).unwrap().is_empty());
    }

    #[test]
    fn generic_low_coefficients() {
        let reg = VarRegistry::buchstaber(5);
        let (a, b) = generic_ab::<Int>(&reg, 5).unwrap();
        let f = buchstaber_fgl(&a, &b, 5).unwrap();
        assert_eq!(f.coeff(1, 1).to_string(), "A1");
        assert_eq!(f.coeff(1, 2).to_string(), "B2");
        assert_eq!(f.coeff(1, 3).to_string(), "B3");
        assert_eq!(f.coeff(2, 2), zpoly(&reg, "A1*B2 - A3 + 2*B3").unwrap());
        assert!(f.is_graded());
    }

    #[test]
    fn tate_s_coefficients() {
        let reg = mu_registry();
        let mu = CurveParams::<Int>::generic(&reg).unwrap();
        let s = tate_s(&mu, 6).unwrap();
        assert_eq!(s.coeff_uni(3).to_string(), "1");
        assert_eq!(s.coeff_uni(4).to_string(), "mu1");
        assert_eq!(s.coeff_uni(5), zpoly(&reg, "mu2 + mu1^2").unwrap());
        assert_eq!(s.coeff_uni(6), zpoly(&reg, "mu3 + 2*mu1*mu2 + mu1^3").unwrap());
        assert!(s.is_graded(3));
    }

    #[test]
    fn tate_low_order() {
        let reg = mu_registry();
        let mu = CurveParams::<Int>::generic(&reg).unwrap();
        let f = tate_fgl(&mu, 5).unwrap();
        assert_eq!(f.coeff(1, 1).to_string(), "-mu1");
        assert_eq!(f.coeff(2, 1).to_string(), "-mu2");
        assert!(f.assoc_defect(5).unwrap().is_empty());
        let w = tate_invariant_diff(&mu, 4).unwrap();
        assert!(f.invariant_diff().unwrap().first_difference(&w, 4).unwrap().is_none());
    }

    #[test]
    fn weierstrass_readoff() {
        let reg = VarRegistry::new([("t", 4), ("mu1", 1), ("mu2", 2), ("mu3", 3), ("mu6", 6)]).unwrap();
        let zero = Polynomial::<Int>::zero(&reg);
        let t = zpoly(&reg, "t").unwrap();
        let mu = CurveParams { mu1: zero.clone(), mu2: zero.clone(), mu3: zero.clone(), mu4: t.clone(), mu6: zero.clone() };
        let (g2, g3) = weierstrass_from_mu(&mu);
        assert_eq!(g2, qpoly(&reg, "-4*t").unwrap());
        assert!(g3.is_zero());
    }

    #[test]
    fn wp_low_coefficients() {
        let reg = VarRegistry::new([("g2", 4), ("g3", 6)]).unwrap();
        let g2 = qpoly(&reg, "g2").unwrap();
        let g3 = qpoly(&reg, "g3").unwrap();
        let wp = wp_series(&g2, &g3, 8).unwrap();
        assert_eq!(wp.coeff(-2).to_string(), "1");
        assert!(wp.coeff(0).is_zero());
        assert_eq!(wp.coeff(2), qpoly(&reg, "g2/20").unwrap());
        assert_eq!(wp.coeff(4), qpoly(&reg, "g3/28").unwrap());
        let c2 = qpoly(&reg, "g2/20").unwrap();
        assert_eq!(wp.coeff(6), (&c2 * &c2).scale(&Rat::new(1.into(), 3.into())));
    }

    #[test]
    fn multiplicative_log_exp() {
        let reg = VarRegistry::new([("beta", 1)]).unwrap();
        let a = uni(&reg, &["1", "beta"], 6);
        let one = uni(&reg, &["1"], 6);
        let f = buchstaber_fgl(&a, &one, 6).unwrap().to_rat();
        let g = f.log().unwrap();
        assert_eq!(g.coeff_uni(2), qpoly(&reg, "-beta/2").unwrap());
        assert_eq!(g.coeff_uni(3), qpoly(&reg, "beta^2/3").unwrap());
        let e = f.exp().unwrap();
        assert_eq!(e.coeff_uni(2), qpoly(&reg, "beta/2").unwrap());
        assert_eq!(e.coeff_uni(3), qpoly(&reg, "beta^2/6").unwrap());
        assert!(exp_contract_violation(&f, &e, 6).unwrap().is_none());
    }
}
