//! Truncated power series in up to four formal variables with polynomial
//! coefficients. Truncation is by total degree: a series of order `O` is
//! exact for every monomial of total degree `<= O`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Coeff, Rat};
use crate::error::{Error, Result};
use crate::polyring::{Polynomial, VarRegistry};

pub const MAX_FORMAL_VARS: usize = 4;

/// Exponent of a formal monomial; unused slots stay zero.
///
/// Ordered by total degree, then with higher powers of earlier variables
/// first (`u^2 < u*v < v^2` among degree two).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Exp(pub [u8; MAX_FORMAL_VARS]);

impl Exp {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn add(&self, other: &Exp) -> Exp {
        let mut out = [0u8; MAX_FORMAL_VARS];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(&other.0)) {
            *o = a + b;
        }
        Exp(out)
    }

    /// `self - other` when nonnegative.
    pub fn checked_sub(&self, other: &Exp) -> Option<Exp> {
        let mut out = [0u8; MAX_FORMAL_VARS];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(&other.0)) {
            *o = a.checked_sub(*b)?;
        }
        Some(Exp(out))
    }

    pub fn uni(k: u32) -> Exp {
        Exp([k as u8, 0, 0, 0])
    }

    pub fn bi(i: u32, j: u32) -> Exp {
        Exp([i as u8, j as u8, 0, 0])
    }

    pub fn tri(i: u32, j: u32, k: u32) -> Exp {
        Exp([i as u8, j as u8, k as u8, 0])
    }
}

impl Ord for Exp {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exp {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Truncated power series with polynomial coefficients.
#[derive(Clone)]
pub struct Series<C: Coeff> {
    vars: Arc<[String]>,
    reg: Arc<VarRegistry>,
    order: u32,
    terms: BTreeMap<Exp, Polynomial<C>>,
}

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({self})")
    }
}

impl<C: Coeff> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &k) in e.0.iter().enumerate().take(self.vars.len()) {
                match k {
                    0 => {}
                    1 => write!(f, "*{}", self.vars[i])?,
                    _ => write!(f, "*{}^{}", self.vars[i], k)?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({})", self.order + 1)
    }
}

impl<C: Coeff> Series<C> {
    pub fn zero(vars: &[&str], reg: &Arc<VarRegistry>, order: u32) -> Result<Self> {
        if vars.is_empty() || vars.len() > MAX_FORMAL_VARS {
            return Err(Error::Usage(format!("series need 1 to {MAX_FORMAL_VARS} formal variables")));
        }
        if order > u8::MAX as u32 / 2 {
            return Err(Error::Guard(format!("series order {order} too large")));
        }
        Ok(Series {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            reg: reg.clone(),
            order,
            terms: BTreeMap::new(),
        })
    }

    /// Empty series sharing variables and registry with `self`.
    pub fn zero_like(&self, order: u32) -> Self {
        Series { vars: self.vars.clone(), reg: self.reg.clone(), order, terms: BTreeMap::new() }
    }

    pub fn one(vars: &[&str], reg: &Arc<VarRegistry>, order: u32) -> Result<Self> {
        Self::constant(vars, Polynomial::one(reg), order)
    }

    pub fn constant(vars: &[&str], c: Polynomial<C>, order: u32) -> Result<Self> {
        let mut s = Self::zero(vars, c.registry(), order)?;
        s.add_term(Exp::default(), c);
        Ok(s)
    }

    /// The formal variable with index `i`.
    pub fn var(vars: &[&str], reg: &Arc<VarRegistry>, i: usize, order: u32) -> Result<Self> {
        if i >= vars.len() {
            return Err(Error::Usage(format!("no formal variable with index {i}")));
        }
        let mut s = Self::zero(vars, reg, order)?;
        let mut e = Exp::default();
        e.0[i] = 1;
        s.add_term(e, Polynomial::one(reg));
        Ok(s)
    }

    /// `sum_k coeffs[k] * x^k` in one variable.
    pub fn univariate(var: &str, reg: &Arc<VarRegistry>, coeffs: Vec<Polynomial<C>>, order: u32) -> Result<Self> {
        let mut s = Self::zero(&[var], reg, order)?;
        for (k, c) in coeffs.into_iter().enumerate() {
            s.add_term(Exp::uni(k as u32), c);
        }
        Ok(s)
    }

    pub fn vars(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Polynomial<C>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: Exp) -> Polynomial<C> {
        self.terms.get(&e).cloned().unwrap_or_else(|| Polynomial::zero(&self.reg))
    }

    pub fn coeff_ref(&self, e: &Exp) -> Option<&Polynomial<C>> {
        self.terms.get(e)
    }

    /// Coefficient of `x^k` in a univariate series.
    pub fn coeff_uni(&self, k: u32) -> Polynomial<C> {
        self.coeff(Exp::uni(k))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self += c * x^e`, dropped when beyond the order.
    pub fn add_term(&mut self, e: Exp, c: Polynomial<C>) {
        if c.is_zero() || e.degree() > self.order {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_product_term(&mut self, e: Exp, a: &Polynomial<C>, b: &Polynomial<C>) {
        if e.degree() > self.order {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(|| Polynomial::zero(&self.reg));
        slot.add_product(a, b);
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Lowest total degree carrying a nonzero coefficient; `order + 1` for zero.
    pub fn valuation(&self) -> u32 {
        self.terms.keys().next().map_or(self.order + 1, Exp::degree)
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let mut out = self.zero_like(order);
        for (e, c) in &self.terms {
            if e.degree() <= order {
                out.terms.insert(*e, c.clone());
            }
        }
        out
    }

    /// Same series with a claimed order raised to `order`; only sound when
    /// the caller knows the omitted higher terms are zero (polynomials).
    pub fn with_order(&self, order: u32) -> Self {
        let mut out = self.truncate(order);
        out.order = order;
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::FormalVariableMismatch(format!(
                "{:?} vs {:?}",
                self.vars.as_ref(),
                other.vars.as_ref()
            )));
        }
        if !VarRegistry::same(&self.reg, &other.reg) {
            return Err(Error::RegistryMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.truncate(self.order.min(other.order));
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.zero_like(self.order);
        for (e, c) in &self.terms {
            out.terms.insert(*e, -c);
        }
        out
    }

    /// Product with order `min(a.ord + val b, b.ord + val a)`, capped at the
    /// larger input order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let order = (self.order + other.valuation())
            .min(other.order + self.valuation())
            .min(self.order.max(other.order));
        Ok(self.mul_to(other, order))
    }

    /// Product truncated at `order`; the caller vouches for its validity.
    fn mul_to(&self, other: &Self, order: u32) -> Self {
        let mut out = self.zero_like(order);
        for (e1, c1) in &self.terms {
            let d1 = e1.degree();
            if d1 > order {
                break;
            }
            for (e2, c2) in &other.terms {
                if d1 + e2.degree() > order {
                    break;
                }
                out.add_product_term(e1.add(e2), c1, c2);
            }
        }
        out
    }

    /// Multiply every coefficient by a polynomial.
    pub fn scale(&self, c: &Polynomial<C>) -> Self {
        let mut out = self.zero_like(self.order);
        if c.is_zero() {
            return out;
        }
        for (e, x) in &self.terms {
            let p = x * c;
            if !p.is_zero() {
                out.terms.insert(*e, p);
            }
        }
        out
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Polynomial::from_i64(&self.reg, k))
    }

    /// Multiply by the formal monomial `x^e`; the order grows by `deg e`.
    pub fn shift(&self, e: Exp) -> Self {
        let mut out = self.zero_like(self.order + e.degree());
        for (k, c) in &self.terms {
            out.terms.insert(k.add(&e), c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = self.zero_like(self.order);
        acc.add_term(Exp::default(), Polynomial::one(&self.reg));
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Terms of each total degree `0..=order`.
    fn by_degree(&self) -> Vec<Vec<(Exp, &Polynomial<C>)>> {
        let mut out: Vec<Vec<(Exp, &Polynomial<C>)>> = vec![Vec::new(); self.order as usize + 1];
        for (e, c) in &self.terms {
            out[e.degree() as usize].push((*e, c));
        }
        out
    }

    /// Multiplicative inverse; the constant term must be a unit constant.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.coeff(Exp::default());
        let inv0 = c0
            .as_constant()
            .and_then(|c| c.inverse())
            .ok_or_else(|| Error::NonUnitConstant(c0.to_string()))?;
        let inv0p = Polynomial::constant(&self.reg, inv0.clone());
        let neg_inv0 = Polynomial::constant(&self.reg, inv0.neg_ref());
        let parts = self.by_degree();
        let mut out = self.zero_like(self.order);
        out.add_term(Exp::default(), inv0p);
        let mut out_parts: Vec<Vec<(Exp, Polynomial<C>)>> = vec![vec![(Exp::default(), out.coeff(Exp::default()))]];
        for d in 1..=self.order as usize {
            let mut acc: BTreeMap<Exp, Polynomial<C>> = BTreeMap::new();
            for k in 1..=d {
                for (ea, ca) in &parts[k] {
                    for (eb, cb) in &out_parts[d - k] {
                        acc.entry(ea.add(eb)).or_insert_with(|| Polynomial::zero(&self.reg)).add_product(ca, cb);
                    }
                }
            }
            let mut level = Vec::new();
            for (e, c) in acc {
                let v = &c * &neg_inv0;
                if !v.is_zero() {
                    out.terms.insert(e, v.clone());
                    level.push((e, v));
                }
            }
            out_parts.push(level);
        }
        Ok(out)
    }

    /// Exact quotient `num / den`, by division of homogeneous components by
    /// the lowest form of `den`. The quotient has order
    /// `min(num.ord, den.ord) - val(den)`.
    pub fn divide_exact(&self, den: &Self) -> Result<Self> {
        self.check_compatible(den)?;
        let l = den.valuation();
        if l > den.order {
            return Err(Error::InexactDivision { degree: 0 });
        }
        let base = self.order.min(den.order);
        if l > base {
            return Err(Error::OrderTooSmall { requested: l, available: base });
        }
        let qorder = base - l;
        let dparts = den.by_degree();
        let lead: Vec<(Exp, Polynomial<C>)> = dparts[l as usize].iter().map(|(e, c)| (*e, (*c).clone())).collect();
        // leading term of the lowest form: largest exponent lexicographically
        let (le, lc) = lead.iter().max_by(|a, b| a.0 .0.cmp(&b.0 .0)).cloned().expect("nonempty lowest form");
        let lc_inv = lc
            .as_constant()
            .and_then(|c| c.inverse())
            .ok_or_else(|| Error::NonUnitConstant(format!("leading coefficient {lc} of divisor")))?;
        let mut q = self.zero_like(qorder);
        let mut qparts: Vec<Vec<(Exp, Polynomial<C>)>> = Vec::new();
        for d in 0..=qorder {
            let mut rem: BTreeMap<Exp, Polynomial<C>> = BTreeMap::new();
            for (e, c) in &self.terms {
                if e.degree() == d + l {
                    rem.insert(*e, c.clone());
                }
            }
            for k in 1..=d {
                if (l + k) as usize >= dparts.len() {
                    break;
                }
                for (eb, cb) in &dparts[(l + k) as usize] {
                    for (ea, ca) in &qparts[(d - k) as usize] {
                        let slot = rem.entry(ea.add(eb)).or_insert_with(|| Polynomial::zero(&self.reg));
                        *slot -= &(ca * *cb);
                    }
                }
            }
            rem.retain(|_, c| !c.is_zero());
            let mut level: Vec<(Exp, Polynomial<C>)> = Vec::new();
            while let Some((re, rc)) = rem.iter().max_by(|a, b| a.0 .0.cmp(&b.0 .0)).map(|(e, c)| (*e, c.clone())) {
                let te = re.checked_sub(&le).ok_or(Error::InexactDivision { degree: d + l })?;
                let tc = rc.scale(&lc_inv);
                for (e, c) in &lead {
                    let slot = rem.entry(te.add(e)).or_insert_with(|| Polynomial::zero(&self.reg));
                    *slot -= &(&tc * c);
                    if slot.is_zero() {
                        let key = te.add(e);
                        rem.remove(&key);
                    }
                }
                level.push((te, tc));
            }
            for (e, c) in &level {
                q.add_term(*e, c.clone());
            }
            qparts.push(level);
        }
        Ok(q)
    }

    /// `outer(inner)` for univariate `outer` and `inner` without constant term.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.nvars() != 1 {
            return Err(Error::FormalVariableMismatch("outer series must be univariate".into()));
        }
        Self::substitute(outer, std::slice::from_ref(inner))
    }

    /// Substitute series `subs[i]` (sharing variables, zero constant terms)
    /// for the formal variables of `self`.
    pub fn substitute(&self, subs: &[Self]) -> Result<Self> {
        if subs.len() != self.nvars() {
            return Err(Error::FormalVariableMismatch(format!(
                "{} substitutions for {} variables",
                subs.len(),
                self.nvars()
            )));
        }
        let first = &subs[0];
        for s in subs {
            first.check_compatible(s)?;
            if !VarRegistry::same(&s.reg, &self.reg) {
                return Err(Error::RegistryMismatch);
            }
            if s.terms.contains_key(&Exp::default()) {
                return Err(Error::NonzeroConstantTerm);
            }
        }
        let v = subs.iter().map(Series::valuation).min().unwrap_or(1).max(1);
        let inner_order = subs.iter().map(Series::order).min().unwrap_or(0);
        let order = inner_order.min((self.order + 1) * v - 1);

        // cached powers of every substitution, truncated at `order`
        let mut powers: Vec<Vec<Self>> = Vec::with_capacity(subs.len());
        for (i, s) in subs.iter().enumerate() {
            let maxe = self.terms.keys().map(|e| e.0[i]).max().unwrap_or(0) as usize;
            let s = s.truncate(order);
            let mut list = vec![{
                let mut one = s.zero_like(order);
                one.add_term(Exp::default(), Polynomial::one(&self.reg));
                one
            }];
            for k in 1..=maxe {
                if (k as u32) * s.valuation() > order {
                    list.push(s.zero_like(order));
                } else {
                    let next = list[k - 1].mul_to(&s, order);
                    list.push(next);
                }
            }
            powers.push(list);
        }

        // group by the exponent of the first variable
        let mut groups: BTreeMap<u8, Vec<(&Exp, &Polynomial<C>)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            groups.entry(e.0[0]).or_default().push((e, c));
        }
        let mut out = first.zero_like(order);
        for (e0, items) in groups {
            let lead = &powers[0][e0 as usize];
            if lead.is_zero() && e0 > 0 {
                continue;
            }
            let room = order - lead.valuation().min(order);
            let mut inner = first.zero_like(room);
            for (e, c) in items {
                let mut t = first.zero_like(room);
                t.add_term(Exp::default(), c.clone());
                for i in 1..subs.len() {
                    let k = e.0[i] as usize;
                    if k > 0 {
                        t = t.mul_to(&powers[i][k], room);
                    }
                }
                for (te, tc) in t.terms {
                    inner.add_term(te, tc);
                }
            }
            let prod = lead.mul_to(&inner, order);
            for (te, tc) in prod.terms {
                out.add_term(te, tc);
            }
        }
        Ok(out)
    }

    /// Compositional inverse of a univariate `f` with `f(0) = 0`, `f'(0) = 1`,
    /// by Newton iteration with doubling precision.
    pub fn reverse(&self) -> Result<Self> {
        if self.nvars() != 1 {
            return Err(Error::FormalVariableMismatch("reversion needs a univariate series".into()));
        }
        if !self.coeff_uni(0).is_zero() || !self.coeff_uni(1).is_one() {
            return Err(Error::BadNormalization);
        }
        let o = self.order;
        let vars = self.vars();
        let z = Self::var(&vars, &self.reg, 0, o)?;
        let df = self.derivative(0)?;
        let mut g = z.truncate(1.min(o));
        let mut prec = 1u32.min(o);
        while prec < o {
            prec = (2 * prec).min(o);
            let g_p = g.with_order(prec);
            let fg = Self::compose(&self.truncate(prec), &g_p)?;
            let dfg = Self::compose(&df.truncate(prec), &g_p)?;
            let err = fg.sub(&z.truncate(prec))?;
            let corr = err.mul(&dfg.invert()?)?;
            g = g_p.sub(&corr)?.truncate(prec);
        }
        let g = g.with_order(o);
        let diff = Self::compose(self, &g)?.sub(&z)?;
        if let Some((e, _)) = diff.terms.iter().next() {
            return Err(Error::Internal(format!("reversion failed at degree {}", e.degree())));
        }
        Ok(g)
    }

    /// Square root with constant term 1; needs exact halving of coefficients.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.coeff(Exp::default()).is_one() {
            return Err(Error::NonUnitConstant(format!(
                "square root needs constant term 1, got {}",
                self.coeff(Exp::default())
            )));
        }
        let two = C::from_i64(2);
        let parts = self.by_degree();
        let mut out = self.zero_like(self.order);
        out.add_term(Exp::default(), Polynomial::one(&self.reg));
        let mut out_parts: Vec<Vec<(Exp, Polynomial<C>)>> = vec![vec![(Exp::default(), Polynomial::one(&self.reg))]];
        for d in 1..=self.order as usize {
            let mut acc: BTreeMap<Exp, Polynomial<C>> = BTreeMap::new();
            for (e, c) in &parts[d] {
                acc.insert(*e, (*c).clone());
            }
            for k in 1..d {
                for (ea, ca) in &out_parts[k] {
                    for (eb, cb) in &out_parts[d - k] {
                        let slot = acc.entry(ea.add(eb)).or_insert_with(|| Polynomial::zero(&self.reg));
                        *slot -= &(ca * cb);
                    }
                }
            }
            let mut level = Vec::new();
            for (e, c) in acc {
                let h = c.div_scalar_exact(&two)?;
                if !h.is_zero() {
                    out.terms.insert(e, h.clone());
                    level.push((e, h));
                }
            }
            out_parts.push(level);
        }
        Ok(out)
    }

    /// Partial derivative along formal variable `i`; the order drops by one.
    pub fn derivative(&self, i: usize) -> Result<Self> {
        if i >= self.nvars() {
            return Err(Error::Usage(format!("no formal variable with index {i}")));
        }
        let mut out = self.zero_like(self.order.saturating_sub(1));
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut ne = *e;
            ne.0[i] -= 1;
            out.add_term(ne, c.scale(&C::from_i64(k as i64)));
        }
        Ok(out)
    }

    /// Antiderivative along formal variable `i` with zero integration
    /// constant; the order grows by one.
    pub fn integrate(&self, i: usize) -> Result<Self> {
        if i >= self.nvars() {
            return Err(Error::Usage(format!("no formal variable with index {i}")));
        }
        let mut out = self.zero_like(self.order + 1);
        for (e, c) in &self.terms {
            let mut ne = *e;
            ne.0[i] += 1;
            out.add_term(ne, c.div_scalar_exact(&C::from_i64(ne.0[i] as i64))?);
        }
        Ok(out)
    }

    /// Apply `f` to every coefficient, landing in registry `reg`.
    pub fn map_coeffs<D: Coeff>(
        &self,
        reg: &Arc<VarRegistry>,
        mut f: impl FnMut(&Polynomial<C>) -> Result<Polynomial<D>>,
    ) -> Result<Series<D>> {
        let mut out = Series { vars: self.vars.clone(), reg: reg.clone(), order: self.order, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            let p = f(c)?;
            if !VarRegistry::same(p.registry(), reg) {
                return Err(Error::RegistryMismatch);
            }
            out.add_term(*e, p);
        }
        Ok(out)
    }

    pub fn to_rat(&self) -> Series<Rat> {
        self.map_coeffs(&self.reg, |p| Ok(p.to_rat())).expect("registry unchanged")
    }

    /// Same series over a registry containing every used coefficient variable.
    pub fn embed(&self, reg: &Arc<VarRegistry>) -> Result<Self> {
        self.map_coeffs(reg, |p| p.embed(reg))
    }

    /// Re-express over formal variables `vars`, sending old variable `k` to
    /// new variable `mapping[k]`.
    pub fn map_vars(&self, vars: &[&str], mapping: &[usize]) -> Result<Self> {
        if mapping.len() != self.nvars() || mapping.iter().any(|&m| m >= vars.len()) {
            return Err(Error::FormalVariableMismatch("bad variable mapping".into()));
        }
        let mut out = Self::zero(vars, &self.reg, self.order)?;
        for (e, c) in &self.terms {
            let mut ne = Exp::default();
            for (k, &m) in mapping.iter().enumerate() {
                ne.0[m] += e.0[k];
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// First coefficient (in series order) where the two series differ
    /// through degree `through`.
    pub fn first_difference(&self, other: &Self, through: u32) -> Result<Option<(Exp, Polynomial<C>)>> {
        self.check_compatible(other)?;
        if through > self.order.min(other.order) {
            return Err(Error::OrderTooSmall { requested: through, available: self.order.min(other.order) });
        }
        let diff = self.sub(other)?;
        Ok(diff.terms.into_iter().find(|(e, _)| e.degree() <= through))
    }

    /// Every coefficient of `x^e` is homogeneous of weight `deg e - shift`.
    pub fn is_graded(&self, shift: i64) -> bool {
        self.terms.iter().all(|(e, c)| {
            let w = e.degree() as i64 - shift;
            w >= 0 && c.is_homogeneous_of(w as u32)
        })
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            vars: self.vars.to_vec(),
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| SeriesTermJson { exp: e.0[..self.nvars()].to_vec(), poly: c.to_string() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTermJson {
    pub exp: Vec<u8>,
    pub poly: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub vars: Vec<String>,
    pub order: u32,
    pub terms: Vec<SeriesTermJson>,
}

/// `z^shift * body` for a univariate body; used only for `p(z)`.
#[derive(Clone, Debug)]
pub struct LaurentSeries<C: Coeff> {
    pub shift: i32,
    pub body: Series<C>,
}

impl<C: Coeff> LaurentSeries<C> {
    /// Coefficient of `z^k`.
    pub fn coeff(&self, k: i32) -> Polynomial<C> {
        let j = k - self.shift;
        if j < 0 {
            Polynomial::zero(self.body.registry())
        } else {
            self.body.coeff_uni(j as u32)
        }
    }

    /// Highest exponent known exactly.
    pub fn order(&self) -> i32 {
        self.shift + self.body.order() as i32
    }
}
