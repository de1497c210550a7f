//! Sparse multivariate polynomials over [`Int`] or [`Rat`] with a weighted
//! variable registry.
//!
//! Weights are positive: `wt(A_k) = wt(B_k) = k`, `wt(mu_i) = i`. The
//! topological grading of the coefficients of a formal group law is the
//! negative even relabeling `-2 * weight`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::algebra::{Coeff, Int, Rat};
use crate::error::{Error, Result};

/// Names that the Buchstaber normalization removes from every presentation.
pub const FORBIDDEN_NAMES: [&str; 2] = ["A2", "B1"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub weight: u32,
}

/// Ordered list of weighted variables.
///
/// An optional degree cap turns every polynomial ring over this registry into
/// the truncated ring `Z[vars] / (vars)^(cap+1)`, which is what linear-part
/// computations need.
#[derive(Debug, Clone)]
pub struct VarRegistry {
    vars: Vec<Var>,
    index: HashMap<String, usize>,
    degree_cap: Option<u32>,
}

impl PartialEq for VarRegistry {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.degree_cap == other.degree_cap
    }
}

impl Eq for VarRegistry {}

impl VarRegistry {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = (S, u32)>) -> Result<Arc<Self>> {
        Self::build(vars, None)
    }

    pub fn with_degree_cap<S: Into<String>>(
        vars: impl IntoIterator<Item = (S, u32)>,
        cap: u32,
    ) -> Result<Arc<Self>> {
        Self::build(vars, Some(cap))
    }

    fn build<S: Into<String>>(
        vars: impl IntoIterator<Item = (S, u32)>,
        degree_cap: Option<u32>,
    ) -> Result<Arc<Self>> {
        let mut out = VarRegistry { vars: Vec::new(), index: HashMap::new(), degree_cap };
        for (name, weight) in vars {
            let name = name.into();
            if FORBIDDEN_NAMES.contains(&name.as_str()) {
                return Err(Error::ForbiddenVariable(name));
            }
            if weight == 0 {
                return Err(Error::Usage(format!("variable `{name}` needs a positive weight")));
            }
            if out.index.contains_key(&name) {
                return Err(Error::DuplicateVariable(name));
            }
            if out.vars.len() >= u16::MAX as usize {
                return Err(Error::Guard("too many variables".into()));
            }
            out.index.insert(name.clone(), out.vars.len());
            out.vars.push(Var { name, weight });
        }
        Ok(Arc::new(out))
    }

    /// `A1, B2, A3, B3, ..., A_w, B_w`: the Buchstaber generators up to weight `w`.
    pub fn buchstaber(max_weight: u32) -> Arc<Self> {
        Self::new(buchstaber_generators(max_weight)).expect("canonical names are valid")
    }

    /// Same registry with a different degree cap.
    pub fn recapped(&self, cap: Option<u32>) -> Arc<Self> {
        Arc::new(VarRegistry { vars: self.vars.clone(), index: self.index.clone(), degree_cap: cap })
    }

    /// Registry with extra variables appended (names already present are skipped).
    pub fn extended<S: Into<String>>(&self, extra: impl IntoIterator<Item = (S, u32)>) -> Result<Arc<Self>> {
        let mut vars: Vec<(String, u32)> = self.vars.iter().map(|v| (v.name.clone(), v.weight)).collect();
        for (n, w) in extra {
            let n = n.into();
            if !self.index.contains_key(&n) && !vars.iter().any(|(m, _)| *m == n) {
                vars.push((n, w));
            }
        }
        Self::build(vars, self.degree_cap)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn degree_cap(&self) -> Option<u32> {
        self.degree_cap
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].name
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.vars[i].weight
    }

    pub fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

/// `(name, weight)` pairs for the Buchstaber generators through `max_weight`.
pub fn buchstaber_generators(max_weight: u32) -> Vec<(String, u32)> {
    let mut out = Vec::new();
    for k in 1..=max_weight {
        if k != 2 {
            out.push((format!("A{k}"), k));
        }
        if k != 1 {
            out.push((format!("B{k}"), k));
        }
    }
    out
}

/// Exponent vector over a registry.
///
/// Ordering is the canonical display order: higher total degree first, then
/// lexicographically larger exponents first. Iterating a `BTreeMap` keyed by
/// monomials therefore yields terms in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(SmallVec<[u8; 32]>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(SmallVec::from_elem(0, arity))
    }

    pub fn var(arity: usize, i: usize) -> Self {
        let mut m = Self::one(arity);
        m.0[i] = 1;
        m
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn weight(&self, reg: &VarRegistry) -> u32 {
        self.0.iter().enumerate().map(|(i, &e)| e as u32 * reg.weight(i)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(self.0.iter()).map(|(b, a)| b - a).collect())
    }

    pub fn render(&self, reg: &VarRegistry) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { reg.name(i).to_string() } else { format!("{}^{}", reg.name(i), e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.degree().cmp(&self.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of exactly `weight`, optionally of total degree at most
/// `max_degree`, in canonical order.
pub fn monomial_basis(reg: &VarRegistry, weight: u32, max_degree: Option<u32>) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = Monomial::one(reg.len());
    fn go(
        reg: &VarRegistry,
        i: usize,
        left: u32,
        deg: u32,
        max_degree: Option<u32>,
        cur: &mut Monomial,
        out: &mut Vec<Monomial>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if i == reg.len() {
            return;
        }
        let w = reg.weight(i);
        let mut e = 0u32;
        loop {
            if max_degree.is_some_and(|d| deg + e > d) || e > u8::MAX as u32 {
                break;
            }
            cur.0[i] = e as u8;
            go(reg, i + 1, left - e * w, deg + e, max_degree, cur, out);
            if (e + 1) * w > left {
                break;
            }
            e += 1;
        }
        cur.0[i] = 0;
    }
    go(reg, 0, weight, 0, max_degree, &mut cur, &mut out);
    out.sort();
    out
}

/// Sparse polynomial with exact coefficients.
#[derive(Clone)]
pub struct Polynomial<C: Coeff> {
    reg: Arc<VarRegistry>,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> PartialEq for Polynomial<C> {
    fn eq(&self, other: &Self) -> bool {
        VarRegistry::same(&self.reg, &other.reg) && self.terms == other.terms
    }
}

impl<C: Coeff> Eq for Polynomial<C> {}

impl<C: Coeff> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(reg: &Arc<VarRegistry>) -> Self {
        Polynomial { reg: reg.clone(), terms: BTreeMap::new() }
    }

    pub fn one(reg: &Arc<VarRegistry>) -> Self {
        Self::constant(reg, C::one())
    }

    pub fn constant(reg: &Arc<VarRegistry>, c: C) -> Self {
        let mut p = Self::zero(reg);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(reg.len()), c);
        }
        p
    }

    pub fn from_i64(reg: &Arc<VarRegistry>, c: i64) -> Self {
        Self::constant(reg, C::from_i64(c))
    }

    pub fn var(reg: &Arc<VarRegistry>, name: &str) -> Result<Self> {
        let i = reg.require(name)?;
        Ok(Self::var_at(reg, i))
    }

    pub fn var_at(reg: &Arc<VarRegistry>, i: usize) -> Self {
        let mut p = Self::zero(reg);
        if reg.degree_cap() != Some(0) {
            p.terms.insert(Monomial::var(reg.len(), i), C::one());
        }
        p
    }

    /// Single term `c * m`.
    pub fn monomial(reg: &Arc<VarRegistry>, m: Monomial, c: C) -> Self {
        let mut p = Self::zero(reg);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(reg: &Arc<VarRegistry>, terms: impl IntoIterator<Item = (Monomial, C)>) -> Result<Self> {
        let mut p = Self::zero(reg);
        for (m, c) in terms {
            if m.0.len() != reg.len() {
                return Err(Error::Usage(format!(
                    "exponent vector of length {} for a registry of {} variables",
                    m.0.len(),
                    reg.len()
                )));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.reg
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> C {
        self.terms.get(&Monomial::one(self.reg.len())).cloned().unwrap_or_else(C::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// `c` as an element of the coefficient domain when the polynomial is constant.
    pub fn as_constant(&self) -> Option<C> {
        self.is_constant().then(|| self.constant_term())
    }

    fn capped(&self, m: &Monomial) -> bool {
        self.reg.degree_cap().is_some_and(|d| m.degree() > d)
    }

    /// `self += c * m`
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() || self.capped(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if VarRegistry::same(&self.reg, &other.reg) {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.add_assign_poly(other);
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.sub_assign_poly(other);
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_assign_poly(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    fn sub_assign_poly(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.neg_ref());
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.reg);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        let cap = self.reg.degree_cap();
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            for (m2, c2) in &other.terms {
                if cap.is_some_and(|d| d1 + m2.degree() > d) {
                    continue;
                }
                let m = m1.mul(m2);
                match out.terms.entry(m) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(c1.mul_ref(c2));
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        e.get_mut().mul_add_assign(c1, c2);
                    }
                }
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// `self += a * b` without allocating the intermediate product.
    pub fn add_product(&mut self, a: &Self, b: &Self) {
        debug_assert!(VarRegistry::same(&self.reg, &a.reg) && VarRegistry::same(&a.reg, &b.reg));
        if a.is_zero() || b.is_zero() {
            return;
        }
        let cap = self.reg.degree_cap();
        for (m1, c1) in &a.terms {
            let d1 = m1.degree();
            for (m2, c2) in &b.terms {
                if cap.is_some_and(|d| d1 + m2.degree() > d) {
                    continue;
                }
                let m = m1.mul(m2);
                match self.terms.entry(m) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(c1.mul_ref(c2));
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        e.get_mut().mul_add_assign(c1, c2);
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(&self.reg);
        }
        Polynomial {
            reg: self.reg.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x.mul_ref(c))).collect(),
        }
    }

    /// Divide every coefficient by `c`; fails unless all divisions are exact.
    pub fn div_scalar_exact(&self, c: &C) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (m, x) in &self.terms {
            let q = x.div_exact(c).ok_or_else(|| Error::NonIntegral(format!("{x}/{c}")))?;
            terms.insert(m.clone(), q);
        }
        Ok(Polynomial { reg: self.reg.clone(), terms })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.reg);
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Weight of a nonzero homogeneous polynomial.
    pub fn weight(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.weight(&self.reg));
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    /// Zero counts as homogeneous of every weight.
    pub fn is_homogeneous_of(&self, w: u32) -> bool {
        self.terms.keys().all(|m| m.weight(&self.reg) == w)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.weight().is_some()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u8 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Whether any term involves variable `var`.
    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    /// Terms of total degree exactly one in `generators` (image modulo I²).
    pub fn linear_part(&self, generators: &[usize]) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| generators.iter().map(|&g| m.0[g] as u32).sum::<u32>() == 1)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Polynomial { reg: self.reg.clone(), terms }
    }

    /// Linear part over every registry variable.
    pub fn linear_part_all(&self) -> Self {
        let terms =
            self.terms.iter().filter(|(m, _)| m.degree() == 1).map(|(m, c)| (m.clone(), c.clone())).collect();
        Polynomial { reg: self.reg.clone(), terms }
    }

    /// Substitute `bindings` (by variable name) and land in `target`.
    ///
    /// Unbound variables map to the same-named variable of `target`; in
    /// strict mode an unbound variable is an error.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<String, Polynomial<C>>,
        target: &Arc<VarRegistry>,
        strict: bool,
    ) -> Result<Self> {
        for b in bindings.values() {
            if !VarRegistry::same(b.registry(), target) {
                return Err(Error::RegistryMismatch);
            }
        }
        let mut images: Vec<Option<Polynomial<C>>> = Vec::with_capacity(self.reg.len());
        for (i, v) in self.reg.vars().iter().enumerate() {
            let used = self.involves(i);
            images.push(match bindings.get(&v.name) {
                Some(p) => Some(p.clone()),
                None if !used => None,
                None if strict => return Err(Error::UnknownVariable(v.name.clone())),
                None => Some(Polynomial::var(target, &v.name)?),
            });
        }
        let mut powers: HashMap<(usize, u8), Polynomial<C>> = HashMap::new();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers
                    .entry((i, e))
                    .or_insert_with(|| images[i].as_ref().expect("image of a used variable").pow(e as u32));
                t = t.mul_unchecked(p);
                if t.is_zero() {
                    break;
                }
            }
            out.add_assign_poly(&t);
        }
        Ok(out)
    }

    /// Same polynomial over a registry that contains all used variable names.
    pub fn embed(&self, target: &Arc<VarRegistry>) -> Result<Self> {
        if VarRegistry::same(&self.reg, target) {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self.reg.vars().iter().map(|v| target.index_of(&v.name)).collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut nm = Monomial::one(target.len());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let j = map[i].ok_or_else(|| Error::UnknownVariable(self.reg.name(i).to_string()))?;
                    nm.0[j] = e;
                }
            }
            out.add_term(nm, c.clone());
        }
        Ok(out)
    }

    /// Change of coefficient domain; `None` if some coefficient does not fit.
    pub fn convert<D: Coeff>(&self) -> Option<Polynomial<D>> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.clone(), D::from_rat(&c.to_rat())?);
        }
        Some(Polynomial { reg: self.reg.clone(), terms })
    }

    pub fn to_rat(&self) -> Polynomial<Rat> {
        self.convert().expect("every coefficient embeds in QQ")
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(Coeff::is_integral)
    }

    /// Reduce modulo rewriting rules `lead -> replacement` (monic leads).
    pub fn reduce_mod(&self, rules: &[Rule<C>], max_steps: usize) -> Result<Self> {
        for r in rules {
            if !VarRegistry::same(r.replacement.registry(), &self.reg) || r.lead.0.len() != self.reg.len() {
                return Err(Error::RegistryMismatch);
            }
        }
        let mut p = self.clone();
        let mut steps = 0usize;
        loop {
            let hit = p.terms.iter().find_map(|(m, c)| {
                rules.iter().find(|r| r.lead.divides(m)).map(|r| (m.clone(), c.clone(), r))
            });
            let Some((m, c, rule)) = hit else { return Ok(p) };
            steps += 1;
            if steps > max_steps {
                return Err(Error::RewriteLimit(max_steps));
            }
            p.terms.remove(&m);
            let cofactor = Polynomial::monomial(&self.reg, rule.lead.quotient_of(&m), c);
            p.add_product(&cofactor, &rule.replacement);
        }
    }

    /// gcd of the integer coefficients (the content).
    pub fn content(&self) -> Int {
        use num_integer::Integer;
        let mut g = Int::from(0);
        for c in self.terms.values() {
            let r = c.to_rat();
            g = g.gcd(r.numer());
        }
        g
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            vars: self.reg.vars().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson { exp: m.0.to_vec(), coef: c.to_coef_string() })
                .collect(),
        }
    }

    pub fn from_json(json: &PolynomialJson) -> Result<Self> {
        let reg = VarRegistry::new(json.vars.iter().map(|v| (v.name.clone(), v.weight)))?;
        let mut p = Self::zero(&reg);
        for t in &json.terms {
            if t.exp.len() != reg.len() {
                return Err(Error::Parse("exponent vector length does not match vars".into()));
            }
            p.add_term(Monomial::from_exponents(&t.exp), C::parse_coef(&t.coef)?);
        }
        Ok(p)
    }

    /// Parse `A1^3 - 2*A1*B2 + 3/2*B3` style expressions over `reg`.
    pub fn parse(reg: &Arc<VarRegistry>, src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut parser = Parser { reg, tokens, pos: 0 };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!("trailing input in `{src}`")));
        }
        Ok(p)
    }
}

impl<C: Coeff> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let s = c.to_coef_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{}", m.render(&self.reg))?;
            } else {
                write!(f, "{mag}*{}", m.render(&self.reg))?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<C: Coeff> std::ops::$trait<&Polynomial<C>> for &Polynomial<C> {
            type Output = Polynomial<C>;
            /// Panics if the operands live in different registries.
            fn $method(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                self.$checked(rhs).expect("polynomial registry mismatch")
            }
        }
        impl<C: Coeff> std::ops::$trait<Polynomial<C>> for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: Polynomial<C>) -> Polynomial<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<C: Coeff> std::ops::Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            reg: self.reg.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg_ref())).collect(),
        }
    }
}

impl<C: Coeff> std::ops::Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

impl<C: Coeff> std::ops::AddAssign<&Polynomial<C>> for Polynomial<C> {
    fn add_assign(&mut self, rhs: &Polynomial<C>) {
        assert!(VarRegistry::same(&self.reg, &rhs.reg), "polynomial registry mismatch");
        self.add_assign_poly(rhs);
    }
}

impl<C: Coeff> std::ops::SubAssign<&Polynomial<C>> for Polynomial<C> {
    fn sub_assign(&mut self, rhs: &Polynomial<C>) {
        assert!(VarRegistry::same(&self.reg, &rhs.reg), "polynomial registry mismatch");
        self.sub_assign_poly(rhs);
    }
}

/// Rewriting rule `lead -> replacement`.
#[derive(Debug, Clone)]
pub struct Rule<C: Coeff> {
    pub lead: Monomial,
    pub replacement: Polynomial<C>,
}

impl<C: Coeff> Rule<C> {
    /// Rule from a relation `lead = replacement`, checking that the
    /// replacement has smaller degree in every variable of the lead.
    pub fn new(lead: Monomial, replacement: Polynomial<C>) -> Result<Self> {
        for (i, &e) in lead.0.iter().enumerate() {
            if e > 0 && replacement.degree_in(i) >= e {
                return Err(Error::Usage(format!(
                    "rule replacement for {} is not of lower degree in {}",
                    lead.render(replacement.registry()),
                    replacement.registry().name(i)
                )));
            }
        }
        Ok(Rule { lead, replacement })
    }

    /// `var^power -> replacement`
    pub fn power(reg: &Arc<VarRegistry>, var: &str, power: u8, replacement: Polynomial<C>) -> Result<Self> {
        let i = reg.require(var)?;
        let mut lead = Monomial::one(reg.len());
        lead.0[i] = power;
        Self::new(lead, replacement)
    }

    /// The relation `lead - replacement`, which reduces to zero.
    pub fn relation(&self) -> Polynomial<C> {
        let reg = self.replacement.registry();
        &Polynomial::monomial(reg, self.lead.clone(), C::one()) - &self.replacement
    }
}

pub const DEFAULT_REWRITE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u8>,
    pub coef: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub vars: Vec<Var>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(Int),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token::Num(s.parse().map_err(|_| Error::Parse(s.clone()))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{src}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    reg: &'a Arc<VarRegistry>,
    tokens: Vec<Token>,
    pos: usize,
}

impl<C: Coeff> Polynomial<C> {
    fn parse_err(msg: &str) -> Error {
        Error::Parse(msg.to_string())
    }
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr<C: Coeff>(&mut self) -> Result<Polynomial<C>> {
        let mut acc = if self.peek_op() == Some('-') {
            self.pos += 1;
            -self.term::<C>()?
        } else {
            if self.peek_op() == Some('+') {
                self.pos += 1;
            }
            self.term()?
        };
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let t = self.term()?;
            acc = if op == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term<C: Coeff>(&mut self) -> Result<Polynomial<C>> {
        let mut acc = self.power()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let f = self.power::<C>()?;
            if op == '*' {
                acc = &acc * &f;
            } else {
                let c = f.as_constant().ok_or_else(|| Polynomial::<C>::parse_err("division by a non-constant"))?;
                if c.is_zero() {
                    return Err(Polynomial::<C>::parse_err("division by zero"));
                }
                acc = acc.div_scalar_exact(&c)?;
            }
        }
        Ok(acc)
    }

    fn power<C: Coeff>(&mut self) -> Result<Polynomial<C>> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Token::Num(n)) => {
                    use num_traits::ToPrimitive;
                    let e = n.to_u32().filter(|&e| e <= 255).ok_or_else(|| Polynomial::<C>::parse_err("exponent too large"))?;
                    self.pos += 1;
                    Ok(base.pow(e))
                }
                _ => Err(Polynomial::<C>::parse_err("expected an exponent after `^`")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom<C: Coeff>(&mut self) -> Result<Polynomial<C>> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Token::Num(n)) => Ok(Polynomial::constant(self.reg, C::from_int(&n))),
            Some(Token::Ident(name)) => Polynomial::var(self.reg, &name),
            Some(Token::Op('(')) => {
                let p = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Polynomial::<C>::parse_err("missing `)`"));
                }
                self.pos += 1;
                Ok(p)
            }
            Some(Token::Op('-')) => Ok(-self.power::<C>()?),
            _ => Err(Polynomial::<C>::parse_err("unexpected end of expression")),
        }
    }
}

/// Convenience parser for ℤ polynomials.
pub fn zpoly(reg: &Arc<VarRegistry>, src: &str) -> Result<Polynomial<Int>> {
    Polynomial::parse(reg, src)
}

/// Convenience parser for ℚ polynomials.
pub fn qpoly(reg: &Arc<VarRegistry>, src: &str) -> Result<Polynomial<Rat>> {
    Polynomial::parse(reg, src)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> Arc<VarRegistry> {
        VarRegistry::buchstaber(6)
    }

    #[test]
    fn registry_rules() {
        assert!(matches!(VarRegistry::new([("A2", 2)]), Err(Error::ForbiddenVariable(_))));
        assert!(matches!(VarRegistry::new([("B1", 1)]), Err(Error::ForbiddenVariable(_))));
        assert!(matches!(VarRegistry::new([("x", 1), ("x", 2)]), Err(Error::DuplicateVariable(_))));
        assert!(VarRegistry::new([("x", 0)]).is_err());
        let r = reg();
        let names: Vec<&str> = r.vars().iter().map(|v| v.name.as_str()).collect();
        assert_eq!(&names[..6], &["A1", "B2", "A3", "B3", "A4", "B4"]);
    }

    #[test]
    fn arithmetic_examples() {
        let r = reg();
        let a1 = zpoly(&r, "A1").unwrap();
        let sq = &a1 * &a1;
        assert_eq!(sq.to_string(), "A1^2");
        assert_eq!(sq.weight(), Some(2));
        let p = zpoly(&r, "A1^3 - 2*A1*B2 + B3").unwrap() + zpoly(&r, "2*A1*B2").unwrap();
        assert_eq!(p, zpoly(&r, "A1^3 + B3").unwrap());

        let mu = VarRegistry::new([("mu1", 1), ("mu2", 2), ("mu3", 3), ("mu4", 4), ("mu6", 6)]).unwrap();
        let p = zpoly(&mu, "mu1*mu3").unwrap() * zpoly(&mu, "mu2").unwrap();
        assert_eq!(p.to_string(), "mu1*mu2*mu3");
        assert_eq!(p.weight(), Some(6));
    }

    #[test]
    fn display_order_and_rationals() {
        let r = reg();
        let p = qpoly(&r, "B3 + A1^3 - 3/2*A1*B2").unwrap();
        assert_eq!(p.to_string(), "A1^3 - 3/2*A1*B2 + B3");
        assert_eq!(zpoly(&r, "-(A1 - 1)").unwrap().to_string(), "-A1 + 1");
        assert!(zpoly(&r, "A1/2").is_err());
        assert!(zpoly(&r, "A2").is_err());
    }

    #[test]
    fn substitution_examples() {
        let r = reg();
        let p = zpoly(&r, "A1*B2").unwrap();
        let mut b = BTreeMap::new();
        b.insert("A1".to_string(), Polynomial::zero(&r));
        assert!(p.substitute(&b, &r, false).unwrap().is_zero());

        let f5 = zpoly(&r, "A1^4 - 3*A1^2*B2 + B2^2 + 4*A1*A3").unwrap();
        let mut b = BTreeMap::new();
        b.insert("B4".to_string(), f5.clone());
        assert_eq!(zpoly(&r, "B4").unwrap().substitute(&b, &r, false).unwrap(), f5);
        assert!(zpoly(&r, "B4*A1").unwrap().substitute(&b, &r, true).is_err());

        let mu = VarRegistry::new([("mu3", 3), ("mu6", 6)]).unwrap();
        let mut b = BTreeMap::new();
        b.insert("mu6".to_string(), qpoly(&mu, "-1/3*mu3^2").unwrap());
        let out = qpoly(&mu, "mu6").unwrap().substitute(&b, &mu, false).unwrap();
        assert_eq!(out.to_string(), "-1/3*mu3^2");
    }

    #[test]
    fn linear_parts() {
        let r = reg();
        let gens: Vec<usize> = (0..r.len()).collect();
        let lp = |s: &str| zpoly(&r, s).unwrap().linear_part(&gens).to_string();
        assert_eq!(lp("A1^3 - 2*A1*B2 + B3"), "B3");
        assert_eq!(lp("4*B3 - 6*A3 + 7*A1*B2"), "-6*A3 + 4*B3");
        assert_eq!(lp("A1*B2"), "0");
    }

    #[test]
    fn basis_examples() {
        let r = VarRegistry::new([("A1", 1), ("B2", 2), ("A3", 3), ("B3", 3)]).unwrap();
        let b: Vec<String> = monomial_basis(&r, 3, None).iter().map(|m| m.render(&r)).collect();
        assert_eq!(b, ["A1^3", "A1*B2", "A3", "B3"]);
        assert_eq!(monomial_basis(&r, 0, None).len(), 1);
        let r1 = VarRegistry::new([("A1", 1)]).unwrap();
        assert_eq!(monomial_basis(&r1, 2, None)[0].render(&r1), "A1^2");
        assert_eq!(monomial_basis(&r, 3, Some(1)).len(), 2);
    }

    #[test]
    fn basis_matches_enumeration_oracle() {
        let r = reg();
        for w in 0..=8u32 {
            // brute force over bounded exponent boxes
            let mut count = 0usize;
            let ws: Vec<u32> = r.vars().iter().map(|v| v.weight).collect();
            let mut e = vec![0u32; ws.len()];
            loop {
                let tot: u32 = e.iter().zip(&ws).map(|(a, b)| a * b).sum();
                if tot == w {
                    count += 1;
                }
                let mut i = 0;
                loop {
                    if i == e.len() {
                        break;
                    }
                    e[i] += 1;
                    if e[i] * ws[i] <= w {
                        break;
                    }
                    e[i] = 0;
                    i += 1;
                }
                if i == e.len() {
                    break;
                }
            }
            assert_eq!(monomial_basis(&r, w, None).len(), count, "weight {w}");
        }
    }

    #[test]
    fn reduce_mod_examples() {
        let r = reg();
        let rhs = zpoly(&r, "2*A1*(5*A1^2 - 2*B2)*A3 + (2*A1^2 - B2)*(A1^4 - 3*A1^2*B2 + B2^2)").unwrap();
        let rule = Rule::power(&r, "A3", 2, rhs.clone()).unwrap();
        let a3sq = zpoly(&r, "A3^2").unwrap();
        assert_eq!(a3sq.reduce_mod(std::slice::from_ref(&rule), 100).unwrap(), rhs);
        let a1sq = zpoly(&r, "A1^2").unwrap();
        assert_eq!(a1sq.reduce_mod(&[], 100).unwrap(), a1sq);

        let a3cube = zpoly(&r, "A3^3").unwrap();
        let red = a3cube.reduce_mod(std::slice::from_ref(&rule), 100).unwrap();
        let a3 = r.index_of("A3").unwrap();
        assert!(red.degree_in(a3) <= 1);
        // expanding back: A3^3 - red = (A3 + 2*A1*(5*A1^2 - 2*B2)) * relation
        let rel = rule.relation();
        let diff = &a3cube - &red;
        let q = &zpoly(&r, "A3").unwrap() + &zpoly(&r, "2*A1*(5*A1^2 - 2*B2)").unwrap();
        assert_eq!(diff, &q * &rel);
        assert!(matches!(a3cube.reduce_mod(std::slice::from_ref(&rule), 1), Err(Error::RewriteLimit(1))));
    }

    #[test]
    fn degree_cap_truncates() {
        let r = VarRegistry::buchstaber(4).recapped(Some(1));
        let p = zpoly(&r, "(1 + A1)*(1 + B2)").unwrap();
        assert_eq!(p.to_string(), "A1 + B2 + 1");
    }

    #[test]
    fn json_round_trip() {
        let r = reg();
        let p = qpoly(&r, "A1^3 - 3/2*A1*B2 + B3").unwrap();
        let j = serde_json::to_string(&p.to_json()).unwrap();
        let back: Polynomial<Rat> = Polynomial::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back.to_string(), p.to_string());
    }
}
