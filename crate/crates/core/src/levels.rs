//! Level-N relations on `A(u)`, `B(u)`, Tate specializations for levels 2
//! and 3, and an order-by-order solver for the universal specialization.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Coeff, Int, Rat};
use crate::error::{Error, Result};
use crate::fgl::{buchstaber_fgl, generic_ab, tate_fgl, tate_s, CurveParams, FormalGroupLaw, Provenance};
use crate::polyring::{buchstaber_generators, Monomial, Polynomial, Rule, VarRegistry, DEFAULT_REWRITE_LIMIT};
use crate::series::{Exp, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelMode {
    /// The printed relation on the series `A`, `B` (`F2!` ... `F6!`).
    Form,
    /// Polynomial relations among the first coefficients (`F2z` ... `F6z`).
    Specialization,
    /// The uniform product relation with parameters `b_i`, `a_i`.
    General,
}

impl fmt::Display for LevelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LevelMode::Form => "form",
            LevelMode::Specialization => "specialization",
            LevelMode::General => "general",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub n: u8,
    pub mode: LevelMode,
}

impl LevelSpec {
    pub fn new(n: u8, mode: LevelMode) -> Result<Self> {
        if !(2..=6).contains(&n) {
            return Err(Error::Usage(format!("level must be in 2..=6, got {n}")));
        }
        Ok(LevelSpec { n, mode })
    }

    /// `(n, m) = ([(N-1)/2], [(N-2)/2])` of the general relation.
    pub fn product_shape(&self) -> (u32, u32) {
        let n = self.n as u32;
        ((n - 1) / 2, (n - 2) / 2)
    }

    /// Extra parameters (`b_i` of weight 1, `a_i` of weight 2) the mode uses.
    pub fn parameters(&self) -> Vec<(String, u32)> {
        let (nb, ma) = match self.mode {
            LevelMode::Specialization => (0, 0),
            LevelMode::Form if self.n <= 4 => (0, 0),
            _ => self.product_shape(),
        };
        let mut out: Vec<(String, u32)> = (1..=nb).map(|i| (format!("b{i}"), 1)).collect();
        out.extend((1..=ma).map(|i| (format!("a{i}"), 2)));
        out
    }
}

fn param<C: Coeff>(reg: &Arc<VarRegistry>, name: &str, n: u8) -> Result<Polynomial<C>> {
    reg.index_of(name)
        .map(|i| Polynomial::var_at(reg, i))
        .ok_or_else(|| Error::Usage(format!("level {n} needs the parameter `{name}` in the registry")))
}

/// `series + c * u^k`
fn plus_monomial<C: Coeff>(s: &Series<C>, c: &Polynomial<C>, k: u32) -> Series<C> {
    let mut out = s.clone();
    out.add_term(Exp::uni(k), c.clone());
    out
}

/// Nonzero coefficients `(k, [u^k](LHS - RHS))`, `k <= order`, of the level
/// relation on `A`, `B`; each sits at weight `k`.
pub fn level_relation<C: Coeff>(
    spec: &LevelSpec,
    a: &Series<C>,
    b: &Series<C>,
    order: u32,
) -> Result<Vec<(u32, Polynomial<C>)>> {
    let reg = a.registry().clone();
    let a = a.truncate(order);
    let b = b.truncate(order);
    if a.order() < order || b.order() < order {
        return Err(Error::OrderTooSmall { requested: order, available: a.order().min(b.order()) });
    }
    let a1 = a.coeff_uni(1);
    let b2 = b.coeff_uni(2);
    let c = |k: i64| Polynomial::<C>::from_i64(&reg, k);
    let one = Series::one(&["u"], &reg, order)?;
    let diff = match (spec.mode, spec.n) {
        (LevelMode::Specialization, _) => {
            return Err(Error::Usage("specialization relations are polynomial; use specialization_relations".into()))
        }
        (LevelMode::Form, 2) => a.sub(&one)?,
        (LevelMode::Form, 3) => plus_monomial(&b, &c(2).checked_mul(&a1)?, 1).sub(&a.mul(&a)?)?,
        (LevelMode::Form, 4) => {
            let lhs = plus_monomial(&b.scale_int(2), &c(3).checked_mul(&a1)?, 1);
            let k = &(&c(3) * &(&a1 * &a1)) - &(&c(8) * &b2);
            let rhs = a.mul(&a)?.mul(&plus_monomial(&a.scale_int(4), &-&k, 2))?;
            lhs.mul(&lhs)?.sub(&rhs)?
        }
        _ => {
            let (n, m) = spec.product_shape();
            let nn = spec.n as u32;
            let mut lhs = one.clone();
            if n >= 1 {
                for i in 1..=n {
                    let bi = param::<C>(&reg, &format!("b{i}"), spec.n)?;
                    let factor = plus_monomial(&b, &bi, 1);
                    let e = if i < n { 2 } else { nn - 2 * n };
                    lhs = lhs.mul(&factor.pow(e)?)?;
                }
            }
            let mut rhs = a.mul(&a)?;
            if m >= 1 {
                for i in 1..=m {
                    let ai = param::<C>(&reg, &format!("a{i}"), spec.n)?;
                    let factor = plus_monomial(&a, &ai, 2);
                    let e = if i < m { 2 } else { nn - 1 - 2 * m };
                    rhs = rhs.mul(&factor.pow(e)?)?;
                }
            }
            lhs.sub(&rhs)?
        }
    };
    Ok(diff.terms().map(|(e, p)| (e.0[0] as u32, p.clone())).collect())
}

/// The printed relation polynomials (left minus right side) generating `J_N`.
pub const SPECIALIZATION_SOURCES: [&[&str]; 5] = [
    &["A1", "A3"],
    &["B2 - A1^2", "B4"],
    &["2*A3 + A1*(A1^2 - 2*B2)", "8*B4 - 3*A1^4 + 4*A1^2*B2 + 4*B2^2"],
    &[
        "B4 - (A1^4 - 3*A1^2*B2 + B2^2 + 4*A1*A3)",
        "A3^2 - 2*A1*(5*A1^2 - 2*B2)*A3 - (2*A1^2 - B2)*(A1^4 - 3*A1^2*B2 + B2^2)",
    ],
    &[
        "5*A1^5 - 20*A1^3*B2 + 15*A1*B2^2 + 24*A1^2*A3 - 24*B2*A3 - 18*A1*B4",
        "5*A1^6 - 21*A1^4*B2 + 18*A1^2*B2^2 + 48*A1^3*A3 - 36*A1*B2*A3 + 18*A3^2",
        "3*A3*(11*A1^4 - 56*A1^2*B2 - 18*A1*A3 + 33*B2^2 + 18*B4) + A1*(5*A1^2 - 6*B2)*(A1^2 - 3*B2)*(A1^2 - 4*B2)",
        "6*A1^2*(A1^2 - B2)*(7*A1^2 - 4*B2)^2 - (17*A1^4 - 18*A1^2*B2 + 6*A1*A3 + 3*B2^2 + 6*B4)^2",
    ],
];

/// Generators of `J_N` over `reg` (which must contain `A1, B2, A3, B4`).
pub fn specialization_relations<C: Coeff>(n: u8, reg: &Arc<VarRegistry>) -> Result<Vec<Polynomial<C>>> {
    if !(2..=6).contains(&n) {
        return Err(Error::Usage(format!("level must be in 2..=6, got {n}")));
    }
    SPECIALIZATION_SOURCES[n as usize - 2].iter().map(|s| Polynomial::parse(reg, s)).collect()
}

/// Inputs of the universal solver beyond the level spec.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolveSetup {
    /// Generators and parameters left free.
    pub kept: Vec<String>,
    /// Bindings fixed before solving, as expressions in kept variables.
    pub seeds: BTreeMap<String, String>,
    /// Rewriting rules `var^power -> replacement` among kept variables.
    pub rules: Vec<(String, u8, String)>,
    /// Relations among kept variables that leftover constraints may equal.
    pub relations: Vec<String>,
}

/// Rule cutting the level-5 parameter curve: `b1^2 = 6 A1 b1 - 6 A1^2 - B2`.
pub const LEVEL5_B1_RULE: &str = "6*A1*b1 - 6*A1^2 - B2";
/// Rule cutting the level-6 parameter curve: `3 b1^2 = 12 A1 b1 - 10 A1^2 - 2 B2`.
pub const LEVEL6_B1_RULE: &str = "4*A1*b1 - 10/3*A1^2 - 2/3*B2";
/// Level-6 choice of `a1` on the parameter curve.
pub const LEVEL6_A1_SEED: &str = "-2*b1^2 + 5*A1*b1 - 10/3*A1^2 + 4/3*B2";

const A3_QUADRATIC_RULE: &str = "2*A1*(5*A1^2 - 2*B2)*A3 + (2*A1^2 - B2)*(A1^4 - 3*A1^2*B2 + B2^2)";

/// The kept sets and side data under which each level solves uniquely.
pub fn default_setup(spec: &LevelSpec) -> SolveSetup {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut out = SolveSetup::default();
    match (spec.n, spec.mode) {
        (2, _) => out.kept = s(&["B2", "B4"]),
        (3, _) => out.kept = s(&["A1", "A3"]),
        (4, _) => out.kept = s(&["A1", "B2"]),
        (5, LevelMode::Specialization) => {
            out.kept = s(&["A1", "B2", "A3"]);
            out.rules.push(("A3".into(), 2, A3_QUADRATIC_RULE.into()));
        }
        (5, _) => {
            out.kept = s(&["A1", "B2", "b1"]);
            out.rules.push(("b1".into(), 2, LEVEL5_B1_RULE.into()));
        }
        (6, LevelMode::Specialization) => {
            out.kept = s(&["A1", "B2", "A3", "B4"]);
            out.relations = s(SPECIALIZATION_SOURCES[4]);
        }
        (_, _) => {
            out.kept = s(&["A1", "B2", "b1"]);
            out.seeds.insert("a1".into(), LEVEL6_A1_SEED.into());
            out.rules.push(("b1".into(), 2, LEVEL6_B1_RULE.into()));
        }
    }
    out
}

/// Result of the universal solver.
#[derive(Debug, Clone)]
pub struct SolvedSpecialization {
    pub spec: LevelSpec,
    pub order: u32,
    pub kept: Vec<String>,
    /// Every solved generator or parameter, in kept variables, reduced.
    pub bindings: BTreeMap<String, Polynomial<Rat>>,
    pub rules: Vec<Rule<Rat>>,
    pub relations: Vec<Polynomial<Rat>>,
    pub a: Series<Rat>,
    pub b: Series<Rat>,
    pub fgl: FormalGroupLaw<Rat>,
}

/// Registry with the Buchstaber generators through `order` and the given parameters.
pub fn solver_registry(order: u32, params: &[(String, u32)]) -> Result<Arc<VarRegistry>> {
    let mut vars = buchstaber_generators(order.max(4));
    vars.extend(params.iter().cloned());
    VarRegistry::new(vars)
}

struct Context {
    reg: Arc<VarRegistry>,
    rules: Vec<Rule<Rat>>,
    relations: Vec<Polynomial<Rat>>,
}

impl Context {
    fn reduce(&self, p: &Polynomial<Rat>) -> Result<Polynomial<Rat>> {
        p.reduce_mod(&self.rules, DEFAULT_REWRITE_LIMIT)
    }

    /// Zero after reduction, or a scalar multiple of a declared relation.
    fn is_admissible(&self, p: &Polynomial<Rat>) -> Result<bool> {
        let p = self.reduce(p)?;
        if p.is_zero() {
            return Ok(true);
        }
        for rel in &self.relations {
            let (m, c) = rel.terms().next().expect("relations are nonzero");
            let ratio = p.coefficient(m).div_exact(c).expect("nonzero coefficient");
            if (&p - &rel.scale(&ratio)).is_zero() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn substitute(&self, p: &Polynomial<Rat>, bindings: &BTreeMap<String, Polynomial<Rat>>) -> Result<Polynomial<Rat>> {
        self.reduce(&p.substitute(bindings, &self.reg, false)?)
    }

    fn ab(&self, bindings: &BTreeMap<String, Polynomial<Rat>>, order: u32) -> Result<(Series<Rat>, Series<Rat>)> {
        let (a, b) = generic_ab::<Rat>(&self.reg, order)?;
        let f = |p: &Polynomial<Rat>| self.substitute(p, bindings);
        Ok((a.map_coeffs(&self.reg, f)?, b.map_coeffs(&self.reg, f)?))
    }
}

/// Solve for the universal specialization weight by weight over `Q`.
///
/// At weight `w` the unknowns are the weight-`w` generators and parameters
/// outside `kept`; they enter the weight-`w` constraints (associativity
/// defect and level relation) linearly with constant coefficients. The
/// linear system is solved exactly; leftover constraints must reduce to zero
/// modulo the rules or equal a multiple of a declared relation.
pub fn solve_universal(spec: &LevelSpec, setup: &SolveSetup, order: u32) -> Result<SolvedSpecialization> {
    if order < 1 {
        return Err(Error::Usage("solve order must be at least 1".into()));
    }
    let params = spec.parameters();
    let reg = solver_registry(order, &params)?;
    for k in &setup.kept {
        reg.require(k)?;
    }
    let mut ctx = Context { reg: reg.clone(), rules: Vec::new(), relations: Vec::new() };
    for (v, p, rhs) in &setup.rules {
        ctx.rules.push(Rule::power(&reg, v, *p, Polynomial::parse(&reg, rhs)?)?);
    }
    for r in &setup.relations {
        ctx.relations.push(Polynomial::parse(&reg, r)?);
    }
    let mut bindings: BTreeMap<String, Polynomial<Rat>> = BTreeMap::new();
    for (k, v) in &setup.seeds {
        reg.require(k)?;
        bindings.insert(k.clone(), Polynomial::parse(&reg, v)?);
    }
    let z_relations: Vec<Polynomial<Rat>> = if spec.mode == LevelMode::Specialization {
        specialization_relations(spec.n, &reg)?
    } else {
        Vec::new()
    };

    for w in 1..=order {
        let unknowns: Vec<usize> = (0..reg.len())
            .filter(|&i| {
                let v = &reg.vars()[i];
                v.weight == w && !setup.kept.contains(&v.name) && !bindings.contains_key(&v.name)
            })
            .collect();
        let mut constraints: Vec<Polynomial<Rat>> = Vec::new();
        let (a, b) = ctx.ab(&bindings, w)?;
        if w >= 2 {
            let fgl = buchstaber_fgl(&a, &b, w + 1)?;
            for (e, c) in fgl.assoc_defect(w + 1)? {
                if e.degree() == w + 1 {
                    constraints.push(ctx.substitute(&c, &bindings)?);
                }
            }
        }
        match spec.mode {
            LevelMode::Specialization => {
                for r in &z_relations {
                    if r.weight() == Some(w) {
                        constraints.push(ctx.substitute(r, &bindings)?);
                    }
                }
            }
            _ => {
                for (k, c) in level_relation(spec, &a, &b, w)? {
                    if k == w {
                        constraints.push(ctx.substitute(&c, &bindings)?);
                    }
                }
            }
        }
        let solved = solve_linear(&ctx, w, &unknowns, &constraints)?;
        for (name, value) in solved {
            bindings.insert(name, value);
        }
    }

    let (a, b) = ctx.ab(&bindings, order)?;
    let fgl = buchstaber_fgl(&a, &b, order + 1)?;
    let reduced = fgl.series().map_coeffs(&reg, |p| ctx.reduce(p))?;
    let fgl = FormalGroupLaw::from_series(reduced, Provenance::SolvedLevel(spec.n))?;
    Ok(SolvedSpecialization {
        spec: *spec,
        order,
        kept: setup.kept.clone(),
        bindings,
        rules: ctx.rules,
        relations: ctx.relations,
        a,
        b,
        fgl,
    })
}

/// Gaussian elimination over `Q` with polynomial right-hand sides.
fn solve_linear(
    ctx: &Context,
    weight: u32,
    unknowns: &[usize],
    constraints: &[Polynomial<Rat>],
) -> Result<Vec<(String, Polynomial<Rat>)>> {
    let reg = &ctx.reg;
    let nu = unknowns.len();
    // rows: coefficients on unknowns, remainder polynomial
    let mut rows: Vec<(Vec<Rat>, Polynomial<Rat>)> = Vec::new();
    for c in constraints {
        let mut coefs = vec![Rat::zero(); nu];
        let mut rest = Polynomial::zero(reg);
        for (m, x) in c.terms() {
            let hit = unknowns.iter().position(|&u| m.exponent(u) > 0);
            match hit {
                Some(j) if m.degree() == 1 => coefs[j] = x.clone(),
                Some(j) => {
                    return Err(Error::Internal(format!(
                        "unknown {} enters nonlinearly at weight {weight}",
                        reg.name(unknowns[j])
                    )))
                }
                None => rest.add_term(m.clone(), x.clone()),
            }
        }
        rows.push((coefs, rest));
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..nu {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r].0[col].inverse().expect("nonzero pivot");
        let (coefs, rest) = rows[r].clone();
        let coefs: Vec<Rat> = coefs.iter().map(|x| x.mul_ref(&inv)).collect();
        let rest = rest.scale(&inv);
        for i in 0..rows.len() {
            if i != r && !rows[i].0[col].is_zero() {
                let f = rows[i].0[col].clone();
                for j in 0..nu {
                    let d = coefs[j].mul_ref(&f);
                    rows[i].0[j].sub_assign_ref(&d);
                }
                rows[i].1 -= &rest.scale(&f);
            }
        }
        rows[r] = (coefs, rest);
        pivots.push((r, col));
        r += 1;
    }
    if pivots.len() < nu {
        let free: Vec<String> = (0..nu)
            .filter(|c| !pivots.iter().any(|(_, pc)| pc == c))
            .map(|c| reg.name(unknowns[c]).to_string())
            .collect();
        return Err(Error::Underdetermined { weight, unknowns: free });
    }
    for (coefs, rest) in rows.iter().skip(r) {
        debug_assert!(coefs.iter().all(Coeff::is_zero));
        if !ctx.is_admissible(rest)? {
            return Err(Error::Inconsistent { weight, residual: ctx.reduce(rest)?.to_string() });
        }
    }
    let mut out = Vec::new();
    for (row, col) in pivots {
        let value = ctx.reduce(&-&rows[row].1)?;
        out.push((reg.name(unknowns[col]).to_string(), value));
    }
    Ok(out)
}

impl SolvedSpecialization {
    pub fn registry(&self) -> &Arc<VarRegistry> {
        self.fgl.registry()
    }

    fn context(&self) -> Context {
        Context { reg: self.registry().clone(), rules: self.rules.clone(), relations: self.relations.clone() }
    }

    /// First associativity defect coefficient that does not reduce away.
    pub fn residual_defect(&self) -> Result<Option<(Exp, Polynomial<Rat>)>> {
        let ctx = self.context();
        for (e, c) in self.fgl.assoc_defect(self.fgl.order())? {
            if !ctx.is_admissible(&c)? {
                return Ok(Some((e, ctx.reduce(&c)?)));
            }
        }
        Ok(None)
    }

    /// First coefficient of the level relation `target` (with the solved
    /// parameters substituted) that does not reduce to zero through `u^order`.
    pub fn residual_level_relation(&self, target: &LevelSpec, order: u32) -> Result<Option<(u32, Polynomial<Rat>)>> {
        let ctx = self.context();
        let rels = if target.mode == LevelMode::Specialization {
            let reg = self.registry();
            let mut out = Vec::new();
            for r in specialization_relations::<Rat>(target.n, reg)? {
                out.push((r.weight().unwrap_or(0), r));
            }
            out
        } else {
            level_relation(target, &self.a, &self.b, order.min(self.order))?
        };
        for (k, c) in rels {
            let c = ctx.substitute(&c, &self.bindings)?;
            if !ctx.is_admissible(&c)? {
                return Ok(Some((k, c)));
            }
        }
        Ok(None)
    }

    pub fn binding(&self, name: &str) -> Option<&Polynomial<Rat>> {
        self.bindings.get(name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "level": self.spec.n,
            "mode": self.spec.mode.to_string(),
            "order": self.order,
            "kept": self.kept,
            "bindings": self.bindings.iter().map(|(k, v)| (k.clone(), v.to_string())).collect::<BTreeMap<_, _>>(),
            "rules": self.rules.iter().map(|r| format!("{} -> {}", r.lead.render(self.registry()), r.replacement)).collect::<Vec<_>>(),
            "relations": self.relations.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Parametrization of the level-5 and level-6 specializations by `b1` on
/// the curve cut out by the `b1` rule. Bindings are for the kept generators
/// of the specialization solve and for the form parameters.
pub fn parameter_certificate(n: u8) -> Result<(Vec<(&'static str, &'static str)>, &'static str)> {
    match n {
        5 => Ok((
            vec![
                ("A3", "(2*b1^3 - 13*A1*b1^2 + 24*A1^2*b1 - 14*A1^3 + A1*B2)/2"),
                ("b2", "4*A1 - 2*b1"),
                ("a1", "-3*A1^2 + 4*A1*b1 + 3/2*B2 - 3/2*b1^2"),
            ],
            LEVEL5_B1_RULE,
        )),
        6 => Ok((
            vec![
                ("A3", "-5/3*A1^3 + 5/2*A1^2*b1 + 1/3*A1*B2 - A1*b1^2"),
                (
                    "B4",
                    "-5/24*A1^4 + 65/12*A1^3*b1 - 7/8*A1^2*B2 - 479/48*A1^2*b1^2 + 5/6*A1*B2*b1 + 25/4*A1*b1^3 - 1/6*B2^2 - 1/3*B2*b1^2 - 5/4*b1^4",
                ),
                ("b2", "5/2*A1 - b1"),
                ("a2", "35/12*A1^2 - 5*A1*b1 + 4/3*B2 + 2*b1^2"),
                ("a1", LEVEL6_A1_SEED),
            ],
            LEVEL6_B1_RULE,
        )),
        _ => Err(Error::Usage(format!("no parameter certificate for level {n}"))),
    }
}

/// Outcome of pushing a specialization solve through the parameter certificate.
#[derive(Debug, Clone)]
pub struct FormCertificate {
    pub level: u8,
    pub order: u32,
    /// First form coefficient left nonzero after reduction, if any.
    pub form_residual: Option<(u32, String)>,
    /// First `J_N` generator left nonzero after reduction, if any.
    pub relation_residual: Option<String>,
}

/// Check that the level-`n` specialization (`n` = 5 or 6) satisfies the
/// form relation with parameters from [`parameter_certificate`].
pub fn certify_form_from_specialization(n: u8, order: u32) -> Result<FormCertificate> {
    let zspec = LevelSpec::new(n, LevelMode::Specialization)?;
    let solved = solve_universal(&zspec, &default_setup(&zspec), order)?;
    let fspec = LevelSpec::new(n, LevelMode::Form)?;
    let reg = solver_registry(order, &fspec.parameters())?;
    let (cert, rule) = parameter_certificate(n)?;
    let rule = Rule::power(&reg, "b1", 2, Polynomial::parse(&reg, rule)?)?;
    let rules = std::slice::from_ref(&rule);
    let mut map: BTreeMap<String, Polynomial<Rat>> = BTreeMap::new();
    for (k, v) in &cert {
        map.insert(k.to_string(), Polynomial::parse(&reg, v)?);
    }
    let lift = |p: &Polynomial<Rat>| -> Result<Polynomial<Rat>> {
        p.embed(&reg)?.substitute(&map, &reg, false)?.reduce_mod(rules, DEFAULT_REWRITE_LIMIT)
    };
    let a = solved.a.map_coeffs(&reg, lift)?;
    let b = solved.b.map_coeffs(&reg, lift)?;
    let mut form_residual = None;
    for (k, c) in level_relation(&fspec, &a, &b, order)? {
        let c = c.substitute(&map, &reg, false)?.reduce_mod(rules, DEFAULT_REWRITE_LIMIT)?;
        if !c.is_zero() {
            form_residual = Some((k, c.to_string()));
            break;
        }
    }
    let mut relation_residual = None;
    let zreg = solved.registry();
    for r in specialization_relations::<Rat>(n, zreg)? {
        let c = lift(&r.substitute(&solved.bindings, zreg, false)?)?;
        if !c.is_zero() {
            relation_residual = Some(c.to_string());
            break;
        }
    }
    Ok(FormCertificate { level: n, order, form_residual, relation_residual })
}

/// Tate specialization of level 2 or 3 set against the Buchstaber form.
#[derive(Debug, Clone)]
pub struct TateSpecialization {
    pub level: u8,
    pub order: u32,
    /// Parameter bindings applied to the Tate law.
    pub mu_bindings: Vec<(String, String)>,
    pub tate: FormalGroupLaw<Rat>,
    pub buchstaber: FormalGroupLaw<Rat>,
    pub a: Series<Rat>,
    pub b: Series<Rat>,
    /// First coefficient where the two laws differ.
    pub difference: Option<(Exp, Polynomial<Rat>)>,
    /// First violated coefficient of the lemma's series identity, as read
    /// off the Tate law itself.
    pub identity_residual: Option<(u32, Polynomial<Rat>)>,
    /// First violated coefficient of the form relation.
    pub form_residual: Option<(u32, Polynomial<Rat>)>,
}

impl TateSpecialization {
    pub fn holds(&self) -> bool {
        self.difference.is_none() && self.identity_residual.is_none() && self.form_residual.is_none()
    }
}

/// `B_k = [u v^k] (u^2 - v^2) / F` recovers `B` from a law of level-2 form.
fn b_from_level2_law(f: &FormalGroupLaw<Rat>) -> Result<Series<Rat>> {
    let reg = f.registry();
    let o = f.order();
    let vars = ["u", "v"];
    let u = Series::var(&vars, reg, 0, o)?;
    let v = Series::var(&vars, reg, 1, o)?;
    let num = u.mul(&u)?.sub(&v.mul(&v)?)?;
    let g = num.divide_exact(f.series())?;
    let mut coeffs = vec![Polynomial::one(reg)];
    for k in 1..o {
        coeffs.push(if k == 1 { Polynomial::zero(reg) } else { g.coeff(Exp::bi(1, k)) });
    }
    Series::univariate("u", reg, coeffs, o.saturating_sub(2))
}

/// Tate law under the level-2 (`mu1 = mu3 = mu6 = 0`) or level-3
/// (`mu2 = -mu1^2`, `mu4 = -mu1 mu3`, `3 mu6 = -mu3^2`) bindings, compared with
/// the Buchstaber law built from the lemma's `A`, `B`.
pub fn tate_specialization(level: u8, order: u32) -> Result<TateSpecialization> {
    let pairs: &[(&str, &str)] = match level {
        2 => &TATE_LEVEL2_BINDINGS,
        3 => &TATE_LEVEL3_BINDINGS,
        _ => return Err(Error::Usage(format!("Tate specializations exist for levels 2 and 3, not {level}"))),
    };
    tate_specialization_with(level, pairs, order)
}

/// Printed level-2 bindings of the Tate parameters.
pub const TATE_LEVEL2_BINDINGS: [(&str, &str); 3] = [("mu1", "0"), ("mu3", "0"), ("mu6", "0")];
/// Level-3 bindings of the Tate parameters. With `A = 1 - mu1 u - mu3 s(u)`
/// the sign `mu4 = -mu1 mu3` is forced by the `u s(u)` term of the
/// invariant differential.
pub const TATE_LEVEL3_BINDINGS: [(&str, &str); 3] = [("mu2", "-mu1^2"), ("mu4", "-mu1*mu3"), ("mu6", "-1/3*mu3^2")];

/// [`tate_specialization`] under arbitrary parameter bindings.
pub fn tate_specialization_with(level: u8, pairs: &[(&str, &str)], order: u32) -> Result<TateSpecialization> {
    if !(2..=3).contains(&level) {
        return Err(Error::Usage(format!("Tate specializations exist for levels 2 and 3, not {level}")));
    }
    let reg = crate::fgl::mu_registry();
    let generic = CurveParams::<Rat>::generic(&reg)?;
    let mut bind = BTreeMap::new();
    for (k, v) in pairs {
        bind.insert(k.to_string(), Polynomial::parse(&reg, v)?);
    }
    let mu = generic.specialize(&bind)?;
    let tate = tate_fgl(&mu, order)?;
    let one = Series::one(&["u"], &reg, order)?;
    let u = Series::var(&["u"], &reg, 0, order)?;
    let (a, b, identity_residual, form) = if level == 2 {
        // B^2 = (1 - mu2 u^2)^2 - 4 mu4 u^4
        let mu2 = mu.mu2.clone();
        let mu4 = mu.mu4.clone();
        let u2 = u.mul(&u)?;
        let base = one.sub(&u2.scale(&mu2))?;
        let rhs = base.mul(&base)?.sub(&u2.mul(&u2)?.scale(&mu4).scale_int(4))?;
        let b = rhs.sqrt()?;
        let read = b_from_level2_law(&tate)?;
        let diff = read.mul(&read)?.sub(&rhs.truncate(read.order()))?;
        let resid = diff.terms().next().map(|(e, c)| (e.0[0] as u32, c.clone()));
        (one.clone(), b, resid, LevelSpec::new(2, LevelMode::Form)?)
    } else {
        // A = 1 - mu1 u - mu3 s(u), B = A^2 - 2 A1 u
        let s = tate_s(&mu, order.max(3))?.truncate(order);
        let a = one.sub(&u.scale(&mu.mu1))?.sub(&s.scale(&mu.mu3))?;
        let a1 = a.coeff_uni(1);
        let b = a.mul(&a)?.sub(&u.scale(&a1).scale_int(2))?;
        // the law's invariant differential must equal B(u) + A1 u
        let omega = tate.invariant_diff()?;
        let expected = b.add(&u.scale(&a1))?.truncate(omega.order());
        let resid = omega.sub(&expected)?.terms().next().map(|(e, c)| (e.0[0] as u32, c.clone()));
        (a, b, resid, LevelSpec::new(3, LevelMode::Form)?)
    };
    let buch = buchstaber_fgl(&a, &b, order)?;
    let difference = tate.series().first_difference(buch.series(), order)?;
    let form_residual = level_relation(&form, &a, &b, order.saturating_sub(1))?.into_iter().next();
    Ok(TateSpecialization {
        level,
        order,
        mu_bindings: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        tate,
        buchstaber: buch,
        a,
        b,
        difference,
        identity_residual,
        form_residual,
    })
}

/// `B` from the form relation of level 4 by a square root:
/// `2 B + 3 A1 u = sqrt(A^2 (4 A - (3 A1^2 - 8 B2) u^2))`.
pub fn level4_b_from_a(a: &Series<Rat>, b2: &Polynomial<Rat>) -> Result<Series<Rat>> {
    let reg = a.registry().clone();
    let o = a.order();
    let a1 = a.coeff_uni(1);
    let k = &(&Polynomial::from_i64(&reg, 3) * &(&a1 * &a1)) - &(&Polynomial::from_i64(&reg, 8) * b2);
    let mut inner = a.scale_int(4);
    inner.add_term(Exp::uni(2), -&k);
    let rhs = a.mul(a)?.mul(&inner)?;
    let quarter = Polynomial::constant(&reg, Rat::new(1.into(), 4.into()));
    let root = rhs.scale(&quarter).sqrt()?;
    let mut b = root;
    b.add_term(Exp::uni(1), a1.scale(&Rat::new((-3).into(), 2.into())));
    Ok(b.truncate(o))
}

/// Level-2 exponential: the Tate law with `mu1 = mu3 = mu6 = 0`.
pub fn level2_exponential(order: u32) -> Result<Series<Rat>> {
    Ok(tate_specialization(2, order + 1)?.tate.exp()?.truncate(order))
}

/// Level-3 exponential: the Tate law with the level-3 bindings.
pub fn level3_exponential(order: u32) -> Result<Series<Rat>> {
    Ok(tate_specialization(3, order + 1)?.tate.exp()?.truncate(order))
}

/// ℤ-form of a relation list for presentations, when the coefficients are integral.
pub fn integral(p: &Polynomial<Rat>) -> Result<Polynomial<Int>> {
    p.convert().ok_or_else(|| Error::NonIntegral(p.to_string()))
}

/// `lead` as a monomial over `reg`.
pub fn var_power(reg: &Arc<VarRegistry>, var: &str, power: u8) -> Result<Monomial> {
    let i = reg.require(var)?;
    let mut exps = vec![0u8; reg.len()];
    exps[i] = power;
    Ok(Monomial::from_exponents(&exps))
}
