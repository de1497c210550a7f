//! Graded presentations of coefficient rings, the elements `e_n`, and the
//! abelian groups in each weight: indecomposables `I/I^2` and full pieces.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    binomial_gcd, class_order, extended_gcd_list, inner_binomials, smith_normal_form_with, Coeff, ElementOrder, Int,
    RowEchelon,
};
use crate::error::{Error, Result};
use crate::fgl::{buchstaber_fgl, generic_ab, FormalGroupLaw};
use crate::levels::{level_relation, specialization_relations, LevelMode, LevelSpec};
use crate::polyring::{monomial_basis, Monomial, Polynomial, Var, VarRegistry};
use crate::series::Series;

/// Default cap on the number of monomials in a full graded piece.
pub const DEFAULT_MONOMIAL_GUARD: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Buchstaber law with generic `A`, `B`.
    RB,
    /// `A = 1`.
    R2,
    /// `B = A^2 - 2 A1 u`.
    R3,
    /// Generic `A`, `B` subject to the level-4 form relation.
    R4,
    /// Generic `A`, `B` modulo the level-`N` specialization relations.
    RBModJ(u8),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::RB => f.write_str("RB"),
            Family::R2 => f.write_str("R2"),
            Family::R3 => f.write_str("R3"),
            Family::R4 => f.write_str("R4"),
            Family::RBModJ(n) => write!(f, "RB/J{n}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase().replace(['_', ' '], "");
        let j = t.strip_prefix("RB/J").or_else(|| t.strip_prefix("RBMODJ")).or_else(|| t.strip_prefix("RBJ"));
        match (t.as_str(), j) {
            (_, Some(n)) => match n.parse::<u8>() {
                Ok(n) if (2..=6).contains(&n) => Ok(Family::RBModJ(n)),
                _ => Err(Error::Usage(format!("unsupported family `{s}`"))),
            },
            ("RB", _) => Ok(Family::RB),
            ("R2", _) => Ok(Family::R2),
            ("R3", _) => Ok(Family::R3),
            ("R4", _) => Ok(Family::R4),
            _ => Err(Error::Usage(format!("unsupported family `{s}`"))),
        }
    }
}

impl Serialize for FamilyName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for FamilyName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map(FamilyName).map_err(serde::de::Error::custom)
    }
}

/// Family as its display string in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyName(pub Family);

impl Family {
    /// Generators through weight `w` (at least through weight 4 for the
    /// specialization quotients, whose relations name `A1, B2, A3, B4`).
    pub fn generators(&self, w: u32) -> Vec<(String, u32)> {
        match self {
            Family::R2 => (2..=w.max(2)).map(|k| (format!("B{k}"), k)).collect(),
            Family::R3 => (1..=w.max(1)).filter(|&k| k != 2).map(|k| (format!("A{k}"), k)).collect(),
            Family::RBModJ(_) => crate::polyring::buchstaber_generators(w.max(4)),
            _ => crate::polyring::buchstaber_generators(w.max(1)),
        }
    }

    /// The family's `A`, `B` over `reg` through `order`.
    pub fn ab<C: Coeff>(&self, reg: &Arc<VarRegistry>, order: u32) -> Result<(Series<C>, Series<C>)> {
        let (a, b) = generic_ab::<C>(reg, order)?;
        match self {
            Family::R3 => {
                let u = Series::var(&["u"], reg, 0, order)?;
                let a1 = a.coeff_uni(1);
                let b = a.mul(&a)?.sub(&u.scale(&a1).scale_int(2))?;
                Ok((a, b))
            }
            _ => Ok((a, b)),
        }
    }

    /// The family's law over `reg` through `order`.
    pub fn fgl<C: Coeff>(&self, reg: &Arc<VarRegistry>, order: u32) -> Result<FormalGroupLaw<C>> {
        let (a, b) = self.ab::<C>(reg, order)?;
        buchstaber_fgl(&a, &b, order)
    }

    /// Relations beyond associativity, with weights, through weight `w`.
    fn extra_relations(&self, reg: &Arc<VarRegistry>, w: u32) -> Result<Vec<(u32, Polynomial<Int>)>> {
        match self {
            Family::R4 => {
                let (a, b) = self.ab::<Int>(reg, w)?;
                let spec = LevelSpec::new(4, LevelMode::Form)?;
                level_relation(&spec, &a, &b, w)
            }
            Family::RBModJ(n) => Ok(specialization_relations::<Int>(*n, reg)?
                .into_iter()
                .filter_map(|p| p.weight().filter(|&k| k <= w).map(|k| (k, p)))
                .collect()),
            _ => Ok(Vec::new()),
        }
    }
}

/// Generators with weights and homogeneous relations complete through a
/// weight cutoff.
#[derive(Debug, Clone)]
pub struct GradedPresentation {
    pub family: Family,
    pub cutoff: u32,
    registry: Arc<VarRegistry>,
    /// `(weight, relation)`; over a degree-1 capped registry when `linear`.
    pub relations: Vec<(u32, Polynomial<Int>)>,
    /// Only linear parts were computed; full pieces are unavailable.
    pub linear: bool,
}

/// Serialized presentation, used for fixtures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationJson {
    pub family: FamilyName,
    pub cutoff: u32,
    pub linear: bool,
    pub vars: Vec<Var>,
    /// Relations as expressions in `vars`.
    pub relations: Vec<String>,
}

impl GradedPresentation {
    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.registry
    }

    pub fn relations_of_weight(&self, w: u32) -> impl Iterator<Item = &Polynomial<Int>> {
        self.relations.iter().filter(move |(k, _)| *k == w).map(|(_, p)| p)
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            family: FamilyName(self.family),
            cutoff: self.cutoff,
            linear: self.linear,
            vars: self.registry.vars().to_vec(),
            relations: {
                let mut seen = std::collections::BTreeSet::new();
                self.relations.iter().map(|(_, p)| p.to_string()).filter(|r| seen.insert(r.clone())).collect()
            },
        }
    }

    pub fn from_json(json: &PresentationJson) -> Result<Self> {
        let vars = json.vars.iter().map(|v| (v.name.clone(), v.weight));
        let registry =
            if json.linear { VarRegistry::with_degree_cap(vars, 1)? } else { VarRegistry::new(vars)? };
        let mut relations = Vec::new();
        for r in &json.relations {
            let p = Polynomial::<Int>::parse(&registry, r)?;
            if p.is_zero() {
                continue;
            }
            let w = p.weight().ok_or_else(|| Error::Usage(format!("relation `{p}` is not homogeneous")))?;
            relations.push((w, p));
        }
        Ok(GradedPresentation { family: json.family.0, cutoff: json.cutoff, registry, relations, linear: json.linear })
    }
}

fn presentation(family: Family, cutoff: u32, linear: bool) -> Result<GradedPresentation> {
    if cutoff < 1 {
        return Err(Error::Usage("weight cutoff must be at least 1".into()));
    }
    let gens = family.generators(cutoff);
    let registry = if linear { VarRegistry::with_degree_cap(gens, 1)? } else { VarRegistry::new(gens)? };
    let mut relations = Vec::new();
    let fgl = family.fgl::<Int>(&registry, cutoff + 1)?;
    for (e, c) in fgl.assoc_defect(cutoff + 1)? {
        if !c.is_zero() {
            relations.push((e.degree() - 1, c));
        }
    }
    relations.extend(family.extra_relations(&registry, cutoff)?);
    relations.retain(|(w, p)| *w <= cutoff && !p.is_zero());
    relations.sort_by_key(|a| a.0);
    Ok(GradedPresentation { family, cutoff, registry, relations, linear })
}

/// Presentation with full relations (associativity defect coefficients and
/// the family's extra relations) through weight `cutoff`.
pub fn build_presentation(family: Family, cutoff: u32) -> Result<GradedPresentation> {
    presentation(family, cutoff, false)
}

/// Same relations computed modulo decomposables, which is all `rho` needs.
pub fn build_linear_presentation(family: Family, cutoff: u32) -> Result<GradedPresentation> {
    presentation(family, cutoff, true)
}

/// The deterministic Bezout vector behind `e_n`.
pub fn e_lambda(n: u32) -> Result<(Int, Vec<Int>)> {
    if n < 1 {
        return Err(Error::Usage("e_n needs n >= 1".into()));
    }
    extended_gcd_list(&inner_binomials(n as u64 + 1))
}

/// `e_n = sum_i lambda_i a_{i, n+1-i}`, with the default `lambda` or a given one.
pub fn e_element<C: Coeff>(fgl: &FormalGroupLaw<C>, n: u32, lambda: Option<&[Int]>) -> Result<Polynomial<C>> {
    if n < 1 {
        return Err(Error::Usage("e_n needs n >= 1".into()));
    }
    if fgl.order() < n + 1 {
        return Err(Error::OrderTooSmall { requested: n + 1, available: fgl.order() });
    }
    let lambda = match lambda {
        Some(l) => {
            let binoms = inner_binomials(n as u64 + 1);
            let d = binomial_gcd(n as u64 + 1)?.d;
            if l.len() != binoms.len() || l.iter().zip(&binoms).map(|(a, b)| a * b).sum::<Int>() != d {
                return Err(Error::Usage(format!("lambda does not realize d({}) = {d}", n + 1)));
            }
            l.to_vec()
        }
        None => e_lambda(n)?.1,
    };
    let reg = fgl.registry();
    let mut out = Polynomial::zero(reg);
    for (i, l) in (1..=n).zip(&lambda) {
        if !Coeff::is_zero(l) {
            out += &fgl.coeff(i, n + 1 - i).scale(&C::from_int(l));
        }
    }
    Ok(out)
}

/// A distinguished element and the order of its class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub label: String,
    pub element: String,
    pub order: String,
}

/// A cyclic torsion summand and a representative of its generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionClass {
    pub order: String,
    pub representative: String,
}

/// Free rank and invariant factors of one weight of a graded group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroupReport {
    pub weight: u32,
    pub kind: String,
    pub basis: Vec<String>,
    pub relations: usize,
    pub free_rank: usize,
    pub invariant_factors: Vec<String>,
    pub torsion: Vec<TorsionClass>,
    pub classes: Vec<ClassReport>,
}

/// Quotient `Z^basis / rows` with its SNF, ready for class queries.
#[derive(Debug, Clone)]
pub struct GradedGroup {
    pub weight: u32,
    registry: Arc<VarRegistry>,
    basis: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    relations: usize,
    snf: crate::algebra::SnfResult,
    linear: bool,
}

impl GradedGroup {
    fn new(
        weight: u32,
        registry: &Arc<VarRegistry>,
        basis: Vec<Monomial>,
        rows: impl IntoIterator<Item = Polynomial<Int>>,
        linear: bool,
    ) -> Result<Self> {
        let index: BTreeMap<Monomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut echelon = RowEchelon::new(basis.len());
        let mut count = 0;
        for p in rows {
            count += 1;
            let mut row = vec![Int::zero(); basis.len()];
            for (m, c) in p.terms() {
                let j = index.get(m).ok_or_else(|| {
                    Error::Internal(format!("monomial {} outside the weight-{weight} basis", m.render(registry)))
                })?;
                row[*j] = c.clone();
            }
            echelon.insert(row)?;
        }
        let snf = smith_normal_form_with(&echelon.into_matrix(), false);
        Ok(GradedGroup { weight, registry: registry.clone(), basis, index, relations: count, snf, linear })
    }

    fn coordinates(&self, p: &Polynomial<Int>) -> Result<Vec<Int>> {
        let p = p.embed(&self.registry)?;
        let mut x = vec![Int::zero(); self.basis.len()];
        for (m, c) in p.terms() {
            match self.index.get(m) {
                Some(&j) => x[j] = c.clone(),
                None if self.linear && m.degree() != 1 => {}
                None => {
                    return Err(Error::Usage(format!(
                        "{} is not in the weight-{} basis",
                        m.render(&self.registry),
                        self.weight
                    )))
                }
            }
        }
        Ok(x)
    }

    /// Order of the class of `p` (its linear part, for indecomposables).
    pub fn order_of(&self, p: &Polynomial<Int>) -> Result<ElementOrder> {
        Ok(class_order(&self.snf, &self.coordinates(p)?))
    }

    pub fn free_rank(&self) -> usize {
        self.basis.len() - self.snf.rank()
    }

    pub fn invariant_factors(&self) -> Vec<Int> {
        self.snf.torsion()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// Generators of the torsion summands as polynomials over the basis.
    pub fn torsion_classes(&self) -> Vec<(Int, Polynomial<Int>)> {
        let vinv = &self.snf.right_inverse;
        let mut out = Vec::new();
        for (j, d) in self.snf.diagonal.iter().enumerate() {
            if d > &Int::one() {
                let mut p = Polynomial::zero(&self.registry);
                for (i, m) in self.basis.iter().enumerate() {
                    let c = &vinv[(j, i)];
                    if !Coeff::is_zero(c) {
                        p.add_term(m.clone(), c.clone());
                    }
                }
                out.push((d.clone(), p));
            }
        }
        out
    }

    pub fn report(&self, classes: &[(String, Polynomial<Int>)]) -> Result<AbelianGroupReport> {
        let mut cls = Vec::new();
        for (label, p) in classes {
            cls.push(ClassReport { label: label.clone(), element: p.to_string(), order: self.order_of(p)?.to_string() });
        }
        Ok(AbelianGroupReport {
            weight: self.weight,
            kind: if self.linear { "indecomposable" } else { "graded" }.into(),
            basis: self.basis.iter().map(|m| m.render(&self.registry)).collect(),
            relations: self.relations,
            free_rank: self.free_rank(),
            invariant_factors: self.invariant_factors().iter().map(|d| d.to_string()).collect(),
            torsion: self
                .torsion_classes()
                .into_iter()
                .map(|(d, p)| TorsionClass { order: d.to_string(), representative: p.to_string() })
                .collect(),
            classes: cls,
        })
    }
}

fn check_weight(pres: &GradedPresentation, w: u32) -> Result<()> {
    if w < 1 || w > pres.cutoff {
        return Err(Error::Usage(format!("weight {w} outside 1..={} of the presentation", pres.cutoff)));
    }
    Ok(())
}

/// `Q_w`: weight-`w` generators modulo linear parts of weight-`w` relations.
pub fn indecomposable_piece(pres: &GradedPresentation, w: u32) -> Result<GradedGroup> {
    check_weight(pres, w)?;
    let reg = &pres.registry;
    let gens: Vec<usize> = (0..reg.len()).filter(|&i| reg.weight(i) == w).collect();
    let basis: Vec<Monomial> = gens.iter().map(|&i| Monomial::var(reg.len(), i)).collect();
    let rows: Vec<Polynomial<Int>> = pres.relations_of_weight(w).map(|p| p.linear_part(&gens)).collect();
    GradedGroup::new(w, reg, basis, rows, true)
}

/// Full weight-`w` piece: all monomials of weight `w` modulo all monomial
/// multiples of relations landing in weight `w`.
pub fn graded_piece(pres: &GradedPresentation, w: u32, guard: usize) -> Result<GradedGroup> {
    check_weight(pres, w)?;
    if pres.linear {
        return Err(Error::Usage("full graded pieces need a presentation with full relations".into()));
    }
    let reg = &pres.registry;
    let basis = monomial_basis(reg, w, None);
    if basis.len() > guard {
        return Err(Error::Guard(format!("weight {w} has {} monomials, guard is {guard}", basis.len())));
    }
    let mut multipliers: BTreeMap<u32, Vec<Monomial>> = BTreeMap::new();
    let mut rows = Vec::new();
    for (rw, r) in &pres.relations {
        if *rw > w {
            continue;
        }
        let ms = multipliers.entry(w - rw).or_insert_with(|| monomial_basis(reg, w - rw, None));
        for m in ms.iter() {
            rows.push(r * &Polynomial::monomial(reg, m.clone(), Int::one()));
        }
    }
    GradedGroup::new(w, reg, basis, rows, false)
}

/// `rho(n)` for `n = 1..=max_n`: order of the class of `e_n` in `Q_n`.
pub fn rho_table(pres: &GradedPresentation, max_n: u32) -> Result<Vec<(u32, ElementOrder)>> {
    if max_n > pres.cutoff {
        return Err(Error::Usage(format!("max n {max_n} exceeds the cutoff {}", pres.cutoff)));
    }
    let capped = pres.registry.recapped(Some(1));
    let fgl = pres.family.fgl::<Int>(&capped, max_n + 1)?;
    let mut out = Vec::new();
    for n in 1..=max_n {
        let e = e_element(&fgl, n, None)?;
        out.push((n, indecomposable_piece(pres, n)?.order_of(&e)?));
    }
    Ok(out)
}

/// Single `rho(n)`.
pub fn rho(pres: &GradedPresentation, n: u32) -> Result<ElementOrder> {
    check_weight(pres, n)?;
    let capped = pres.registry.recapped(Some(1));
    let fgl = pres.family.fgl::<Int>(&capped, n + 1)?;
    let e = e_element(&fgl, n, None)?;
    indecomposable_piece(pres, n)?.order_of(&e)
}
