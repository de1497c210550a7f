//! Exact integer and rational arithmetic: coefficient domains, extended gcd
//! over integer lists, binomial gcds and Smith normal form.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

/// A coefficient domain for polynomials. Exactly two instantiations exist:
/// [`Int`] (the integers) and [`Rat`] (the rationals).
pub trait Coeff: Clone + PartialEq + Eq + Debug + Display + Send + Sync + 'static {
    /// Short name used in reports: `"ZZ"` or `"QQ"`.
    const DOMAIN: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_int(v: &Int) -> Self;
    /// `None` when the rational is not representable (non-integral for `Int`).
    fn from_rat(v: &Rat) -> Option<Self>;
    fn to_rat(&self) -> Rat;

    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn is_integral(&self) -> bool;

    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b);
        self.add_assign_ref(&p);
    }

    /// Exact quotient, or `None` if `other` is zero or does not divide `self`.
    fn div_exact(&self, other: &Self) -> Option<Self>;

    /// Multiplicative inverse when `self` is a unit of the domain.
    fn inverse(&self) -> Option<Self> {
        Self::one().div_exact(self)
    }

    /// Decimal string; rationals as `num/den` (just `num` when integral).
    fn to_coef_string(&self) -> String;
    fn parse_coef(s: &str) -> Result<Self>;
}

impl Coeff for Int {
    const DOMAIN: &'static str = "ZZ";

    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_int(v: &Int) -> Self {
        v.clone()
    }
    fn from_rat(v: &Rat) -> Option<Self> {
        v.is_integer().then(|| v.numer().clone())
    }
    fn to_rat(&self) -> Rat {
        Rat::from_integer(self.clone())
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        num_traits::One::is_one(self)
    }
    fn is_integral(&self) -> bool {
        true
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        if Coeff::is_zero(other) {
            return None;
        }
        let (q, r) = self.div_rem(other);
        Coeff::is_zero(&r).then_some(q)
    }
    fn to_coef_string(&self) -> String {
        self.to_string()
    }
    fn parse_coef(s: &str) -> Result<Self> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad integer coefficient `{s}`")))
    }
}

impl Coeff for Rat {
    const DOMAIN: &'static str = "QQ";

    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }
    fn from_int(v: &Int) -> Self {
        Rat::from_integer(v.clone())
    }
    fn from_rat(v: &Rat) -> Option<Self> {
        Some(v.clone())
    }
    fn to_rat(&self) -> Rat {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        num_traits::One::is_one(self)
    }
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        (!Coeff::is_zero(other)).then(|| self / other)
    }
    fn to_coef_string(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn parse_coef(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad rational coefficient `{s}`"));
        let s = s.trim();
        match s.split_once('/') {
            None => Ok(Rat::from_integer(s.parse::<BigInt>().map_err(|_| bad())?)),
            Some((n, d)) => {
                let n = n.trim().parse::<BigInt>().map_err(|_| bad())?;
                let d = d.trim().parse::<BigInt>().map_err(|_| bad())?;
                if Coeff::is_zero(&d) {
                    return Err(bad());
                }
                Ok(Rat::new(n, d))
            }
        }
    }
}

/// `(g, x, y)` with `g = gcd(a, b) >= 0` and `x*a + y*b = g`.
pub fn extended_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (Int::one(), Int::zero());
    let (mut old_t, mut t) = (Int::zero(), Int::one());
    while !Coeff::is_zero(&r) {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Representative of `x mod m` in the half-open window `(-m/2, m/2]`.
fn symmetric_residue(x: &Int, m: &Int) -> Int {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Bezout coefficients for a list of positive integers.
///
/// Extended Euclid runs left to right; afterwards every `lambda_i` with
/// `i >= 2` is reduced modulo `m_1 / g` into `(-m_1/2g, m_1/2g]`, with the
/// compensating multiple of `m_i / g` moved onto `lambda_1`. The choice is
/// deterministic and the identity `sum lambda_i m_i = g` is preserved.
pub fn extended_gcd_list(m: &[Int]) -> Result<(Int, Vec<Int>)> {
    if m.is_empty() {
        return Err(Error::Usage("extended_gcd_list needs a nonempty list".into()));
    }
    if let Some(bad) = m.iter().find(|x| !x.is_positive()) {
        return Err(Error::Usage(format!("extended_gcd_list entries must be positive, got {bad}")));
    }
    let mut g = m[0].clone();
    let mut lambda = vec![Int::one()];
    for mi in &m[1..] {
        let (g2, x, y) = extended_gcd(&g, mi);
        for l in lambda.iter_mut() {
            *l *= &x;
        }
        lambda.push(y);
        g = g2;
    }
    let modulus = &m[0] / &g;
    for i in 1..m.len() {
        let reduced = symmetric_residue(&lambda[i], &modulus);
        let t = (&lambda[i] - &reduced) / &modulus;
        if !Coeff::is_zero(&t) {
            lambda[i] = reduced;
            lambda[0] += &t * (&m[i] / &g);
        }
    }
    debug_assert_eq!(
        m.iter().zip(&lambda).map(|(a, b)| a * b).sum::<Int>(),
        g
    );
    Ok((g, lambda))
}

/// `C(n, k)` for `0 <= k <= n`.
pub fn binomial(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All `C(n, k)` for `k = 1..n-1`.
pub fn inner_binomials(n: u64) -> Vec<Int> {
    let mut out = Vec::with_capacity(n.saturating_sub(1) as usize);
    let mut c = Int::one();
    for k in 1..n {
        c = c * (n - k + 1) / k;
        out.push(c.clone());
    }
    out
}

/// `Some(p)` if `n = p^k` for a prime `p` and `k >= 1`.
pub fn prime_power_base(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut rest = n;
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            return (rest == 1).then_some(p);
        }
        p += 1;
    }
    Some(n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinomialGcd {
    /// gcd of `C(n+1, 1), ..., C(n+1, n)`.
    pub d: Int,
    /// `p` when `n+1 = p^k`, else 1.
    pub kummer_class: u64,
}

/// gcd of the inner binomial coefficients of `n_plus_1`, cross-checked
/// against the prime-power classification.
pub fn binomial_gcd(n_plus_1: u64) -> Result<BinomialGcd> {
    if n_plus_1 < 2 {
        return Err(Error::Usage(format!("binomial_gcd needs n+1 >= 2, got {n_plus_1}")));
    }
    let mut d = Int::zero();
    let mut c = Int::one();
    for k in 1..=n_plus_1 / 2 {
        c = c * (n_plus_1 - k + 1) / k;
        d = d.gcd(&c);
        if d.is_one() {
            break;
        }
    }
    let kummer_class = prime_power_base(n_plus_1).unwrap_or(1);
    if d != Int::from(kummer_class) {
        return Err(Error::Internal(format!(
            "binomial gcd {d} of {n_plus_1} disagrees with prime-power class {kummer_class}"
        )));
    }
    Ok(BinomialGcd { d, kummer_class })
}

/// Dense integer matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Usage("ragged matrix rows".into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Int::from(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Usage(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if Coeff::is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !Coeff::is_zero(b) {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination; square matrices only.
    pub fn determinant(&self) -> Result<Int> {
        if self.rows != self.cols {
            return Err(Error::Usage("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Int::one());
        }
        let mut a = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if Coeff::is_zero(&a[(k, k)]) {
                match (k + 1..n).find(|&i| !Coeff::is_zero(&a[(i, k)])) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(Int::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * &a[(n - 1, n - 1)])
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &Int) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * q;
            if !Coeff::is_zero(&v) {
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &Int) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * q;
            if !Coeff::is_zero(&v) {
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

/// Integer row echelon basis of a row lattice, built incrementally.
///
/// Rows are inserted one at a time; a clash on a pivot column is resolved by
/// a unimodular 2x2 combination, so the lattice spanned never changes. Pivots
/// are kept positive and entries above each pivot are reduced modulo it.
#[derive(Debug, Clone)]
pub struct RowEchelon {
    cols: usize,
    rows: std::collections::BTreeMap<usize, Vec<Int>>,
}

impl RowEchelon {
    pub fn new(cols: usize) -> Self {
        RowEchelon { cols, rows: std::collections::BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, mut x: Vec<Int>) -> Result<()> {
        if x.len() != self.cols {
            return Err(Error::Internal(format!("row of length {} in a {}-column echelon", x.len(), self.cols)));
        }
        loop {
            let Some(c) = x.iter().position(|e| !Coeff::is_zero(e)) else { return Ok(()) };
            let Some(p) = self.rows.remove(&c) else {
                if x[c].is_negative() {
                    x.iter_mut().for_each(|e| *e = -&*e);
                }
                self.rows.insert(c, x);
                return Ok(());
            };
            let (a, b) = (p[c].clone(), x[c].clone());
            let (g, s, t) = extended_gcd(&a, &b);
            let (ag, bg) = (&a / &g, &b / &g);
            let mut pivot = Vec::with_capacity(self.cols);
            let mut rest = Vec::with_capacity(self.cols);
            for (pe, xe) in p.iter().zip(&x) {
                pivot.push(&s * pe + &t * xe);
                rest.push(&ag * xe - &bg * pe);
            }
            self.rows.insert(c, pivot);
            x = rest;
        }
    }

    /// Rows in pivot order, with entries above pivots reduced.
    pub fn into_matrix(mut self) -> IntMatrix {
        let pivots: Vec<usize> = self.rows.keys().copied().collect();
        for (k, &c) in pivots.iter().enumerate().rev() {
            let prow = self.rows[&c].clone();
            for &above in &pivots[..k] {
                let row = self.rows.get_mut(&above).expect("pivot row");
                let q = row[c].div_floor(&prow[c]);
                if !Coeff::is_zero(&q) {
                    for (e, pe) in row.iter_mut().zip(&prow) {
                        *e -= &q * pe;
                    }
                }
            }
        }
        IntMatrix { rows: self.rows.len(), cols: self.cols, data: self.rows.into_values().flatten().collect() }
    }
}

/// `U * M * V = D` with `D` diagonal, `diagonal[i] | diagonal[i+1]`,
/// entries nonnegative and `U`, `V` unimodular.
#[derive(Debug, Clone)]
pub struct SnfResult {
    /// The `min(rows, cols)` diagonal entries of `D`.
    pub diagonal: Vec<Int>,
    /// Row transform `U`; absent when left tracking was disabled.
    pub left: Option<IntMatrix>,
    /// Column transform `V`.
    pub right: IntMatrix,
    /// `V^-1`; its row `j` represents the `j`-th cyclic summand of the cokernel.
    pub right_inverse: IntMatrix,
    rows: usize,
    cols: usize,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !Coeff::is_zero(*d)).count()
    }

    /// Rectangular `D` as a matrix.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.rows, self.cols);
        for (i, v) in self.diagonal.iter().enumerate() {
            d[(i, i)] = v.clone();
        }
        d
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<Int> {
        self.diagonal.iter().filter(|d| *d > &Int::one()).cloned().collect()
    }
}

/// Smith normal form with both transforms.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    smith_normal_form_with(m, true)
}

/// Smith normal form; `track_left = false` skips the (possibly large) row
/// transform, which quotient computations never need.
pub fn smith_normal_form_with(m: &IntMatrix, track_left: bool) -> SnfResult {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = track_left.then(|| IntMatrix::identity(rows));
    let mut v = IntMatrix::identity(cols);
    let mut vinv = IntMatrix::identity(cols);
    let n = rows.min(cols);

    for t in 0..n {
        // smallest nonzero |entry| in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = &a[(i, j)];
                if !Coeff::is_zero(x) && best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        if let Some(u) = u.as_mut() {
            u.swap_rows(t, pi);
        }
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        vinv.swap_rows(t, pj);

        loop {
            let pivot = a[(t, t)].clone();
            for i in t + 1..rows {
                if !Coeff::is_zero(&a[(i, t)]) {
                    let q = -a[(i, t)].div_floor(&pivot);
                    a.add_row_multiple(i, t, &q);
                    if let Some(u) = u.as_mut() {
                        u.add_row_multiple(i, t, &q);
                    }
                }
            }
            for j in t + 1..cols {
                if !Coeff::is_zero(&a[(t, j)]) {
                    let q = -a[(t, j)].div_floor(&pivot);
                    a.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                    vinv.add_row_multiple(t, j, &-&q);
                }
            }

            // leftover remainders in the pivot row/column: move the smallest in
            let mut smaller: Option<(usize, bool)> = None;
            let mut smallest = pivot.abs();
            for i in t + 1..rows {
                let x = a[(i, t)].abs();
                if !Coeff::is_zero(&x) && x < smallest {
                    smallest = x;
                    smaller = Some((i, true));
                }
            }
            for j in t + 1..cols {
                let x = a[(t, j)].abs();
                if !Coeff::is_zero(&x) && x < smallest {
                    smallest = x;
                    smaller = Some((j, false));
                }
            }
            match smaller {
                Some((i, true)) => {
                    a.swap_rows(t, i);
                    if let Some(u) = u.as_mut() {
                        u.swap_rows(t, i);
                    }
                    continue;
                }
                Some((j, false)) => {
                    a.swap_cols(t, j);
                    v.swap_cols(t, j);
                    vinv.swap_rows(t, j);
                    continue;
                }
                None => {}
            }

            // divisibility of the trailing block
            let pivot = a[(t, t)].clone();
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !Coeff::is_zero(&a[(i, j)].mod_floor(&pivot)))
            });
            match offender {
                Some(i) => {
                    let one = Int::one();
                    a.add_row_multiple(t, i, &one);
                    if let Some(u) = u.as_mut() {
                        u.add_row_multiple(t, i, &one);
                    }
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            if let Some(u) = u.as_mut() {
                u.negate_row(t);
            }
        }
    }

    SnfResult {
        diagonal: (0..n).map(|i| a[(i, i)].clone()).collect(),
        left: u,
        right: v,
        right_inverse: vinv,
        rows,
        cols,
    }
}

/// Order of an element of a finitely generated abelian group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementOrder {
    Finite(Int),
    Infinite,
}

impl ElementOrder {
    pub fn finite(v: i64) -> Self {
        ElementOrder::Finite(Int::from(v))
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            ElementOrder::Finite(v) => v.to_i64(),
            ElementOrder::Infinite => None,
        }
    }
}

impl Display for ElementOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ElementOrder::Finite(v) => write!(f, "{v}"),
            ElementOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// Order of the class of `x` in `Z^n / rowspace(M)`, given the SNF of `M`.
///
/// Rowspace(M)·V = rowspace(D), so `x` maps to `x·V` in coordinates where
/// the quotient is `⊕ Z/d_i ⊕ Z^(n - rank)`.
pub fn class_order(snf: &SnfResult, x: &[Int]) -> ElementOrder {
    let v = &snf.right;
    let n = v.rows();
    let mut order = Int::one();
    for j in 0..n {
        let mut y = Int::zero();
        for (i, xi) in x.iter().enumerate() {
            if !Coeff::is_zero(xi) {
                y += xi * &v[(i, j)];
            }
        }
        if Coeff::is_zero(&y) {
            continue;
        }
        let d = snf.diagonal.get(j).cloned().unwrap_or_else(Int::zero);
        if Coeff::is_zero(&d) {
            return ElementOrder::Infinite;
        }
        let part = &d / y.gcd(&d);
        order = order.lcm(&part);
    }
    ElementOrder::Finite(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    fn dot(a: &[Int], b: &[Int]) -> Int {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn egcd_examples() {
        let (g, l) = extended_gcd_list(&ints(&[4, 6, 4])).unwrap();
        assert_eq!(g, Int::from(2));
        assert_eq!(dot(&l, &ints(&[4, 6, 4])), Int::from(2));

        let (g, l) = extended_gcd_list(&ints(&[7])).unwrap();
        assert_eq!((g, l), (Int::from(7), ints(&[1])));

        let (g, l) = extended_gcd_list(&ints(&[6, 15, 20, 15, 6])).unwrap();
        assert_eq!(g, Int::one());
        assert_eq!(dot(&l, &ints(&[6, 15, 20, 15, 6])), Int::one());

        let (_, l) = extended_gcd_list(&ints(&[3, 3])).unwrap();
        assert_eq!(l, ints(&[1, 0]));
    }

    #[test]
    fn egcd_witness_exists_in_small_box() {
        // exhaustive oracle: some |lambda_i| <= 3 reaches gcd(4, 6, 4) = 2
        let m = [4i64, 6, 4];
        let found = (-3..=3).any(|a: i64| {
            (-3..=3).any(|b: i64| (-3..=3).any(|c: i64| a * m[0] + b * m[1] + c * m[2] == 2))
        });
        assert!(found);
    }

    #[test]
    fn egcd_rejects_bad_input() {
        assert!(extended_gcd_list(&[]).is_err());
        assert!(extended_gcd_list(&ints(&[3, 0])).is_err());
        assert!(extended_gcd_list(&ints(&[3, -2])).is_err());
    }

    #[test]
    fn binomial_gcd_examples() {
        assert_eq!(binomial_gcd(4).unwrap().d, Int::from(2));
        assert_eq!(binomial_gcd(2).unwrap().d, Int::from(2));
        assert_eq!(binomial_gcd(6).unwrap().d, Int::one());
        assert_eq!(binomial_gcd(9).unwrap().kummer_class, 3);
        assert!(binomial_gcd(1).is_err());
    }

    #[test]
    fn binomials_match_pascal() {
        for n in 2..30u64 {
            let inner = inner_binomials(n);
            for k in 1..n {
                assert_eq!(inner[(k - 1) as usize], binomial(n, k));
            }
        }
    }

    fn check_snf(m: &IntMatrix) -> SnfResult {
        let r = smith_normal_form(m);
        let u = r.left.as_ref().unwrap();
        let prod = u.mul(m).unwrap().mul(&r.right).unwrap();
        assert_eq!(prod, r.diagonal_matrix());
        assert!(u.determinant().unwrap().abs().is_one());
        assert!(r.right.determinant().unwrap().abs().is_one());
        assert_eq!(r.right.mul(&r.right_inverse).unwrap(), IntMatrix::identity(m.cols()));
        for w in r.diagonal.windows(2) {
            if !Coeff::is_zero(&w[1]) {
                assert!(Coeff::is_zero(&w[1].mod_floor(&w[0])));
            } else {
                // zeros only trail
            }
            assert!(!w[0].is_negative());
        }
        r
    }

    #[test]
    fn snf_examples() {
        let r = check_snf(&IntMatrix::identity(2));
        assert_eq!(r.diagonal, ints(&[1, 1]));

        let r = check_snf(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]).unwrap());
        assert_eq!(r.diagonal, ints(&[2, 4]));

        let r = check_snf(&IntMatrix::zeros(1, 3));
        assert_eq!(r.diagonal, ints(&[0]));
        assert_eq!(r.rank(), 0);
    }

    #[test]
    fn snf_rectangular() {
        let r = check_snf(&IntMatrix::from_i64(&[&[0, -2, 1], &[2, 4, 6], &[1, 1, 1], &[3, 3, 3]]).unwrap());
        assert_eq!(r.rank(), 3);
        let r = check_snf(&IntMatrix::from_i64(&[&[6, 10, 15]]).unwrap());
        assert_eq!(r.diagonal, ints(&[1]));
    }

    #[test]
    fn class_orders() {
        // Z^2 / <(2, 0), (0, 0)> : class of (1, 0) has order 2, (0, 1) infinite
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 0]]).unwrap();
        let r = smith_normal_form(&m);
        assert_eq!(class_order(&r, &ints(&[1, 0])), ElementOrder::finite(2));
        assert_eq!(class_order(&r, &ints(&[0, 1])), ElementOrder::Infinite);
        assert_eq!(class_order(&r, &ints(&[2, 0])), ElementOrder::finite(1));
        // Z^2 / <(-2, 1), (-12, 8)> = Z/4 generated by e1; e2 = 2 e1
        let m = IntMatrix::from_i64(&[&[-2, 1], &[-12, 8]]).unwrap();
        let r = smith_normal_form(&m);
        assert_eq!(class_order(&r, &ints(&[1, 0])), ElementOrder::finite(4));
        assert_eq!(class_order(&r, &ints(&[-1, 1])), ElementOrder::finite(4));
        assert_eq!(class_order(&r, &ints(&[0, 1])), ElementOrder::finite(2));
    }

    #[test]
    fn coefficient_strings() {
        let r = Rat::parse_coef("-6/4").unwrap();
        assert_eq!(r.to_coef_string(), "-3/2");
        assert_eq!(Rat::parse_coef("7").unwrap().to_coef_string(), "7");
        assert!(Rat::parse_coef("1/0").is_err());
        assert_eq!(Int::parse_coef("-12").unwrap(), Int::from(-12));
        assert_eq!(Int::from(7).div_exact(&Int::from(2)), None);
        assert_eq!(Int::from(-1).inverse(), Some(Int::from(-1)));
        assert_eq!(Int::from(2).inverse(), None);
    }
}
