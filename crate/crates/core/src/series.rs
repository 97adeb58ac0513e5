//! The truncated ring `Z[x^M]⟦y^Q⟧ / I^k`, scattering functions, and specializations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{dot, fmt_vec, gcd_all, LatticeVec};

/// An element `(m, q)` of `M ⊕ Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentPair {
    pub m: LatticeVec,
    pub q: Vec<u32>,
}

impl Ord for ExponentPair {
    fn cmp(&self, other: &Self) -> Ordering {
        self.q.cmp(&other.q).then_with(|| self.m.cmp(&other.m))
    }
}

impl PartialOrd for ExponentPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl ExponentPair {
    pub fn new(m: LatticeVec, q: Vec<u32>) -> Self {
        ExponentPair { m, q }
    }

    pub fn zero(d: usize, r: usize) -> Self {
        ExponentPair { m: vec![BigInt::zero(); d], q: vec![0; r] }
    }

    /// Pure x-exponent `(m, 0)`.
    pub fn from_m(m: LatticeVec, r: usize) -> Self {
        ExponentPair { m, q: vec![0; r] }
    }

    pub fn degree(&self) -> u32 {
        self.q.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.q.iter().all(|&x| x == 0) && self.m.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &ExponentPair) -> ExponentPair {
        ExponentPair {
            m: self.m.iter().zip(&o.m).map(|(a, b)| a + b).collect(),
            q: self.q.iter().zip(&o.q).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self − o`, or `None` when a y-exponent would become negative.
    pub fn checked_sub(&self, o: &ExponentPair) -> Option<ExponentPair> {
        let q = self
            .q
            .iter()
            .zip(&o.q)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u32>>>()?;
        Some(ExponentPair { m: self.m.iter().zip(&o.m).map(|(a, b)| a - b).collect(), q })
    }

    pub fn scale(&self, k: u32) -> ExponentPair {
        ExponentPair {
            m: self.m.iter().map(|a| a * BigInt::from(k)).collect(),
            q: self.q.iter().map(|a| a * k).collect(),
        }
    }

    /// `(m, q)·(w, s)`.
    pub fn pair(&self, w: &[BigRational], s: &[BigRational]) -> Result<BigRational> {
        if w.len() != self.m.len() || s.len() != self.q.len() {
            return Err(Error::Dimension { expected: self.m.len() + self.q.len(), got: w.len() + s.len() });
        }
        let mut acc = BigRational::zero();
        for (a, b) in self.m.iter().zip(w) {
            acc += b * a;
        }
        for (a, b) in self.q.iter().zip(s) {
            acc += b * BigInt::from(*a);
        }
        Ok(acc)
    }

    /// The exponent as a single integer vector `(m, q)`.
    pub fn flat(&self) -> LatticeVec {
        self.m.iter().cloned().chain(self.q.iter().map(|&x| BigInt::from(x))).collect()
    }

    /// Divides by the gcd of all entries, returning the primitive vector and the gcd.
    pub fn primitive(&self) -> Result<(ExponentPair, u32)> {
        let g = gcd_all(&self.flat());
        if g.is_zero() {
            return Err(Error::Domain("primitive part of the zero exponent".into()));
        }
        let gu: u32 = (&g).try_into().map_err(|_| Error::Domain("exponent gcd too large".into()))?;
        Ok((
            ExponentPair {
                m: self.m.iter().map(|a| a / &g).collect(),
                q: self.q.iter().map(|a| a / gu).collect(),
            },
            gu,
        ))
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{})", fmt_vec(&self.m), fmt_vec(&self.q))
    }
}

/// A sparse element of `Z[x^M]⟦y^Q⟧` reduced modulo total y-degree `≥ order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    order: u32,
    d: usize,
    r: usize,
    terms: BTreeMap<ExponentPair, BigInt>,
}

impl TruncatedSeries {
    pub fn zero(d: usize, r: usize, order: u32) -> Self {
        TruncatedSeries { order, d, r, terms: BTreeMap::new() }
    }

    pub fn one(d: usize, r: usize, order: u32) -> Self {
        Self::monomial(ExponentPair::zero(d, r), BigInt::one(), order)
    }

    pub fn monomial(e: ExponentPair, c: BigInt, order: u32) -> Self {
        let mut s = TruncatedSeries { order, d: e.m.len(), r: e.q.len(), terms: BTreeMap::new() };
        s.add_term(e, c);
        s
    }

    pub fn from_terms<I>(d: usize, r: usize, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExponentPair, BigInt)>,
    {
        let mut s = Self::zero(d, r, order);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d, self.r)
    }

    pub fn terms(&self) -> &BTreeMap<ExponentPair, BigInt> {
        &self.terms
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

    pub fn coefficient(&self, e: &ExponentPair) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&ExponentPair::zero(self.d, self.r))
    }

    /// Adds `c·z^e` in place, dropping it if `|q| ≥ order`.
    pub fn add_term(&mut self, e: ExponentPair, c: BigInt) {
        if c.is_zero() || e.degree() >= self.order {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn same_order(&self, o: &TruncatedSeries) -> Result<()> {
        if self.order != o.order {
            return Err(Error::OrderMismatch(self.order, o.order));
        }
        if (self.d, self.r) != (o.d, o.r) {
            return Err(Error::Dimension { expected: self.d + self.r, got: o.d + o.r });
        }
        Ok(())
    }

    pub fn add(&self, o: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.same_order(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.same_order(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> TruncatedSeries {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, c: &BigInt) -> TruncatedSeries {
        if c.is_zero() {
            return Self::zero(self.d, self.r, self.order);
        }
        TruncatedSeries {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            ..self.clone_empty()
        }
    }

    fn clone_empty(&self) -> TruncatedSeries {
        Self::zero(self.d, self.r, self.order)
    }

    /// Multiplies by the monomial `c·z^e`.
    pub fn mul_monomial(&self, e: &ExponentPair, c: &BigInt) -> TruncatedSeries {
        let mut out = self.clone_empty();
        for (f, x) in &self.terms {
            out.add_term(f.add(e), x * c);
        }
        out
    }

    pub fn mul(&self, o: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.same_order(o)?;
        Ok(self.mul_unchecked(o))
    }

    fn by_degree(&self) -> Vec<(u32, &ExponentPair, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (e.degree(), e, c)).collect();
        v.sort_by_key(|t| t.0);
        v
    }

    fn mul_unchecked(&self, o: &TruncatedSeries) -> TruncatedSeries {
        let a = self.by_degree();
        let b = o.by_degree();
        let mut acc: HashMap<ExponentPair, BigInt> = HashMap::new();
        for (da, ea, ca) in &a {
            for (db, eb, cb) in &b {
                if da + db >= self.order {
                    break;
                }
                *acc.entry(ea.add(eb)).or_insert_with(BigInt::zero) += *ca * *cb;
            }
        }
        TruncatedSeries {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            ..self.clone_empty()
        }
    }

    /// Reduces to a smaller order.
    pub fn truncate(&self, order: u32) -> TruncatedSeries {
        let order = order.min(self.order);
        TruncatedSeries {
            order,
            d: self.d,
            r: self.r,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() < order)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Reinterprets the series at a different order, dropping terms if lowering.
    pub fn with_order(&self, order: u32) -> TruncatedSeries {
        TruncatedSeries {
            order,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() < order)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
            ..self.clone_empty()
        }
    }

    fn is_unit(&self) -> bool {
        self.constant_term().is_one()
            && self
                .terms
                .keys()
                .all(|e| e.degree() > 0 || e.m.iter().all(Zero::is_zero))
    }

    /// Inverse of a unit in `1 + Î` by the geometric series.
    pub fn inverse(&self) -> Result<TruncatedSeries> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let one = Self::one(self.d, self.r, self.order);
        let g = self.sub(&one)?.neg();
        let mut out = one.clone();
        let mut term = one;
        for _ in 1..self.order {
            term = term.mul_unchecked(&g);
            if term.is_zero() {
                break;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// `f^e` for `f ∈ 1 + Î` and any integer `e`.
    pub fn pow_unit(&self, e: i64) -> Result<TruncatedSeries> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        Ok(base.pow_nonneg(e.unsigned_abs()))
    }

    /// Binary powering; valid for any series.
    pub fn pow_nonneg(&self, mut e: u64) -> TruncatedSeries {
        let mut result = Self::one(self.d, self.r, self.order);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul_unchecked(&b);
            }
        }
        result
    }

    /// Substitutes `x^m y^q ↦ x^m y^q · F^{s·(m·n)}` for a unit `F` whose exponents lie in `n^⊥`.
    pub fn apply_wall(&self, n: &[BigInt], f: &TruncatedSeries, s: i64) -> Result<TruncatedSeries> {
        for e in f.terms.keys() {
            if !dot(&e.m, n)?.is_zero() {
                return Err(Error::InvalidWall(format!(
                    "function exponent {e} is not orthogonal to normal {}",
                    fmt_vec(n)
                )));
            }
        }
        let f = if f.order > self.order { f.truncate(self.order) } else { f.clone() };
        if f.order < self.order {
            return Err(Error::OrderMismatch(f.order, self.order));
        }
        let mut powers: HashMap<i64, TruncatedSeries> = HashMap::new();
        let mut out = self.clone_empty();
        for (e, c) in &self.terms {
            let mn = dot(&e.m, n)?;
            let k = crate::lattice::to_i64(&mn)? * s;
            if k == 0 {
                out.add_term(e.clone(), c.clone());
                continue;
            }
            let fk = match powers.entry(k) {
                std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
                std::collections::hash_map::Entry::Vacant(v) => v.insert(f.pow_unit(k)?),
            };
            for (fe, fc) in &fk.terms {
                out.add_term(e.add(fe), c * fc);
            }
        }
        Ok(out)
    }

    /// Exponents with minimal total y-degree.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(ExponentPair::degree).min()
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Multiplies by `y^q`.
    pub fn shift_y(&self, q: &[u32]) -> TruncatedSeries {
        let e = ExponentPair { m: vec![BigInt::zero(); self.d], q: q.to_vec() };
        self.mul_monomial(&e, &BigInt::one())
    }

    /// Applies an exponent map termwise, summing collisions.
    pub fn map_exponents<F>(&self, d: usize, r: usize, f: F) -> Result<TruncatedSeries>
    where
        F: Fn(&ExponentPair) -> Result<ExponentPair>,
    {
        let mut out = Self::zero(d, r, self.order);
        for (e, c) in &self.terms {
            out.add_term(f(e)?, c.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 mod I^{}", self.order);
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}·z^{e}")).collect();
        write!(f, "{} mod I^{}", parts.join(" + "), self.order)
    }
}

/// `f = 1 + Σ_j c_j z^{j·base}` truncated to `j·|base_q| < order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScatFunction {
    pub base: ExponentPair,
    pub coeffs: Vec<BigInt>,
    pub order: u32,
}

impl ScatFunction {
    /// Builds a function, rewriting it over the primitive base exponent.
    pub fn new(base: ExponentPair, coeffs: Vec<BigInt>, order: u32) -> Result<Self> {
        if base.degree() == 0 {
            return Err(Error::InvalidWall(format!("base exponent {base} has zero y-part")));
        }
        let (prim, g) = base.primitive()?;
        let g = g as usize;
        let mut out = vec![BigInt::zero(); coeffs.len() * g];
        for (j, c) in coeffs.into_iter().enumerate() {
            out[(j + 1) * g - 1] = c;
        }
        let mut f = ScatFunction { base: prim, coeffs: out, order };
        f.trim();
        Ok(f)
    }

    /// `(1 + z^base)^g`.
    pub fn binomial(base: ExponentPair, g: u32, order: u32) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(g as usize);
        let mut c = BigInt::one();
        for j in 1..=g {
            c = c * BigInt::from(g - j + 1) / BigInt::from(j);
            coeffs.push(c.clone());
        }
        Self::new(base, coeffs, order)
    }

    fn max_multiple(&self) -> usize {
        let b = self.base.degree();
        ((self.order.saturating_sub(1)) / b) as usize
    }

    fn trim(&mut self) {
        let max = self.max_multiple();
        self.coeffs.truncate(max);
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.base.m.len(), self.base.q.len())
    }

    pub fn to_series(&self) -> TruncatedSeries {
        let (d, r) = self.dims();
        let mut s = TruncatedSeries::one(d, r, self.order);
        for (j, c) in self.coeffs.iter().enumerate() {
            s.add_term(self.base.scale(j as u32 + 1), c.clone());
        }
        s
    }

    /// Reads a series supported on multiples of `base` back into a function.
    pub fn from_series(base: &ExponentPair, s: &TruncatedSeries) -> Result<Self> {
        let (prim, _) = base.primitive()?;
        let b = prim.degree();
        if b == 0 {
            return Err(Error::InvalidWall("zero y-part".into()));
        }
        let mut coeffs = vec![BigInt::zero(); (s.order().saturating_sub(1) / b) as usize];
        for (e, c) in s.terms() {
            let j = e.degree() / b;
            if e.degree() % b != 0 || *e != prim.scale(j) {
                return Err(Error::InvalidWall(format!("term {e} is not a multiple of {prim}")));
            }
            if j == 0 {
                if !c.is_one() {
                    return Err(Error::NonUnit);
                }
                continue;
            }
            coeffs[(j - 1) as usize] = c.clone();
        }
        if s.constant_term().is_zero() {
            return Err(Error::NonUnit);
        }
        let mut f = ScatFunction { base: prim, coeffs, order: s.order() };
        f.trim();
        Ok(f)
    }

    pub fn mul(&self, o: &ScatFunction) -> Result<Self> {
        if self.base != o.base {
            return Err(Error::InvalidWall(format!("bases {} and {} differ", self.base, o.base)));
        }
        Self::from_series(&self.base, &self.to_series().mul(&o.to_series())?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        Self::from_series(&self.base, &self.to_series().pow_unit(e)?)
    }

    pub fn truncate(&self, order: u32) -> Self {
        let mut f = ScatFunction { base: self.base.clone(), coeffs: self.coeffs.clone(), order: order.min(self.order) };
        f.trim();
        f
    }

    pub fn all_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }
}

/// `E_{n,f}(g)`: each `x^m y^q` of `g` is multiplied by `f^{m·n}`.
pub fn elementary_transform(n: &[BigInt], f: &ScatFunction, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !dot(&f.base.m, n)?.is_zero() {
        return Err(Error::InvalidWall(format!(
            "base exponent {} is not orthogonal to {}",
            f.base,
            fmt_vec(n)
        )));
    }
    g.apply_wall(n, &f.to_series().with_order(f.order.max(g.order())), 1)
}

/// Laurent polynomial in `x` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    pub d: usize,
    pub terms: BTreeMap<LatticeVec, BigInt>,
}

impl LaurentPoly {
    pub fn zero(d: usize) -> Self {
        LaurentPoly { d, terms: BTreeMap::new() }
    }

    pub fn from_terms<I: IntoIterator<Item = (LatticeVec, BigInt)>>(d: usize, it: I) -> Self {
        let mut p = Self::zero(d);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn monomial(m: LatticeVec, c: BigInt) -> Self {
        let d = m.len();
        Self::from_terms(d, [(m, c)])
    }

    pub fn add_term(&mut self, m: LatticeVec, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &LaurentPoly) -> LaurentPoly {
        self.add(&o.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        LaurentPoly::from_terms(self.d, self.terms.iter().map(|(m, x)| (m.clone(), x * c)))
    }

    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.d);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                out.add_term(a.iter().zip(b).map(|(x, y)| x + y).collect(), ca * cb);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `min_m m·w` over the support, or `None` for the zero polynomial.
    pub fn trop(&self, w: &[BigRational]) -> Result<Option<BigRational>> {
        let mut best: Option<BigRational> = None;
        for m in self.terms.keys() {
            let v = crate::lattice::dot_mixed(m, w)?;
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        Ok(best)
    }
}

/// Images `y^{e_i} ↦ c_i x^{m_i}` with every `c_i ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specialization {
    pub images: Vec<(BigInt, LatticeVec)>,
}

impl Specialization {
    pub fn new(images: Vec<(BigInt, LatticeVec)>) -> Result<Self> {
        if images.iter().any(|(c, _)| c.is_zero()) {
            return Err(Error::Domain("specialization maps a y-variable to zero".into()));
        }
        Ok(Specialization { images })
    }

    /// `y^{e_i} ↦ 1` for every `i`.
    pub fn y_to_one(d: usize, r: usize) -> Self {
        Specialization { images: vec![(BigInt::one(), vec![BigInt::zero(); d]); r] }
    }
}

/// Replaces each `y^{e_i}` by its image and collects like terms.
pub fn specialize(f: &TruncatedSeries, nu: &Specialization) -> Result<LaurentPoly> {
    let (d, r) = f.dims();
    if nu.images.len() != r {
        return Err(Error::Dimension { expected: r, got: nu.images.len() });
    }
    let mut out = LaurentPoly::zero(d);
    for (e, c) in f.terms() {
        let mut m = e.m.clone();
        let mut coeff = c.clone();
        for (qi, (ci, mi)) in e.q.iter().zip(&nu.images) {
            if mi.len() != d {
                return Err(Error::Dimension { expected: d, got: mi.len() });
            }
            coeff *= num_traits::pow(ci.clone(), *qi as usize);
            for (a, b) in m.iter_mut().zip(mi) {
                *a += b * BigInt::from(*qi);
            }
        }
        out.add_term(m, coeff);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lvec;

    fn ep(m: &[i64], q: &[u32]) -> ExponentPair {
        ExponentPair::new(lvec(m), q.to_vec())
    }

    fn t(k: u32) -> TruncatedSeries {
        TruncatedSeries::monomial(ep(&[1, 0], &[1]), BigInt::one(), k)
    }

    #[test]
    fn add_examples() {
        let one = TruncatedSeries::one(2, 1, 4);
        let s = one.add(&t(4)).unwrap().add(&t(4).neg()).unwrap();
        assert_eq!(s, one);
        assert_eq!(s.add(&TruncatedSeries::zero(2, 1, 4)).unwrap(), s);
        let a = TruncatedSeries::monomial(ep(&[1, 0], &[0]), BigInt::one(), 4);
        let b = TruncatedSeries::monomial(ep(&[0, 1], &[0]), BigInt::one(), 4);
        assert_eq!(a.add(&b).unwrap().len(), 2);
        assert!(a.add(&TruncatedSeries::zero(2, 1, 3)).is_err());
    }

    #[test]
    fn mul_examples() {
        let one = TruncatedSeries::one(2, 1, 3);
        let p = one.add(&t(3)).unwrap().mul(&one.sub(&t(3)).unwrap()).unwrap();
        let expect = one.sub(&TruncatedSeries::monomial(ep(&[2, 0], &[2]), BigInt::one(), 3)).unwrap();
        assert_eq!(p, expect);
        // torus: monomials multiply by adding exponents
        let a = TruncatedSeries::monomial(ep(&[1, 2], &[1]), BigInt::one(), 5);
        let b = TruncatedSeries::monomial(ep(&[-3, 1], &[2]), BigInt::one(), 5);
        assert_eq!(a.mul(&b).unwrap(), TruncatedSeries::monomial(ep(&[-2, 3], &[3]), BigInt::one(), 5));
    }

    #[test]
    fn pow_examples() {
        let one = TruncatedSeries::one(2, 1, 4);
        let f = one.add(&t(4)).unwrap();
        let inv = f.pow_unit(-1).unwrap();
        let expect = TruncatedSeries::from_terms(
            2,
            1,
            4,
            (0..4).map(|j| (ep(&[j, 0], &[j as u32]), BigInt::from(if j % 2 == 0 { 1 } else { -1 }))),
        );
        assert_eq!(inv, expect);
        assert_eq!(f.pow_unit(0).unwrap(), one);
        let sq = TruncatedSeries::from_terms(
            2,
            1,
            4,
            [(ep(&[0, 0], &[0]), BigInt::one()), (ep(&[1, 0], &[1]), BigInt::from(2)), (ep(&[2, 0], &[2]), BigInt::one())],
        );
        assert_eq!(f.pow_unit(2).unwrap(), sq);
        assert_eq!(t(4).pow_unit(2), Err(Error::NonUnit));
    }

    #[test]
    fn elementary_transform_examples() {
        let f = ScatFunction::new(ep(&[1, 0], &[1]), vec![BigInt::one()], 4).unwrap();
        let g = TruncatedSeries::monomial(ep(&[0, 1], &[0]), BigInt::one(), 4);
        let out = elementary_transform(&lvec(&[0, 1]), &f, &g).unwrap();
        let expect = TruncatedSeries::from_terms(
            2,
            1,
            4,
            [(ep(&[0, 1], &[0]), BigInt::one()), (ep(&[1, 1], &[1]), BigInt::one())],
        );
        assert_eq!(out, expect);
        let h = TruncatedSeries::monomial(ep(&[3, 0], &[0]), BigInt::one(), 4);
        assert_eq!(elementary_transform(&lvec(&[0, 1]), &f, &h).unwrap(), h);
        let back = elementary_transform(&lvec(&[0, -1]), &f, &out).unwrap();
        assert_eq!(back, g);
        assert!(matches!(elementary_transform(&lvec(&[1, 0]), &f, &g), Err(Error::InvalidWall(_))));
    }

    #[test]
    fn scat_function_normalizes_base() {
        let f = ScatFunction::new(ep(&[2, 0], &[2]), vec![BigInt::from(5)], 7).unwrap();
        assert_eq!(f.base, ep(&[1, 0], &[1]));
        assert_eq!(f.coeffs, vec![BigInt::zero(), BigInt::from(5)]);
        let b = ScatFunction::binomial(ep(&[1, 0], &[1]), 2, 7).unwrap();
        assert_eq!(b.coeffs, vec![BigInt::from(2), BigInt::one()]);
        assert!(ScatFunction::binomial(ep(&[1, 0], &[1]), 1, 1).unwrap().is_trivial());
    }

    #[test]
    fn specialize_examples() {
        let s = TruncatedSeries::from_terms(
            2,
            2,
            4,
            [
                (ep(&[1, -1], &[0, 0]), BigInt::one()),
                (ep(&[-1, 1], &[1, 1]), BigInt::one()),
                (ep(&[-1, -1], &[0, 1]), BigInt::one()),
            ],
        );
        let l = specialize(&s, &Specialization::y_to_one(2, 2)).unwrap();
        assert_eq!(l.terms.len(), 3);
        assert!(l.terms.values().all(|c| c.is_one()));
        let nu = Specialization::new(vec![(BigInt::from(-1), lvec(&[0, 0]))]).unwrap();
        let one = TruncatedSeries::one(2, 1, 3);
        let f = one.add(&TruncatedSeries::monomial(ep(&[2, 1], &[1]), BigInt::one(), 3)).unwrap();
        let g = specialize(&f, &nu).unwrap();
        assert_eq!(g.terms.get(&lvec(&[2, 1])), Some(&BigInt::from(-1)));
        assert!(Specialization::new(vec![(BigInt::zero(), lvec(&[0, 0]))]).is_err());
    }
}
