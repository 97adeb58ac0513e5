//! Integer and rational vectors, dual pairings, and the two-level infinitesimal
//! perturbation used to make basepoints and covectors generic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type LatticeVec = Vec<BigInt>;
pub type RationalVec = Vec<BigRational>;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn lvec(v: &[i64]) -> LatticeVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn rvec(v: &[i64]) -> RationalVec {
    v.iter().map(|&x| rat(x)).collect()
}

pub fn to_rational(v: &[BigInt]) -> RationalVec {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension { expected: a, got: b });
    }
    Ok(())
}

/// Σ aᵢbᵢ over rationals.
pub fn dual_pair(a: &[BigRational], b: &[BigRational]) -> Result<BigRational> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y))
}

/// Σ aᵢbᵢ over integers.
pub fn dot(a: &[BigInt], b: &[BigInt]) -> Result<BigInt> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y))
}

/// Integer vector paired with a rational one.
pub fn dot_mixed(a: &[BigInt], b: &[BigRational]) -> Result<BigRational> {
    check_len(a.len(), b.len())?;
    Ok(a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + y * x))
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Splits `v = g·ν` with `g` the gcd of the entries and `ν` primitive.
pub fn primitive_part(v: &[BigInt]) -> Result<(LatticeVec, BigInt)> {
    let g = gcd_all(v);
    if g.is_zero() {
        return Err(Error::Domain("primitive part of the zero vector".into()));
    }
    Ok((v.iter().map(|x| x / &g).collect(), g))
}

/// Writes a rational vector as `scale·ν` with `ν` primitive integral and `scale > 0`.
pub fn clear_denominators(v: &[BigRational]) -> Result<(LatticeVec, BigRational)> {
    let l = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: LatticeVec = v.iter().map(|x| (x * &l).to_integer()).collect();
    let (prim, g) = primitive_part(&ints)?;
    Ok((prim, BigRational::new(g, l)))
}

/// Counterclockwise quarter turn `(a, b) ↦ (−b, a)`.
pub fn rot90<T: Clone + Neg<Output = T>>(v: &[T]) -> Vec<T> {
    vec![-v[1].clone(), v[0].clone()]
}

pub fn add_vec<T: Clone + Add<Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub_vec<T: Clone + Sub<Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale_vec(a: &[BigInt], s: &BigInt) -> LatticeVec {
    a.iter().map(|x| x * s).collect()
}

pub fn is_zero_vec<T: Zero>(v: &[T]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// 2×2 determinant `a₀b₁ − a₁b₀`.
pub fn cross<T>(a: &[T], b: &[T]) -> T
where
    T: Clone + Mul<Output = T> + Sub<Output = T>,
{
    a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone()
}

fn half(v: &[BigRational]) -> u8 {
    // 0 for angles in (0, π], 1 for (π, 2π]
    if v[1].is_positive() || (v[1].is_zero() && v[0].is_negative()) {
        0
    } else {
        1
    }
}

/// Orders nonzero planar vectors by angle in (0, 2π]; the positive x-axis comes last.
pub fn angle_cmp(a: &[BigRational], b: &[BigRational]) -> Ordering {
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    let c = cross(a, b);
    if c.is_positive() {
        Ordering::Less
    } else if c.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

pub fn sign_of<T: Signed>(x: &T) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Domain(format!("integer {x} exceeds machine range")))
}

/// A polynomial `c₀ + c₁ε + c₂ε² + …` in an infinitesimal `ε > 0`, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perturbed {
    coeffs: Vec<BigRational>,
}

impl Perturbed {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Perturbed { coeffs }
    }

    pub fn constant(c: BigRational) -> Self {
        Perturbed::new(vec![c])
    }

    pub fn zero() -> Self {
        Perturbed { coeffs: Vec::new() }
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn base(&self) -> BigRational {
        self.coeff(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sign of the first nonzero coefficient.
    pub fn sign(&self) -> i8 {
        self.coeffs.iter().find(|c| !c.is_zero()).map_or(0, sign_of)
    }

    pub fn scale(&self, s: &BigRational) -> Perturbed {
        Perturbed::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn abs(&self) -> Perturbed {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }
}

impl Add for &Perturbed {
    type Output = Perturbed;
    fn add(self, o: &Perturbed) -> Perturbed {
        let n = self.coeffs.len().max(o.coeffs.len());
        Perturbed::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Perturbed {
    type Output = Perturbed;
    fn sub(self, o: &Perturbed) -> Perturbed {
        let n = self.coeffs.len().max(o.coeffs.len());
        Perturbed::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Perturbed {
    type Output = Perturbed;
    fn mul(self, o: &Perturbed) -> Perturbed {
        if self.is_zero() || o.is_zero() {
            return Perturbed::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Perturbed::new(out)
    }
}

impl Neg for &Perturbed {
    type Output = Perturbed;
    fn neg(self) -> Perturbed {
        Perturbed { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for Perturbed {
    type Output = Perturbed;
    fn neg(self) -> Perturbed {
        -&self
    }
}

impl PartialOrd for Perturbed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Perturbed {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

impl fmt::Display for Perturbed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("({c})ε"),
                _ => format!("({c})ε^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Default first- and second-order perturbation directions.
pub fn default_eps1() -> RationalVec {
    rvec(&[1, 7])
}

pub fn default_eps2() -> RationalVec {
    rvec(&[3, 1])
}

/// `base + ε·eps1 + ε²·eps2` for an infinitesimal `ε > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PerturbedPoint {
    pub base: RationalVec,
    pub eps1: RationalVec,
    pub eps2: RationalVec,
}

impl PerturbedPoint {
    pub fn new(base: RationalVec, eps1: RationalVec, eps2: RationalVec) -> Result<Self> {
        check_len(base.len(), eps1.len())?;
        check_len(base.len(), eps2.len())?;
        Ok(PerturbedPoint { base, eps1, eps2 })
    }

    /// Planar point perturbed by the default directions.
    pub fn generic(base: RationalVec) -> Self {
        let n = base.len();
        let take = |v: RationalVec| -> RationalVec {
            (0..n).map(|i| v.get(i).cloned().unwrap_or_else(BigRational::zero)).collect()
        };
        PerturbedPoint { base, eps1: take(default_eps1()), eps2: take(default_eps2()) }
    }

    pub fn exact(base: RationalVec) -> Self {
        let z = vec![BigRational::zero(); base.len()];
        PerturbedPoint { base, eps1: z.clone(), eps2: z }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn coord(&self, i: usize) -> Perturbed {
        Perturbed::new(vec![self.base[i].clone(), self.eps1[i].clone(), self.eps2[i].clone()])
    }

    /// Builds a point from coordinates of ε-degree at most 2.
    pub fn from_coords(coords: &[Perturbed]) -> Result<Self> {
        if coords.iter().any(|c| c.coeffs().len() > 3) {
            return Err(Error::Internal("perturbed point of ε-degree above 2".into()));
        }
        Ok(PerturbedPoint {
            base: coords.iter().map(|c| c.coeff(0)).collect(),
            eps1: coords.iter().map(|c| c.coeff(1)).collect(),
            eps2: coords.iter().map(|c| c.coeff(2)).collect(),
        })
    }

    pub fn pair(&self, functional: &[BigRational]) -> Result<Perturbed> {
        Ok(Perturbed::new(vec![
            dual_pair(functional, &self.base)?,
            dual_pair(functional, &self.eps1)?,
            dual_pair(functional, &self.eps2)?,
        ]))
    }

    pub fn pair_int(&self, functional: &[BigInt]) -> Result<Perturbed> {
        self.pair(&to_rational(functional))
    }

    /// `self + t·dir` for an integral direction.
    pub fn advance(&self, t: &Perturbed, dir: &[BigInt]) -> Result<Self> {
        let coords: Vec<Perturbed> = (0..self.dim())
            .map(|i| &self.coord(i) + &t.scale(&BigRational::from_integer(dir[i].clone())))
            .collect();
        Self::from_coords(&coords)
    }

    pub fn translate(&self, by: &[BigRational]) -> Self {
        PerturbedPoint {
            base: add_vec(&self.base, by),
            eps1: self.eps1.clone(),
            eps2: self.eps2.clone(),
        }
    }
}

impl fmt::Display for PerturbedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &RationalVec| {
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        };
        write!(f, "({})", show(&self.base))?;
        if !is_zero_vec(&self.eps1) {
            write!(f, "+ε({})", show(&self.eps1))?;
        }
        if !is_zero_vec(&self.eps2) {
            write!(f, "+ε²({})", show(&self.eps2))?;
        }
        Ok(())
    }
}

/// Lexicographic sign of `(f·base, f·eps1, f·eps2)`; zero only when all three vanish.
pub fn perturbed_sign(functional: &[BigRational], p: &PerturbedPoint) -> Result<i8> {
    Ok(p.pair(functional)?.sign())
}

pub fn fmt_vec<T: fmt::Display>(v: &[T]) -> String {
    format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_examples() {
        assert_eq!(dual_pair(&rvec(&[1, 0]), &rvec(&[0, 1])).unwrap(), rat(0));
        assert_eq!(dual_pair(&rvec(&[1, -1]), &rvec(&[1, 1])).unwrap(), rat(0));
        assert!(dual_pair(&rvec(&[1]), &rvec(&[1, 2])).is_err());
        // (a,b)·(d,−c) = ad − bc
        let (a, b, c, d) = (3, 5, -2, 7);
        assert_eq!(dual_pair(&rvec(&[a, b]), &rvec(&[d, -c])).unwrap(), rat(a * d - b * c));
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive_part(&lvec(&[2, 4])).unwrap(), (lvec(&[1, 2]), int(2)));
        assert_eq!(primitive_part(&lvec(&[1, -1])).unwrap(), (lvec(&[1, -1]), int(1)));
        assert_eq!(primitive_part(&lvec(&[0, -3])).unwrap(), (lvec(&[0, -1]), int(3)));
        assert!(primitive_part(&lvec(&[0, 0])).is_err());
    }

    #[test]
    fn perturbed_sign_examples() {
        let p = PerturbedPoint::new(rvec(&[0, 0]), rvec(&[1, 0]), rvec(&[0, 0])).unwrap();
        assert_eq!(perturbed_sign(&rvec(&[1, 0]), &p).unwrap(), 1);
        let p = PerturbedPoint::new(rvec(&[1, -1]), rvec(&[0, 0]), rvec(&[1, 0])).unwrap();
        assert_eq!(perturbed_sign(&rvec(&[1, 1]), &p).unwrap(), 1);
        let p = PerturbedPoint::new(rvec(&[0, 0]), rvec(&[0, 1]), rvec(&[0, 1])).unwrap();
        assert_eq!(perturbed_sign(&rvec(&[1, 0]), &p).unwrap(), 0);
    }

    #[test]
    fn angle_order_starts_above_positive_axis() {
        let mut dirs = vec![rvec(&[1, 0]), rvec(&[0, -1]), rvec(&[-1, 0]), rvec(&[0, 1]), rvec(&[1, 1])];
        dirs.sort_by(|a, b| angle_cmp(a, b));
        assert_eq!(
            dirs,
            vec![rvec(&[1, 1]), rvec(&[0, 1]), rvec(&[-1, 0]), rvec(&[0, -1]), rvec(&[1, 0])]
        );
    }

    #[test]
    fn perturbed_arithmetic() {
        let a = Perturbed::new(vec![rat(0), rat(2)]);
        let b = Perturbed::new(vec![rat(0), rat(0), rat(-5)]);
        assert!(a > b);
        assert_eq!((&a * &b).coeffs(), &[rat(0), rat(0), rat(0), rat(-10)]);
        assert_eq!((&a - &a).sign(), 0);
    }
}
