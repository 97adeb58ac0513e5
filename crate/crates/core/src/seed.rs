//! Seed data `(P, Q•, D)`, their duals, linear morphisms, and Λ-structures.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{clear_denominators, rat, to_rational, LatticeVec, RationalVec};
use crate::matrix::Matrix;
use crate::scattering::{Wall, WallSupport};
use crate::series::{ExponentPair, ScatFunction, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedDatum {
    p: Matrix,
    qbullet: Matrix,
    d: Vec<BigRational>,
    pub labels: Option<Vec<String>>,
}

/// Validates `(P, Q•, D)` and normalizes `D` to coprime positive integers.
pub fn validate_seed(p: Matrix, qbullet: Matrix, d: Vec<BigRational>) -> Result<SeedDatum> {
    let (dim, r) = (p.rows(), p.cols());
    if qbullet.rows() != dim || qbullet.cols() != r {
        return Err(Error::Seed(format!(
            "shape mismatch: P is {dim}×{r} but Q• is {}×{}",
            qbullet.rows(),
            qbullet.cols()
        )));
    }
    if d.len() != r {
        return Err(Error::Seed(format!("D has {} entries, expected {r}", d.len())));
    }
    if !p.is_integral() {
        return Err(Error::Seed("P must be integral".into()));
    }
    if let Some(i) = d.iter().position(|x| !x.is_positive()) {
        return Err(Error::Seed(format!("D entry {i} is not positive")));
    }
    // rescale D ↦ kD, Q• ↦ Q•/k, which fixes P and Q
    let (d, qbullet) = if r == 0 {
        (d, qbullet)
    } else {
        let l = d.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let scaled: Vec<BigInt> = d.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
        let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let k = BigRational::new(l, g);
        (d.iter().map(|x| x * &k).collect(), qbullet.scale(&k.recip()))
    };
    let s = SeedDatum { p, qbullet, d, labels: None };
    let q = s.q();
    if !q.is_integral() {
        return Err(Error::Seed(format!("Q = Q•·D = {q} is not integral")));
    }
    for i in 0..r {
        if q.column(i).iter().all(Zero::is_zero) {
            return Err(Error::Seed(format!("column Qe_{i} is zero")));
        }
    }
    let bb = s.bbullet();
    if !bb.is_skew() {
        return Err(Error::Seed(format!("B• = Q•ᵀP = {bb} is not skew-symmetric")));
    }
    Ok(s)
}

impl SeedDatum {
    pub fn from_ints(p: &[Vec<i64>], qbullet: &[Vec<i64>], d: &[i64]) -> Result<Self> {
        let r = d.len();
        let pm = if p.is_empty() { Matrix::zeros(0, r) } else { Matrix::from_int_rows(p)? };
        let qm = if qbullet.is_empty() { Matrix::zeros(0, r) } else { Matrix::from_int_rows(qbullet)? };
        validate_seed(pm, qm, d.iter().map(|&x| rat(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    pub fn rank(&self) -> usize {
        self.p.cols()
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn qbullet(&self) -> &Matrix {
        &self.qbullet
    }

    pub fn d(&self) -> &[BigRational] {
        &self.d
    }

    pub fn q(&self) -> Matrix {
        self.qbullet.mul(&Matrix::diagonal(&self.d)).expect("shapes agree")
    }

    pub fn pbullet(&self) -> Matrix {
        self.p.mul(&Matrix::diagonal(&self.d)).expect("shapes agree")
    }

    /// `B = QᵀP`.
    pub fn b(&self) -> Matrix {
        self.q().transpose().mul(&self.p).expect("shapes agree")
    }

    /// `B• = Q•ᵀP`.
    pub fn bbullet(&self) -> Matrix {
        self.qbullet.transpose().mul(&self.p).expect("shapes agree")
    }

    pub fn p_col(&self, i: usize) -> LatticeVec {
        self.p.int_column(i).expect("P is integral")
    }

    pub fn q_col(&self, i: usize) -> LatticeVec {
        self.q().int_column(i).expect("Q is integral")
    }

    /// `(Pv, v)` for a natural vector `v`.
    pub fn exponent_of(&self, v: &[u32]) -> ExponentPair {
        let vb: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let m = self.p.apply_int(&vb).expect("length r").into_iter().map(|x| x.to_integer()).collect();
        ExponentPair::new(m, v.to_vec())
    }

    /// Normal for a wall with exponent `(m, v)`: the primitive multiple of `Q•v`.
    pub fn orientation(&self, e: &ExponentPair) -> Option<LatticeVec> {
        let v: Vec<BigInt> = e.q.iter().map(|&x| BigInt::from(x)).collect();
        let n = self.qbullet.apply_int(&v).ok()?;
        clear_denominators(&n).ok().map(|(prim, _)| prim)
    }

    /// The seed `(P, −Q)`, whose positive chamber is the negative chamber of this seed.
    pub fn negate_q(&self) -> SeedDatum {
        SeedDatum { qbullet: self.qbullet.neg(), ..self.clone() }
    }
}

/// One full line per `i`: support `(Qe_i)^⊥`, function `1 + x^{Pe_i}y^{e_i}`, normal `Qe_i`.
pub fn initial_diagram(s: &SeedDatum, order: u32) -> Result<Vec<Wall>> {
    let r = s.rank();
    if r > 0 && s.dim() != 2 {
        return Err(Error::Unsupported(format!("scattering needs ambient rank 2, seed has {}", s.dim())));
    }
    (0..r)
        .map(|i| {
            let n = s.q_col(i);
            let pe = s.p_col(i);
            if !crate::lattice::dot(&pe, &n)?.is_zero() {
                return Err(Error::Internal(format!("Pe_{i} is not orthogonal to Qe_{i}")));
            }
            let mut q = vec![0u32; r];
            q[i] = 1;
            let f = ScatFunction::new(ExponentPair::new(pe, q), vec![BigInt::one()], order)?;
            let support = WallSupport::line(vec![BigRational::zero(), BigRational::zero()], crate::lattice::rot90(&n))?;
            Wall::new(support, n, f)
        })
        .collect()
}

fn int_matrix(m: &Matrix, what: &str) -> Result<Matrix> {
    if m.is_integral() {
        Ok(m.clone())
    } else {
        Err(Error::Unsupported(format!("{what} = {m} is not integral")))
    }
}

/// `(Q•, P•)`: `P′ = Q•`, `Q′• = P`, `D′ = D`.
pub fn chiral_dual(s: &SeedDatum) -> Result<SeedDatum> {
    validate_seed(int_matrix(&s.qbullet, "Q•")?, s.p.clone(), s.d.clone())
}

/// `(Q, P)`: `P′ = Q`, `Q′• = P·D`, `D′ = D⁻¹`.
pub fn chiral_langlands_dual(s: &SeedDatum) -> Result<SeedDatum> {
    validate_seed(s.q(), s.pbullet(), s.d.iter().map(BigRational::recip).collect())
}

/// `(Q, −P)`: `P′ = Q`, `Q′• = −P·D`, `D′ = D⁻¹`.
pub fn langlands_dual(s: &SeedDatum) -> Result<SeedDatum> {
    validate_seed(s.q(), s.pbullet().neg(), s.d.iter().map(BigRational::recip).collect())
}

/// A map `A: M → M′` with `AP = P′` and `AᵀQ′ = Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMorphism {
    pub a: Matrix,
    pub source: SeedDatum,
    pub target: SeedDatum,
    pub integral: bool,
}

pub fn check_linear_morphism(a: &Matrix, s: &SeedDatum, t: &SeedDatum) -> Result<LinearMorphism> {
    if a.rows() != t.dim() || a.cols() != s.dim() {
        return Err(Error::Seed(format!(
            "A is {}×{}, expected {}×{}",
            a.rows(),
            a.cols(),
            t.dim(),
            s.dim()
        )));
    }
    if s.b() != t.b() {
        return Err(Error::Seed(format!("exchange matrices differ: {} vs {}", s.b(), t.b())));
    }
    let ap = a.mul(&s.p)?;
    if ap != t.p {
        return Err(Error::Seed(format!("AP = {ap} ≠ P′ = {}", t.p)));
    }
    let atq = a.transpose().mul(&t.q())?;
    if atq != s.q() {
        return Err(Error::Seed(format!("AᵀQ′ = {atq} ≠ Q = {}", s.q())));
    }
    Ok(LinearMorphism { a: a.clone(), source: s.clone(), target: t.clone(), integral: a.is_integral() })
}

/// `ρ_A(x^m y^q) = x^{Am} y^q`.
pub fn rho_transport(a: &LinearMorphism, f: &TruncatedSeries) -> Result<TruncatedSeries> {
    let (_, r) = f.dims();
    f.map_exponents(a.a.rows(), r, |e| {
        let img = a.a.apply_int(&e.m)?;
        let m = img
            .into_iter()
            .map(|x| {
                if x.is_integer() {
                    Ok(x.to_integer())
                } else {
                    Err(Error::Domain(format!("ρ_A maps {e} off the lattice")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExponentPair::new(m, e.q.clone()))
    })
}

/// A matrix with `ΛP = Q•` and `ΛᵀP = −Q•`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaStructure {
    pub l: Matrix,
}

impl LambdaStructure {
    pub fn satisfies(&self, s: &SeedDatum) -> bool {
        let lp = self.l.mul(&s.p);
        let ltp = self.l.transpose().mul(&s.p);
        matches!((lp, ltp), (Ok(a), Ok(b)) if a == s.qbullet && b == s.qbullet.neg())
    }

    /// `ω(a, b) = a·Λb`.
    pub fn form(&self, a: &[BigRational], b: &[BigRational]) -> Result<BigRational> {
        crate::lattice::dual_pair(a, &self.l.apply(b)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaOutcome {
    Found(LambdaStructure),
    /// No solution; `witness` lies in `ker P` but not in `ker Q•` when such a vector exists.
    Absent { witness: Option<RationalVec> },
}

/// Solves the Λ-structure equations with free parameters set to zero.
pub fn lambda_find(s: &SeedDatum) -> LambdaOutcome {
    let (dim, r) = (s.dim(), s.rank());
    let unknowns = dim * dim;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..dim {
        for j in 0..r {
            // (ΛP)_{ij} = Σ_k Λ_{ik} P_{kj}
            let mut row = vec![BigRational::zero(); unknowns];
            for k in 0..dim {
                row[i * dim + k] += s.p.get(k, j);
            }
            rows.push(row);
            rhs.push(s.qbullet.get(i, j).clone());
            // (ΛᵀP)_{ij} = Σ_k Λ_{ki} P_{kj}
            let mut row = vec![BigRational::zero(); unknowns];
            for k in 0..dim {
                row[k * dim + i] += s.p.get(k, j);
            }
            rows.push(row);
            rhs.push(-s.qbullet.get(i, j).clone());
        }
    }
    let solution = if rows.is_empty() {
        Some(vec![BigRational::zero(); unknowns])
    } else {
        Matrix::from_rows(rows).ok().and_then(|m| m.solve(&rhs))
    };
    match solution {
        Some(x) => {
            let l = Matrix::from_rows(x.chunks(dim.max(1)).map(<[_]>::to_vec).collect()).unwrap_or_else(|_| Matrix::zeros(dim, dim));
            LambdaOutcome::Found(LambdaStructure { l })
        }
        None => {
            let witness = s.p.kernel().into_iter().find(|v| {
                s.qbullet.apply(v).map(|w| w.iter().any(|x| !x.is_zero())).unwrap_or(false)
            });
            LambdaOutcome::Absent { witness }
        }
    }
}

/// `M′ = M ⊕ N•`, `P′v = (Pv, 0)`, `Q′v = (Qv, P•v)`, `Λ′(m, n) = (Λm − n, m)`, `A m = (m, 0)`.
pub fn lambda_invertible_extension(
    s: &SeedDatum,
    lambda: &LambdaStructure,
) -> Result<(SeedDatum, LambdaStructure, LinearMorphism)> {
    if !lambda.satisfies(s) {
        return Err(Error::Seed("Λ does not satisfy ΛP = Q• and ΛᵀP = −Q•".into()));
    }
    let dim = s.dim();
    let r = s.rank();
    let p2 = s.p.vstack(&Matrix::zeros(dim, r))?;
    let qb2 = s.qbullet.vstack(&s.p)?;
    let s2 = validate_seed(p2, qb2, s.d.clone())?;
    let id = Matrix::identity(dim);
    let top = lambda.l.hstack(&id.neg())?;
    let bottom = id.hstack(&Matrix::zeros(dim, dim))?;
    let l2 = LambdaStructure { l: top.vstack(&bottom)? };
    let a = id.vstack(&Matrix::zeros(dim, dim))?;
    let morphism = check_linear_morphism(&a, s, &s2)?;
    if !l2.satisfies(&s2) {
        return Err(Error::Internal("extended Λ′ is not a Λ-structure".into()));
    }
    if l2.l.determinant()?.is_zero() {
        return Err(Error::Internal("extended Λ′ is singular".into()));
    }
    if a.transpose().mul(&l2.l)?.mul(&a)? != lambda.l {
        return Err(Error::Internal("AᵀΛ′A ≠ Λ".into()));
    }
    Ok((s2, l2, morphism))
}

/// The inverse of `Λ′`: `(n, m) ↦ (m, Λm − n)`.
pub fn lambda_extension_inverse(lambda: &LambdaStructure, v: &[BigRational]) -> Result<RationalVec> {
    let dim = lambda.l.rows();
    let (n, m) = v.split_at(dim);
    let lm = lambda.l.apply(m)?;
    Ok(m.iter().cloned().chain(lm.iter().zip(n).map(|(a, b)| a - b)).collect())
}

/// `(P, Q) → (P′, Q′) ← (P″, Q″)` with `P′v = (Pv, 0)`, `Q′v = (Qv, v)`, `P″v = (Pv, 0, v)`, `Q″v = (Qv, v, 0)`.
pub fn saturated_resolution(s: &SeedDatum) -> Result<(LinearMorphism, LinearMorphism)> {
    let (dim, r) = (s.dim(), s.rank());
    let dinv = Matrix::diagonal(&s.d.iter().map(BigRational::recip).collect::<Vec<_>>());
    let p1 = s.p.vstack(&Matrix::zeros(r, r))?;
    let qb1 = s.qbullet.vstack(&dinv)?;
    let s1 = validate_seed(p1, qb1, s.d.clone())?;
    let p2 = s.p.vstack(&Matrix::zeros(r, r))?.vstack(&Matrix::identity(r))?;
    let qb2 = s.qbullet.vstack(&dinv)?.vstack(&Matrix::zeros(r, r))?;
    let s2 = validate_seed(p2, qb2, s.d.clone())?;
    let a = Matrix::identity(dim).vstack(&Matrix::zeros(r, dim))?;
    let b = Matrix::identity(dim + r).hstack(&Matrix::zeros(dim + r, r))?;
    Ok((check_linear_morphism(&a, s, &s1)?, check_linear_morphism(&b, &s2, &s1)?))
}

/// Whether an integral matrix is a saturated injection (its maximal minors have gcd 1 and full rank).
pub fn is_saturated_injection(m: &Matrix) -> bool {
    let (rows, cols) = (m.rows(), m.cols());
    if m.rank() != cols || !m.is_integral() {
        return false;
    }
    let mut g = BigInt::zero();
    for subset in combinations(rows, cols) {
        let sub = Matrix::from_rows(subset.iter().map(|&i| m.row(i)).collect()).expect("rectangular");
        let det = sub.determinant().expect("square").to_integer();
        g = g.gcd(&det);
    }
    g.is_one()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Integer columns of `Q•v` paired against `m`; helper for the bilinear-form identity.
pub fn pairing_with_qbullet(s: &SeedDatum, m: &[BigInt], v: &[BigInt]) -> Result<BigRational> {
    crate::lattice::dual_pair(&to_rational(m), &s.qbullet.apply_int(v)?)
}
