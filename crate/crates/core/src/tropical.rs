//! Valuations, tropicalizations, taut broken-line tracers and Λ-momentum.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::broken_lines::{enumerate_broken_lines, next_crossing, BendEvent, BrokenLine};
use crate::error::{Error, Result};
use crate::lattice::{dot, to_rational, LatticeVec, Perturbed, PerturbedPoint, RationalVec};
use crate::matrix::Matrix;
use crate::scattering::ScatteringDiagram;
use crate::series::{ExponentPair, TruncatedSeries};

/// `(w, s)` pairing with `x`-exponents through `w` (perturbed) and with `y`-exponents through `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covector {
    pub w: PerturbedPoint,
    pub s: RationalVec,
}

impl Covector {
    pub fn new(w: PerturbedPoint, s: RationalVec) -> Self {
        Covector { w, s }
    }

    /// `w` with the default perturbation and `s = 0`.
    pub fn generic(w: RationalVec, r: usize) -> Self {
        Covector { w: PerturbedPoint::generic(w), s: vec![BigRational::zero(); r] }
    }

    pub fn exact(w: RationalVec, r: usize) -> Self {
        Covector { w: PerturbedPoint::exact(w), s: vec![BigRational::zero(); r] }
    }

    /// `v = M·p` for a point `p`, keeping the perturbation.
    pub fn from_matrix(m: &Matrix, p: &PerturbedPoint, r: usize) -> Result<Self> {
        Ok(Covector {
            w: PerturbedPoint::new(m.apply(&p.base)?, m.apply(&p.eps1)?, m.apply(&p.eps2)?)?,
            s: vec![BigRational::zero(); r],
        })
    }

    pub fn pair(&self, e: &ExponentPair) -> Result<Perturbed> {
        let y: BigRational = e.q.iter().zip(&self.s).map(|(q, s)| s * BigInt::from(*q)).sum();
        Ok(&self.w.pair_int(&e.m)? + &Perturbed::constant(y))
    }

    fn pair_rational(&self, m: &[BigRational], q: &[BigRational]) -> Result<Perturbed> {
        let y: BigRational = q.iter().zip(&self.s).map(|(a, b)| a * b).sum();
        Ok(&self.w.pair(m)? + &Perturbed::constant(y))
    }

    /// `v + c·n` on the `x`-part.
    fn shift(&self, c: &Perturbed, n: &[BigInt]) -> Result<Covector> {
        let coords: Vec<Perturbed> = (0..self.w.dim())
            .map(|i| &self.w.coord(i) + &c.scale(&BigRational::from_integer(n[i].clone())))
            .collect();
        Ok(Covector { w: PerturbedPoint::from_coords(&coords)?, s: self.s.clone() })
    }
}

impl fmt::Display for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.w)?;
        if self.s.iter().any(|x| !x.is_zero()) {
            write!(f, "|{}", crate::lattice::fmt_vec(&self.s))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    /// Unchanged across three successive orders.
    Exact,
    /// Minimum over the stored terms only.
    UpperBound,
    /// Dropping by a constant amount per order increase.
    UnboundedSuspected,
    /// Valuation of the zero series.
    Infinite,
}

impl Certification {
    pub fn as_str(self) -> &'static str {
        match self {
            Certification::Exact => "exact",
            Certification::UpperBound => "upper-bound",
            Certification::UnboundedSuspected => "unbounded-suspected",
            Certification::Infinite => "infinite",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Monomial(ExponentPair),
    Line(Box<BrokenLine>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationResult {
    /// `None` encodes `+∞`.
    pub value: Option<BigRational>,
    pub certified: Certification,
    pub order: u32,
    pub witness: Option<Witness>,
    /// Values at the orders used for certification.
    pub per_order: Vec<(u32, Option<BigRational>)>,
    /// Whether the witness line passed the tautness check, when one was run.
    pub witness_taut: Option<bool>,
}

impl ValuationResult {
    pub fn is_exact(&self) -> bool {
        self.certified == Certification::Exact
    }

    pub fn witness_line(&self) -> Option<&BrokenLine> {
        match &self.witness {
            Some(Witness::Line(l)) => Some(l),
            _ => None,
        }
    }
}

/// `min (m,q)·(w,s)` over the stored terms.
pub fn valuation(f: &TruncatedSeries, w: &[BigRational], s: &[BigRational]) -> Result<ValuationResult> {
    let mut best: Option<(BigRational, ExponentPair)> = None;
    for e in f.terms().keys() {
        let v = e.pair(w, s)?;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, e.clone()));
        }
    }
    let certified = if best.is_none() { Certification::Infinite } else { Certification::UpperBound };
    let value = best.as_ref().map(|b| b.0.clone());
    Ok(ValuationResult {
        per_order: vec![(f.order(), value.clone())],
        value,
        certified,
        order: f.order(),
        witness: best.map(|b| Witness::Monomial(b.1)),
        witness_taut: None,
    })
}

/// Classifies per-order minima listed by increasing order.
pub fn certify(per_order: &[(u32, Option<BigRational>)]) -> Certification {
    let vals: Vec<&Option<BigRational>> = per_order.iter().map(|(_, v)| v).collect();
    if vals.iter().all(|v| v.is_none()) {
        return Certification::Infinite;
    }
    if vals.len() < 3 {
        return Certification::UpperBound;
    }
    let last: Vec<&BigRational> = match vals[vals.len() - 3..].iter().map(|v| v.as_ref()).collect::<Option<Vec<_>>>() {
        Some(v) => v,
        None => return Certification::UpperBound,
    };
    if last[0] == last[1] && last[1] == last[2] {
        return Certification::Exact;
    }
    let (d1, d2) = (last[0] - last[1], last[1] - last[2]);
    if d1.is_positive() && d1 == d2 {
        return Certification::UnboundedSuspected;
    }
    Certification::UpperBound
}

/// Orders `k, k+2, k+4` capped by the diagram order.
pub fn certification_orders(k: u32, cap: u32) -> Vec<u32> {
    [k, k + 2, k + 4].into_iter().filter(|&o| o <= cap).collect()
}

/// Minimum of `v` over the final exponents of `lines`, certified over `orders`.
pub fn val_lines(lines: &[BrokenLine], v: &Covector, orders: &[u32]) -> Result<ValuationResult> {
    let mut per_order = Vec::new();
    let mut best_at_base: Option<(Perturbed, &BrokenLine)> = None;
    let base_order = orders[0];
    for &o in orders {
        let mut best: Option<(Perturbed, &BrokenLine)> = None;
        for l in lines.iter().filter(|l| l.final_exponent.degree() < o) {
            let val = v.pair(&l.final_exponent)?;
            if best.as_ref().is_none_or(|(b, _)| val < *b) {
                best = Some((val, l));
            }
        }
        per_order.push((o, best.as_ref().map(|b| b.0.base())));
        if o == base_order {
            best_at_base = best;
        }
    }
    let certified = certify(&per_order);
    Ok(ValuationResult {
        value: per_order[0].1.clone(),
        certified,
        order: base_order,
        witness: best_at_base.map(|(_, l)| Witness::Line(Box::new(l.clone()))),
        per_order,
        witness_taut: None,
    })
}

/// Keeps an exact certificate only if the minimizing line is `v`-taut, as every true minimizer is.
pub fn require_taut_witness(d: &ScatteringDiagram, mut res: ValuationResult, v: &Covector) -> Result<ValuationResult> {
    if let Some(line) = res.witness_line() {
        let taut = check_taut(d, line, v, res.order)?.is_taut();
        res.witness_taut = Some(taut);
        if !taut && res.certified == Certification::Exact {
            res.certified = Certification::UpperBound;
        }
    }
    Ok(res)
}

/// [`val_lines`] followed by [`require_taut_witness`].
pub fn val_lines_certified(d: &ScatteringDiagram, lines: &[BrokenLine], v: &Covector, orders: &[u32]) -> Result<ValuationResult> {
    require_taut_witness(d, val_lines(lines, v, orders)?, v)
}

/// `val_v(ϑ_{u,p})` at order `k`; exact when stable over `k+2, k+4` with a taut minimizer.
pub fn val_theta(d: &ScatteringDiagram, u: &ExponentPair, v: &Covector, p: &PerturbedPoint, k: u32) -> Result<ValuationResult> {
    let orders = certification_orders(k, d.order);
    if orders.is_empty() {
        return Err(Error::OrderMismatch(k, d.order));
    }
    let lines = enumerate_broken_lines(d, u, p, *orders.last().unwrap())?;
    val_lines_certified(d, &lines, v, &orders)
}

/// `val_v(Θ_{m,p}) = val_v(ϑ_{κm,p})/κ` with `κ` clearing the denominators of `m`.
pub fn theta_set_valuation(d: &ScatteringDiagram, m: &[BigRational], v: &Covector, p: &PerturbedPoint, k: u32) -> Result<ValuationResult> {
    let kappa = m.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let u: LatticeVec = m.iter().map(|x| (x * &kappa).to_integer()).collect();
    let mut res = val_theta(d, &ExponentPair::from_m(u, d.r), v, p, k)?;
    let kq = BigRational::from_integer(kappa);
    res.value = res.value.map(|x| x / &kq);
    for (_, x) in res.per_order.iter_mut() {
        *x = x.take().map(|y| y / &kq);
    }
    Ok(res)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautCheck {
    pub event: usize,
    pub chosen: Perturbed,
    pub best: Perturbed,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautCertificate {
    /// Covectors on the segments, from the unbounded segment to the last one.
    pub covector_transport: Vec<Covector>,
    pub checked_inequalities: Vec<TautCheck>,
}

impl TautCertificate {
    pub fn is_taut(&self) -> bool {
        self.checked_inequalities.iter().all(|c| c.holds)
    }
}

fn group_series(d: &ScatteringDiagram, walls: &[usize], order: u32) -> Result<TruncatedSeries> {
    let mut f = TruncatedSeries::one(2, d.r, order);
    for &i in walls {
        f = f.mul(&d.walls[i].function.to_series().with_order(order))?;
    }
    Ok(f)
}

/// `n` oriented so that `m·n > 0`, and `|m·n|`.
fn oriented(m: &[BigInt], n: &[BigInt]) -> Result<(LatticeVec, BigInt)> {
    let mn = dot(m, n)?;
    let n = if mn.is_negative() { n.iter().map(|x| -x).collect() } else { n.to_vec() };
    Ok((n, mn.abs()))
}

/// `v ↦ v + (w·v)·n` with `w = bend/e`.
fn transport_back(v: &Covector, bend: &ExponentPair, e: &BigInt, n: &[BigInt]) -> Result<Covector> {
    if bend.is_zero() || e.is_zero() {
        return Ok(v.clone());
    }
    let e = BigRational::from_integer(e.clone());
    let wm: RationalVec = to_rational(&bend.m).into_iter().map(|x| x / &e).collect();
    let wq: RationalVec = bend.q.iter().map(|&x| BigRational::from_integer(BigInt::from(x)) / &e).collect();
    let c = v.pair_rational(&wm, &wq)?;
    v.shift(&c, n)
}

/// Checks the tautness inequality at every crossing, transporting `v` backward from the endpoint.
pub fn check_taut(d: &ScatteringDiagram, line: &BrokenLine, v: &Covector, order: u32) -> Result<TautCertificate> {
    let mut cur = v.clone();
    let mut covs = vec![cur.clone()];
    let mut checks = Vec::new();
    for (idx, ev) in line.events.iter().enumerate().rev() {
        let inn = &ev.in_monomial.1;
        let normal = &d.walls[ev.walls[0]].normal;
        let (n, e) = oriented(&inn.m, normal)?;
        let budget = order.saturating_sub(inn.degree());
        let chosen = cur.pair(&ev.bend)?;
        let mut best = chosen.clone();
        if budget > 0 {
            let f = group_series(d, &ev.walls, budget)?;
            let e64: u64 = (&e).try_into().map_err(|_| Error::Domain("crossing exponent too large".into()))?;
            for alt in f.pow_nonneg(e64).terms().keys() {
                let val = cur.pair(alt)?;
                if val < best {
                    best = val;
                }
            }
        }
        checks.push(TautCheck { event: idx, holds: chosen <= best, chosen, best });
        cur = transport_back(&cur, &ev.bend, &e, &n)?;
        if !ev.bend.is_zero() {
            covs.push(cur.clone());
        }
    }
    covs.reverse();
    checks.reverse();
    Ok(TautCertificate { covector_transport: covs, checked_inequalities: checks })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceOutcome {
    Line(Box<BrokenLine>, TautCertificate),
    /// The trace needs a bend of total degree at least the order.
    BeyondOrder,
    /// The trace demands the largest bend on a wall whose function is not finite at this order.
    UnboundedBend { wall: usize },
}

impl TraceOutcome {
    pub fn line(&self) -> Option<&BrokenLine> {
        match self {
            TraceOutcome::Line(l, _) => Some(l),
            _ => None,
        }
    }
}

/// Largest `j` with a nonzero coefficient, if the stored function is evidently a polynomial.
pub fn finite_degree(d: &ScatteringDiagram, wall: usize) -> Option<u32> {
    let f = &d.walls[wall].function;
    let j = f.coeffs.len() as u32;
    ((j + 1) * f.base.degree() < f.order).then_some(j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMode {
    Lambda,
    LambdaTranspose,
}

enum Rule<'a> {
    Covector(&'a Covector),
    Lambda(LambdaMode),
}

struct Step {
    walls: Vec<usize>,
    point: PerturbedPoint,
    bend: ExponentPair,
    e: BigInt,
}

/// Traces backward from `p`, choosing bend multiples per wall via `rule`.
fn trace(d: &ScatteringDiagram, rule: Rule, p: &PerturbedPoint, m_final: &[BigInt], order: u32) -> Result<TraceOutcome> {
    let r = d.r;
    let mut m = m_final.to_vec();
    let mut v = match &rule {
        Rule::Covector(v) => Some((*v).clone()),
        Rule::Lambda(_) => None,
    };
    let mut degree = 0u32;
    let mut steps: Vec<Step> = Vec::new();
    let mut x = p.clone();
    let cap = (order as usize + 1) * (d.walls.len() + 1) + 16;
    while let Some(hit) = next_crossing(d, &x, &m)? {
        if steps.len() > cap {
            return Err(Error::Internal("winding cap exceeded in taut trace".into()));
        }
        let (n, e) = oriented(&m, &hit.normal)?;
        let mut w_star = ExponentPair::zero(2, r);
        for &i in &hit.walls {
            let wall = &d.walls[i];
            let b = &wall.function.base;
            let want_max = match &rule {
                Rule::Covector(_) => {
                    let s = v.as_ref().unwrap().pair(b)?.sign();
                    if s == 0 {
                        return Err(Error::genericity(
                            format!("covector ties between bend multiples of {b}"),
                            hit.point.to_string(),
                        ));
                    }
                    s < 0
                }
                Rule::Lambda(mode) => {
                    let positive = dot(&m, &wall.normal)?.is_positive();
                    positive == (*mode == LambdaMode::Lambda)
                }
            };
            if want_max && !wall.function.is_trivial() {
                let Some(j) = finite_degree(d, i) else {
                    return Ok(TraceOutcome::UnboundedBend { wall: i });
                };
                w_star = w_star.add(&b.scale(j));
            }
        }
        let e32: u32 = (&e).try_into().map_err(|_| Error::Domain("crossing exponent too large".into()))?;
        let bend = w_star.scale(e32);
        degree += bend.degree();
        if degree >= order {
            return Ok(TraceOutcome::BeyondOrder);
        }
        if let Some(cur) = v.as_mut() {
            *cur = transport_back(cur, &bend, &e, &n)?;
        }
        m = m.iter().zip(&bend.m).map(|(a, b)| a - b).collect();
        x = hit.point.clone();
        steps.push(Step { walls: hit.walls, point: hit.point, bend, e });
    }
    let initial = ExponentPair::from_m(m, r);
    let mut events = Vec::new();
    let mut coef = BigInt::one();
    let mut exp = initial.clone();
    for s in steps.iter().rev() {
        let e64: u64 = (&s.e).try_into().map_err(|_| Error::Domain("crossing exponent too large".into()))?;
        let factor = group_series(d, &s.walls, order)?.pow_nonneg(e64).coefficient(&s.bend);
        if factor.is_zero() {
            return Err(Error::Internal("traced bend is not a term of the wall-crossing".into()));
        }
        let base_deg = d.walls[s.walls[0]].function.base.degree();
        let out = exp.add(&s.bend);
        let out_coef = &coef * &factor;
        events.push(BendEvent {
            walls: s.walls.clone(),
            point: s.point.clone(),
            bend_multiple: if s.walls.len() == 1 { s.bend.degree() / base_deg } else { s.bend.degree() },
            bend: s.bend.clone(),
            factor,
            in_monomial: (coef.clone(), exp.clone()),
            out_monomial: (out_coef.clone(), out.clone()),
        });
        coef = out_coef;
        exp = out;
    }
    let line = BrokenLine { initial, endpoint: p.clone(), events, coefficient: coef, final_exponent: exp };
    let cert_v = match rule {
        Rule::Covector(v) => v.clone(),
        Rule::Lambda(_) => return Ok(TraceOutcome::Line(Box::new(line), TautCertificate { covector_transport: vec![], checked_inequalities: vec![] })),
    };
    let cert = check_taut(d, &line, &cert_v, order)?;
    Ok(TraceOutcome::Line(Box::new(line), cert))
}

/// The `v`-taut broken line ending at `p` with final `x`-exponent `m_final`, built backward.
pub fn taut_trace(d: &ScatteringDiagram, v: &Covector, p: &PerturbedPoint, m_final: &[BigInt], order: u32) -> Result<TraceOutcome> {
    trace(d, Rule::Covector(v), p, m_final, order)
}

/// Λ-taut (resp. Λᵀ-taut) trace, certified against `(Λᵀp)`-tautness (resp. `(Λp)`-tautness).
pub fn lambda_taut_trace(
    d: &ScatteringDiagram,
    lambda: &Matrix,
    mode: LambdaMode,
    p: &PerturbedPoint,
    m_final: &[BigInt],
    order: u32,
) -> Result<TraceOutcome> {
    let out = trace(d, Rule::Lambda(mode), p, m_final, order)?;
    let TraceOutcome::Line(line, _) = out else { return Ok(out) };
    let m = match mode {
        LambdaMode::Lambda => lambda.transpose(),
        LambdaMode::LambdaTranspose => lambda.clone(),
    };
    let v = Covector::from_matrix(&m, p, d.r)?;
    let cert = check_taut(d, &line, &v, order)?;
    Ok(TraceOutcome::Line(line, cert))
}

/// `m_t·L·Γ(t)` evaluated at the later endpoint of each segment.
pub fn momentum(line: &BrokenLine, l: &Matrix) -> Result<Vec<Perturbed>> {
    let mut out = Vec::new();
    let mut seg_ends: Vec<(&ExponentPair, &PerturbedPoint)> = Vec::new();
    let mut cur = &line.initial;
    for e in &line.events {
        seg_ends.push((cur, &e.point));
        cur = &e.out_monomial.1;
    }
    seg_ends.push((cur, &line.endpoint));
    for (exp, pt) in seg_ends {
        let mt: RationalVec = l.transpose().apply_int(&exp.m)?;
        out.push(pt.pair(&mt)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropSample {
    pub ray: RationalVec,
    pub values: Vec<(u32, ValuationResult)>,
    /// Scales at which `val(s·v) ≠ s·val(v)` among finite values.
    pub linearity_breaks: Vec<u32>,
}

/// Samples `val_{s·v}(ϑ_{u,p})` for `s = 1..=scales` along each ray.
pub fn tropicalize(
    d: &ScatteringDiagram,
    u: &ExponentPair,
    rays: &[RationalVec],
    p: &PerturbedPoint,
    k: u32,
    scales: u32,
) -> Result<Vec<TropSample>> {
    let orders = certification_orders(k, d.order);
    let lines = enumerate_broken_lines(d, u, p, *orders.last().ok_or(Error::OrderMismatch(k, d.order))?)?;
    let mut out = Vec::new();
    for ray in rays {
        let mut values = Vec::new();
        let mut breaks = Vec::new();
        let mut unit: Option<BigRational> = None;
        for s in 1..=scales {
            let sv: RationalVec = ray.iter().map(|x| x * BigRational::from_integer(BigInt::from(s))).collect();
            let res = val_lines(&lines, &Covector::generic(sv, d.r), &orders)?;
            if s == 1 {
                unit = res.value.clone();
            } else if let (Some(u1), Some(us)) = (&unit, &res.value) {
                if *us != u1 * BigRational::from_integer(BigInt::from(s)) {
                    breaks.push(s);
                }
            }
            values.push((s, res));
        }
        out.push(TropSample { ray: ray.clone(), values, linearity_breaks: breaks });
    }
    Ok(out)
}
