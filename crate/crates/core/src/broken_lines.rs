//! Broken lines with fixed ends, theta functions, structure constants, and limiting basepoints.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{cross, default_eps2, dot, fmt_vec, LatticeVec, Perturbed, PerturbedPoint, RationalVec};
use crate::scattering::{path_ordered_product, PlanarPath, ScatteringDiagram, SupportKind};
use crate::series::{ExponentPair, TruncatedSeries};

/// One wall crossing (possibly without bending) along a broken line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BendEvent {
    /// Indices of the parallel walls crossed simultaneously.
    pub walls: Vec<usize>,
    pub point: PerturbedPoint,
    /// `out − in`; zero when the line passes straight through.
    pub bend: ExponentPair,
    /// Total y-degree of the bend divided by that of the wall exponent (single-exponent crossings).
    pub bend_multiple: u32,
    /// Coefficient of `z^bend` in `F^{|m·n|}`.
    pub factor: BigInt,
    pub in_monomial: (BigInt, ExponentPair),
    pub out_monomial: (BigInt, ExponentPair),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrokenLine {
    pub initial: ExponentPair,
    pub endpoint: PerturbedPoint,
    /// Crossings in the order they are traversed, from infinity to the endpoint.
    pub events: Vec<BendEvent>,
    pub coefficient: BigInt,
    pub final_exponent: ExponentPair,
}

impl BrokenLine {
    /// Exponents carried by the segments, from the unbounded one to the last.
    pub fn segment_exponents(&self) -> Vec<ExponentPair> {
        let mut out = vec![self.initial.clone()];
        for e in &self.events {
            if !e.bend.is_zero() {
                out.push(e.out_monomial.1.clone());
            }
        }
        out
    }

    pub fn bend_count(&self) -> usize {
        self.events.iter().filter(|e| !e.bend.is_zero()).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaFunction {
    pub series: TruncatedSeries,
    pub index: ExponentPair,
    pub basepoint: PerturbedPoint,
    pub stabilized: bool,
}

pub(crate) struct Hit {
    pub(crate) walls: Vec<usize>,
    pub(crate) point: PerturbedPoint,
    pub(crate) normal: LatticeVec,
}

/// The first group of walls met by the ray `X + τ·m`, `τ > 0`.
pub(crate) fn next_crossing(d: &ScatteringDiagram, x: &PerturbedPoint, m: &[BigInt]) -> Result<Option<Hit>> {
    let mut best: Option<(Perturbed, Vec<usize>)> = None;
    for (i, w) in d.walls.iter().enumerate() {
        let mn = dot(m, &w.normal)?;
        let h = w.side(x)?;
        if mn.is_zero() {
            if h.is_zero() {
                return Err(Error::genericity("broken line runs along a wall", x.to_string()));
            }
            continue;
        }
        let tau = (-&h).scale(&BigRational::from_integer(mn.clone()).recip());
        if tau.sign() <= 0 {
            continue;
        }
        if w.support.kind == SupportKind::Ray {
            let md = dot(m, &w.support.direction)?;
            let pos = &w.along(x)? + &tau.scale(&BigRational::from_integer(md));
            match pos.sign() {
                0 => return Err(Error::genericity("broken line passes through a ray apex", fmt_vec(&w.support.base))),
                s if s < 0 => continue,
                _ => {}
            }
        }
        match &mut best {
            Some((t, group)) if *t == tau => group.push(i),
            Some((t, _)) if *t < tau => {}
            _ => best = Some((tau, vec![i])),
        }
    }
    let Some((tau, walls)) = best else { return Ok(None) };
    let point = x.advance(&tau, m)?;
    let normal = d.walls[walls[0]].normal.clone();
    if walls.iter().any(|&i| !cross(&d.walls[i].normal, &normal).is_zero()) {
        return Err(Error::genericity("broken line passes through a joint", point.to_string()));
    }
    Ok(Some(Hit { walls, point, normal }))
}

/// Exponents `u + Σ nᵢbᵢ` over wall exponents `bᵢ`, with total y-degree below `order`.
fn candidate_finals(d: &ScatteringDiagram, u: &ExponentPair, order: u32) -> Vec<ExponentPair> {
    let gens = d.exponent_cone();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([u.clone()]);
    seen.insert(u.clone());
    while let Some(e) = queue.pop_front() {
        for g in &gens {
            let next = e.add(g);
            if next.degree() < order && seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}

struct Search<'a> {
    d: &'a ScatteringDiagram,
    u: ExponentPair,
    p: PerturbedPoint,
    order: u32,
    cap: usize,
    powers: HashMap<(Vec<usize>, u64), TruncatedSeries>,
    found: Vec<BrokenLine>,
}

struct Step {
    walls: Vec<usize>,
    point: PerturbedPoint,
    bend: ExponentPair,
    bend_multiple: u32,
    factor: BigInt,
}

impl Search<'_> {
    fn group_power(&mut self, walls: &[usize], e: u64) -> Result<&TruncatedSeries> {
        let key = (walls.to_vec(), e);
        if !self.powers.contains_key(&key) {
            let (d2, r) = (2, self.d.r);
            let mut f = TruncatedSeries::one(d2, r, self.order);
            for &i in walls {
                f = f.mul(&self.d.walls[i].function.to_series().with_order(self.order))?;
            }
            self.powers.insert(key.clone(), f.pow_nonneg(e));
        }
        Ok(&self.powers[&key])
    }

    fn dfs(&mut self, x: &PerturbedPoint, cur: &ExponentPair, steps: &mut Vec<Step>) -> Result<()> {
        if cur.q == self.u.q {
            if cur.m == self.u.m {
                self.finish(x, steps)?;
            }
            return Ok(());
        }
        if steps.len() > self.cap {
            return Err(Error::Internal(format!("winding cap exceeded at {x}")));
        }
        let Some(hit) = next_crossing(self.d, x, &cur.m)? else { return Ok(()) };
        let e = dot(&cur.m, &hit.normal)?.abs();
        let e: u64 = (&e).try_into().map_err(|_| Error::Domain("crossing exponent too large".into()))?;
        let base_deg = if hit.walls.len() == 1 { self.d.walls[hit.walls[0]].function.base.degree() } else { 0 };
        let terms: Vec<(ExponentPair, BigInt)> = self
            .group_power(&hit.walls, e)?
            .terms()
            .iter()
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        for (delta, a) in terms {
            let Some(prev) = cur.checked_sub(&delta) else { continue };
            if prev.q.iter().zip(&self.u.q).any(|(p, u)| p < u) {
                continue;
            }
            steps.push(Step {
                walls: hit.walls.clone(),
                point: hit.point.clone(),
                bend_multiple: delta.degree().checked_div(base_deg).unwrap_or(delta.degree()),
                bend: delta,
                factor: a,
            });
            self.dfs(&hit.point, &prev, steps)?;
            steps.pop();
        }
        Ok(())
    }

    /// Adds the straight crossings of the unbounded segment and records the line.
    fn finish(&mut self, x: &PerturbedPoint, steps: &[Step]) -> Result<()> {
        let mut tail = Vec::new();
        let mut pos = x.clone();
        while let Some(hit) = next_crossing(self.d, &pos, &self.u.m)? {
            if tail.len() > self.cap {
                return Err(Error::Internal("winding cap exceeded on the unbounded segment".into()));
            }
            pos = hit.point.clone();
            tail.push(Step {
                walls: hit.walls,
                point: hit.point,
                bend: ExponentPair::zero(self.u.m.len(), self.u.q.len()),
                bend_multiple: 0,
                factor: BigInt::one(),
            });
        }
        // backward order: steps from p outward, then the tail
        let mut events = Vec::new();
        let mut coef = BigInt::one();
        let mut exp = self.u.clone();
        for s in tail.iter().rev().chain(steps.iter().rev()) {
            let out_exp = exp.add(&s.bend);
            let out_coef = &coef * &s.factor;
            events.push(BendEvent {
                walls: s.walls.clone(),
                point: s.point.clone(),
                bend: s.bend.clone(),
                bend_multiple: s.bend_multiple,
                factor: s.factor.clone(),
                in_monomial: (coef.clone(), exp.clone()),
                out_monomial: (out_coef.clone(), out_exp.clone()),
            });
            coef = out_coef;
            exp = out_exp;
        }
        self.found.push(BrokenLine {
            initial: self.u.clone(),
            endpoint: self.p.clone(),
            events,
            coefficient: coef,
            final_exponent: exp,
        });
        Ok(())
    }
}

fn check_order(d: &ScatteringDiagram, order: u32) -> Result<()> {
    if order > d.order {
        return Err(Error::OrderMismatch(order, d.order));
    }
    Ok(())
}

/// All broken lines with ends `(u, p)` whose final monomial survives modulo `I^order`.
pub fn enumerate_broken_lines(d: &ScatteringDiagram, u: &ExponentPair, p: &PerturbedPoint, order: u32) -> Result<Vec<BrokenLine>> {
    check_order(d, order)?;
    if u.q.len() != d.r || u.m.len() != 2 || p.dim() != 2 {
        return Err(Error::Dimension { expected: 2 + d.r, got: u.m.len() + u.q.len() });
    }
    if u.degree() >= order {
        return Ok(Vec::new());
    }
    if u.m.iter().all(Zero::is_zero) {
        return Ok(vec![BrokenLine {
            initial: u.clone(),
            endpoint: p.clone(),
            events: Vec::new(),
            coefficient: BigInt::one(),
            final_exponent: u.clone(),
        }]);
    }
    for w in &d.walls {
        if w.side(p)?.is_zero() {
            return Err(Error::genericity("endpoint lies on a wall", p.to_string()));
        }
    }
    let full = d;
    let d = d.truncate(order);
    let mut search = Search {
        d: &d,
        u: u.clone(),
        p: p.clone(),
        order,
        cap: (order as usize + 1) * (d.walls.len() + 1) + 16,
        powers: HashMap::new(),
        found: Vec::new(),
    };
    for fin in candidate_finals(&d, u, order) {
        search.dfs(p, &fin, &mut Vec::new())?;
    }
    let mut found = search.found;
    // event wall indices refer to the caller's diagram, not the truncated one
    let kept: Vec<usize> = (0..full.walls.len()).filter(|&i| !full.walls[i].function.truncate(order).is_trivial()).collect();
    for l in &mut found {
        for e in &mut l.events {
            for i in &mut e.walls {
                *i = kept[*i];
            }
        }
    }
    found.sort_by(|a, b| {
        a.final_exponent
            .cmp(&b.final_exponent)
            .then_with(|| a.events.len().cmp(&b.events.len()))
            .then_with(|| format!("{:?}", a.events).cmp(&format!("{:?}", b.events)))
    });
    Ok(found)
}

pub fn theta_from_lines(lines: &[BrokenLine], u: &ExponentPair, p: &PerturbedPoint, r: usize, order: u32) -> ThetaFunction {
    let mut series = TruncatedSeries::zero(u.m.len(), r, order);
    for l in lines {
        series.add_term(l.final_exponent.clone(), l.coefficient.clone());
    }
    ThetaFunction { series, index: u.clone(), basepoint: p.clone(), stabilized: false }
}

/// `ϑ_{u,p} = Σ_Γ c_Γ z^{u_Γ}`.
pub fn theta_function(d: &ScatteringDiagram, u: &ExponentPair, p: &PerturbedPoint, order: u32) -> Result<ThetaFunction> {
    let lines = enumerate_broken_lines(d, u, p, order)?;
    Ok(theta_from_lines(&lines, u, p, d.r, order))
}

/// `ϑ_{u,p₂} = E_γ(ϑ_{u,p₁})` along a path starting at the current basepoint.
pub fn transport(d: &ScatteringDiagram, theta: &ThetaFunction, path: &PlanarPath) -> Result<ThetaFunction> {
    if path.start() != &theta.basepoint {
        return Err(Error::Domain(format!(
            "path starts at {} but the theta function is based at {}",
            path.start(),
            theta.basepoint
        )));
    }
    Ok(ThetaFunction {
        series: path_ordered_product(d, path, &theta.series)?,
        index: theta.index.clone(),
        basepoint: path.end().clone(),
        stabilized: theta.stabilized,
    })
}

/// Coefficient of `z^u` in `∏ ϑ_{uᵢ,p}` for `p` infinitesimally close to `u_M`.
pub fn structure_constants(d: &ScatteringDiagram, u_list: &[ExponentPair], u: &ExponentPair, order: u32) -> Result<BigInt> {
    if u.m.iter().all(Zero::is_zero) {
        return Err(Error::Unsupported("structure constants need u_M ≠ 0 to place the basepoint".into()));
    }
    let base: RationalVec = crate::lattice::to_rational(&u.m);
    let mu1 = crate::lattice::default_eps1();
    let near = PerturbedPoint::new(base.clone(), mu1.clone(), default_eps2())?;
    let nearer = PerturbedPoint::new(base, vec![BigRational::zero(), BigRational::zero()], mu1)?;
    let a = product_coefficient(d, u_list, u, &near, order)?;
    let b = product_coefficient(d, u_list, u, &nearer, order)?;
    if a != b {
        return Err(Error::genericity(
            format!("structure constant changed under shrinking ({a} vs {b})"),
            fmt_vec(&u.m),
        ));
    }
    Ok(a)
}

fn product_coefficient(
    d: &ScatteringDiagram,
    u_list: &[ExponentPair],
    u: &ExponentPair,
    p: &PerturbedPoint,
    order: u32,
) -> Result<BigInt> {
    let mut prod = TruncatedSeries::one(2, d.r, order);
    for ui in u_list {
        prod = prod.mul(&theta_function(d, ui, p, order)?.series)?;
    }
    Ok(prod.coefficient(u))
}

/// Expansion of `f` in the theta basis at `p`, peeling off minimal-degree terms.
pub fn theta_expansion(
    d: &ScatteringDiagram,
    f: &TruncatedSeries,
    p: &PerturbedPoint,
) -> Result<Vec<(ExponentPair, BigInt)>> {
    let order = f.order();
    let mut rest = f.clone();
    let mut out = Vec::new();
    while let Some(level) = rest.min_degree() {
        let lead: Vec<(ExponentPair, BigInt)> = rest
            .terms()
            .iter()
            .filter(|(e, _)| e.degree() == level)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        for (e, c) in lead {
            let th = theta_function(d, &e, p, order)?;
            rest = rest.sub(&th.series.scale(&c))?;
            out.push((e, c));
        }
    }
    Ok(out)
}

/// `ϑ_u` at `p + ε·μ + ε²·(default second-order direction)`.
pub fn limit_theta(d: &ScatteringDiagram, u: &ExponentPair, p: &[BigRational], mu: &[BigRational], order: u32) -> Result<ThetaFunction> {
    let pt = PerturbedPoint::new(p.to_vec(), mu.to_vec(), default_eps2())?;
    theta_function(d, u, &pt, order)
}

/// Recomputes at `k, k+2, …` (up to the diagram order) until two consecutive increases agree.
pub fn stabilize(d: &ScatteringDiagram, u: &ExponentPair, p: &PerturbedPoint, k_start: u32) -> Result<(ThetaFunction, bool)> {
    let mut k = k_start.min(d.order);
    let mut prev = theta_function(d, u, p, k)?;
    let mut agreements = 0;
    while k + 2 <= d.order {
        k += 2;
        let next = theta_function(d, u, p, k)?;
        if next.series.terms() == prev.series.terms() {
            agreements += 1;
        } else {
            agreements = 0;
        }
        prev = next;
        if agreements >= 2 {
            prev.stabilized = true;
            return Ok((prev, true));
        }
    }
    Ok((prev, false))
}

/// Scales every exponent of a broken line by `k`, keeping its support.
pub fn scale_line(line: &BrokenLine, k: u32, d: &ScatteringDiagram) -> Result<BrokenLine> {
    let mut events = Vec::new();
    let mut coef = BigInt::one();
    for e in &line.events {
        let inn = e.in_monomial.1.scale(k);
        let bend = e.bend.scale(k);
        let mut f = TruncatedSeries::one(2, d.r, u32::MAX);
        for &i in &e.walls {
            f = f.mul(&d.walls[i].function.to_series().with_order(u32::MAX))?;
        }
        let normal = &d.walls[e.walls[0]].normal;
        let power = dot(&inn.m, normal)?.abs();
        let power: u64 = (&power).try_into().map_err(|_| Error::Domain("exponent too large".into()))?;
        let factor = f.pow_nonneg(power).coefficient(&bend);
        if factor.is_zero() {
            return Err(Error::Internal("scaled bend is not a term of the wall-crossing".into()));
        }
        let out = inn.add(&bend);
        let new_coef = &coef * &factor;
        events.push(BendEvent {
            walls: e.walls.clone(),
            point: e.point.clone(),
            bend,
            bend_multiple: e.bend_multiple * k,
            factor,
            in_monomial: (coef.clone(), inn),
            out_monomial: (new_coef.clone(), out.clone()),
        });
        coef = new_coef;
    }
    Ok(BrokenLine {
        initial: line.initial.scale(k),
        endpoint: line.endpoint.clone(),
        final_exponent: line.final_exponent.scale(k),
        coefficient: coef,
        events,
    })
}

/// Whether every coefficient is nonnegative.
pub fn is_positive(theta: &ThetaFunction) -> bool {
    theta.series.terms().values().all(|c| !c.is_negative())
}
