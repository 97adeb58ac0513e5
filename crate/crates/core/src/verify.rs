//! Theorem-level checks producing deterministic reports.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::broken_lines::{theta_expansion, BrokenLine, ThetaFunction};
use crate::error::{Error, Result};
use crate::fixtures::{Chamber, LineCache, Model};
use crate::lattice::{fmt_vec, lvec, to_rational, LatticeVec, PerturbedPoint, RationalVec};
use crate::matrix::Matrix;
use crate::polytope::hull_vertices;
use crate::scattering::consistent_completion;
use crate::seed::{initial_diagram, chiral_dual, chiral_langlands_dual, langlands_dual, lambda_find, LambdaOutcome, LinearMorphism, SeedDatum};
use crate::series::{specialize, ExponentPair, LaurentPoly, Specialization, TruncatedSeries};
use crate::tropical::{
    certification_orders, certify, check_taut, taut_trace, val_lines_certified, Certification, Covector, TraceOutcome, ValuationResult,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    NonFinite,
    Uncertified,
    Unresolved,
    Unstabilized,
    Genericity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub inputs: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Skip {
    pub inputs: String,
    pub reason: SkipReason,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: serde_json::Value,
    pub instances: usize,
    pub passes: usize,
    pub failures: Vec<Failure>,
    pub skipped: Vec<Skip>,
}

impl CheckReport {
    pub fn new(name: &str, params: serde_json::Value) -> Self {
        CheckReport { name: name.into(), params, instances: 0, passes: 0, failures: Vec::new(), skipped: Vec::new() }
    }

    pub fn pass(&mut self) {
        self.instances += 1;
        self.passes += 1;
    }

    pub fn fail(&mut self, inputs: impl Into<String>, expected: impl Into<String>, got: impl Into<String>) {
        self.instances += 1;
        self.failures.push(Failure { inputs: inputs.into(), expected: expected.into(), got: got.into() });
    }

    pub fn skip(&mut self, inputs: impl Into<String>, reason: SkipReason, detail: impl Into<String>) {
        self.instances += 1;
        self.skipped.push(Skip { inputs: inputs.into(), reason, detail: detail.into() });
    }

    pub fn check(&mut self, ok: bool, inputs: impl Into<String>, expected: impl Into<String>, got: impl Into<String>) {
        if ok {
            self.pass();
        } else {
            self.fail(inputs, expected, got);
        }
    }

    pub fn absorb(&mut self, other: CheckReport) {
        self.instances += other.instances;
        self.passes += other.passes;
        self.failures.extend(other.failures);
        self.skipped.extend(other.skipped);
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn skip_counts(&self) -> BTreeMap<SkipReason, usize> {
        let mut out = BTreeMap::new();
        for s in &self.skipped {
            *out.entry(s.reason).or_insert(0) += 1;
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} instances, {} passed, {} failed, {} skipped",
            self.name,
            self.instances,
            self.passes,
            self.failures.len(),
            self.skipped.len()
        )
    }
}

fn skip_reason(c: Certification) -> Option<SkipReason> {
    match c {
        Certification::Exact => None,
        Certification::UpperBound => Some(SkipReason::Uncertified),
        Certification::UnboundedSuspected | Certification::Infinite => Some(SkipReason::NonFinite),
    }
}

fn show(v: &Option<BigRational>) -> String {
    v.as_ref().map_or_else(|| "+inf".into(), ToString::to_string)
}

/// Lattice points of `[−b, b]²` without the origin.
pub fn box_points(b: i64) -> Vec<LatticeVec> {
    let mut out = Vec::new();
    for x in -b..=b {
        for y in -b..=b {
            if (x, y) != (0, 0) {
                out.push(lvec(&[x, y]));
            }
        }
    }
    out
}

/// Per-order valuation of a series truncated at each order in `orders`.
fn series_val(s: &TruncatedSeries, v: &Covector, orders: &[u32]) -> Result<ValuationResult> {
    let mut per_order = Vec::new();
    let mut witness = None;
    for &o in orders {
        let mut best: Option<(crate::lattice::Perturbed, &ExponentPair)> = None;
        for e in s.terms().keys().filter(|e| e.degree() < o) {
            let val = v.pair(e)?;
            if best.as_ref().is_none_or(|(b, _)| val < *b) {
                best = Some((val, e));
            }
        }
        if o == orders[0] {
            witness = best.as_ref().map(|b| crate::tropical::Witness::Monomial(b.1.clone()));
        }
        per_order.push((o, best.map(|b| b.0.base())));
    }
    Ok(ValuationResult { value: per_order[0].1.clone(), certified: certify(&per_order), order: orders[0], witness, per_order, witness_taut: None })
}

/// `val_v(Σ c_u ϑ_u) = min_u val_v(ϑ_u)` on one covector, with both sides certified across orders.
pub fn vit_check_cached(cache: &LineCache, coeffs: &[(ExponentPair, BigInt)], v: &Covector, k: u32) -> Result<CheckReport> {
    let mut rep = CheckReport::new("vit", json!({"k": k, "v": v.to_string()}));
    let inputs = format!(
        "v={v}; f={}",
        coeffs.iter().map(|(u, c)| format!("{c}·ϑ{}", fmt_vec(&u.m))).collect::<Vec<_>>().join(" + ")
    );
    let orders = certification_orders(k, cache.order);
    let nonzero: Vec<&(ExponentPair, BigInt)> = coeffs.iter().filter(|(_, c)| !c.is_zero()).collect();
    if nonzero.is_empty() {
        rep.skip(inputs, SkipReason::NonFinite, "zero combination");
        return Ok(rep);
    }
    let mut rhs: Option<BigRational> = None;
    let mut sum = TruncatedSeries::zero(2, cache.diagram.r, cache.order);
    for (u, c) in &nonzero {
        let lines = match cache.lines(u) {
            Ok(l) => l,
            Err(Error::Genericity { what, at }) => {
                rep.skip(inputs, SkipReason::Genericity, format!("{what} at {at}"));
                return Ok(rep);
            }
            Err(e) => return Err(e),
        };
        let res = val_lines_certified(&cache.diagram, &lines, v, &orders)?;
        if let Some(reason) = skip_reason(res.certified) {
            rep.skip(inputs, reason, format!("ϑ{} is {}", fmt_vec(&u.m), res.certified.as_str()));
            return Ok(rep);
        }
        let val = res.value.expect("exact values are finite");
        rhs = Some(rhs.map_or(val.clone(), |r: BigRational| r.min(val)));
        sum = sum.add(&cache.theta(u, cache.order)?.series.scale(c))?;
    }
    let lhs = series_val(&sum, v, &orders)?;
    if let Some(reason) = skip_reason(lhs.certified) {
        rep.skip(inputs, reason, format!("combination is {}", lhs.certified.as_str()));
        return Ok(rep);
    }
    rep.check(lhs.value == rhs, inputs, show(&rhs), show(&lhs.value));
    Ok(rep)
}

pub fn vit_check(
    d: &crate::scattering::ScatteringDiagram,
    coeffs: &[(ExponentPair, BigInt)],
    v: &Covector,
    p: &PerturbedPoint,
    k: u32,
) -> Result<CheckReport> {
    let top = *certification_orders(k, d.order).last().ok_or(Error::OrderMismatch(k, d.order))?;
    vit_check_cached(&LineCache::new(d.clone(), p.clone(), top)?, coeffs, v, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Duality {
    Chiral,
    ChiralLanglands,
    Langlands,
}

impl Duality {
    pub fn as_str(self) -> &'static str {
        match self {
            Duality::Chiral => "chiral",
            Duality::ChiralLanglands => "chiral-langlands",
            Duality::Langlands => "langlands",
        }
    }
}

/// A model with a line cache at one chamber basepoint.
pub struct Side {
    pub model: Model,
    pub cache: LineCache,
}

impl Side {
    /// Positive or negative chamber; the negative one falls back to the swapped seed.
    pub fn new(model: Model, chamber: Chamber) -> Result<Self> {
        let model = match chamber {
            Chamber::Negative if model.minus.is_none() => model.swapped()?,
            _ => model,
        };
        let point = match chamber {
            Chamber::Negative => model.minus.clone().unwrap_or_else(|| model.plus.clone()),
            Chamber::Positive => model.plus.clone(),
        };
        let point = if chamber == Chamber::Negative && model.name.ends_with("(swapped)") { model.plus.clone() } else { point };
        let cache = LineCache::new(model.diagram.clone(), point, model.order())?;
        Ok(Side { model, cache })
    }

    pub fn val(&self, u: &ExponentPair, v: &Covector, k: u32) -> Result<ValuationResult> {
        let orders = certification_orders(k, self.cache.order);
        val_lines_certified(&self.cache.diagram, &self.cache.lines(u)?, v, &orders)
    }
}

#[derive(Clone, Debug)]
pub struct CertifiedPair {
    pub m: LatticeVec,
    pub n: LatticeVec,
    pub left: ValuationResult,
    pub right: ValuationResult,
}

pub struct ReciprocityRun {
    pub left: Side,
    pub right: Side,
    pub report: CheckReport,
    pub certified: Vec<CertifiedPair>,
}

fn dual_seed(s: &SeedDatum, duality: Duality) -> Result<SeedDatum> {
    match duality {
        Duality::Chiral => chiral_dual(s),
        Duality::ChiralLanglands => chiral_langlands_dual(s),
        Duality::Langlands => langlands_dual(s),
    }
}

fn val_or_skip(side: &Side, u: &ExponentPair, v: &Covector, k: u32) -> Result<std::result::Result<ValuationResult, (SkipReason, String)>> {
    match side.val(u, v, k) {
        Ok(r) => match skip_reason(r.certified) {
            None => Ok(Ok(r)),
            Some(reason) => Ok(Err((reason, format!("{} side is {}", side.model.name, r.certified.as_str())))),
        },
        Err(Error::Genericity { what, at }) => Ok(Err((SkipReason::Genericity, format!("{what} at {at}")))),
        Err(e) => Err(e),
    }
}

/// `val_n(Θ_{m,+}) = val_m(Θ^{dual}_{n,±})` over the box, at order `k` certified by `k+2`, `k+4`.
pub fn reciprocity_run(s: &SeedDatum, bx: i64, k: u32, duality: Duality) -> Result<ReciprocityRun> {
    let top = k + 4;
    let left = Side::new(Model::new("seed", s.clone(), top)?, Chamber::Positive)?;
    let dual = Model::new(&format!("{} dual", duality.as_str()), dual_seed(s, duality)?, top)?;
    let right_chamber = if duality == Duality::Langlands { Chamber::Negative } else { Chamber::Positive };
    let right = Side::new(dual, right_chamber)?;
    let pts = box_points(bx);
    let r_left = left.model.r();
    let r_right = right.model.r();
    pts.par_iter().try_for_each(|m| left.cache.lines(&ExponentPair::from_m(m.clone(), r_left)).map(|_| ()).or_else(ignore_genericity))?;
    pts.par_iter().try_for_each(|n| right.cache.lines(&ExponentPair::from_m(n.clone(), r_right)).map(|_| ()).or_else(ignore_genericity))?;
    let results: Vec<Result<(CheckReport, Option<CertifiedPair>)>> = pts
        .par_iter()
        .flat_map(|m| pts.par_iter().map(move |n| (m.clone(), n.clone())))
        .map(|(m, n)| {
            let mut rep = CheckReport::new("", json!(null));
            let inputs = format!("m={} n={}", fmt_vec(&m), fmt_vec(&n));
            let um = ExponentPair::from_m(m.clone(), r_left);
            let un = ExponentPair::from_m(n.clone(), r_right);
            let lhs = val_or_skip(&left, &um, &Covector::generic(to_rational(&n), r_left), k)?;
            let rhs = val_or_skip(&right, &un, &Covector::generic(to_rational(&m), r_right), k)?;
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => {
                    rep.check(a.value == b.value, inputs, show(&a.value), show(&b.value));
                    Ok((rep, Some(CertifiedPair { m, n, left: a, right: b })))
                }
                (Err((reason, detail)), _) | (_, Err((reason, detail))) => {
                    rep.skip(inputs, reason, detail);
                    Ok((rep, None))
                }
            }
        })
        .collect();
    let mut report = CheckReport::new(
        &format!("reciprocity-{}", duality.as_str()),
        json!({"box": bx, "k": k, "duality": duality.as_str()}),
    );
    let mut certified = Vec::new();
    for r in results {
        let (rep, pair) = r?;
        report.absorb(rep);
        certified.extend(pair);
    }
    Ok(ReciprocityRun { left, right, report, certified })
}

fn ignore_genericity(e: Error) -> Result<()> {
    match e {
        Error::Genericity { .. } => Ok(()),
        e => Err(e),
    }
}

pub fn reciprocity_check(s: &SeedDatum, bx: i64, k: u32, duality: Duality) -> Result<CheckReport> {
    Ok(reciprocity_run(s, bx, k, duality)?.report)
}

/// `val_{Λm₁}(Θ_{m₂,+}) = val_{Λᵀm₂}(Θ_{m₁,−})` for the Λ-structure found by `lambda_find`.
pub fn lambda_reciprocity_check(s: &SeedDatum, bx: i64, k: u32) -> Result<CheckReport> {
    let mut report = CheckReport::new("reciprocity-lambda", json!({"box": bx, "k": k}));
    let lambda = match lambda_find(s) {
        LambdaOutcome::Found(l) => l.l,
        LambdaOutcome::Absent { witness } => {
            report.skip("all", SkipReason::Unresolved, format!("no Λ-structure; kernel witness {}", witness.as_deref().map(fmt_vec).unwrap_or_default()));
            return Ok(report);
        }
    };
    let top = k + 4;
    let model = Model::new("seed", s.clone(), top)?;
    let plus = Side::new(model.clone(), Chamber::Positive)?;
    let minus = Side::new(model, Chamber::Negative)?;
    let pts = box_points(bx);
    let r = plus.model.r();
    let lt = lambda.transpose();
    let results: Vec<Result<CheckReport>> = pts
        .par_iter()
        .flat_map(|m1| pts.par_iter().map(move |m2| (m1.clone(), m2.clone())))
        .map(|(m1, m2)| {
            let mut rep = CheckReport::new("", json!(null));
            let inputs = format!("m1={} m2={}", fmt_vec(&m1), fmt_vec(&m2));
            let v1 = Covector::generic(lambda.apply_int(&m1)?, r);
            let v2 = Covector::generic(lt.apply_int(&m2)?, r);
            let lhs = val_or_skip(&plus, &ExponentPair::from_m(m2.clone(), r), &v1, k)?;
            let rhs = val_or_skip(&minus, &ExponentPair::from_m(m1.clone(), r), &v2, k)?;
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => rep.check(a.value == b.value, inputs, show(&a.value), show(&b.value)),
                (Err((reason, detail)), _) | (_, Err((reason, detail))) => rep.skip(inputs, reason, detail),
            }
            Ok(rep)
        })
        .collect();
    for r in results {
        report.absorb(r?);
    }
    Ok(report)
}

/// Minimizing witnesses of certified pairs are taut, and the taut trace from their final exponent recovers the index.
pub fn taut_minimizer_check(run: &ReciprocityRun, k: u32) -> Result<CheckReport> {
    let mut report = CheckReport::new("taut-minimizers", json!({"k": k}));
    for pair in &run.certified {
        for (side, idx, cov, res) in [
            (&run.left, &pair.m, &pair.n, &pair.left),
            (&run.right, &pair.n, &pair.m, &pair.right),
        ] {
            let inputs = format!("{} u={} v={}", side.model.name, fmt_vec(idx), fmt_vec(cov));
            let Some(line) = res.witness_line() else {
                report.fail(inputs, "witness line", "none");
                continue;
            };
            let v = Covector::generic(to_rational(cov), side.model.r());
            let cert = check_taut(&side.cache.diagram, line, &v, res.order)?;
            if !cert.is_taut() {
                report.fail(inputs, "taut witness", format!("{} violated bends", cert.checked_inequalities.iter().filter(|c| !c.holds).count()));
                continue;
            }
            match taut_trace(&side.cache.diagram, &v, &side.cache.point, &line.final_exponent.m, side.cache.order)? {
                TraceOutcome::Line(traced, _) => {
                    let ok = traced.initial == line.initial && traced.final_exponent == line.final_exponent;
                    report.check(ok, inputs, format!("{} → {}", line.initial, line.final_exponent), format!("{} → {}", traced.initial, traced.final_exponent));
                }
                other => report.fail(inputs, "traced line", format!("{other:?}")),
            }
        }
    }
    Ok(report)
}

/// Coefficient 1 at every vertex of the Newton polytope of a stabilized theta function.
pub fn newton_monic_check(theta: &ThetaFunction) -> CheckReport {
    let mut rep = CheckReport::new("newton", json!({"index": theta.index.to_string(), "order": theta.series.order()}));
    let inputs = format!("ϑ{}", theta.index);
    if !theta.stabilized {
        rep.skip(inputs, SkipReason::Unstabilized, "series not stabilized");
        return rep;
    }
    let exps: Vec<&ExponentPair> = theta.series.terms().keys().collect();
    let flat: Vec<LatticeVec> = exps.iter().map(|e| e.flat()).collect();
    for i in hull_vertices(&flat) {
        let c = theta.series.coefficient(exps[i]);
        rep.check(c.is_one(), format!("{inputs} vertex {}", exps[i]), "1", c.to_string());
    }
    rep
}

/// After `ν`: exact linear independence, unchanged tropicalizations, and valuative independence on combos.
pub fn specialization_independence_check(
    thetas: &[ThetaFunction],
    nu: &Specialization,
    v_grid: &[RationalVec],
    combos: &[Vec<i64>],
) -> Result<CheckReport> {
    let mut rep = CheckReport::new("specialize", json!({"thetas": thetas.len(), "grid": v_grid.len(), "combos": combos.len()}));
    if let Some(t) = thetas.iter().find(|t| !t.stabilized) {
        return Err(Error::Domain(format!("ϑ{} is not stabilized", t.index)));
    }
    let special: Vec<LaurentPoly> = thetas.iter().map(|t| specialize(&t.series, nu)).collect::<Result<_>>()?;
    let monos: Vec<LatticeVec> = {
        let mut all: Vec<LatticeVec> = special.iter().flat_map(|p| p.terms.keys().cloned()).collect();
        all.sort();
        all.dedup();
        all
    };
    let rows: Vec<RationalVec> = special
        .iter()
        .map(|p| monos.iter().map(|m| BigRational::from_integer(p.terms.get(m).cloned().unwrap_or_default())).collect())
        .collect();
    let rank = if rows.is_empty() { 0 } else { Matrix::from_rows(rows)?.rank() };
    rep.check(rank == thetas.len(), "rank", thetas.len().to_string(), rank.to_string());
    for (t, sp) in thetas.iter().zip(&special) {
        for w in v_grid {
            let zero_s = vec![BigRational::zero(); t.series.dims().1];
            let before = crate::tropical::valuation(&t.series, w, &zero_s)?.value;
            let after = sp.trop(w)?;
            rep.check(before == after, format!("trop ϑ{} at {}", t.index, fmt_vec(w)), show(&before), show(&after));
        }
    }
    for c in combos {
        let mut sum = LaurentPoly::zero(2);
        for (coef, sp) in c.iter().zip(&special) {
            sum = sum.add(&sp.scale(&BigInt::from(*coef)));
        }
        for w in v_grid {
            let rhs = c
                .iter()
                .zip(&special)
                .filter(|(coef, _)| **coef != 0)
                .map(|(_, sp)| sp.trop(w))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .min();
            let lhs = sum.trop(w)?;
            rep.check(lhs == rhs, format!("combo {c:?} at {}", fmt_vec(w)), show(&rhs), show(&lhs));
        }
    }
    Ok(rep)
}

/// `val_n(Θ^{target}_{Am,+}) = val_{Aᵀn}(Θ^{source}_{m,+})`.
pub fn adjunction_check(a: &LinearMorphism, m_list: &[LatticeVec], n_list: &[LatticeVec], k: u32) -> Result<CheckReport> {
    let mut rep = CheckReport::new("adjunction", json!({"A": a.a.to_string(), "k": k}));
    if !a.integral {
        return Err(Error::Unsupported("adjunction check needs an integral morphism".into()));
    }
    let top = k + 4;
    let src = Side::new(Model::new("source", a.source.clone(), top)?, Chamber::Positive)?;
    let tgt = Side::new(Model::new("target", a.target.clone(), top)?, Chamber::Positive)?;
    let at = a.a.transpose();
    for m in m_list {
        let am: LatticeVec = a.a.apply_int(m)?.into_iter().map(|x| x.to_integer()).collect();
        for n in n_list {
            let inputs = format!("m={} n={}", fmt_vec(m), fmt_vec(n));
            let lhs = val_or_skip(&tgt, &ExponentPair::from_m(am.clone(), tgt.model.r()), &Covector::generic(to_rational(n), tgt.model.r()), k)?;
            let rhs = val_or_skip(&src, &ExponentPair::from_m(m.clone(), src.model.r()), &Covector::generic(at.apply_int(n)?, src.model.r()), k)?;
            match (lhs, rhs) {
                (Ok(x), Ok(y)) => rep.check(x.value == y.value, inputs, show(&y.value), show(&x.value)),
                (Err((reason, detail)), _) | (_, Err((reason, detail))) => rep.skip(inputs, reason, detail),
            }
        }
    }
    Ok(rep)
}

/// Embeds `y`-exponents of a rank-`r1` seed into the first coordinates of rank `r2`.
pub fn embed_y(f: &TruncatedSeries, r2: usize) -> Result<TruncatedSeries> {
    f.map_exponents(2, r2, |e| {
        let mut q = e.q.clone();
        q.resize(r2, 0);
        Ok(ExponentPair::new(e.m.clone(), q))
    })
}

/// `ϑ^{s1}_{m,p} = ϑ^{s2}_{m,p}` whenever the first is a finite combination of theta functions of the second.
pub fn extension_check(s1: &SeedDatum, s2: &SeedDatum, indices: &[LatticeVec], p: &PerturbedPoint, k: u32) -> Result<CheckReport> {
    let mut rep = CheckReport::new("extension", json!({"k": k, "p": p.to_string()}));
    let (r1, r2) = (s1.rank(), s2.rank());
    for i in 0..r1 {
        if s1.p().column(i) != s2.p().column(i) || s1.qbullet().column(i) != s2.qbullet().column(i) {
            return Err(Error::Seed(format!("column {i} of the extension does not restrict to the base seed")));
        }
    }
    // untranslated completions, so that the base diagram is contained in the extended one
    let complete = |s: &SeedDatum| consistent_completion(initial_diagram(s, k)?, k, s.rank(), &|e: &ExponentPair| s.orientation(e));
    let (d1, d2) = (complete(s1)?, complete(s2)?);
    for m in indices {
        let inputs = format!("m={}", fmt_vec(m));
        let t1 = crate::broken_lines::theta_function(&d1, &ExponentPair::from_m(m.clone(), r1), p, k)?;
        let t2 = crate::broken_lines::theta_function(&d2, &ExponentPair::from_m(m.clone(), r2), p, k)?;
        let embedded = embed_y(&t1.series, r2)?;
        let expansion = theta_expansion(&d2, &embedded, p)?;
        let near_cutoff = expansion.iter().any(|(e, _)| e.degree() + 2 >= k);
        if expansion.len() > 1 && near_cutoff {
            rep.skip(inputs, SkipReason::Unresolved, format!("expansion has {} terms reaching the order cutoff", expansion.len()));
            continue;
        }
        rep.check(embedded == t2.series, inputs, t2.series.to_string(), embedded.to_string());
    }
    Ok(rep)
}

type Superlevel = (Vec<LatticeVec>, Vec<(LatticeVec, SkipReason)>);

/// Points `m` of the box with `min_i val_m(ϑ^{dual}_{n_i}) ≥ r`, plus the points skipped for lack of certification.
pub fn superlevel_points(
    dual: &Model,
    w_indices: &[LatticeVec],
    r: &BigRational,
    bx: i64,
    k: u32,
) -> Result<Superlevel> {
    let side = Side::new(dual.clone(), Chamber::Positive)?;
    let mut inside = Vec::new();
    let mut skipped = Vec::new();
    let mut pts = box_points(bx);
    pts.push(lvec(&[0, 0]));
    pts.sort();
    'points: for m in pts {
        let mut min: Option<BigRational> = None;
        for n in w_indices {
            match val_or_skip(&side, &ExponentPair::from_m(n.clone(), dual.r()), &Covector::generic(to_rational(&m), dual.r()), k)? {
                Ok(v) => {
                    let v = v.value.expect("exact");
                    min = Some(min.map_or(v.clone(), |x: BigRational| x.min(v)));
                }
                Err((reason, _)) => {
                    skipped.push((m, reason));
                    continue 'points;
                }
            }
        }
        if min.as_ref().is_none_or(|x| x >= r) {
            inside.push(m);
        }
    }
    Ok((inside, skipped))
}

/// Broken lines of every listed index, used for momentum and rendering checks.
pub fn lines_for(cache: &LineCache, indices: &[ExponentPair]) -> Result<Vec<BrokenLine>> {
    let mut out = Vec::new();
    for u in indices {
        out.extend(cache.lines(u)?.iter().cloned());
    }
    Ok(out)
}
