//! Acceptance suite: one PASS/FAIL line per criterion, exit status nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cluster_theta::broken_lines::{
    enumerate_broken_lines, limit_theta, stabilize, structure_constants, theta_expansion, theta_function, transport, ThetaFunction,
};
use cluster_theta::fixtures::{a2_seed, extension_basepoint, kronecker_extension_seed, kronecker_seed, LineCache, Model};
use cluster_theta::lattice::{frac, lvec, rvec, to_rational, LatticeVec, PerturbedPoint, RationalVec};
use cluster_theta::matrix::Matrix;
use cluster_theta::scattering::{check_consistency, PlanarPath, SupportKind};
use cluster_theta::series::{specialize, ExponentPair, LaurentPoly, Specialization};
use cluster_theta::tropical::{momentum, Covector};
use cluster_theta::verify::{
    box_points, extension_check, lambda_reciprocity_check, newton_monic_check, reciprocity_run, specialization_independence_check,
    taut_minimizer_check, vit_check_cached, CheckReport, Duality, ReciprocityRun,
};
use cluster_theta::Error;

type Outcome = Result<String, String>;

struct Suite {
    failed: usize,
}

impl Suite {
    /// Runs one criterion, printing a single line; `limit` is a wall-clock bound that is part of the criterion.
    fn run(&mut self, n: u32, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let res = match (res, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
            (r, _) => r,
        };
        let bound = limit.map(|l| format!(", limit {l:?}")).unwrap_or_default();
        match res {
            Ok(detail) => println!("PASS criterion {n:>2} {title}: {detail} [{took:.2?}{bound}]"),
            Err(detail) => {
                self.failed += 1;
                println!("FAIL criterion {n:>2} {title}: {detail} [{took:.2?}{bound}]");
            }
        }
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn report_ok(rep: &CheckReport) -> Result<(), String> {
    ensure(rep.passed(), || format!("{} first failure {:?}", rep.summary(), rep.failures.first()))
}

fn e(err: Error) -> String {
    err.to_string()
}

fn laurent(terms: &[([i64; 2], i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(2, terms.iter().map(|(m, c)| (lvec(m), BigInt::from(*c))))
}

fn criterion_1() -> Outcome {
    let d = Model::a2(6).map_err(e)?.diagram;
    ensure(d.walls.len() == 3, || format!("{} walls", d.walls.len()))?;
    let lines = d.walls.iter().filter(|w| w.support.kind == SupportKind::Line).count();
    ensure(lines == 2, || format!("{lines} full lines"))?;
    let ray = d.walls.iter().find(|w| w.support.kind == SupportKind::Ray).ok_or("no outgoing ray")?;
    ensure(ray.support.base == rvec(&[0, 0]) && ray.support.direction == lvec(&[1, -1]), || format!("support {:?}", ray.support))?;
    ensure(ray.normal == lvec(&[1, 1]), || format!("normal {:?}", ray.normal))?;
    let f = ray.function.to_series();
    let expected = cluster_theta::series::TruncatedSeries::from_terms(
        2,
        2,
        6,
        [(ExponentPair::zero(2, 2), BigInt::from(1)), (ExponentPair::new(lvec(&[-1, 1]), vec![1, 1]), BigInt::from(1))],
    );
    ensure(f == expected, || format!("function {f}"))?;
    Ok("two axis lines and the ray R≥0(1,−1) with 1+x^(−1,1)y^(1,1), normal (1,1)".into())
}

fn criterion_2() -> Outcome {
    let m = Model::kronecker(6).map_err(e)?;
    let l_idx = m.index(&[1, -1]);
    let ell4 = m.theta(&l_idx, cluster_theta::fixtures::Chamber::Positive, 4).map_err(e)?;
    let special = specialize(&ell4.series, &Specialization::y_to_one(2, 2)).map_err(e)?;
    let want = laurent(&[([1, -1], 1), ([-1, 1], 1), ([-1, -1], 1)]);
    ensure(special == want, || format!("ℓ|y=1 = {special:?}"))?;
    let ell = m.theta(&l_idx, cluster_theta::fixtures::Chamber::Positive, 6).map_err(e)?;
    let square = ell.series.mul(&ell.series).map_err(e)?;
    let mut expansion = theta_expansion(&m.diagram, &square, &m.plus).map_err(e)?;
    expansion.sort();
    // with principal coefficients the multiple of ϑ0 carries the frozen monomial y1y2
    let y1y2 = ExponentPair::new(lvec(&[0, 0]), vec![1, 1]);
    let mut want = vec![(y1y2.clone(), BigInt::from(2)), (m.index(&[2, -2]), BigInt::from(1))];
    want.sort();
    ensure(expansion == want, || format!("ℓ² = {expansion:?}"))?;
    let alpha = structure_constants(&m.diagram, &[l_idx.clone(), l_idx.clone()], &m.index(&[2, -2]), 6).map_err(e)?;
    ensure(alpha == BigInt::from(1), || format!("α(ℓ,ℓ;(2,−2)) = {alpha}"))?;
    let t2 = m.theta(&m.index(&[2, -2]), cluster_theta::fixtures::Chamber::Positive, 6).map_err(e)?;
    let two = cluster_theta::series::TruncatedSeries::monomial(y1y2, BigInt::from(2), 6);
    ensure(t2.series == square.sub(&two).map_err(e)?, || "ϑ(2,−2) ≠ ℓ² − 2y1y2".into())?;
    let nu = Specialization::y_to_one(2, 2);
    let (ell1, t21) = (specialize(&ell.series, &nu).map_err(e)?, specialize(&t2.series, &nu).map_err(e)?);
    ensure(t21 == ell1.mul(&ell1).sub(&laurent(&[([0, 0], 2)])), || format!("after y ↦ 1, ϑ(2,−2) = {t21:?}"))?;
    Ok("ℓ|y=1 = (x1²+x2²+1)/(x1x2); ℓ² = ϑ(2,−2) + 2y1y2·ϑ0, so ϑ(2,−2)|y=1 = ℓ² − 2; α(ℓ,ℓ;(2,−2)) = 1".into())
}

fn criterion_3() -> Outcome {
    let mut joints = 0;
    for k in 2..=6 {
        for m in [Model::torus(k), Model::a2(k), Model::kronecker(k), Model::three_wall(k)] {
            let m = m.map_err(e)?;
            for j in m.diagram.joints() {
                let rep = check_consistency(&m.diagram, &j).map_err(e)?;
                ensure(rep.consistent, || format!("{} k={k} joint {j:?}", m.name))?;
                joints += 1;
            }
        }
    }
    Ok(format!("{joints} joint loops are the identity (torus, A2, Kronecker, translated three-wall; k = 2..6)"))
}

fn criterion_4() -> Outcome {
    let mut coeffs = 0;
    for m in [Model::a2(6), Model::kronecker(6), Model::three_wall(6)] {
        let m = m.map_err(e)?;
        for w in &m.diagram.walls {
            let f = w.function.to_series();
            ensure(f.all_nonnegative(), || format!("{}: {f}", m.name))?;
            coeffs += f.len();
        }
    }
    Ok(format!("{coeffs} wall coefficients scanned at k=6, all ≥ 0"))
}

fn random_covector(rng: &mut ChaCha8Rng) -> RationalVec {
    loop {
        let v: RationalVec = (0..2).map(|_| frac(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect();
        if v.iter().any(|x| x != &frac(0, 1)) {
            return v;
        }
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let covectors: Vec<RationalVec> = (0..24).map(|_| random_covector(&mut rng)).collect();
    let mut total = CheckReport::new("vit", serde_json::json!(null));
    let mut per_fixture = Vec::new();
    for m in [Model::a2(8).map_err(e)?, Model::kronecker(8).map_err(e)?] {
        let cache = LineCache::new(m.diagram.clone(), m.plus.clone(), 8).map_err(e)?;
        let mut rep = CheckReport::new("vit", serde_json::json!(null));
        let pool = box_points(2);
        for _ in 0..50 {
            let size = rng.gen_range(1..=4);
            let mut coeffs: Vec<(ExponentPair, BigInt)> = Vec::new();
            while coeffs.len() < size {
                let u = m.index(&[0, 0]).add(&ExponentPair::from_m(pool[rng.gen_range(0..pool.len())].clone(), 2));
                let c: i64 = rng.gen_range(-3..=3);
                if !coeffs.iter().any(|(x, _)| *x == u) {
                    coeffs.push((u, BigInt::from(c)));
                }
            }
            if coeffs.iter().all(|(_, c)| *c == BigInt::from(0)) {
                coeffs[0].1 = BigInt::from(1);
            }
            for w in &covectors {
                rep.absorb(vit_check_cached(&cache, &coeffs, &Covector::generic(w.clone(), 2), 4).map_err(e)?);
            }
        }
        per_fixture.push(format!("{} {}", m.name, rep.summary()));
        total.absorb(rep);
    }
    report_ok(&total)?;
    ensure(total.passes > 0, || "no certified instance".into())?;
    Ok(format!("{}; skips by reason {:?}", per_fixture.join("; "), total.skip_counts()))
}

fn criterion_6(runs: &mut Vec<ReciprocityRun>) -> Outcome {
    let mut parts = Vec::new();
    for (name, s) in [("A2", a2_seed()), ("Kronecker", kronecker_seed())] {
        let run = reciprocity_run(&s, 3, 6, Duality::Chiral).map_err(e)?;
        report_ok(&run.report)?;
        ensure(run.report.passes > 0, || format!("{name}: nothing certified"))?;
        parts.push(format!("{name} chiral {}", run.report.summary()));
        let lam = lambda_reciprocity_check(&s, 3, 6).map_err(e)?;
        report_ok(&lam)?;
        ensure(lam.passes > 0, || format!("{name}: Λ-form has no certified instance"))?;
        parts.push(format!("{name} Λ-form {}", lam.summary()));
        runs.push(run);
    }
    Ok(parts.join("; "))
}

fn criterion_7(runs: &[ReciprocityRun]) -> Outcome {
    ensure(!runs.is_empty(), || "criterion 6 produced no runs".into())?;
    let mut parts = Vec::new();
    for run in runs {
        let rep = taut_minimizer_check(run, 6).map_err(e)?;
        report_ok(&rep)?;
        // the minimizing line of each certified instance is the only one attaining the perturbed minimum
        let mut unique = 0;
        for pair in &run.certified {
            for (side, idx, cov) in [(&run.left, &pair.m, &pair.n), (&run.right, &pair.n, &pair.m)] {
                let r = side.model.r();
                let v = Covector::generic(to_rational(cov), r);
                let lines = side.cache.lines(&ExponentPair::from_m(idx.clone(), r)).map_err(e)?;
                let vals = lines
                    .iter()
                    .filter(|l| l.final_exponent.degree() < 6)
                    .map(|l| v.pair(&l.final_exponent))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(e)?;
                let min = vals.iter().min().ok_or("certified instance without lines")?;
                let count = vals.iter().filter(|x| *x == min).count();
                ensure(count == 1, || format!("{} u={idx:?} v={cov:?}: {count} minimizing lines", side.model.name))?;
                unique += 1;
            }
        }
        parts.push(format!("{} taut checks, {unique} unique minimizers", rep.passes));
    }
    Ok(parts.join("; "))
}

fn criterion_8() -> Outcome {
    let l = Matrix::from_int_rows(&[vec![0, 1], vec![-1, 0]]).map_err(e)?;
    let mut count = 0;
    for order in [4, 6] {
        let m = Model::kronecker(order).map_err(e)?;
        for p in [m.plus.clone(), m.basepoint(cluster_theta::fixtures::Chamber::Negative).map_err(e)?, PerturbedPoint::generic(rvec(&[2, -1]))] {
            for n in box_points(3) {
                for line in enumerate_broken_lines(&m.diagram, &ExponentPair::from_m(n.clone(), m.r()), &p, order).map_err(e)? {
                    let values = momentum(&line, &l).map_err(e)?;
                    ensure(values.windows(2).all(|w| w[0] == w[1]), || format!("momentum {values:?} along a line for {n:?}"))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("momentum constant on all {count} enumerated Kronecker lines"))
}

fn stabilized_thetas(m: &Model, bx: i64) -> Result<(Vec<ThetaFunction>, usize), String> {
    let mut out = Vec::new();
    let mut unstable = 0;
    let mut idx: Vec<LatticeVec> = box_points(bx);
    idx.push(lvec(&[0, 0]));
    for n in idx {
        let (t, stable) = stabilize(&m.diagram, &ExponentPair::from_m(n, m.r()), &m.plus, 4).map_err(e)?;
        if stable {
            out.push(t);
        } else {
            unstable += 1;
        }
    }
    Ok((out, unstable))
}

fn criterion_9() -> Outcome {
    let mut parts = Vec::new();
    for m in [Model::torus(8), Model::a2(8), Model::kronecker(10), Model::three_wall(8)] {
        let m = m.map_err(e)?;
        let (thetas, unstable) = stabilized_thetas(&m, 2)?;
        let mut rep = CheckReport::new("newton", serde_json::json!(null));
        for t in &thetas {
            rep.absorb(newton_monic_check(t));
        }
        report_ok(&rep)?;
        parts.push(format!("{} {} thetas, {} vertices ({unstable} not stabilized)", m.name, thetas.len(), rep.passes));
    }
    Ok(parts.join("; "))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let grid: Vec<RationalVec> = (0..12).map(|_| random_covector(&mut rng)).collect();
    let mut parts = Vec::new();
    for m in [Model::torus(8), Model::a2(8), Model::kronecker(10)] {
        let m = m.map_err(e)?;
        let (thetas, unstable) = stabilized_thetas(&m, 2)?;
        let combos: Vec<Vec<i64>> = (0..6).map(|_| (0..thetas.len()).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let rep = specialization_independence_check(&thetas, &Specialization::y_to_one(2, m.r()), &grid, &combos).map_err(e)?;
        report_ok(&rep)?;
        parts.push(format!("{} rank {} ({unstable} not stabilized), {}", m.name, thetas.len(), rep.summary()));
    }
    Ok(parts.join("; "))
}

fn criterion_11() -> Outcome {
    let rep = extension_check(&kronecker_seed(), &kronecker_extension_seed(), &[lvec(&[1, -1])], &extension_basepoint(), 6).map_err(e)?;
    report_ok(&rep)?;
    ensure(rep.passes == 1, || format!("not decided: {}", rep.to_json()))?;
    Ok(format!("loop element unchanged at {} in the extension b13 = −2, b23 = 2", extension_basepoint()))
}

/// A point on a random wall support, which is non-generic by construction.
fn point_on_wall(m: &Model, rng: &mut ChaCha8Rng) -> RationalVec {
    let w = &m.diagram.walls[rng.gen_range(0..m.diagram.walls.len())];
    let t = frac(rng.gen_range(0..=9), rng.gen_range(1..=3));
    let t = if w.support.kind == SupportKind::Line && rng.gen_bool(0.5) { -t } else { t };
    w.support.base.iter().zip(to_rational(&w.support.direction)).map(|(b, d)| b + d * &t).collect()
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let k = 5;
    let mut parts = Vec::new();
    for m in [Model::torus(k), Model::a2(k), Model::kronecker(k), Model::three_wall(k)] {
        let m = m.map_err(e)?;
        let (mut done, mut resampled) = (0, 0);
        while done < 20 {
            let u = ExponentPair::from_m(lvec(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]), m.r());
            let p1 = PerturbedPoint::generic(random_covector(&mut rng));
            let p2 = PerturbedPoint::generic(random_covector(&mut rng));
            let via = PerturbedPoint::generic(random_covector(&mut rng));
            let direct = theta_function(&m.diagram, &u, &p2, k);
            let moved = PlanarPath::new(vec![p1.clone(), via, p2.clone()])
                .and_then(|path| transport(&m.diagram, &theta_function(&m.diagram, &u, &p1, k)?, &path));
            let (direct, moved) = match (direct, moved) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(Error::Genericity { .. }), _) | (_, Err(Error::Genericity { .. })) => {
                    resampled += 1;
                    continue;
                }
                (Err(x), _) | (_, Err(x)) => return Err(e(x)),
            };
            ensure(direct.series == moved.series, || format!("{}: transport differs for u={} p1={p1} p2={p2}", m.name, u))?;
            if !m.diagram.walls.is_empty() {
                let x = point_on_wall(&m, &mut rng);
                let mu = random_covector(&mut rng);
                let delta = frac(1, 10_000);
                let near: RationalVec = x.iter().zip(&mu).map(|(a, b)| a + b * &delta).collect();
                let lim = limit_theta(&m.diagram, &u, &x, &mu, k).map_err(e)?;
                let nearby = theta_function(&m.diagram, &u, &PerturbedPoint::generic(near), k).map_err(e)?;
                ensure(lim.series == nearby.series, || format!("{}: limit at {x:?} from {mu:?} differs for u={u}", m.name))?;
            }
            done += 1;
        }
        parts.push(format!("{} 20 agree ({resampled} resampled)", m.name));
    }
    Ok(parts.join("; "))
}

fn main() {
    let mut suite = Suite { failed: 0 };
    let mut runs = Vec::new();
    suite.run(1, "A2 completion", Some(Duration::from_secs(1)), criterion_1);
    suite.run(2, "Kronecker loop element and Chebyshev identity", Some(Duration::from_secs(5)), criterion_2);
    suite.run(3, "consistency loops", None, criterion_3);
    suite.run(4, "positivity of wall coefficients", None, criterion_4);
    suite.run(5, "valuative independence", None, criterion_5);
    suite.run(6, "theta reciprocity", Some(Duration::from_secs(60)), || criterion_6(&mut runs));
    suite.run(7, "tautness of minimizers", None, || criterion_7(&runs));
    suite.run(8, "momentum conservation", None, criterion_8);
    suite.run(9, "Newton monicity", None, criterion_9);
    suite.run(10, "specialization", None, criterion_10);
    suite.run(11, "extension", None, criterion_11);
    suite.run(12, "transport and limit coherence", None, criterion_12);
    println!("acceptance: {} of 12 criteria passed", 12 - suite.failed);
    if suite.failed > 0 {
        std::process::exit(1);
    }
}
