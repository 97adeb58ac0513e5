use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use cluster_theta::broken_lines::{enumerate_broken_lines, stabilize};
use cluster_theta::fixtures::{extension_basepoint, LineCache, Model};
use cluster_theta::io::{diagram_to_json, lines_to_json, theta_to_json};
use cluster_theta::lattice::{fmt_vec, lvec, to_rational, LatticeVec, PerturbedPoint, RationalVec};
use cluster_theta::matrix::Matrix;
use cluster_theta::render::{render_svg, RenderOptions, Viewport};
use cluster_theta::seed::{check_linear_morphism, validate_seed};
use cluster_theta::series::{ExponentPair, Specialization};
use cluster_theta::tropical::{tropicalize, val_theta, Covector, ValuationResult};
use cluster_theta::verify::{
    adjunction_check, box_points, extension_check, newton_monic_check, reciprocity_check, specialization_independence_check,
    vit_check_cached, CheckReport, Duality, SkipReason,
};

use crate::args::{
    load_seed, parse_chamber, parse_int_matrix, parse_lvec, parse_lvecs, parse_perturb, parse_rvec, usage, ChamberArg, CheckKind,
    Common, DualityArg,
};
use crate::CliError;

/// What a command produced: artifacts by file extension, the one printed without `--out`, and the check verdict.
pub struct Outcome {
    pub artifacts: Vec<(&'static str, String)>,
    pub passed: bool,
    pub summary: Option<String>,
}

impl Outcome {
    fn single(ext: &'static str, body: String) -> Self {
        Outcome { artifacts: vec![(ext, body)], passed: true, summary: None }
    }

    /// Writes every artifact next to `prefix`, or prints the first one.
    pub fn emit(&self, prefix: Option<&Path>) -> Result<(), CliError> {
        match prefix {
            Some(prefix) => {
                for (ext, body) in &self.artifacts {
                    let path = with_suffix(prefix, ext);
                    std::fs::write(&path, body).map_err(|e| CliError::Io(path.display().to_string(), e))?;
                }
            }
            None => {
                if let Some((_, body)) = self.artifacts.first() {
                    let mut out = std::io::stdout().lock();
                    match writeln!(out, "{}", body.trim_end()) {
                        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(CliError::Io("stdout".into(), e)),
                        _ => {}
                    }
                }
            }
        }
        if let Some(s) = &self.summary {
            eprintln!("{s}");
        }
        Ok(())
    }
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// A completed model at order `order` with the requested perturbation.
fn model(c: &Common, order: u32) -> Result<Model, CliError> {
    let (e1, e2) = parse_perturb(c.perturb.as_deref())?;
    Ok(Model::with_perturbation(&c.seed, load_seed(&c.seed)?, order, e1, e2)?)
}

/// The model to evaluate in and its basepoint; the negative chamber may need the swapped seed.
fn resolve(c: &Common, m: Model) -> Result<(Model, PerturbedPoint), CliError> {
    let chamber = c.chamber.as_deref().map(parse_chamber).transpose()?.unwrap_or(ChamberArg::Plus);
    match chamber {
        ChamberArg::Plus => {
            let p = m.plus.clone();
            Ok((m, p))
        }
        ChamberArg::Minus => match m.minus.clone() {
            Some(p) => Ok((m, p)),
            None => {
                let s = m.swapped()?;
                let p = s.plus.clone();
                Ok((s, p))
            }
        },
        ChamberArg::Point(x) => {
            let p = PerturbedPoint::new(x, m.plus.eps1.clone(), m.plus.eps2.clone())?;
            Ok((m, p))
        }
    }
}

fn viewport(c: &Common) -> Viewport {
    Viewport::square(c.bx.max(1) as f64 + 0.5)
}

pub fn scatter(c: &Common) -> Result<Outcome, CliError> {
    let m = model(c, c.order)?;
    let opts = RenderOptions { shade: (m.r() > 0 && !m.diagram.walls.is_empty()).then(|| m.plus.clone()), labels: true };
    let svg = render_svg(&m.diagram, &[], &viewport(c), &opts)?;
    Ok(Outcome {
        artifacts: vec![("json", diagram_to_json(&m.diagram)), ("svg", svg)],
        passed: true,
        summary: Some(format!("{}: {} walls at order {}", m.name, m.diagram.walls.len(), c.order)),
    })
}

pub fn theta(c: &Common, index: &str) -> Result<Outcome, CliError> {
    let (m, p) = resolve(c, model(c, c.order + 4)?)?;
    let u = ExponentPair::from_m(parse_lvec(index)?, m.r());
    let (t, stable) = stabilize(&m.diagram, &u, &p, c.order)?;
    let lines = enumerate_broken_lines(&m.diagram, &u, &p, t.series.order())?;
    Ok(Outcome {
        artifacts: vec![("json", theta_to_json(&t)), ("lines.json", lines_to_json(&lines))],
        passed: true,
        summary: Some(format!("ϑ{}: {} terms, {} broken lines, stabilized: {stable}", fmt_vec(&u.m), t.series.len(), lines.len())),
    })
}

fn show(v: &Option<BigRational>) -> String {
    v.as_ref().map_or("inf".into(), |x| x.to_string())
}

fn valuation_value(u: &ExponentPair, v: &Covector, r: &ValuationResult) -> Value {
    json!({
        "index": fmt_vec(&u.m),
        "covector": v.to_string(),
        "value": show(&r.value),
        "certified": r.certified.as_str(),
        "order": r.order,
        "per_order": r.per_order.iter().map(|(o, x)| json!({"order": o, "value": show(x)})).collect::<Vec<_>>(),
        "witness_taut": r.witness_taut,
    })
}

pub fn val(c: &Common, index: &str, covector: &str) -> Result<Outcome, CliError> {
    let (m, p) = resolve(c, model(c, c.order + 4)?)?;
    let u = ExponentPair::from_m(parse_lvec(index)?, m.r());
    let v = Covector::generic(parse_rvec(covector)?, m.r());
    let r = val_theta(&m.diagram, &u, &v, &p, c.order)?;
    let body = serde_json::to_string_pretty(&valuation_value(&u, &v, &r)).expect("json");
    Ok(Outcome::single("json", body))
}

/// `n` integral directions spread around the circle, first quadrant first.
fn ray_directions(n: usize) -> Vec<RationalVec> {
    let mut out: Vec<(i64, i64)> = Vec::new();
    for j in 0..n {
        let a = std::f64::consts::TAU * j as f64 / n as f64 + 0.1;
        let d = ((a.cos() * 6.0).round() as i64, (a.sin() * 6.0).round() as i64);
        if d != (0, 0) && !out.contains(&d) {
            out.push(d);
        }
    }
    out.into_iter().map(|(a, b)| to_rational(&lvec(&[a, b]))).collect()
}

pub fn trop(c: &Common, index: &str, rays: usize) -> Result<Outcome, CliError> {
    if rays == 0 {
        return Err(usage("--rays must be positive"));
    }
    let (m, p) = resolve(c, model(c, c.order + 4)?)?;
    let u = ExponentPair::from_m(parse_lvec(index)?, m.r());
    let samples = tropicalize(&m.diagram, &u, &ray_directions(rays), &p, c.order, c.bx as u32)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["u", "v", "value", "certified", "order"]).map_err(CliError::Csv)?;
    for s in &samples {
        for (scale, r) in &s.values {
            let k = BigRational::from_integer(BigInt::from(*scale));
            let row = [(&s.ray[0] * &k).to_string(), (&s.ray[1] * &k).to_string(), show(&r.value), r.certified.as_str().into(), r.order.to_string()];
            w.write_record(&row).map_err(CliError::Csv)?;
        }
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| usage(e.to_string()))?).expect("csv is utf-8");
    Ok(Outcome::single("csv", body))
}

fn duality(d: DualityArg) -> Duality {
    match d {
        DualityArg::Chiral => Duality::Chiral,
        DualityArg::ChiralLanglands => Duality::ChiralLanglands,
        DualityArg::Langlands => Duality::Langlands,
    }
}

fn box_with_origin(b: i64) -> Vec<LatticeVec> {
    let mut pts = box_points(b);
    pts.push(lvec(&[0, 0]));
    pts.sort();
    pts
}

pub struct CheckArgs<'a> {
    pub which: CheckKind,
    pub duality: DualityArg,
    pub extension: &'a str,
    pub index: Option<&'a str>,
    pub matrix: &'a str,
}

pub fn check(c: &Common, a: &CheckArgs) -> Result<Outcome, CliError> {
    let k = c.order;
    let rep = match a.which {
        CheckKind::Vit => vit(c)?,
        CheckKind::Reciprocity => reciprocity_check(&load_seed(&c.seed)?, c.bx, k, duality(a.duality))?,
        CheckKind::Extension => {
            let s1 = load_seed(&c.seed)?;
            let s2 = load_seed(a.extension)?;
            let indices = parse_lvecs(a.index.unwrap_or("1,-1"))?;
            let p = match c.chamber.as_deref().map(parse_chamber).transpose()? {
                None => extension_basepoint(),
                Some(ChamberArg::Point(x)) => {
                    let (e1, e2) = parse_perturb(c.perturb.as_deref())?;
                    PerturbedPoint::new(x, e1, e2)?
                }
                Some(_) => resolve(c, model(c, k)?)?.1,
            };
            extension_check(&s1, &s2, &indices, &p, k)?
        }
        CheckKind::Newton => {
            let (m, p) = resolve(c, model(c, k + 4)?)?;
            let mut rep = CheckReport::new("newton", json!({"k": k, "box": c.bx}));
            for n in box_with_origin(c.bx) {
                let (t, stable) = stabilize(&m.diagram, &ExponentPair::from_m(n.clone(), m.r()), &p, k)?;
                if stable {
                    rep.absorb(newton_monic_check(&t));
                } else {
                    rep.skip(format!("m={}", fmt_vec(&n)), SkipReason::Unstabilized, "no stable value by the order cap");
                }
            }
            rep
        }
        CheckKind::Specialize => {
            let (m, p) = resolve(c, model(c, k + 4)?)?;
            let mut thetas = Vec::new();
            for n in box_points(c.bx) {
                let (t, stable) = stabilize(&m.diagram, &ExponentPair::from_m(n, m.r()), &p, k)?;
                if stable {
                    thetas.push(t);
                }
            }
            let grid: Vec<RationalVec> = box_points(c.bx).iter().map(|v| to_rational(v)).collect();
            let combos: Vec<Vec<i64>> = (0..thetas.len())
                .map(|i| (0..thetas.len()).map(|j| if j == i { 1 } else if j == (i + 1) % thetas.len() { -2 } else { 0 }).collect())
                .collect();
            specialization_independence_check(&thetas, &Specialization::y_to_one(2, m.r()), &grid, &combos)?
        }
        CheckKind::Adjunction => {
            let s = load_seed(&c.seed)?;
            let a_rows = parse_int_matrix(a.matrix)?;
            let am = Matrix::from_int_rows(&a_rows)?;
            let det = a_rows[0][0] * a_rows[1][1] - a_rows[0][1] * a_rows[1][0];
            if det.abs() != 1 {
                return Err(usage(format!("--matrix must be unimodular, determinant is {det}")));
            }
            // (Aᵀ)⁻¹ of a unimodular 2×2 matrix
            let inv_t = Matrix::from_int_rows(&[vec![det * a_rows[1][1], -det * a_rows[1][0]], vec![-det * a_rows[0][1], det * a_rows[0][0]]])?;
            let t = validate_seed(am.mul(s.p())?, inv_t.mul(s.qbullet())?, s.d().to_vec())?;
            let morphism = check_linear_morphism(&am, &s, &t)?;
            let grid = box_with_origin(c.bx);
            adjunction_check(&morphism, &grid, &grid, k)?
        }
    };
    Ok(Outcome { passed: rep.passed(), summary: Some(rep.summary()), artifacts: vec![("json", rep.to_json())] })
}

/// Deterministic three-term combinations of box indices against box covectors.
fn vit(c: &Common) -> Result<CheckReport, CliError> {
    let k = c.order;
    let (m, p) = resolve(c, model(c, k + 4)?)?;
    let cache = LineCache::new(m.diagram.clone(), p, k + 4)?;
    let idx = box_with_origin(c.bx);
    let n = idx.len();
    let mut rep = CheckReport::new("vit", json!({"k": k, "box": c.bx}));
    for i in 0..n {
        let coeffs: Vec<(ExponentPair, BigInt)> = [(i, 1), ((i + 1) % n, -2), ((i + 3) % n, 3)]
            .into_iter()
            .map(|(j, co)| (ExponentPair::from_m(idx[j].clone(), m.r()), BigInt::from(co)))
            .collect();
        for w in box_points(c.bx) {
            rep.absorb(vit_check_cached(&cache, &coeffs, &Covector::generic(to_rational(&w), m.r()), k)?);
        }
    }
    Ok(rep)
}

pub fn render(c: &Common, index: Option<&str>) -> Result<Outcome, CliError> {
    let (m, p) = resolve(c, model(c, c.order)?)?;
    let mut lines = Vec::new();
    if let Some(index) = index {
        for n in parse_lvecs(index)? {
            lines.extend(enumerate_broken_lines(&m.diagram, &ExponentPair::from_m(n, m.r()), &p, c.order)?);
        }
    }
    let opts = RenderOptions { shade: (m.r() > 0).then(|| p.clone()), labels: true };
    Ok(Outcome::single("svg", render_svg(&m.diagram, &lines, &viewport(c), &opts)?))
}
