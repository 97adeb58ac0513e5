//! JSON formats for seeds, diagrams, series, theta functions and broken-line traces.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::broken_lines::{BrokenLine, ThetaFunction};
use crate::error::{Error, Result};
use crate::lattice::PerturbedPoint;
use crate::matrix::Matrix;
use crate::scattering::{ScatteringDiagram, SupportKind, Wall, WallSupport};
use crate::seed::{validate_seed, SeedDatum};
use crate::series::{ExponentPair, ScatFunction, TruncatedSeries};

/// An integer or rational entry, written either as a JSON number or a string like `"3/2"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            Scalar::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            Scalar::Text(s) => s.trim().parse::<BigRational>().map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}"))),
        }
    }

    pub fn to_integer(&self) -> Result<BigInt> {
        let q = self.to_rational()?;
        if !q.is_integer() {
            return Err(Error::Parse(format!("expected an integer, got {q}")));
        }
        Ok(q.to_integer())
    }

    pub fn from_rational(q: &BigRational) -> Self {
        match q.is_integer().then(|| q.to_integer().to_i64()).flatten() {
            Some(v) => Scalar::Int(v),
            None => Scalar::Text(q.to_string()),
        }
    }
}

/// On-disk seed: rows of `P` and `Q•`, the multipliers `D`, optional vertex labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedFile {
    #[serde(rename = "P")]
    pub p: Vec<Vec<Scalar>>,
    #[serde(rename = "Qbullet")]
    pub qbullet: Vec<Vec<Scalar>>,
    #[serde(rename = "D")]
    pub d: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

fn matrix_from(rows: &[Vec<Scalar>], r: usize, what: &str) -> Result<Matrix> {
    if rows.iter().any(|row| row.len() != r) {
        return Err(Error::Seed(format!("every row of {what} needs {r} entries (one per entry of D)")));
    }
    if rows.is_empty() || r == 0 {
        return Ok(Matrix::zeros(rows.len(), r));
    }
    let rows = rows.iter().map(|row| row.iter().map(Scalar::to_rational).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

fn scalar_rows(m: &Matrix) -> Vec<Vec<Scalar>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(Scalar::from_rational).collect()).collect()
}

impl SeedFile {
    pub fn to_seed(&self) -> Result<SeedDatum> {
        let r = self.d.len();
        let d = self.d.iter().map(Scalar::to_rational).collect::<Result<Vec<_>>>()?;
        let mut s = validate_seed(matrix_from(&self.p, r, "P")?, matrix_from(&self.qbullet, r, "Qbullet")?, d)?;
        if let Some(labels) = &self.labels {
            if labels.len() != r {
                return Err(Error::Seed(format!("{} labels for {r} vertices", labels.len())));
            }
            s.labels = Some(labels.clone());
        }
        Ok(s)
    }

    pub fn from_seed(s: &SeedDatum) -> Self {
        SeedFile {
            p: scalar_rows(s.p()),
            qbullet: scalar_rows(s.qbullet()),
            d: s.d().iter().map(Scalar::from_rational).collect(),
            labels: s.labels.clone(),
        }
    }
}

pub fn parse_seed(text: &str) -> Result<SeedDatum> {
    let file: SeedFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("seed file: {e}")))?;
    file.to_seed()
}

pub fn seed_to_json(s: &SeedDatum) -> String {
    serde_json::to_string_pretty(&SeedFile::from_seed(s)).expect("seed serializes")
}

fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn rat_json(x: &BigRational) -> Value {
    serde_json::to_value(Scalar::from_rational(x)).expect("scalar serializes")
}

fn ints_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

fn rats_json(v: &[BigRational]) -> Value {
    Value::Array(v.iter().map(rat_json).collect())
}

fn exponent_json(e: &ExponentPair) -> Value {
    json!({"m": ints_json(&e.m), "q": e.q})
}

fn point_json(p: &PerturbedPoint) -> Value {
    json!({"base": rats_json(&p.base), "eps1": rats_json(&p.eps1), "eps2": rats_json(&p.eps2)})
}

fn scalar_of(v: &Value) -> Result<Scalar> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("expected a number or rational string: {e}")))
}

fn ints_of(v: &Value) -> Result<Vec<BigInt>> {
    v.as_array().ok_or_else(|| Error::Parse("expected an array".into()))?.iter().map(|x| scalar_of(x)?.to_integer()).collect()
}

fn rats_of(v: &Value) -> Result<Vec<BigRational>> {
    v.as_array().ok_or_else(|| Error::Parse("expected an array".into()))?.iter().map(|x| scalar_of(x)?.to_rational()).collect()
}

fn exponent_of(v: &Value) -> Result<ExponentPair> {
    let q = v["q"]
        .as_array()
        .ok_or_else(|| Error::Parse("exponent needs q".into()))?
        .iter()
        .map(|x| x.as_u64().and_then(|x| u32::try_from(x).ok()).ok_or_else(|| Error::Parse("q entries must be nonnegative".into())))
        .collect::<Result<Vec<u32>>>()?;
    Ok(ExponentPair::new(ints_of(&v["m"])?, q))
}

fn wall_json(w: &Wall) -> Value {
    json!({
        "base": rats_json(&w.support.base),
        "direction": ints_json(&w.support.direction),
        "kind": w.support.kind.as_str(),
        "normal": ints_json(&w.normal),
        "function": {
            "base_exponent": exponent_json(&w.function.base),
            "coeffs": Value::Array(w.function.coeffs.iter().map(int_json).collect()),
        },
    })
}

/// `{order, r, walls}` with walls sorted by their serialized form.
pub fn diagram_to_value(d: &ScatteringDiagram) -> Value {
    let mut walls: Vec<(String, Value)> = d.walls.iter().map(wall_json).map(|v| (v.to_string(), v)).collect();
    walls.sort_by(|a, b| a.0.cmp(&b.0));
    json!({"order": d.order, "r": d.r, "walls": walls.into_iter().map(|w| w.1).collect::<Vec<_>>()})
}

pub fn diagram_to_json(d: &ScatteringDiagram) -> String {
    serde_json::to_string_pretty(&diagram_to_value(d)).expect("diagram serializes")
}

pub fn parse_diagram(text: &str) -> Result<ScatteringDiagram> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("diagram file: {e}")))?;
    let order = v["order"].as_u64().and_then(|x| u32::try_from(x).ok()).ok_or_else(|| Error::Parse("diagram needs an order".into()))?;
    let walls = v["walls"].as_array().ok_or_else(|| Error::Parse("diagram needs walls".into()))?;
    let mut out = Vec::with_capacity(walls.len());
    for w in walls {
        let kind = match w["kind"].as_str() {
            Some("line") => SupportKind::Line,
            Some("ray") => SupportKind::Ray,
            other => return Err(Error::Parse(format!("unknown wall kind {other:?}"))),
        };
        let support = WallSupport::new(rats_of(&w["base"])?, ints_of(&w["direction"])?, kind)?;
        let f = &w["function"];
        let coeffs = ints_of(&f["coeffs"])?;
        let function = ScatFunction::new(exponent_of(&f["base_exponent"])?, coeffs, order)?;
        out.push(Wall::new(support, ints_of(&w["normal"])?, function)?);
    }
    let r = match v["r"].as_u64() {
        Some(r) => r as usize,
        None => out.first().map_or(0, |w| w.function.base.q.len()),
    };
    ScatteringDiagram::new(out, order, r)
}

/// Terms `{m, q, c}` sorted by `(q, m)`.
pub fn series_to_value(f: &TruncatedSeries) -> Value {
    let mut terms: Vec<(&ExponentPair, &BigInt)> = f.terms().iter().collect();
    terms.sort_by(|a, b| (&a.0.q, &a.0.m).cmp(&(&b.0.q, &b.0.m)));
    Value::Array(terms.into_iter().map(|(e, c)| json!({"m": ints_json(&e.m), "q": e.q, "c": int_json(c)})).collect())
}

pub fn series_to_json(f: &TruncatedSeries) -> String {
    serde_json::to_string(&series_to_value(f)).expect("series serializes")
}

pub fn parse_series(text: &str, d: usize, r: usize, order: u32) -> Result<TruncatedSeries> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("series: {e}")))?;
    let items = v.as_array().ok_or_else(|| Error::Parse("series must be a list of terms".into()))?;
    let mut terms = Vec::with_capacity(items.len());
    for t in items {
        let e = exponent_of(t)?;
        if e.m.len() != d || e.q.len() != r {
            return Err(Error::Dimension { expected: d + r, got: e.m.len() + e.q.len() });
        }
        terms.push((e, scalar_of(&t["c"])?.to_integer()?));
    }
    Ok(TruncatedSeries::from_terms(d, r, order, terms))
}

pub fn line_to_value(l: &BrokenLine) -> Value {
    let events: Vec<Value> = l
        .events
        .iter()
        .map(|e| {
            json!({
                "walls": e.walls,
                "point": point_json(&e.point),
                "bend": exponent_json(&e.bend),
                "factor": int_json(&e.factor),
                "in": {"c": int_json(&e.in_monomial.0), "exponent": exponent_json(&e.in_monomial.1)},
                "out": {"c": int_json(&e.out_monomial.0), "exponent": exponent_json(&e.out_monomial.1)},
            })
        })
        .collect();
    json!({
        "initial": exponent_json(&l.initial),
        "final": exponent_json(&l.final_exponent),
        "coefficient": int_json(&l.coefficient),
        "endpoint": point_json(&l.endpoint),
        "events": events,
    })
}

pub fn lines_to_json(lines: &[BrokenLine]) -> String {
    serde_json::to_string_pretty(&Value::Array(lines.iter().map(line_to_value).collect())).expect("trace serializes")
}

pub fn theta_to_value(t: &ThetaFunction) -> Value {
    json!({
        "index": exponent_json(&t.index),
        "basepoint": point_json(&t.basepoint),
        "order": t.series.order(),
        "stabilized": t.stabilized,
        "series": series_to_value(&t.series),
    })
}

pub fn theta_to_json(t: &ThetaFunction) -> String {
    serde_json::to_string_pretty(&theta_to_value(t)).expect("theta serializes")
}
