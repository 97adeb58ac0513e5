//! Standard seeds and completed models with chamber basepoints and cached broken lines.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_rational::BigRational;
use num_traits::Zero;

use crate::broken_lines::{enumerate_broken_lines, theta_from_lines, BrokenLine, ThetaFunction};
use crate::error::{Error, Result};
use crate::lattice::{default_eps1, default_eps2, lvec, rvec, PerturbedPoint, RationalVec};
use crate::scattering::{consistent_completion, locate_chamber, translate_for_positive_chamber, ScatteringDiagram, Wall};
use crate::seed::{initial_diagram, SeedDatum};
use crate::series::ExponentPair;

pub fn torus_seed() -> SeedDatum {
    SeedDatum::from_ints(&[vec![], vec![]], &[vec![], vec![]], &[]).expect("valid torus seed")
}

pub fn a2_seed() -> SeedDatum {
    SeedDatum::from_ints(&[vec![0, -1], vec![1, 0]], &[vec![1, 0], vec![0, 1]], &[1, 1]).expect("valid A2 seed")
}

pub fn kronecker_seed() -> SeedDatum {
    SeedDatum::from_ints(&[vec![0, -2], vec![2, 0]], &[vec![1, 0], vec![0, 1]], &[1, 1]).expect("valid Kronecker seed")
}

/// Three walls whose normals positively span the plane, so no chamber is positive for all of them.
pub fn three_wall_seed() -> SeedDatum {
    SeedDatum::from_ints(&[vec![0, -1, 1], vec![1, 0, -1]], &[vec![1, 0, -1], vec![0, 1, -1]], &[1, 1, 1])
        .expect("valid three-wall seed")
}

/// Kronecker plus a third unfrozen vertex with `b₁₃ = −2`, `b₂₃ = 2`, whose wall is parallel to the loop direction.
pub fn kronecker_extension_seed() -> SeedDatum {
    SeedDatum::from_ints(&[vec![0, -2, 2], vec![2, 0, -2]], &[vec![1, 0, -1], vec![0, 1, -1]], &[1, 1, 1])
        .expect("valid extension seed")
}

/// A point of the fourth quadrant where the loop element keeps its Kronecker expansion in the extension.
pub fn extension_basepoint() -> PerturbedPoint {
    PerturbedPoint::generic(rvec(&[2, -1]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chamber {
    Positive,
    Negative,
}

/// A seed with its completed diagram and chamber basepoints.
#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub seed: SeedDatum,
    pub diagram: ScatteringDiagram,
    /// Whether the initial lines were shifted off the origin to open a positive chamber.
    pub translated: bool,
    pub plus: PerturbedPoint,
    pub minus: Option<PerturbedPoint>,
}

/// An integral direction strictly positive on every `Q•e_i`, if one exists.
fn positive_direction(seed: &SeedDatum) -> Option<RationalVec> {
    let mut cands: Vec<(i64, i64)> = Vec::new();
    for a in -6i64..=6 {
        for b in -6i64..=6 {
            cands.push((a, b));
        }
    }
    cands.sort_by_key(|&(a, b)| (a.abs() + b.abs(), -a, -b));
    cands.into_iter().map(|(a, b)| rvec(&[a, b])).find(|x| {
        (0..seed.rank()).all(|i| {
            let n = seed.qbullet().column(i);
            crate::lattice::dual_pair(&n, x).map(|v| v > BigRational::zero()).unwrap_or(false)
        })
    })
}

fn on_positive_side(walls: &[Wall], p: &PerturbedPoint) -> Result<bool> {
    for w in walls {
        if w.side(p)?.sign() <= 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

impl Model {
    pub fn new(name: &str, seed: SeedDatum, order: u32) -> Result<Self> {
        Self::with_perturbation(name, seed, order, default_eps1(), default_eps2())
    }

    /// Completes the seed, translating the initial lines when no chamber is positive for all of them.
    pub fn with_perturbation(name: &str, seed: SeedDatum, order: u32, eps1: RationalVec, eps2: RationalVec) -> Result<Self> {
        let initial = initial_diagram(&seed, order)?;
        let orient = |e: &ExponentPair| seed.orientation(e);
        if seed.rank() == 0 {
            let plus = PerturbedPoint::new(rvec(&[1, 1]), eps1.clone(), eps2.clone())?;
            let minus = PerturbedPoint::new(rvec(&[-1, -1]), eps1, eps2)?;
            return Ok(Model {
                name: name.into(),
                diagram: ScatteringDiagram::empty(order, 0),
                seed,
                translated: false,
                plus,
                minus: Some(minus),
            });
        }
        if let Some(dir) = positive_direction(&seed) {
            let diagram = consistent_completion(initial.clone(), order, seed.rank(), &orient)?;
            let plus = PerturbedPoint::new(dir.clone(), eps1.clone(), eps2.clone())?;
            let neg: RationalVec = dir.iter().map(|x| -x).collect();
            let minus = PerturbedPoint::new(neg, eps1, eps2)?;
            locate_chamber(&diagram, &plus)?;
            let minus = locate_chamber(&diagram, &minus).ok().map(|_| minus);
            return Ok(Model { name: name.into(), seed, diagram, translated: false, plus, minus });
        }
        let shifted = translate_for_positive_chamber(&initial)?;
        let diagram = consistent_completion(shifted.clone(), order, seed.rank(), &orient)?;
        let plus = PerturbedPoint::new(rvec(&[0, 0]), eps1, eps2)?;
        if !on_positive_side(&shifted, &plus)? {
            return Err(Error::Internal("translated lines do not leave the origin positive".into()));
        }
        locate_chamber(&diagram, &plus)?;
        Ok(Model { name: name.into(), seed, diagram, translated: true, plus, minus: None })
    }

    pub fn torus(order: u32) -> Result<Self> {
        Self::new("torus", torus_seed(), order)
    }

    pub fn a2(order: u32) -> Result<Self> {
        Self::new("A2", a2_seed(), order)
    }

    pub fn kronecker(order: u32) -> Result<Self> {
        Self::new("Kronecker", kronecker_seed(), order)
    }

    pub fn three_wall(order: u32) -> Result<Self> {
        Self::new("three-wall", three_wall_seed(), order)
    }

    pub fn r(&self) -> usize {
        self.diagram.r
    }

    pub fn order(&self) -> u32 {
        self.diagram.order
    }

    pub fn basepoint(&self, c: Chamber) -> Result<PerturbedPoint> {
        match c {
            Chamber::Positive => Ok(self.plus.clone()),
            Chamber::Negative => self
                .minus
                .clone()
                .ok_or_else(|| Error::Unsupported(format!("{} has no negative chamber in this diagram", self.name))),
        }
    }

    /// The model for `(P, −Q)`, whose positive chamber computes negative-chamber expansions.
    pub fn swapped(&self) -> Result<Model> {
        Model::with_perturbation(
            &format!("{} (swapped)", self.name),
            self.seed.negate_q(),
            self.order(),
            self.plus.eps1.clone(),
            self.plus.eps2.clone(),
        )
    }

    pub fn index(&self, m: &[i64]) -> ExponentPair {
        ExponentPair::from_m(lvec(m), self.r())
    }

    pub fn theta(&self, u: &ExponentPair, c: Chamber, k: u32) -> Result<ThetaFunction> {
        crate::broken_lines::theta_function(&self.diagram, u, &self.basepoint(c)?, k)
    }

    /// Whether `p` pairs positively with every `Q•e_i` (untranslated models only).
    pub fn is_in_positive_chamber(&self, p: &PerturbedPoint) -> Result<bool> {
        if self.translated {
            return Err(Error::Unsupported("chamber test by pairing needs an untranslated diagram".into()));
        }
        for i in 0..self.seed.rank() {
            if p.pair(&self.seed.qbullet().column(i))?.sign() <= 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Broken lines at a fixed endpoint and order, computed once per index.
pub struct LineCache {
    pub diagram: ScatteringDiagram,
    pub point: PerturbedPoint,
    pub order: u32,
    lines: RwLock<HashMap<ExponentPair, Arc<Vec<BrokenLine>>>>,
}

impl LineCache {
    pub fn new(diagram: ScatteringDiagram, point: PerturbedPoint, order: u32) -> Result<Self> {
        if order > diagram.order {
            return Err(Error::OrderMismatch(order, diagram.order));
        }
        Ok(LineCache { diagram, point, order, lines: RwLock::new(HashMap::new()) })
    }

    pub fn lines(&self, u: &ExponentPair) -> Result<Arc<Vec<BrokenLine>>> {
        if let Some(l) = self.lines.read().expect("cache lock").get(u) {
            return Ok(l.clone());
        }
        let computed = Arc::new(enumerate_broken_lines(&self.diagram, u, &self.point, self.order)?);
        self.lines.write().expect("cache lock").insert(u.clone(), computed.clone());
        Ok(computed)
    }

    /// `ϑ_u` truncated at `k ≤ order`.
    pub fn theta(&self, u: &ExponentPair, k: u32) -> Result<ThetaFunction> {
        let lines = self.lines(u)?;
        let kept: Vec<BrokenLine> = lines.iter().filter(|l| l.final_exponent.degree() < k).cloned().collect();
        Ok(theta_from_lines(&kept, u, &self.point, self.diagram.r, k))
    }
}
