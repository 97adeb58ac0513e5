//! Planar walls, path-ordered products, consistency loops and order-by-order completion.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    add_vec, angle_cmp, cross, dot, dot_mixed, fmt_vec, lvec, primitive_part, rot90, sign_of, sub_vec,
    to_rational, LatticeVec, Perturbed, PerturbedPoint, RationalVec,
};
use crate::series::{ExponentPair, ScatFunction, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SupportKind {
    Line,
    Ray,
}

impl SupportKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SupportKind::Line => "line",
            SupportKind::Ray => "ray",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WallSupport {
    pub base: RationalVec,
    pub direction: LatticeVec,
    pub kind: SupportKind,
}

impl WallSupport {
    pub fn line(base: RationalVec, direction: LatticeVec) -> Result<Self> {
        Self::new(base, direction, SupportKind::Line)
    }

    pub fn ray(base: RationalVec, direction: LatticeVec) -> Result<Self> {
        Self::new(base, direction, SupportKind::Ray)
    }

    pub fn new(base: RationalVec, direction: LatticeVec, kind: SupportKind) -> Result<Self> {
        if base.len() != 2 || direction.len() != 2 {
            return Err(Error::Dimension { expected: 2, got: base.len().max(direction.len()) });
        }
        let (direction, _) = primitive_part(&direction)?;
        let mut s = WallSupport { base, direction, kind };
        if kind == SupportKind::Line {
            s.canonicalize_line();
        }
        Ok(s)
    }

    /// Lines are stored with a sign-normalized direction and a base on a coordinate axis.
    fn canonicalize_line(&mut self) {
        let flip = self.direction[0].is_negative() || (self.direction[0].is_zero() && self.direction[1].is_negative());
        if flip {
            self.direction = self.direction.iter().map(|x| -x).collect();
        }
        let d = to_rational(&self.direction);
        let t = if !d[0].is_zero() { -&self.base[0] / &d[0] } else { -&self.base[1] / &d[1] };
        self.base = vec![&self.base[0] + &t * &d[0], &self.base[1] + &t * &d[1]];
    }

    fn dir_q(&self) -> RationalVec {
        to_rational(&self.direction)
    }

    /// Whether an exact point lies on the support.
    pub fn contains(&self, x: &[BigRational]) -> bool {
        let rel = sub_vec(x, &self.base);
        let d = self.dir_q();
        if !cross(&d, &rel).is_zero() {
            return false;
        }
        match self.kind {
            SupportKind::Line => true,
            SupportKind::Ray => !dot_mixed(&self.direction, &rel).unwrap_or_default().is_negative(),
        }
    }

    fn is_parallel(&self, o: &WallSupport) -> bool {
        cross(&self.direction, &o.direction).is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Wall {
    pub support: WallSupport,
    pub normal: LatticeVec,
    pub function: ScatFunction,
}

impl Wall {
    /// Validates orthogonality and rewrites a non-primitive normal `g·ν` as `(ν, f^g)`.
    pub fn new(support: WallSupport, normal: LatticeVec, function: ScatFunction) -> Result<Self> {
        let (nu, g) = primitive_part(&normal)?;
        if !dot(&nu, &support.direction)?.is_zero() {
            return Err(Error::InvalidWall(format!(
                "normal {} does not annihilate direction {}",
                fmt_vec(&normal),
                fmt_vec(&support.direction)
            )));
        }
        if !dot(&function.base.m, &nu)?.is_zero() {
            return Err(Error::InvalidWall(format!(
                "function exponent {} is not orthogonal to normal {}",
                function.base,
                fmt_vec(&normal)
            )));
        }
        let function = if g.is_one() { function } else { function.pow(crate::lattice::to_i64(&g)?)? };
        Ok(Wall { support, normal: nu, function })
    }

    /// Incoming walls contain the direction of their own exponent.
    pub fn is_incoming(&self) -> bool {
        match self.support.kind {
            SupportKind::Line => true,
            SupportKind::Ray => primitive_part(&self.function.base.m)
                .map(|(v, _)| v == self.support.direction)
                .unwrap_or(false),
        }
    }

    fn offset(&self) -> BigRational {
        dot_mixed(&self.normal, &self.support.base).unwrap_or_default()
    }

    /// `(p − base)·n` as a perturbed scalar.
    pub fn side(&self, p: &PerturbedPoint) -> Result<Perturbed> {
        Ok(&p.pair_int(&self.normal)? - &Perturbed::constant(self.offset()))
    }

    /// `(p − base)·direction`, the position along the support.
    pub fn along(&self, p: &PerturbedPoint) -> Result<Perturbed> {
        let off = dot_mixed(&self.support.direction, &self.support.base)?;
        Ok(&p.pair_int(&self.support.direction)? - &Perturbed::constant(off))
    }

    fn sort_key(&self) -> (SupportKind, RationalVec, LatticeVec, ExponentPair, LatticeVec) {
        (
            self.support.kind,
            self.support.base.clone(),
            self.support.direction.clone(),
            self.function.base.clone(),
            self.normal.clone(),
        )
    }
}

/// A finite collection of walls, each nontrivial modulo `I^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScatteringDiagram {
    pub walls: Vec<Wall>,
    pub order: u32,
    pub r: usize,
}

impl ScatteringDiagram {
    pub fn new(walls: Vec<Wall>, order: u32, r: usize) -> Result<Self> {
        for w in &walls {
            if w.function.base.q.len() != r {
                return Err(Error::Dimension { expected: r, got: w.function.base.q.len() });
            }
        }
        let walls = normalize_walls(walls, order)?;
        let d = ScatteringDiagram { walls, order, r };
        d.check_exponent_cone()?;
        Ok(d)
    }

    pub fn empty(order: u32, r: usize) -> Self {
        ScatteringDiagram { walls: Vec::new(), order, r }
    }

    /// Generators of the exponent monoid: the primitive base exponents of the walls.
    pub fn exponent_cone(&self) -> Vec<ExponentPair> {
        let set: BTreeSet<ExponentPair> = self.walls.iter().map(|w| w.function.base.clone()).collect();
        set.into_iter().collect()
    }

    /// Every generator has positive total y-degree, so `Σ q_i` is a strictly positive functional.
    fn check_exponent_cone(&self) -> Result<()> {
        if self.walls.iter().any(|w| w.function.base.degree() == 0) {
            return Err(Error::InvalidWall("exponent cone is not strictly convex".into()));
        }
        Ok(())
    }

    pub fn truncate(&self, order: u32) -> ScatteringDiagram {
        let walls = self
            .walls
            .iter()
            .map(|w| Wall { function: w.function.truncate(order), ..w.clone() })
            .filter(|w| !w.function.is_trivial())
            .collect();
        ScatteringDiagram { walls, order: order.min(self.order), r: self.r }
    }

    pub fn is_positive(&self) -> bool {
        self.walls.iter().all(|w| w.function.all_nonnegative())
    }

    /// Pairwise support intersections and ray apexes, sorted.
    pub fn joints(&self) -> Vec<RationalVec> {
        find_joints(&self.walls)
    }

    pub fn normalize(&self) -> Result<ScatteringDiagram> {
        ScatteringDiagram::new(self.walls.clone(), self.order, self.r)
    }
}

fn support_intersection(a: &WallSupport, b: &WallSupport) -> Option<RationalVec> {
    if a.is_parallel(b) {
        return None;
    }
    let (da, db) = (a.dir_q(), b.dir_q());
    let rel = sub_vec(&b.base, &a.base);
    let den = cross(&da, &db);
    let s = cross(&rel, &db) / &den;
    let t = cross(&rel, &da) / &den;
    if (a.kind == SupportKind::Ray && s.is_negative()) || (b.kind == SupportKind::Ray && t.is_negative()) {
        return None;
    }
    Some(vec![&a.base[0] + &s * &da[0], &a.base[1] + &s * &da[1]])
}

fn find_joints(walls: &[Wall]) -> Vec<RationalVec> {
    let mut set = BTreeSet::new();
    for (i, a) in walls.iter().enumerate() {
        if a.support.kind == SupportKind::Ray {
            set.insert(a.support.base.clone());
        }
        for b in &walls[i + 1..] {
            if let Some(p) = support_intersection(&a.support, &b.support) {
                set.insert(p);
            }
        }
    }
    set.into_iter().collect()
}

fn merge_key(w: &Wall) -> (SupportKind, RationalVec, LatticeVec, ExponentPair) {
    (w.support.kind, w.support.base.clone(), w.support.direction.clone(), w.function.base.clone())
}

/// Merges walls sharing support and exponent direction, drops trivial ones, sorts canonically.
pub fn normalize_walls(walls: Vec<Wall>, order: u32) -> Result<Vec<Wall>> {
    let mut groups: BTreeMap<_, Wall> = BTreeMap::new();
    for w in walls {
        let w = Wall::new(w.support, w.normal, w.function.truncate(order))?;
        let key = merge_key(&w);
        match groups.get_mut(&key) {
            None => {
                groups.insert(key, w);
            }
            Some(acc) => {
                let f = if acc.normal == w.normal {
                    w.function.clone()
                } else if acc.normal.iter().zip(&w.normal).all(|(a, b)| *a == -b) {
                    w.function.pow(-1)?
                } else {
                    return Err(Error::InvalidWall("walls on one support with non-parallel normals".into()));
                };
                acc.function = acc.function.mul(&f)?;
            }
        }
    }
    let mut out: Vec<Wall> = groups.into_values().filter(|w| !w.function.is_trivial()).collect();
    out.sort_by_key(Wall::sort_key);
    Ok(out)
}

/// A polyline through perturbed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarPath {
    pub points: Vec<PerturbedPoint>,
}

/// A crossing of one wall with `sign = sign(γ(t−ε)·n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub wall: usize,
    pub sign: i8,
}

impl PlanarPath {
    pub fn new(points: Vec<PerturbedPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain("a path needs at least two points".into()));
        }
        Ok(PlanarPath { points })
    }

    pub fn segment(start: PerturbedPoint, end: PerturbedPoint) -> Self {
        PlanarPath { points: vec![start, end] }
    }

    pub fn start(&self) -> &PerturbedPoint {
        &self.points[0]
    }

    pub fn end(&self) -> &PerturbedPoint {
        self.points.last().expect("nonempty path")
    }

    /// Crossings grouped by simultaneous time, in path order.
    pub fn crossings(&self, d: &ScatteringDiagram) -> Result<Vec<Vec<Crossing>>> {
        let mut out = Vec::new();
        for pair in self.points.windows(2) {
            out.extend(segment_crossings(d, &pair[0], &pair[1])?);
        }
        Ok(out)
    }
}

struct Hit {
    num: Perturbed,
    den: Perturbed,
    wall: usize,
    sign: i8,
}

fn segment_crossings(d: &ScatteringDiagram, a: &PerturbedPoint, b: &PerturbedPoint) -> Result<Vec<Vec<Crossing>>> {
    let mut hits = Vec::new();
    for (i, w) in d.walls.iter().enumerate() {
        let (ha, hb) = (w.side(a)?, w.side(b)?);
        let (ga, gb) = (w.along(a)?, w.along(b)?);
        for (h, g, p) in [(&ha, &ga, a), (&hb, &gb, b)] {
            if h.is_zero() && (w.support.kind == SupportKind::Line || g.sign() >= 0) {
                return Err(Error::genericity("path endpoint lies on a wall", p.to_string()));
            }
        }
        if ha.sign() * hb.sign() >= 0 {
            continue;
        }
        let mut num = ha.clone();
        let mut den = &ha - &hb;
        if w.support.kind == SupportKind::Ray {
            let pos = (&(&ha * &gb) - &(&hb * &ga)).sign() * den.sign();
            if pos == 0 {
                return Err(Error::genericity("path crosses a ray apex", fmt_vec(&w.support.base)));
            }
            if pos < 0 {
                continue;
            }
        }
        if den.sign() < 0 {
            num = -num;
            den = -den;
        }
        hits.push(Hit { num, den, wall: i, sign: ha.sign() });
    }
    let cmp = |x: &Hit, y: &Hit| (&x.num * &y.den).cmp(&(&y.num * &x.den));
    hits.sort_by(cmp);
    let mut groups: Vec<Vec<Crossing>> = Vec::new();
    let mut prev: Option<&Hit> = None;
    for h in &hits {
        let same = prev.is_some_and(|p| cmp(p, h) == Ordering::Equal);
        if same {
            let first = &d.walls[groups.last().unwrap()[0].wall];
            if !cross(&first.normal, &d.walls[h.wall].normal).is_zero() {
                return Err(Error::genericity("path passes through a joint", format!("{a} → {b}")));
            }
            groups.last_mut().unwrap().push(Crossing { wall: h.wall, sign: h.sign });
        } else {
            groups.push(vec![Crossing { wall: h.wall, sign: h.sign }]);
        }
        prev = Some(h);
    }
    Ok(groups)
}

fn wall_series(w: &Wall, order: u32) -> TruncatedSeries {
    w.function.truncate(order).to_series().with_order(order)
}

/// Applies `E^{s}` for each crossed wall in path order to `g`.
pub fn path_ordered_product(d: &ScatteringDiagram, path: &PlanarPath, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    let mut out = g.clone();
    for group in path.crossings(d)? {
        for c in group {
            let w = &d.walls[c.wall];
            out = out.apply_wall(&w.normal, &wall_series(w, g.order()), c.sign as i64)?;
        }
    }
    Ok(out)
}

/// Walls through `joint` with the local direction along which each leaves it.
fn local_directions(walls: &[Wall], joint: &[BigRational]) -> Vec<(RationalVec, usize)> {
    let mut dirs = Vec::new();
    for (i, w) in walls.iter().enumerate() {
        if !w.support.contains(joint) {
            continue;
        }
        let d = w.support.dir_q();
        let neg: RationalVec = d.iter().map(|x| -x).collect();
        let at_apex = w.support.kind == SupportKind::Ray && w.support.base.as_slice() == joint;
        dirs.push((d, i));
        if !at_apex {
            dirs.push((neg, i));
        }
    }
    dirs.sort_by(|a, b| angle_cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));
    dirs
}

/// Counterclockwise loop product around `joint` applied to `x^{e_1}, x^{e_2}` at `order`.
pub fn loop_images(walls: &[Wall], r: usize, joint: &[BigRational], order: u32) -> Result<Vec<TruncatedSeries>> {
    let dirs = local_directions(walls, joint);
    let mut images: Vec<TruncatedSeries> = (0..2)
        .map(|i| {
            let mut m = lvec(&[0, 0]);
            m[i] = BigInt::one();
            TruncatedSeries::monomial(ExponentPair::from_m(m, r), BigInt::one(), order)
        })
        .collect();
    for (dir, i) in dirs {
        let w = &walls[i];
        let perp = rot90(&dir);
        let s = -sign_of(&dot_mixed(&w.normal, &perp)?);
        let f = wall_series(w, order);
        for img in images.iter_mut() {
            *img = img.apply_wall(&w.normal, &f, s as i64)?;
        }
    }
    Ok(images)
}

/// Result of a loop around a joint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointReport {
    pub joint: RationalVec,
    pub images: Vec<TruncatedSeries>,
    pub consistent: bool,
}

pub fn check_consistency(d: &ScatteringDiagram, joint: &[BigRational]) -> Result<JointReport> {
    let images = loop_images(&d.walls, d.r, joint, d.order)?;
    let consistent = images.iter().enumerate().all(|(i, img)| {
        let mut m = lvec(&[0, 0]);
        m[i] = BigInt::one();
        img.len() == 1 && img.coefficient(&ExponentPair::from_m(m, d.r)).is_one()
    });
    Ok(JointReport { joint: joint.to_vec(), images, consistent })
}

/// Chooses the normal of a new wall with exponent `w`; falls back to a quarter turn of the ray.
pub type Orientation<'a> = &'a dyn Fn(&ExponentPair) -> Option<LatticeVec>;

pub fn no_orientation(_: &ExponentPair) -> Option<LatticeVec> {
    None
}

fn degree_j_discrepancy(
    images: &[TruncatedSeries],
    r: usize,
    j: u32,
    joint: &[BigRational],
) -> Result<BTreeMap<ExponentPair, [BigInt; 2]>> {
    let mut out: BTreeMap<ExponentPair, [BigInt; 2]> = BTreeMap::new();
    for (i, img) in images.iter().enumerate() {
        let mut m = lvec(&[0, 0]);
        m[i] = BigInt::one();
        let shift = ExponentPair::from_m(m.iter().map(|x| -x).collect(), r);
        for (e, c) in img.terms() {
            let w = e.add(&shift);
            if w.is_zero() {
                if !c.is_one() {
                    return Err(Error::Internal("loop product changed a leading coefficient".into()));
                }
                continue;
            }
            if w.degree() < j {
                return Err(Error::Internal(format!(
                    "loop at {} is not the identity below degree {j}: term {w}",
                    fmt_vec(joint)
                )));
            }
            out.entry(w).or_insert_with(|| [BigInt::zero(), BigInt::zero()])[i] = c.clone();
        }
    }
    Ok(out)
}

/// Adds outgoing rays order by order until every joint loop is the identity mod `I^order`.
pub fn consistent_completion(initial: Vec<Wall>, order: u32, r: usize, orient: Orientation) -> Result<ScatteringDiagram> {
    let mut walls = normalize_walls(initial, order)?;
    for j in 1..order {
        let mut fresh = Vec::new();
        for joint in find_joints(&walls) {
            let images = loop_images(&walls, r, &joint, j + 1)?;
            for (w, nw) in degree_j_discrepancy(&images, r, j, &joint)? {
                fresh.push(new_ray(&joint, &w, &nw, order, orient)?);
            }
        }
        if !fresh.is_empty() {
            walls.extend(fresh);
            walls = normalize_walls(walls, order)?;
        }
    }
    ScatteringDiagram::new(walls, order, r)
}

fn new_ray(
    joint: &[BigRational],
    w: &ExponentPair,
    nw: &[BigInt; 2],
    order: u32,
    orient: Orientation,
) -> Result<Wall> {
    if w.m.iter().all(Zero::is_zero) {
        return Err(Error::Internal(format!("discrepancy at {} has zero x-exponent {w}", fmt_vec(joint))));
    }
    if !dot(nw, &w.m)?.is_zero() {
        return Err(Error::Internal(format!(
            "discrepancy {} at {} is not orthogonal to {w}",
            fmt_vec(nw),
            fmt_vec(joint)
        )));
    }
    let (dir, _) = primitive_part(&w.m.iter().map(|x| -x).collect::<Vec<_>>())?;
    let normal = match orient(w) {
        Some(n) if dot(&n, &w.m)?.is_zero() && n.iter().any(|x| !x.is_zero()) => primitive_part(&n)?.0,
        _ => rot90(&dir),
    };
    let k = if !normal[0].is_zero() { 0 } else { 1 };
    let (lambda, rem) = nw[k].div_rem(&normal[k]);
    if !rem.is_zero() || nw[1 - k] != &lambda * &normal[1 - k] {
        return Err(Error::Internal("discrepancy is not a multiple of the wall normal".into()));
    }
    let s_new = -sign_of(&dot(&normal, &rot90(&dir))?);
    let c = -lambda * BigInt::from(s_new);
    let support = WallSupport::ray(joint.to_vec(), dir)?;
    Wall::new(support, normal, ScatFunction::new(w.clone(), vec![c], order)?)
}

/// Sign of `(p − base)·n` for every wall; fails if `p` lies on a wall.
pub fn locate_chamber(d: &ScatteringDiagram, p: &PerturbedPoint) -> Result<Vec<i8>> {
    d.walls
        .iter()
        .map(|w| {
            let s = w.side(p)?.sign();
            if s == 0 {
                Err(Error::genericity("point lies on a wall", p.to_string()))
            } else {
                Ok(s)
            }
        })
        .collect()
}

fn line_offsets_ok(walls: &[Wall]) -> bool {
    let lines: Vec<&WallSupport> = walls.iter().map(|w| &w.support).collect();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(p) = support_intersection(lines[i], lines[j]) {
                if lines.iter().enumerate().any(|(l, s)| l != i && l != j && s.contains(&p)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Shifts each initial line by `−δ_i·w_i` with `n_i·w_i = 1` so the origin is strictly positive for all.
pub fn translate_for_positive_chamber(initial: &[Wall]) -> Result<Vec<Wall>> {
    let schemes: [fn(usize) -> i64; 4] = [|i| i as i64 + 1, |i| 1 << i, |i| (i as i64 + 1).pow(2), |i| 3i64.pow(i as u32)];
    for delta in schemes {
        let mut out = Vec::with_capacity(initial.len());
        for (i, w) in initial.iter().enumerate() {
            let n = &w.normal;
            let eg = n[0].extended_gcd(&n[1]);
            let sgn = if eg.gcd.is_negative() { BigInt::from(-1) } else { BigInt::one() };
            let unit = vec![&eg.x * &sgn, &eg.y * &sgn];
            let shift: RationalVec = to_rational(&unit).iter().map(|x| x * BigRational::from_integer(BigInt::from(-delta(i)))).collect();
            let support = WallSupport::new(add_vec(&w.support.base, &shift), w.support.direction.clone(), w.support.kind)?;
            out.push(Wall { support, ..w.clone() });
        }
        if line_offsets_ok(&out) {
            return Ok(out);
        }
    }
    Err(Error::Internal("no admissible translation offsets".into()))
}
