//! Small exact polytopes (dimension 2 or 3) in dual representation.

use crate::error::{DofError, Result};
use crate::math::{dot, fmt_rat, int, serde_rat, serde_rat_vec, serde_rat_vecvec, RatMatrix, RatVector, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// `normal · d ≤ offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(rename = "a", with = "serde_rat_vec")]
    pub normal: RatVector,
    #[serde(rename = "b", with = "serde_rat")]
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: RatVector, offset: Rational) -> Result<Self> {
        if normal.iter().all(|x| x.is_zero()) {
            return Err(DofError::InvalidInput("halfspace normal is zero".into()));
        }
        Ok(Halfspace { normal, offset })
    }

    /// `Σ coef_i d_i ≤ 1`, the shape of every region row here.
    pub fn unit(coefs: RatVector) -> Self {
        Halfspace::new(coefs, Rational::one()).expect("nonzero row")
    }

    /// `d_axis ≥ 0`.
    pub fn nonneg(dim: usize, axis: usize) -> Self {
        let mut n = vec![Rational::zero(); dim];
        n[axis] = -Rational::one();
        Halfspace { normal: n, offset: Rational::zero() }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn eval(&self, p: &[Rational]) -> Rational {
        dot(&self.normal, p)
    }

    pub fn satisfied(&self, p: &[Rational]) -> bool {
        self.eval(p) <= self.offset
    }

    pub fn tight(&self, p: &[Rational]) -> bool {
        self.eval(p) == self.offset
    }

    /// Offset scaled to ±1 when nonzero; otherwise the largest |coefficient| is 1.
    pub fn normalized(&self) -> Halfspace {
        let s = if !self.offset.is_zero() { self.offset.abs() } else { self.normal.iter().map(|x| x.abs()).max().expect("nonempty normal") };
        Halfspace { normal: self.normal.iter().map(|x| x / &s).collect(), offset: &self.offset / &s }
    }

    /// Normal scaled so its largest |coefficient| is 1, with the matching offset.
    /// Two rows with equal direction keys are parallel and co-oriented.
    fn direction_key(&self) -> (RatVector, Rational) {
        let s = self.normal.iter().map(|x| x.abs()).max().expect("nonempty normal");
        (self.normal.iter().map(|x| x / &s).collect(), &self.offset / &s)
    }

    pub fn describe(&self) -> String {
        let terms: Vec<String> = self.normal.iter().map(fmt_rat).collect();
        format!("[{}]·d <= {}", terms.join(", "), fmt_rat(&self.offset))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
    #[serde(with = "serde_rat_vecvec")]
    pub vertices: Vec<RatVector>,
}

impl Region {
    /// Builds the region, adding `d_i ≥ 0` rows that are missing, and
    /// enumerates its vertices.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Region> {
        if !(2..=3).contains(&dim) {
            return Err(DofError::InvalidInput(format!("dimension {dim} not supported")));
        }
        let mut hs = halfspaces;
        if let Some(h) = hs.iter().find(|h| h.dim() != dim) {
            return Err(DofError::DimensionMismatch(dim, h.dim()));
        }
        for axis in 0..dim {
            let nn = Halfspace::nonneg(dim, axis);
            if !hs.iter().any(|h| h.direction_key() == nn.direction_key()) {
                hs.push(nn);
            }
        }
        if !recession_cone_trivial(dim, &hs) {
            return Err(DofError::Unbounded);
        }
        let vertices = enumerate_vertices(dim, &hs);
        if vertices.is_empty() {
            return Err(DofError::EmptyRegion);
        }
        Ok(Region { dim, halfspaces: hs, vertices })
    }

    pub fn vertices(&self) -> &[RatVector] {
        &self.vertices
    }

    pub fn contains(&self, p: &[Rational]) -> Result<bool> {
        if p.len() != self.dim {
            return Err(DofError::DimensionMismatch(self.dim, p.len()));
        }
        Ok(self.halfspaces.iter().all(|h| h.satisfied(p)))
    }

    /// Affine dimension of the vertex set.
    pub fn affine_dim(&self) -> usize {
        affine_rank(&self.vertices)
    }

    pub fn tight_halfspaces(&self, p: &[Rational]) -> Vec<usize> {
        (0..self.halfspaces.len()).filter(|&i| self.halfspaces[i].tight(p)).collect()
    }
}

pub fn vertices(r: &Region) -> &[RatVector] {
    r.vertices()
}

pub fn contains(r: &Region, p: &[Rational]) -> Result<bool> {
    r.contains(p)
}

/// `a ⊆ b`: every vertex of `a` satisfies every row of `b`.
pub fn subset(a: &Region, b: &Region) -> Result<bool> {
    if a.dim != b.dim {
        return Err(DofError::DimensionMismatch(a.dim, b.dim));
    }
    Ok(a.vertices.iter().all(|v| b.halfspaces.iter().all(|h| h.satisfied(v))))
}

pub fn set_equal(a: &Region, b: &Region) -> Result<bool> {
    Ok(subset(a, b)? && subset(b, a)?)
}

pub fn maximize(r: &Region, c: &[Rational]) -> Result<(Rational, RatVector)> {
    if c.len() != r.dim {
        return Err(DofError::DimensionMismatch(r.dim, c.len()));
    }
    let mut best: Option<(Rational, &RatVector)> = None;
    for v in &r.vertices {
        let val = dot(c, v);
        if best.as_ref().is_none_or(|(b, _)| val > *b) {
            best = Some((val, v));
        }
    }
    best.map(|(val, v)| (val, v.clone())).ok_or(DofError::EmptyRegion)
}

/// Every vertex attaining the maximum of `c · d`.
pub fn maximizers(r: &Region, c: &[Rational]) -> Result<Vec<RatVector>> {
    let (best, _) = maximize(r, c)?;
    Ok(r.vertices.iter().filter(|v| dot(c, v) == best).cloned().collect())
}

/// Normalizes rows, then drops exact duplicates and parallel rows that are
/// dominated by a tighter co-oriented row.
pub fn canonicalize(r: &Region) -> Region {
    let mut keep: Vec<Halfspace> = Vec::new();
    for h in &r.halfspaces {
        let (dir, off) = h.direction_key();
        if let Some(i) = keep.iter().position(|k| k.direction_key().0 == dir) {
            if off < keep[i].direction_key().1 {
                keep[i] = h.normalized();
            }
        } else {
            keep.push(h.normalized());
        }
    }
    Region { dim: r.dim, halfspaces: keep, vertices: r.vertices.clone() }
}

/// Keeps only facet-defining rows: those whose tight vertices affinely span
/// a hyperplane. Applied after `canonicalize`.
pub fn eliminate_redundant(r: &Region) -> Region {
    let c = canonicalize(r);
    if c.affine_dim() < c.dim {
        return c;
    }
    let hs = c
        .halfspaces
        .iter()
        .filter(|h| {
            let tight: Vec<RatVector> = c.vertices.iter().filter(|v| h.tight(v)).cloned().collect();
            !tight.is_empty() && affine_rank(&tight) == c.dim - 1
        })
        .cloned()
        .collect();
    Region { dim: c.dim, halfspaces: hs, vertices: c.vertices }
}

/// A two-dimensional face living in the coordinate plane that omits `missing`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub region: Region,
    pub missing: usize,
}

impl Face {
    pub fn embedded_vertices(&self) -> Vec<RatVector> {
        self.region.vertices.iter().map(|v| embed(v, self.missing)).collect()
    }
}

pub fn embed(v: &[Rational], missing: usize) -> RatVector {
    let mut out = v.to_vec();
    out.insert(missing, Rational::zero());
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hull {
    pub region: Region,
    /// The point set does not span the ambient space.
    pub degenerate: bool,
}

/// Convex hull of the embedded face vertices together with `points`.
pub fn convex_hull(points: &[RatVector], faces: &[Face]) -> Result<Hull> {
    let mut pts: Vec<RatVector> = points.to_vec();
    for f in faces {
        pts.extend(f.embedded_vertices());
    }
    if pts.is_empty() {
        return Err(DofError::EmptyRegion);
    }
    let dim = pts[0].len();
    if let Some(p) = pts.iter().find(|p| p.len() != dim) {
        return Err(DofError::DimensionMismatch(dim, p.len()));
    }
    pts.sort();
    pts.dedup();
    let k = affine_rank(&pts);
    let p0 = pts[0].clone();
    let diffs: Vec<RatVector> = pts[1..].iter().map(|p| sub(p, &p0)).collect();
    let mut hs = Vec::new();
    // normals of the affine hull, as equality pairs
    let eq_normals: Vec<RatVector> = if diffs.is_empty() { identity_rows(dim) } else { RatMatrix::from_rows(diffs.clone())?.kernel() };
    for n in &eq_normals {
        let off = dot(n, &p0);
        hs.push(Halfspace::new(n.clone(), off.clone())?);
        hs.push(Halfspace::new(n.iter().map(|x| -x).collect(), -off)?);
    }
    if k >= 1 {
        for subset in combinations(pts.len(), k) {
            let base = &pts[subset[0]];
            let mut rows: Vec<RatVector> = subset[1..].iter().map(|&i| sub(&pts[i], base)).collect();
            rows.extend(eq_normals.iter().cloned());
            let ker = RatMatrix::from_rows(rows)?.kernel();
            if ker.len() != 1 {
                continue;
            }
            let n = ker.into_iter().next().expect("one kernel vector");
            let off = dot(&n, base);
            let vals: Vec<Rational> = pts.iter().map(|p| dot(&n, p)).collect();
            let le = vals.iter().all(|v| *v <= off);
            let ge = vals.iter().all(|v| *v >= off);
            let h = if le {
                Halfspace::new(n, off)?
            } else if ge {
                Halfspace::new(n.iter().map(|x| -x).collect(), -off)?
            } else {
                continue;
            };
            let h = h.normalized();
            if !hs.contains(&h) {
                hs.push(h);
            }
        }
    }
    let region = Region::from_halfspaces(dim, hs)?;
    Ok(Hull { region, degenerate: k < dim })
}

fn identity_rows(dim: usize) -> Vec<RatVector> {
    (0..dim).map(|i| (0..dim).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

fn sub(a: &[Rational], b: &[Rational]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn affine_rank(pts: &[RatVector]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let diffs: Vec<RatVector> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
    RatMatrix::from_rows(diffs).map(|m| m.rank()).unwrap_or(0)
}

/// All `k`-element index subsets of `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Intersections of `dim` rows with a unique solution that satisfy all rows.
fn enumerate_vertices(dim: usize, hs: &[Halfspace]) -> Vec<RatVector> {
    let mut out: Vec<RatVector> = Vec::new();
    for idx in combinations(hs.len(), dim) {
        let a = RatMatrix::from_rows(idx.iter().map(|&i| hs[i].normal.clone()).collect()).expect("rows share the dimension");
        let b: Vec<Rational> = idx.iter().map(|&i| hs[i].offset.clone()).collect();
        let Ok(x) = a.solve_unique(&b) else { continue };
        if hs.iter().all(|h| h.satisfied(&x)) {
            out.push(x);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The region already lies in the nonnegative orthant, so it is bounded iff
/// no direction r ≥ 0 with Σ r = 1 satisfies every row's normal · r ≤ 0.
fn recession_cone_trivial(dim: usize, hs: &[Halfspace]) -> bool {
    let mut cone: Vec<Halfspace> = hs.iter().map(|h| Halfspace { normal: h.normal.clone(), offset: Rational::zero() }).collect();
    let ones: RatVector = vec![Rational::one(); dim];
    cone.push(Halfspace { normal: ones.clone(), offset: Rational::one() });
    cone.push(Halfspace { normal: ones.iter().map(|x| -x).collect(), offset: -Rational::one() });
    enumerate_vertices(dim, &cone).is_empty()
}

pub fn unit_simplex(dim: usize) -> Region {
    Region::from_halfspaces(dim, vec![Halfspace::unit(vec![int(1); dim])]).expect("simplex is valid")
}
