use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::hull::{self, Chart};
use crate::error::{Error, Result};
use crate::num::{self, QVec, Rational};

/// Closed half-space `normal · x <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: QVec,
    pub offset: Rational,
}

impl Halfspace {
    pub fn contains(&self, x: &[Rational]) -> bool {
        num::dot(&self.normal, x) <= self.offset
    }
}

/// Hyperplane `normal · x = offset`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hyperplane {
    pub normal: QVec,
    pub offset: Rational,
}

impl Hyperplane {
    pub fn contains(&self, x: &[Rational]) -> bool {
        num::dot(&self.normal, x) == self.offset
    }
}

/// A face given by the indices of its vertices in the owning polytope.
pub type Face = Vec<usize>;

/// Exact value `factor · sqrt(radicand)`; relative volumes of lower-dimensional
/// polytopes are rational multiples of a Gram-determinant square root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelVolume {
    pub factor: Rational,
    pub radicand: Rational,
}

impl RelVolume {
    pub fn value(&self) -> f64 {
        num::to_f64(&self.factor) * libm::sqrt(num::to_f64(&self.radicand))
    }

    /// The exact value when the radicand is a perfect rational square.
    pub fn as_rational(&self) -> Option<Rational> {
        let s = rational_sqrt(&self.radicand)?;
        Some(&self.factor * s)
    }
}

fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Rational::new(n, d))
}

/// Compact convex polytope with exact rational vertices, facet inequalities
/// relative to its affine hull, and the full face lattice.
///
/// Vertices are sorted lexicographically and facet normals are primitive
/// integer vectors lying in the direction space of the affine hull, so two
/// polytopes describing the same set compare equal.
#[derive(Clone, Debug)]
pub struct Polytope {
    ambient: usize,
    dim: usize,
    vertices: Vec<QVec>,
    facets: Vec<Halfspace>,
    facet_vertices: Vec<Face>,
    equations: Vec<Hyperplane>,
    faces: Vec<Vec<Face>>,
    chart_volume: Rational,
    gram: Rational,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.vertices == other.vertices
    }
}

impl Eq for Polytope {}

impl PartialOrd for Polytope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Polytope {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient.cmp(&other.ambient).then_with(|| self.vertices.cmp(&other.vertices))
    }
}

fn gram_det(basis: &[QVec]) -> Rational {
    let g: Vec<QVec> = basis.iter().map(|a| basis.iter().map(|b| num::dot(a, b)).collect()).collect();
    num::det(&g)
}

/// Orthogonal projector onto the row space of `basis`, as a function.
fn projector(basis: &[QVec]) -> impl Fn(&[Rational]) -> QVec + '_ {
    let g: Vec<QVec> = basis.iter().map(|a| basis.iter().map(|b| num::dot(a, b)).collect()).collect();
    let g_inv = num::inverse(&g).expect("chart basis is independent");
    move |v: &[Rational]| {
        let bv: QVec = basis.iter().map(|b| num::dot(b, v)).collect();
        let coef: QVec = g_inv.iter().map(|r| num::dot(r, &bv)).collect();
        let mut out = vec![Rational::zero(); v.len()];
        for (c, b) in coef.iter().zip(basis) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Face {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    intersect_sorted(a, b).len() == a.len()
}

/// Face lattice by facet-incidence closure: the facets of a face are its
/// inclusion-maximal proper intersections with facets of the polytope.
fn face_lattice(dim: usize, nverts: usize, facet_sets: &[Face]) -> Vec<Vec<Face>> {
    let mut faces: Vec<Vec<Face>> = vec![Vec::new(); dim + 1];
    faces[dim] = vec![(0..nverts).collect()];
    if dim == 0 {
        return faces;
    }
    faces[dim - 1] = facet_sets.to_vec();
    for k in (1..dim).rev() {
        let mut next: BTreeSet<Face> = BTreeSet::new();
        for face in &faces[k] {
            let cands: BTreeSet<Face> = facet_sets
                .iter()
                .map(|g| intersect_sorted(face, g))
                .filter(|c| !c.is_empty() && c.len() < face.len())
                .collect();
            for c in &cands {
                if !cands.iter().any(|o| o.len() > c.len() && is_subset(c, o)) {
                    next.insert(c.clone());
                }
            }
        }
        faces[k - 1] = next.into_iter().collect();
    }
    faces
}

impl Polytope {
    /// Convex hull of a nonempty point set; low-dimensional input yields a
    /// low-dimensional polytope.
    pub fn from_points(points: &[QVec]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let n = first.len();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
        if n == 0 {
            return Err(Error::InvalidArgument("ambient dimension must be at least 1".into()));
        }
        let h = hull::hull(points);
        Ok(Self::from_hull(n, h))
    }

    fn from_hull(n: usize, h: hull::Hull) -> Self {
        let Chart { origin, pivots, basis } = h.chart.clone();
        let d = basis.len();
        let mut remap = vec![usize::MAX; h.points.len()];
        for (new, &old) in h.vertices.iter().enumerate() {
            remap[old] = new;
        }
        let vertices: Vec<QVec> = h.vertices.iter().map(|&i| h.points[i].clone()).collect();

        let proj = projector(&basis);
        let mut facets: Vec<(Halfspace, Face)> = h
            .facets
            .iter()
            .map(|f| {
                let mut lifted = vec![Rational::zero(); n];
                for (a, &p) in f.normal.iter().zip(&pivots) {
                    lifted[p] = a.clone();
                }
                let normal = num::primitive(&proj(&lifted));
                let verts: Face = f.points.iter().map(|&i| remap[i]).filter(|&i| i != usize::MAX).collect();
                let offset = num::dot(&normal, &vertices[verts[0]]);
                (Halfspace { normal, offset }, verts)
            })
            .collect();
        facets.sort();

        let equations = if d < n {
            let mut ns = num::nullspace(&basis, n);
            num::rref(&mut ns);
            ns.iter()
                .map(|e| {
                    let normal = num::primitive(e);
                    let offset = num::dot(&normal, &origin);
                    Hyperplane { normal, offset }
                })
                .collect()
        } else {
            Vec::new()
        };

        let (facets, facet_vertices): (Vec<_>, Vec<_>) = facets.into_iter().unzip();
        let faces = face_lattice(d, vertices.len(), &facet_vertices);
        let gram = if d == 0 { Rational::one() } else { gram_det(&basis) };
        Polytope {
            ambient: n,
            dim: d,
            vertices,
            facets,
            facet_vertices,
            equations,
            faces,
            chart_volume: h.chart_volume,
            gram,
        }
    }

    pub fn point(p: QVec) -> Result<Self> {
        Self::from_points(&[p])
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Dimension of the affine hull.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.ambient
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    /// Facet inequalities relative to the affine hull.
    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    /// Vertex indices of each facet, aligned with [`Polytope::facets`].
    pub fn facet_vertices(&self) -> &[Face] {
        &self.facet_vertices
    }

    /// Equations of the affine hull; empty for full-dimensional polytopes.
    pub fn equations(&self) -> &[Hyperplane] {
        &self.equations
    }

    /// All `k`-dimensional faces; `faces(dim())` is the polytope itself.
    pub fn faces(&self, k: usize) -> &[Face] {
        self.faces.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn face_count(&self) -> usize {
        self.faces.iter().map(Vec::len).sum()
    }

    pub fn face_points(&self, face: &[usize]) -> Vec<QVec> {
        face.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    /// The face as a polytope of its own.
    pub fn face_polytope(&self, face: &[usize]) -> Polytope {
        Polytope::from_points(&self.face_points(face)).expect("faces are nonempty")
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.ambient
            && self.equations.iter().all(|e| e.contains(x))
            && self.facets.iter().all(|f| f.contains(x))
    }

    /// Lebesgue volume in the ambient space; zero unless full-dimensional.
    pub fn volume(&self) -> Rational {
        if self.is_full_dimensional() {
            self.chart_volume.clone()
        } else {
            Rational::zero()
        }
    }

    /// Volume inside the affine hull; a point has relative volume 1.
    pub fn relative_volume(&self) -> RelVolume {
        if self.dim == 0 {
            return RelVolume { factor: Rational::one(), radicand: Rational::one() };
        }
        RelVolume { factor: self.chart_volume.clone(), radicand: self.gram.clone() }
    }

    /// Average of the vertices; lies in the relative interior.
    pub fn centroid(&self) -> QVec {
        let k = num::q(self.vertices.len() as i64);
        (0..self.ambient)
            .map(|j| self.vertices.iter().fold(Rational::zero(), |s, v| s + &v[j]) / &k)
            .collect()
    }

    /// Image under `x ↦ M x + t`, where `matrix` has one row per output coordinate.
    pub fn map_affine(&self, matrix: &[QVec], shift: Option<&[Rational]>) -> Result<Polytope> {
        if let Some(r) = matrix.iter().find(|r| r.len() != self.ambient) {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: r.len() });
        }
        let pts: Vec<QVec> = self
            .vertices
            .iter()
            .map(|v| {
                let mut y: QVec = matrix.iter().map(|r| num::dot(r, v)).collect();
                if let Some(t) = shift {
                    y = num::add(&y, t);
                }
                y
            })
            .collect();
        Polytope::from_points(&pts)
    }

    pub fn translate(&self, t: &[Rational]) -> Result<Polytope> {
        if t.len() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: t.len() });
        }
        let pts: Vec<QVec> = self.vertices.iter().map(|v| num::add(v, t)).collect();
        Polytope::from_points(&pts)
    }

    /// `λ P`; `λ = 0` collapses to the origin.
    pub fn scale(&self, lambda: &Rational) -> Polytope {
        let pts: Vec<QVec> = self.vertices.iter().map(|v| num::scale(v, lambda)).collect();
        Polytope::from_points(&pts).expect("nonempty")
    }

    /// `-P`.
    pub fn reflect(&self) -> Polytope {
        self.scale(&-Rational::one())
    }

    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        let pts = minkowski_points(self.vertices(), other.vertices(), self.ambient, other.ambient)?;
        Polytope::from_points(&pts)
    }

    /// `P ∩ {normal · x <= offset}`, `None` when empty.
    pub fn clip(&self, normal: &[Rational], offset: &Rational) -> Option<Polytope> {
        let vals: Vec<Rational> = self.vertices.iter().map(|v| num::dot(normal, v)).collect();
        if vals.iter().all(|v| v <= offset) {
            return Some(self.clone());
        }
        let mut pts: Vec<QVec> =
            self.vertices.iter().zip(&vals).filter(|(_, s)| *s <= offset).map(|(v, _)| v.clone()).collect();
        pts.extend(self.edge_crossings(&vals, offset));
        if pts.is_empty() {
            return None;
        }
        Polytope::from_points(&pts).ok()
    }

    /// `P ∩ {normal · x = offset}`, `None` when empty.
    pub fn slice(&self, normal: &[Rational], offset: &Rational) -> Option<Polytope> {
        let vals: Vec<Rational> = self.vertices.iter().map(|v| num::dot(normal, v)).collect();
        if vals.iter().all(|v| v == offset) {
            return Some(self.clone());
        }
        let mut pts: Vec<QVec> =
            self.vertices.iter().zip(&vals).filter(|(_, s)| *s == offset).map(|(v, _)| v.clone()).collect();
        pts.extend(self.edge_crossings(&vals, offset));
        if pts.is_empty() {
            return None;
        }
        Polytope::from_points(&pts).ok()
    }

    fn edge_crossings<'a>(&'a self, vals: &'a [Rational], offset: &'a Rational) -> impl Iterator<Item = QVec> + 'a {
        self.faces(1).iter().filter_map(move |e| {
            let (a, b) = (e[0], e[1]);
            let (sa, sb) = (&vals[a], &vals[b]);
            if (sa < offset && sb > offset) || (sa > offset && sb < offset) {
                let t = (offset - sa) / (sb - sa);
                let va = &self.vertices[a];
                let vb = &self.vertices[b];
                Some(va.iter().zip(vb).map(|(x, y)| x + &t * (y - x)).collect())
            } else {
                None
            }
        })
    }

    /// Exact intersection, `None` when disjoint.
    pub fn intersect(&self, other: &Polytope) -> Result<Option<Polytope>> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        let mut cur = self.clone();
        for e in other.equations() {
            match cur.slice(&e.normal, &e.offset) {
                Some(p) => cur = p,
                None => return Ok(None),
            }
        }
        for f in other.facets() {
            match cur.clip(&f.normal, &f.offset) {
                Some(p) => cur = p,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (QVec, QVec) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for j in 0..self.ambient {
                if v[j] < lo[j] {
                    lo[j] = v[j].clone();
                }
                if v[j] > hi[j] {
                    hi[j] = v[j].clone();
                }
            }
        }
        (lo, hi)
    }

    /// Every face `F` with the face's own dimension, vertex set, and the
    /// indices of facets containing it; useful for iterating the normal cycle.
    pub fn faces_with_facets(&self) -> Vec<(usize, Face, Vec<usize>)> {
        let mut out = Vec::new();
        for k in 0..=self.dim {
            for f in self.faces(k) {
                let containing: Vec<usize> = self
                    .facet_vertices
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| is_subset(f, g))
                    .map(|(i, _)| i)
                    .collect();
                out.push((k, f.clone(), containing));
            }
        }
        out
    }
}

pub(crate) fn minkowski_points(a: &[QVec], b: &[QVec], na: usize, nb: usize) -> Result<Vec<QVec>> {
    if na != nb {
        return Err(Error::DimensionMismatch { expected: na, found: nb });
    }
    Ok(a.iter().flat_map(|v| b.iter().map(move |w| num::add(v, w))).collect())
}

/// Volume of `conv(points)` in the ambient space without building the face lattice.
pub fn hull_volume(points: &[QVec]) -> Rational {
    let n = points[0].len();
    let (chart, vol) = hull::hull_chart_volume(points);
    if chart.dim() == n {
        vol
    } else {
        Rational::zero()
    }
}

/// Extreme points of `conv(points)`, sorted.
pub fn extreme_points(points: &[QVec]) -> Vec<QVec> {
    let h = hull::hull(points);
    h.vertices.iter().map(|&i| h.points[i].clone()).collect()
}

/// Volume of `A_1 + ... + A_k` computed by hulling partial sums.
pub fn minkowski_sum_volume(bodies: &[&Polytope]) -> Result<Rational> {
    let n = bodies.first().ok_or(Error::EmptyInput)?.ambient_dim();
    let mut acc: Vec<QVec> = bodies[0].vertices().to_vec();
    for b in &bodies[1..] {
        let pts = minkowski_points(&acc, b.vertices(), n, b.ambient_dim())?;
        acc = extreme_points(&pts);
    }
    Ok(hull_volume(&acc))
}
