//! Exact convex hulls by placing triangulation.
//!
//! Points are first mapped into a chart of their affine hull (a coordinate
//! projection that is injective on it), scaled to integers, and inserted one
//! by one. Every insertion beyond at least one boundary simplex cones the
//! visible simplices to the new point, which yields both the boundary
//! complex and a triangulation of the interior. Coplanar boundary simplices
//! are merged into facets afterwards by comparing primitive normals.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::num::{self, QVec, Rational};

/// Affine chart of a flat: `x = origin + Σ y_j basis_j`, and `y_j = (x - origin)[pivots_j]`.
#[derive(Clone, Debug)]
pub(crate) struct Chart {
    pub origin: QVec,
    pub pivots: Vec<usize>,
    /// Rows in reduced row echelon form, identity on the pivot columns.
    pub basis: Vec<QVec>,
}

impl Chart {
    pub fn coords(&self, x: &[Rational]) -> QVec {
        self.pivots.iter().map(|&p| &x[p] - &self.origin[p]).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Outward facet normal in chart coordinates, with the
/// indices of all input points lying on it.
#[derive(Clone, Debug)]
pub(crate) struct ChartFacet {
    pub normal: QVec,
    pub points: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct Hull {
    /// Deduplicated input, sorted lexicographically.
    pub points: Vec<QVec>,
    pub chart: Chart,
    /// Indices into `points` of the extreme points, increasing.
    pub vertices: Vec<usize>,
    pub facets: Vec<ChartFacet>,
    /// Volume measured in chart coordinates.
    pub chart_volume: Rational,
}

struct Simplex {
    verts: Vec<usize>,
    normal: Vec<BigInt>,
    offset: BigInt,
    alive: bool,
}

fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |s, (x, y)| s + x * y)
}

/// Chart of the affine hull of `points` plus the indices of an affinely
/// independent subset (the first is always 0).
pub(crate) fn affine_chart(points: &[QVec]) -> (Chart, Vec<usize>) {
    let origin = points[0].clone();
    let mut rows: Vec<(QVec, usize)> = Vec::new();
    let mut chosen = vec![0];
    for (i, p) in points.iter().enumerate().skip(1) {
        let mut v = num::sub(p, &origin);
        for (row, piv) in &rows {
            if !v[*piv].is_zero() {
                let f = v[*piv].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= r * &f;
                }
            }
        }
        if let Some(piv) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[piv].recip();
            let v: QVec = v.iter().map(|x| x * &inv).collect();
            rows.push((v, piv));
            chosen.push(i);
        }
    }
    let mut basis: Vec<QVec> = rows.into_iter().map(|(r, _)| r).collect();
    let pivots = num::rref(&mut basis);
    (Chart { origin, pivots, basis }, chosen)
}

fn plane_through(pts: &[Vec<BigInt>], verts: &[usize], d: usize) -> (Vec<BigInt>, BigInt) {
    let base = &pts[verts[0]];
    let diffs: Vec<Vec<BigInt>> =
        verts[1..].iter().map(|&v| pts[v].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    let normal: Vec<BigInt> = (0..d)
        .map(|k| {
            let minor: Vec<Vec<BigInt>> = diffs
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, x)| x.clone()).collect())
                .collect();
            let m = num::det_int(minor);
            if k % 2 == 0 {
                m
            } else {
                -m
            }
        })
        .collect();
    let offset = dot_int(&normal, base);
    (normal, offset)
}

fn simplex_det(pts: &[Vec<BigInt>], apex: usize, verts: &[usize]) -> BigInt {
    let a = &pts[apex];
    let rows = verts.iter().map(|&v| pts[v].iter().zip(a).map(|(x, y)| x - y).collect()).collect();
    num::det_int(rows).abs()
}

/// Exact hull of a nonempty point set.
pub(crate) fn hull(input: &[QVec]) -> Hull {
    hull_impl(input, true)
}

/// Dimension of the affine hull and the volume in chart coordinates.
pub(crate) fn hull_chart_volume(input: &[QVec]) -> (Chart, Rational) {
    let h = hull_impl(input, false);
    (h.chart, h.chart_volume)
}

fn hull_impl(input: &[QVec], with_facets: bool) -> Hull {
    let mut points = input.to_vec();
    points.sort();
    points.dedup();
    let (chart, indep) = affine_chart(&points);
    let d = chart.dim();
    if d == 0 {
        return Hull { points, chart, vertices: vec![0], facets: Vec::new(), chart_volume: Rational::one() };
    }
    let coords: Vec<QVec> = points.iter().map(|p| chart.coords(p)).collect();
    let scale = coords.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let pts: Vec<Vec<BigInt>> =
        coords.iter().map(|c| c.iter().map(|x| (x * &scale).to_integer()).collect()).collect();

    // Interior reference point, scaled by d + 1 to stay integral.
    let inner: Vec<BigInt> =
        (0..d).map(|j| indep.iter().fold(BigInt::zero(), |s, &i| s + &pts[i][j])).collect();
    let inner_scale = BigInt::from(d + 1);

    let mut simplices: Vec<Simplex> = Vec::new();
    let mut ridges: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut twice_volume = simplex_det(&pts, indep[0], &indep[1..]);

    let add_simplex = |verts: Vec<usize>, simplices: &mut Vec<Simplex>, ridges: &mut BTreeMap<_, _>| {
        let (mut normal, mut offset) = plane_through(&pts, &verts, d);
        if dot_int(&normal, &inner) > &offset * &inner_scale {
            normal.iter_mut().for_each(|x| *x = -&*x);
            offset = -offset;
        }
        let id = simplices.len();
        for skip in 0..verts.len() {
            let ridge: Vec<usize> =
                verts.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v).collect();
            ridges.entry(ridge).or_insert_with(Vec::new).push(id);
        }
        simplices.push(Simplex { verts, normal, offset, alive: true });
    };

    for skip in 0..=d {
        let mut verts: Vec<usize> =
            indep.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v).collect();
        verts.sort_unstable();
        add_simplex(verts, &mut simplices, &mut ridges);
    }

    for p in 0..pts.len() {
        if indep.contains(&p) {
            continue;
        }
        let visible: Vec<usize> = (0..simplices.len())
            .filter(|&s| simplices[s].alive && dot_int(&simplices[s].normal, &pts[p]) > simplices[s].offset)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut horizon: Vec<Vec<usize>> = Vec::new();
        for &s in &visible {
            twice_volume += simplex_det(&pts, p, &simplices[s].verts);
            let verts = simplices[s].verts.clone();
            for skip in 0..verts.len() {
                let ridge: Vec<usize> =
                    verts.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v).collect();
                let other = ridges[&ridge].iter().copied().find(|&o| o != s);
                if let Some(o) = other {
                    if !visible.contains(&o) {
                        horizon.push(ridge);
                    }
                }
            }
        }
        for &s in &visible {
            simplices[s].alive = false;
            let verts = simplices[s].verts.clone();
            for skip in 0..verts.len() {
                let ridge: Vec<usize> =
                    verts.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v).collect();
                if let Some(list) = ridges.get_mut(&ridge) {
                    list.retain(|&x| x != s);
                    if list.is_empty() {
                        ridges.remove(&ridge);
                    }
                }
            }
        }
        for ridge in horizon {
            let mut verts = ridge;
            verts.push(p);
            verts.sort_unstable();
            add_simplex(verts, &mut simplices, &mut ridges);
        }
    }

    let denom = Rational::from_integer(num::factorial(d) * num_traits::pow(scale.clone(), d));
    let chart_volume = Rational::from_integer(twice_volume) / denom;

    if !with_facets {
        return Hull { points, chart, vertices: Vec::new(), facets: Vec::new(), chart_volume };
    }

    // Merge coplanar boundary simplices into facets.
    let mut planes: BTreeMap<(Vec<BigInt>, BigInt), ()> = BTreeMap::new();
    for s in simplices.iter().filter(|s| s.alive) {
        let g = s.normal.iter().fold(s.offset.clone(), |acc, x| acc.gcd(x));
        let g = if g.is_zero() { BigInt::one() } else { g };
        let n: Vec<BigInt> = s.normal.iter().map(|x| x / &g).collect();
        planes.insert((n, &s.offset / &g), ());
    }
    let mut facets: Vec<ChartFacet> = Vec::new();
    for ((normal, offset), ()) in planes {
        let on: Vec<usize> = (0..pts.len()).filter(|&i| dot_int(&normal, &pts[i]) == offset).collect();
        // Primitive normal in chart coordinates; the offset rescales with the points.
        let prim = num::primitive(&normal.iter().cloned().map(Rational::from_integer).collect::<QVec>());
        facets.push(ChartFacet { normal: prim, points: on });
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
    for (f, facet) in facets.iter().enumerate() {
        for &i in &facet.points {
            incident[i].push(f);
        }
    }
    let vertices: Vec<usize> = (0..pts.len())
        .filter(|&i| {
            incident[i].len() >= d && {
                let rows: Vec<QVec> = incident[i].iter().map(|&f| facets[f].normal.clone()).collect();
                num::rank(&rows) == d
            }
        })
        .collect();
    Hull { points, chart, vertices, facets, chart_volume }
}
