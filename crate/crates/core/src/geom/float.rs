//! Floating-point companion of [`Polytope`] for metric queries.

use alloc::vec::Vec;

use super::polytope::Polytope;
use crate::error::{Error, Result};
use crate::num;

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dotf(a, a))
}

/// Modified Gram–Schmidt; vectors whose residual falls below `tol` are skipped.
pub fn orthonormalize(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = dotf(&w, e);
                w.iter_mut().zip(e).for_each(|(x, y)| *x -= c * y);
            }
        }
        let l = norm(&w);
        if l > tol {
            out.push(w.into_iter().map(|x| x / l).collect());
        }
    }
    out
}

struct FlatF {
    base: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

/// Polytope with `f64` data: unit facet normals and an orthonormal frame
/// for the affine hull of every face.
pub struct FloatPolytope {
    vertices: Vec<Vec<f64>>,
    facets: Vec<(Vec<f64>, f64)>,
    equations: Vec<(Vec<f64>, f64)>,
    faces: Vec<FlatF>,
    scale: f64,
}

impl FloatPolytope {
    pub fn new(p: &Polytope) -> Self {
        let unit = |normal: &[num::Rational], offset: &num::Rational| {
            let n = num::vec_to_f64(normal);
            let l = norm(&n);
            (n.iter().map(|x| x / l).collect::<Vec<f64>>(), num::to_f64(offset) / l)
        };
        let vertices: Vec<Vec<f64>> = p.vertices().iter().map(|v| num::vec_to_f64(v)).collect();
        let scale = vertices.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        let mut faces = Vec::new();
        for k in 0..=p.dim() {
            for f in p.faces(k) {
                let base = vertices[f[0]].clone();
                let diffs: Vec<Vec<f64>> =
                    f[1..].iter().map(|&i| vertices[i].iter().zip(&base).map(|(a, b)| a - b).collect()).collect();
                let basis = orthonormalize(&diffs, 1e-12 * scale);
                faces.push(FlatF { base, basis });
            }
        }
        FloatPolytope {
            facets: p.facets().iter().map(|h| unit(&h.normal, &h.offset)).collect(),
            equations: p.equations().iter().map(|h| unit(&h.normal, &h.offset)).collect(),
            vertices,
            faces,
            scale,
        }
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.equations.iter().all(|(a, b)| (dotf(a, x) - b).abs() <= tol)
            && self.facets.iter().all(|(a, b)| dotf(a, x) <= b + tol)
    }

    /// Euclidean distance from `x`; the nearest point is the projection onto
    /// the affine hull of some face, and lies in that face.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let tol = 1e-11 * (self.scale + norm(x));
        if self.contains(x, tol) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for f in &self.faces {
            let d: Vec<f64> = x.iter().zip(&f.base).map(|(a, b)| a - b).collect();
            let mut y = f.base.clone();
            for e in &f.basis {
                let c = dotf(&d, e);
                y.iter_mut().zip(e).for_each(|(yi, ei)| *yi += c * ei);
            }
            if self.contains(&y, tol) {
                let dist = norm(&x.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<f64>>());
                best = best.min(dist);
            }
        }
        best
    }
}

/// Hausdorff distance between two polytopes.
pub fn hausdorff_distance(p: &Polytope, q: &Polytope) -> Result<f64> {
    if p.ambient_dim() != q.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: p.ambient_dim(), found: q.ambient_dim() });
    }
    let (fp, fq) = (FloatPolytope::new(p), FloatPolytope::new(q));
    let a = fp.vertices().iter().map(|v| fq.distance(v)).fold(0.0, f64::max);
    let b = fq.vertices().iter().map(|v| fp.distance(v)).fold(0.0, f64::max);
    Ok(a.max(b))
}
