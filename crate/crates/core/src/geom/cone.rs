use alloc::vec::Vec;

use num_traits::Zero;

use super::polytope::Polytope;
use crate::error::{Error, Result};
use crate::num::{self, QVec, Rational};

/// Closed convex polyhedral cone generated by rational rays.
///
/// Internally the cone is carried by the polytope `conv(0, rays)`, whose
/// faces through the origin are exactly the faces of the cone. For pointed
/// cones the stored rays are the primitive extreme rays, sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cone {
    ambient: usize,
    rays: Vec<QVec>,
    pointed: bool,
    hull: Polytope,
    apex: usize,
}

impl Cone {
    pub fn new(ambient: usize, rays: &[QVec]) -> Result<Self> {
        if let Some(r) = rays.iter().find(|r| r.len() != ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, found: r.len() });
        }
        let mut prim: Vec<QVec> = rays.iter().filter(|r| !num::is_zero_vec(r)).map(|r| num::primitive(r)).collect();
        prim.sort();
        prim.dedup();
        let zero = alloc::vec![Rational::zero(); ambient];
        let mut pts = prim.clone();
        pts.push(zero.clone());
        let hull = Polytope::from_points(&pts)?;
        let Some(apex) = hull.vertices().iter().position(|v| *v == zero) else {
            return Ok(Cone { ambient, rays: prim, pointed: false, apex: usize::MAX, hull });
        };
        let mut extreme: Vec<QVec> = hull
            .faces(1)
            .iter()
            .filter(|e| e.contains(&apex))
            .map(|e| hull.vertices()[if e[0] == apex { e[1] } else { e[0] }].clone())
            .collect();
        extreme.sort();
        if extreme.len() == prim.len() {
            return Ok(Cone { ambient, rays: prim, pointed: true, hull, apex });
        }
        let mut pts = extreme.clone();
        pts.push(zero.clone());
        let hull = Polytope::from_points(&pts)?;
        let apex = hull.vertices().iter().position(|v| *v == zero).expect("apex survives");
        Ok(Cone { ambient, rays: extreme, pointed: true, hull, apex })
    }

    /// The positive orthant `R^n_{≥0}`.
    pub fn orthant(n: usize) -> Self {
        let rays: Vec<QVec> = (0..n).map(|i| (0..n).map(|j| num::q((i == j) as i64)).collect()).collect();
        Cone::new(n, &rays).expect("standard basis")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rays(&self) -> &[QVec] {
        &self.rays
    }

    pub fn is_pointed(&self) -> bool {
        self.pointed
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        if self.rays.is_empty() {
            0
        } else {
            self.hull.dim()
        }
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn neg(&self) -> Cone {
        let rays: Vec<QVec> = self.rays.iter().map(|r| num::neg(r)).collect();
        Cone::new(self.ambient, &rays).expect("same shape")
    }

    /// Inward facet normals `g` with `C = {x : g · x >= 0}` inside the span.
    pub fn facet_normals(&self) -> Vec<QVec> {
        if self.rays.is_empty() {
            return Vec::new();
        }
        self.hull
            .facets()
            .iter()
            .filter(|f| f.offset.is_zero())
            .map(|f| num::neg(&f.normal))
            .collect()
    }

    fn span_equations_hold(&self, x: &[Rational]) -> bool {
        if self.rays.is_empty() {
            return num::is_zero_vec(x);
        }
        self.hull.equations().iter().all(|e| num::dot(&e.normal, x).is_zero())
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.span_equations_hold(x) && self.facet_normals().iter().all(|g| num::dot(g, x) >= Rational::zero())
    }

    /// Membership in the relative interior.
    pub fn contains_relint(&self, x: &[Rational]) -> bool {
        self.span_equations_hold(x) && self.facet_normals().iter().all(|g| num::dot(g, x) > Rational::zero())
    }

    /// Dual cone `{y : y · x >= 0 for all x in C}` of a pointed full-dimensional cone.
    pub fn dual(&self) -> Result<Cone> {
        if !self.pointed {
            return Err(Error::NotPointed);
        }
        if !self.is_full_dimensional() {
            return Err(Error::ConeNotFullDimensional);
        }
        Cone::new(self.ambient, &self.facet_normals())
    }

    /// Faces of a pointed cone as `(dimension, extreme rays)`, including `{0}` and `C`.
    pub fn faces(&self) -> Result<Vec<(usize, Vec<QVec>)>> {
        if !self.pointed {
            return Err(Error::NotPointed);
        }
        if self.rays.is_empty() {
            return Ok(alloc::vec![(0, Vec::new())]);
        }
        let mut out = Vec::new();
        for k in 0..=self.hull.dim() {
            for f in self.hull.faces(k) {
                if f.contains(&self.apex) {
                    let rays = f.iter().filter(|&&i| i != self.apex).map(|&i| self.hull.vertices()[i].clone()).collect();
                    out.push((k, rays));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qvec;

    #[test]
    fn redundant_ray_is_dropped() {
        let c = Cone::new(2, &[qvec(&[1, 0]), qvec(&[1, 1]), qvec(&[0, 2])]).unwrap();
        assert!(c.is_pointed());
        assert_eq!(c.rays(), &[qvec(&[0, 1]), qvec(&[1, 0])]);
    }

    #[test]
    fn line_is_not_pointed() {
        let c = Cone::new(2, &[qvec(&[1, 0]), qvec(&[-1, 0]), qvec(&[0, 1])]).unwrap();
        assert!(!c.is_pointed());
        assert!(c.contains(&qvec(&[-5, 1])));
        assert!(!c.contains(&qvec(&[0, -1])));
    }

    #[test]
    fn octant_faces_and_dual() {
        let c = Cone::orthant(3);
        let faces = c.faces().unwrap();
        let counts: Vec<usize> = (0..=3).map(|k| faces.iter().filter(|f| f.0 == k).count()).collect();
        assert_eq!(counts, alloc::vec![1, 3, 3, 1]);
        assert_eq!(c.dual().unwrap(), c);
        assert!(c.contains_relint(&qvec(&[1, 2, 3])));
        assert!(!c.contains_relint(&qvec(&[1, 0, 3])));
    }

    #[test]
    fn dual_of_wedge() {
        let c = Cone::new(2, &[qvec(&[1, 0]), qvec(&[1, 1])]).unwrap();
        let d = c.dual().unwrap();
        for r in d.rays() {
            for s in c.rays() {
                assert!(num::dot(r, s) >= Rational::zero());
            }
        }
        assert_eq!(d.dual().unwrap(), c);
    }
}
