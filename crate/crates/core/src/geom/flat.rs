use alloc::vec::Vec;

use super::polytope::{Hyperplane, Polytope};
use crate::error::{Error, Result};
use crate::num::{self, QVec, Rational};

/// Affine subspace `base + span(basis)` with exact rational data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineFlat {
    base: QVec,
    basis: Vec<QVec>,
    gram_inv: Vec<QVec>,
}

impl AffineFlat {
    pub fn new(base: QVec, basis: Vec<QVec>) -> Result<Self> {
        let n = base.len();
        if let Some(b) = basis.iter().find(|b| b.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        if basis.len() > n || num::rank(&basis) != basis.len() {
            return Err(Error::DependentBasis);
        }
        let gram: Vec<QVec> = basis.iter().map(|a| basis.iter().map(|b| num::dot(a, b)).collect()).collect();
        let gram_inv = if basis.is_empty() { Vec::new() } else { num::inverse(&gram).ok_or(Error::DependentBasis)? };
        Ok(AffineFlat { base, basis, gram_inv })
    }

    /// Linear subspace spanned by `basis`.
    pub fn linear(basis: Vec<QVec>) -> Result<Self> {
        let n = basis.first().ok_or(Error::EmptyInput)?.len();
        Self::new(alloc::vec![Rational::default(); n], basis)
    }

    /// The coordinate flat spanned by the listed axes through the origin.
    pub fn coordinate(n: usize, axes: &[usize]) -> Result<Self> {
        let basis = axes
            .iter()
            .map(|&a| (0..n).map(|j| num::q((j == a) as i64)).collect())
            .collect();
        Self::new(alloc::vec![Rational::default(); n], basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    pub fn basis(&self) -> &[QVec] {
        &self.basis
    }

    pub fn point_at(&self, coords: &[Rational]) -> QVec {
        let mut x = self.base.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    }

    /// Flat coordinates of the orthogonal projection of `x`.
    pub fn coords_of(&self, x: &[Rational]) -> QVec {
        let d = num::sub(x, &self.base);
        let bd: QVec = self.basis.iter().map(|b| num::dot(b, &d)).collect();
        self.gram_inv.iter().map(|r| num::dot(r, &bd)).collect()
    }

    /// Equations cutting out the flat.
    pub fn equations(&self) -> Vec<Hyperplane> {
        num::nullspace(&self.basis, self.ambient_dim())
            .into_iter()
            .map(|e| {
                let normal = num::primitive(&e);
                let offset = num::dot(&normal, &self.base);
                Hyperplane { normal, offset }
            })
            .collect()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equations().iter().all(|h| h.contains(x))
    }
}

/// Orthogonal projection onto `flat`, in the flat's basis coordinates.
pub fn project(p: &Polytope, flat: &AffineFlat) -> Result<Polytope> {
    if p.ambient_dim() != flat.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: flat.ambient_dim(), found: p.ambient_dim() });
    }
    if flat.dim() == 0 {
        return Err(Error::InvalidArgument("cannot project onto a point".into()));
    }
    let pts: Vec<QVec> = p.vertices().iter().map(|v| flat.coords_of(v)).collect();
    Polytope::from_points(&pts)
}

/// `P ∩ flat` in flat coordinates, `None` when disjoint.
pub fn intersect_flat(p: &Polytope, flat: &AffineFlat) -> Result<Option<Polytope>> {
    if p.ambient_dim() != flat.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: flat.ambient_dim(), found: p.ambient_dim() });
    }
    if flat.dim() == 0 {
        return Err(Error::InvalidArgument("cannot slice with a point".into()));
    }
    let mut cur = p.clone();
    for h in flat.equations() {
        match cur.slice(&h.normal, &h.offset) {
            Some(s) => cur = s,
            None => return Ok(None),
        }
    }
    let pts: Vec<QVec> = cur.vertices().iter().map(|v| flat.coords_of(v)).collect();
    Polytope::from_points(&pts).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qf, qvec};

    fn cube3() -> Polytope {
        let pts: Vec<QVec> = (0..8).map(|m| (0..3).map(|j| q((m >> j) & 1)).collect()).collect();
        Polytope::from_points(&pts).unwrap()
    }

    #[test]
    fn dependent_basis_rejected() {
        let e = AffineFlat::linear(alloc::vec![qvec(&[1, 2]), qvec(&[2, 4])]);
        assert_eq!(e, Err(Error::DependentBasis));
    }

    #[test]
    fn cube_projects_to_square() {
        let e = AffineFlat::coordinate(3, &[0, 1]).unwrap();
        let sq = project(&cube3(), &e).unwrap();
        assert_eq!(sq.vertices().len(), 4);
        assert_eq!(sq.volume(), q(1));
    }

    #[test]
    fn square_onto_diagonal_has_length_sqrt2() {
        let sq = Polytope::from_points(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])]).unwrap();
        let e = AffineFlat::linear(alloc::vec![qvec(&[1, 1])]).unwrap();
        let seg = project(&sq, &e).unwrap();
        // coordinates along (1,1) run over [0,1]; the true length scales by |(1,1)|
        assert_eq!(seg.volume(), q(1));
        let len = num::to_f64(&seg.volume()) * libm::sqrt(2.0);
        assert!((len - core::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cube_mid_slice() {
        let e = AffineFlat::new(alloc::vec![q(0), q(0), qf(1, 2)], alloc::vec![qvec(&[1, 0, 0]), qvec(&[0, 1, 0])])
            .unwrap();
        let s = intersect_flat(&cube3(), &e).unwrap().unwrap();
        assert_eq!(s.volume(), q(1));
        let far = AffineFlat::new(qvec(&[0, 0, 5]), alloc::vec![qvec(&[1, 0, 0])]).unwrap();
        assert!(intersect_flat(&cube3(), &far).unwrap().is_none());
    }

    #[test]
    fn simplex_diagonal_slice_matches_edge_crossings() {
        let s = Polytope::from_points(&[qvec(&[0, 0, 0]), qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1])])
            .unwrap();
        let plane = AffineFlat::linear(alloc::vec![qvec(&[1, 1, 0]), qvec(&[0, 0, 1])]).unwrap();
        let cut = intersect_flat(&s, &plane).unwrap().unwrap();
        // x = y meets the simplex in the triangle 0, (1/2,1/2,0), e3
        let expect: Vec<QVec> = alloc::vec![qvec(&[0, 0, 0]), alloc::vec![qf(1, 2), qf(1, 2), q(0)], qvec(&[0, 0, 1])];
        let mut got: Vec<QVec> = cut.vertices().iter().map(|c| plane.point_at(c)).collect();
        got.sort();
        let mut expect = expect;
        expect.sort();
        assert_eq!(got, expect);
    }
}
