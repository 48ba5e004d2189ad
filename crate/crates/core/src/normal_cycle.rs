//! Area measures, normal cycles, and valuations given by functions on the sphere.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bodies;
use crate::error::{Error, Result};
use crate::geom::{Cone, Face, Polytope};
use crate::intrinsic::{external_angle, AngleConfig};
use crate::mc::Estimate;
use crate::num::{self, QVec};

/// One atom of an area measure: a unit normal and the facet's relative volume.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereAtom {
    pub dir: Vec<f64>,
    /// The same direction as a primitive integer vector.
    pub normal: QVec,
    pub weight: f64,
}

/// Discrete measure on the unit sphere.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SphereAtoms {
    pub atoms: Vec<SphereAtom>,
}

impl SphereAtoms {
    /// `Σ weight · dir`.
    pub fn resultant(&self) -> Vec<f64> {
        let n = self.atoms.first().map_or(0, |a| a.dir.len());
        let mut s = alloc::vec![0.0; n];
        for a in &self.atoms {
            s.iter_mut().zip(&a.dir).for_each(|(x, d)| *x += a.weight * d);
        }
        s
    }

    pub fn integrate<H: SphereFunction + ?Sized>(&self, h: &H) -> f64 {
        self.atoms.iter().map(|a| a.weight * h.eval(&a.dir)).sum()
    }
}

fn unit_dir(v: &[num::Rational]) -> Vec<f64> {
    let f = num::vec_to_f64(v);
    let l = libm::sqrt(f.iter().map(|x| x * x).sum());
    f.into_iter().map(|x| x / l).collect()
}

fn facet_atom(p: &Polytope, k: usize) -> SphereAtom {
    let normal = p.facets()[k].normal.clone();
    let weight = p.face_polytope(&p.facet_vertices()[k]).relative_volume().value();
    SphereAtom { dir: unit_dir(&normal), normal, weight }
}

/// `S_{n-1}(P, ·)`: one atom per facet, weighted by the facet's relative volume.
pub fn area_measure(p: &Polytope) -> Result<SphereAtoms> {
    if !p.is_full_dimensional() {
        return Err(Error::NotFullDimensional { dim: p.dim(), ambient: p.ambient_dim() });
    }
    Ok(SphereAtoms { atoms: (0..p.facets().len()).map(|k| facet_atom(p, k)).collect() })
}

/// Area measure that also accepts bodies of codimension one, which carry two
/// opposite atoms of weight equal to their relative volume.
pub fn surface_area_measure(p: &Polytope) -> Result<SphereAtoms> {
    let n = p.ambient_dim();
    if p.dim() == n {
        return area_measure(p);
    }
    if p.dim() + 1 < n {
        return Ok(SphereAtoms::default());
    }
    let normal = num::primitive(&p.equations()[0].normal);
    let weight = p.relative_volume().value();
    let minus = num::neg(&normal);
    Ok(SphereAtoms {
        atoms: alloc::vec![
            SphereAtom { dir: unit_dir(&normal), normal, weight },
            SphereAtom { dir: unit_dir(&minus), normal: minus, weight },
        ],
    })
}

/// A real function on the unit sphere.
pub trait SphereFunction {
    fn eval(&self, u: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> SphereFunction for F {
    fn eval(&self, u: &[f64]) -> f64 {
        self(u)
    }
}

/// Polynomial `Σ c · x^a y^b z^c` restricted to the sphere in R³.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolyTable3 {
    pub terms: Vec<(f64, [u32; 3])>,
}

impl SphereFunction for PolyTable3 {
    fn eval(&self, u: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * libm::pow(u[0], e[0] as f64) * libm::pow(u[1], e[1] as f64) * libm::pow(u[2], e[2] as f64))
            .sum()
    }
}

/// `∫ h dS_{n-1}(P, ·)`.
pub fn sphere_valuation_eval<H: SphereFunction + ?Sized>(h: &H, p: &Polytope) -> Result<f64> {
    Ok(surface_area_measure(p)?.integrate(h))
}

/// A face together with its normal cone in ambient coordinates.
#[derive(Clone, Debug)]
pub struct NormalCyclePiece {
    pub face: Face,
    pub face_dim: usize,
    pub normal_cone: Cone,
    /// Fraction of the unit sphere of the orthogonal complement of the face
    /// covered by the normal cone.
    pub angle: Estimate,
}

fn piece(p: &Polytope, face: &[usize], face_dim: usize, cfg: &AngleConfig, stream: u64) -> Result<NormalCyclePiece> {
    let mut rays: Vec<QVec> = p
        .facet_vertices()
        .iter()
        .zip(p.facets())
        .filter(|(g, _)| face.iter().all(|v| g.binary_search(v).is_ok()))
        .map(|(_, h)| h.normal.clone())
        .collect();
    for e in p.equations() {
        rays.push(e.normal.clone());
        rays.push(num::neg(&e.normal));
    }
    let normal_cone = Cone::new(p.ambient_dim(), &rays)?;
    let angle = external_angle(p, face, cfg, stream)?;
    Ok(NormalCyclePiece { face: face.to_vec(), face_dim, normal_cone, angle })
}

/// Pieces of the normal cycle: every face with a nonzero normal cone, i.e.
/// all proper faces, and `P` itself when it is not full-dimensional.
pub fn normal_cycle(p: &Polytope, cfg: &AngleConfig) -> Result<Vec<NormalCyclePiece>> {
    let top = if p.is_full_dimensional() { p.dim() } else { p.dim() + 1 };
    let mut out = Vec::new();
    let mut stream = 0;
    for k in 0..top {
        for f in p.faces(k) {
            out.push(piece(p, f, k, cfg, stream)?);
            stream += 1;
        }
    }
    Ok(out)
}

/// `Σ relvol(F) · g(piece_F)` over all faces including `P` itself; the top
/// face of a full-dimensional body carries the zero cone and angle 1.
pub fn curvature_valuation<G>(p: &Polytope, g: G, cfg: &AngleConfig) -> Result<f64>
where
    G: Fn(&NormalCyclePiece) -> f64,
{
    let mut pieces = normal_cycle(p, cfg)?;
    if p.is_full_dimensional() {
        pieces.push(piece(p, &p.faces(p.dim())[0], p.dim(), cfg, u64::MAX)?);
    }
    Ok(pieces.iter().map(|pc| p.face_polytope(&pc.face).relative_volume().value() * g(pc)).sum())
}

/// Battery of 50 seeded random polygons used to compare sphere valuations.
pub fn kernel_battery() -> Vec<Polytope> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d63_6d75);
    (0..50).map(|j| bodies::random_polygon(&mut rng, 3 + j % 6, &num::qf(1 + (j % 4) as i64, 2))).collect()
}

/// Whether `f` and `g` define the same valuation on the polygon battery,
/// which holds iff `f - g` is the restriction of a linear functional.
pub fn mcmullen_kernel_check<F, G>(f: &F, g: &G) -> bool
where
    F: SphereFunction + ?Sized,
    G: SphereFunction + ?Sized,
{
    kernel_battery().iter().all(|p| {
        let a = area_measure(p).expect("full-dimensional");
        (a.integrate(f) - a.integrate(g)).abs() < 1e-9
    })
}

/// Antipodal direction; `h ∘ (-1)` evaluated on `P` equals `h` evaluated on `-P`.
pub fn reflected_dir(u: &[f64]) -> Vec<f64> {
    u.iter().map(|x| -x).collect()
}

/// Whether every atom weight is positive and the resultant vanishes.
pub fn is_closed(atoms: &SphereAtoms, tol: f64) -> bool {
    atoms.atoms.iter().all(|a| a.weight > 0.0) && atoms.resultant().iter().all(|x| x.abs() < tol)
}

/// Exact translation check helper: area measures compare by normal and weight.
pub fn same_atoms(a: &SphereAtoms, b: &SphereAtoms) -> bool {
    a.atoms.len() == b.atoms.len()
        && a.atoms.iter().zip(&b.atoms).all(|(x, y)| x.normal == y.normal && x.weight == y.weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intrinsic::intrinsic_volume;
    use crate::num::{q, qvec};
    use core::f64::consts::{PI, SQRT_2};

    fn cfg() -> AngleConfig {
        AngleConfig::default()
    }

    #[test]
    fn square_and_cube_atoms() {
        let sq = bodies::unit_cube(2);
        let a = area_measure(&sq).unwrap();
        assert_eq!(a.atoms.len(), 4);
        assert!(a.atoms.iter().all(|x| x.weight == 1.0));
        assert_eq!(area_measure(&bodies::unit_cube(3)).unwrap().atoms.len(), 6);
        let seg = Polytope::from_points(&[qvec(&[0, 0]), qvec(&[1, 0])]).unwrap();
        assert!(matches!(area_measure(&seg), Err(Error::NotFullDimensional { .. })));
    }

    #[test]
    fn triangle_atoms() {
        let t = bodies::simplex(2, &q(1));
        let a = area_measure(&t).unwrap();
        let mut seen: Vec<(QVec, f64)> = a.atoms.iter().map(|x| (x.normal.clone(), x.weight)).collect();
        seen.sort_by(|x, y| x.0.cmp(&y.0));
        assert_eq!(seen[0].0, qvec(&[-1, 0]));
        assert_eq!(seen[1].0, qvec(&[0, -1]));
        assert_eq!(seen[2].0, qvec(&[1, 1]));
        assert!((seen[2].1 - SQRT_2).abs() < 1e-15);
        assert!(is_closed(&a, 1e-12));
    }

    #[test]
    fn sphere_valuation_examples() {
        let sq = bodies::unit_cube(2);
        assert_eq!(sphere_valuation_eval(&|_: &[f64]| 0.5, &sq).unwrap(), 2.0);
        let cos2 = |u: &[f64]| u[0] * u[0] - u[1] * u[1];
        assert!(sphere_valuation_eval(&cos2, &sq).unwrap().abs() < 1e-15);
        for p in kernel_battery().iter().take(10) {
            assert!(sphere_valuation_eval(&|u: &[f64]| 0.3 * u[0] - 2.0 * u[1], p).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_check() {
        let f = |u: &[f64]| 1.0 + u[0] * u[0] * u[1];
        let g = |u: &[f64]| f(u) + 0.7 * u[0] - 0.2 * u[1];
        let h = |u: &[f64]| f(u) + u[0] * u[0] - u[1] * u[1];
        assert!(mcmullen_kernel_check(&f, &g));
        assert!(!mcmullen_kernel_check(&f, &h));
        assert!(mcmullen_kernel_check(&f, &f));
    }

    #[test]
    fn normal_cycle_piece_counts() {
        assert_eq!(normal_cycle(&bodies::unit_cube(2), &cfg()).unwrap().len(), 8);
        assert_eq!(normal_cycle(&bodies::simplex(3, &q(1)), &cfg()).unwrap().len(), 14);
        let pt = normal_cycle(&Polytope::point(qvec(&[0, 0])).unwrap(), &cfg()).unwrap();
        assert_eq!(pt.len(), 1);
        assert!(!pt[0].normal_cone.is_pointed());
        assert!(pt[0].normal_cone.is_full_dimensional());
    }

    #[test]
    fn curvature_valuation_reproduces_intrinsic_volumes() {
        for n in 2..=3 {
            let c = bodies::cuboid(&(1..=n as i64).map(q).collect::<Vec<_>>());
            for i in 0..=n {
                let v = curvature_valuation(&c, |pc| if pc.face_dim == i { pc.angle.value } else { 0.0 }, &cfg()).unwrap();
                let w = intrinsic_volume(&c, i, &cfg()).unwrap().value;
                assert!((v - w).abs() < 1e-12);
            }
        }
        let vol = curvature_valuation(&bodies::unit_cube(3), |pc| (pc.face_dim == 3) as u8 as f64, &cfg()).unwrap();
        assert_eq!(vol, 1.0);
    }

    #[test]
    fn weak_continuity_towards_disk() {
        for m in [8usize, 16, 32, 64] {
            let p = bodies::ball_approximant(2, m);
            let v = sphere_valuation_eval(&|_: &[f64]| 0.5, &p).unwrap();
            assert!((v - PI).abs() < 10.0 / (m * m) as f64, "m={m} v={v}");
        }
    }

    #[test]
    fn parity_and_translation() {
        let h = |u: &[f64]| libm::exp(u[0]) + u[1] * u[1] * u[1];
        for p in kernel_battery().iter().take(10) {
            let lhs = sphere_valuation_eval(&h, &p.reflect()).unwrap();
            let rhs = sphere_valuation_eval(&|u: &[f64]| h(&reflected_dir(u)), p).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
            let moved = p.translate(&[num::qf(3, 7), q(-2)]).unwrap();
            assert!(same_atoms(&area_measure(p).unwrap(), &area_measure(&moved).unwrap()));
        }
    }
}
