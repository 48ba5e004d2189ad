//! Radon transform with respect to the Euler characteristic on real
//! projective space, and pointwise checks of its inversion formula.

use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::geom::Cone;
use crate::mc::shard_rng;
use crate::num::{self, q, QVec, Rational};

/// `χ(RP^k)`: 1 for even `k`, 0 for odd `k` and for the empty space `k < 0`.
pub fn chi_rp(k: i64) -> Rational {
    if k >= 0 && k % 2 == 0 {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// `full · 1 + Σ w_i 1_{Π(C_i)}` on `RP^n`, with pointed cones in `R^{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjConstructibleFn {
    n: usize,
    full: Rational,
    atoms: Vec<(Rational, Cone)>,
}

impl ProjConstructibleFn {
    /// Atoms must be pointed and full-dimensional.
    pub fn new(n: usize, full: Rational, atoms: Vec<(Rational, Cone)>) -> Result<Self> {
        for (_, c) in &atoms {
            if c.ambient_dim() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, found: c.ambient_dim() });
            }
            if !c.is_pointed() {
                return Err(Error::NotPointed);
            }
            if !c.is_full_dimensional() {
                return Err(Error::ConeNotFullDimensional);
            }
        }
        Ok(ProjConstructibleFn { n, full, atoms })
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        ProjConstructibleFn { n, full: c, atoms: Vec::new() }
    }

    pub fn indicator(cone: Cone) -> Result<Self> {
        let n = cone.ambient_dim().checked_sub(1).ok_or(Error::EmptyInput)?;
        Self::new(n, Rational::zero(), alloc::vec![(Rational::one(), cone)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full_coefficient(&self) -> &Rational {
        &self.full
    }

    pub fn atoms(&self) -> &[(Rational, Cone)] {
        &self.atoms
    }

    /// Every atom replaced by its negative cone; the same function on `RP^n`.
    pub fn antipodal(&self) -> Self {
        let atoms = self.atoms.iter().map(|(w, c)| (w.clone(), c.neg())).collect();
        ProjConstructibleFn { n: self.n, full: self.full.clone(), atoms }
    }

    fn check_point(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.n + 1 {
            return Err(Error::DimensionMismatch { expected: self.n + 1, found: x.len() });
        }
        if num::is_zero_vec(x) {
            return Err(Error::InvalidArgument("zero vector is not a projective point".into()));
        }
        Ok(())
    }

    /// `f([x]) = full + Σ w [x ∈ C or -x ∈ C]`.
    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        self.check_point(x)?;
        let neg = num::neg(x);
        Ok(self
            .atoms
            .iter()
            .filter(|(_, c)| c.contains(x) || c.contains(&neg))
            .fold(self.full.clone(), |s, (w, _)| s + w))
    }

    /// `∫ f dχ = full · χ(RP^n) + Σ w`: every `Π(C)` is a compact contractible cell.
    pub fn euler_integral(&self) -> Rational {
        self.atoms.iter().fold(&self.full * chi_rp(self.n as i64), |s, (w, _)| s + w)
    }
}

/// `C ∩ u^⊥ ≠ {0}` for a pointed cone: the pairings with the extreme rays are
/// neither all positive nor all negative.
pub fn cone_hyperplane_meet(c: &Cone, u: &[Rational]) -> Result<bool> {
    if u.len() != c.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: c.ambient_dim(), found: u.len() });
    }
    if !c.is_pointed() {
        return Err(Error::NotPointed);
    }
    let s: Vec<Rational> = c.rays().iter().map(|r| num::dot(u, r)).collect();
    Ok(!(s.iter().all(|x| *x > Rational::zero()) || s.iter().all(|x| *x < Rational::zero())))
}

/// `(Rf)(u^⊥) = full · χ(RP^{n-1}) + Σ w [C meets u^⊥]`.
pub fn radon_eval(f: &ProjConstructibleFn, u: &[Rational]) -> Result<Rational> {
    f.check_point(u)?;
    let mut total = &f.full * chi_rp(f.n as i64 - 1);
    for (w, c) in &f.atoms {
        if cone_hyperplane_meet(c, u)? {
            total += w;
        }
    }
    Ok(total)
}

/// `χ_c` of the hyperplanes through `[l]` that meet `Π(C)`, inside the pencil
/// `≅ RP^{n-1}`. If `±l ∈ int C` every hyperplane meets; otherwise the
/// missing ones form the open cell `Π(int C° ∩ l^⊥)`, of Euler characteristic
/// `(-1)^{n-1}`. `±l` on the boundary of `C` is non-generic.
pub fn pencil_euler_integral(c: &Cone, l: &[Rational]) -> Result<Rational> {
    let n1 = c.ambient_dim();
    if l.len() != n1 {
        return Err(Error::DimensionMismatch { expected: n1, found: l.len() });
    }
    if !c.is_pointed() {
        return Err(Error::NotPointed);
    }
    if !c.is_full_dimensional() {
        return Err(Error::ConeNotFullDimensional);
    }
    if num::is_zero_vec(l) {
        return Err(Error::InvalidArgument("zero ray".into()));
    }
    let n = n1 as i64 - 1;
    let neg = num::neg(l);
    let chi = chi_rp(n - 1);
    if c.contains_relint(l) || c.contains_relint(&neg) {
        return Ok(chi);
    }
    if c.contains(l) || c.contains(&neg) {
        return Err(Error::NonGeneric);
    }
    Ok(chi - sign(n - 1))
}

fn sign(k: i64) -> Rational {
    if k.rem_euclid(2) == 0 {
        q(1)
    } else {
        q(-1)
    }
}

/// `(R^t R f)(l) = full · χ(RP^{n-1})² + Σ w I(C, l)`.
pub fn dual_radon_radon_eval(f: &ProjConstructibleFn, l: &[Rational]) -> Result<Rational> {
    f.check_point(l)?;
    let chi = chi_rp(f.n as i64 - 1);
    let mut total = &f.full * &chi * &chi;
    for (w, c) in &f.atoms {
        total += w * pencil_euler_integral(c, l)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointVerdict {
    pub ray: QVec,
    pub lhs: Rational,
    pub rhs: Rational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversionReport {
    pub n: usize,
    pub integral: Rational,
    pub points: Vec<PointVerdict>,
    pub resamples: usize,
}

impl InversionReport {
    pub fn all_pass(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }
}

/// Random nonzero integer vector with entries in `[-size, size]`.
pub fn random_ray<R: Rng + ?Sized>(rng: &mut R, dim: usize, size: i64) -> QVec {
    loop {
        let v: QVec = (0..dim).map(|_| q(rng.random_range(-size..=size))).collect();
        if !num::is_zero_vec(&v) {
            return v;
        }
    }
}

/// Checks `(-1)^{n-1} (R^t R f)(l) = f(l) + ½((-1)^{n-1} - 1) ∫f` exactly at
/// `num_points` random rays, drawing again whenever a ray is non-generic.
pub fn inversion_check(f: &ProjConstructibleFn, num_points: usize, seed: u64) -> Result<InversionReport> {
    let mut rng = shard_rng(seed, 0);
    let s = sign(f.n as i64 - 1);
    let integral = f.euler_integral();
    let correction = (&s - q(1)) / q(2) * &integral;
    let mut points = Vec::with_capacity(num_points);
    let mut resamples = 0;
    while points.len() < num_points {
        let l = random_ray(&mut rng, f.n + 1, 12);
        let rr = match dual_radon_radon_eval(f, &l) {
            Ok(v) => v,
            Err(Error::NonGeneric) => {
                resamples += 1;
                if resamples > 100 * num_points.max(1) {
                    return Err(Error::NonGeneric);
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let lhs = &s * rr;
        let rhs = f.eval(&l)? + &correction;
        points.push(PointVerdict { pass: lhs == rhs, ray: l, lhs, rhs });
    }
    Ok(InversionReport { n: f.n, integral, points, resamples })
}

/// `Rf` as a function on the dual projective space:
/// `(full · χ(RP^{n-1}) + Σ w) · 1 - Σ w · 1_{Π(int C°)}`, where each open
/// indicator is expanded over the nonzero faces of `C°`. Face atoms may be
/// lower-dimensional.
pub fn radon_transform_symbolic(f: &ProjConstructibleFn) -> Result<ProjConstructibleFn> {
    let mut full = &f.full * chi_rp(f.n as i64 - 1);
    let mut atoms: Vec<(Rational, Cone)> = Vec::new();
    for (w, c) in &f.atoms {
        full += w;
        let dual = c.dual()?;
        if !dual.is_pointed() || !dual.is_full_dimensional() {
            return Err(Error::ConeNotFullDimensional);
        }
        let d = dual.dim();
        for (k, rays) in dual.faces()? {
            if k == 0 {
                continue;
            }
            let face = Cone::new(dual.ambient_dim(), &rays)?;
            atoms.push((-(w * sign((d - k) as i64)), face));
        }
    }
    atoms.sort_by(|a, b| a.1.cmp(&b.1));
    let mut merged: Vec<(Rational, Cone)> = Vec::new();
    for (w, c) in atoms {
        match merged.last_mut() {
            Some((w0, c0)) if *c0 == c => *w0 += w,
            _ => merged.push((w, c)),
        }
    }
    merged.retain(|(w, _)| !w.is_zero());
    Ok(ProjConstructibleFn { n: f.n, full, atoms: merged })
}

/// Pointed full-dimensional cone in `R^{dim}` spanned by `rays` random
/// integer vectors clustered around a random axis.
pub fn random_cone<R: Rng + ?Sized>(rng: &mut R, dim: usize, rays: usize) -> Cone {
    loop {
        let axis = random_ray(rng, dim, 4);
        let gens: Vec<QVec> = (0..rays.max(dim))
            .map(|_| {
                let noise = random_ray(rng, dim, 5);
                num::add(&num::scale(&axis, &q(2)), &noise)
            })
            .collect();
        if let Ok(c) = Cone::new(dim, &gens) {
            if c.is_pointed() && c.is_full_dimensional() {
                return c;
            }
        }
    }
}

/// Random function with `atoms` cone atoms and small integer weights.
pub fn random_proj_fn<R: Rng + ?Sized>(rng: &mut R, n: usize, atoms: usize) -> ProjConstructibleFn {
    let full = q(rng.random_range(-2..=2));
    let atoms = (0..atoms)
        .map(|_| {
            let mut w = rng.random_range(-3i64..=3);
            if w == 0 {
                w = 2;
            }
            let k = rng.random_range(n + 1..=n + 3);
            (q(w), random_cone(rng, n + 1, k))
        })
        .collect();
    ProjConstructibleFn { n, full, atoms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qvec;

    fn octant(n: usize) -> ProjConstructibleFn {
        ProjConstructibleFn::indicator(Cone::orthant(n + 1)).unwrap()
    }

    #[test]
    fn projective_euler_characteristics() {
        assert_eq!(chi_rp(0), q(1));
        assert_eq!(chi_rp(1), q(0));
        assert_eq!(chi_rp(2), q(1));
        assert_eq!(chi_rp(3), q(0));
        assert_eq!(chi_rp(-1), q(0));
    }

    #[test]
    fn meet_examples() {
        let c = Cone::orthant(3);
        assert!(!cone_hyperplane_meet(&c, &qvec(&[1, 1, 1])).unwrap());
        assert!(cone_hyperplane_meet(&c, &qvec(&[1, -1, 0])).unwrap());
        assert!(cone_hyperplane_meet(&c, &qvec(&[1, 1, -1])).unwrap());
        assert!(!cone_hyperplane_meet(&c, &qvec(&[-1, -2, -1])).unwrap());
    }

    #[test]
    fn radon_examples() {
        let f = octant(2);
        assert_eq!(radon_eval(&f, &qvec(&[1, 1, 1])).unwrap(), q(0));
        assert_eq!(radon_eval(&f, &qvec(&[1, -1, 0])).unwrap(), q(1));
        assert_eq!(radon_eval(&ProjConstructibleFn::constant(2, q(1)), &qvec(&[3, 1, 2])).unwrap(), q(0));
    }

    #[test]
    fn pencil_examples() {
        let c = Cone::orthant(3);
        assert_eq!(pencil_euler_integral(&c, &qvec(&[1, 1, 1])).unwrap(), q(0));
        assert_eq!(pencil_euler_integral(&c, &qvec(&[1, -1, 0])).unwrap(), q(1));
        assert_eq!(pencil_euler_integral(&c, &qvec(&[1, 1, 0])), Err(Error::NonGeneric));
        assert_eq!(pencil_euler_integral(&Cone::orthant(4), &qvec(&[1, 1, 1, 1])).unwrap(), q(1));
        assert_eq!(pencil_euler_integral(&Cone::orthant(4), &qvec(&[1, -1, 2, 1])).unwrap(), q(0));
    }

    #[test]
    fn dual_radon_radon_examples() {
        let f = octant(2);
        assert_eq!(dual_radon_radon_eval(&f, &qvec(&[1, 1, 1])).unwrap(), q(0));
        assert_eq!(dual_radon_radon_eval(&f, &qvec(&[1, -1, 0])).unwrap(), q(1));
        let g = octant(3);
        assert_eq!(dual_radon_radon_eval(&g, &qvec(&[1, 2, 1, 1])).unwrap(), q(1));
        assert_eq!(dual_radon_radon_eval(&g, &qvec(&[1, -2, 1, 1])).unwrap(), q(0));
    }

    #[test]
    fn inversion_on_random_families() {
        let mut rng = shard_rng(17, 0);
        for n in 1..=3 {
            let f = random_proj_fn(&mut rng, n, 5);
            let r = inversion_check(&f, 30, n as u64).unwrap();
            assert!(r.all_pass(), "n = {n}: {r:?}");
        }
        for n in 1..=3 {
            let r = inversion_check(&ProjConstructibleFn::constant(n, q(3)), 5, 1).unwrap();
            assert!(r.all_pass());
        }
    }

    #[test]
    fn symbolic_matches_pointwise() {
        let mut rng = shard_rng(18, 0);
        for f in [octant(2), random_proj_fn(&mut rng, 2, 4), random_proj_fn(&mut rng, 3, 3)] {
            let rf = radon_transform_symbolic(&f).unwrap();
            for _ in 0..50 {
                let u = random_ray(&mut rng, f.n() + 1, 9);
                assert_eq!(rf.eval(&u).unwrap(), radon_eval(&f, &u).unwrap());
            }
        }
        let rc = radon_transform_symbolic(&ProjConstructibleFn::constant(2, q(4))).unwrap();
        assert_eq!(rc, ProjConstructibleFn::constant(2, q(0)));
    }

    #[test]
    fn double_transform_matches_pencil_formula() {
        let mut rng = shard_rng(19, 0);
        let f = random_proj_fn(&mut rng, 2, 4);
        let rf = radon_transform_symbolic(&f).unwrap();
        let mut checked = 0;
        while checked < 30 {
            let l = random_ray(&mut rng, 3, 9);
            match dual_radon_radon_eval(&f, &l) {
                Ok(v) => {
                    assert_eq!(radon_eval(&rf, &l).unwrap(), v);
                    checked += 1;
                }
                Err(Error::NonGeneric) => continue,
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn antipodal_invariance() {
        let mut rng = shard_rng(20, 0);
        let f = random_proj_fn(&mut rng, 2, 5);
        let g = f.antipodal();
        for _ in 0..30 {
            let u = random_ray(&mut rng, 3, 9);
            assert_eq!(radon_eval(&f, &u).unwrap(), radon_eval(&g, &u).unwrap());
            assert_eq!(f.eval(&u).unwrap(), g.eval(&u).unwrap());
            match (dual_radon_radon_eval(&f, &u), dual_radon_radon_eval(&g, &u)) {
                (Ok(a), Ok(b)) => assert_eq!(a, b),
                (Err(a), Err(b)) => assert_eq!(a, b),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn rejects_bad_cones() {
        let line = Cone::new(3, &[qvec(&[1, 0, 0]), qvec(&[-1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1])]).unwrap();
        assert_eq!(ProjConstructibleFn::indicator(line).unwrap_err(), Error::NotPointed);
        let flat = Cone::new(3, &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0])]).unwrap();
        assert_eq!(ProjConstructibleFn::indicator(flat).unwrap_err(), Error::ConeNotFullDimensional);
    }
}
