//! Intrinsic volumes, external angles, Steiner polynomials and mixed volumes.
//!
//! Intrinsic volumes follow the Steiner convention
//! `vol(K + εD) = Σ_i κ_{n-i} ε^{n-i} V_i(K)`, so `V_0 = χ` and `V_n = vol`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geom::{minkowski_sum_volume, orthonormalize, FloatPolytope, Polytope};
use crate::mc::{self, Estimate, Method};
use crate::num::{self, QVec, Rational};

/// Volume of the unit ball in `R^j`.
pub fn kappa(j: usize) -> f64 {
    let h = j as f64 / 2.0;
    libm::pow(core::f64::consts::PI, h) / libm::tgamma(h + 1.0)
}

/// Monte Carlo settings for external angles of codimension four and higher.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AngleConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for AngleConfig {
    fn default() -> Self {
        AngleConfig { samples: 200_000, seed: 0x5eed }
    }
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(v: &[f64]) -> Vec<f64> {
    let l = libm::sqrt(dotf(v, v));
    v.iter().map(|x| x / l).collect()
}

/// Solid angle of the spherical triangle spanned by three unit vectors.
fn triangle_solid_angle(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let num = dotf(a, &cross(b, c)).abs();
    let den = 1.0 + dotf(a, b) + dotf(a, c) + dotf(b, c);
    2.0 * libm::atan2(num, den)
}

/// Fraction of `S^2` covered by the pointed cone spanned by `rays`.
fn cone_fraction_3(rays: &[Vec<f64>]) -> f64 {
    let rays: Vec<Vec<f64>> = rays.iter().map(|r| unit(r)).collect();
    let mut c = vec![0.0; 3];
    for r in &rays {
        c.iter_mut().zip(r).for_each(|(x, y)| *x += y);
    }
    let c = unit(&c);
    let e1 = {
        let r = &rays[0];
        let k = dotf(r, &c);
        unit(&r.iter().zip(&c).map(|(x, y)| x - k * y).collect::<Vec<f64>>())
    };
    let e2 = cross(&c, &e1);
    let mut ordered: Vec<(f64, &Vec<f64>)> =
        rays.iter().map(|r| (libm::atan2(dotf(r, &e2), dotf(r, &e1)), r)).collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let omega: f64 =
        (1..ordered.len() - 1).map(|i| triangle_solid_angle(ordered[0].1, ordered[i].1, ordered[i + 1].1)).sum();
    omega / (4.0 * core::f64::consts::PI)
}

/// Which facets of `p` contain the face.
fn facets_containing(p: &Polytope, face: &[usize]) -> Vec<usize> {
    p.facet_vertices()
        .iter()
        .enumerate()
        .filter(|(_, g)| face.iter().all(|v| g.binary_search(v).is_ok()))
        .map(|(i, _)| i)
        .collect()
}

/// External angle of `p` at a face, measured inside the affine hull of `p`.
///
/// `stream` selects the random stream for the Monte Carlo branch so that
/// different faces draw independent samples.
pub fn external_angle(p: &Polytope, face: &[usize], cfg: &AngleConfig, stream: u64) -> Result<Estimate> {
    if face.is_empty() || face.iter().any(|&v| v >= p.vertices().len()) {
        return Err(Error::InvalidArgument("face is not a vertex subset of the polytope".into()));
    }
    let face_dim = {
        let pts = p.face_points(face);
        Polytope::from_points(&pts)?.dim()
    };
    let m = p.dim() - face_dim;
    match m {
        0 => return Ok(Estimate::exact(1.0)),
        1 => return Ok(Estimate::exact(0.5)),
        _ => {}
    }
    let normals: Vec<Vec<f64>> = facets_containing(p, face).iter().map(|&i| num::vec_to_f64(&p.facets()[i].normal)).collect();
    let basis = orthonormalize(&normals, 1e-12);
    if basis.len() != m {
        return Err(Error::InvalidArgument("vertex set is not a face".into()));
    }
    let local: Vec<Vec<f64>> = normals.iter().map(|g| basis.iter().map(|e| dotf(g, e)).collect()).collect();
    match m {
        2 => {
            let (a, b) = (unit(&local[0]), unit(&local[1]));
            let theta = libm::acos(dotf(&a, &b).clamp(-1.0, 1.0));
            Ok(Estimate::closed_form(theta / (2.0 * core::f64::consts::PI)))
        }
        3 => Ok(Estimate::closed_form(cone_fraction_3(&local))),
        _ => Ok(external_angle_mc(p, face, &basis, cfg, stream)),
    }
}

/// Gaussian directions in the normal space; a direction is in the normal cone
/// exactly when the face maximizes it over all vertices.
fn external_angle_mc(p: &Polytope, face: &[usize], basis: &[Vec<f64>], cfg: &AngleConfig, stream: u64) -> Estimate {
    let verts: Vec<Vec<f64>> = p.vertices().iter().map(|v| num::vec_to_f64(v)).collect();
    let n = p.ambient_dim();
    let mut center = vec![0.0; n];
    for &i in face {
        center.iter_mut().zip(&verts[i]).for_each(|(c, x)| *c += x / face.len() as f64);
    }
    let diffs: Vec<Vec<f64>> =
        verts.iter().map(|v| v.iter().zip(&center).map(|(a, b)| a - b).collect()).collect();
    let mut rng = mc::shard_rng(cfg.seed, stream);
    let samples = cfg.samples.max(1);
    let mut hits = 0usize;
    let mut y = vec![0.0; n];
    for _ in 0..samples {
        y.iter_mut().for_each(|x| *x = 0.0);
        for e in basis {
            let g: f64 = rng.sample(StandardNormal);
            y.iter_mut().zip(e).for_each(|(yi, ei)| *yi += g * ei);
        }
        if diffs.iter().all(|d| dotf(&y, d) <= 1e-12) {
            hits += 1;
        }
    }
    let f = hits as f64 / samples as f64;
    Estimate { value: f, stderr: libm::sqrt(f * (1.0 - f) / samples as f64), method: Method::MonteCarlo }
}

/// `V_i(P)` as a sum over `i`-faces of relative volume times external angle.
pub fn intrinsic_volume(p: &Polytope, i: usize, cfg: &AngleConfig) -> Result<Estimate> {
    if i > p.ambient_dim() {
        return Err(Error::InvalidArgument(alloc::format!("index {i} exceeds dimension {}", p.ambient_dim())));
    }
    if i > p.dim() {
        return Ok(Estimate::exact(0.0));
    }
    if i == 0 {
        return Ok(Estimate::exact(1.0));
    }
    if i == p.dim() {
        let rv = p.relative_volume();
        let method = if rv.as_rational().is_some() { Method::Exact } else { Method::ClosedForm };
        return Ok(Estimate { value: rv.value(), stderr: 0.0, method });
    }
    let mut value = 0.0;
    let mut var = 0.0;
    let mut method = Method::Exact;
    for (j, f) in p.faces(i).iter().enumerate() {
        let vol = p.face_polytope(f).relative_volume().value();
        let a = external_angle(p, f, cfg, j as u64)?;
        value += vol * a.value;
        var += (vol * a.stderr) * (vol * a.stderr);
        method = method.join(a.method);
    }
    Ok(Estimate { value, stderr: libm::sqrt(var), method })
}

/// `(V_0, ..., V_n)`.
pub fn intrinsic_volumes(p: &Polytope, cfg: &AngleConfig) -> Result<Vec<Estimate>> {
    (0..=p.ambient_dim()).map(|i| intrinsic_volume(p, i, cfg)).collect()
}

/// Intrinsic volume estimates recovered from Monte Carlo parallel-body volumes.
#[derive(Clone, Debug, PartialEq)]
pub struct SteinerCoefficients {
    /// `V_0, ..., V_n`.
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl SteinerCoefficients {
    /// `vol(K + εD)` from the coefficients.
    pub fn parallel_volume(&self, eps: f64) -> f64 {
        let n = self.values.len() - 1;
        self.values.iter().enumerate().map(|(i, v)| kappa(n - i) * libm::pow(eps, (n - i) as f64) * v).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteinerConfig {
    pub eps: Vec<f64>,
    pub samples: usize,
    pub shards: usize,
    pub seed: u64,
}

impl Default for SteinerConfig {
    fn default() -> Self {
        SteinerConfig { eps: (1..=10).map(|k| k as f64 / 10.0).collect(), samples: 1_000_000, shards: 16, seed: 1 }
    }
}

/// Least-squares fit of the middle Steiner coefficients; `V_0 = 1` and
/// `V_n = vol` are pinned.
fn fit_steiner(n: usize, vol: f64, eps: &[f64], vols: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n + 1];
    out[0] = 1.0;
    out[n] = vol;
    if n < 2 {
        return Ok(out);
    }
    let unknowns = n - 1;
    let a = nalgebra::DMatrix::from_fn(eps.len(), unknowns, |r, c| {
        let i = c + 1;
        kappa(n - i) * libm::pow(eps[r], (n - i) as f64)
    });
    let b = nalgebra::DVector::from_fn(eps.len(), |r, _| vols[r] - vol - kappa(n) * libm::pow(eps[r], n as f64));
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if smin <= 1e-12 * smax {
        return Err(Error::IllConditioned(alloc::format!("{} distinct radii for {} unknowns", eps.len(), unknowns)));
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::IllConditioned(e.into()))?;
    out[1..n].iter_mut().zip(x.iter()).for_each(|(o, v)| *o = *v);
    Ok(out)
}

/// Monte Carlo oracle for intrinsic volumes: box rejection sampling of
/// `K + εD` with the exact point-to-polytope distance, then a Steiner fit.
pub fn steiner_mc_oracle(p: &Polytope, cfg: &SteinerConfig) -> Result<SteinerCoefficients> {
    let n = p.ambient_dim();
    let mut radii = cfg.eps.clone();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    if radii.iter().any(|&e| !(e > 0.0) || !e.is_finite()) || radii.len() + 1 < n {
        return Err(Error::IllConditioned("need at least n - 1 distinct positive radii".into()));
    }
    let emax = *radii.last().unwrap();
    let fp = FloatPolytope::new(p);
    let (lo, hi) = p.bounding_box();
    let lo: Vec<f64> = lo.iter().map(|x| num::to_f64(x) - emax).collect();
    let hi: Vec<f64> = hi.iter().map(|x| num::to_f64(x) + emax).collect();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let vol = num::to_f64(&p.volume());

    let shard_fits: Vec<Vec<f64>> = mc::shard_sizes(cfg.samples, cfg.shards)
        .into_iter()
        .enumerate()
        .map(|(s, count)| {
            let mut rng = mc::shard_rng(cfg.seed, s as u64);
            let mut hits = vec![0usize; radii.len()];
            let mut x = vec![0.0; n];
            for _ in 0..count {
                for j in 0..n {
                    x[j] = rng.random_range(lo[j]..hi[j]);
                }
                let d = fp.distance(&x);
                for (h, e) in hits.iter_mut().zip(&radii) {
                    if d <= *e {
                        *h += 1;
                    }
                }
            }
            let vols: Vec<f64> = hits.iter().map(|&h| box_vol * h as f64 / count.max(1) as f64).collect();
            fit_steiner(n, vol, &radii, &vols)
        })
        .collect::<Result<_>>()?;

    let mut values = vec![0.0; n + 1];
    let mut stderr = vec![0.0; n + 1];
    for i in 0..=n {
        let col: Vec<f64> = shard_fits.iter().map(|f| f[i]).collect();
        let e = Estimate::from_shards(&col);
        values[i] = e.value;
        stderr[i] = e.stderr;
    }
    Ok(SteinerCoefficients { values, stderr })
}

/// `V(A_1, ..., A_n)` by the inclusion-exclusion formula over partial Minkowski sums.
pub fn mixed_volume(bodies: &[Polytope]) -> Result<Rational> {
    let n = check_mixed_input(bodies)?;
    let mut total = Rational::zero();
    for mask in 1usize..(1 << n) {
        let subset: Vec<&Polytope> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| &bodies[i]).collect();
        let v = minkowski_sum_volume(&subset)?;
        if (n - subset.len()) % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    Ok(total / Rational::from_integer(num::factorial(n)))
}

fn check_mixed_input(bodies: &[Polytope]) -> Result<usize> {
    let n = bodies.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    for b in bodies {
        if b.ambient_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.ambient_dim() });
        }
    }
    Ok(n)
}

/// Exponent vectors of all degree-`d` monomials in `n` variables, in
/// lexicographically decreasing order.
pub fn monomials(n: usize, d: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `vol(λ_1 A_1 + ... + λ_n A_n)` for nonnegative rational weights.
pub fn weighted_sum_volume(bodies: &[Polytope], lambda: &[Rational]) -> Result<Rational> {
    let scaled: Vec<Polytope> =
        bodies.iter().zip(lambda).filter(|(_, l)| !l.is_zero()).map(|(b, l)| b.scale(l)).collect();
    if scaled.is_empty() {
        return Ok(Rational::zero());
    }
    let refs: Vec<&Polytope> = scaled.iter().collect();
    minkowski_sum_volume(&refs)
}

/// Mixed volume read off an exact least-squares fit of the homogeneous
/// degree-`n` polynomial `λ ↦ vol(Σ λ_i A_i)`.
///
/// The default grid is the simplex lattice `{λ ∈ N^n : Σ λ_i = n}`, on which
/// the fit is an interpolation.
pub fn mixed_volume_interpolation_check(bodies: &[Polytope], grid: Option<&[QVec]>) -> Result<Rational> {
    let n = check_mixed_input(bodies)?;
    let monos = monomials(n, n);
    let default_grid: Vec<QVec>;
    let grid = match grid {
        Some(g) => g,
        None => {
            default_grid = monos.iter().map(|m| m.iter().map(|&e| num::q(e as i64)).collect()).collect();
            &default_grid
        }
    };
    if grid.iter().any(|l| l.len() != n || l.iter().any(|x| *x < Rational::zero())) {
        return Err(Error::InvalidArgument("grid points must be nonnegative vectors of length n".into()));
    }
    let design: Vec<QVec> = grid
        .iter()
        .map(|l| {
            monos
                .iter()
                .map(|m| m.iter().zip(l).fold(Rational::one(), |acc, (&e, x)| acc * num_traits::pow(x.clone(), e)))
                .collect()
        })
        .collect();
    let values: QVec = grid.iter().map(|l| weighted_sum_volume(bodies, l)).collect::<Result<_>>()?;
    let coef = num::least_squares(&design, &values).ok_or(Error::SingularSystem)?;
    let mixed = monos.iter().position(|m| m.iter().all(|&e| e == 1)).expect("square-free monomial");
    Ok(&coef[mixed] / Rational::from_integer(num::factorial(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies;
    use crate::num::{q, qf, qvec};

    fn cfg() -> AngleConfig {
        AngleConfig::default()
    }

    #[test]
    fn kappa_values() {
        assert!((kappa(0) - 1.0).abs() < 1e-15);
        assert!((kappa(1) - 2.0).abs() < 1e-15);
        assert!((kappa(2) - core::f64::consts::PI).abs() < 1e-15);
        assert!((kappa(3) - 4.0 * core::f64::consts::PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn vertex_angles_of_square_and_cube() {
        let sq = bodies::unit_cube(2);
        let a = external_angle(&sq, &sq.faces(0)[0], &cfg(), 0).unwrap();
        assert!((a.value - 0.25).abs() < 1e-15);
        let c = bodies::unit_cube(3);
        let a = external_angle(&c, &c.faces(0)[3], &cfg(), 0).unwrap();
        assert!((a.value - 0.125).abs() < 1e-14);
        let f = external_angle(&c, &c.facet_vertices()[0], &cfg(), 0).unwrap();
        assert_eq!(f.value, 0.5);
    }

    #[test]
    fn unit_cubes_give_binomials() {
        for n in 1..=3 {
            let c = bodies::unit_cube(n);
            for i in 0..=n {
                let v = intrinsic_volume(&c, i, &cfg()).unwrap();
                assert!((v.value - num::binomial(n, i) as f64).abs() < 1e-12, "n={n} i={i}");
                assert_ne!(v.method, Method::MonteCarlo);
            }
        }
    }

    #[test]
    fn triangle_and_segment() {
        let t = bodies::simplex(2, &q(1));
        let v1 = intrinsic_volume(&t, 1, &cfg()).unwrap().value;
        assert!((v1 - (2.0 + core::f64::consts::SQRT_2) / 2.0).abs() < 1e-14);
        let seg = Polytope::from_points(&[qvec(&[0, 0]), qvec(&[3, 4])]).unwrap();
        assert!((intrinsic_volume(&seg, 1, &cfg()).unwrap().value - 5.0).abs() < 1e-14);
        assert_eq!(intrinsic_volume(&seg, 2, &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn point_volumes() {
        let p = Polytope::point(qvec(&[1, 2, 3])).unwrap();
        let v: Vec<f64> = intrinsic_volumes(&p, &cfg()).unwrap().iter().map(|e| e.value).collect();
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn regular_simplex_vertex_angles_sum_to_one() {
        // Gauss-Bonnet: vertex angles of a convex polytope sum to one
        let s = bodies::simplex(3, &q(1));
        let total: f64 = s.faces(0).iter().map(|f| external_angle(&s, f, &cfg(), 0).unwrap().value).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_angle_in_four_dimensions() {
        let c = bodies::unit_cube(4);
        let a = external_angle(&c, &c.faces(0)[0], &AngleConfig { samples: 100_000, seed: 3 }, 0).unwrap();
        assert_eq!(a.method, Method::MonteCarlo);
        assert!(a.z_score(1.0 / 16.0) < 4.0);
    }

    #[test]
    fn steiner_oracle_for_stadium() {
        let seg = Polytope::from_points(&[qvec(&[0, 0]), qvec(&[2, 0])]).unwrap();
        let cfg = SteinerConfig { samples: 200_000, ..SteinerConfig::default() };
        let s = steiner_mc_oracle(&seg, &cfg).unwrap();
        assert!((s.values[1] - 2.0).abs() < 4.0 * s.stderr[1] + 1e-3);
        assert_eq!(s.values[0], 1.0);
        assert_eq!(s.values[2], 0.0);
    }

    #[test]
    fn steiner_oracle_rejects_bad_grid() {
        let c = bodies::unit_cube(3);
        let cfg = SteinerConfig { eps: vec![0.5], samples: 10, ..SteinerConfig::default() };
        assert!(matches!(steiner_mc_oracle(&c, &cfg), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn mixed_volume_examples() {
        let sq = bodies::unit_cube(2);
        let seg = Polytope::from_points(&[qvec(&[0, 0]), qvec(&[0, 1])]).unwrap();
        assert_eq!(mixed_volume(&[sq.clone(), seg.clone()]).unwrap(), qf(1, 2));
        assert_eq!(mixed_volume_interpolation_check(&[sq.clone(), seg], None).unwrap(), qf(1, 2));
        let c = bodies::unit_cube(3);
        assert_eq!(mixed_volume(&[c.clone(), c.clone(), c]).unwrap(), q(1));
        let pt = Polytope::point(qvec(&[1, 1])).unwrap();
        assert_eq!(mixed_volume(&[sq, pt]).unwrap(), q(0));
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(3, 3).len(), 10);
        assert_eq!(monomials(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }
}
