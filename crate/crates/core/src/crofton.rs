//! Grassmannian sampling, Kubota and Crofton integrals, Klain functions.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geom::{intersect_flat, orthonormalize, AffineFlat, Polytope};
use crate::intrinsic::{intrinsic_volume, kappa, AngleConfig};
use crate::mc::{mean_var, shard_rng, shard_sizes, Estimate};
use crate::num::{self, QVec};
use crate::valuation::{Exactness, Parity, Valuation};

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Random `k`-planes through the origin, each with an orthonormal frame, an
/// orthonormal frame of its complement and a uniform offset in the unit ball
/// of the complement.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannSample {
    pub n: usize,
    pub k: usize,
    pub frames: Vec<Vec<Vec<f64>>>,
    pub complements: Vec<Vec<Vec<f64>>>,
    pub offsets: Vec<Vec<f64>>,
}

impl GrassmannSample {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    fn draw<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, count: usize, out: &mut GrassmannSample) {
        for _ in 0..count {
            let g: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect();
            let mut q = orthonormalize(&g, 1e-12);
            while q.len() < n {
                let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                q.push(v);
                q = orthonormalize(&q, 1e-12);
            }
            let c = n - k;
            let mut off = vec![0.0; c];
            if c > 0 {
                let dir: Vec<f64> = (0..c).map(|_| rng.sample(StandardNormal)).collect();
                let l = libm::sqrt(dotf(&dir, &dir));
                let r = libm::pow(rng.random::<f64>(), 1.0 / c as f64);
                off = dir.iter().map(|x| x / l * r).collect();
            }
            let comp = q.split_off(k);
            out.frames.push(q);
            out.complements.push(comp);
            out.offsets.push(off);
        }
    }
}

/// `count` planes from Gaussian frames orthonormalized by Gram–Schmidt,
/// i.e. the QR factor, which is Haar distributed.
pub fn sample_grassmannian(n: usize, k: usize, count: usize, seed: u64) -> Result<GrassmannSample> {
    sample_grassmannian_sharded(n, k, count, seed, 1)
}

/// As [`sample_grassmannian`], with shard `s` drawing its share from stream `s`.
pub fn sample_grassmannian_sharded(n: usize, k: usize, count: usize, seed: u64, shards: usize) -> Result<GrassmannSample> {
    let mut out = GrassmannSample { n, k, frames: vec![], complements: vec![], offsets: vec![] };
    for part in split_grassmannian(n, k, count, seed, shards)? {
        out.frames.extend(part.frames);
        out.complements.extend(part.complements);
        out.offsets.extend(part.offsets);
    }
    Ok(out)
}

/// One independent sample per shard.
pub fn split_grassmannian(n: usize, k: usize, count: usize, seed: u64, shards: usize) -> Result<Vec<GrassmannSample>> {
    if k > n || n == 0 {
        return Err(Error::InvalidArgument(alloc::format!("cannot sample {k}-planes in R^{n}")));
    }
    Ok(shard_sizes(count, shards)
        .into_iter()
        .enumerate()
        .map(|(s, size)| {
            let mut rng = shard_rng(seed, s as u64);
            let mut part = GrassmannSample { n, k, frames: vec![], complements: vec![], offsets: vec![] };
            GrassmannSample::draw(&mut rng, n, k, size, &mut part);
            part
        })
        .collect())
}

/// Intrinsic volumes of the convex hull of points in `R^k`, `k <= 2`.
fn small_hull_intrinsic(points: &[Vec<f64>], k: usize, i: usize) -> f64 {
    if i == 0 {
        return 1.0;
    }
    if k == 1 {
        let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[0]), b.max(p[0])));
        return hi - lo;
    }
    let h = hull2(points);
    match i {
        1 => perimeter(&h) / 2.0,
        _ => area(&h),
    }
}

/// Andrew's monotone chain, counter-clockwise.
fn hull2(points: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = points.iter().map(|v| [v[0], v[1]]).collect();
    p.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut h: Vec<[f64; 2]> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = h.len();
        let iter: Vec<&[f64; 2]> = if pass == 0 { p.iter().collect() } else { p.iter().rev().collect() };
        for x in iter {
            while h.len() >= start + 2 && cross(&h[h.len() - 2], &h[h.len() - 1], x) <= 0.0 {
                h.pop();
            }
            h.push(*x);
        }
        h.pop();
    }
    h
}

fn perimeter(h: &[[f64; 2]]) -> f64 {
    match h.len() {
        0 | 1 => 0.0,
        2 => 2.0 * libm::hypot(h[1][0] - h[0][0], h[1][1] - h[0][1]),
        m => (0..m).map(|j| libm::hypot(h[(j + 1) % m][0] - h[j][0], h[(j + 1) % m][1] - h[j][1])).sum(),
    }
}

fn area(h: &[[f64; 2]]) -> f64 {
    let m = h.len();
    if m < 3 {
        return 0.0;
    }
    (0..m).map(|j| h[j][0] * h[(j + 1) % m][1] - h[(j + 1) % m][0] * h[j][1]).sum::<f64>() / 2.0
}

fn to_rational_points(points: &[Vec<f64>]) -> Result<Vec<QVec>> {
    points.iter().map(|p| num::vec_from_f64(p)).collect()
}

/// `V_i` of the orthogonal projection of `vertices` onto the plane spanned by `frame`.
fn projected_intrinsic(vertices: &[Vec<f64>], frame: &[Vec<f64>], i: usize, cfg: &AngleConfig) -> Result<f64> {
    let pts: Vec<Vec<f64>> = vertices.iter().map(|v| frame.iter().map(|e| dotf(v, e)).collect()).collect();
    let k = frame.len();
    if k <= 2 {
        return Ok(small_hull_intrinsic(&pts, k, i));
    }
    let p = Polytope::from_points(&to_rational_points(&pts)?)?;
    Ok(intrinsic_volume(&p, i, cfg)?.value)
}

/// `K ↦ E[V_i(π_E K)]` over the sampled planes, reported with its standard error.
pub fn kubota_valuation(n: usize, k: usize, i: usize, sample: &GrassmannSample) -> Result<Valuation> {
    if sample.n != n || sample.k != k {
        return Err(Error::InvalidArgument("sample does not match (n, k)".into()));
    }
    if i > k {
        return Err(Error::InvalidArgument(alloc::format!("degree {i} exceeds plane dimension {k}")));
    }
    if sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    let frames = Arc::new(sample.frames.clone());
    let cfg = AngleConfig::default();
    Ok(Valuation::new(n, Exactness::MonteCarlo, move |body| {
        let verts: Vec<Vec<f64>> = body.vertices().iter().map(|v| num::vec_to_f64(v)).collect();
        let xs: Vec<f64> = frames.iter().map(|f| projected_intrinsic(&verts, f, i, &cfg)).collect::<Result<_>>()?;
        Ok(Estimate::from_samples(&xs).into())
    })
    .with_degree(Some(i))
    .with_parity(Some(Parity::Even)))
}

/// Ball in `R^n` containing the bodies a Crofton estimator is applied to.
#[derive(Clone, Debug, PartialEq)]
pub struct CroftonWindow {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl CroftonWindow {
    /// Lebesgue measure of the offsets of one `k`-plane: `κ_{n-k} R^{n-k}`.
    pub fn factor(&self, n: usize, k: usize) -> f64 {
        kappa(n - k) * libm::pow(self.radius, (n - k) as f64)
    }

    fn covers(&self, body: &Polytope) -> bool {
        body.vertices().iter().all(|v| {
            let d: Vec<f64> = num::vec_to_f64(v).iter().zip(&self.center).map(|(a, b)| a - b).collect();
            dotf(&d, &d) <= self.radius * self.radius * (1.0 + 1e-12)
        })
    }
}

/// `V_i` of a line section `{p + s u}` of a body in H-representation.
fn line_section(facets: &[(Vec<f64>, f64)], equations: &[(Vec<f64>, f64)], p: &[f64], u: &[f64], i: usize) -> f64 {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut pin = |a: &[f64], b: f64, equality: bool| {
        let (au, ap) = (dotf(a, u), dotf(a, p));
        if au.abs() < 1e-300 {
            if ap > b || (equality && ap != b) {
                lo = f64::INFINITY;
            }
            return;
        }
        let s = (b - ap) / au;
        if equality {
            lo = lo.max(s);
            hi = hi.min(s);
        } else if au > 0.0 {
            hi = hi.min(s);
        } else {
            lo = lo.max(s);
        }
    };
    for (a, b) in equations {
        pin(a, *b, true);
    }
    for (a, b) in facets {
        pin(a, *b, false);
    }
    if lo > hi {
        return 0.0;
    }
    if i == 0 {
        1.0
    } else {
        hi - lo
    }
}

fn h_rep(body: &Polytope) -> (Vec<(Vec<f64>, f64)>, Vec<(Vec<f64>, f64)>) {
    let conv = |hs: (&QVec, &num::Rational)| (num::vec_to_f64(hs.0), num::to_f64(hs.1));
    (
        body.facets().iter().map(|h| conv((&h.normal, &h.offset))).collect(),
        body.equations().iter().map(|h| conv((&h.normal, &h.offset))).collect(),
    )
}

/// `K ↦ ∫ V_i(K ∩ E) dE` over affine `k`-planes, with the direction drawn from
/// the sample and the offset uniform in the window's projection. The result
/// is the sample mean times [`CroftonWindow::factor`].
pub fn crofton_valuation(n: usize, k: usize, i: usize, sample: &GrassmannSample, window: CroftonWindow) -> Result<Valuation> {
    if sample.n != n || sample.k != k {
        return Err(Error::InvalidArgument("sample does not match (n, k)".into()));
    }
    if i > k || k > n {
        return Err(Error::InvalidArgument(alloc::format!("degree {i} exceeds plane dimension {k}")));
    }
    if window.center.len() != n || !(window.radius > 0.0) {
        return Err(Error::InvalidArgument("window must be a ball in R^n".into()));
    }
    if sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sample = Arc::new(sample.clone());
    let factor = window.factor(n, k);
    let cfg = AngleConfig::default();
    Ok(Valuation::new(n, Exactness::MonteCarlo, move |body| {
        if !window.covers(body) {
            return Err(Error::InvalidArgument("body is not inside the Crofton window".into()));
        }
        let (facets, equations) = h_rep(body);
        let mut xs = Vec::with_capacity(sample.len());
        for ((frame, comp), off) in sample.frames.iter().zip(&sample.complements).zip(&sample.offsets) {
            let mut p = window.center.clone();
            for (e, t) in comp.iter().zip(off) {
                p.iter_mut().zip(e).for_each(|(x, y)| *x += window.radius * t * y);
            }
            let v = if k == 1 {
                line_section(&facets, &equations, &p, &frame[0], i)
            } else if k == n {
                intrinsic_volume(body, i, &cfg)?.value
            } else {
                let flat = AffineFlat::new(num::vec_from_f64(&p)?, frame.iter().map(|e| num::vec_from_f64(e)).collect::<Result<_>>()?)?;
                match intersect_flat(body, &flat)? {
                    Some(s) => intrinsic_volume(&s, i, &cfg)?.value,
                    None => 0.0,
                }
            };
            xs.push(v * factor);
        }
        Ok(Estimate::from_samples(&xs).into())
    })
    .with_degree(Some(n + i - k))
    .with_parity(Some(Parity::Even)))
}

/// Orthonormal frame of the orthogonal complement.
pub fn orth_complement(frame: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = frame.to_vec();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        all.push(e);
    }
    orthonormalize(&all, 1e-9).split_off(frame.len())
}

fn cube_in(frame: &[Vec<f64>]) -> Result<Polytope> {
    let i = frame.len();
    let n = frame[0].len();
    let e = to_rational_points(frame)?;
    let pts: Vec<QVec> = (0..1usize << i)
        .map(|mask| (0..i).filter(|j| mask >> j & 1 == 1).fold(vec![num::q(0); n], |acc, j| num::add(&acc, &e[j])))
        .collect();
    Polytope::from_points(&pts)
}

fn simplex_in(frame: &[Vec<f64>]) -> Result<Polytope> {
    let n = frame[0].len();
    let mut pts = vec![vec![0.0; n]];
    pts.extend(frame.iter().cloned());
    Polytope::from_points(&to_rational_points(&pts)?)
}

/// Klain function of an even `i`-homogeneous valuation at the plane spanned
/// by `frame`: `φ(C) / vol_i(C)` for the unit cube `C` on the frame. The
/// simplex on the same frame must give the same density.
pub fn klain_function(phi: &Valuation, i: usize, frame: &[Vec<f64>]) -> Result<f64> {
    if matches!(phi.parity(), Some(Parity::Odd) | Some(Parity::Mixed)) {
        return Err(Error::OddValuation);
    }
    let n = phi.ambient_dim();
    if frame.len() != i || i == 0 || frame.iter().any(|e| e.len() != n) {
        return Err(Error::InvalidArgument(alloc::format!("need an orthonormal {i}-frame in R^{n}")));
    }
    let frame = orthonormalize(frame, 1e-9);
    if frame.len() != i {
        return Err(Error::DependentBasis);
    }
    if phi.parity().is_none() {
        // i-dimensional bodies cannot see an odd part, so test on a full simplex
        let s = crate::bodies::simplex(n, &num::q(1));
        let (a, b) = (phi.eval(&s)?.to_f64(), phi.eval(&s.reflect())?.to_f64());
        if (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
            return Err(Error::OddValuation);
        }
    }
    let cube = cube_in(&frame)?;
    let a = phi.eval(&cube)?.to_f64();
    let kl = a / cube.relative_volume().value();
    let simplex = simplex_in(&frame)?;
    let ks = phi.eval(&simplex)?.to_f64() / simplex.relative_volume().value();
    let tol = match phi.exactness() {
        Exactness::MonteCarlo => 0.05,
        _ => 1e-6,
    };
    if (kl - ks).abs() > tol * (1.0 + kl.abs()) {
        return Err(Error::IllConditioned(alloc::format!("cube density {kl} and simplex density {ks} disagree")));
    }
    Ok(kl)
}

/// A function on `Gr(n, i)` evaluated at orthonormal frames.
#[derive(Clone)]
pub struct KlainFunction {
    pub n: usize,
    pub i: usize,
    f: Arc<dyn Fn(&[Vec<f64>]) -> Result<f64> + Send + Sync>,
}

impl core::fmt::Debug for KlainFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("KlainFunction").field("n", &self.n).field("i", &self.i).finish_non_exhaustive()
    }
}

impl KlainFunction {
    pub fn new<F>(n: usize, i: usize, f: F) -> Self
    where
        F: Fn(&[Vec<f64>]) -> Result<f64> + Send + Sync + 'static,
    {
        KlainFunction { n, i, f: Arc::new(f) }
    }

    pub fn of_valuation(phi: &Valuation, i: usize) -> Self {
        let phi = phi.clone();
        KlainFunction::new(phi.ambient_dim(), i, move |e| klain_function(&phi, i, e))
    }

    pub fn eval(&self, frame: &[Vec<f64>]) -> Result<f64> {
        if frame.len() != self.i {
            return Err(Error::DimensionMismatch { expected: self.i, found: frame.len() });
        }
        (self.f)(frame)
    }
}

/// Klain function of the Fourier transform of an even valuation: `E ↦ Kl(E^⊥)`.
pub fn even_fourier_klain(kl: &KlainFunction) -> KlainFunction {
    let inner = kl.clone();
    KlainFunction::new(kl.n, kl.n - kl.i, move |e| inner.eval(&orth_complement(e, inner.n)))
}

/// Klain values at sampled planes.
#[derive(Clone, Debug, PartialEq)]
pub struct KlainTable {
    pub n: usize,
    pub i: usize,
    pub rows: Vec<(Vec<Vec<f64>>, f64)>,
}

impl KlainTable {
    pub fn build(kl: &KlainFunction, sample: &GrassmannSample) -> Result<Self> {
        let rows = sample.frames.iter().map(|f| Ok((f.clone(), kl.eval(f)?))).collect::<Result<_>>()?;
        Ok(KlainTable { n: kl.n, i: kl.i, rows })
    }
}

/// One row of a convergence series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergencePoint {
    pub samples: usize,
    pub estimate: f64,
    pub stderr: f64,
}

/// Kubota estimates of `body` at increasing sample sizes, each from its own seed stream.
pub fn kubota_convergence(body: &Polytope, k: usize, i: usize, sizes: &[usize], seed: u64, shards: usize) -> Result<Vec<ConvergencePoint>> {
    let n = body.ambient_dim();
    sizes
        .iter()
        .enumerate()
        .map(|(j, &size)| {
            let sample = sample_grassmannian_sharded(n, k, size, seed.wrapping_add(j as u64), shards)?;
            let v = kubota_valuation(n, k, i, &sample)?.eval(body)?;
            Ok(ConvergencePoint { samples: size, estimate: v.to_f64(), stderr: v.stderr() })
        })
        .collect()
}

/// Least-squares slope of `log stderr` against `log N`.
pub fn log_log_slope(points: &[ConvergencePoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| libm::log(p.samples as f64)).collect();
    let ys: Vec<f64> = points.iter().map(|p| libm::log(p.stderr)).collect();
    let (mx, _) = mean_var(&xs);
    let (my, _) = mean_var(&ys);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Kubota valuations built on the shards of one sample, for ensemble fits.
pub fn kubota_shards(n: usize, k: usize, i: usize, count: usize, seed: u64, shards: usize) -> Result<Vec<Valuation>> {
    split_grassmannian(n, k, count, seed, shards)?.iter().map(|s| kubota_valuation(n, k, i, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies;
    use crate::num::{q, qvec};
    use core::f64::consts::PI;

    fn z_score(v: &crate::valuation::Value, truth: f64) -> f64 {
        (v.to_f64() - truth).abs() / v.stderr()
    }

    #[test]
    fn rejects_k_above_n() {
        assert!(sample_grassmannian(2, 3, 10, 1).is_err());
    }

    #[test]
    fn frames_are_orthonormal() {
        let s = sample_grassmannian(4, 2, 50, 3).unwrap();
        for (f, c) in s.frames.iter().zip(&s.complements) {
            let all: Vec<&Vec<f64>> = f.iter().chain(c).collect();
            for a in 0..4 {
                for b in 0..4 {
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dotf(all[a], all[b]) - want).abs() < 1e-12);
                }
            }
        }
        assert!(s.offsets.iter().all(|o| dotf(o, o) <= 1.0));
    }

    #[test]
    fn line_angles_are_uniform() {
        let s = sample_grassmannian(2, 1, 4000, 11).unwrap();
        let mut angles: Vec<f64> = s
            .frames
            .iter()
            .map(|f| {
                let a = libm::atan2(f[0][1], f[0][0]);
                if a < 0.0 { a + PI } else { a }.min(PI) / PI
            })
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = angles.len() as f64;
        let d = angles
            .iter()
            .enumerate()
            .map(|(j, x)| (x - j as f64 / m).abs().max(((j + 1) as f64 / m - x).abs()))
            .fold(0.0, f64::max);
        assert!(d < 1.36 / libm::sqrt(m), "KS statistic {d}");
    }

    #[test]
    fn line_directions_are_rotation_invariant() {
        // |cos| of the angle to any fixed axis is uniform on [0, 1] in R³
        let s = sample_grassmannian(3, 1, 6000, 12).unwrap();
        let axis = [0.6, 0.0, 0.8];
        let bins = 10;
        let mut counts = vec![0usize; bins];
        for f in &s.frames {
            let c = dotf(&f[0], &axis).abs();
            counts[((c * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let e = s.len() as f64 / bins as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e) * (c as f64 - e) / e).sum();
        // 99.9% quantile of chi-square with 9 degrees of freedom
        assert!(chi2 < 27.88, "chi-square {chi2}");
    }

    #[test]
    fn kubota_is_proportional_to_v1() {
        let s = sample_grassmannian(2, 1, 20000, 5).unwrap();
        let kub = kubota_valuation(2, 1, 1, &s).unwrap();
        let cfg = AngleConfig::default();
        let mut rng = shard_rng(9, 0);
        let mut ratios = Vec::new();
        for _ in 0..5 {
            let k = bodies::random_polytope(&mut rng, 2, 6, 10, 3);
            ratios.push(kub.eval(&k).unwrap().to_f64() / intrinsic_volume(&k, 1, &cfg).unwrap().value);
        }
        for r in &ratios {
            assert!((r / ratios[0] - 1.0).abs() < 0.01, "{ratios:?}");
            assert!((r - 2.0 / PI).abs() < 0.02);
        }
        assert!(kubota_valuation(2, 1, 2, &s).is_err());
    }

    #[test]
    fn kubota_in_three_space() {
        let s = sample_grassmannian(3, 2, 4000, 6).unwrap();
        let cube = bodies::unit_cube(3);
        let v = kubota_valuation(3, 2, 2, &s).unwrap().eval(&cube).unwrap();
        // mean projected area of a convex body is a quarter of its surface area
        assert!(z_score(&v, 1.5) < 4.0, "{v}");
    }

    #[test]
    fn crofton_in_the_plane() {
        let s = sample_grassmannian(2, 1, 20000, 8).unwrap();
        let w = CroftonWindow { center: vec![0.5, 0.5], radius: 1.0 };
        let sq = bodies::unit_cube(2);
        let area = crofton_valuation(2, 1, 1, &s, w.clone()).unwrap().eval(&sq).unwrap();
        assert!(z_score(&area, 1.0) < 4.0, "{area}");
        let hits = crofton_valuation(2, 1, 0, &s, w.clone()).unwrap().eval(&sq).unwrap();
        assert!(z_score(&hits, 4.0 / PI) < 4.0, "{hits}");
        let seg = bodies::segment(qvec(&[0, 0]), qvec(&[1, 0])).unwrap();
        let hits = crofton_valuation(2, 1, 0, &s, w.clone()).unwrap().eval(&seg).unwrap();
        assert!(z_score(&hits, 2.0 / PI) < 4.0, "{hits}");
        let big = bodies::cube(2, &q(3));
        assert!(crofton_valuation(2, 1, 0, &s, w).unwrap().eval(&big).is_err());
    }

    #[test]
    fn crofton_planes_in_three_space() {
        let s = sample_grassmannian(3, 2, 300, 10).unwrap();
        let w = CroftonWindow { center: vec![0.5; 3], radius: 0.9 };
        let v = crofton_valuation(3, 2, 2, &s, w).unwrap().eval(&bodies::unit_cube(3)).unwrap();
        assert!(z_score(&v, 1.0) < 4.0, "{v}");
    }

    #[test]
    fn klain_of_intrinsic_volumes_is_one() {
        let cfg = AngleConfig::default();
        let s = sample_grassmannian(3, 1, 50, 4).unwrap();
        let t = sample_grassmannian(3, 2, 50, 4).unwrap();
        let v1 = Valuation::intrinsic(3, 1, cfg);
        let v2 = Valuation::intrinsic(3, 2, cfg);
        for f in &s.frames {
            assert!((klain_function(&v1, 1, f).unwrap() - 1.0).abs() < 1e-9);
        }
        for f in &t.frames {
            assert!((klain_function(&v2, 2, f).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn klain_rejects_odd() {
        let odd = Valuation::volume(2).with_parity(Some(Parity::Odd));
        let e = vec![vec![1.0, 0.0]];
        assert_eq!(klain_function(&odd, 1, &e).unwrap_err(), Error::OddValuation);
        let tri = Polytope::from_points(&[qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 1])]).unwrap();
        let unknown = crate::valuation::MinkowskiClassValuation::mixed(2, q(1), tri).to_valuation();
        let e = vec![vec![0.6, 0.8]];
        let h = crate::valuation::homogeneous_components(&unknown, &bodies::unit_cube(2)).unwrap();
        assert!(h[1].to_f64() != 0.0);
        assert_eq!(klain_function(&unknown, 1, &e).unwrap_err(), Error::OddValuation);
    }

    #[test]
    fn fourier_klain_is_involutive() {
        let anis = KlainFunction::new(3, 1, |e| Ok(e[0][0] * e[0][0] + 2.0 * e[0][2].abs()));
        let f2 = even_fourier_klain(&even_fourier_klain(&anis));
        let s = sample_grassmannian(3, 1, 30, 2).unwrap();
        for f in &s.frames {
            assert!((f2.eval(f).unwrap() - anis.eval(f).unwrap()).abs() < 1e-9);
        }
        assert_eq!(even_fourier_klain(&anis).i, 2);
        let table = KlainTable::build(&anis, &s).unwrap();
        assert_eq!(table.rows.len(), 30);
    }

    #[test]
    fn stderr_scales_as_inverse_root() {
        let tri = Polytope::from_points(&[qvec(&[0, 0]), qvec(&[3, 0]), qvec(&[0, 1])]).unwrap();
        let pts = kubota_convergence(&tri, 1, 1, &[1000, 10000, 100000], 21, 4).unwrap();
        let slope = log_log_slope(&pts);
        assert!((slope + 0.5).abs() < 0.1, "{slope}");
    }

    #[test]
    fn sharded_samples_are_reproducible() {
        let a = sample_grassmannian_sharded(3, 1, 100, 7, 4).unwrap();
        let b = sample_grassmannian_sharded(3, 1, 100, 7, 4).unwrap();
        assert_eq!(a, b);
        let c = sample_grassmannian_sharded(3, 1, 100, 7, 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn hull2_square() {
        let pts: Vec<Vec<f64>> = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.5], [1.0, 1.0], [0.0, 1.0]].iter().map(|p| p.to_vec()).collect();
        let h = hull2(&pts);
        assert_eq!(h.len(), 4);
        assert_eq!(area(&h), 1.0);
        assert_eq!(perimeter(&h), 4.0);
    }
}
