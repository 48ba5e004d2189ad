//! Standard test bodies with exact rational coordinates.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::Result;
use crate::geom::Polytope;
use crate::num::{self, q, QVec, Rational};

/// `[0, side]^n`.
pub fn cube(n: usize, side: &Rational) -> Polytope {
    let pts: Vec<QVec> = (0..1usize << n)
        .map(|m| (0..n).map(|j| if (m >> j) & 1 == 1 { side.clone() } else { Rational::zero() }).collect())
        .collect();
    Polytope::from_points(&pts).expect("n >= 1")
}

pub fn unit_cube(n: usize) -> Polytope {
    cube(n, &Rational::one())
}

/// Axis-parallel box `[0, l_1] × ... × [0, l_n]`.
pub fn cuboid(lengths: &[Rational]) -> Polytope {
    let n = lengths.len();
    let pts: Vec<QVec> = (0..1usize << n)
        .map(|m| (0..n).map(|j| if (m >> j) & 1 == 1 { lengths[j].clone() } else { Rational::zero() }).collect())
        .collect();
    Polytope::from_points(&pts).expect("n >= 1")
}

/// `[-r, r]^n`.
pub fn centered_cube(n: usize, r: &Rational) -> Polytope {
    let pts: Vec<QVec> = (0..1usize << n)
        .map(|m| (0..n).map(|j| if (m >> j) & 1 == 1 { r.clone() } else { -r.clone() }).collect())
        .collect();
    Polytope::from_points(&pts).expect("n >= 1")
}

/// `conv(0, s e_1, ..., s e_n)`.
pub fn simplex(n: usize, s: &Rational) -> Polytope {
    let mut pts = alloc::vec![alloc::vec![Rational::zero(); n]];
    for i in 0..n {
        let mut e = alloc::vec![Rational::zero(); n];
        e[i] = s.clone();
        pts.push(e);
    }
    Polytope::from_points(&pts).expect("n >= 1")
}

/// `conv(±s e_i)`.
pub fn cross_polytope(n: usize, s: &Rational) -> Polytope {
    let mut pts = Vec::new();
    for i in 0..n {
        for sign in [1, -1] {
            let mut e = alloc::vec![Rational::zero(); n];
            e[i] = s * q(sign);
            pts.push(e);
        }
    }
    Polytope::from_points(&pts).expect("n >= 1")
}

/// Segment between two points.
pub fn segment(a: QVec, b: QVec) -> Result<Polytope> {
    Polytope::from_points(&[a, b])
}

/// Rational approximation of `x` with denominator `den`.
fn round_to(x: f64, den: i64) -> Rational {
    Rational::new(BigInt::from(libm::round(x * den as f64) as i64), BigInt::from(den))
}

/// Exact rational point on the unit circle near angle `theta`.
pub fn circle_point(theta: f64) -> QVec {
    let tau = 2.0 * core::f64::consts::PI;
    let mut t = theta % tau;
    if t > core::f64::consts::PI {
        t -= tau;
    } else if t <= -core::f64::consts::PI {
        t += tau;
    }
    let flip = t.abs() > core::f64::consts::FRAC_PI_2;
    let base = if flip { core::f64::consts::PI.copysign(t) - t } else { t };
    let s = round_to(libm::tan(base / 2.0), 1 << 24);
    let d = Rational::one() + &s * &s;
    let x = (Rational::one() - &s * &s) / &d;
    let y = (q(2) * &s) / &d;
    if flip {
        alloc::vec![-x, y]
    } else {
        alloc::vec![x, y]
    }
}

/// Exact rational point on the unit sphere in R³ near the given unit vector,
/// by inverse stereographic projection from the pole opposite to it.
pub fn sphere_point(dir: [f64; 3]) -> QVec {
    let (pole, sign) = if dir[2] >= 0.0 { (-1.0, 1) } else { (1.0, -1) };
    let den = 1.0 - pole * dir[2];
    let u = round_to(dir[0] / den, 1 << 24);
    let v = round_to(dir[1] / den, 1 << 24);
    let r2 = &u * &u + &v * &v;
    let d = Rational::one() + &r2;
    let z = (Rational::one() - &r2) / &d * q(sign);
    alloc::vec![q(2) * &u / &d, q(2) * &v / &d, z]
}

/// Polytope inscribed in the unit ball with `m` rational vertices on the sphere:
/// the segment `[-1, 1]` for `n = 1`, a near-regular `m`-gon for `n = 2`, and a
/// Fibonacci-spiral polytope for `n = 3`.
pub fn ball_approximant(n: usize, m: usize) -> Polytope {
    let pts: Vec<QVec> = match n {
        1 => alloc::vec![alloc::vec![q(-1)], alloc::vec![q(1)]],
        2 => (0..m).map(|j| circle_point(2.0 * core::f64::consts::PI * j as f64 / m as f64)).collect(),
        3 => {
            let golden = core::f64::consts::PI * (3.0 - libm::sqrt(5.0));
            (0..m)
                .map(|j| {
                    let z = 1.0 - 2.0 * (j as f64 + 0.5) / m as f64;
                    let r = libm::sqrt(1.0 - z * z);
                    let t = golden * j as f64;
                    sphere_point([r * libm::cos(t), r * libm::sin(t), z])
                })
                .collect()
        }
        _ => panic!("ball approximants are provided for n <= 3"),
    };
    Polytope::from_points(&pts).expect("nonempty")
}

/// Full-dimensional random polytope: hull of `points` draws from the grid
/// `{-size, ..., size}^n / den`, retried until full-dimensional.
pub fn random_polytope<R: Rng + ?Sized>(rng: &mut R, n: usize, points: usize, size: i64, den: i64) -> Polytope {
    loop {
        let pts: Vec<QVec> = (0..points.max(n + 1))
            .map(|_| (0..n).map(|_| num::qf(rng.random_range(-size..=size), den)).collect())
            .collect();
        let p = Polytope::from_points(&pts).expect("nonempty");
        if p.is_full_dimensional() {
            return p;
        }
    }
}

/// Convex polygon from `m` random angles on a circle of radius `r`, exact.
pub fn random_polygon<R: Rng + ?Sized>(rng: &mut R, m: usize, r: &Rational) -> Polytope {
    loop {
        let pts: Vec<QVec> = (0..m)
            .map(|_| {
                let p = circle_point(rng.random_range(0.0..2.0 * core::f64::consts::PI));
                num::scale(&p, r)
            })
            .collect();
        let p = Polytope::from_points(&pts).expect("nonempty");
        if p.is_full_dimensional() {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qf;

    #[test]
    fn circle_points_are_on_the_circle() {
        for j in 0..16 {
            let p = circle_point(j as f64 * 0.4 - 3.0);
            assert_eq!(num::dot(&p, &p), q(1));
            let t = j as f64 * 0.4 - 3.0;
            assert!((num::to_f64(&p[0]) - libm::cos(t)).abs() < 1e-6);
            assert!((num::to_f64(&p[1]) - libm::sin(t)).abs() < 1e-6);
        }
    }

    #[test]
    fn sphere_points_are_on_the_sphere() {
        for d in [[0.0, 0.0, 1.0], [0.6, 0.0, -0.8], [0.0, -1.0, 0.0]] {
            let p = sphere_point(d);
            assert_eq!(num::dot(&p, &p), q(1));
            for k in 0..3 {
                assert!((num::to_f64(&p[k]) - d[k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn standard_volumes() {
        assert_eq!(cube(3, &q(2)).volume(), q(8));
        assert_eq!(simplex(3, &q(1)).volume(), qf(1, 6));
        assert_eq!(cross_polytope(3, &q(1)).volume(), qf(4, 3));
        assert_eq!(ball_approximant(2, 64).vertices().len(), 64);
        assert_eq!(ball_approximant(3, 40).vertices().len(), 40);
    }
}
