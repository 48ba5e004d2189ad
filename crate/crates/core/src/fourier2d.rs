//! The Fourier transform on translation-invariant valuations on the plane,
//! acting diagonally on circle Fourier coefficients of the density.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::normal_cycle::surface_area_measure;
use crate::num::{self, Rational};
use crate::valuation::{Exactness, Parity, Valuation, Value};

/// Gaussian rational.
pub type GaussQ = Complex<Rational>;

pub fn gq(re: Rational, im: Rational) -> GaussQ {
    Complex::new(re, im)
}

fn to_c64(z: &GaussQ) -> Complex<f64> {
    Complex::new(num::to_f64(&z.re), num::to_f64(&z.im))
}

/// `i^k` for any integer `k`.
fn i_pow(k: i64) -> GaussQ {
    let (one, zero) = (Rational::one(), Rational::zero());
    match k.rem_euclid(4) {
        0 => gq(one, zero),
        1 => gq(zero, one),
        2 => gq(-one, zero),
        _ => gq(zero, -one),
    }
}

/// Density `h(θ) = Σ_{|k| ≤ N} ĥ(k) e^{ikθ}` of a 1-homogeneous valuation,
/// with `ĥ(±1) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierDensity2D {
    n: usize,
    coeffs: Vec<GaussQ>,
}

impl FourierDensity2D {
    pub const MAX_N: usize = 64;

    /// Entries with repeated indices are summed.
    pub fn new(n: usize, entries: &[(i64, GaussQ)]) -> Result<Self> {
        if n > Self::MAX_N {
            return Err(Error::InvalidDensity(format!("N = {n} exceeds {}", Self::MAX_N)));
        }
        let mut coeffs = vec![gq(Rational::zero(), Rational::zero()); 2 * n + 1];
        for (k, c) in entries {
            if k.unsigned_abs() as usize > n {
                return Err(Error::InvalidDensity(format!("index {k} outside |k| <= {n}")));
            }
            coeffs[(k + n as i64) as usize] += c.clone();
        }
        let h = FourierDensity2D { n, coeffs };
        if n >= 1 && !(h.coeff(1).is_zero() && h.coeff(-1).is_zero()) {
            return Err(Error::InvalidDensity("coefficients at k = ±1 must vanish".into()));
        }
        Ok(h)
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(0, &[(0, gq(c, Rational::zero()))]).expect("valid")
    }

    pub fn max_index(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, k: i64) -> GaussQ {
        if k.unsigned_abs() as usize > self.n {
            return gq(Rational::zero(), Rational::zero());
        }
        self.coeffs[(k + self.n as i64) as usize].clone()
    }

    /// Nonzero coefficients in increasing `k`.
    pub fn entries(&self) -> Vec<(i64, GaussQ)> {
        (-(self.n as i64)..=self.n as i64).map(|k| (k, self.coeff(k))).filter(|(_, c)| !c.is_zero()).collect()
    }

    fn map(&self, f: impl Fn(i64, &GaussQ) -> GaussQ) -> Self {
        let n = self.n as i64;
        FourierDensity2D { n: self.n, coeffs: (-n..=n).map(|k| f(k, &self.coeffs[(k + n) as usize])).collect() }
    }

    /// `ĥ(-k) = conj ĥ(k)` for all `k`.
    pub fn is_real(&self) -> bool {
        (0..=self.n as i64).all(|k| self.coeff(-k) == self.coeff(k).conj())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn even_part(&self) -> Self {
        self.map(|k, c| if k % 2 == 0 { c.clone() } else { GaussQ::zero() })
    }

    pub fn odd_part(&self) -> Self {
        self.map(|k, c| if k % 2 != 0 { c.clone() } else { GaussQ::zero() })
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.n.max(other.n) as i64;
        let entries: Vec<(i64, GaussQ)> = (-n..=n).map(|k| (k, self.coeff(k) + other.coeff(k))).collect();
        Self::new(n as usize, &entries).expect("sum of valid densities")
    }

    /// `h` at the unit vector `(cos θ, sin θ) = (z.re, z.im)`.
    pub fn value_at_unit(&self, z: Complex<f64>) -> Complex<f64> {
        let mut pos = Complex::new(1.0, 0.0);
        let mut total = to_c64(&self.coeff(0));
        for k in 1..=self.n as i64 {
            pos *= z;
            total += to_c64(&self.coeff(k)) * pos + to_c64(&self.coeff(-k)) * pos.conj();
        }
        total
    }

    pub fn value_at(&self, theta: f64) -> Complex<f64> {
        self.value_at_unit(Complex::new(libm::cos(theta), libm::sin(theta)))
    }
}

/// `K ↦ ∫ h dS_1(K, ·)`, complex valued.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityValuation {
    pub density: FourierDensity2D,
}

impl DensityValuation {
    /// `Σ_edges length(e) · h(normal of e)`; a segment counts both normals.
    pub fn eval(&self, k: &Polytope) -> Result<Complex<f64>> {
        if k.ambient_dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: k.ambient_dim() });
        }
        if k.dim() == 0 {
            return Ok(Complex::new(0.0, 0.0));
        }
        let atoms = surface_area_measure(k)?;
        Ok(atoms
            .atoms
            .iter()
            .map(|a| self.density.value_at_unit(Complex::new(a.dir[0], a.dir[1])) * a.weight)
            .sum())
    }

    /// Real-valued view; fails for densities that are not real.
    pub fn to_valuation(&self) -> Result<Valuation> {
        if !self.density.is_real() {
            return Err(Error::InvalidDensity("density is not real".into()));
        }
        let me = self.clone();
        let parity = if me.density.odd_part().is_zero() {
            Parity::Even
        } else if me.density.even_part().is_zero() {
            Parity::Odd
        } else {
            Parity::Mixed
        };
        Ok(Valuation::new(2, Exactness::ClosedForm, move |k| Ok(Value::approx(me.eval(k)?.re)))
            .with_degree(Some(1))
            .with_parity(Some(parity)))
    }
}

pub fn val_from_density(h: &FourierDensity2D) -> DensityValuation {
    DensityValuation { density: h.clone() }
}

/// `ĥ'(k) = s(k) i^k ĥ(k)` with `s(k) = -1` exactly for odd `k < 0`: the
/// rotation by `π/2` contributes `i^k`, and the anti-holomorphic odd modes
/// enter with a minus sign.
pub fn fourier2d(h: &FourierDensity2D) -> FourierDensity2D {
    h.map(|k, c| {
        let s = if k < 0 && k % 2 != 0 { -i_pow(k) } else { i_pow(k) };
        s * c
    })
}

/// `ĥ(k) ↦ (-1)^k ĥ(k)`, the density of `K ↦ φ(-K)`.
pub fn antipode(h: &FourierDensity2D) -> FourierDensity2D {
    h.map(|k, c| if k % 2 == 0 { c.clone() } else { -c.clone() })
}

/// `c_0 χ + φ_h + c_2 vol` on the plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarValuation {
    pub chi: GaussQ,
    pub density: FourierDensity2D,
    pub vol: GaussQ,
}

impl PlanarValuation {
    pub fn eval(&self, k: &Polytope) -> Result<Complex<f64>> {
        let area = num::to_f64(&k.volume());
        Ok(to_c64(&self.chi) + val_from_density(&self.density).eval(k)? + to_c64(&self.vol) * area)
    }
}

/// The transform on `Val_0 ⊕ Val_1 ⊕ Val_2`: `χ ↔ vol` and [`fourier2d`] in degree one.
pub fn degree_extremes(phi: &PlanarValuation) -> PlanarValuation {
    PlanarValuation { chi: phi.vol.clone(), density: fourier2d(&phi.density), vol: phi.chi.clone() }
}
