#![no_std]
//! Exact and Monte Carlo computations with translation-invariant valuations
//! on convex polytopes, Euler calculus on polyhedral constructible functions,
//! and the Euler-characteristic Radon transform on projective space.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bodies;
pub mod crofton;
pub mod error;
pub mod euler;
pub mod fourier2d;
pub mod geom;
pub mod intrinsic;
pub mod mc;
pub mod normal_cycle;
pub mod valuation;
pub mod num;
pub mod radon;

pub use error::{Error, Result};
pub use geom::{AffineFlat, Cone, Polytope};
pub use num::{QVec, Rational};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
