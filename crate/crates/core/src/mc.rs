//! Seeded, sharded Monte Carlo plumbing.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// How a reported number was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Exact,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::ClosedForm => "closed-form",
            Method::MonteCarlo => "monte-carlo",
        }
    }

    /// The weaker of two methods.
    pub fn join(self, other: Method) -> Method {
        self.max(other)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub method: Method,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, stderr: 0.0, method: Method::Exact }
    }

    pub fn closed_form(value: f64) -> Self {
        Estimate { value, stderr: 0.0, method: Method::ClosedForm }
    }

    /// Sample mean with the standard error of the mean.
    pub fn from_samples(xs: &[f64]) -> Self {
        let (mean, var) = mean_var(xs);
        Estimate { value: mean, stderr: libm::sqrt(var / xs.len() as f64), method: Method::MonteCarlo }
    }

    /// Mean of independent shard results; the spread between shards gives the error.
    pub fn from_shards(xs: &[f64]) -> Self {
        Self::from_samples(xs)
    }

    pub fn z_score(&self, truth: f64) -> f64 {
        if self.stderr == 0.0 {
            if self.value == truth {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.value - truth).abs() / self.stderr
        }
    }
}

pub(crate) fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

/// Generator for one shard: every shard draws from its own ChaCha stream.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Splits `total` draws into `shards` nearly equal parts, larger parts first.
pub fn shard_sizes(total: usize, shards: usize) -> Vec<usize> {
    let shards = shards.max(1);
    (0..shards).map(|s| total / shards + usize::from(s < total % shards)).collect()
}
