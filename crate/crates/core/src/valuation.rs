//! Valuations as evaluatable functionals and the operations acting on them.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::bodies;
use crate::error::{Error, Result};
use crate::geom::{hull_volume, Polytope};
use crate::intrinsic::{intrinsic_volume, AngleConfig};
use crate::mc::Estimate;
use crate::num::{self, q, QVec, Rational};

/// Result of evaluating a valuation.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Approx { value: f64, stderr: f64 },
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(Rational::zero())
    }

    pub fn approx(value: f64) -> Self {
        Value::Approx { value, stderr: 0.0 }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => num::to_f64(r),
            Value::Approx { value, .. } => *value,
        }
    }

    pub fn stderr(&self) -> f64 {
        match self {
            Value::Exact(_) => 0.0,
            Value::Approx { stderr, .. } => *stderr,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx { .. } => None,
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Approx {
                value: self.to_f64() + other.to_f64(),
                stderr: libm::hypot(self.stderr(), other.stderr()),
            },
        }
    }

    pub fn scale(&self, c: &Rational) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(a * c),
            Value::Approx { value, stderr } => {
                let cf = num::to_f64(c);
                Value::Approx { value: value * cf, stderr: stderr * cf.abs() }
            }
        }
    }

    pub fn linear_combination(weights: &[Rational], values: &[Value]) -> Value {
        weights.iter().zip(values).fold(Value::zero(), |acc, (w, v)| acc.add(&v.scale(w)))
    }
}

impl From<Estimate> for Value {
    fn from(e: Estimate) -> Self {
        Value::Approx { value: e.value, stderr: e.stderr }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exactness {
    ExactRational,
    ClosedForm,
    MonteCarlo,
}

pub type Evaluator = Arc<dyn Fn(&Polytope) -> Result<Value> + Send + Sync>;

/// A translation-invariant valuation on polytopes of a fixed ambient dimension.
#[derive(Clone)]
pub struct Valuation {
    ambient: usize,
    degree: Option<usize>,
    parity: Option<Parity>,
    exactness: Exactness,
    eval: Evaluator,
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Valuation")
            .field("ambient", &self.ambient)
            .field("degree", &self.degree)
            .field("parity", &self.parity)
            .field("exactness", &self.exactness)
            .finish_non_exhaustive()
    }
}

impl Valuation {
    pub fn new<F>(ambient: usize, exactness: Exactness, f: F) -> Self
    where
        F: Fn(&Polytope) -> Result<Value> + Send + Sync + 'static,
    {
        Valuation { ambient, degree: None, parity: None, exactness, eval: Arc::new(f) }
    }

    pub fn with_degree(mut self, degree: Option<usize>) -> Self {
        self.degree = degree;
        self
    }

    pub fn with_parity(mut self, parity: Option<Parity>) -> Self {
        self.parity = parity;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn eval(&self, k: &Polytope) -> Result<Value> {
        if k.ambient_dim() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: k.ambient_dim() });
        }
        (self.eval)(k)
    }

    /// Evaluation extended by `φ(∅) = 0`.
    pub fn eval_opt(&self, k: Option<&Polytope>) -> Result<Value> {
        k.map_or(Ok(Value::zero()), |k| self.eval(k))
    }

    /// Euler characteristic.
    pub fn chi(n: usize) -> Self {
        Valuation::new(n, Exactness::ExactRational, |_| Ok(Value::Exact(Rational::one())))
            .with_degree(Some(0))
            .with_parity(Some(Parity::Even))
    }

    pub fn volume(n: usize) -> Self {
        Valuation::new(n, Exactness::ExactRational, |k| Ok(Value::Exact(k.volume())))
            .with_degree(Some(n))
            .with_parity(Some(Parity::Even))
    }

    /// `V_i`; exact for `i ∈ {0, n}`, closed-form angles otherwise.
    pub fn intrinsic(n: usize, i: usize, cfg: AngleConfig) -> Self {
        let exactness = if i == 0 || i == n { Exactness::ExactRational } else { Exactness::ClosedForm };
        Valuation::new(n, exactness, move |k| {
            if i == 0 {
                return Ok(Value::Exact(Rational::one()));
            }
            if i == n {
                return Ok(Value::Exact(k.volume()));
            }
            if i > k.dim() {
                return Ok(Value::zero());
            }
            if i == k.dim() {
                if let Some(r) = k.relative_volume().as_rational() {
                    return Ok(Value::Exact(r));
                }
            }
            Ok(intrinsic_volume(k, i, &cfg)?.into())
        })
        .with_degree(Some(i))
        .with_parity(Some(Parity::Even))
    }

    pub fn add(&self, other: &Valuation) -> Result<Valuation> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let degree = if self.degree == other.degree { self.degree } else { None };
        let parity = if self.parity == other.parity { self.parity } else { None };
        Ok(Valuation::new(self.ambient, self.exactness.max(other.exactness), move |k| Ok(a(k)?.add(&b(k)?)))
            .with_degree(degree)
            .with_parity(parity))
    }

    pub fn scale(&self, c: &Rational) -> Valuation {
        let (a, c) = (self.eval.clone(), c.clone());
        Valuation::new(self.ambient, self.exactness, move |k| Ok(a(k)?.scale(&c)))
            .with_degree(self.degree)
            .with_parity(self.parity)
    }

    /// `Σ c_i V_i` with exact rational coefficients.
    pub fn intrinsic_combination(n: usize, coefficients: &[Rational], cfg: AngleConfig) -> Result<Valuation> {
        let mut acc = Valuation::new(n, Exactness::ExactRational, |_| Ok(Value::zero()));
        for (i, c) in coefficients.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&Valuation::intrinsic(n, i, cfg).scale(c))?;
            }
        }
        Ok(acc.with_parity(Some(Parity::Even)))
    }
}

/// `φ_0(K), ..., φ_n(K)` from the exact Vandermonde system at `λ = 0, ..., n`.
pub fn homogeneous_components(phi: &Valuation, k: &Polytope) -> Result<Vec<Value>> {
    let n = phi.ambient_dim();
    let nodes: QVec = (0..=n as i64).map(q).collect();
    let inv = num::vandermonde_inverse(&nodes);
    let values: Vec<Value> = nodes.iter().map(|l| phi.eval(&k.scale(l))).collect::<Result<_>>()?;
    Ok(inv.iter().map(|row| Value::linear_combination(row, &values)).collect())
}

/// `φ(λK)` minus the degree-`n` interpolant through `λ = 0, ..., n`, at each
/// extra node; zero for every translation-invariant valuation.
pub fn polynomiality_residuals(phi: &Valuation, k: &Polytope, extra: &[Rational]) -> Result<Vec<Value>> {
    let comps = homogeneous_components(phi, k)?;
    extra
        .iter()
        .map(|l| {
            let powers: QVec = (0..comps.len()).map(|i| num_traits::pow(l.clone(), i)).collect();
            let fitted = Value::linear_combination(&powers, &comps);
            Ok(phi.eval(&k.scale(l))?.add(&fitted.scale(&q(-1))))
        })
        .collect()
}

/// `φ± = (φ ± φ∘(-1)) / 2`.
pub fn parity_split(phi: &Valuation) -> (Valuation, Valuation) {
    let half = num::qf(1, 2);
    let mk = |sign: i64, parity: Parity| {
        let (f, h) = (phi.eval.clone(), half.clone());
        Valuation::new(phi.ambient, phi.exactness, move |k| {
            let a = f(k)?;
            let b = f(&k.reflect())?;
            Ok(a.add(&b.scale(&q(sign))).scale(&h))
        })
        .with_degree(phi.degree)
        .with_parity(Some(parity))
    };
    (mk(1, Parity::Even), mk(-1, Parity::Odd))
}

/// `φ(f(K))` for a linear map `f: V → W` given by its `dim W × dim V` matrix.
pub fn pullback_linear(phi: &Valuation, matrix: &[QVec]) -> Result<Valuation> {
    if matrix.len() != phi.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: phi.ambient_dim(), found: matrix.len() });
    }
    let dim_v = matrix.first().map_or(0, Vec::len);
    if dim_v == 0 || matrix.iter().any(|r| r.len() != dim_v) {
        return Err(Error::InvalidArgument("ragged or empty matrix".into()));
    }
    let (f, m) = (phi.eval.clone(), matrix.to_vec());
    Ok(Valuation::new(dim_v, phi.exactness, move |k| f(&k.map_affine(&m, None)?))
        .with_degree(phi.degree)
        .with_parity(phi.parity))
}

/// Weights of the closed Newton–Cotes rule with `q >= 2` nodes on `[0, 1]`.
fn newton_cotes(q_nodes: usize) -> (QVec, QVec) {
    let nodes: QVec = (0..q_nodes).map(|i| num::qf(i as i64, q_nodes as i64 - 1)).collect();
    let inv = num::vandermonde_inverse(&nodes);
    let moments: QVec = (0..q_nodes).map(|p| num::qf(1, p as i64 + 1)).collect();
    let weights = (0..q_nodes).map(|i| (0..q_nodes).fold(Rational::zero(), |s, p| s + &inv[p][i] * &moments[p])).collect();
    (nodes, weights)
}

fn drop_coords(p: &Polytope, keep: usize) -> Result<Polytope> {
    let pts: Vec<QVec> = p.vertices().iter().map(|v| v[..keep].to_vec()).collect();
    Polytope::from_points(&pts)
}

/// `∫ φ(slice)` over coordinates `keep + level, ..., n - 1` of `p`, by
/// piecewise closed Newton–Cotes between vertex breakpoints.
fn slice_integral(phi: &Evaluator, p: &Polytope, keep: usize, level: usize, extra: usize) -> Result<Value> {
    let n = p.ambient_dim();
    let c = n - keep;
    if level == c {
        return phi(&drop_coords(p, keep)?);
    }
    let j = keep + level;
    let mut breaks: QVec = p.vertices().iter().map(|v| v[j].clone()).collect();
    breaks.sort();
    breaks.dedup();
    if breaks.len() < 2 {
        return Ok(Value::zero());
    }
    let (nodes, weights) = newton_cotes(n - level + extra);
    let mut axis = vec![Rational::zero(); n];
    axis[j] = Rational::one();
    let mut total = Value::zero();
    for w in breaks.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let len = b - a;
        for (s, wt) in nodes.iter().zip(&weights) {
            let t = a + &len * s;
            let v = match p.slice(&axis, &t) {
                Some(sl) => slice_integral(phi, &sl, keep, level + 1, extra)?,
                None => Value::zero(),
            };
            total = total.add(&v.scale(&(wt * &len)));
        }
    }
    Ok(total)
}

/// `(f_*φ)(K) = ∫_L φ(K ∩ (l + f(V))) dl` for an injective `f: V → W` given by
/// the images of the basis of `V`, with `L` spanned by `complement` and
/// measured in those coordinates.
///
/// The slice function is piecewise polynomial between vertex breakpoints,
/// so the closed rule is exact for polynomial valuations; a rule with one
/// more node supplies the error estimate.
pub fn pushforward_injective(phi: &Valuation, image_basis: &[QVec], complement: &[QVec]) -> Result<Valuation> {
    let k = phi.ambient_dim();
    if image_basis.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: image_basis.len() });
    }
    let n = image_basis.first().map_or(0, Vec::len);
    if complement.len() + k != n || image_basis.iter().chain(complement).any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: complement.len() + k });
    }
    let cols: Vec<&QVec> = image_basis.iter().chain(complement).collect();
    let m: Vec<QVec> = (0..n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let minv = num::inverse(&m).ok_or(Error::DependentBasis)?;
    let f = phi.eval.clone();
    let degree = phi.degree.map(|d| d + n - k);
    Ok(Valuation::new(n, phi.exactness.max(Exactness::ClosedForm), move |body| {
        let local = body.map_affine(&minv, None)?;
        let a = slice_integral(&f, &local, k, 0, 0)?;
        let b = slice_integral(&f, &local, k, 0, 1)?;
        match (&a, &b) {
            (Value::Exact(x), Value::Exact(y)) if x == y => Ok(a),
            _ => Ok(Value::Approx {
                value: b.to_f64(),
                stderr: (a.to_f64() - b.to_f64()).abs() + b.stderr(),
            }),
        }
    })
    .with_degree(degree)
    .with_parity(phi.parity))
}

/// `(f_*φ)(K)` for a surjection `f: V → W` (rows of `projection`): the
/// `ε^m` coefficient of `φ(K̃ + εS)`, `m = dim ker f`, where `K̃` is the
/// image of `K` under the minimal-norm section and `S` spans the kernel,
/// divided by the `m`-volume of `S` so that only the Lebesgue measure on
/// the kernel matters.
pub fn pushforward_surjective(phi: &Valuation, projection: &[QVec], s: &Polytope) -> Result<Valuation> {
    let n = phi.ambient_dim();
    let w = projection.len();
    if projection.iter().any(|r| r.len() != n) || s.ambient_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s.ambient_dim() });
    }
    if w == 0 || w > n || num::rank(projection) != w {
        return Err(Error::InvalidArgument("projection must be surjective".into()));
    }
    let m = n - w;
    let base = &s.vertices()[0];
    for v in s.vertices() {
        let d = num::sub(v, base);
        if projection.iter().any(|r| !num::dot(r, &d).is_zero()) {
            return Err(Error::InvalidArgument("S must lie in a translate of the kernel".into()));
        }
    }
    if s.dim() != m {
        return Err(Error::InvalidArgument(format!("S must have dimension {m}")));
    }
    let gram: Vec<QVec> = projection.iter().map(|a| projection.iter().map(|b| num::dot(a, b)).collect()).collect();
    let ginv = num::inverse(&gram).ok_or(Error::DependentBasis)?;
    // section = Pᵀ (P Pᵀ)^{-1}, an n × w matrix
    let section: Vec<QVec> = (0..n)
        .map(|i| (0..w).map(|c| (0..w).fold(Rational::zero(), |acc, r| acc + &projection[r][i] * &ginv[r][c])).collect())
        .collect();
    let nodes: QVec = (0..=m as i64).map(q).collect();
    let rel = s.relative_volume();
    let row: QVec = match rel.as_rational() {
        Some(v) => num::vandermonde_inverse(&nodes).swap_remove(m).iter().map(|c| c / &v).collect(),
        None => num::vandermonde_inverse(&nodes).swap_remove(m),
    };
    let inexact_norm = rel.as_rational().is_none().then(|| 1.0 / rel.value());
    let f = phi.eval.clone();
    let s = s.clone();
    let degree = phi.degree.and_then(|d| (d + w).checked_sub(n));
    Ok(Valuation::new(w, phi.exactness, move |k| {
        let lifted = k.map_affine(&section, None)?;
        let values: Vec<Value> =
            nodes.iter().map(|e| f(&lifted.minkowski_sum(&s.scale(e))?)).collect::<Result<_>>()?;
        let v = Value::linear_combination(&row, &values);
        Ok(match inexact_norm {
            Some(c) => Value::Approx { value: v.to_f64() * c, stderr: v.stderr() * c },
            None => v,
        })
    })
    .with_degree(degree)
    .with_parity(phi.parity))
}

/// `φ({0})`.
pub fn evaluate_on_points(phi: &Valuation) -> Result<Value> {
    phi.eval(&Polytope::point(vec![Rational::zero(); phi.ambient_dim()])?)
}

/// `(Λφ)(K)` with its extrapolation error and the per-approximant derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaEstimate {
    pub value: f64,
    pub error: f64,
    pub per_approximant: Vec<(usize, f64)>,
}

/// `d/dε φ(K + εD)|₀`, with `D` replaced by polytope approximants `D_m`.
///
/// For each approximant the degree-`n` polynomial `ε ↦ φ(K + εD_m)` is
/// interpolated at `ε = 0, ..., n` and differentiated at zero; the last two
/// approximants are combined by Richardson extrapolation in `1/m²`.
pub fn lambda_op(phi: &Valuation, k: &Polytope, approximants: &[(usize, Polytope)]) -> Result<LambdaEstimate> {
    if approximants.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = phi.ambient_dim();
    let nodes: QVec = (0..=n as i64).map(q).collect();
    let row = num::vandermonde_inverse(&nodes).swap_remove(1);
    let mut per = Vec::new();
    for (m, d) in approximants {
        let values: Vec<Value> =
            nodes.iter().map(|e| phi.eval(&k.minkowski_sum(&d.scale(e))?)).collect::<Result<_>>()?;
        per.push((*m, Value::linear_combination(&row, &values).to_f64()));
    }
    let (value, error) = match per.as_slice() {
        [.., (m1, l1), (m2, l2)] => {
            let (a, b) = ((*m1 * *m1) as f64, (*m2 * *m2) as f64);
            let lim = (b * l2 - a * l1) / (b - a);
            (lim, (lim - l2).abs())
        }
        [(_, l)] => (*l, f64::INFINITY),
        [] => unreachable!(),
    };
    Ok(LambdaEstimate { value, error, per_approximant: per })
}

/// Least-squares fit `φ ≈ Σ c_i V_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct HadwigerFit {
    pub coefficients: Vec<f64>,
    pub stderr: Vec<f64>,
    pub residual: f64,
}

/// Cubes, simplices and cross-polytopes at three scales plus three boxes:
/// at least `3(n + 1)` bodies for `n <= 3`.
pub fn hadwiger_battery(n: usize) -> Vec<Polytope> {
    let mut out = Vec::new();
    for s in [num::qf(1, 2), q(1), q(2)] {
        out.push(bodies::cube(n, &s));
        out.push(bodies::simplex(n, &s));
        out.push(bodies::cross_polytope(n, &s));
    }
    for shape in [[1, 2, 3, 4], [3, 1, 2, 1], [1, 1, 5, 2]] {
        let lengths: QVec = (0..n).map(|j| num::qf(shape[j % 4], 2)).collect();
        out.push(bodies::cuboid(&lengths));
    }
    out
}

/// Design matrix of intrinsic volumes over a battery.
pub fn intrinsic_design(battery: &[Polytope], cfg: &AngleConfig) -> Result<Vec<Vec<f64>>> {
    battery
        .iter()
        .map(|b| (0..=b.ambient_dim()).map(|i| intrinsic_volume(b, i, cfg).map(|e| e.value)).collect())
        .collect()
}

/// Least squares through the SVD, propagating per-observation standard errors.
pub fn fit_design(design: &[Vec<f64>], values: &[f64], stderr: &[f64]) -> Result<HadwigerFit> {
    let rows = design.len();
    let cols = design.first().map_or(0, Vec::len);
    if rows < cols || cols == 0 {
        return Err(Error::SingularSystem);
    }
    let a = nalgebra::DMatrix::from_fn(rows, cols, |r, c| design[r][c]);
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    if sv.min() <= 1e-10 * sv.max() {
        return Err(Error::SingularSystem);
    }
    let pinv = svd.pseudo_inverse(0.0).map_err(|_| Error::SingularSystem)?;
    let b = nalgebra::DVector::from_column_slice(values);
    let x = &pinv * &b;
    let residual = (&a * &x - &b).amax();
    let se: Vec<f64> = (0..cols)
        .map(|i| libm::sqrt((0..rows).map(|r| { let t = pinv[(i, r)] * stderr[r]; t * t }).sum()))
        .collect();
    Ok(HadwigerFit { coefficients: x.iter().copied().collect(), stderr: se, residual })
}

/// Fits `φ` against `V_0, ..., V_n` on the default battery.
pub fn hadwiger_fit(phi: &Valuation) -> Result<HadwigerFit> {
    hadwiger_fit_with(phi, &hadwiger_battery(phi.ambient_dim()))
}

pub fn hadwiger_fit_with(phi: &Valuation, battery: &[Polytope]) -> Result<HadwigerFit> {
    let design = intrinsic_design(battery, &AngleConfig::default())?;
    let values: Vec<Value> = battery.iter().map(|b| phi.eval(b)).collect::<Result<_>>()?;
    let y: Vec<f64> = values.iter().map(Value::to_f64).collect();
    let se: Vec<f64> = values.iter().map(Value::stderr).collect();
    fit_design(&design, &y, &se)
}

/// Fits each member of an ensemble of independent estimators separately and
/// reports the mean coefficients with their standard error across members.
pub fn hadwiger_fit_ensemble(members: &[Valuation]) -> Result<HadwigerFit> {
    let first = members.first().ok_or(Error::EmptyInput)?;
    let battery = hadwiger_battery(first.ambient_dim());
    let design = intrinsic_design(&battery, &AngleConfig::default())?;
    let fits: Vec<HadwigerFit> = members
        .iter()
        .map(|m| {
            let y: Vec<f64> = battery.iter().map(|b| m.eval(b).map(|v| v.to_f64())).collect::<Result<_>>()?;
            fit_design(&design, &y, &vec![0.0; y.len()])
        })
        .collect::<Result<_>>()?;
    let cols = fits[0].coefficients.len();
    let mut coefficients = vec![0.0; cols];
    let mut stderr = vec![0.0; cols];
    for i in 0..cols {
        let e = Estimate::from_shards(&fits.iter().map(|f| f.coefficients[i]).collect::<Vec<_>>());
        coefficients[i] = e.value;
        stderr[i] = e.stderr;
    }
    let residual = fits.iter().map(|f| f.residual).fold(0.0, f64::max);
    Ok(HadwigerFit { coefficients, stderr, residual })
}

/// Moves the lexicographically smallest vertex to the origin; `vol(• + A)`
/// does not see translations of `A`.
fn normalize_translation(a: &Polytope) -> Polytope {
    let t = num::neg(&a.vertices()[0]);
    a.translate(&t).expect("same dimension")
}

/// `K ↦ chi · χ(K) + Σ c_j vol(K + A_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinkowskiClassValuation {
    ambient: usize,
    chi: Rational,
    terms: Vec<(Rational, Polytope)>,
}

impl MinkowskiClassValuation {
    /// Canonical form: bodies translated to start at the origin, sorted, equal
    /// bodies merged and zero coefficients dropped.
    pub fn new(ambient: usize, chi: Rational, terms: Vec<(Rational, Polytope)>) -> Result<Self> {
        let mut merged: Vec<(Polytope, Rational)> = Vec::new();
        for (c, a) in terms {
            if a.ambient_dim() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, found: a.ambient_dim() });
            }
            merged.push((normalize_translation(&a), c));
        }
        merged.sort_by(|x, y| x.0.cmp(&y.0));
        let mut terms: Vec<(Rational, Polytope)> = Vec::new();
        for (a, c) in merged {
            match terms.last_mut() {
                Some((c0, a0)) if *a0 == a => *c0 += c,
                _ => terms.push((c, a)),
            }
        }
        terms.retain(|(c, _)| !c.is_zero());
        Ok(MinkowskiClassValuation { ambient, chi, terms })
    }

    pub fn chi(n: usize) -> Self {
        MinkowskiClassValuation { ambient: n, chi: Rational::one(), terms: Vec::new() }
    }

    pub fn volume(n: usize) -> Self {
        Self::mixed(n, Rational::one(), Polytope::point(vec![Rational::zero(); n]).expect("n >= 1"))
    }

    /// `c · vol(• + A)`.
    pub fn mixed(n: usize, c: Rational, a: Polytope) -> Self {
        Self::new(n, Rational::zero(), vec![(c, a)]).expect("dimension checked by caller")
    }

    /// The part of `vol(• + A)` that is `i`-homogeneous in the argument.
    pub fn homogeneous_part(a: &Polytope, i: usize) -> Result<Self> {
        let n = a.ambient_dim();
        if i > n {
            return Err(Error::InvalidArgument(format!("degree {i} exceeds dimension {n}")));
        }
        let nodes: QVec = (0..=n as i64).map(q).collect();
        let row = num::vandermonde_inverse(&nodes).swap_remove(n - i);
        let terms = row.into_iter().zip(&nodes).map(|(c, l)| (c, a.scale(l))).collect();
        Self::new(n, Rational::zero(), terms)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn chi_coefficient(&self) -> &Rational {
        &self.chi
    }

    pub fn terms(&self) -> &[(Rational, Polytope)] {
        &self.terms
    }

    pub fn eval(&self, k: &Polytope) -> Result<Rational> {
        if k.ambient_dim() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: k.ambient_dim() });
        }
        let mut total = self.chi.clone();
        for (c, a) in &self.terms {
            total += c * k.minkowski_sum(a)?.volume();
        }
        Ok(total)
    }

    pub fn to_valuation(&self) -> Valuation {
        let me = self.clone();
        Valuation::new(self.ambient, Exactness::ExactRational, move |k| Ok(Value::Exact(me.eval(k)?)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::new(self.ambient, &self.chi + &other.chi, terms)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let terms = self.terms.iter().map(|(a, b)| (a * c, b.clone())).collect();
        Self::new(self.ambient, &self.chi * c, terms).expect("same dimension")
    }

    fn mass(&self) -> Rational {
        self.terms.iter().fold(Rational::zero(), |s, (c, _)| s + c)
    }
}

/// `vol(• + A) ∗ vol(• + B) = vol(• + A + B)`, extended bilinearly with
/// `χ ∗ vol(• + B) = χ` and `χ ∗ χ = 0`.
pub fn mink_convolution(a: &MinkowskiClassValuation, b: &MinkowskiClassValuation) -> Result<MinkowskiClassValuation> {
    if a.ambient != b.ambient {
        return Err(Error::DimensionMismatch { expected: a.ambient, found: b.ambient });
    }
    let mut terms = Vec::new();
    for (ca, pa) in &a.terms {
        for (cb, pb) in &b.terms {
            terms.push((ca * cb, pa.minkowski_sum(pb)?));
        }
    }
    let chi = &a.chi * b.mass() + &b.chi * a.mass();
    MinkowskiClassValuation::new(a.ambient, chi, terms)
}

/// Formal sum of products of Minkowski-class generators: a term with bodies
/// `A_1, ..., A_r` is `K ↦ vol_{rn}(Δ_r K + A_1 × ... × A_r)`, and `r = 0`
/// is the Euler characteristic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductExpr {
    ambient: usize,
    terms: Vec<(Rational, Vec<Polytope>)>,
}

impl ProductExpr {
    fn new(ambient: usize, terms: Vec<(Rational, Vec<Polytope>)>) -> Self {
        let mut norm: Vec<(Vec<Polytope>, Rational)> = terms
            .into_iter()
            .map(|(c, mut bs)| {
                bs.sort();
                (bs, c)
            })
            .collect();
        norm.sort_by(|x, y| x.0.cmp(&y.0));
        let mut out: Vec<(Rational, Vec<Polytope>)> = Vec::new();
        for (bs, c) in norm {
            match out.last_mut() {
                Some((c0, b0)) if *b0 == bs => *c0 += c,
                _ => out.push((c, bs)),
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        ProductExpr { ambient, terms: out }
    }

    pub fn from_class(v: &MinkowskiClassValuation) -> Self {
        let mut terms = vec![(v.chi.clone(), Vec::new())];
        terms.extend(v.terms.iter().map(|(c, a)| (c.clone(), vec![a.clone()])));
        Self::new(v.ambient, terms)
    }

    pub fn terms(&self) -> &[(Rational, Vec<Polytope>)] {
        &self.terms
    }

    pub fn mul(&self, other: &ProductExpr) -> Result<ProductExpr> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        let mut terms = Vec::new();
        for (ca, ba) in &self.terms {
            for (cb, bb) in &other.terms {
                terms.push((ca * cb, ba.iter().chain(bb).cloned().collect()));
            }
        }
        Ok(Self::new(self.ambient, terms))
    }

    pub fn eval(&self, k: &Polytope) -> Result<Rational> {
        if k.ambient_dim() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: k.ambient_dim() });
        }
        let mut total = Rational::zero();
        for (c, bodies) in &self.terms {
            if bodies.is_empty() {
                total += c;
                continue;
            }
            let mut pts: Vec<QVec> = vec![Vec::new()];
            for a in bodies {
                pts = pts
                    .iter()
                    .flat_map(|prefix| {
                        a.vertices().iter().map(move |w| {
                            let mut p = prefix.clone();
                            p.extend(w.iter().cloned());
                            p
                        })
                    })
                    .collect();
            }
            let r = bodies.len();
            let mut all = Vec::with_capacity(pts.len() * k.vertices().len());
            for v in k.vertices() {
                for p in &pts {
                    all.push(p.iter().enumerate().map(|(j, x)| x + &v[j % self.ambient]).collect::<QVec>());
                }
            }
            debug_assert_eq!(all[0].len(), r * self.ambient);
            total += c * hull_volume(&all);
        }
        Ok(total)
    }

    pub fn to_valuation(&self) -> Valuation {
        let me = self.clone();
        Valuation::new(self.ambient, Exactness::ExactRational, move |k| Ok(Value::Exact(me.eval(k)?)))
    }
}

/// Bilinear extension of `(vol(• + A) · vol(• + B))(K) = vol_{2n}(Δ K + A × B)`
/// with `χ` as the unit.
pub fn mink_product(a: &MinkowskiClassValuation, b: &MinkowskiClassValuation) -> Result<Valuation> {
    Ok(ProductExpr::from_class(a).mul(&ProductExpr::from_class(b))?.to_valuation())
}

/// Largest absolute component outside `degree`, for degree-law checks.
pub fn off_degree_mass(components: &[Value], degree: usize) -> f64 {
    components.iter().enumerate().filter(|(i, _)| *i != degree).map(|(_, v)| v.to_f64().abs()).fold(0.0, f64::max)
}

/// Exact value of a component list entry, for tests that require rationals.
pub fn exact_components(components: &[Value]) -> Option<QVec> {
    components.iter().map(|v| v.as_exact().cloned()).collect()
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Approx { value, stderr } => write!(f, "{value} ± {stderr}"),
        }
    }
}
