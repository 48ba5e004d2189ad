//! JSON file formats and their conversions to the core types.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use valkit_core::euler::{Atom, ConstructibleFn};
use valkit_core::fourier2d::{gq, FourierDensity2D};
use valkit_core::normal_cycle::SphereAtoms;
use valkit_core::radon::{InversionReport, ProjConstructibleFn};
use valkit_core::valuation::MinkowskiClassValuation;
use valkit_core::{num, Cone, Error, Polytope, QVec, Rational, Result};

/// A rational number written as `"p/q"`. Integers and floats are accepted on input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

struct QVisitor;

impl<'de> Visitor<'de> for QVisitor {
    type Value = Q;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational string \"p/q\" or a number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Q, E> {
        num::parse_rational(v).map(Q).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Q, E> {
        Ok(Q(num::q(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Q, E> {
        Ok(Q(Rational::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Q, E> {
        num::from_f64(v).map(Q).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        d.deserialize_any(QVisitor)
    }
}

fn qs(v: &[Rational]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

fn unq(v: &[Q]) -> QVec {
    v.iter().map(|x| x.0.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeJson {
    pub vertices: Vec<Vec<Q>>,
}

impl PolytopeJson {
    pub fn to_polytope(&self) -> Result<Polytope> {
        let pts: Vec<QVec> = self.vertices.iter().map(|v| unq(v)).collect();
        if pts.is_empty() {
            return Err(Error::EmptyInput);
        }
        Polytope::from_points(&pts)
    }
}

impl From<&Polytope> for PolytopeJson {
    fn from(p: &Polytope) -> Self {
        PolytopeJson { vertices: p.vertices().iter().map(|v| qs(v)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereAtomJson {
    pub dir: Vec<f64>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereAtomsJson {
    pub atoms: Vec<SphereAtomJson>,
}

impl From<&SphereAtoms> for SphereAtomsJson {
    fn from(a: &SphereAtoms) -> Self {
        SphereAtomsJson { atoms: a.atoms.iter().map(|x| SphereAtomJson { dir: x.dir.clone(), weight: x.weight }).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coef: Q,
    pub body: PolytopeJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinkowskiClassJson {
    /// Needed only when there are no terms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub chi: Q,
    #[serde(default)]
    pub terms: Vec<TermJson>,
}

impl MinkowskiClassJson {
    pub fn to_class(&self) -> Result<MinkowskiClassValuation> {
        let terms: Vec<(Rational, Polytope)> =
            self.terms.iter().map(|t| Ok((t.coef.0.clone(), t.body.to_polytope()?))).collect::<Result<_>>()?;
        let n = match (self.n, terms.first()) {
            (Some(n), _) => n,
            (None, Some((_, p))) => p.ambient_dim(),
            (None, None) => return Err(Error::InvalidArgument("\"n\" is required when there are no terms".into())),
        };
        MinkowskiClassValuation::new(n, self.chi.0.clone(), terms)
    }
}

impl From<&MinkowskiClassValuation> for MinkowskiClassJson {
    fn from(v: &MinkowskiClassValuation) -> Self {
        MinkowskiClassJson {
            n: Some(v.ambient_dim()),
            chi: Q(v.chi_coefficient().clone()),
            terms: v.terms().iter().map(|(c, p)| TermJson { coef: Q(c.clone()), body: p.into() }).collect(),
        }
    }
}

/// `Σ c_i V_i` on `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntrinsicCombinationJson {
    pub n: usize,
    pub intrinsic: Vec<Q>,
}

/// Valuations accepted by `hadwiger-fit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValuationJson {
    Intrinsic(IntrinsicCombinationJson),
    Minkowski(MinkowskiClassJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffJson {
    pub k: i64,
    pub re: Q,
    pub im: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub coeffs: Vec<CoeffJson>,
}

impl DensityJson {
    pub fn to_density(&self) -> Result<FourierDensity2D> {
        let entries: Vec<_> = self.coeffs.iter().map(|c| (c.k, gq(c.re.0.clone(), c.im.0.clone()))).collect();
        FourierDensity2D::new(self.n, &entries)
    }
}

impl From<&FourierDensity2D> for DensityJson {
    fn from(h: &FourierDensity2D) -> Self {
        DensityJson {
            n: h.max_index(),
            coeffs: h.entries().into_iter().map(|(k, c)| CoeffJson { k, re: Q(c.re), im: Q(c.im) }).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub weight: Q,
    pub polytope: PolytopeJson,
    #[serde(default)]
    pub open: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructibleJson {
    pub n: usize,
    pub atoms: Vec<AtomJson>,
}

impl ConstructibleJson {
    pub fn to_fn(&self) -> Result<ConstructibleFn> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok(Atom { weight: a.weight.0.clone(), polytope: a.polytope.to_polytope()?, open: a.open }))
            .collect::<Result<_>>()?;
        ConstructibleFn::new(self.n, atoms)
    }
}

impl From<&ConstructibleFn> for ConstructibleJson {
    fn from(f: &ConstructibleFn) -> Self {
        ConstructibleJson {
            n: f.ambient_dim(),
            atoms: f
                .atoms()
                .iter()
                .map(|a| AtomJson { weight: Q(a.weight.clone()), polytope: (&a.polytope).into(), open: a.open })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeJson {
    pub rays: Vec<Vec<Q>>,
}

impl ConeJson {
    pub fn to_cone(&self) -> Result<Cone> {
        let rays: Vec<QVec> = self.rays.iter().map(|r| unq(r)).collect();
        let ambient = rays.first().ok_or(Error::EmptyInput)?.len();
        Cone::new(ambient, &rays)
    }
}

impl From<&Cone> for ConeJson {
    fn from(c: &Cone) -> Self {
        ConeJson { rays: c.rays().iter().map(|r| qs(r)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeAtomJson {
    pub weight: Q,
    pub cone: ConeJson,
}

/// `full · 1 + Σ w · 1_{P(C)}` on `RP^n`; cones live in `R^{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjFnJson {
    pub n: usize,
    #[serde(default = "zero_q")]
    pub full: Q,
    pub atoms: Vec<ConeAtomJson>,
}

fn zero_q() -> Q {
    Q(num::q(0))
}

/// Input of `radon-check`: a single cone or a weighted family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadonInputJson {
    Cone(ConeJson),
    Function(ProjFnJson),
}

impl RadonInputJson {
    pub fn to_fn(&self) -> Result<ProjConstructibleFn> {
        match self {
            RadonInputJson::Cone(c) => ProjConstructibleFn::indicator(c.to_cone()?),
            RadonInputJson::Function(f) => {
                let atoms = f.atoms.iter().map(|a| Ok((a.weight.0.clone(), a.cone.to_cone()?))).collect::<Result<_>>()?;
                ProjConstructibleFn::new(f.n, f.full.0.clone(), atoms)
            }
        }
    }
}

impl From<&ProjConstructibleFn> for ProjFnJson {
    fn from(f: &ProjConstructibleFn) -> Self {
        ProjFnJson {
            n: f.n(),
            full: Q(f.full_coefficient().clone()),
            atoms: f.atoms().iter().map(|(w, c)| ConeAtomJson { weight: Q(w.clone()), cone: c.into() }).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub ray: Vec<Q>,
    pub lhs: Q,
    pub rhs: Q,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadonReportJson {
    pub n: usize,
    pub integral: Q,
    pub resamples: usize,
    pub all_pass: bool,
    pub points: Vec<VerdictJson>,
}

impl From<&InversionReport> for RadonReportJson {
    fn from(r: &InversionReport) -> Self {
        RadonReportJson {
            n: r.n,
            integral: Q(r.integral.clone()),
            resamples: r.resamples,
            all_pass: r.all_pass(),
            points: r
                .points
                .iter()
                .map(|p| VerdictJson { ray: qs(&p.ray), lhs: Q(p.lhs.clone()), rhs: Q(p.rhs.clone()), pass: p.pass })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlainRowJson {
    pub frame: Vec<Vec<f64>>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlainTableJson {
    pub n: usize,
    pub i: usize,
    pub rows: Vec<KlainRowJson>,
}

impl From<&valkit_core::crofton::KlainTable> for KlainTableJson {
    fn from(t: &valkit_core::crofton::KlainTable) -> Self {
        KlainTableJson {
            n: t.n,
            i: t.i,
            rows: t.rows.iter().map(|(frame, value)| KlainRowJson { frame: frame.clone(), value: *value }).collect(),
        }
    }
}
