//! Euler calculus on polyhedral constructible functions.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::geom::Polytope;
use crate::mc::shard_rng;
use crate::num::{self, q, QVec, Rational};

/// `weight · 1_P`, or `weight · 1_{relint P}` when `open`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Atom {
    pub weight: Rational,
    pub polytope: Polytope,
    pub open: bool,
}

/// Finite sum of weighted polytope indicators on `R^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructibleFn {
    n: usize,
    atoms: Vec<Atom>,
}

impl ConstructibleFn {
    pub fn new(n: usize, atoms: Vec<Atom>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| a.polytope.ambient_dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: a.polytope.ambient_dim() });
        }
        Ok(ConstructibleFn { n, atoms })
    }

    pub fn zero(n: usize) -> Self {
        ConstructibleFn { n, atoms: Vec::new() }
    }

    pub fn indicator(p: &Polytope) -> Self {
        Self::weighted(q(1), p)
    }

    pub fn weighted(weight: Rational, p: &Polytope) -> Self {
        ConstructibleFn { n: p.ambient_dim(), atoms: vec![Atom { weight, polytope: p.clone(), open: false }] }
    }

    pub fn open_indicator(p: &Polytope) -> Self {
        ConstructibleFn { n: p.ambient_dim(), atoms: vec![Atom { weight: q(1), polytope: p.clone(), open: true }] }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(ConstructibleFn { n: self.n, atoms: self.atoms.iter().chain(&other.atoms).cloned().collect() })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let atoms = self.atoms.iter().map(|a| Atom { weight: &a.weight * c, ..a.clone() }).collect();
        ConstructibleFn { n: self.n, atoms }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&q(-1)))
    }

    /// Closed atoms only, equal cells merged, zero weights dropped, sorted.
    pub fn canonicalize(&self) -> Self {
        let mut closed: Vec<(Polytope, Rational)> = Vec::new();
        for a in &self.atoms {
            if a.open {
                for b in open_indicator_expand(&a.polytope).atoms {
                    closed.push((b.polytope, b.weight * &a.weight));
                }
            } else {
                closed.push((a.polytope.clone(), a.weight.clone()));
            }
        }
        closed.sort_by(|x, y| x.0.cmp(&y.0));
        let mut atoms: Vec<Atom> = Vec::new();
        for (p, w) in closed {
            match atoms.last_mut() {
                Some(a) if a.polytope == p => a.weight += w,
                _ => atoms.push(Atom { weight: w, polytope: p, open: false }),
            }
        }
        atoms.retain(|a| !a.weight.is_zero());
        ConstructibleFn { n: self.n, atoms }
    }

    /// Exact value at a point.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.atoms
            .iter()
            .filter(|a| if a.open { in_relint(&a.polytope, x) } else { a.polytope.contains(x) })
            .fold(Rational::zero(), |s, a| s + &a.weight)
    }
}

fn in_relint(p: &Polytope, x: &[Rational]) -> bool {
    p.equations().iter().all(|h| h.contains(x)) && p.facets().iter().all(|h| num::dot(&h.normal, x) < h.offset)
}

fn sign(d: usize) -> Rational {
    if d % 2 == 0 {
        q(1)
    } else {
        q(-1)
    }
}

/// `Σ w χ_c(cell)`: 1 for closed cells, `(-1)^d` for open `d`-cells.
pub fn euler_integral(f: &ConstructibleFn) -> Rational {
    f.atoms
        .iter()
        .map(|a| if a.open { &a.weight * sign(a.polytope.dim()) } else { a.weight.clone() })
        .fold(Rational::zero(), |s, w| s + w)
}

/// `1_{relint P} = Σ_F (-1)^{dim P - dim F} 1_F` over all faces, `P` included.
pub fn open_indicator_expand(p: &Polytope) -> ConstructibleFn {
    let d = p.dim();
    let mut atoms = Vec::new();
    for k in 0..=d {
        for f in p.faces(k) {
            atoms.push(Atom { weight: sign(d - k), polytope: p.face_polytope(f), open: false });
        }
    }
    ConstructibleFn { n: p.ambient_dim(), atoms }
}

/// `Σ w_i u_j 1_{P_i ∩ Q_j}`.
pub fn pointwise_product(f: &ConstructibleFn, g: &ConstructibleFn) -> Result<ConstructibleFn> {
    if f.n != g.n {
        return Err(Error::DimensionMismatch { expected: f.n, found: g.n });
    }
    let (f, g) = (f.canonicalize(), g.canonicalize());
    let mut atoms = Vec::new();
    for a in &f.atoms {
        for b in &g.atoms {
            if let Some(p) = a.polytope.intersect(&b.polytope)? {
                atoms.push(Atom { weight: &a.weight * &b.weight, polytope: p, open: false });
            }
        }
    }
    Ok(ConstructibleFn { n: f.n, atoms }.canonicalize())
}

/// `Σ w 1_{π(P)}` for `π(x) = A x + b`; fibres over points of a convex cell
/// are convex, so integrating along them contributes `χ = 1`.
pub fn pushforward_affine(f: &ConstructibleFn, matrix: &[QVec], shift: Option<&[Rational]>) -> Result<ConstructibleFn> {
    let m = matrix.len();
    if matrix.iter().any(|r| r.len() != f.n) {
        return Err(Error::DimensionMismatch { expected: f.n, found: matrix.first().map_or(0, Vec::len) });
    }
    let atoms = f
        .canonicalize()
        .atoms
        .iter()
        .map(|a| Ok(Atom { weight: a.weight.clone(), polytope: a.polytope.map_affine(matrix, shift)?, open: false }))
        .collect::<Result<_>>()?;
    Ok(ConstructibleFn { n: m, atoms }.canonicalize())
}

/// `Σ w 1_{g^{-1}(P) ∩ window}` for `g(x) = A x + b` from `R^m` (the window's
/// space) to `R^n`; agrees with `f ∘ g` on the window.
pub fn pullback_affine(f: &ConstructibleFn, matrix: &[QVec], shift: Option<&[Rational]>, window: &Polytope) -> Result<ConstructibleFn> {
    let m = window.ambient_dim();
    if matrix.len() != f.n || matrix.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch { expected: f.n, found: matrix.len() });
    }
    let zero = vec![Rational::zero(); f.n];
    let b = shift.unwrap_or(&zero);
    // a · (A x + b) <= c  becomes  (Aᵀ a) · x <= c - a · b
    let pull = |a: &[Rational], c: &Rational| -> (QVec, Rational) {
        let normal = (0..m).map(|j| (0..f.n).fold(Rational::zero(), |s, i| s + &a[i] * &matrix[i][j])).collect();
        (normal, c - num::dot(a, b))
    };
    let mut atoms = Vec::new();
    'atoms: for a in &f.canonicalize().atoms {
        let mut cur = window.clone();
        for h in a.polytope.equations() {
            let (nv, c) = pull(&h.normal, &h.offset);
            match slice_or_test(&cur, &nv, &c) {
                Some(p) => cur = p,
                None => continue 'atoms,
            }
        }
        for h in a.polytope.facets() {
            let (nv, c) = pull(&h.normal, &h.offset);
            if num::is_zero_vec(&nv) {
                if c.is_negative() {
                    continue 'atoms;
                }
                continue;
            }
            match cur.clip(&nv, &c) {
                Some(p) => cur = p,
                None => continue 'atoms,
            }
        }
        atoms.push(Atom { weight: a.weight.clone(), polytope: cur, open: false });
    }
    Ok(ConstructibleFn { n: m, atoms }.canonicalize())
}

fn slice_or_test(p: &Polytope, normal: &[Rational], c: &Rational) -> Option<Polytope> {
    if num::is_zero_vec(normal) {
        return c.is_zero().then(|| p.clone());
    }
    p.slice(normal, c)
}

/// `σ(1_P) = (-1)^{n - dim P} 1_{relint P}`, expanded into closed faces.
pub fn euler_verdier(f: &ConstructibleFn) -> ConstructibleFn {
    let mut atoms = Vec::new();
    for a in &f.canonicalize().atoms {
        let s = &a.weight * sign(f.n - a.polytope.dim());
        for b in open_indicator_expand(&a.polytope).atoms {
            atoms.push(Atom { weight: b.weight * &s, ..b });
        }
    }
    ConstructibleFn { n: f.n, atoms }.canonicalize()
}

/// Hyperplanes `a · x = c` with primitive integer-direction normals, deduplicated.
fn arrangement(fns: &[&ConstructibleFn]) -> Vec<(QVec, Rational)> {
    let mut set = BTreeSet::new();
    for f in fns {
        for a in &f.atoms {
            let p = &a.polytope;
            let hs = p.facets().iter().map(|h| (&h.normal, &h.offset)).chain(p.equations().iter().map(|h| (&h.normal, &h.offset)));
            for (nv, c) in hs {
                let prim = num::primitive(nv);
                let ratio = nv.iter().zip(&prim).find(|(x, _)| !x.is_zero()).map(|(x, y)| y / x).expect("nonzero normal");
                let mut key = (prim, c * &ratio);
                if key.0.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                    key = (num::neg(&key.0), -key.1);
                }
                set.insert(key);
            }
        }
    }
    set.into_iter().collect()
}

/// Cells of the arrangement inside `p`: `p` cut by every hyperplane that
/// crosses its relative interior.
fn refine(p: &Polytope, hyperplanes: &[(QVec, Rational)]) -> Vec<Polytope> {
    let mut pieces = vec![p.clone()];
    for (nv, c) in hyperplanes {
        let mut next = Vec::with_capacity(pieces.len());
        for piece in pieces {
            let vals: Vec<Rational> = piece.vertices().iter().map(|v| num::dot(nv, v)).collect();
            if vals.iter().any(|v| v < c) && vals.iter().any(|v| v > c) {
                next.extend(piece.clip(nv, c));
                next.extend(piece.clip(&num::neg(nv), &-c.clone()));
            } else {
                next.push(piece);
            }
        }
        pieces = next;
    }
    pieces
}

/// A relative-interior point of every face of the common refinement of the
/// atoms of `fns`, tagged with the face dimension.
pub fn refinement_points(fns: &[&ConstructibleFn]) -> Vec<(usize, QVec)> {
    let canon: Vec<ConstructibleFn> = fns.iter().map(|f| f.canonicalize()).collect();
    let refs: Vec<&ConstructibleFn> = canon.iter().collect();
    let hs = arrangement(&refs);
    let mut out = BTreeSet::new();
    for f in &canon {
        for a in &f.atoms {
            for piece in refine(&a.polytope, &hs) {
                for k in 0..=piece.dim() {
                    for face in piece.faces(k) {
                        out.insert((k, piece.face_polytope(face).centroid()));
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Exact comparison at every refinement cell point and at `extra` seeded
/// random rational points in the joint bounding box.
pub fn fn_equal_with(f: &ConstructibleFn, g: &ConstructibleFn, extra: usize, seed: u64) -> Result<bool> {
    if f.n != g.n {
        return Err(Error::DimensionMismatch { expected: f.n, found: g.n });
    }
    if f.n > 3 {
        return Err(Error::InvalidArgument("refinement equality needs n <= 3".into()));
    }
    let h = f.sub(g)?;
    if refinement_points(&[&h]).iter().any(|(_, x)| !h.eval(x).is_zero()) {
        return Ok(false);
    }
    let boxes: Vec<(QVec, QVec)> = h.atoms.iter().map(|a| a.polytope.bounding_box()).collect();
    if boxes.is_empty() {
        return Ok(true);
    }
    let mut rng = shard_rng(seed, 0);
    for _ in 0..extra {
        let x: QVec = (0..f.n)
            .map(|j| {
                let lo = boxes.iter().map(|b| &b.0[j]).min().expect("nonempty");
                let hi = boxes.iter().map(|b| &b.1[j]).max().expect("nonempty");
                let t = num::qf(rng.random_range(0..=1024), 1024);
                lo + (hi - lo) * t
            })
            .collect();
        if !h.eval(&x).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn fn_equal(f: &ConstructibleFn, g: &ConstructibleFn) -> Result<bool> {
    fn_equal_with(f, g, 100, 0)
}

/// `n` minus the dimension of the support; `None` for the zero function.
pub fn support_codim(f: &ConstructibleFn) -> Option<usize> {
    refinement_points(&[f])
        .into_iter()
        .filter(|(_, x)| !f.eval(x).is_zero())
        .map(|(k, _)| k)
        .max()
        .map(|k| f.n - k)
}

/// Random function with `atoms` closed atoms of random dimension and small
/// integer weights, on a grid of step `1/den` in `[-size, size]^n`.
pub fn random_constructible<R: Rng + ?Sized>(rng: &mut R, n: usize, atoms: usize, size: i64, den: i64) -> ConstructibleFn {
    let mut out = Vec::new();
    while out.len() < atoms {
        let d = rng.random_range(0..=n);
        let pts: Vec<QVec> = (0..d + 1 + usize::from(d == n))
            .map(|_| (0..n).map(|_| num::qf(rng.random_range(-size * den..=size * den), den)).collect())
            .collect();
        let p = Polytope::from_points(&pts).expect("nonempty");
        let mut w = rng.random_range(-3i64..=3);
        if w == 0 {
            w = 1;
        }
        out.push(Atom { weight: q(w), polytope: p, open: false });
    }
    ConstructibleFn { n, atoms: out }
}
