//! Closedness of rational functions and generative elements.
//!
//! Fibers are sampled through random points `a` of the base field with
//! `lambda = phi(a)`. The factor of `P - lambda Q` through a smooth rational
//! point is absolutely irreducible, so a fiber that is irreducible over the
//! base field and smooth at `a` proves `phi` closed. For `phi = H(psi)` the
//! factor through `a` is `p - psi(a) q`; two of them span the pencil of `psi`.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::factor::{factor_multi_rng, rng_for, FactorError};
use crate::field::{Elem, FieldSpec};
use crate::linalg::{self, SparseRow};
use crate::poly::{wedge_vanishes, Mono, Poly, PolyError, RatFunc, UPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosureError {
    #[error("constant function")]
    Constant,
    #[error("ran out of usable sample points ({tried} tried); the field is too small")]
    SampleExhaustion { tried: usize },
    #[error("no decomposition found although every sampled fiber was reducible")]
    NoDecomposition,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Two-dimensional span of polynomials in reduced echelon form with respect
/// to graded-lex coordinates; `p` carries the earlier pivot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencil {
    p: Poly,
    q: Poly,
}

impl Pencil {
    /// Canonical basis of `span{a, b}`, or `None` if they are dependent.
    pub fn from_span(a: &Poly, b: &Poly) -> Option<Pencil> {
        let k = a.field();
        let mut monos: Vec<Mono> = a.terms().iter().chain(b.terms()).map(|(m, _)| m.clone()).collect();
        monos.sort();
        monos.dedup();
        monos.reverse();
        let rows: Vec<Vec<Elem>> = [a, b].iter().map(|f| monos.iter().map(|m| f.coeff(m)).collect()).collect();
        let (r, piv) = linalg::rref(k, &rows);
        if piv.len() != 2 {
            return None;
        }
        let to_poly = |row: &Vec<Elem>| {
            Poly::from_terms(k, a.nvars(), monos.iter().zip(row).map(|(m, c)| (m.clone(), c.clone())))
        };
        Some(Pencil { p: to_poly(&r[0]), q: to_poly(&r[1]) })
    }

    /// Pencil of a nonconstant rational function.
    pub fn of(psi: &RatFunc) -> Option<Pencil> {
        Self::from_span(psi.num(), psi.den())
    }

    pub fn p(&self) -> &Poly {
        &self.p
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn psi(&self) -> RatFunc {
        RatFunc::new(self.p.clone(), self.q.clone()).expect("pencil basis is nonzero")
    }

    pub fn degree(&self) -> u32 {
        self.p.degree().unwrap_or(0).max(self.q.degree().unwrap_or(0))
    }
}

impl fmt::Display for Pencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// Univariate `A(t)/B(t)` with coprime numerator and monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniRat {
    num: UPoly,
    den: UPoly,
}

impl UniRat {
    pub fn new(num: UPoly, den: UPoly) -> Result<UniRat, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let k = den.field().clone();
        let g = num.gcd(&den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        } else {
            (num, den)
        };
        let inv = k.inv(&den.lc()).unwrap();
        Ok(UniRat { num: num.scale(&inv), den: den.scale(&inv) })
    }

    pub fn identity(k: &FieldSpec) -> UniRat {
        UniRat { num: UPoly::x(k), den: UPoly::one(k) }
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// `(A°(p, q), B°(p, q))` for the homogenized numerator and denominator.
    pub fn apply_homogeneous(&self, p: &Poly, q: &Poly) -> (Poly, Poly) {
        let m = self.degree();
        let terms = homogeneous_terms(p, q, m, |a, b| a.mul(b), Poly::one(p.field(), p.nvars()));
        let combine = |u: &UPoly| {
            u.coeffs().iter().zip(&terms).fold(Poly::zero(p.field(), p.nvars()), |acc, (c, t)| acc.add(&t.scale(c)))
        };
        (combine(&self.num), combine(&self.den))
    }

    /// `self(psi)` as a normalized rational function.
    pub fn apply(&self, psi: &RatFunc) -> Result<RatFunc, PolyError> {
        let (a, b) = self.apply_homogeneous(psi.num(), psi.den());
        RatFunc::new(a, b)
    }

    /// `self(inner(t))`.
    pub fn compose(&self, inner: &UniRat) -> UniRat {
        let m = self.degree();
        let k = self.num.field();
        let terms = homogeneous_terms(&inner.num, &inner.den, m, |a, b| a.mul(b), UPoly::one(k));
        let combine = |u: &UPoly| {
            u.coeffs().iter().zip(&terms).fold(UPoly::zero(k), |acc, (c, t)| acc.add(&t.scale(c)))
        };
        UniRat::new(combine(&self.num), combine(&self.den)).expect("composition of nonconstant maps")
    }

    pub fn to_string_var(&self, var: &str) -> String {
        let n = self.num.to_string_var(var);
        if self.is_polynomial() {
            return n;
        }
        let d = self.den.to_string_var(var);
        let n = if self.num.coeffs().iter().filter(|c| !self.num.field().is_zero(c)).count() > 1 { format!("({n})") } else { n };
        let d = if self.den.coeffs().iter().filter(|c| !self.den.field().is_zero(c)).count() > 1 || d.contains('*') {
            format!("({d})")
        } else {
            d
        };
        format!("{n}/{d}")
    }
}

impl fmt::Display for UniRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("t"))
    }
}

/// `[p^i q^(m-i) for i in 0..=m]`.
fn homogeneous_terms<T: Clone>(p: &T, q: &T, m: usize, mul: impl Fn(&T, &T) -> T, one: T) -> Vec<T> {
    let mut pp = vec![one.clone()];
    let mut qq = vec![one];
    for i in 1..=m {
        pp.push(mul(&pp[i - 1], p));
        qq.push(mul(&qq[i - 1], q));
    }
    (0..=m).map(|i| mul(&pp[i], &qq[m - i])).collect()
}

/// `phi = outer(p/q)` with `p/q` closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub pencil: Pencil,
    pub outer: UniRat,
    pub inner_degree: u32,
    pub outer_degree: u32,
    /// `phi` itself is closed and `outer` is a Moebius map.
    pub closed: bool,
}

impl Decomposition {
    pub fn psi(&self) -> RatFunc {
        self.pencil.psi()
    }

    pub fn recompose(&self) -> Result<RatFunc, PolyError> {
        let (a, b) = self.outer.apply_homogeneous(self.pencil.p(), self.pencil.q());
        RatFunc::new(a, b)
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H(t) = {}, psi = {}", self.outer, self.psi())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Degree one.
    Linear,
    /// An irreducible squarefree fiber with a smooth rational point.
    IrreducibleFiber { lambda: Elem, point: Vec<Elem> },
    /// An exactly verified decomposition with outer degree at least two.
    Decomposed { inner_degree: u32, outer_degree: u32 },
    /// Every sampled fiber was reducible but no decomposition was assembled.
    Reducible { samples: usize, skipped: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closedness {
    pub closed: bool,
    pub certificate: Certificate,
}

/// Fiber `P - lambda Q` (`Q` for `lambda = None`, the point at infinity), monic.
pub fn fiber(phi: &RatFunc, lambda: Option<&Elem>) -> Result<Poly, ClosureError> {
    if phi.is_constant() {
        return Err(ClosureError::Constant);
    }
    let f = match lambda {
        None => phi.den().clone(),
        Some(l) => phi.num().sub(&phi.den().scale(l)),
    };
    if f.is_zero() {
        return Err(ClosureError::Inconsistent("zero fiber".into()));
    }
    Ok(f.monic())
}

/// Default sample budget `d^2 + 1`.
pub fn default_samples(d: u32) -> usize {
    (d as usize) * (d as usize) + 1
}

enum Local {
    Closed,
    Component(Poly),
    Skip,
}

fn smooth_at(g: &Poly, a: &[Elem]) -> bool {
    g.partials().iter().any(|d| !g.field().is_zero(&d.eval(a)))
}

/// The factor of the fiber through `a`.
fn local_component<R: Rng + ?Sized>(phi: &RatFunc, a: &[Elem], rng: &mut R) -> Result<Local, ClosureError> {
    let k = phi.field();
    let d = phi.degree();
    let Some(lambda) = phi.eval(a) else { return Ok(Local::Skip) };
    let f = fiber(phi, Some(&lambda))?;
    if f.degree() != Some(d) {
        return Ok(Local::Skip);
    }
    let fac = factor_multi_rng(&f, rng)?;
    let through: Vec<&(Poly, usize)> = fac.factors.iter().filter(|(g, _)| k.is_zero(&g.eval(a))).collect();
    let [(g, mult)] = through.as_slice() else { return Ok(Local::Skip) };
    if !smooth_at(g, a) {
        return Ok(Local::Skip);
    }
    if *mult == 1 && g.degree() == Some(d) {
        return Ok(Local::Closed);
    }
    Ok(Local::Component(g.clone()))
}

/// Solves `A°(p, q) = P`, `B°(p, q) = Q` for the outer function of degree `m`.
pub(crate) fn solve_outer(phi: &RatFunc, pencil: &Pencil, m: usize) -> Option<UniRat> {
    let k = phi.field();
    let terms = homogeneous_terms(pencil.p(), pencil.q(), m, |a, b| a.mul(b), Poly::one(k, phi.nvars()));
    let solve = |target: &Poly| -> Option<UPoly> {
        let mut index: std::collections::BTreeMap<Mono, usize> = std::collections::BTreeMap::new();
        let mut rows: Vec<SparseRow> = Vec::new();
        let mut row_of = |m: &Mono, rows: &mut Vec<SparseRow>| -> usize {
            *index.entry(m.clone()).or_insert_with(|| {
                rows.push(SparseRow::new());
                rows.len() - 1
            })
        };
        for (j, t) in terms.iter().enumerate() {
            for (mono, c) in t.terms() {
                let r = row_of(mono, &mut rows);
                rows[r].insert(j, c.clone());
            }
        }
        for (mono, _) in target.terms() {
            row_of(mono, &mut rows);
        }
        let mut rhs = vec![k.zero(); rows.len()];
        for (mono, c) in target.terms() {
            rhs[index[mono]] = c.clone();
        }
        let (x, deficiency) = linalg::solve_sparse(k, rows, rhs, m + 1)?;
        (deficiency == 0).then(|| UPoly::new(k.clone(), x))
    };
    let a = solve(phi.num())?;
    let b = solve(phi.den())?;
    let h = UniRat::new(a, b).ok()?;
    (h.degree() == m).then_some(h)
}

fn try_decompose(phi: &RatFunc, c1: &Poly, c2: &Poly) -> Option<(Pencil, UniRat)> {
    let pencil = Pencil::from_span(c1, c2)?;
    let d = phi.degree();
    let e = pencil.degree();
    if e == 0 || d % e != 0 {
        return None;
    }
    let outer = solve_outer(phi, &pencil, (d / e) as usize)?;
    (outer.apply(&pencil.psi()).ok()? == *phi).then_some((pencil, outer))
}

enum Analysis {
    Closed(Certificate),
    Composite(Pencil, UniRat),
    Reducible { samples: usize, skipped: usize },
}

fn analyze<R: Rng + ?Sized>(phi: &RatFunc, samples: usize, rng: &mut R) -> Result<Analysis, ClosureError> {
    let k = phi.field();
    let n = phi.nvars();
    let d = phi.degree();
    if d == 0 {
        return Err(ClosureError::Constant);
    }
    if d == 1 {
        return Ok(Analysis::Closed(Certificate::Linear));
    }
    let mut comps: Vec<Poly> = Vec::new();
    let mut seen: Vec<Elem> = Vec::new();
    let (mut tried, mut skipped) = (0usize, 0usize);
    let budget = 4 * samples + 32;
    for attempt in 0..budget {
        if tried >= samples {
            break;
        }
        let height = 2 + attempt as i64 / 2;
        let a: Vec<Elem> = (0..n).map(|_| k.random_small(rng, height)).collect();
        match phi.eval(&a) {
            Some(l) if !seen.contains(&l) => seen.push(l),
            _ => {
                skipped += 1;
                continue;
            }
        }
        match local_component(phi, &a, rng)? {
            Local::Skip => skipped += 1,
            Local::Closed => {
                let lambda = phi.eval(&a).unwrap();
                return Ok(Analysis::Closed(Certificate::IrreducibleFiber { lambda, point: a }));
            }
            Local::Component(g) => {
                tried += 1;
                let e = g.degree().unwrap();
                let top = comps.iter().map(|c| c.degree().unwrap()).max().unwrap_or(0);
                if e < top || comps.contains(&g) {
                    continue;
                }
                if e > top {
                    comps.clear();
                }
                for c in &comps {
                    if let Some((pencil, outer)) = try_decompose(phi, c, &g) {
                        return Ok(Analysis::Composite(pencil, outer));
                    }
                }
                comps.push(g);
            }
        }
    }
    if tried < samples.min(2) || (tried == 0 && skipped > 0) {
        return Err(ClosureError::SampleExhaustion { tried: skipped + tried });
    }
    Ok(Analysis::Reducible { samples: tried, skipped })
}

/// Decides closedness with at most `samples` usable fibers (default `d^2 + 1`).
pub fn is_closed_rat(phi: &RatFunc, samples: Option<usize>, seed: u64) -> Result<Closedness, ClosureError> {
    let samples = samples.unwrap_or_else(|| default_samples(phi.degree()));
    let mut rng = rng_for(seed);
    Ok(match analyze(phi, samples, &mut rng)? {
        Analysis::Closed(certificate) => Closedness { closed: true, certificate },
        Analysis::Composite(pencil, outer) => Closedness {
            closed: false,
            certificate: Certificate::Decomposed { inner_degree: pencil.degree(), outer_degree: outer.degree() as u32 },
        },
        Analysis::Reducible { samples, skipped } => {
            Closedness { closed: false, certificate: Certificate::Reducible { samples, skipped } }
        }
    })
}

/// `phi = H(psi)` with `psi` closed.
pub fn generative_rat(phi: &RatFunc, seed: u64) -> Result<Decomposition, ClosureError> {
    generative_with(phi, None, seed)
}

fn generative_with(phi: &RatFunc, samples: Option<usize>, seed: u64) -> Result<Decomposition, ClosureError> {
    let samples = samples.unwrap_or_else(|| default_samples(phi.degree()));
    let mut rng = rng_for(seed);
    match analyze(phi, samples, &mut rng)? {
        Analysis::Closed(_) => {
            let pencil = Pencil::of(phi).ok_or(ClosureError::Constant)?;
            let outer = solve_outer(phi, &pencil, 1)
                .ok_or_else(|| ClosureError::Inconsistent("no Moebius map onto a closed function".into()))?;
            Ok(Decomposition { inner_degree: pencil.degree(), pencil, outer, outer_degree: 1, closed: true })
        }
        Analysis::Composite(pencil, outer) => {
            let inner = generative_with(&pencil.psi(), None, seed.wrapping_add(1))?;
            let outer = if inner.closed { outer } else { outer.compose(&inner.outer) };
            let dec = Decomposition {
                inner_degree: inner.pencil.degree(),
                outer_degree: outer.degree() as u32,
                pencil: inner.pencil,
                outer,
                closed: false,
            };
            if dec.recompose()? != *phi {
                return Err(ClosureError::Inconsistent("recomposition failed".into()));
            }
            Ok(dec)
        }
        Analysis::Reducible { .. } => Err(ClosureError::NoDecomposition),
    }
}

/// `f = F(h)` with `h` closed, monic and without constant term.
pub fn generative_poly(f: &Poly, seed: u64) -> Result<Decomposition, ClosureError> {
    let dec = generative_rat(&RatFunc::from_poly(f.clone()), seed)?;
    if !dec.pencil.q().is_one() || !dec.outer.is_polynomial() {
        return Err(ClosureError::Inconsistent("polynomial pencil does not contain the constants".into()));
    }
    Ok(dec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyFailure {
    Mismatch,
    Wedge,
    Recomposition,
    Closed,
}

impl VerifyFailure {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerifyFailure::Mismatch => "mismatch",
            VerifyFailure::Wedge => "wedge",
            VerifyFailure::Recomposition => "recomposition",
            VerifyFailure::Closed => "closed",
        }
    }
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Independent check of a decomposition: `d phi ^ d psi = 0`, exact
/// recomposition, and closedness of `psi`.
pub fn verify_decomposition(phi: &RatFunc, dec: &Decomposition) -> Result<(), VerifyFailure> {
    let psi = dec.psi();
    if psi.field() != phi.field() || psi.nvars() != phi.nvars() || dec.outer.num().field() != phi.field() {
        return Err(VerifyFailure::Mismatch);
    }
    if !wedge_vanishes(phi, &psi).map_err(|_| VerifyFailure::Mismatch)? {
        return Err(VerifyFailure::Wedge);
    }
    if dec.recompose().map_err(|_| VerifyFailure::Recomposition)? != *phi {
        return Err(VerifyFailure::Recomposition);
    }
    match is_closed_rat(&psi, None, 0) {
        Ok(c) if c.closed => Ok(()),
        _ => Err(VerifyFailure::Closed),
    }
}

/// Scalar multiple check used by tests and the CLI: `a = c b` for some `c`.
pub fn proportional(a: &Poly, b: &Poly) -> bool {
    !a.is_zero() && !b.is_zero() && a.monic() == b.monic()
}
