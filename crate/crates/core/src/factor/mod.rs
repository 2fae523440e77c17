//! Exact factorization: squarefree decomposition, univariate factorization
//! over `Q`, number fields and prime fields, multivariate factorization, and
//! a Monte Carlo absolute factorization.

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{Elem, FieldKind, FieldSpec};
use crate::poly::{Poly, UPoly};

mod absolute;
mod multi;
mod univariate;
mod zassenhaus;

pub use absolute::{extend, Embedding};
pub use univariate::{norm_elem, norm_poly, resultant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("cannot factor the zero polynomial")]
    ZeroInput,
    #[error("input is not squarefree")]
    NotSquarefree,
    #[error("absolute factorization is not supported in positive characteristic")]
    PositiveCharacteristic,
    #[error("field too small for a good evaluation point")]
    FieldTooSmall,
    #[error("factor recombination exceeded {subsets} subsets")]
    RecombinationLimit { subsets: usize },
    #[error("factorization failed: {0}")]
    Failed(String),
}

/// `unit * prod(factor^multiplicity)`, factors monic and pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization<P = Poly> {
    pub unit: Elem,
    pub factors: Vec<(P, usize)>,
}

impl Factorization<Poly> {
    /// Multiplies everything back together.
    pub fn expand(&self, k: &FieldSpec, nvars: usize) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(k, nvars, self.unit.clone()), |acc, (f, e)| acc.mul(&f.pow(*e as u32)))
    }

    /// Number of irreducible factors counted with multiplicity.
    pub fn count(&self) -> usize {
        self.factors.iter().map(|(_, e)| e).sum()
    }
}

impl Factorization<UPoly> {
    pub fn expand(&self, k: &FieldSpec) -> UPoly {
        self.factors.iter().fold(UPoly::constant(k, self.unit.clone()), |acc, (f, e)| acc.mul(&f.pow(*e as u32)))
    }
}

/// Components over an extension field; `certified` is false for the Monte
/// Carlo result.
#[derive(Clone, Debug)]
pub struct AbsFactorization {
    pub extension: FieldSpec,
    pub embedding: Embedding,
    pub components: Factorization,
    pub certified: bool,
}

impl AbsFactorization {
    /// Coerces a polynomial over the input field into the extension.
    pub fn coerce(&self, f: &Poly) -> Poly {
        self.embedding.poly(f)
    }
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// True iff the monic rational polynomial (low degree first) is irreducible over `Q`.
pub fn is_irreducible_over_q(m: &[BigRational]) -> bool {
    let q = FieldSpec::rationals();
    let u = UPoly::new(q.clone(), m.iter().map(|c| q.from_rational(c).unwrap()).collect());
    match factor_uni(&u, 0) {
        Ok(f) => f.factors.len() == 1 && f.factors[0].1 == 1,
        Err(_) => false,
    }
}

pub fn factor_uni(f: &UPoly, seed: u64) -> Result<Factorization<UPoly>, FactorError> {
    let mut rng = rng_for(seed);
    let (unit, factors) = univariate::factor(f, &mut rng)?;
    let out = Factorization { unit, factors };
    debug_assert_eq!(&out.expand(f.field()), f);
    Ok(out)
}

/// Squarefree decomposition; each part monic, unit the leading coefficient.
pub fn squarefree(f: &Poly) -> Result<Factorization, FactorError> {
    if f.is_zero() {
        return Err(FactorError::ZeroInput);
    }
    let out = Factorization { unit: f.lc(), factors: multi::squarefree_parts(f) };
    debug_assert_eq!(out.expand(f.field(), f.nvars()), *f);
    Ok(out)
}

pub fn factor_multi(f: &Poly, seed: u64) -> Result<Factorization, FactorError> {
    factor_multi_rng(f, &mut rng_for(seed))
}

pub(crate) fn factor_multi_rng<R: rand::Rng + ?Sized>(f: &Poly, rng: &mut R) -> Result<Factorization, FactorError> {
    if f.is_zero() {
        return Err(FactorError::ZeroInput);
    }
    let mut factors = Vec::new();
    for (part, e) in multi::squarefree_parts(f) {
        for g in multi::factor_squarefree(&part, rng)? {
            factors.push((g, e));
        }
    }
    factors.sort_by_cached_key(|(g, e)| (g.degree(), g.to_string(), *e));
    let out = Factorization { unit: f.lc(), factors };
    if out.expand(f.field(), f.nvars()) != *f {
        return Err(FactorError::Failed("re-multiplication check failed".into()));
    }
    Ok(out)
}

/// Absolute factorization of a squarefree polynomial in characteristic zero.
/// Runs the line search with two seeds and repeats until consecutive
/// component counts agree.
pub fn abs_factor(f: &Poly, seed: u64) -> Result<AbsFactorization, FactorError> {
    if f.is_zero() {
        return Err(FactorError::ZeroInput);
    }
    let k = f.field();
    if k.kind() == FieldKind::PrimeField {
        return Err(FactorError::PositiveCharacteristic);
    }
    let parts = multi::squarefree_parts(f);
    if parts.iter().any(|(_, e)| *e > 1) {
        return Err(FactorError::NotSquarefree);
    }
    let mut prev: Option<usize> = None;
    let mut s = seed;
    loop {
        let mut rng = rng_for(s);
        let (emb, comps) = absolute::components(f, &mut rng)?;
        if prev == Some(comps.len()) || s >= seed + 4 {
            let l = emb.target.clone();
            let fl = emb.poly(f);
            let components = Factorization { unit: fl.lc(), factors: comps.into_iter().map(|c| (c, 1)).collect() };
            if components.expand(&l, f.nvars()) != fl {
                return Err(FactorError::Failed("components do not multiply back".into()));
            }
            return Ok(AbsFactorization { extension: l, embedding: emb, components, certified: false });
        }
        prev = Some(comps.len());
        s += 1;
    }
}
