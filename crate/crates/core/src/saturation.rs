//! Saturation verdicts for invariant rings and invariant fields, and the
//! constructive witnesses of non-saturation.
//!
//! A witness is an invariant `phi` together with a decomposition
//! `phi = H(psi)` where `psi` is closed but moved by some group element.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::closure::{self, ClosureError, Decomposition, Pencil, UniRat, VerifyFailure};
use crate::factor::{self, FactorError};
use crate::field::{Elem, FieldSpec};
use crate::group::{FiniteGroup, GroupElement};
use crate::poly::{Mono, Poly, PolyError, RatFunc, UPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SatError {
    #[error("group acts on {expected} variables, function has {got}")]
    Arity { expected: usize, got: usize },
    #[error("function and group are over different fields")]
    FieldMismatch,
    #[error("a matrix realization is required")]
    NotMatrix,
    #[error("a Moebius realization is required")]
    NotMoebius,
    #[error("expected a group in GL2, got GL{0}")]
    NotTwoDimensional(usize),
    #[error("span of the submodule is not invariant")]
    SpanNotInvariant,
    #[error("submodule polynomials are linearly dependent")]
    DegenerateSpan,
    #[error("every element acts by a scalar")]
    AllScalar,
    #[error("trivial group")]
    TrivialGroup,
    #[error("positive characteristic {0} is outside the criterion")]
    Characteristic(u64),
    #[error("witness check failed: {0}")]
    Witness(WitnessCheck),
    #[error("no outer function of degree {0} found")]
    NoOuter(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Saturated,
    NotSaturated,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Saturated => "saturated",
            Status::NotSaturated => "not_saturated",
            Status::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    OverK,
    OverAlgebraicClosure,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::OverK => "over_k",
            Scope::OverAlgebraicClosure => "over_algebraic_closure",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub scope: Scope,
    pub justification: Vec<String>,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn new(status: Status, scope: Scope, justification: Vec<String>) -> Verdict {
        Verdict { status, scope, justification, witness: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessCheck {
    Constant,
    NotInvariant,
    Decomposition(VerifyFailure),
    PsiInvariant,
}

impl fmt::Display for WitnessCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessCheck::Constant => f.write_str("phi is constant"),
            WitnessCheck::NotInvariant => f.write_str("phi is not invariant"),
            WitnessCheck::Decomposition(v) => write!(f, "decomposition fails ({v})"),
            WitnessCheck::PsiInvariant => f.write_str("psi is fixed by the recorded element"),
        }
    }
}

/// An invariant `phi = outer(p/q)` whose closed `p/q` is moved by `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub phi: RatFunc,
    pub pencil: Pencil,
    pub outer: UniRat,
    pub g: GroupElement,
}

impl Witness {
    /// Builds and validates.
    pub fn new(group: &FiniteGroup, phi: RatFunc, pencil: Pencil, outer: UniRat, g: GroupElement) -> Result<Witness, SatError> {
        let w = Witness { phi, pencil, outer, g };
        w.validate(group).map_err(SatError::Witness)?;
        Ok(w)
    }

    pub fn psi(&self) -> RatFunc {
        self.pencil.psi()
    }

    pub fn decomposition(&self) -> Decomposition {
        let od = self.outer.degree() as u32;
        Decomposition {
            pencil: self.pencil.clone(),
            outer: self.outer.clone(),
            inner_degree: self.pencil.degree(),
            outer_degree: od,
            closed: od == 1,
        }
    }

    /// The three construction checks.
    pub fn validate(&self, group: &FiniteGroup) -> Result<(), WitnessCheck> {
        if self.phi.is_constant() {
            return Err(WitnessCheck::Constant);
        }
        if !is_invariant(&self.phi, group).unwrap_or(false) {
            return Err(WitnessCheck::NotInvariant);
        }
        closure::verify_decomposition(&self.phi, &self.decomposition()).map_err(WitnessCheck::Decomposition)?;
        let psi = self.psi();
        match psi.substitute(&self.g.action()) {
            Ok(moved) if moved != psi => Ok(()),
            _ => Err(WitnessCheck::PsiInvariant),
        }
    }
}

fn check_compatible(f: &RatFunc, group: &FiniteGroup) -> Result<(), SatError> {
    if group.arity() != f.nvars() {
        return Err(SatError::Arity { expected: group.arity(), got: f.nvars() });
    }
    if let Some(k) = group.field() {
        if k != f.field() {
            return Err(SatError::FieldMismatch);
        }
    }
    Ok(())
}

/// `g . f = f` for every generator.
pub fn is_invariant(f: &RatFunc, group: &FiniteGroup) -> Result<bool, SatError> {
    check_compatible(f, group)?;
    for &i in group.cayley().generators() {
        if f.substitute(&group.element(i).action())? != *f {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Elementary symmetric functions of the orbit multiset `{g . psi}`.
///
/// With `g . psi = a_g / b_g`, `sigma_j = D_j / prod b_g` where `D_j` is the
/// degree-`j` elementary symmetric sum of the `a`'s, each product padded with
/// the remaining `b`'s. The recurrence for `D_0..D_J` costs `O(N J)`, so
/// only as many as needed are formed.
#[derive(Clone, Debug)]
pub struct Sigmas {
    orbit: Vec<RatFunc>,
    /// `D_0..D_J`; `D_0` is the common denominator.
    d: Vec<Poly>,
    first: usize,
}

/// `(num, den)` rescaled by one rational so all coefficients are coprime
/// integers; keeps the products below from growing denominators.
fn integral_pair(r: &RatFunc) -> (Poly, Poly) {
    let k = r.field();
    if k.characteristic() != 0 {
        return (r.num().clone(), r.den().clone());
    }
    let mut den = BigInt::one();
    let mut content = BigInt::zero();
    for (_, c) in r.num().terms().iter().chain(r.den().terms()) {
        for q in k.coeffs_of(c) {
            den = den.lcm(q.denom());
        }
    }
    for (_, c) in r.num().terms().iter().chain(r.den().terms()) {
        for q in k.coeffs_of(c) {
            content = content.gcd(&(q.numer() * (&den / q.denom())));
        }
    }
    let s = k.from_rational(&BigRational::new(den, content)).unwrap();
    (r.num().scale(&s), r.den().scale(&s))
}

fn elementary(orbit: &[RatFunc], depth: usize) -> Vec<Poly> {
    let (k, n) = (orbit[0].field().clone(), orbit[0].nvars());
    let mut d = vec![Poly::one(&k, n)];
    for (m, r) in orbit.iter().enumerate() {
        let (a, b) = integral_pair(r);
        let top = depth.min(m + 1);
        if d.len() <= top {
            d.push(Poly::zero(&k, n));
        }
        for j in (1..=top).rev() {
            d[j] = d[j].mul(&b).add(&d[j - 1].mul(&a));
        }
        d[0] = d[0].mul(&b);
    }
    d
}

impl Sigmas {
    fn from_orbit(orbit: Vec<RatFunc>) -> Option<Sigmas> {
        let len = orbit.len();
        if len == 0 {
            return None;
        }
        let mut depth = 1;
        loop {
            let d = elementary(&orbit, depth);
            let found = (1..d.len()).find(|&i| !d[i].is_zero() && !closure::proportional(&d[i], &d[0]));
            if let Some(first) = found {
                return Some(Sigmas { orbit, d, first });
            }
            if depth >= len {
                return None;
            }
            depth = (2 * depth).min(len);
        }
    }

    /// `N = |G|`.
    pub fn len(&self) -> usize {
        self.orbit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbit.is_empty()
    }

    /// Smallest `i` with `sigma_i` nonconstant.
    pub fn first_nonconstant(&self) -> usize {
        self.first
    }

    /// `sigma_i` for `1 <= i <= N`, normalized.
    pub fn get(&self, i: usize) -> RatFunc {
        assert!(i >= 1 && i <= self.len(), "sigma index out of range");
        if i < self.d.len() {
            return RatFunc::new(self.d[i].clone(), self.d[0].clone()).expect("nonzero denominator");
        }
        let d = elementary(&self.orbit, i);
        RatFunc::new(d[i].clone(), d[0].clone()).expect("nonzero denominator")
    }

    pub fn all(&self) -> Vec<RatFunc> {
        let d = elementary(&self.orbit, self.len());
        (1..d.len()).map(|i| RatFunc::new(d[i].clone(), d[0].clone()).unwrap()).collect()
    }
}

fn orbit_of(group: &FiniteGroup, psi: &RatFunc) -> Result<Vec<RatFunc>, SatError> {
    group.elements().iter().map(|g| Ok(psi.substitute(&g.action())?)).collect()
}

fn poly_action(p: &Poly, g: &GroupElement) -> Result<Poly, SatError> {
    let r = RatFunc::from_poly(p.clone()).substitute(&g.action())?;
    if !r.den().is_constant() {
        return Err(SatError::SpanNotInvariant);
    }
    Ok(r.num().scale(&p.field().inv(&r.den().lc()).unwrap()))
}

fn in_span(f: &Poly, p: &Poly, q: &Poly) -> bool {
    let k = f.field();
    let mut monos: Vec<Mono> = [f, p, q].iter().flat_map(|g| g.terms().iter().map(|(m, _)| m.clone())).collect();
    monos.sort();
    monos.dedup();
    let rows: Vec<Vec<Elem>> = [p, q, f].iter().map(|g| monos.iter().map(|m| g.coeff(m)).collect()).collect();
    crate::linalg::rref(k, &rows).1.len() == 2
}

/// Symmetric functions of `{g.p / g.q : g in G}` for an invariant plane `span{p, q}`.
pub fn sigma_invariants(group: &FiniteGroup, p: &Poly, q: &Poly) -> Result<Sigmas, SatError> {
    let psi = RatFunc::new(p.clone(), q.clone())?;
    check_compatible(&psi, group)?;
    if Pencil::from_span(p, q).is_none() {
        return Err(SatError::DegenerateSpan);
    }
    for &i in group.cayley().generators() {
        let g = group.element(i);
        for f in [p, q] {
            if !in_span(&poly_action(f, g)?, p, q) {
                return Err(SatError::SpanNotInvariant);
            }
        }
    }
    let orbit = orbit_of(group, &psi)?;
    if group.order() > 1 && orbit.iter().all(|r| *r == psi) {
        return Err(SatError::AllScalar);
    }
    let sig = Sigmas::from_orbit(orbit).ok_or(SatError::AllScalar)?;
    if !is_invariant(&sig.get(sig.first), group)? {
        return Err(SatError::Witness(WitnessCheck::NotInvariant));
    }
    Ok(sig)
}

/// First generator, then first element, moving `psi`.
fn moving_element(group: &FiniteGroup, psi: &RatFunc) -> Result<Option<GroupElement>, SatError> {
    let gens = group.cayley().generators().to_vec();
    for i in gens.into_iter().chain(0..group.order()) {
        let g = group.element(i);
        if psi.substitute(&g.action())? != *psi {
            return Ok(Some(g.clone()));
        }
    }
    Ok(None)
}

fn sigma_witness(group: &FiniteGroup, pencil: Pencil, sig: &Sigmas) -> Result<Witness, SatError> {
    let phi = sig.get(sig.first_nonconstant());
    let e = pencil.degree() as usize;
    let m = phi.degree() as usize / e.max(1);
    let outer = closure::solve_outer(&phi, &pencil, m).ok_or(SatError::NoOuter(m))?;
    let g = moving_element(group, &pencil.psi())?.ok_or(SatError::AllScalar)?;
    Witness::new(group, phi, pencil, outer, g)
}

/// Witness from the two-dimensional standard representation.
pub fn witness_plane(group: &FiniteGroup) -> Result<Witness, SatError> {
    if !group.is_matrix() {
        return Err(SatError::NotMatrix);
    }
    if group.arity() != 2 {
        return Err(SatError::NotTwoDimensional(group.arity()));
    }
    let k = group.field().unwrap();
    let (x1, x2) = (Poly::var(k, 2, 0), Poly::var(k, 2, 1));
    let sig = sigma_invariants(group, &x1, &x2)?;
    sigma_witness(group, Pencil::from_span(&x1, &x2).unwrap(), &sig)
}

/// Witness for a caller-supplied invariant plane `span{p, q}`.
pub fn witness_submodule(group: &FiniteGroup, p: &Poly, q: &Poly) -> Result<Witness, SatError> {
    let sig = sigma_invariants(group, p, q)?;
    sigma_witness(group, Pencil::from_span(p, q).unwrap(), &sig)
}

/// Witness for a group of Moebius transformations: `psi = x`.
pub fn witness_univariate(group: &FiniteGroup) -> Result<Witness, SatError> {
    if !matches!(group.element(0), GroupElement::Moebius(_)) {
        return Err(SatError::NotMoebius);
    }
    if group.order() < 2 {
        return Err(SatError::TrivialGroup);
    }
    let k = group.field().unwrap();
    let x = RatFunc::var(k, 1, 0);
    let sig = Sigmas::from_orbit(orbit_of(group, &x)?).ok_or(SatError::TrivialGroup)?;
    let pencil = Pencil::from_span(&Poly::var(k, 1, 0), &Poly::one(k, 1)).unwrap();
    sigma_witness(group, pencil, &sig)
}

/// Invariant ring saturation: no nontrivial character into `k^x`.
pub fn ring_saturated(group: &FiniteGroup) -> Result<Verdict, SatError> {
    let k = group.field().filter(|_| group.is_matrix()).ok_or(SatError::NotMatrix)?;
    let c = group.cayley();
    let ab = c.abelianization();
    let w = k.roots_of_unity_order();
    let count = c.characters_to_field(k);
    let mut just = vec![format!("abelianization {ab:?}"), format!("roots of unity in k: {w}")];
    if count == 1 {
        just.push("no nontrivial character to k^x".into());
        return Ok(Verdict::new(Status::Saturated, Scope::OverK, just));
    }
    let d = ab.iter().copied().find(|&d| num_integer::gcd(d, w) > 1).unwrap_or(1);
    just.push(format!("nontrivial character to k^x: divisor {d} shares the root of unity of order {} with k", num_integer::gcd(d, w)));
    Ok(Verdict::new(Status::NotSaturated, Scope::OverK, just))
}

fn char_zero(group: &FiniteGroup) -> Option<u64> {
    group.field().map(|k| k.characteristic()).filter(|&p| p != 0)
}

fn perfect_quotient_of_order(group: &FiniteGroup, order: usize) -> bool {
    let c = group.cayley();
    c.normal_subgroups().iter().any(|n| {
        n.order() * order == group.order() && c.quotient(n).map(|q| q.perfect).unwrap_or(false)
    })
}

/// Sufficient test valid for any realization.
pub fn field_saturated_sufficient(group: &FiniteGroup) -> Verdict {
    if let Some(p) = char_zero(group) {
        return Verdict::new(Status::Unknown, Scope::OverK, vec![format!("characteristic {p}: criterion needs characteristic zero")]);
    }
    let c = group.cayley();
    if !c.is_perfect() {
        return Verdict::new(Status::Unknown, Scope::OverK, vec![format!("not perfect: abelianization {:?}", c.abelianization())]);
    }
    if perfect_quotient_of_order(group, 60) {
        return Verdict::new(Status::Unknown, Scope::OverK, vec!["perfect".into(), "has a quotient isomorphic to A5".into()]);
    }
    Verdict::new(Status::Saturated, Scope::OverK, vec!["perfect".into(), "no quotient isomorphic to A5".into()])
}

#[derive(Clone, Copy, Debug)]
pub struct SatOptions {
    pub seed: u64,
    /// Degree bound for the relative-invariant search of the character route.
    pub max_degree: u32,
}

impl Default for SatOptions {
    fn default() -> Self {
        SatOptions { seed: 0, max_degree: 8 }
    }
}

/// Field saturation for a matrix group.
pub fn field_saturated(group: &FiniteGroup, submodule: Option<(&Poly, &Poly)>, opts: &SatOptions) -> Result<Verdict, SatError> {
    let k = group.field().filter(|_| group.is_matrix()).ok_or(SatError::NotMatrix)?.clone();
    let c = group.cayley();
    let perfect = c.is_perfect();
    let mut just = Vec::new();
    if char_zero(group).is_none() {
        if perfect {
            just.push("perfect".to_string());
            if !perfect_quotient_of_order(group, 120) {
                just.push("no perfect quotient of order 120".into());
                return Ok(Verdict::new(Status::Saturated, Scope::OverAlgebraicClosure, just));
            }
            just.push("perfect quotient of order 120".into());
        } else {
            just.push(format!("not perfect: abelianization {:?}", c.abelianization()));
        }
    } else {
        just.push(format!("characteristic {}: only constructive witnesses apply", k.characteristic()));
    }

    let mut witness = None;
    if c.characters_to_field(&k) > 1 {
        match character_witness(group, &k, opts) {
            Ok(w) => {
                just.push("nontrivial character to k^x; semi-invariant witness attached".into());
                witness = Some(w);
            }
            Err(e) => just.push(format!("character route failed: {e}")),
        }
    }
    if witness.is_none() && group.arity() == 2 {
        match witness_plane(group) {
            Ok(w) => {
                just.push("non-scalar action on the plane; orbit witness attached".into());
                witness = Some(w);
            }
            Err(e) => just.push(format!("plane route failed: {e}")),
        }
    }
    if witness.is_none() {
        if let Some((p, q)) = submodule {
            match witness_submodule(group, p, q) {
                Ok(w) => {
                    just.push("invariant submodule witness attached".into());
                    witness = Some(w);
                }
                Err(e) => just.push(format!("submodule route failed: {e}")),
            }
        }
    }
    let status = if witness.is_some() || char_zero(group).is_none() { Status::NotSaturated } else { Status::Unknown };
    Ok(Verdict { status, scope: Scope::OverAlgebraicClosure, justification: just, witness })
}

/// A primitive `r`-th root of unity in `k`, `r` prime.
fn root_of_unity(k: &FieldSpec, r: u64, seed: u64) -> Result<Option<Elem>, SatError> {
    if r == 2 {
        return Ok(if k.characteristic() == 2 { None } else { Some(k.neg(&k.one())) });
    }
    let mut coeffs = vec![k.zero(); r as usize + 1];
    coeffs[0] = k.neg(&k.one());
    coeffs[r as usize] = k.one();
    let fac = factor::factor_uni(&UPoly::new(k.clone(), coeffs), seed)?;
    Ok(fac.factors.iter().filter(|(f, _)| f.degree() == Some(1)).map(|(f, _)| k.neg(&k.div(&f.coeff(0), &f.lc()).unwrap())).find(|z| !k.is_one(z)))
}

/// Exponents `e(g)` of a character of prime order `r`, `chi(g) = zeta^e(g)`.
fn character_mod(group: &FiniteGroup, r: usize) -> Option<Vec<usize>> {
    let c = group.cayley();
    let gens = c.generators().to_vec();
    let total = r.checked_pow(gens.len() as u32)?;
    for code in 1..total {
        let mut e = Vec::with_capacity(gens.len());
        let mut x = code;
        for _ in &gens {
            e.push(x % r);
            x /= r;
        }
        let mut chi: Vec<Option<usize>> = vec![None; group.order()];
        chi[0] = Some(0);
        let mut stack = vec![0];
        let mut ok = true;
        while let (true, Some(a)) = (ok, stack.pop()) {
            for (j, &s) in gens.iter().enumerate() {
                let b = c.mul(a, s);
                let v = (chi[a].unwrap() + e[j]) % r;
                match chi[b] {
                    None => {
                        chi[b] = Some(v);
                        stack.push(b);
                    }
                    Some(u) if u != v => ok = false,
                    _ => {}
                }
            }
        }
        if ok {
            return Some(chi.into_iter().map(|v| v.unwrap()).collect());
        }
    }
    None
}

fn monomials(n: usize, d: u32) -> Vec<Mono> {
    fn rec(n: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Mono>) {
        if cur.len() + 1 == n {
            cur.push(d);
            out.push(Mono::new(cur.clone()));
            cur.pop();
            return;
        }
        for e in (0..=d).rev() {
            cur.push(e);
            rec(n, d - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::new(), &mut out);
    }
    out
}

/// A semi-invariant `f` with character of prime order `r`; `phi = f^r`.
fn character_witness(group: &FiniteGroup, k: &FieldSpec, opts: &SatOptions) -> Result<Witness, SatError> {
    let order = group.order() as u64;
    let w = k.roots_of_unity_order();
    let r = (2..=num_integer::gcd(order, w))
        .filter(|&r| crate::field::is_prime_u64(r) && num_integer::gcd(r, w) == r)
        .find(|&r| group.cayley().abelianization().iter().any(|d| d % r == 0))
        .ok_or(SatError::AllScalar)?;
    let zeta = root_of_unity(k, r, opts.seed)?.ok_or(SatError::AllScalar)?;
    let chi = character_mod(group, r as usize).ok_or(SatError::AllScalar)?;
    let zinv = k.inv(&zeta).unwrap();
    let n = group.arity();
    for d in 1..=opts.max_degree {
        for m in monomials(n, d) {
            let mono = Poly::monomial(k, m, k.one());
            let mut f = Poly::zero(k, n);
            for (i, g) in group.elements().iter().enumerate() {
                let c = k.pow(&zinv, chi[i] as u64);
                f = f.add(&poly_action(&mono, g)?.scale(&c));
            }
            if f.is_zero() {
                continue;
            }
            let phi = f.monic().pow(r as u32);
            let dec = closure::generative_poly(&phi, opts.seed)?;
            let g = moving_element(group, &dec.psi())?.ok_or(SatError::Witness(WitnessCheck::PsiInvariant))?;
            return Witness::new(group, RatFunc::from_poly(phi), dec.pencil, dec.outer, g);
        }
    }
    Err(SatError::NoOuter(opts.max_degree as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::expr::{parse_elem, parse_ratfunc};
    use crate::group::DEFAULT_CAP;

    fn mat(k: &FieldSpec, rows: &[&[&str]]) -> GroupElement {
        GroupElement::Matrix(rows.iter().map(|r| r.iter().map(|s| parse_elem(s, k).unwrap()).collect()).collect())
    }

    fn swap(k: &FieldSpec) -> FiniteGroup {
        FiniteGroup::closure(Some(k), &[mat(k, &[&["0", "1"], &["1", "0"]])], DEFAULT_CAP).unwrap()
    }

    fn sqrt3() -> FieldSpec {
        FieldSpec::parse("Q[w]/(w^2-3)").unwrap()
    }

    fn c3_rot() -> FiniteGroup {
        let k = sqrt3();
        FiniteGroup::closure(Some(&k), &[mat(&k, &[&["-1/2", "-w/2"], &["w/2", "-1/2"]])], DEFAULT_CAP).unwrap()
    }

    fn check_all(w: &Witness, g: &FiniteGroup) {
        assert_eq!(w.validate(g), Ok(()));
        for e in g.elements() {
            assert_eq!(w.phi.substitute(&e.action()).unwrap(), w.phi);
        }
    }

    #[test]
    fn invariance() {
        let q = FieldSpec::rationals();
        let g = swap(&q);
        assert!(is_invariant(&parse_ratfunc("(x1^2+x2^2)/(x1*x2)", &q, 2).unwrap(), &g).unwrap());
        assert!(!is_invariant(&parse_ratfunc("x1/x2", &q, 2).unwrap(), &g).unwrap());
        assert!(is_invariant(&parse_ratfunc("x1/x2", &q, 3).unwrap(), &g).is_err());
    }

    #[test]
    fn sigmas_of_swap() {
        let q = FieldSpec::rationals();
        let g = swap(&q);
        let (x1, x2) = (Poly::var(&q, 2, 0), Poly::var(&q, 2, 1));
        let s = sigma_invariants(&g, &x1, &x2).unwrap();
        assert_eq!(s.first_nonconstant(), 1);
        assert_eq!(s.get(1), parse_ratfunc("(x1^2+x2^2)/(x1*x2)", &q, 2).unwrap());
        assert_eq!(s.get(2), parse_ratfunc("1", &q, 2).unwrap());
    }

    #[test]
    fn sigmas_of_diagonal_c3() {
        let k = FieldSpec::parse("Q[w]/(w^2+w+1)").unwrap();
        let g = FiniteGroup::closure(Some(&k), &[mat(&k, &[&["w", "0"], &["0", "w^2"]])], DEFAULT_CAP).unwrap();
        let (x1, x2) = (Poly::var(&k, 2, 0), Poly::var(&k, 2, 1));
        let s = sigma_invariants(&g, &x1, &x2).unwrap();
        assert_eq!(s.first_nonconstant(), 3);
        assert!(s.get(1).is_zero() && s.get(2).is_zero());
        assert_eq!(s.get(3), parse_ratfunc("x1^3/x2^3", &k, 2).unwrap());
        for sig in s.all() {
            for e in g.elements() {
                assert_eq!(sig.substitute(&e.action()).unwrap(), sig);
            }
        }
    }

    #[test]
    fn sigma_errors() {
        let q = FieldSpec::rationals();
        let g = swap(&q);
        let (x1, x2) = (Poly::var(&q, 2, 0), Poly::var(&q, 2, 1));
        assert_eq!(sigma_invariants(&g, &x1, &x2.add(&x1.mul(&x2))).unwrap_err(), SatError::SpanNotInvariant);
        let scalar = FiniteGroup::closure(Some(&q), &[mat(&q, &[&["-1", "0"], &["0", "-1"]])], DEFAULT_CAP).unwrap();
        assert_eq!(sigma_invariants(&scalar, &x1, &x2).unwrap_err(), SatError::AllScalar);
        assert_eq!(witness_plane(&scalar).unwrap_err(), SatError::AllScalar);
        let trivial = FiniteGroup::closure(Some(&q), &[mat(&q, &[&["1", "0"], &["0", "1"]])], DEFAULT_CAP).unwrap();
        let s = sigma_invariants(&trivial, &x1, &x2).unwrap();
        assert_eq!(s.get(1), parse_ratfunc("x1/x2", &q, 2).unwrap());
    }

    #[test]
    fn plane_witness_swap_f2() {
        let k = FieldSpec::prime_field(2).unwrap();
        let g = swap(&k);
        let w = witness_plane(&g).unwrap();
        check_all(&w, &g);
        assert_eq!(w.phi, parse_ratfunc("(x1^2+x2^2)/(x1*x2)", &k, 2).unwrap());
        assert_eq!(w.outer.to_string(), "(t^2 + 1)/t");
        assert_eq!(w.g, g.element(g.cayley().generators()[0]).clone());
        assert_eq!(ring_saturated(&g).unwrap().status, Status::Saturated);
        let v = field_saturated(&g, None, &SatOptions::default()).unwrap();
        assert_eq!(v.status, Status::NotSaturated);
        check_all(v.witness.as_ref().unwrap(), &g);
    }

    #[test]
    fn rotation_over_sqrt3() {
        let g = c3_rot();
        assert_eq!(g.order(), 3);
        assert_eq!(ring_saturated(&g).unwrap().status, Status::Saturated);
        let v = field_saturated(&g, None, &SatOptions::default()).unwrap();
        assert_eq!(v.status, Status::NotSaturated);
        let w = v.witness.unwrap();
        check_all(&w, &g);
        assert_eq!(w.pencil.to_string(), "(x1, x2)");
    }

    #[test]
    fn sign_character_witness() {
        let q = FieldSpec::rationals();
        let g = FiniteGroup::closure(
            Some(&q),
            &[
                mat(&q, &[&["0", "1", "0"], &["1", "0", "0"], &["0", "0", "1"]]),
                mat(&q, &[&["0", "0", "1"], &["1", "0", "0"], &["0", "1", "0"]]),
            ],
            DEFAULT_CAP,
        )
        .unwrap();
        assert_eq!(ring_saturated(&g).unwrap().status, Status::NotSaturated);
        let v = field_saturated(&g, None, &SatOptions::default()).unwrap();
        assert_eq!(v.status, Status::NotSaturated);
        let w = v.witness.unwrap();
        check_all(&w, &g);
        let delta = parse_ratfunc("(x1-x2)*(x1-x3)*(x2-x3)", &q, 3).unwrap();
        assert!(closure::proportional(w.pencil.p(), delta.num()));
        assert!(closure::proportional(w.phi.num(), &delta.num().pow(2)));
    }

    #[test]
    fn scalar_line_not_ring_saturated() {
        let q = FieldSpec::rationals();
        let g = FiniteGroup::closure(Some(&q), &[mat(&q, &[&["-1"]])], DEFAULT_CAP).unwrap();
        let v = ring_saturated(&g).unwrap();
        assert_eq!(v.status, Status::NotSaturated);
        assert!(v.justification.iter().any(|s| s.contains("divisor 2")));
    }

    #[test]
    fn univariate_witnesses() {
        let q = FieldSpec::rationals();
        let m = |k: &FieldSpec, e: [&str; 4]| GroupElement::moebius(k, e.map(|s| parse_elem(s, k).unwrap()));
        let g = FiniteGroup::closure(Some(&q), &[m(&q, ["-1", "0", "0", "1"])], DEFAULT_CAP).unwrap();
        let w = witness_univariate(&g).unwrap();
        check_all(&w, &g);
        assert_eq!(w.phi, parse_ratfunc("-x1^2", &q, 1).unwrap());
        assert_eq!(w.psi(), parse_ratfunc("x1", &q, 1).unwrap());

        let k = FieldSpec::parse("Q[w]/(w^2+w+1)").unwrap();
        let g = FiniteGroup::closure(Some(&k), &[m(&k, ["w", "0", "0", "1"])], DEFAULT_CAP).unwrap();
        let w = witness_univariate(&g).unwrap();
        check_all(&w, &g);
        assert_eq!(w.phi, parse_ratfunc("x1^3", &k, 1).unwrap());

        let t = FiniteGroup::closure(Some(&q), &[m(&q, ["1", "0", "0", "1"])], DEFAULT_CAP).unwrap();
        assert_eq!(witness_univariate(&t).unwrap_err(), SatError::TrivialGroup);
    }

    #[test]
    fn abstract_sufficient() {
        let a5 = FiniteGroup::closure(None, &[GroupElement::Permutation(vec![1, 2, 0, 3, 4]), GroupElement::Permutation(vec![1, 2, 3, 4, 0])], DEFAULT_CAP).unwrap();
        assert_eq!(a5.order(), 60);
        assert_eq!(field_saturated_sufficient(&a5).status, Status::Unknown);
        let a6 = FiniteGroup::closure(None, &[GroupElement::Permutation(vec![1, 2, 0, 3, 4, 5]), GroupElement::Permutation(vec![0, 2, 3, 4, 5, 1])], DEFAULT_CAP).unwrap();
        assert_eq!(a6.order(), 360);
        assert_eq!(field_saturated_sufficient(&a6).status, Status::Saturated);
        let s3 = FiniteGroup::closure(None, &[GroupElement::Permutation(vec![1, 0, 2]), GroupElement::Permutation(vec![1, 2, 0])], DEFAULT_CAP).unwrap();
        assert_eq!(field_saturated_sufficient(&s3).status, Status::Unknown);
    }
}
