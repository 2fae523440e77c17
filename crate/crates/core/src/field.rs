//! Exact coefficient fields: the rationals, number fields `Q[w]/(m)` with an
//! irreducible modulus `m`, and prime fields `F_p`.
//!
//! A [`FieldSpec`] is a cheap handle (reference counted) that carries the
//! arithmetic; raw values are [`Elem`]s, which do not know their owner.
//! [`FieldElem`] pairs the two for the checked public API.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::factor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("reducible modulus {0}")]
    ReducibleModulus(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus must be a nonzero polynomial of positive degree")]
    DegenerateModulus,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Which of the three supported families a field belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    NumberField,
    PrimeField,
}

/// Raw field value. Number-field values are coefficient vectors in the power
/// basis `1, w, w^2, ...` with trailing zeros trimmed (so zero is empty).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Elem {
    Rat(BigRational),
    Alg(Vec<BigRational>),
    Mod(u64),
}

#[derive(Debug, PartialEq, Eq, Hash)]
enum Kind {
    Rationals,
    /// Monic modulus, low degree first.
    NumberField(Vec<BigRational>),
    PrimeField(u64),
}

#[derive(Debug)]
struct Inner {
    kind: Kind,
    /// Order of the group of roots of unity, computed on demand.
    mu_order: OnceLock<u64>,
}

#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.kind == other.inner.kind
    }
}
impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.kind.hash(state)
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl FieldSpec {
    fn from_kind(kind: Kind) -> Self {
        FieldSpec { inner: Arc::new(Inner { kind, mu_order: OnceLock::new() }) }
    }

    pub fn rationals() -> Self {
        Self::from_kind(Kind::Rationals)
    }

    /// `Q[w]/(modulus)`; coefficients are given low degree first. The modulus
    /// is made monic and must be irreducible over `Q`.
    pub fn number_field(modulus: &[BigRational]) -> Result<Self, FieldError> {
        let mut m: Vec<BigRational> = modulus.to_vec();
        while m.last().is_some_and(|c| c.is_zero()) {
            m.pop();
        }
        if m.len() < 2 {
            return Err(FieldError::DegenerateModulus);
        }
        let lc = m.last().unwrap().clone();
        for c in m.iter_mut() {
            *c = &*c / &lc;
        }
        if !factor::is_irreducible_over_q(&m) {
            return Err(FieldError::ReducibleModulus(fmt_upoly_q(&m, "w")));
        }
        Ok(Self::from_kind(Kind::NumberField(m)))
    }

    /// Like [`FieldSpec::number_field`] but skips the irreducibility proof.
    /// Only for moduli already known to be irreducible (e.g. minimal
    /// polynomials produced by the factorization engine).
    pub(crate) fn number_field_unchecked(monic: Vec<BigRational>) -> Self {
        Self::from_kind(Kind::NumberField(monic))
    }

    pub fn prime_field(p: u64) -> Result<Self, FieldError> {
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self::from_kind(Kind::PrimeField(p)))
    }

    pub fn kind(&self) -> FieldKind {
        match self.inner.kind {
            Kind::Rationals => FieldKind::Rationals,
            Kind::NumberField(_) => FieldKind::NumberField,
            Kind::PrimeField(_) => FieldKind::PrimeField,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self.inner.kind {
            Kind::PrimeField(p) => p,
            _ => 0,
        }
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> usize {
        match &self.inner.kind {
            Kind::NumberField(m) => m.len() - 1,
            _ => 1,
        }
    }

    /// Monic modulus of a number field, low degree first.
    pub fn modulus(&self) -> Option<&[BigRational]> {
        match &self.inner.kind {
            Kind::NumberField(m) => Some(m),
            _ => None,
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self.inner.kind {
            Kind::PrimeField(p) => Some(p),
            _ => None,
        }
    }

    /// Human readable description, also accepted by [`FieldSpec::parse`].
    pub fn describe(&self) -> String {
        match &self.inner.kind {
            Kind::Rationals => "Q".to_string(),
            Kind::NumberField(m) => format!("Q[w]/({})", fmt_upoly_q(m, "w")),
            Kind::PrimeField(p) => format!("GF({p})"),
        }
    }

    /// Parses `Q`, `GF(p)` / `Fp`, or `Q[w]/(poly in w)`.
    pub fn parse(desc: &str) -> Result<Self, FieldError> {
        let s: String = desc.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || FieldError::InvalidArgument(format!("unrecognized field description '{desc}'"));
        match s.as_str() {
            "Q" | "QQ" | "rationals" => return Ok(Self::rationals()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')) {
            let p: u64 = rest.parse().map_err(|_| bad())?;
            return Self::prime_field(p);
        }
        if let Some(rest) = s.strip_prefix('F') {
            if let Ok(p) = rest.parse::<u64>() {
                return Self::prime_field(p);
            }
        }
        let body = s
            .strip_prefix("Q[w]/(")
            .or_else(|| s.strip_prefix("QQ[w]/("))
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let coeffs = parse_upoly_q(body, 'w').ok_or_else(bad)?;
        Self::number_field(&coeffs)
    }

    pub fn zero(&self) -> Elem {
        match self.inner.kind {
            Kind::Rationals => Elem::Rat(BigRational::zero()),
            Kind::NumberField(_) => Elem::Alg(Vec::new()),
            Kind::PrimeField(_) => Elem::Mod(0),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match self.inner.kind {
            Kind::Rationals => Elem::Rat(BigRational::from_integer(n.clone())),
            Kind::NumberField(_) => {
                if n.is_zero() {
                    Elem::Alg(Vec::new())
                } else {
                    Elem::Alg(vec![BigRational::from_integer(n.clone())])
                }
            }
            Kind::PrimeField(p) => Elem::Mod(bigint_mod(n, p)),
        }
    }

    /// Image of a rational number; fails in `F_p` when `p` divides the denominator.
    pub fn from_rational(&self, q: &BigRational) -> Result<Elem, FieldError> {
        match self.inner.kind {
            Kind::Rationals => Ok(Elem::Rat(q.clone())),
            Kind::NumberField(_) => Ok(if q.is_zero() { Elem::Alg(vec![]) } else { Elem::Alg(vec![q.clone()]) }),
            Kind::PrimeField(p) => {
                let d = bigint_mod(q.denom(), p);
                if d == 0 {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Elem::Mod(mul_mod(bigint_mod(q.numer(), p), inv_mod(d, p).unwrap(), p)))
            }
        }
    }

    /// The class of `w` in a number field.
    pub fn generator(&self) -> Option<Elem> {
        match &self.inner.kind {
            Kind::NumberField(m) => Some(self.alg_from_coeffs(vec![BigRational::zero(), BigRational::one()].into_iter().take(m.len()).collect())),
            _ => None,
        }
    }

    /// Number-field element from power-basis coefficients (any length; reduced).
    pub fn alg_from_coeffs(&self, mut c: Vec<BigRational>) -> Elem {
        match &self.inner.kind {
            Kind::NumberField(m) => {
                reduce_mod_monic(&mut c, m);
                trim(&mut c);
                Elem::Alg(c)
            }
            Kind::Rationals => Elem::Rat(c.first().cloned().unwrap_or_else(BigRational::zero)),
            Kind::PrimeField(_) => panic!("alg_from_coeffs on a prime field"),
        }
    }

    /// Power-basis coefficients (length = degree, zero padded).
    pub fn coeffs_of(&self, a: &Elem) -> Vec<BigRational> {
        match a {
            Elem::Rat(q) => vec![q.clone()],
            Elem::Alg(v) => {
                let mut out = v.clone();
                out.resize(self.degree(), BigRational::zero());
                out
            }
            Elem::Mod(_) => panic!("coeffs_of on a prime field element"),
        }
    }

    /// Returns the value as a rational number when it lies in the prime field
    /// of a characteristic-zero field.
    pub fn to_rational(&self, a: &Elem) -> Option<BigRational> {
        match a {
            Elem::Rat(q) => Some(q.clone()),
            Elem::Alg(v) => match v.len() {
                0 => Some(BigRational::zero()),
                1 => Some(v[0].clone()),
                _ => None,
            },
            Elem::Mod(_) => None,
        }
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Rat(q) => q.is_zero(),
            Elem::Alg(v) => v.is_empty(),
            Elem::Mod(x) => *x == 0,
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        match a {
            Elem::Rat(q) => q.is_one(),
            Elem::Alg(v) => v.len() == 1 && v[0].is_one(),
            Elem::Mod(x) => *x == 1,
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            (Elem::Alg(x), Elem::Alg(y)) => {
                let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
                let mut out = long.clone();
                for (o, s) in out.iter_mut().zip(short) {
                    *o += s;
                }
                trim(&mut out);
                Elem::Alg(out)
            }
            (Elem::Mod(x), Elem::Mod(y)) => {
                let p = self.prime().unwrap();
                Elem::Mod(add_mod(*x, *y, p))
            }
            _ => panic!("mixed element representations"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match a {
            Elem::Rat(x) => Elem::Rat(-x),
            Elem::Alg(v) => Elem::Alg(v.iter().map(|c| -c).collect()),
            Elem::Mod(x) => {
                let p = self.prime().unwrap();
                Elem::Mod(if *x == 0 { 0 } else { p - x })
            }
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x - y),
            (Elem::Mod(x), Elem::Mod(y)) => {
                let p = self.prime().unwrap();
                Elem::Mod(add_mod(*x, p - y % p, p))
            }
            _ => self.add(a, &self.neg(b)),
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            (Elem::Alg(x), Elem::Alg(y)) => {
                if x.is_empty() || y.is_empty() {
                    return Elem::Alg(Vec::new());
                }
                if x.len() == 1 {
                    return Elem::Alg(y.iter().map(|c| c * &x[0]).collect());
                }
                if y.len() == 1 {
                    return Elem::Alg(x.iter().map(|c| c * &y[0]).collect());
                }
                let m = self.modulus().unwrap();
                if m.iter().all(|c| c.is_integer()) {
                    let mut c = mul_alg_integral(x, y, m);
                    trim(&mut c);
                    return Elem::Alg(c);
                }
                let mut out = vec![BigRational::zero(); x.len() + y.len() - 1];
                for (i, xi) in x.iter().enumerate() {
                    if xi.is_zero() {
                        continue;
                    }
                    for (j, yj) in y.iter().enumerate() {
                        if !yj.is_zero() {
                            out[i + j] += xi * yj;
                        }
                    }
                }
                self.alg_from_coeffs(out)
            }
            (Elem::Mod(x), Elem::Mod(y)) => Elem::Mod(mul_mod(*x, *y, self.prime().unwrap())),
            _ => panic!("mixed element representations"),
        }
    }

    pub fn inv(&self, a: &Elem) -> Option<Elem> {
        if self.is_zero(a) {
            return None;
        }
        Some(match a {
            Elem::Rat(x) => Elem::Rat(x.recip()),
            Elem::Alg(v) => {
                let m = self.modulus().unwrap();
                Elem::Alg(inv_mod_poly_q(v, m))
            }
            Elem::Mod(x) => Elem::Mod(inv_mod(*x, self.prime().unwrap()).unwrap()),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) if !y.is_zero() => Some(Elem::Rat(x / y)),
            (Elem::Alg(x), Elem::Alg(y)) if y.len() == 1 => Some(Elem::Alg(x.iter().map(|c| c / &y[0]).collect())),
            _ => self.inv(b).map(|bi| self.mul(a, &bi)),
        }
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Element with small-height coordinates, used for seeded sampling.
    pub fn random_small<R: Rng + ?Sized>(&self, rng: &mut R, height: i64) -> Elem {
        match &self.inner.kind {
            Kind::Rationals => Elem::Rat(rat(rng.gen_range(-height..=height))),
            Kind::NumberField(m) => {
                let n = m.len() - 1;
                // mostly rational samples; occasionally mix in w
                let c: Vec<BigRational> = (0..n)
                    .map(|i| if i == 0 || rng.gen_bool(0.25) { rat(rng.gen_range(-height..=height)) } else { BigRational::zero() })
                    .collect();
                self.alg_from_coeffs(c)
            }
            Kind::PrimeField(p) => {
                let h = (height.max(1) as u64).min(*p - 1);
                let v = rng.gen_range(0..=2 * h) as i64 - h as i64;
                self.from_i64(v)
            }
        }
    }

    /// Formats with `w` for the number-field generator.
    pub fn fmt_elem(&self, a: &Elem) -> String {
        match a {
            Elem::Rat(q) => fmt_rational(q),
            Elem::Alg(v) => fmt_upoly_q(v, "w"),
            Elem::Mod(x) => x.to_string(),
        }
    }

    /// True when the printed form has several terms and needs parentheses
    /// as a product factor.
    pub fn is_compound(&self, a: &Elem) -> bool {
        match a {
            Elem::Alg(v) => v.iter().filter(|c| !c.is_zero()).count() > 1,
            _ => false,
        }
    }

    /// Sign used to print `a - b` rather than `a + -b`: true for elements whose
    /// canonical print starts with a minus sign.
    pub fn is_negative_print(&self, a: &Elem) -> bool {
        match a {
            Elem::Rat(q) => q.is_negative(),
            Elem::Alg(v) => {
                let mut nz = v.iter().filter(|c| !c.is_zero());
                matches!((nz.next(), nz.next()), (Some(c), None) if c.is_negative())
            }
            Elem::Mod(_) => false,
        }
    }

    /// Order of the (cyclic) group of roots of unity in this field.
    pub fn roots_of_unity_order(&self) -> u64 {
        *self.inner.mu_order.get_or_init(|| match &self.inner.kind {
            Kind::Rationals => 2,
            Kind::PrimeField(p) => p - 1,
            Kind::NumberField(_) => {
                let n = self.degree() as u64;
                let mut w = 1u64;
                for l in primes_up_to(n + 1) {
                    // largest l^a with phi(l^a) | n and a primitive l^a-th root present
                    let mut best = 1u64;
                    let mut q = l;
                    loop {
                        let phi = q / l * (l - 1);
                        if n % phi != 0 {
                            break;
                        }
                        if cyclotomic_has_root(self, q) {
                            best = q;
                        } else {
                            break;
                        }
                        q *= l;
                    }
                    w *= best;
                }
                w
            }
        })
    }
}

/// True iff `k` contains a primitive `m`-th root of unity.
pub fn roots_of_unity_present(k: &FieldSpec, m: u64) -> Result<bool, FieldError> {
    if m < 2 {
        return Err(FieldError::InvalidArgument(format!("root-of-unity order must be at least 2, got {m}")));
    }
    Ok(match k.kind() {
        FieldKind::PrimeField => {
            let p = k.characteristic();
            (p - 1) % m == 0
        }
        FieldKind::Rationals => m == 2,
        FieldKind::NumberField => {
            // Q(zeta_m) inside k forces phi(m) | [k:Q]
            if (k.degree() as u64) % euler_phi(m) != 0 {
                false
            } else {
                cyclotomic_has_root(k, m)
            }
        }
    })
}

fn cyclotomic_has_root(k: &FieldSpec, m: u64) -> bool {
    if m <= 2 {
        return true;
    }
    let phi = cyclotomic_poly(m);
    let coeffs: Vec<Elem> = phi.iter().map(|c| k.from_bigint(c)).collect();
    let f = crate::poly::UPoly::new(k.clone(), coeffs);
    match factor::factor_uni(&f, 0) {
        Ok(fac) => fac.factors.iter().any(|(g, _)| g.degree() == Some(1)),
        Err(_) => false,
    }
}

/// Integer coefficients of the `m`-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_poly(m: u64) -> Vec<BigInt> {
    // x^m - 1 divided by Phi_d for proper divisors d
    let mut num: Vec<BigInt> = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            let den = cyclotomic_poly(d);
            num = exact_div_monic_z(&num, &den);
        }
    }
    num
}

fn exact_div_monic_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return vec![BigInt::zero()];
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    q
}

pub fn euler_phi(mut m: u64) -> u64 {
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&x| is_prime_u64(x)).collect()
}

/// A field value together with its owner; arithmetic is checked.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    pub field: FieldSpec,
    pub value: Elem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElem {
    pub fn new(field: FieldSpec, value: Elem) -> Self {
        FieldElem { field, value }
    }

    pub fn arith(&self, other: &FieldElem, op: ArithOp) -> Result<FieldElem, FieldError> {
        if self.field != other.field {
            return Err(FieldError::MixedFields);
        }
        let k = &self.field;
        let value = match op {
            ArithOp::Add => k.add(&self.value, &other.value),
            ArithOp::Sub => k.sub(&self.value, &other.value),
            ArithOp::Mul => k.mul(&self.value, &other.value),
            ArithOp::Div => k.div(&self.value, &other.value).ok_or(FieldError::DivisionByZero)?,
        };
        Ok(FieldElem { field: k.clone(), value })
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero(&self.value)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.fmt_elem(&self.value))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.fmt_elem(&self.value))
    }
}

// ---------------------------------------------------------------------------
// helpers: rationals, dense Q[t], word-size modular arithmetic

pub(crate) fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Formats a dense polynomial (low degree first) in the given variable.
pub(crate) fn fmt_upoly_q(c: &[BigRational], var: &str) -> String {
    let mut out = String::new();
    for (i, a) in c.iter().enumerate().rev() {
        if a.is_zero() {
            continue;
        }
        let neg = a.is_negative();
        let mag = a.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if mono.is_empty() {
            out.push_str(&fmt_rational(&mag));
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&fmt_rational(&mag));
            out.push('*');
            out.push_str(&mono);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Minimal parser for the modulus of a field description: sums of terms
/// `c*w^k` with rational `c`. The full expression grammar lives in `cli`.
fn parse_upoly_q(s: &str, var: char) -> Option<Vec<BigRational>> {
    let p = crate::cli::expr::parse_univariate(s, var).ok()?;
    Some(p)
}

fn trim(c: &mut Vec<BigRational>) {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
}

/// Product modulo an integral monic `m`, over a common denominator.
fn mul_alg_integral(x: &[BigRational], y: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    let common = |v: &[BigRational]| v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let (dx, dy) = (common(x), common(y));
    let scaled = |v: &[BigRational], d: &BigInt| -> Vec<BigInt> { v.iter().map(|c| c.numer() * (d / c.denom())).collect() };
    let (xi, yi) = (scaled(x, &dx), scaled(y, &dy));
    let mut out = vec![BigInt::zero(); xi.len() + yi.len() - 1];
    for (i, a) in xi.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in yi.iter().enumerate() {
            if !b.is_zero() {
                out[i + j] += a * b;
            }
        }
    }
    let n = m.len() - 1;
    let mi: Vec<BigInt> = m.iter().map(|c| c.numer().clone()).collect();
    while out.len() > n {
        let top = out.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = out.len() - n;
        for (j, mj) in mi.iter().take(n).enumerate() {
            if !mj.is_zero() {
                out[shift + j] -= &top * mj;
            }
        }
    }
    let den = dx * dy;
    out.into_iter().map(|c| BigRational::new(c, den.clone())).collect()
}

fn reduce_mod_monic(c: &mut Vec<BigRational>, m: &[BigRational]) {
    let n = m.len() - 1;
    while c.len() > n {
        let top = c.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = c.len() - n;
        for (j, mj) in m.iter().take(n).enumerate() {
            c[shift + j] -= &top * mj;
        }
    }
}

pub(crate) fn qpoly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Division with remainder in Q[t]; `b` nonzero.
pub(crate) fn qpoly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lc = &b[db];
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / lc;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

/// Inverse of a nonzero residue modulo an irreducible monic `m`.
fn inv_mod_poly_q(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    // extended Euclid: track s with s*a = r (mod m)
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    let mut s0: Vec<BigRational> = Vec::new();
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while r1.len() > 1 {
        let (q, r) = qpoly_divrem(&r0, &r1);
        let qs = qpoly_mul(&q, &s1);
        let mut s2 = s0.clone();
        if s2.len() < qs.len() {
            s2.resize(qs.len(), BigRational::zero());
        }
        for (x, y) in s2.iter_mut().zip(&qs) {
            *x -= y;
        }
        trim(&mut s2);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    let c = r1[0].clone();
    let mut out: Vec<BigRational> = s1.iter().map(|x| x / &c).collect();
    reduce_mod_monic(&mut out, m);
    trim(&mut out);
    out
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let (s, o) = a.overflowing_add(b);
    if o || s >= p {
        s.wrapping_sub(p)
    } else {
        s
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd_i128(a as i128, p as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(p as i128) as u64)
}

fn ext_gcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

pub(crate) fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt3() -> FieldSpec {
        FieldSpec::number_field(&[q(-3, 1), q(0, 1), q(1, 1)]).unwrap()
    }

    #[test]
    fn create_fields() {
        assert_eq!(FieldSpec::rationals().characteristic(), 0);
        let k = sqrt3();
        assert_eq!(k.degree(), 2);
        assert_eq!(k.characteristic(), 0);
        assert!(matches!(
            FieldSpec::number_field(&[q(-1, 1), q(0, 1), q(1, 1)]),
            Err(FieldError::ReducibleModulus(_))
        ));
        assert_eq!(FieldSpec::number_field(&[q(0, 1)]), Err(FieldError::DegenerateModulus));
        assert_eq!(FieldSpec::prime_field(2).unwrap().characteristic(), 2);
        assert_eq!(FieldSpec::prime_field(9), Err(FieldError::NotPrime(9)));
    }

    #[test]
    fn element_arithmetic() {
        let qq = FieldSpec::rationals();
        let a = FieldElem::new(qq.clone(), qq.from_rational(&q(1, 2)).unwrap());
        let b = FieldElem::new(qq.clone(), qq.from_rational(&q(1, 3)).unwrap());
        assert_eq!(a.arith(&b, ArithOp::Add).unwrap().value, Elem::Rat(q(5, 6)));

        let k = sqrt3();
        let w = FieldElem::new(k.clone(), k.generator().unwrap());
        assert_eq!(w.arith(&w, ArithOp::Mul).unwrap().value, k.from_i64(3));

        let f2 = FieldSpec::prime_field(2).unwrap();
        let one = FieldElem::new(f2.clone(), f2.one());
        assert!(one.arith(&one, ArithOp::Add).unwrap().is_zero());

        assert_eq!(a.arith(&w, ArithOp::Add), Err(FieldError::MixedFields));
        let zero = FieldElem::new(qq.clone(), qq.zero());
        assert_eq!(a.arith(&zero, ArithOp::Div), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn number_field_inverse() {
        let k = sqrt3();
        let w = k.generator().unwrap();
        let x = k.add(&w, &k.from_i64(2)); // 2 + w, norm 1
        let xi = k.inv(&x).unwrap();
        assert!(k.is_one(&k.mul(&x, &xi)));
        assert_eq!(k.fmt_elem(&xi), "-w + 2");
    }

    #[test]
    fn roots_of_unity_examples() {
        let qq = FieldSpec::rationals();
        assert!(roots_of_unity_present(&qq, 2).unwrap());
        assert!(!roots_of_unity_present(&qq, 3).unwrap());
        let z3 = FieldSpec::number_field(&[q(1, 1), q(1, 1), q(1, 1)]).unwrap();
        assert!(roots_of_unity_present(&z3, 3).unwrap());
        assert!(roots_of_unity_present(&z3, 6).unwrap());
        assert!(!roots_of_unity_present(&z3, 4).unwrap());
        assert!(!roots_of_unity_present(&sqrt3(), 3).unwrap());
        assert!(roots_of_unity_present(&FieldSpec::prime_field(7).unwrap(), 3).unwrap());
        assert!(!roots_of_unity_present(&FieldSpec::prime_field(2).unwrap(), 2).unwrap());
        assert!(roots_of_unity_present(&qq, 1).is_err());
        assert_eq!(z3.roots_of_unity_order(), 6);
        assert_eq!(sqrt3().roots_of_unity_order(), 2);
    }

    #[test]
    fn roots_of_unity_match_order_enumeration() {
        for p in (2..=97u64).filter(|&p| is_prime_u64(p)) {
            let k = FieldSpec::prime_field(p).unwrap();
            // brute force: collect multiplicative orders of all units
            let mut orders = std::collections::HashSet::new();
            for a in 1..p {
                let mut x = a;
                let mut ord = 1;
                while x != 1 {
                    x = x * a % p;
                    ord += 1;
                }
                orders.insert(ord);
            }
            for m in 2..=50u64 {
                assert_eq!(roots_of_unity_present(&k, m).unwrap(), orders.contains(&m), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn cyclotomic_polys() {
        let c: Vec<i64> = cyclotomic_poly(6).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(c, vec![1, -1, 1]);
        let c: Vec<i64> = cyclotomic_poly(5).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(c, vec![1, 1, 1, 1, 1]);
        assert_eq!(euler_phi(15), 8);
    }

    #[test]
    fn parse_descriptions() {
        assert_eq!(FieldSpec::parse("Q").unwrap(), FieldSpec::rationals());
        assert_eq!(FieldSpec::parse("GF(7)").unwrap().characteristic(), 7);
        assert_eq!(FieldSpec::parse("F2").unwrap().characteristic(), 2);
        let k = FieldSpec::parse("Q[w]/(w^2 - 3)").unwrap();
        assert_eq!(k, sqrt3());
        assert_eq!(FieldSpec::parse(&k.describe()).unwrap(), k);
    }

    use proptest::prelude::*;

    fn small_alg() -> impl Strategy<Value = Vec<(i64, i64)>> {
        proptest::collection::vec((-20i64..20, 1i64..6), 3)
    }

    proptest! {
        #[test]
        fn field_axioms_number_field(a in small_alg(), b in small_alg(), c in small_alg()) {
            // Q(zeta_9): degree 6
            let k = FieldSpec::number_field(&[q(1,1), q(0,1), q(0,1), q(1,1), q(0,1), q(0,1), q(1,1)]).unwrap();
            let mk = |v: &Vec<(i64,i64)>| k.alg_from_coeffs(v.iter().map(|&(n,d)| q(n,d)).collect());
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
            prop_assert_eq!(k.mul(&a, &b), k.mul(&b, &a));
            prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            if !k.is_zero(&b) {
                prop_assert_eq!(k.mul(&k.div(&a, &b).unwrap(), &b), a);
            }
        }

        #[test]
        fn field_axioms_prime_field(a in 0u64..101, b in 0u64..101, c in 0u64..101) {
            let k = FieldSpec::prime_field(101).unwrap();
            let (a, b, c) = (Elem::Mod(a), Elem::Mod(b), Elem::Mod(c));
            prop_assert_eq!(k.add(&k.add(&a, &b), &c), k.add(&a, &k.add(&b, &c)));
            prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            if !k.is_zero(&b) {
                prop_assert_eq!(k.mul(&k.div(&a, &b).unwrap(), &b), a);
            }
        }
    }
}
