//! Sparse multivariate polynomials and normalized rational functions.
//!
//! Terms are kept sorted in graded-lexicographic order with
//! `x1 > x2 > ... > xn`, largest first, and no zero coefficients.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::field::{Elem, FieldSpec};

pub mod fpoly;
mod gcd;
mod modgcd;
mod ratfunc;
mod upoly;

pub use gcd::{content_in, gcd, gcd_many};
pub use ratfunc::{wedge_vanishes, Action, RatFunc};
pub use upoly::UPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("arity mismatch: expected {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("division by the zero function")]
    DivisionByZero,
    #[error("singular matrix")]
    SingularMatrix,
}

/// Exponent vector with cached total degree; `Ord` is graded-lex.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    deg: u32,
    exps: Vec<u32>,
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mono {
    pub fn new(exps: Vec<u32>) -> Self {
        Mono { deg: exps.iter().sum(), exps }
    }

    pub fn one(n: usize) -> Self {
        Mono { deg: 0, exps: vec![0; n] }
    }

    pub fn var(n: usize, i: usize, e: u32) -> Self {
        let mut exps = vec![0; n];
        exps[i] = e;
        Mono { deg: e, exps }
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        Mono { deg: self.deg + o.deg, exps: self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect() }
    }

    pub fn divides(&self, o: &Mono) -> bool {
        self.exps.iter().zip(&o.exps).all(|(a, b)| a <= b)
    }

    /// `o / self`; caller guarantees divisibility.
    pub fn div_of(&self, o: &Mono) -> Mono {
        Mono { deg: o.deg - self.deg, exps: self.exps.iter().zip(&o.exps).map(|(a, b)| b - a).collect() }
    }

    pub fn gcd(&self, o: &Mono) -> Mono {
        Mono::new(self.exps.iter().zip(&o.exps).map(|(a, b)| *a.min(b)).collect())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: FieldSpec,
    nvars: usize,
    terms: Vec<(Mono, Elem)>,
}

impl Poly {
    pub fn zero(field: &FieldSpec, nvars: usize) -> Self {
        Poly { field: field.clone(), nvars, terms: Vec::new() }
    }

    pub fn constant(field: &FieldSpec, nvars: usize, c: Elem) -> Self {
        if field.is_zero(&c) {
            return Self::zero(field, nvars);
        }
        Poly { field: field.clone(), nvars, terms: vec![(Mono::one(nvars), c)] }
    }

    pub fn one(field: &FieldSpec, nvars: usize) -> Self {
        Self::constant(field, nvars, field.one())
    }

    /// The variable `x_{i+1}` (zero-based index).
    pub fn var(field: &FieldSpec, nvars: usize, i: usize) -> Self {
        Poly { field: field.clone(), nvars, terms: vec![(Mono::var(nvars, i, 1), field.one())] }
    }

    pub fn monomial(field: &FieldSpec, m: Mono, c: Elem) -> Self {
        let nvars = m.exps.len();
        if field.is_zero(&c) {
            return Self::zero(field, nvars);
        }
        Poly { field: field.clone(), nvars, terms: vec![(m, c)] }
    }

    /// Builds from arbitrary terms: combines duplicates, drops zeros, sorts.
    pub fn from_terms(field: &FieldSpec, nvars: usize, terms: impl IntoIterator<Item = (Mono, Elem)>) -> Self {
        let mut map: HashMap<Mono, Elem> = HashMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.exps.len(), nvars);
            match map.get_mut(&m) {
                Some(v) => *v = field.add(v, &c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        Self::from_map(field, nvars, map)
    }

    fn from_map(field: &FieldSpec, nvars: usize, map: HashMap<Mono, Elem>) -> Self {
        let mut terms: Vec<(Mono, Elem)> = map.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { field: field.clone(), nvars, terms }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Mono, Elem)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.deg == 0)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.deg == 0 && self.field.is_one(&self.terms[0].1)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|t| t.0.deg)
    }

    pub fn degree_in(&self, v: usize) -> Option<u32> {
        self.terms.iter().map(|t| t.0.exps[v]).max()
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.iter().any(|t| t.0.exps[v] > 0)
    }

    pub fn vars_used(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.uses_var(v)).collect()
    }

    pub fn leading_term(&self) -> Option<&(Mono, Elem)> {
        self.terms.first()
    }

    /// Graded-lex leading coefficient (zero for the zero polynomial).
    pub fn lc(&self) -> Elem {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> Elem {
        match self.terms.last() {
            Some((m, c)) if m.deg == 0 => c.clone(),
            _ => self.field.zero(),
        }
    }

    pub fn coeff(&self, m: &Mono) -> Elem {
        match self.terms.binary_search_by(|t| m.cmp(&t.0)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0.deg == w[1].0.deg)
    }

    fn check(&self, o: &Poly) {
        assert!(self.field == o.field, "mixed fields");
        assert_eq!(self.nvars, o.nvars, "arity mismatch");
    }

    pub fn try_compatible(&self, o: &Poly) -> Result<(), PolyError> {
        if self.field != o.field {
            return Err(PolyError::MixedFields);
        }
        if self.nvars != o.nvars {
            return Err(PolyError::ArityMismatch { expected: self.nvars, got: o.nvars });
        }
        Ok(())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.check(o);
        let k = &self.field;
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < o.terms.len() {
            match self.terms[i].0.cmp(&o.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(o.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = k.add(&self.terms[i].1, &o.terms[j].1);
                    if !k.is_zero(&c) {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&o.terms[j..]);
        Poly { field: k.clone(), nvars: self.nvars, terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Elem) -> Poly {
        if self.field.is_zero(c) {
            return Poly::zero(&self.field, self.nvars);
        }
        if self.field.is_one(c) {
            return self.clone();
        }
        Poly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), self.field.mul(x, c))).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono, c: &Elem) -> Poly {
        if self.field.is_zero(c) {
            return Poly::zero(&self.field, self.nvars);
        }
        Poly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, x)| (t.mul(m), self.field.mul(x, c))).collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        self.check(o);
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field, self.nvars);
        }
        if o.terms.len() == 1 {
            return self.mul_mono(&o.terms[0].0, &o.terms[0].1);
        }
        if self.terms.len() == 1 {
            return o.mul_mono(&self.terms[0].0, &self.terms[0].1);
        }
        let k = &self.field;
        let mut map: HashMap<Mono, Elem> = HashMap::with_capacity(self.terms.len() * o.terms.len() / 2 + 1);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.mul(m2);
                let c = k.mul(c1, c2);
                match map.get_mut(&m) {
                    Some(v) => *v = k.add(v, &c),
                    None => {
                        map.insert(m, c);
                    }
                }
            }
        }
        Poly::from_map(k, self.nvars, map)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field, self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Scales so the graded-lex leading coefficient is one (zero stays zero).
    pub fn monic(&self) -> Poly {
        match self.terms.first() {
            None => self.clone(),
            Some((_, c)) => self.scale(&self.field.inv(c).unwrap()),
        }
    }

    /// Exact quotient by `d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        self.check(d);
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(self.clone());
        }
        let k = &self.field;
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let inv = k.inv(dc).unwrap();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !dm.divides(m) {
                    return None;
                }
                terms.push((dm.div_of(m), k.mul(c, &inv)));
            }
            return Some(Poly { field: k.clone(), nvars: self.nvars, terms });
        }
        let (ldm, ldc) = &d.terms[0];
        let inv = k.inv(ldc).unwrap();
        let mut rem: std::collections::BTreeMap<Mono, Elem> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        let bound = self.degree().unwrap();
        while let Some((m, c)) = rem.pop_last() {
            if !ldm.divides(&m) {
                return None;
            }
            let qm = ldm.div_of(&m);
            let qc = k.mul(&c, &inv);
            for (tm, tc) in d.terms.iter().skip(1) {
                let nm = tm.mul(&qm);
                if nm.deg > bound {
                    return None;
                }
                let delta = k.mul(tc, &qc);
                match rem.get_mut(&nm) {
                    Some(v) => {
                        *v = k.sub(v, &delta);
                        if k.is_zero(v) {
                            rem.remove(&nm);
                        }
                    }
                    None => {
                        rem.insert(nm, k.neg(&delta));
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly { field: k.clone(), nvars: self.nvars, terms: quot })
    }

    pub fn divides(&self, f: &Poly) -> bool {
        f.div_exact(self).is_some()
    }

    pub fn derivative(&self, v: usize) -> Poly {
        let k = &self.field;
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exps[v] > 0)
            .map(|(m, c)| {
                let e = m.exps[v];
                let mut exps = m.exps.clone();
                exps[v] -= 1;
                (Mono::new(exps), k.mul(c, &k.from_i64(e as i64)))
            })
            .filter(|(_, c)| !k.is_zero(c));
        Poly::from_terms(k, self.nvars, terms)
    }

    /// Formal partial derivatives with respect to every variable.
    pub fn partials(&self) -> Vec<Poly> {
        (0..self.nvars).map(|v| self.derivative(v)).collect()
    }

    pub fn eval(&self, point: &[Elem]) -> Elem {
        let k = &self.field;
        let maxdeg: Vec<u32> = (0..self.nvars).map(|v| self.degree_in(v).unwrap_or(0)).collect();
        let powers: Vec<Vec<Elem>> = point
            .iter()
            .zip(&maxdeg)
            .map(|(x, &d)| {
                let mut pw = vec![k.one()];
                for i in 0..d as usize {
                    pw.push(k.mul(&pw[i], x));
                }
                pw
            })
            .collect();
        let mut acc = k.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    t = k.mul(&t, &powers[v][e as usize]);
                }
            }
            acc = k.add(&acc, &t);
        }
        acc
    }

    /// Coefficients as a polynomial in `x_v`: entry `i` multiplies `x_v^i`
    /// (entries do not involve `x_v`).
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v).unwrap_or(0) as usize;
        let mut buckets: Vec<Vec<(Mono, Elem)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exps[v] as usize;
            let mut exps = m.exps.clone();
            exps[v] = 0;
            buckets[e].push((Mono::new(exps), c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut t| {
                t.sort_by(|a, b| b.0.cmp(&a.0));
                Poly { field: self.field.clone(), nvars: self.nvars, terms: t }
            })
            .collect()
    }

    /// Inverse of [`Poly::coeffs_in`].
    pub fn from_coeffs_in(field: &FieldSpec, nvars: usize, v: usize, coeffs: &[Poly]) -> Poly {
        let terms = coeffs.iter().enumerate().flat_map(|(i, c)| {
            c.terms.iter().map(move |(m, x)| {
                let mut exps = m.exps.clone();
                exps[v] += i as u32;
                (Mono::new(exps), x.clone())
            })
        });
        Poly::from_terms(field, nvars, terms)
    }

    /// Leading coefficient with respect to `x_v` (a polynomial free of `x_v`).
    pub fn lc_in(&self, v: usize) -> Poly {
        let d = self.degree_in(v).unwrap_or(0);
        let terms: Vec<(Mono, Elem)> = self
            .terms
            .iter()
            .filter(|(m, _)| m.exps[v] == d)
            .map(|(m, c)| {
                let mut exps = m.exps.clone();
                exps[v] = 0;
                (Mono::new(exps), c.clone())
            })
            .collect();
        Poly::from_terms(&self.field, self.nvars, terms)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.iter();
        match it.next() {
            None => Mono::one(self.nvars),
            Some((m, _)) => it.fold(m.clone(), |acc, (t, _)| acc.gcd(t)),
        }
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        let terms = self.terms.iter().filter(|(m, _)| m.deg == d).cloned().collect();
        Poly { field: self.field.clone(), nvars: self.nvars, terms }
    }

    /// Drops terms of total degree above `d`.
    pub fn truncate_degree(&self, d: u32) -> Poly {
        let terms = self.terms.iter().filter(|(m, _)| m.deg <= d).cloned().collect();
        Poly { field: self.field.clone(), nvars: self.nvars, terms }
    }

    /// Maps every coefficient through `f` into another field.
    pub fn map_coeffs(&self, target: &FieldSpec, f: impl Fn(&Elem) -> Elem) -> Poly {
        Poly::from_terms(target, self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Substitutes polynomial images for the variables: `self(images[0], ...)`.
    pub fn compose(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let target_n = images.first().map(|p| p.nvars).unwrap_or(self.nvars);
        if self.is_zero() {
            return Poly::zero(&self.field, target_n);
        }
        self.compose_from(0, images, target_n)
    }

    fn compose_from(&self, v: usize, images: &[Poly], target_n: usize) -> Poly {
        if self.is_constant() {
            return Poly::constant(&self.field, target_n, self.lc());
        }
        // skip variables not present
        let mut v = v;
        while v < self.nvars && !self.uses_var(v) {
            v += 1;
        }
        let coeffs = self.coeffs_in(v);
        // Horner in images[v]
        let mut acc = Poly::zero(&self.field, target_n);
        for c in coeffs.iter().rev() {
            acc = acc.mul(&images[v]);
            if !c.is_zero() {
                acc = acc.add(&c.compose_from(v + 1, images, target_n));
            }
        }
        acc
    }

    /// Re-embeds into a ring with more or fewer variables via an index map
    /// (`map[i]` is the new index of old variable `i`).
    pub fn remap_vars(&self, new_n: usize, map: &[usize]) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| {
            let mut exps = vec![0; new_n];
            for (i, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    exps[map[i]] += e;
                }
            }
            (Mono::new(exps), c.clone())
        });
        Poly::from_terms(&self.field, new_n, terms)
    }

    /// Univariate view when only `x_v` occurs.
    pub fn to_upoly(&self, v: usize) -> UPoly {
        let d = self.degree_in(v).unwrap_or(0) as usize;
        let mut c = vec![self.field.zero(); d + 1];
        for (m, x) in &self.terms {
            debug_assert!(m.exps.iter().enumerate().all(|(i, &e)| i == v || e == 0));
            c[m.exps[v] as usize] = x.clone();
        }
        UPoly::new(self.field.clone(), c)
    }

    pub fn from_upoly(u: &UPoly, nvars: usize, v: usize) -> Poly {
        let terms = u
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !u.field().is_zero(c))
            .map(|(i, c)| (Mono::var(nvars, v, i as u32), c.clone()));
        Poly::from_terms(u.field(), nvars, terms)
    }

    /// Prints with variables `x1..xn`.
    pub fn to_string_vars(&self, names: &[&str]) -> String {
        let k = &self.field;
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = k.is_negative_print(c);
            let mag = if neg { k.neg(c) } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = fmt_mono(m, names);
            if mono.is_empty() {
                if k.is_compound(&mag) && idx > 0 {
                    out.push_str(&format!("({})", k.fmt_elem(&mag)));
                } else {
                    out.push_str(&k.fmt_elem(&mag));
                }
            } else if k.is_one(&mag) {
                out.push_str(&mono);
            } else if k.is_compound(&mag) {
                out.push_str(&format!("({})*{}", k.fmt_elem(&mag), mono));
            } else {
                out.push_str(&format!("{}*{}", k.fmt_elem(&mag), mono));
            }
        }
        out
    }

    pub fn default_names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn fmt_mono(m: &Mono, names: &[&str]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exps.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].to_string()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Poly::default_names(self.nvars);
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.to_string_vars(&refs))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
