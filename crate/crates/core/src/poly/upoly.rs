use std::fmt;

use crate::field::{Elem, FieldSpec};

/// Dense univariate polynomial, low degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly {
    field: FieldSpec,
    coeffs: Vec<Elem>,
}

impl UPoly {
    pub fn new(field: FieldSpec, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        UPoly { field, coeffs }
    }

    pub fn zero(field: &FieldSpec) -> Self {
        UPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn constant(field: &FieldSpec, c: Elem) -> Self {
        UPoly::new(field.clone(), vec![c])
    }

    pub fn one(field: &FieldSpec) -> Self {
        UPoly::constant(field, field.one())
    }

    /// `t`
    pub fn x(field: &FieldSpec) -> Self {
        UPoly::new(field.clone(), vec![field.zero(), field.one()])
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn lc(&self) -> Elem {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let k = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => k.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        UPoly::new(k.clone(), c)
    }

    pub fn neg(&self) -> UPoly {
        UPoly { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| self.field.neg(c)).collect() }
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Elem) -> UPoly {
        UPoly::new(self.field.clone(), self.coeffs.iter().map(|x| self.field.mul(x, c)).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        let k = &self.field;
        if self.is_zero() || o.is_zero() {
            return UPoly::zero(k);
        }
        let mut out = vec![k.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !k.is_zero(b) {
                    out[i + j] = k.add(&out[i + j], &k.mul(a, b));
                }
            }
        }
        UPoly::new(k.clone(), out)
    }

    pub fn pow(&self, e: u32) -> UPoly {
        let mut acc = UPoly::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.field.inv(&self.lc()).unwrap())
    }

    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let k = &self.field;
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UPoly::zero(k), self.clone());
        }
        let inv = k.inv(&d.lc()).unwrap();
        let mut q = vec![k.zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = k.mul(&r[i + dd], &inv);
            if k.is_zero(&c) {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                if !k.is_zero(dj) {
                    r[i + j] = k.sub(&r[i + j], &k.mul(&c, dj));
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (UPoly::new(k.clone(), q), UPoly::new(k.clone(), r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.divrem(d).1
    }

    pub fn div_exact(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.divrem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Monic gcd; zero only for two zero inputs.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b.monic();
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g` monic.
    pub fn ext_gcd(&self, o: &UPoly) -> (UPoly, UPoly, UPoly) {
        let k = &self.field;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (UPoly::one(k), UPoly::zero(k));
        let (mut t0, mut t1) = (UPoly::zero(k), UPoly::one(k));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = k.inv(&r0.lc()).unwrap();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn derivative(&self) -> UPoly {
        let k = &self.field;
        UPoly::new(
            k.clone(),
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| k.mul(c, &k.from_i64(i as i64))).collect(),
        )
    }

    pub fn eval(&self, x: &Elem) -> Elem {
        let k = &self.field;
        self.coeffs.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, x), c))
    }

    /// `self(g)`.
    pub fn compose(&self, g: &UPoly) -> UPoly {
        let k = &self.field;
        self.coeffs.iter().rev().fold(UPoly::zero(k), |acc, c| acc.mul(g).add(&UPoly::constant(k, c.clone())))
    }

    /// `self(t + s)`.
    pub fn shift(&self, s: &Elem) -> UPoly {
        let k = &self.field;
        self.compose(&UPoly::new(k.clone(), vec![s.clone(), k.one()]))
    }

    pub fn to_string_var(&self, var: &str) -> String {
        let p = crate::poly::Poly::from_upoly(self, 1, 0);
        p.to_string_vars(&[var])
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("t"))
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
