use std::fmt;

use super::{gcd, Mono, Poly, PolyError};
use crate::field::{Elem, FieldSpec};
use crate::linalg;

/// `num / den` with `gcd(num, den) = 1` and `den` graded-lex monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

/// How a group element (or an explicit substitution) acts on functions.
#[derive(Clone, Debug)]
pub enum Action {
    /// Invertible `n x n` matrix `g`; acts by `f(x) -> f(g^-1 x)`.
    Linear(Vec<Vec<Elem>>),
    /// `[a, b, c, d]` for `x -> (a x + b)/(c x + d)`; acts through the inverse.
    Moebius([Elem; 4]),
    /// One-line permutation `s` (zero-based); acts by `x_i -> x_{s(i)}`.
    Permutation(Vec<usize>),
    /// Plain substitution `x_i -> images[i]`.
    Images(Vec<RatFunc>),
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, PolyError> {
        num.try_compatible(&den)?;
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc { den: Poly::one(num.field(), num.nvars()), num });
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        Ok(Self::from_coprime(num, den))
    }

    /// Caller guarantees coprimality; only the scalar normalization happens.
    pub fn from_coprime(num: Poly, den: Poly) -> Self {
        let k = den.field().clone();
        let inv = k.inv(&den.lc()).expect("zero denominator");
        RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.field(), p.nvars());
        RatFunc { num: p, den }
    }

    pub fn constant(k: &FieldSpec, nvars: usize, c: Elem) -> Self {
        Self::from_poly(Poly::constant(k, nvars, c))
    }

    pub fn var(k: &FieldSpec, nvars: usize, i: usize) -> Self {
        Self::from_poly(Poly::var(k, nvars, i))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn field(&self) -> &FieldSpec {
        self.num.field()
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    /// `max(deg P, deg Q)`; the zero function has degree 0.
    pub fn degree(&self) -> u32 {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.den.clone()).unwrap();
        }
        let g = gcd(&self.den, &o.den);
        let a = self.den.div_exact(&g).unwrap();
        let b = o.den.div_exact(&g).unwrap();
        let num = self.num.mul(&b).add(&o.num.mul(&a));
        RatFunc::new(num, a.mul(&o.den)).unwrap()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::from_poly(Poly::zero(self.field(), self.nvars()));
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = o.den.div_exact(&g1).unwrap();
        let n2 = o.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        RatFunc::from_coprime(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn inv(&self) -> Result<RatFunc, PolyError> {
        if self.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(RatFunc::from_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc, PolyError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn scale(&self, c: &Elem) -> RatFunc {
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        RatFunc { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// `None` at a pole.
    pub fn eval(&self, point: &[Elem]) -> Option<Elem> {
        let k = self.field();
        let d = self.den.eval(point);
        k.div(&self.num.eval(point), &d)
    }

    /// `g . self` for the given action.
    pub fn substitute(&self, action: &Action) -> Result<RatFunc, PolyError> {
        let k = self.field().clone();
        let n = self.nvars();
        match action {
            Action::Linear(g) => {
                if g.len() != n || g.iter().any(|r| r.len() != n) {
                    return Err(PolyError::ArityMismatch { expected: n, got: g.len() });
                }
                let inv = linalg::inverse(&k, g).ok_or(PolyError::SingularMatrix)?;
                let images: Vec<Poly> = inv
                    .iter()
                    .map(|row| {
                        Poly::from_terms(&k, n, row.iter().enumerate().map(|(j, c)| (Mono::var(n, j, 1), c.clone())))
                    })
                    .collect();
                // invertible linear substitutions preserve coprimality
                Ok(RatFunc::from_coprime(self.num.compose(&images), self.den.compose(&images)))
            }
            Action::Permutation(s) => {
                if s.len() != n {
                    return Err(PolyError::ArityMismatch { expected: n, got: s.len() });
                }
                Ok(RatFunc::from_coprime(self.num.remap_vars(n, s), self.den.remap_vars(n, s)))
            }
            Action::Moebius([a, b, c, d]) => {
                if n != 1 {
                    return Err(PolyError::ArityMismatch { expected: 1, got: n });
                }
                let det = k.sub(&k.mul(a, d), &k.mul(b, c));
                if k.is_zero(&det) {
                    return Err(PolyError::SingularMatrix);
                }
                let x = Poly::var(&k, 1, 0);
                let lin = |p: &Elem, q: &Elem| x.scale(p).add(&Poly::constant(&k, 1, q.clone()));
                let num = lin(d, &k.neg(b));
                let den = lin(&k.neg(c), a);
                self.compose_homogeneous(&[num], &den)
            }
            Action::Images(imgs) => {
                if imgs.len() != n {
                    return Err(PolyError::ArityMismatch { expected: n, got: imgs.len() });
                }
                let target = imgs.first().map(|r| r.nvars()).unwrap_or(n);
                let mut l = Poly::one(&k, target);
                for r in imgs {
                    let g = gcd(&l, &r.den);
                    l = l.mul(&r.den.div_exact(&g).unwrap());
                }
                let nums: Vec<Poly> =
                    imgs.iter().map(|r| r.num.mul(&l.div_exact(&r.den).unwrap())).collect();
                self.compose_homogeneous(&nums, &l)
            }
        }
    }

    /// `self(nums[0]/den, ..., nums[n-1]/den)` through homogenization.
    fn compose_homogeneous(&self, nums: &[Poly], den: &Poly) -> Result<RatFunc, PolyError> {
        let d = self.degree();
        let mut images = nums.to_vec();
        images.push(den.clone());
        let p = homogenize(&self.num, d).compose(&images);
        let q = homogenize(&self.den, d).compose(&images);
        RatFunc::new(p, q)
    }

    pub fn to_string_vars(&self, names: &[&str]) -> String {
        let n = self.num.to_string_vars(names);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.to_string_vars(names);
        let n = if self.num.len() > 1 { format!("({n})") } else { n };
        let d = if self.den.len() > 1 || d.contains('*') || d.starts_with('-') { format!("({d})") } else { d };
        format!("{n}/{d}")
    }
}

/// Degree-`d` homogenization in one extra trailing variable.
pub(crate) fn homogenize(p: &Poly, d: u32) -> Poly {
    let n = p.nvars();
    let terms = p.terms().iter().map(|(m, c)| {
        let mut e = m.exps().to_vec();
        e.push(d - m.degree());
        (Mono::new(e), c.clone())
    });
    Poly::from_terms(p.field(), n + 1, terms)
}

/// True iff `(Q dP - P dQ) ^ (q dp - p dq)` vanishes identically, where
/// `phi = P/Q` and `psi = p/q`. Always true in one variable.
pub fn wedge_vanishes(phi: &RatFunc, psi: &RatFunc) -> Result<bool, PolyError> {
    phi.num.try_compatible(&psi.num)?;
    let n = phi.nvars();
    if n < 2 {
        return Ok(true);
    }
    let form = |r: &RatFunc| -> Vec<Poly> {
        let dp = r.num.partials();
        let dq = r.den.partials();
        (0..n).map(|i| dp[i].mul(&r.den).sub(&r.num.mul(&dq[i]))).collect()
    };
    let a = form(phi);
    let b = form(psi);
    for i in 0..n {
        for j in i + 1..n {
            if a[i].mul(&b[j]) != a[j].mul(&b[i]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Poly::default_names(self.nvars());
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.to_string_vars(&refs))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::expr::{parse_poly, parse_ratfunc};
    use proptest::prelude::*;

    fn r(s: &str, k: &FieldSpec, n: usize) -> RatFunc {
        parse_ratfunc(s, k, n).unwrap()
    }

    #[test]
    fn normalization_and_arith() {
        let q = FieldSpec::rationals();
        let f = r("(x1^2-x2^2)/(x1-x2)", &q, 2);
        assert!(f.is_polynomial());
        assert_eq!(f.num(), &parse_poly("x1+x2", &q, 2).unwrap());
        let g = r("(2*x1+2)/(4*x2)", &q, 2);
        assert_eq!(g.den(), &parse_poly("x2", &q, 2).unwrap());
        assert!(g.div(&g).unwrap().num().is_one());
        assert_eq!(r("x1/x2", &q, 2).add(&r("x2/x1", &q, 2)), r("(x1^2+x2^2)/(x1*x2)", &q, 2));
        assert_eq!(RatFunc::new(g.num().clone(), g.den().clone()).unwrap(), g);
        assert!(r("x1", &q, 2).div(&r("0", &q, 2)).is_err());
    }

    #[test]
    fn substitution_examples() {
        let q = FieldSpec::rationals();
        let swap = Action::Linear(vec![vec![q.zero(), q.one()], vec![q.one(), q.zero()]]);
        let f = r("x1*x2", &q, 2);
        assert_eq!(f.substitute(&swap).unwrap(), f);
        assert_eq!(r("x1/x2", &q, 2).substitute(&swap).unwrap(), r("x2/x1", &q, 2));
        let anti = Action::Moebius([q.zero(), q.one(), q.one(), q.zero()]);
        assert_eq!(r("x1", &q, 1).substitute(&anti).unwrap(), r("1/x1", &q, 1));
        let perm = Action::Permutation(vec![1, 2, 0]);
        assert_eq!(r("x1^2 + x2", &q, 3).substitute(&perm).unwrap(), r("x2^2 + x3", &q, 3));

        let k3 = FieldSpec::parse("Q[w]/(w^2-3)").unwrap();
        let h = k3.from_rational(&num_rational::BigRational::new(1.into(), 2.into())).unwrap();
        let s = k3.mul(&h, &k3.generator().unwrap());
        let rot = Action::Linear(vec![vec![k3.neg(&h), k3.neg(&s)], vec![s.clone(), k3.neg(&h)]]);
        let quad = r("x1^2 + x2^2", &k3, 2);
        assert_eq!(quad.substitute(&rot).unwrap(), quad);
        assert_ne!(r("x1", &k3, 2).substitute(&rot).unwrap(), r("x1", &k3, 2));
        assert!(r("x1", &q, 2)
            .substitute(&Action::Linear(vec![vec![q.one(), q.one()], vec![q.one(), q.one()]]))
            .is_err());
    }

    #[test]
    fn wedge_examples() {
        let q = FieldSpec::rationals();
        assert!(wedge_vanishes(&r("x1^2/x2^2", &q, 2), &r("x1/x2", &q, 2)).unwrap());
        assert!(!wedge_vanishes(&r("x1", &q, 2), &r("x2", &q, 2)).unwrap());
        assert!(wedge_vanishes(&r("x1^3+1", &q, 1), &r("x1/(x1+1)", &q, 1)).unwrap());
    }

    fn mat2() -> impl Strategy<Value = [i64; 4]> {
        [-2i64..3, -2i64..3, -2i64..3, -2i64..3].prop_filter("invertible", |m| m[0] * m[3] != m[1] * m[2])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]
        #[test]
        fn action_is_a_left_action(g in mat2(), h in mat2(), c in proptest::collection::vec(-3i64..4, 4)) {
            let q = FieldSpec::rationals();
            let m = |a: [i64; 4]| vec![vec![q.from_i64(a[0]), q.from_i64(a[1])], vec![q.from_i64(a[2]), q.from_i64(a[3])]];
            let gh = linalg::mat_mul(&q, &m(g), &m(h));
            let f = r(&format!("({}*x1^2 + {}*x2)/(x1 + {}*x2^2 + {})", c[0], c[1], c[2], c[3].abs() + 1), &q, 2);
            let lhs = f.substitute(&Action::Linear(m(h))).unwrap().substitute(&Action::Linear(m(g))).unwrap();
            let rhs = f.substitute(&Action::Linear(gh)).unwrap();
            prop_assert_eq!(lhs, rhs);

            let mg = [q.from_i64(g[0]), q.from_i64(g[1]), q.from_i64(g[2]), q.from_i64(g[3])];
            let mh = [q.from_i64(h[0]), q.from_i64(h[1]), q.from_i64(h[2]), q.from_i64(h[3])];
            let p = linalg::mat_mul(&q, &m(g), &m(h));
            let mp = [p[0][0].clone(), p[0][1].clone(), p[1][0].clone(), p[1][1].clone()];
            let u = r("(x1^2 + 1)/(x1 - 3)", &q, 1);
            let lhs = u.substitute(&Action::Moebius(mh)).unwrap().substitute(&Action::Moebius(mg)).unwrap();
            prop_assert_eq!(lhs, u.substitute(&Action::Moebius(mp)).unwrap());
        }

        #[test]
        fn normalization_idempotent(a in -3i64..4, b in 1i64..4) {
            let q = FieldSpec::rationals();
            let f = r(&format!("({a}*x1 + {b})*(x1 - x2)/((x1 - x2)*({b}*x2 + 2))"), &q, 2);
            let again = RatFunc::new(f.num().clone(), f.den().clone()).unwrap();
            prop_assert_eq!(again, f);
        }
    }
}
