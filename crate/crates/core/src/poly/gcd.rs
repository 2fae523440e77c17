//! Multivariate gcd: monomial content, a modular coprimality certificate for
//! the common coprime case, then recursive primitive PRS in a main variable.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fpoly;
use super::{Mono, Poly};
use crate::field::{bigint_mod, inv_mod, is_prime_u64, mul_mod, pow_mod, Elem, FieldKind, FieldSpec};

/// Monic greatest common divisor; `gcd(a, 0) = monic(a)`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    a.try_compatible(b).expect("gcd of incompatible polynomials");
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let one = Poly::one(a.field(), a.nvars());
    if a.is_constant() || b.is_constant() {
        return one;
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let k = a.field();
    let a1 = a.div_exact(&Poly::monomial(k, ma, k.one())).unwrap();
    let b1 = b.div_exact(&Poly::monomial(k, mb, k.one())).unwrap();
    let g = gcd_core(&a1, &b1);
    g.mul_mono(&mg, &k.one()).monic()
}

/// Fold of [`gcd`] with early exit at one.
pub fn gcd_many<'a>(items: impl IntoIterator<Item = &'a Poly>) -> Option<Poly> {
    let mut acc: Option<Poly> = None;
    for p in items {
        if p.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => p.monic(),
            Some(g) => gcd(&g, p),
        });
        if acc.as_ref().is_some_and(|g| g.is_one()) {
            break;
        }
    }
    acc
}

/// Content with respect to `x_v`: the monic gcd of the coefficients of the
/// powers of `x_v`.
pub fn content_in(f: &Poly, v: usize) -> Poly {
    let coeffs = f.coeffs_in(v);
    gcd_many(coeffs.iter()).unwrap_or_else(|| Poly::zero(f.field(), f.nvars()))
}

fn content_pp(f: &Poly, v: usize) -> (Poly, Poly) {
    let c = content_in(f, v);
    if c.is_one() || c.is_zero() {
        return (Poly::one(f.field(), f.nvars()), f.clone());
    }
    let pp = f.div_exact(&c).expect("content divides");
    (c, pp)
}

fn gcd_core(a: &Poly, b: &Poly) -> Poly {
    let k = a.field();
    let n = a.nvars();
    let one = Poly::one(k, n);
    if a.is_constant() || b.is_constant() {
        return one;
    }
    let va = a.vars_used();
    let vb = b.vars_used();
    // a variable present in only one input cannot occur in the gcd
    if let Some(&u) = va.iter().find(|v| !vb.contains(v)) {
        let c = content_in(a, u);
        return gcd(&c, b);
    }
    if let Some(&u) = vb.iter().find(|v| !va.contains(v)) {
        let c = content_in(b, u);
        return gcd(a, &c);
    }
    // same variable set from here on
    if va.len() == 1 {
        let v = va[0];
        let g = a.to_upoly(v).gcd(&b.to_upoly(v));
        return Poly::from_upoly(&g, n, v);
    }
    let am = a.monic();
    let bm = b.monic();
    if am == bm {
        return am;
    }
    if provably_coprime(&am, &bm) {
        return one;
    }
    if a.len() <= b.len() {
        if a.divides(b) {
            return am;
        }
    } else if b.divides(a) {
        return bm;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9cd ^ (a.len() as u64) << 16 ^ b.len() as u64);
    if let Some(g) = super::modgcd::modular_gcd(a, b, &mut rng) {
        return g;
    }
    let v = *va
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).unwrap().max(b.degree_in(v).unwrap()), v))
        .unwrap();
    let (ca, pa) = content_pp(a, v);
    let (cb, pb) = content_pp(b, v);
    let c = gcd(&ca, &cb);
    let g = prs(&pa, &pb, v);
    c.mul(&g).monic()
}

fn prs(a: &Poly, b: &Poly, v: usize) -> Poly {
    let (mut r0, mut r1) =
        if a.degree_in(v) >= b.degree_in(v) { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    loop {
        if r1.is_zero() {
            return content_pp(&r0, v).1.monic();
        }
        if r1.degree_in(v) == Some(0) {
            return Poly::one(a.field(), a.nvars());
        }
        let r = prem(&r0, &r1, v);
        r0 = r1;
        r1 = if r.is_zero() { r } else { content_pp(&r, v).1.monic() };
    }
}

/// Pseudo-remainder of `a` by `b` in `x_v`.
pub(crate) fn prem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let k = a.field();
    let db = b.degree_in(v).unwrap();
    let lcb = b.lc_in(v);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v).unwrap() >= db {
        let dr = r.degree_in(v).unwrap();
        let lcr = r.lc_in(v);
        let shift = Mono::var(a.nvars(), v, dr - db);
        r = r.mul(&lcb).sub(&lcr.mul(b).mul_mono(&shift, &k.one()));
    }
    r
}

/// Homomorphism from (a subring of) the coefficient field onto `F_p`.
pub(crate) struct ModMap {
    pub p: u64,
    /// image of `w` for number fields
    root: Option<u64>,
    kind: FieldKind,
}

impl ModMap {
    /// Picks a random word-size prime with a usable reduction; `None` for
    /// small prime fields where evaluation points are too scarce.
    pub fn new<R: Rng + ?Sized>(k: &FieldSpec, rng: &mut R) -> Option<ModMap> {
        match k.kind() {
            FieldKind::PrimeField => {
                let p = k.characteristic();
                (p >= 1 << 12).then_some(ModMap { p, root: None, kind: FieldKind::PrimeField })
            }
            FieldKind::Rationals => Some(ModMap { p: random_prime(rng), root: None, kind: FieldKind::Rationals }),
            FieldKind::NumberField => {
                let m = k.modulus().unwrap();
                for _ in 0..40 {
                    let p = random_prime(rng);
                    let Some(mp) = reduce_qpoly(m, p) else { continue };
                    if let Some(r) = find_root(&mp, p, rng) {
                        return Some(ModMap { p, root: Some(r), kind: FieldKind::NumberField });
                    }
                }
                None
            }
        }
    }

    pub fn map(&self, c: &Elem) -> Option<u64> {
        match (c, self.kind) {
            (Elem::Mod(x), _) => Some(*x),
            (Elem::Rat(q), _) => reduce_rat(q, self.p),
            (Elem::Alg(v), _) => {
                let r = self.root.unwrap();
                let mut acc = 0u64;
                for c in v.iter().rev() {
                    acc = crate::field::add_mod(mul_mod(acc, r, self.p), reduce_rat(c, self.p)?, self.p);
                }
                Some(acc)
            }
        }
    }
}

fn random_prime<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime_u64(c) {
            return c;
        }
    }
}

fn reduce_rat(q: &BigRational, p: u64) -> Option<u64> {
    let d = bigint_mod(q.denom(), p);
    if d == 0 {
        return None;
    }
    Some(mul_mod(bigint_mod(q.numer(), p), inv_mod(d, p)?, p))
}

fn reduce_qpoly(m: &[BigRational], p: u64) -> Option<Vec<u64>> {
    let mut out = Vec::with_capacity(m.len());
    for c in m {
        out.push(reduce_rat(c, p)?);
    }
    fpoly::trim(&mut out);
    Some(out)
}

fn find_root<R: Rng + ?Sized>(f: &[u64], p: u64, rng: &mut R) -> Option<u64> {
    // gcd with x^p - x isolates the linear factors
    let e = num_bigint::BigUint::from(p);
    let xp = fpoly::pow_mod(&[0, 1], &e, f, p);
    let g = fpoly::gcd(f, &fpoly::sub(&xp, &[0, 1], p), p);
    if g.len() < 2 {
        return None;
    }
    let lin = fpoly::equal_degree(&g, 1, p, rng);
    let l = &lin[0];
    // l = x + c
    Some((p - l[0]) % p)
}

/// Reduces a polynomial to `F_p`: `(exponents, residue)` pairs.
fn reduce_poly(f: &Poly, m: &ModMap) -> Option<Vec<(Vec<u32>, u64)>> {
    let mut out = Vec::with_capacity(f.len());
    for (mono, c) in f.terms() {
        out.push((mono.exps().to_vec(), m.map(c)?));
    }
    Some(out)
}

/// Univariate image in `x_v` after substituting `point` for the other variables.
fn eval_image(terms: &[(Vec<u32>, u64)], v: usize, point: &[u64], p: u64) -> Vec<u64> {
    let dv = terms.iter().map(|t| t.0[v]).max().unwrap_or(0) as usize;
    let mut out = vec![0u64; dv + 1];
    for (e, c) in terms {
        let mut t = *c;
        for (i, &ei) in e.iter().enumerate() {
            if i != v && ei > 0 {
                t = mul_mod(t, pow_mod(point[i], ei as u64, p), p);
            }
        }
        let idx = e[v] as usize;
        out[idx] = crate::field::add_mod(out[idx], t, p);
    }
    fpoly::trim(&mut out);
    out
}

/// True only when a modular image certifies `gcd(a, b) = 1`: for every
/// shared variable, a degree-preserving image has a trivial gcd, so the
/// resultant in that variable is nonzero.
pub(crate) fn provably_coprime(a: &Poly, b: &Poly) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (a.len() as u64) << 20 ^ b.len() as u64);
    let Some(m) = ModMap::new(a.field(), &mut rng) else { return false };
    let (Some(ra), Some(rb)) = (reduce_poly(a, &m), reduce_poly(b, &m)) else { return false };
    let p = m.p;
    let shared: Vec<usize> = (0..a.nvars()).filter(|&v| a.uses_var(v) && b.uses_var(v)).collect();
    'vars: for &v in &shared {
        let da = a.degree_in(v).unwrap() as usize;
        let db = b.degree_in(v).unwrap() as usize;
        for _attempt in 0..3 {
            let point: Vec<u64> = (0..a.nvars()).map(|_| rng.gen_range(1..p)).collect();
            let ia = eval_image(&ra, v, &point, p);
            let ib = eval_image(&rb, v, &point, p);
            if ia.len() != da + 1 || ib.len() != db + 1 {
                continue;
            }
            if fpoly::gcd(&ia, &ib, p).len() == 1 {
                continue 'vars;
            }
            return false;
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::expr::parse_poly;

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, &FieldSpec::rationals(), n).unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&p("x1^2-x2^2", 2), &p("x1-x2", 2)), p("x1-x2", 2));
        assert_eq!(gcd(&p("x1+1", 2), &p("x2+1", 2)), p("1", 2));
        assert_eq!(gcd(&p("(x1*x2-2)^2", 2), &p("x1*x2-2", 2)), p("x1*x2-2", 2));
        assert_eq!(gcd(&p("3*x1^2 - 3", 2), &p("0", 2)), p("x1^2-1", 2));
    }

    #[test]
    fn gcd_trivariate_shared_factor() {
        let g = p("x1*x3 + x2^2 - 1", 3);
        let a = g.mul(&p("x1 + x2 + x3", 3)).mul(&p("x2", 3));
        let b = g.mul(&p("x1^2 - x3 + 5", 3)).mul(&p("x2*x3", 3));
        assert_eq!(gcd(&a, &b), g.mul(&p("x2", 3)).monic());
    }

    #[test]
    fn gcd_number_field() {
        let k = FieldSpec::parse("Q[w]/(w^2+1)").unwrap();
        let f = parse_poly("x1^2 + x2^2", &k, 2).unwrap();
        let g = parse_poly("x1 + w*x2", &k, 2).unwrap();
        let h = parse_poly("x1 - w*x2", &k, 2).unwrap();
        assert_eq!(gcd(&f, &g.mul(&parse_poly("x1 + 3", &k, 2).unwrap())), g);
        assert!(gcd(&g, &h).is_one());
        assert!(provably_coprime(&g, &h));
    }

    #[test]
    fn coprimality_certificate_is_conservative() {
        assert!(!provably_coprime(&p("x1^2 - x2^2", 2), &p("x1 + x2", 2)));
        assert!(provably_coprime(&p("x1^2 + x2", 2), &p("x1 + x2^3 + 1", 2)));
    }

    use proptest::prelude::*;

    fn small_poly(n: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::vec((proptest::collection::vec(0u32..3, n), -4i64..5), 1..5).prop_map(move |ts| {
            let k = FieldSpec::rationals();
            Poly::from_terms(&k, n, ts.into_iter().map(|(e, c)| (Mono::new(e), k.from_i64(c))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn gcd_divides_and_cofactors_coprime(a in small_poly(3), b in small_poly(3), c in small_poly(3)) {
            prop_assume!(!c.is_zero());
            let x = a.mul(&c);
            let y = b.mul(&c);
            prop_assume!(!x.is_zero() && !y.is_zero());
            let g = gcd(&x, &y);
            let cx = x.div_exact(&g);
            let cy = y.div_exact(&g);
            prop_assert!(cx.is_some() && cy.is_some());
            prop_assert!(gcd(&cx.unwrap(), &cy.unwrap()).is_one());
            prop_assert!(c.monic().div_exact(&c.monic()).is_some());
            prop_assert!(g.div_exact(&gcd(&c, &g)).is_some());
            prop_assert!(c.divides(&g) || c.is_constant());
        }
    }
}
