//! Modular multivariate gcd. Images mod `p` come from dense interpolation
//! one variable at a time (Brown's algorithm); over `Q` and number fields the
//! images are combined by Chinese remaindering and rational reconstruction,
//! and the candidate is accepted only after exact trial division.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::{fpoly, Mono, Poly};
use crate::field::{bigint_mod, inv_mod, is_prime_u64, mul_mod, pow_mod, Elem, FieldKind, FieldSpec};

const MAX_PRIMES: usize = 400;

/// Monic gcd of two nonzero polynomials over a characteristic-zero field or
/// a large prime field; `None` if no usable modular images were found.
pub(crate) fn modular_gcd<R: Rng + ?Sized>(a: &Poly, b: &Poly, rng: &mut R) -> Option<Poly> {
    let k = a.field();
    match k.kind() {
        FieldKind::PrimeField => {
            if k.characteristic() < 1 << 12 {
                return None;
            }
            gcd_p(a, b, rng).map(|g| g.monic())
        }
        _ => gcd_zero_char(a, b, rng),
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

/// Roots of the modulus mod `p` when it splits into distinct linear factors.
fn split_roots<R: Rng + ?Sized>(m: &[BigRational], p: u64, rng: &mut R) -> Option<Vec<u64>> {
    let mut mp = Vec::with_capacity(m.len());
    for c in m {
        mp.push(reduce_rat(c, p)?);
    }
    fpoly::trim(&mut mp);
    let d = mp.len() - 1;
    if fpoly::gcd(&mp, &fpoly::derivative(&mp, p), p).len() != 1 {
        return None;
    }
    if fpoly::pow_mod(&[0, 1], &BigUint::from(p), &mp, p) != vec![0, 1] {
        return None;
    }
    let mut roots: Vec<u64> = fpoly::equal_degree(&mp, 1, p, rng).iter().map(|l| (p - l[0]) % p).collect();
    roots.sort_unstable();
    (roots.len() == d).then_some(roots)
}

/// Image of `f` under `w -> root` (or plain reduction over `Q`).
fn reduce(f: &Poly, fp: &FieldSpec, root: Option<u64>) -> Option<Poly> {
    let p = fp.characteristic();
    let mut terms = Vec::with_capacity(f.len());
    for (m, c) in f.terms() {
        let v = match c {
            Elem::Rat(q) => reduce_rat(q, p)?,
            Elem::Alg(v) => {
                let r = root.unwrap();
                let mut acc = 0u64;
                for c in v.iter().rev() {
                    acc = (mul_mod(acc, r, p) + reduce_rat(c, p)?) % p;
                }
                acc
            }
            Elem::Mod(_) => unreachable!(),
        };
        if v != 0 {
            terms.push((m.clone(), Elem::Mod(v)));
        }
    }
    Some(Poly::from_terms(fp, f.nvars(), terms))
}

fn lex_lead(f: &Poly, vars: &[usize]) -> Vec<u32> {
    f.terms().iter().map(|(m, _)| vars.iter().map(|&v| m.exps()[v]).collect::<Vec<_>>()).max().unwrap_or_default()
}

fn lex_monic(f: &Poly, vars: &[usize]) -> Poly {
    let lead = lex_lead(f, vars);
    let c = f
        .terms()
        .iter()
        .find(|(m, _)| vars.iter().map(|&v| m.exps()[v]).eq(lead.iter().copied()))
        .map(|(_, c)| c.clone())
        .unwrap();
    f.scale(&f.field().inv(&c).unwrap())
}

fn modval(e: &Elem) -> u64 {
    match e {
        Elem::Mod(x) => *x,
        _ => unreachable!(),
    }
}

fn from_fpoly(k: &FieldSpec, n: usize, y: usize, c: &[u64]) -> Poly {
    let terms = c.iter().enumerate().filter(|(_, x)| **x != 0).map(|(e, x)| (Mono::var(n, y, e as u32), Elem::Mod(*x)));
    Poly::from_terms(k, n, terms)
}

/// Content of `f` as a polynomial in `xs` with coefficients in `F_p[y]`.
fn y_content(f: &Poly, xs: &[usize], y: usize) -> Vec<u64> {
    let p = f.field().characteristic();
    let mut groups: std::collections::BTreeMap<Vec<u32>, Vec<u64>> = std::collections::BTreeMap::new();
    for (m, c) in f.terms() {
        let key: Vec<u32> = xs.iter().map(|&v| m.exps()[v]).collect();
        let e = m.exps()[y] as usize;
        let g = groups.entry(key).or_default();
        if g.len() <= e {
            g.resize(e + 1, 0);
        }
        g[e] = modval(c);
    }
    let mut acc: Vec<u64> = Vec::new();
    for g in groups.values() {
        acc = if acc.is_empty() { fpoly::monic(g, p) } else { fpoly::gcd(&acc, g, p) };
        if acc.len() == 1 {
            break;
        }
    }
    acc
}

/// Leading coefficient in `xs` (lexicographic), as a polynomial in `y`.
fn lead_coeff_y(f: &Poly, xs: &[usize], y: usize) -> Vec<u64> {
    let lead = lex_lead(f, xs);
    let mut out = Vec::new();
    for (m, c) in f.terms() {
        if xs.iter().map(|&v| m.exps()[v]).eq(lead.iter().copied()) {
            let e = m.exps()[y] as usize;
            if out.len() <= e {
                out.resize(e + 1, 0);
            }
            out[e] = modval(c);
        }
    }
    fpoly::trim(&mut out);
    out
}

fn subst(f: &Poly, y: usize, beta: u64) -> Poly {
    let p = f.field().characteristic();
    let terms = f.terms().iter().map(|(m, c)| {
        let mut e = m.exps().to_vec();
        let t = mul_mod(modval(c), pow_mod(beta, e[y] as u64, p), p);
        e[y] = 0;
        (Mono::new(e), Elem::Mod(t))
    });
    Poly::from_terms(f.field(), f.nvars(), terms)
}

/// Lex-monic gcd over a prime field by recursive dense interpolation.
fn gcd_p<R: Rng + ?Sized>(a: &Poly, b: &Poly, rng: &mut R) -> Option<Poly> {
    let k = a.field().clone();
    let n = a.nvars();
    let p = k.characteristic();
    if a.is_zero() {
        return Some(b.monic());
    }
    if b.is_zero() {
        return Some(a.monic());
    }
    let mut vars = a.vars_used();
    for v in b.vars_used() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    vars.sort_unstable();
    if a.is_constant() || b.is_constant() {
        return Some(Poly::one(&k, n));
    }
    if vars.len() == 1 {
        let g = a.to_upoly(vars[0]).gcd(&b.to_upoly(vars[0]));
        return Some(Poly::from_upoly(&g, n, vars[0]));
    }
    let y = *vars.last().unwrap();
    let xs = &vars[..vars.len() - 1];
    let ca = y_content(a, xs, y);
    let cb = y_content(b, xs, y);
    let c = fpoly::gcd(&ca, &cb, p);
    let cpoly = from_fpoly(&k, n, y, &c);
    let a1 = a.div_exact(&from_fpoly(&k, n, y, &ca))?;
    let b1 = b.div_exact(&from_fpoly(&k, n, y, &cb))?;
    let la = lead_coeff_y(&a1, xs, y);
    let lb = lead_coeff_y(&b1, xs, y);
    let gamma = fpoly::gcd(&la, &lb, p);
    let bound = a1.degree_in(y).unwrap().min(b1.degree_in(y).unwrap()) as usize + gamma.len() - 1;

    let mut h: Option<Poly> = None;
    let mut lead: Option<Vec<u32>> = None;
    let mut points: Vec<u64> = Vec::new();
    let mut modulus: Vec<u64> = vec![1];
    let budget = (4 * bound + 64).min(p as usize);
    for _ in 0..budget {
        let beta = rng.gen_range(0..p);
        if points.contains(&beta) || fpoly::eval(&la, beta, p) == 0 || fpoly::eval(&lb, beta, p) == 0 {
            continue;
        }
        let g = gcd_p(&subst(&a1, y, beta), &subst(&b1, y, beta), rng)?;
        let lg = lex_lead(&g, xs);
        if lg.iter().all(|&e| e == 0) {
            return Some(lex_monic(&cpoly, &vars));
        }
        match &lead {
            Some(l) if lg > *l => continue,
            Some(l) if lg == *l => {}
            _ => {
                h = None;
                points.clear();
                modulus = vec![1];
                lead = Some(lg);
            }
        }
        let g = lex_monic(&g, xs).scale(&Elem::Mod(fpoly::eval(&gamma, beta, p)));
        h = Some(match h {
            None => g,
            Some(h0) => {
                let diff = g.sub(&subst(&h0, y, beta));
                let inv = inv_mod(fpoly::eval(&modulus, beta, p), p)?;
                h0.add(&diff.mul(&from_fpoly(&k, n, y, &fpoly::scale(&modulus, inv, p))))
            }
        });
        modulus = fpoly::mul(&modulus, &[(p - beta) % p, 1], p);
        points.push(beta);
        if points.len() > bound {
            let hh = h.as_ref().unwrap();
            let cont = y_content(hh, xs, y);
            let cand = hh.div_exact(&from_fpoly(&k, n, y, &cont))?;
            if cand.divides(&a1) && cand.divides(&b1) {
                return Some(lex_monic(&cand.mul(&cpoly), &vars));
            }
            if points.len() > 2 * bound + 8 {
                h = None;
                lead = None;
                points.clear();
                modulus = vec![1];
            }
        }
    }
    None
}

/// Coefficients `c_0..c_{d-1}` with `sum c_i r_j^i = v_j` mod `p`.
fn interpolate_mod(roots: &[u64], vals: &[u64], p: u64) -> Vec<u64> {
    let mut acc: Vec<u64> = Vec::new();
    let mut basis: Vec<u64> = vec![1];
    for (r, v) in roots.iter().zip(vals) {
        let cur = fpoly::eval(&acc, *r, p);
        let bv = fpoly::eval(&basis, *r, p);
        let t = mul_mod((v + p - cur) % p, inv_mod(bv, p).unwrap(), p);
        acc = fpoly::add(&acc, &fpoly::scale(&basis, t, p), p);
        basis = fpoly::mul(&basis, &[(p - r) % p, 1], p);
    }
    acc.resize(roots.len(), 0);
    acc
}

fn rational_reconstruct(x: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

fn gcd_zero_char<R: Rng + ?Sized>(a: &Poly, b: &Poly, rng: &mut R) -> Option<Poly> {
    let k = a.field();
    let n = a.nvars();
    let d = k.degree();
    let vars: Vec<usize> = (0..n).collect();
    let la = lex_lead(a, &vars);
    let lb = lex_lead(b, &vars);
    let mut lead: Option<Vec<u32>> = None;
    let mut modulus = BigInt::one();
    let mut acc: std::collections::BTreeMap<Mono, Vec<BigInt>> = std::collections::BTreeMap::new();
    let mut last: Option<Poly> = None;
    let mut tries = 0;
    let mut used = 0;
    while used < MAX_PRIMES && tries < 20 * MAX_PRIMES {
        tries += 1;
        let p = random_prime(rng);
        let roots: Vec<Option<u64>> = match k.modulus() {
            None => vec![None],
            Some(m) => match split_roots(m, p, rng) {
                Some(rs) => rs.into_iter().map(Some).collect(),
                None => continue,
            },
        };
        used += 1;
        let fp = FieldSpec::prime_field(p).unwrap();
        let mut images = Vec::with_capacity(roots.len());
        for r in &roots {
            let (Some(ap), Some(bp)) = (reduce(a, &fp, *r), reduce(b, &fp, *r)) else { break };
            if lex_lead(&ap, &vars) != la || lex_lead(&bp, &vars) != lb {
                break;
            }
            match gcd_p(&ap, &bp, rng) {
                Some(g) => images.push(g),
                None => break,
            }
        }
        if images.len() != roots.len() {
            continue;
        }
        let lg = lex_lead(&images[0], &vars);
        if images.iter().any(|g| lex_lead(g, &vars) != lg) {
            continue;
        }
        if lg.iter().all(|&e| e == 0) {
            return Some(Poly::one(k, n));
        }
        match &lead {
            Some(l) if lg > *l => continue,
            Some(l) if lg == *l => {}
            _ => {
                lead = Some(lg);
                modulus = BigInt::one();
                acc.clear();
                last = None;
            }
        }
        // coefficient vectors of this image in the basis 1, w, .., w^(d-1)
        let mut monos: Vec<Mono> = acc.keys().cloned().collect();
        for g in &images {
            monos.extend(g.terms().iter().map(|(m, _)| m.clone()));
        }
        monos.sort();
        monos.dedup();
        let rs: Vec<u64> = roots.iter().map(|r| r.unwrap_or(0)).collect();
        let pb = BigInt::from(p);
        let minv = inv_mod(bigint_mod(&modulus, p), p).unwrap();
        for m in monos {
            let vals: Vec<u64> = images.iter().map(|g| modval(&g.coeff(&m))).collect();
            let cs = if d == 1 { vals } else { interpolate_mod(&rs, &vals, p) };
            let old = acc.entry(m).or_insert_with(|| vec![BigInt::zero(); d]);
            for (o, c) in old.iter_mut().zip(cs) {
                let t = mul_mod((c + p - bigint_mod(o, p)) % p, minv, p);
                *o += &modulus * BigInt::from(t);
            }
        }
        modulus *= pb;
        // rational reconstruction of every coefficient
        let mut terms = Vec::with_capacity(acc.len());
        let mut ok = true;
        for (m, cs) in &acc {
            let mut rats = Vec::with_capacity(d);
            for c in cs {
                match rational_reconstruct(c, &modulus) {
                    Some(r) => rats.push(r),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            let e = if d == 1 { k.from_rational(&rats[0]).unwrap() } else { k.alg_from_coeffs(rats) };
            terms.push((m.clone(), e));
        }
        if !ok {
            last = None;
            continue;
        }
        let cand = Poly::from_terms(k, n, terms);
        if last.as_ref() == Some(&cand) && cand.divides(a) && cand.divides(b) {
            return Some(cand.monic());
        }
        last = Some(cand);
    }
    None
}
