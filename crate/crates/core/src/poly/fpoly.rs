//! Dense univariate polynomials over `F_p` as `Vec<u64>` (low degree first,
//! no trailing zeros). Word-size workhorse for modular factorization and
//! modular coprimality tests.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use crate::field::{add_mod, inv_mod, mul_mod};

pub type FPoly = Vec<u64>;

pub fn trim(a: &mut FPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn deg(a: &[u64]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> FPoly {
    let mut out: FPoly = (0..a.len().max(b.len()))
        .map(|i| add_mod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p))
        .collect();
    trim(&mut out);
    out
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> FPoly {
    let mut out: FPoly = (0..a.len().max(b.len()))
        .map(|i| add_mod(*a.get(i).unwrap_or(&0), p - b.get(i).unwrap_or(&0) % p, p))
        .collect();
    trim(&mut out);
    out
}

pub fn scale(a: &[u64], c: u64, p: u64) -> FPoly {
    let mut out: FPoly = a.iter().map(|&x| mul_mod(x, c, p)).collect();
    trim(&mut out);
    out
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> FPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    let pp = p as u128;
    // accumulate in u128 with periodic reduction
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let s = out[i + j] + x as u128 * y as u128;
            out[i + j] = if s >= pp * pp { s % pp } else { s };
        }
    }
    let mut r: FPoly = out.into_iter().map(|x| (x % pp) as u64).collect();
    trim(&mut r);
    r
}

pub fn monic(a: &[u64], p: u64) -> FPoly {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => scale(a, inv_mod(lc, p).unwrap(), p),
    }
}

/// Quotient and remainder; `b` nonzero.
pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (FPoly, FPoly) {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = inv_mod(b[db], p).unwrap();
    let mut q = vec![0u64; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = mul_mod(r[i + db], inv, p);
        if c == 0 {
            continue;
        }
        q[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i + j] = add_mod(r[i + j], p - mul_mod(c, bj, p) % p, p);
        }
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> FPoly {
    divrem(a, b, p).1
}

/// Monic gcd (zero only when both inputs are zero).
pub fn gcd(a: &[u64], b: &[u64], p: u64) -> FPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

/// Returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
pub fn ext_gcd(a: &[u64], b: &[u64], p: u64) -> (FPoly, FPoly, FPoly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    trim(&mut r0);
    trim(&mut r1);
    let (mut s0, mut s1): (FPoly, FPoly) = (vec![1], vec![]);
    let (mut t0, mut t1): (FPoly, FPoly) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        let t2 = sub(&t0, &mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    match r0.last() {
        None => (r0, s0, t0),
        Some(&lc) => {
            let inv = inv_mod(lc, p).unwrap();
            (scale(&r0, inv, p), scale(&s0, inv, p), scale(&t0, inv, p))
        }
    }
}

pub fn derivative(a: &[u64], p: u64) -> FPoly {
    let mut out: FPoly = a.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect();
    trim(&mut out);
    out
}

pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
}

/// `base^e mod m`.
pub fn pow_mod(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> FPoly {
    let mut acc: FPoly = rem(&[1], m, p);
    let b = rem(base, m, p);
    let bits = e.bits();
    for i in (0..bits).rev() {
        acc = rem(&mul(&acc, &acc, p), m, p);
        if e.bit(i) {
            acc = rem(&mul(&acc, &b, p), m, p);
        }
    }
    acc
}

pub fn random_below<R: Rng + ?Sized>(rng: &mut R, degree: usize, p: u64) -> FPoly {
    let mut v: FPoly = (0..degree).map(|_| rng.gen_range(0..p)).collect();
    trim(&mut v);
    v
}

/// `p`-th root of a polynomial all of whose exponents are multiples of `p`
/// (coefficients are fixed by Frobenius in `F_p`).
pub fn pth_root(a: &[u64], p: u64) -> FPoly {
    a.iter().step_by(p as usize).copied().collect()
}

/// Squarefree decomposition of a monic polynomial: `(factor, multiplicity)`.
pub fn squarefree(a: &[u64], p: u64) -> Vec<(FPoly, usize)> {
    let mut out = Vec::new();
    sqf_rec(&monic(a, p), p, 1, &mut out);
    out
}

fn sqf_rec(f: &[u64], p: u64, mult: usize, out: &mut Vec<(FPoly, usize)>) {
    if f.len() <= 1 {
        return;
    }
    let d = derivative(f, p);
    let mut c = gcd(f, &d, p);
    let mut w = divrem(f, &c, p).0;
    let mut i = 1;
    while w.len() > 1 {
        let y = gcd(&w, &c, p);
        let z = divrem(&w, &y, p).0;
        if z.len() > 1 {
            out.push((monic(&z, p), i * mult));
        }
        i += 1;
        w = y;
        c = divrem(&c, &w, p).0;
    }
    if c.len() > 1 {
        sqf_rec(&pth_root(&c, p), p, mult * p as usize, out);
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial.
pub fn distinct_degree(f: &[u64], p: u64) -> Vec<(FPoly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let x: FPoly = vec![0, 1];
    let pe = BigUint::from(p);
    let mut h = x.clone();
    let mut d = 0;
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            out.push((monic(&rest, p), rest.len() - 1));
            break;
        }
        h = pow_mod(&h, &pe, &rest, p);
        let g = gcd(&rest, &sub(&h, &x, p), p);
        if g.len() > 1 {
            rest = divrem(&rest, &g, p).0;
            h = rem(&h, &rest, p);
            out.push((g, d));
        }
    }
    out
}

/// Splits a monic squarefree product of irreducibles of degree `d`.
pub fn equal_degree<R: Rng + ?Sized>(f: &[u64], d: usize, p: u64, rng: &mut R) -> Vec<FPoly> {
    let n = f.len() - 1;
    if n == d {
        return vec![f.to_vec()];
    }
    loop {
        let a = random_below(rng, n, p);
        if a.len() <= 1 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(nd-1)) restricted to degree d pieces
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = rem(&mul(&t, &t, p), f, p);
                acc = add(&acc, &t, p);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1;
            sub(&pow_mod(&a, &e, f, p), &[1], p)
        };
        let g = gcd(f, &b, p);
        if g.len() > 1 && g.len() < f.len() {
            let h = divrem(f, &g, p).0;
            let mut out = equal_degree(&g, d, p, rng);
            out.extend(equal_degree(&monic(&h, p), d, p, rng));
            return out;
        }
    }
}

/// Complete factorization of a nonzero polynomial: `(lc, [(monic irreducible, mult)])`.
pub fn factor<R: Rng + ?Sized>(a: &[u64], p: u64, rng: &mut R) -> (u64, Vec<(FPoly, usize)>) {
    let lc = *a.last().expect("factor of zero polynomial");
    let mut out = Vec::new();
    for (s, m) in squarefree(a, p) {
        for (g, d) in distinct_degree(&s, p) {
            for h in equal_degree(&g, d, p, rng) {
                out.push((h, m));
            }
        }
    }
    out.sort();
    (lc, out)
}

#[allow(dead_code)]
pub fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|x| x.is_zero())
}
