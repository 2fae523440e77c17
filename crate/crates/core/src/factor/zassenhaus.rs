//! Factorization of squarefree primitive integer polynomials: modular
//! factorization, quadratic Hensel lifting along a factor tree, and subset
//! recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::FactorError;
use crate::field::{bigint_mod, is_prime_u64};
use crate::poly::fpoly::{self, FPoly};

/// Dense integer polynomial, low degree first.
pub type ZPoly = Vec<BigInt>;

/// Maximum number of recombination subsets tried before giving up.
pub const SUBSET_CAP: usize = 1 << 12;

fn ztrim(a: &mut ZPoly) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

fn zmod(a: &[BigInt], m: &BigInt) -> ZPoly {
    let mut out: ZPoly = a.iter().map(|c| c.mod_floor(m)).collect();
    ztrim(&mut out);
    out
}

fn zadd(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let s: ZPoly = (0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect();
    zmod(&s, m)
}

fn zsub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let s: ZPoly = (0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect();
    zmod(&s, m)
}

fn zmul_raw(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    ztrim(&mut out);
    out
}

fn zmul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    zmod(&zmul_raw(a, b), m)
}

/// Division by a polynomial whose leading coefficient is 1 modulo `m`.
fn zdivrem_monic(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (ZPoly, ZPoly) {
    let db = b.len() - 1;
    let mut r = zmod(a, m);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].mod_floor(m);
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] = (&r[i + j] - &c * bj).mod_floor(m);
        }
        q[i] = c;
    }
    r.truncate(db);
    ztrim(&mut r);
    ztrim(&mut q);
    (q, r)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

fn to_fpoly(a: &[BigInt], p: u64) -> FPoly {
    let mut v: FPoly = a.iter().map(|c| bigint_mod(c, p)).collect();
    fpoly::trim(&mut v);
    v
}

fn from_fpoly(a: &[u64]) -> ZPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// One quadratic Hensel step: from `f = g h`, `s g + t h = 1` modulo `m` to
/// the same relations modulo `m^2`. `h` is monic.
fn hensel_step(f: &[BigInt], g: &[BigInt], h: &[BigInt], s: &[BigInt], t: &[BigInt], m: &BigInt) -> [ZPoly; 4] {
    let m2 = m * m;
    let e = zsub(f, &zmul(g, h, &m2), &m2);
    let (q, r) = zdivrem_monic(&zmul(s, &e, &m2), h, &m2);
    let g1 = zadd(g, &zadd(&zmul(t, &e, &m2), &zmul(&q, g, &m2), &m2), &m2);
    let h1 = zadd(h, &r, &m2);
    let b = zsub(&zadd(&zmul(s, &g1, &m2), &zmul(t, &h1, &m2), &m2), &[BigInt::one()], &m2);
    let (c, d) = zdivrem_monic(&zmul(s, &b, &m2), &h1, &m2);
    let s1 = zsub(s, &d, &m2);
    let t1 = zsub(t, &zadd(&zmul(t, &b, &m2), &zmul(&c, &g1, &m2), &m2), &m2);
    [g1, h1, s1, t1]
}

/// Lifts `f = lc(f) * prod(facs)` (mod `p`, factors monic) to monic factors
/// modulo `big_m = p^(2^j)`.
fn multi_lift(f: &ZPoly, facs: &[FPoly], p: u64, big_m: &BigInt) -> Vec<ZPoly> {
    if facs.len() == 1 {
        let inv = mod_inverse(f.last().unwrap(), big_m);
        return vec![zmod(&f.iter().map(|c| c * &inv).collect::<ZPoly>(), big_m)];
    }
    let k = facs.len() / 2;
    let lcf = bigint_mod(f.last().unwrap(), p);
    let mut g0: FPoly = vec![lcf];
    for a in &facs[..k] {
        g0 = fpoly::mul(&g0, a, p);
    }
    let mut h0: FPoly = vec![1];
    for a in &facs[k..] {
        h0 = fpoly::mul(&h0, a, p);
    }
    let (one, s0, t0) = fpoly::ext_gcd(&g0, &h0, p);
    debug_assert_eq!(one, vec![1]);
    let (mut g, mut h, mut s, mut t) = (from_fpoly(&g0), from_fpoly(&h0), from_fpoly(&s0), from_fpoly(&t0));
    let mut m = BigInt::from(p);
    while &m < big_m {
        let [g1, h1, s1, t1] = hensel_step(f, &g, &h, &s, &t, &m);
        g = g1;
        h = h1;
        s = s1;
        t = t1;
        m = &m * &m;
    }
    let mut out = multi_lift(&zmod(&g, big_m), &facs[..k], p, big_m);
    out.extend(multi_lift(&zmod(&h, big_m), &facs[k..], p, big_m));
    out
}

fn symmetric(a: &[BigInt], m: &BigInt) -> ZPoly {
    let half = m >> 1;
    let mut out: ZPoly = a.iter().map(|c| {
        let r = c.mod_floor(m);
        if r > half {
            r - m
        } else {
            r
        }
    }).collect();
    ztrim(&mut out);
    out
}

pub fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

/// Divides out the content and makes the leading coefficient positive.
pub fn primitive(a: &[BigInt]) -> ZPoly {
    let c = content(a);
    let sign = if a.last().is_some_and(|x| x.is_negative()) { -BigInt::one() } else { BigInt::one() };
    let d = c * sign;
    a.iter().map(|x| x / &d).collect()
}

/// Exact quotient over the integers, or `None`.
pub fn zdiv_exact(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() < b.len() {
        return None;
    }
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let (c, rem) = r[i + db].div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(q)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Irreducible factors of a squarefree primitive integer polynomial with
/// positive leading coefficient (each returned primitive, positive lc).
pub fn factor_squarefree<R: Rng + ?Sized>(a: &ZPoly, rng: &mut R) -> Result<Vec<ZPoly>, FactorError> {
    let n = a.len() - 1;
    if n <= 1 {
        return Ok(vec![a.clone()]);
    }
    if a[0].is_zero() {
        let rest: ZPoly = a[1..].to_vec();
        let mut out = vec![vec![BigInt::zero(), BigInt::one()]];
        out.extend(factor_squarefree(&rest, rng)?);
        return Ok(out);
    }
    // prime with fewest modular factors among a few good candidates
    let mut best: Option<(u64, Vec<FPoly>)> = None;
    let mut good = 0;
    let mut p = 2u64;
    while good < 5 && p < 100_000 {
        p += 1;
        if !is_prime_u64(p) || bigint_mod(&a[n], p) == 0 {
            continue;
        }
        let ap = to_fpoly(a, p);
        if fpoly::gcd(&ap, &fpoly::derivative(&ap, p), p).len() != 1 {
            continue;
        }
        good += 1;
        let (_, fs) = fpoly::factor(&ap, p, rng);
        let fs: Vec<FPoly> = fs.into_iter().map(|(f, _)| f).collect();
        if fs.len() == 1 {
            return Ok(vec![a.clone()]);
        }
        if best.as_ref().is_none_or(|(_, b)| fs.len() < b.len()) {
            best = Some((p, fs));
        }
    }
    let (p, facs) = best.ok_or_else(|| FactorError::Failed("no usable prime".into()))?;

    let maxabs = a.iter().map(|c| c.abs()).max().unwrap();
    let bound = (BigInt::one() << n) * BigInt::from(n + 1) * maxabs * a[n].abs();
    let mut big_m = BigInt::from(p);
    while big_m <= &bound * 2 {
        big_m = &big_m * &big_m;
    }
    let mut lifted = multi_lift(&zmod(a, &big_m), &facs, p, &big_m);

    let mut rest = a.clone();
    let mut out = Vec::new();
    let mut tried = 0usize;
    let mut s = 1;
    'outer: while 2 * s <= lifted.len() {
        let mut comb: Vec<usize> = (0..s).collect();
        loop {
            tried += 1;
            if tried > SUBSET_CAP {
                return Err(FactorError::RecombinationLimit { subsets: SUBSET_CAP });
            }
            let lc = rest.last().unwrap().clone();
            let mut g: ZPoly = vec![lc];
            for &i in &comb {
                g = zmul(&g, &lifted[i], &big_m);
            }
            let g = primitive(&symmetric(&g, &big_m));
            if let Some(q) = zdiv_exact(&rest, &g) {
                out.push(g);
                rest = q;
                for &i in comb.iter().rev() {
                    lifted.remove(i);
                }
                continue 'outer;
            }
            if !next_combination(&mut comb, lifted.len()) {
                break;
            }
        }
        s += 1;
    }
    if rest.len() > 1 {
        out.push(primitive(&rest));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn splits_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // (x^2 - 3)(2x + 1)(x^4 + 1)
        let f = zmul_raw(&zmul_raw(&z(&[-3, 0, 1]), &z(&[1, 2])), &z(&[1, 0, 0, 0, 1]));
        let mut fs = factor_squarefree(&f, &mut rng).unwrap();
        fs.sort();
        let mut want = vec![z(&[-3, 0, 1]), z(&[1, 2]), z(&[1, 0, 0, 0, 1])];
        want.sort();
        assert_eq!(fs, want);
    }

    #[test]
    fn irreducible_with_many_modular_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // x^4 + 1 splits modulo every prime
        assert_eq!(factor_squarefree(&z(&[1, 0, 0, 0, 1]), &mut rng).unwrap().len(), 1);
        // x^4 - 10x^2 + 1, minimal polynomial of sqrt2 + sqrt3
        assert_eq!(factor_squarefree(&z(&[1, 0, -10, 0, 1]), &mut rng).unwrap().len(), 1);
    }
}
