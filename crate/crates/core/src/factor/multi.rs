//! Multivariate squarefree decomposition and factorization.
//!
//! Factorization works on a squarefree polynomial `g` in the variables it
//! actually uses. A random affine change `x_i -> x_i + a_i x_m + b_i` makes
//! `g` monic in the main variable `x_m` with a squarefree univariate image at
//! the origin; the univariate factors are then Hensel-lifted in all other
//! variables at once (by total degree in those variables) and recombined.

use std::collections::BTreeMap;

use rand::Rng;

use super::univariate;
use super::zassenhaus::SUBSET_CAP;
use super::FactorError;
use crate::field::{Elem, FieldSpec};
use crate::poly::{content_in, gcd, Mono, Poly, UPoly};

/// `[(squarefree part, multiplicity)]` of a monic polynomial (Musser's
/// algorithm with `p`-th root extraction in characteristic `p`).
pub fn squarefree_parts(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    sqf_rec(&f.monic(), 1, &mut out);
    out
}

fn sqf_rec(f: &Poly, mult: usize, out: &mut Vec<(Poly, usize)>) {
    if f.is_constant() {
        return;
    }
    let mut c = f.clone();
    for d in f.partials() {
        c = gcd(&c, &d);
        if c.is_one() {
            break;
        }
    }
    let mut w = f.div_exact(&c).unwrap();
    let mut i = 1;
    while !w.is_constant() {
        let y = gcd(&w, &c);
        let z = w.div_exact(&y).unwrap();
        if !z.is_constant() {
            out.push((z.monic(), i * mult));
        }
        c = c.div_exact(&y).unwrap();
        w = y;
        i += 1;
    }
    if !c.is_constant() {
        let p = f.field().characteristic();
        debug_assert!(p > 0, "leftover in characteristic zero");
        sqf_rec(&pth_root(&c, p), mult * p as usize, out);
    }
}

/// `p`-th root of a polynomial over `F_p` whose exponents are all multiples of `p`.
fn pth_root(f: &Poly, p: u64) -> Poly {
    let terms = f.terms().iter().map(|(m, c)| (Mono::new(m.exps().iter().map(|e| e / p as u32).collect()), c.clone()));
    Poly::from_terms(f.field(), f.nvars(), terms)
}

/// Monic irreducible factors of a monic squarefree polynomial.
pub fn factor_squarefree<R: Rng + ?Sized>(g: &Poly, rng: &mut R) -> Result<Vec<Poly>, FactorError> {
    if g.is_constant() {
        return Ok(Vec::new());
    }
    let n = g.nvars();
    let used = g.vars_used();
    // variables are irreducible; strip monomial content first
    let mc = g.monomial_content();
    if mc.degree() > 0 {
        let k = g.field();
        let rest = g.div_exact(&Poly::monomial(k, mc.clone(), k.one())).unwrap();
        let mut out: Vec<Poly> =
            (0..n).filter(|&v| mc.exps()[v] > 0).map(|v| Poly::var(k, n, v)).collect();
        out.extend(factor_squarefree(&rest, rng)?);
        return Ok(out);
    }
    if used.len() == 1 {
        let v = used[0];
        let (_, fs) = univariate::factor(&g.to_upoly(v), rng)?;
        return Ok(fs.iter().map(|(u, _)| Poly::from_upoly(u, n, v)).collect());
    }
    for &v in &used {
        let c = content_in(g, v);
        if !c.is_constant() {
            let mut out = factor_squarefree(&c, rng)?;
            out.extend(factor_squarefree(&g.div_exact(&c).unwrap().monic(), rng)?);
            return Ok(out);
        }
    }
    // A x_v + B with coprime A, B
    if used.iter().any(|&v| g.degree_in(v) == Some(1)) {
        return Ok(vec![g.clone()]);
    }
    // compress to the used variables
    let m = used.len();
    let mut down = vec![0usize; n];
    for (i, &v) in used.iter().enumerate() {
        down[v] = i;
    }
    let small = g.remap_vars(m, &down);
    let fs = hensel_factor(&small, rng)?;
    Ok(fs.iter().map(|f| f.remap_vars(n, &used).monic()).collect())
}

fn side_degree(m: &Mono, main: usize) -> u32 {
    m.degree() - m.exps()[main]
}

/// Product with terms of degree above `bound` in the non-main variables dropped.
fn mul_trunc(a: &Poly, b: &Poly, main: usize, bound: u32) -> Poly {
    let k = a.field();
    let mut acc: std::collections::HashMap<Mono, Elem> = std::collections::HashMap::new();
    for (ma, ca) in a.terms() {
        let da = side_degree(ma, main);
        if da > bound {
            continue;
        }
        for (mb, cb) in b.terms() {
            if da + side_degree(mb, main) > bound {
                continue;
            }
            let mm = ma.mul(mb);
            let c = k.mul(ca, cb);
            match acc.get_mut(&mm) {
                Some(v) => *v = k.add(v, &c),
                None => {
                    acc.insert(mm, c);
                }
            }
        }
    }
    Poly::from_terms(k, a.nvars(), acc)
}

fn affine_images(k: &FieldSpec, m: usize, a: &[Elem], b: &[Elem], sign: bool) -> Vec<Poly> {
    let main = m - 1;
    (0..m)
        .map(|i| {
            if i == main {
                return Poly::var(k, m, main);
            }
            let (ai, bi) = if sign { (k.neg(&a[i]), k.neg(&b[i])) } else { (a[i].clone(), b[i].clone()) };
            Poly::var(k, m, i)
                .add(&Poly::var(k, m, main).scale(&ai))
                .add(&Poly::constant(k, m, bi))
        })
        .collect()
}

fn hensel_factor<R: Rng + ?Sized>(g: &Poly, rng: &mut R) -> Result<Vec<Poly>, FactorError> {
    let k = g.field().clone();
    let m = g.nvars();
    let main = m - 1;
    let d = g.degree().unwrap();
    for attempt in 0..24 {
        let height = 2 + 3 * attempt as i64;
        let a: Vec<Elem> = (0..m - 1).map(|_| k.random_small(rng, height)).collect();
        let b: Vec<Elem> = (0..m - 1).map(|_| k.random_small(rng, height)).collect();
        let big = g.compose(&affine_images(&k, m, &a, &b, false));
        if big.degree_in(main) != Some(d) {
            continue;
        }
        let big = big.scale(&k.inv(&big.lc_in(main).lc()).unwrap());
        let image = restrict_to_main(&big, main);
        if image.degree() != Some(d as usize) || image.gcd(&image.derivative()).degree() != Some(0) {
            continue;
        }
        let (_, ufs) = univariate::factor(&image, rng)?;
        if ufs.len() == 1 {
            return Ok(vec![g.clone()]);
        }
        let us: Vec<UPoly> = ufs.into_iter().map(|(u, _)| u).collect();
        let lifted = lift(&big, &us, main, d);
        let found = recombine(&big, lifted, &us, main, d)?;
        let back = affine_images(&k, m, &a, &b, true);
        return Ok(found.iter().map(|f| f.compose(&back).monic()).collect());
    }
    Err(FactorError::FieldTooSmall)
}

fn restrict_to_main(f: &Poly, main: usize) -> UPoly {
    let k = f.field();
    let mut c = vec![k.zero(); f.degree_in(main).unwrap_or(0) as usize + 1];
    for (mono, x) in f.terms() {
        if side_degree(mono, main) == 0 {
            c[mono.exps()[main] as usize] = x.clone();
        }
    }
    UPoly::new(k.clone(), c)
}

/// Lifts `f = prod us` from the ideal of the side variables to degree `bound`.
fn lift(f: &Poly, us: &[UPoly], main: usize, bound: u32) -> Vec<Poly> {
    let k = f.field();
    let m = f.nvars();
    let r = us.len();
    // s_j = (prod_{i != j} u_i)^(-1) mod u_j
    let inverses: Vec<UPoly> = (0..r)
        .map(|j| {
            let others = us.iter().enumerate().filter(|(i, _)| *i != j).fold(UPoly::one(k), |acc, (_, u)| acc.mul(u));
            let (_, s, _) = others.rem(&us[j]).ext_gcd(&us[j]);
            s
        })
        .collect();
    let mut fs: Vec<Poly> = us.iter().map(|u| Poly::from_upoly(u, m, main)).collect();
    for t in 1..=bound {
        let prod = fs.iter().skip(1).fold(fs[0].clone(), |acc, x| mul_trunc(&acc, x, main, t));
        let err = f.sub(&prod);
        // group degree-t error terms by their side monomial
        let mut groups: BTreeMap<Mono, Vec<Elem>> = BTreeMap::new();
        for (mono, c) in err.terms() {
            if side_degree(mono, main) != t {
                continue;
            }
            let e = mono.exps()[main] as usize;
            let mut key = mono.exps().to_vec();
            key[main] = 0;
            let v = groups.entry(Mono::new(key)).or_default();
            if v.len() <= e {
                v.resize(e + 1, k.zero());
            }
            v[e] = c.clone();
        }
        for (mu, coeffs) in groups {
            let e = UPoly::new(k.clone(), coeffs);
            for j in 0..r {
                let delta = e.mul(&inverses[j]).rem(&us[j]);
                if delta.is_zero() {
                    continue;
                }
                let dp = Poly::from_upoly(&delta, m, main).mul_mono(&mu, &k.one());
                fs[j] = fs[j].add(&dp);
            }
        }
    }
    fs
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

fn recombine(f: &Poly, mut lifted: Vec<Poly>, us: &[UPoly], main: usize, bound: u32) -> Result<Vec<Poly>, FactorError> {
    let mut degs: Vec<u32> = us.iter().map(|u| u.degree().unwrap() as u32).collect();
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut tried = 0;
    let mut s = 1;
    'outer: while 2 * s <= lifted.len() {
        let mut comb: Vec<usize> = (0..s).collect();
        loop {
            tried += 1;
            if tried > SUBSET_CAP {
                return Err(FactorError::RecombinationLimit { subsets: SUBSET_CAP });
            }
            let total: u32 = comb.iter().map(|&i| degs[i]).sum();
            let cand = comb[1..]
                .iter()
                .fold(lifted[comb[0]].clone(), |acc, &i| mul_trunc(&acc, &lifted[i], main, bound))
                .truncate_degree(total);
            if let Some(q) = rest.div_exact(&cand) {
                out.push(cand);
                rest = q;
                for &i in comb.iter().rev() {
                    lifted.remove(i);
                    degs.remove(i);
                }
                continue 'outer;
            }
            if !next_combination(&mut comb, lifted.len()) {
                break;
            }
        }
        s += 1;
    }
    if !rest.is_constant() {
        out.push(rest);
    }
    Ok(out)
}
