//! Univariate factorization over `Q`, number fields (Trager's norm method)
//! and prime fields (Cantor-Zassenhaus).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use super::zassenhaus::{self, ZPoly};
use super::FactorError;
use crate::field::{Elem, FieldKind, FieldSpec};
use crate::poly::fpoly;
use crate::poly::UPoly;

/// Squarefree decomposition of a monic polynomial in characteristic zero.
pub fn yun(f: &UPoly) -> Vec<(UPoly, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let d = f.derivative();
    let a0 = f.gcd(&d);
    let mut b = f.div_exact(&a0).unwrap();
    let c = d.div_exact(&a0).unwrap();
    let mut dd = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&dd);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a).unwrap();
        let c = dd.div_exact(&a).unwrap();
        dd = c.sub(&b.derivative());
        i += 1;
    }
    out
}

fn q_to_z(f: &UPoly) -> ZPoly {
    let q = f.field();
    let rats: Vec<BigRational> = f.coeffs().iter().map(|c| q.to_rational(c).unwrap()).collect();
    let l = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let z: ZPoly = rats.iter().map(|r| (r * BigRational::from_integer(l.clone())).to_integer()).collect();
    zassenhaus::primitive(&z)
}

fn z_to_monic_q(z: &ZPoly, q: &FieldSpec) -> UPoly {
    UPoly::new(q.clone(), z.iter().map(|c| q.from_bigint(c)).collect()).monic()
}

/// Monic irreducible factors of a monic squarefree polynomial over `Q`.
pub(crate) fn factor_sqf_q<R: Rng + ?Sized>(f: &UPoly, rng: &mut R) -> Result<Vec<UPoly>, FactorError> {
    if f.degree().unwrap_or(0) <= 1 {
        return Ok(vec![f.clone()]);
    }
    let z = q_to_z(f);
    let fs = zassenhaus::factor_squarefree(&z, rng)?;
    Ok(fs.iter().map(|g| z_to_monic_q(g, f.field())).collect())
}

/// Resultant of two univariate polynomials by the Euclidean recurrence.
pub fn resultant(a: &UPoly, b: &UPoly) -> Elem {
    let k = a.field().clone();
    let (Some(da), Some(db)) = (a.degree(), b.degree()) else { return k.zero() };
    if db == 0 {
        return k.pow(&b.lc(), da as u64);
    }
    if da == 0 {
        return k.pow(&a.lc(), db as u64);
    }
    let r = a.rem(b);
    let Some(dr) = r.degree() else { return k.zero() };
    let sign = if da % 2 == 1 && db % 2 == 1 { k.neg(&k.one()) } else { k.one() };
    let f = k.mul(&sign, &k.pow(&b.lc(), (da - dr) as u64));
    k.mul(&f, &resultant(b, &r))
}

/// `N_{K/Q}` of a number-field element, as the resultant with the modulus.
pub fn norm_elem(k: &FieldSpec, a: &Elem) -> BigRational {
    let q = FieldSpec::rationals();
    let m = k.modulus().expect("norm over a number field");
    let mp = UPoly::new(q.clone(), m.iter().map(|c| q.from_rational(c).unwrap()).collect());
    let ap = UPoly::new(q.clone(), k.coeffs_of(a).iter().map(|c| q.from_rational(c).unwrap()).collect());
    q.to_rational(&resultant(&mp, &ap)).unwrap()
}

/// `prod_sigma sigma(g)` as a polynomial over `Q`, by evaluation and interpolation.
pub fn norm_poly(g: &UPoly) -> UPoly {
    let k = g.field();
    let q = FieldSpec::rationals();
    let n = g.degree().unwrap() * k.degree();
    let xs: Vec<BigRational> = (0..=n).map(|j| BigRational::from_integer(BigInt::from(j as i64))).collect();
    let ys: Vec<BigRational> = xs.iter().map(|x| norm_elem(k, &g.eval(&k.from_rational(x).unwrap()))).collect();
    interpolate(&q, &xs, &ys)
}

/// Newton interpolation over `Q`.
fn interpolate(q: &FieldSpec, xs: &[BigRational], ys: &[BigRational]) -> UPoly {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut acc = UPoly::zero(q);
    for i in (0..n).rev() {
        let lin = UPoly::new(q.clone(), vec![q.from_rational(&-xs[i].clone()).unwrap(), q.one()]);
        acc = acc.mul(&lin).add(&UPoly::constant(q, q.from_rational(&dd[i]).unwrap()));
    }
    acc
}

fn is_squarefree(f: &UPoly) -> bool {
    f.gcd(&f.derivative()).degree() == Some(0)
}

pub(crate) fn shifts() -> impl Iterator<Item = i64> {
    (0..40).map(|i| if i % 2 == 0 { i / 2 } else { -(i + 1) / 2 })
}

/// Monic irreducible factors of a monic squarefree polynomial over a number field.
pub(crate) fn factor_sqf_nf<R: Rng + ?Sized>(f: &UPoly, rng: &mut R) -> Result<Vec<UPoly>, FactorError> {
    if f.degree().unwrap_or(0) <= 1 {
        return Ok(vec![f.clone()]);
    }
    let k = f.field().clone();
    let alpha = k.generator().unwrap();
    for s in shifts() {
        let shift = k.mul(&k.from_i64(s), &alpha);
        let g = f.shift(&k.neg(&shift));
        let n = norm_poly(&g);
        if !is_squarefree(&n) {
            continue;
        }
        let parts = factor_sqf_q(&n.monic(), rng)?;
        if parts.len() == 1 {
            return Ok(vec![f.clone()]);
        }
        let mut out = Vec::new();
        for p in parts {
            let pk = UPoly::new(k.clone(), p.coeffs().iter().map(|c| k.from_rational(&p.field().to_rational(c).unwrap()).unwrap()).collect());
            let h = pk.gcd(&g);
            out.push(h.shift(&shift).monic());
        }
        return Ok(out);
    }
    Err(FactorError::Failed("no squarefree norm found".into()))
}

fn factor_fp<R: Rng + ?Sized>(f: &UPoly, rng: &mut R) -> Vec<(UPoly, usize)> {
    let k = f.field();
    let p = k.prime().unwrap();
    let v: Vec<u64> = f.coeffs().iter().map(|c| match c {
        Elem::Mod(x) => *x,
        _ => unreachable!(),
    }).collect();
    let (_, fs) = fpoly::factor(&v, p, rng);
    fs.into_iter()
        .map(|(g, m)| (UPoly::new(k.clone(), g.into_iter().map(|c| Elem::Mod(c)).collect()), m))
        .collect()
}

/// Complete factorization: `(unit, [(monic irreducible, multiplicity)])`.
pub(crate) fn factor<R: Rng + ?Sized>(f: &UPoly, rng: &mut R) -> Result<(Elem, Vec<(UPoly, usize)>), FactorError> {
    if f.is_zero() {
        return Err(FactorError::ZeroInput);
    }
    let k = f.field();
    let unit = f.lc();
    let m = f.monic();
    let mut out = Vec::new();
    match k.kind() {
        FieldKind::PrimeField => out = factor_fp(&m, rng),
        kind => {
            for (part, e) in yun(&m) {
                let fs = if kind == FieldKind::Rationals { factor_sqf_q(&part, rng)? } else { factor_sqf_nf(&part, rng)? };
                out.extend(fs.into_iter().map(|g| (g, e)));
            }
        }
    }
    out.sort_by_cached_key(|(g, e)| (g.degree(), g.to_string(), *e));
    Ok((unit, out))
}
