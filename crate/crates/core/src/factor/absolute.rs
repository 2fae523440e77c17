//! Absolute factorization by rational points on random lines.
//!
//! A polynomial that is irreducible over a field `L` and has a smooth
//! `L`-rational point is absolutely irreducible. Each pending factor is
//! restricted to a random line; a simple root of the restriction in `L`
//! certifies it, otherwise `L` is extended by a root of the smallest factor
//! of the restriction and the factor is split over the larger field.

use num_rational::BigRational;
use rand::Rng;

use super::univariate::{self, norm_poly, shifts};
use super::{factor_multi_rng, FactorError};
use crate::field::{Elem, FieldKind, FieldSpec};
use crate::poly::{content_in, Poly, UPoly};

/// Extension degree over `Q` beyond which the search gives up.
const MAX_EXTENSION_DEGREE: usize = 96;

/// Field embedding `K -> L` determined by the image of the generator of `K`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub source: FieldSpec,
    pub target: FieldSpec,
    pub generator_image: Option<Elem>,
}

impl Embedding {
    pub fn identity(k: &FieldSpec) -> Self {
        Embedding { source: k.clone(), target: k.clone(), generator_image: k.generator() }
    }

    pub fn apply(&self, e: &Elem) -> Elem {
        let t = &self.target;
        match (&self.generator_image, self.source.kind()) {
            (_, FieldKind::Rationals) => t.from_rational(&self.source.to_rational(e).unwrap()).unwrap(),
            (Some(g), FieldKind::NumberField) => self
                .source
                .coeffs_of(e)
                .iter()
                .rev()
                .fold(t.zero(), |acc, c| t.add(&t.mul(&acc, g), &t.from_rational(c).unwrap())),
            _ => e.clone(),
        }
    }

    pub fn poly(&self, p: &Poly) -> Poly {
        p.map_coeffs(&self.target, |c| self.apply(c))
    }

    /// `other . self`
    fn then(&self, other: &Embedding) -> Embedding {
        Embedding {
            source: self.source.clone(),
            target: other.target.clone(),
            generator_image: self.generator_image.as_ref().map(|g| other.apply(g)),
        }
    }
}

/// Adjoins a root of the irreducible `v` to `k`. Returns the embedding of
/// `k` into the new field and the image of the adjoined root.
pub fn extend(k: &FieldSpec, v: &UPoly) -> Result<(Embedding, Elem), FactorError> {
    let v = v.monic();
    match k.kind() {
        FieldKind::Rationals => {
            let m: Vec<BigRational> = v.coeffs().iter().map(|c| k.to_rational(c).unwrap()).collect();
            let l = FieldSpec::number_field_unchecked(m);
            let theta = l.generator().unwrap();
            Ok((Embedding { source: k.clone(), target: l, generator_image: None }, theta))
        }
        FieldKind::NumberField => {
            let alpha = k.generator().unwrap();
            let q = FieldSpec::rationals();
            let modk: Vec<BigRational> = k.modulus().unwrap().to_vec();
            for s in shifts() {
                let shift = k.mul(&k.from_i64(s), &alpha);
                let vs = v.shift(&k.neg(&shift));
                let n = norm_poly(&vs);
                if n.gcd(&n.derivative()).degree() != Some(0) {
                    continue;
                }
                let m: Vec<BigRational> = n.monic().coeffs().iter().map(|c| q.to_rational(c).unwrap()).collect();
                let l = FieldSpec::number_field_unchecked(m);
                let gamma = l.generator().unwrap();
                // alpha' = common root of modk(X) and v(gamma - s X, X)
                let x = UPoly::x(&l);
                let lin = UPoly::constant(&l, gamma.clone()).sub(&x.scale(&l.from_i64(s)));
                let mut acc = UPoly::zero(&l);
                for ci in v.coeffs().iter().rev() {
                    let cpoly = UPoly::new(l.clone(), k.coeffs_of(ci).iter().map(|r| l.from_rational(r).unwrap()).collect());
                    acc = acc.mul(&lin).add(&cpoly);
                }
                let mpoly = UPoly::new(l.clone(), modk.iter().map(|r| l.from_rational(r).unwrap()).collect());
                let g = mpoly.gcd(&acc);
                if g.degree() != Some(1) {
                    continue;
                }
                let alpha_img = l.neg(&g.coeff(0));
                let theta = l.sub(&gamma, &l.mul(&l.from_i64(s), &alpha_img));
                return Ok((Embedding { source: k.clone(), target: l, generator_image: Some(alpha_img) }, theta));
            }
            Err(FactorError::Failed("no primitive element found".into()))
        }
        FieldKind::PrimeField => Err(FactorError::PositiveCharacteristic),
    }
}

enum Probe {
    /// Smooth rational point found.
    Absolute,
    /// Extend by a root `theta` of `v`; the point `a + theta b` lies on the factor.
    Extend { v: UPoly, a: Vec<Elem>, b: Vec<Elem> },
}

fn restrict(h: &Poly, a: &[Elem], b: &[Elem]) -> UPoly {
    let k = h.field();
    let t = Poly::var(k, 1, 0);
    let images: Vec<Poly> = a.iter().zip(b).map(|(ai, bi)| t.scale(bi).add(&Poly::constant(k, 1, ai.clone()))).collect();
    h.compose(&images).to_upoly(0)
}

fn smooth_at(h: &Poly, pt: &[Elem]) -> bool {
    let k = h.field();
    h.partials().iter().any(|d| !k.is_zero(&d.eval(pt)))
}

/// Linear in some variable with coprime coefficients, hence absolutely irreducible.
fn linear_primitive(h: &Poly) -> bool {
    (0..h.nvars()).any(|v| h.degree_in(v) == Some(1) && content_in(h, v).degree() == Some(0))
}

fn probe<R: Rng + ?Sized>(h: &Poly, rng: &mut R) -> Result<Probe, FactorError> {
    let k = h.field();
    let n = h.nvars();
    let d = h.degree().unwrap() as usize;
    if d <= 1 || linear_primitive(h) {
        return Ok(Probe::Absolute);
    }
    for attempt in 0..32 {
        let height = 3 + attempt as i64;
        let a: Vec<Elem> = (0..n).map(|_| k.random_small(rng, height)).collect();
        let b: Vec<Elem> = (0..n).map(|_| k.random_small(rng, height)).collect();
        let u = restrict(h, &a, &b);
        if u.degree() != Some(d) || u.gcd(&u.derivative()).degree() != Some(0) {
            continue;
        }
        let (_, fs) = univariate::factor(&u, rng)?;
        if let Some((lin, _)) = fs.iter().find(|(g, _)| g.degree() == Some(1)) {
            let t0 = k.neg(&lin.coeff(0));
            let pt: Vec<Elem> = a.iter().zip(&b).map(|(ai, bi)| k.add(ai, &k.mul(&t0, bi))).collect();
            if smooth_at(h, &pt) {
                return Ok(Probe::Absolute);
            }
            continue;
        }
        let v = fs.iter().map(|(g, _)| g).min_by_key(|g| g.degree()).unwrap().clone();
        return Ok(Probe::Extend { v, a, b });
    }
    Err(FactorError::Failed("no usable line".into()))
}

/// Absolutely irreducible components of a squarefree polynomial over a
/// characteristic-zero field, together with the extension they live in.
pub(crate) fn components<R: Rng + ?Sized>(f: &Poly, rng: &mut R) -> Result<(Embedding, Vec<Poly>), FactorError> {
    let k = f.field().clone();
    let mut emb = Embedding::identity(&k);
    let mut pending: Vec<Poly> = factor_multi_rng(f, rng)?.factors.into_iter().map(|(g, _)| g).collect();
    let mut done: Vec<Poly> = Vec::new();
    // smallest factors first, before any extension makes them dearer
    pending.sort_by_key(|p| std::cmp::Reverse(p.degree()));
    while let Some(h) = pending.pop() {
        match probe(&h, rng)? {
            Probe::Absolute => done.push(h),
            Probe::Extend { v, a, b } => {
                let cur = emb.target.clone();
                if cur.degree() * v.degree().unwrap() > MAX_EXTENSION_DEGREE {
                    return Err(FactorError::Failed("extension degree limit reached".into()));
                }
                let (step, theta) = extend(&cur, &v)?;
                let l = step.target.clone();
                done = done.iter().map(|p| step.poly(p)).collect();
                pending = pending.iter().map(|p| step.poly(p)).collect();
                let hl = step.poly(&h);
                let pt: Vec<Elem> =
                    a.iter().zip(&b).map(|(ai, bi)| l.add(&step.apply(ai), &l.mul(&theta, &step.apply(bi)))).collect();
                let parts = factor_multi_rng(&hl, rng)?;
                for (g, _) in parts.factors {
                    if l.is_zero(&g.eval(&pt)) && smooth_at(&g, &pt) {
                        done.push(g);
                    } else {
                        pending.push(g);
                    }
                }
                emb = emb.then(&step);
            }
        }
    }
    done.sort_by_cached_key(|p| (p.degree(), p.to_string()));
    Ok((emb, done))
}
