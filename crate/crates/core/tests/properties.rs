use proptest::prelude::*;

use satfield::cli::expr::{parse_elem, parse_ratfunc};
use satfield::closure::{self, Pencil, UniRat};
use satfield::factor;
use satfield::field::FieldSpec;
use satfield::group::{FiniteGroup, GroupElement, DEFAULT_CAP};
use satfield::poly::{wedge_vanishes, Poly, RatFunc, UPoly};
use satfield::saturation::{self, SatOptions, Status, Witness};

fn q() -> FieldSpec {
    FieldSpec::rationals()
}

fn small_poly(n: usize, d: u32) -> impl Strategy<Value = Poly> {
    proptest::collection::vec((proptest::collection::vec(0u32..=d, n), -3i64..=3), 1..5).prop_map(move |ts| {
        let k = q();
        Poly::from_terms(
            &k,
            n,
            ts.into_iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= d)
                .map(|(e, c)| (satfield::poly::Mono::new(e), k.from_i64(c))),
        )
    })
}

fn outer(m: usize) -> impl Strategy<Value = Option<UniRat>> {
    (proptest::collection::vec(-3i64..=3, m + 1), proptest::collection::vec(-3i64..=3, 1..=m + 1)).prop_map(|(a, b)| {
        let k = q();
        let up = |v: Vec<i64>| UPoly::new(k.clone(), v.into_iter().map(|c| k.from_i64(c)).collect());
        let (a, b) = (up(a), up(b));
        if b.is_zero() || a.gcd(&b).degree() != Some(0) {
            return None;
        }
        UniRat::new(a, b).ok().filter(|h| h.degree() >= 1)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn wedge_vanishes_on_compositions(p in small_poly(2, 2), qq in small_poly(2, 2), h in outer(2)) {
        let Some(h) = h else { return Ok(()) };
        let Ok(psi) = RatFunc::new(p, qq) else { return Ok(()) };
        prop_assume!(!psi.is_constant());
        let phi = h.apply(&psi).unwrap();
        prop_assert!(wedge_vanishes(&phi, &psi).unwrap());
    }

    #[test]
    fn pencil_is_basis_independent(p in small_poly(3, 2), qq in small_poly(3, 2), m in proptest::array::uniform4(-4i64..=4)) {
        prop_assume!(m[0] * m[3] - m[1] * m[2] != 0);
        let Some(base) = Pencil::from_span(&p, &qq) else { return Ok(()) };
        let k = q();
        let comb = |a: i64, b: i64| p.scale(&k.from_i64(a)).add(&qq.scale(&k.from_i64(b)));
        let other = Pencil::from_span(&comb(m[0], m[1]), &comb(m[2], m[3])).unwrap();
        prop_assert_eq!(&other, &base);
        prop_assert_eq!(Pencil::from_span(base.p(), base.q()).unwrap(), base);
    }

    #[test]
    fn decompositions_verify(p in small_poly(2, 2), qq in small_poly(2, 1), h in outer(3)) {
        let Some(h) = h else { return Ok(()) };
        let Ok(psi) = RatFunc::new(p, qq) else { return Ok(()) };
        prop_assume!(!psi.is_constant());
        let phi = h.apply(&psi).unwrap();
        let dec = closure::generative_rat(&phi, 0).unwrap();
        prop_assert_eq!(closure::verify_decomposition(&phi, &dec), Ok(()));
        prop_assert_eq!(dec.recompose().unwrap(), phi);
    }
}

#[test]
fn fiber_components_match_outer_degree() {
    let k = q();
    // (phi, m, values): splitting fields of the outer stay at most quadratic
    let corpus = [("x1^2*x2^2", 2, [2i64, 5, -3]), ("(x1*x2+1)^3", 3, [8, 27, -27]), ("(x1+x2)^2+1", 2, [2, 5, -3]), ("(x1^2+x2)^2/(x1^2+x2+1)", 2, [2, 5, -3])];
    for (src, m, lambdas) in corpus {
        let phi = parse_ratfunc(src, &k, 2).unwrap();
        for lambda in lambdas {
            let fib = closure::fiber(&phi, Some(&k.from_i64(lambda))).unwrap();
            let a = factor::abs_factor(&fib, 0).unwrap();
            let total: usize = a.components.factors.iter().map(|(_, e)| *e as usize).sum();
            assert_eq!(total, m, "{src} at {lambda}");
            for seed in 1..3 {
                assert_eq!(factor::abs_factor(&fib, seed).unwrap().components.factors.len(), a.components.factors.len());
            }
        }
    }
}

fn mat(k: &FieldSpec, rows: &[&[&str]]) -> GroupElement {
    GroupElement::Matrix(rows.iter().map(|r| r.iter().map(|s| parse_elem(s, k).unwrap()).collect()).collect())
}

/// Plane and space groups over several fields, by generator sets.
fn corpus() -> Vec<FiniteGroup> {
    let rat = q();
    let z3 = FieldSpec::parse("Q[w]/(w^2+w+1)").unwrap();
    let r3 = FieldSpec::parse("Q[w]/(w^2-3)").unwrap();
    let f3 = FieldSpec::prime_field(3).unwrap();
    let f2 = FieldSpec::prime_field(2).unwrap();
    let g = |k: &FieldSpec, gens: Vec<GroupElement>| FiniteGroup::closure(Some(k), &gens, DEFAULT_CAP).unwrap();
    vec![
        g(&rat, vec![mat(&rat, &[&["0", "1"], &["1", "0"]])]),
        g(&rat, vec![mat(&rat, &[&["0", "-1"], &["1", "0"]])]),
        g(&rat, vec![mat(&rat, &[&["0", "1"], &["1", "0"]]), mat(&rat, &[&["1", "0"], &["0", "-1"]])]),
        g(&rat, vec![mat(&rat, &[&["-1", "0"], &["0", "-1"]])]),
        g(&z3, vec![mat(&z3, &[&["w", "0"], &["0", "w^2"]])]),
        g(&z3, vec![mat(&z3, &[&["w", "0"], &["0", "1"]]), mat(&z3, &[&["0", "1"], &["1", "0"]])]),
        g(&r3, vec![mat(&r3, &[&["-1/2", "-w/2"], &["w/2", "-1/2"]])]),
        g(&f3, vec![mat(&f3, &[&["1", "1"], &["0", "1"]]), mat(&f3, &[&["1", "0"], &["1", "1"]])]),
        g(&f3, vec![mat(&f3, &[&["0", "-1"], &["1", "0"]]), mat(&f3, &[&["1", "1"], &["1", "-1"]])]),
        g(&f2, vec![mat(&f2, &[&["0", "1"], &["1", "0"]])]),
        g(&rat, vec![mat(&rat, &[&["0", "1", "0"], &["1", "0", "0"], &["0", "0", "1"]]), mat(&rat, &[&["0", "0", "1"], &["1", "0", "0"], &["0", "1", "0"]])]),
        g(&rat, vec![mat(&rat, &[&["-1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]])]),
    ]
}

fn is_scalar_group(g: &FiniteGroup) -> bool {
    g.elements().iter().all(|e| match e {
        GroupElement::Matrix(m) => (0..m.len()).all(|i| (0..m.len()).all(|j| (i == j && m[i][i] == m[0][0]) || (i != j && g.field().unwrap().is_zero(&m[i][j])))),
        _ => false,
    })
}

/// The three witness checks, written against the public pieces only.
fn recheck(w: &Witness, g: &FiniteGroup) {
    assert!(!w.phi.is_constant());
    for e in g.elements() {
        assert_eq!(w.phi.substitute(&e.action()).unwrap(), w.phi);
    }
    closure::verify_decomposition(&w.phi, &w.decomposition()).unwrap();
    let psi = w.psi();
    assert_ne!(psi.substitute(&w.g.action()).unwrap(), psi);
}

#[test]
fn verdicts_are_consistent() {
    for g in corpus() {
        let ring = saturation::ring_saturated(&g).unwrap();
        let field = saturation::field_saturated(&g, None, &SatOptions::default()).unwrap();
        if ring.status == Status::NotSaturated {
            assert_ne!(field.status, Status::Saturated);
        }
        if field.status == Status::Saturated {
            assert!(g.cayley().is_perfect());
            assert!(field.justification.iter().any(|j| j == "perfect"));
        }
        if g.arity() == 2 && !is_scalar_group(&g) {
            assert_ne!(field.status, Status::Saturated);
            recheck(field.witness.as_ref().expect("plane groups carry a witness"), &g);
        }
        if let Some(w) = &field.witness {
            recheck(w, &g);
        }
    }
}

#[test]
fn sigmas_invariant_under_every_element() {
    for g in corpus().into_iter().filter(|g| g.arity() == 2 && !is_scalar_group(g)) {
        let k = g.field().unwrap().clone();
        let (x1, x2) = (Poly::var(&k, 2, 0), Poly::var(&k, 2, 1));
        let s = saturation::sigma_invariants(&g, &x1, &x2).unwrap();
        assert!(!s.get(s.first_nonconstant()).is_constant());
        for (i, sig) in s.all().iter().enumerate() {
            if i + 1 < s.first_nonconstant() {
                assert!(sig.is_constant());
            }
            for e in g.elements() {
                assert_eq!(sig.substitute(&e.action()).unwrap(), *sig);
            }
        }
    }
}

#[test]
fn submodule_route_in_three_variables() {
    // the plane span{x1 + x2 + x3, x1 - x2} is not invariant; span{x1, x2} under x3 -> -x3 is
    let k = q();
    let g = FiniteGroup::closure(Some(&k), &[mat(&k, &[&["0", "1", "0"], &["1", "0", "0"], &["0", "0", "-1"]])], DEFAULT_CAP).unwrap();
    let (x1, x2, x3) = (Poly::var(&k, 3, 0), Poly::var(&k, 3, 1), Poly::var(&k, 3, 2));
    assert!(saturation::witness_submodule(&g, &x1.add(&x2).add(&x3), &x1.sub(&x2)).is_err());
    let w = saturation::witness_submodule(&g, &x1, &x2).unwrap();
    recheck(&w, &g);
    let v = saturation::field_saturated(&g, Some((&x1, &x2)), &SatOptions::default()).unwrap();
    assert_eq!(v.status, Status::NotSaturated);
    recheck(v.witness.as_ref().unwrap(), &g);
}
