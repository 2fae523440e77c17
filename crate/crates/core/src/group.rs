//! Finite groups given by matrix, Moebius or permutation generators, and the
//! structural computations on their multiplication tables.
//!
//! Recognition of `A5` and `I120` relies on the classical fact that the
//! perfect groups of order 60 and 120 are unique up to isomorphism (`A5` and
//! `SL(2, 5)`); the `I120` tag additionally checks that the center has order
//! two with a perfect quotient of order 60.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::factor::rng_for;
use crate::field::{Elem, FieldSpec};
use crate::linalg::{self, Matrix};
use crate::poly::Action;

pub const DEFAULT_CAP: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("no generators given")]
    NoGenerators,
    #[error("generators differ in realization, size or field")]
    Mixed,
    #[error("generator {0} is not invertible")]
    Singular(usize),
    #[error("generator {0} is not a permutation")]
    NotPermutation(usize),
    #[error("group order exceeds the cap of {cap}")]
    CapExceeded { cap: usize },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("only defined for matrix groups")]
    NotMatrix,
    #[error("no separating vector found in {0} trials")]
    TrialBudget(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Matrix(Matrix),
    /// `[a, b, c, d]` for `x -> (a x + b)/(c x + d)`, first nonzero entry 1.
    Moebius([Elem; 4]),
    /// One-line notation, zero-based.
    Permutation(Vec<usize>),
}

impl GroupElement {
    pub fn moebius(k: &FieldSpec, m: [Elem; 4]) -> GroupElement {
        let first = m.iter().find(|e| !k.is_zero(e)).cloned().unwrap_or_else(|| k.one());
        let inv = k.inv(&first).unwrap_or_else(|| k.one());
        GroupElement::Moebius(m.map(|e| k.mul(&e, &inv)))
    }

    fn mul(&self, o: &GroupElement, k: Option<&FieldSpec>) -> GroupElement {
        match (self, o) {
            (GroupElement::Matrix(a), GroupElement::Matrix(b)) => GroupElement::Matrix(linalg::mat_mul(k.unwrap(), a, b)),
            (GroupElement::Moebius(a), GroupElement::Moebius(b)) => {
                let k = k.unwrap();
                let e = |x: &Elem, y: &Elem, z: &Elem, w: &Elem| k.add(&k.mul(x, y), &k.mul(z, w));
                GroupElement::moebius(
                    k,
                    [e(&a[0], &b[0], &a[1], &b[2]), e(&a[0], &b[1], &a[1], &b[3]), e(&a[2], &b[0], &a[3], &b[2]), e(&a[2], &b[1], &a[3], &b[3])],
                )
            }
            (GroupElement::Permutation(s), GroupElement::Permutation(t)) => {
                GroupElement::Permutation(t.iter().map(|&i| s[i]).collect())
            }
            _ => unreachable!("mixed realizations"),
        }
    }

    /// The substitution action on rational functions in `arity` variables.
    pub fn action(&self) -> Action {
        match self {
            GroupElement::Matrix(m) => Action::Linear(m.clone()),
            GroupElement::Moebius(m) => Action::Moebius(m.clone()),
            GroupElement::Permutation(s) => Action::Permutation(s.clone()),
        }
    }

    fn same_shape(&self, o: &GroupElement) -> bool {
        match (self, o) {
            (GroupElement::Matrix(a), GroupElement::Matrix(b)) => a.len() == b.len(),
            (GroupElement::Moebius(_), GroupElement::Moebius(_)) => true,
            (GroupElement::Permutation(s), GroupElement::Permutation(t)) => s.len() == t.len(),
            _ => false,
        }
    }

    fn identity_like(&self, k: Option<&FieldSpec>) -> GroupElement {
        match self {
            GroupElement::Matrix(a) => GroupElement::Matrix(linalg::identity(k.unwrap(), a.len())),
            GroupElement::Moebius(_) => {
                let k = k.unwrap();
                GroupElement::Moebius([k.one(), k.zero(), k.zero(), k.one()])
            }
            GroupElement::Permutation(s) => GroupElement::Permutation((0..s.len()).collect()),
        }
    }
}

/// A group given by its multiplication table; element 0 is the identity.
#[derive(Clone, Debug)]
pub struct CayleyGroup {
    table: Vec<Vec<u32>>,
    inv: Vec<u32>,
    gens: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

/// A subgroup as a sorted list of element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    pub elements: Vec<usize>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.elements.binary_search(&i).is_ok()
    }
}

/// `G/N` with cosets indexed by their smallest element.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    pub group: CayleyGroup,
    /// `coset_of[g]` is the quotient element containing `g`.
    pub coset_of: Vec<usize>,
    pub representatives: Vec<usize>,
    pub perfect: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recognized {
    A5,
    I120,
    Abelian,
    Other,
}

impl fmt::Display for Recognized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Recognized::A5 => "A5",
            Recognized::I120 => "I120",
            Recognized::Abelian => "abelian",
            Recognized::Other => "other",
        })
    }
}

impl CayleyGroup {
    /// Builds the structure from a table whose row/column 0 is the identity.
    pub fn from_table(table: Vec<Vec<u32>>, gens: Vec<usize>) -> CayleyGroup {
        let n = table.len();
        let mut inv = vec![0u32; n];
        for (i, row) in table.iter().enumerate() {
            inv[i] = row.iter().position(|&x| x == 0).expect("every element has an inverse") as u32;
        }
        let mut g = CayleyGroup { table, inv, gens, classes: Vec::new() };
        g.classes = g.compute_classes();
        g
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inverse(g))
    }

    fn compute_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let conjugators: Vec<usize> = if self.gens.is_empty() { (0..n).collect() } else { self.gens.clone() };
        for x in 0..n {
            if seen[x] {
                continue;
            }
            let mut class = vec![x];
            seen[x] = true;
            let mut i = 0;
            while i < class.len() {
                let y = class[i];
                for &g in &conjugators {
                    let z = self.conj(g, y);
                    if !seen[z] {
                        seen[z] = true;
                        class.push(z);
                    }
                }
                i += 1;
            }
            class.sort_unstable();
            out.push(class);
        }
        out
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn center(&self) -> Subgroup {
        let mut elements: Vec<usize> = self.classes.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
        elements.sort_unstable();
        Subgroup { elements }
    }

    /// Subgroup generated by `set`.
    pub fn generate(&self, set: &[usize]) -> Subgroup {
        let n = self.order();
        let mut inside = vec![false; n];
        inside[0] = true;
        let mut elems = vec![0usize];
        let gens: Vec<usize> = set.iter().copied().filter(|&s| s != 0).collect();
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &s in &gens {
                let y = self.mul(x, s);
                if !inside[y] {
                    inside[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        Subgroup { elements: elems }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { elements: (0..self.order()).collect() }
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        let conjugators: Vec<usize> = if self.gens.is_empty() { (0..self.order()).collect() } else { self.gens.clone() };
        conjugators.iter().all(|&g| h.elements.iter().all(|&x| h.contains(self.conj(g, x))))
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let n = self.order();
        let mut comm = vec![false; n];
        for a in 0..n {
            for b in 0..n {
                let c = self.mul(self.mul(a, b), self.inverse(self.mul(b, a)));
                comm[c] = true;
            }
        }
        let set: Vec<usize> = (0..n).filter(|&c| comm[c]).collect();
        self.generate(&set)
    }

    pub fn is_perfect(&self) -> bool {
        self.derived_subgroup().order() == self.order()
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.order()
    }

    /// All normal subgroups, as joins of normal closures of conjugacy classes.
    pub fn normal_subgroups(&self) -> Vec<Subgroup> {
        let minimal: Vec<Subgroup> = {
            let mut v: Vec<Subgroup> = self.classes.iter().map(|c| self.generate(c)).collect();
            v.sort();
            v.dedup();
            v
        };
        let mut found: HashSet<Subgroup> = HashSet::new();
        let mut queue: VecDeque<Subgroup> = VecDeque::new();
        let trivial = Subgroup { elements: vec![0] };
        found.insert(trivial.clone());
        queue.push_back(trivial);
        while let Some(h) = queue.pop_front() {
            for m in &minimal {
                if m.elements.iter().all(|&x| h.contains(x)) {
                    continue;
                }
                let mut set = h.elements.clone();
                set.extend(m.elements.iter().copied());
                let j = self.generate(&set);
                if found.insert(j.clone()) {
                    queue.push_back(j);
                }
            }
        }
        let mut out: Vec<Subgroup> = found.into_iter().collect();
        out.sort_by_key(|h| (h.order(), h.elements.clone()));
        out
    }

    pub fn quotient(&self, nsub: &Subgroup) -> Result<QuotientGroup, GroupError> {
        if !self.is_normal(nsub) {
            return Err(GroupError::NotNormal);
        }
        let n = self.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g);
            for &x in &nsub.elements {
                coset_of[self.mul(g, x)] = id;
            }
        }
        let table: Vec<Vec<u32>> =
            reps.iter().map(|&a| reps.iter().map(|&b| coset_of[self.mul(a, b)] as u32).collect()).collect();
        let gens: Vec<usize> = {
            let mut v: Vec<usize> = self.gens.iter().map(|&g| coset_of[g]).filter(|&c| c != 0).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let derived = self.derived_subgroup();
        let mut set = derived.elements.clone();
        set.extend(nsub.elements.iter().copied());
        let perfect = self.generate(&set).order() == n;
        Ok(QuotientGroup { group: CayleyGroup::from_table(table, gens), coset_of, representatives: reps, perfect })
    }

    /// Invariant factors `d1 | d2 | ...` of `G/G'`.
    pub fn abelianization(&self) -> Vec<u64> {
        let q = self.quotient(&self.derived_subgroup()).expect("derived subgroup is normal");
        q.group.abelian_invariants()
    }

    /// Invariant factors of an abelian group, from counts of elements whose
    /// order divides `p^k`.
    fn abelian_invariants(&self) -> Vec<u64> {
        let m = self.order() as u64;
        let orders: Vec<u64> = (0..self.order()).map(|a| self.element_order(a) as u64).collect();
        let mut per_prime: Vec<Vec<u64>> = Vec::new();
        let mut rest = m;
        let mut p = 2;
        while rest > 1 {
            if rest % p == 0 {
                while rest % p == 0 {
                    rest /= p;
                }
                // c[k] = log_p #{x : x^(p^k) = 1}
                let mut c = vec![0u32];
                let mut pk = 1u64;
                loop {
                    pk *= p;
                    let count = orders.iter().filter(|&&o| pk % o == 0 && is_power_of(o, p)).count() as u64;
                    c.push(log_exact(count, p));
                    if c[c.len() - 1] == c[c.len() - 2] {
                        break;
                    }
                }
                // number of cyclic factors of order >= p^k is c[k] - c[k-1]
                let ge: Vec<u32> = (1..c.len()).map(|k| c[k] - c[k - 1]).collect();
                let mut exps = Vec::new();
                for (k, &g) in ge.iter().enumerate() {
                    let next = ge.get(k + 1).copied().unwrap_or(0);
                    for _ in 0..g - next {
                        exps.push(p.pow(k as u32 + 1));
                    }
                }
                exps.sort_unstable_by(|a, b| b.cmp(a));
                per_prime.push(exps);
            }
            p += 1;
        }
        let len = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
        let mut out: Vec<u64> =
            (0..len).map(|i| per_prime.iter().map(|v| v.get(i).copied().unwrap_or(1)).product()).collect();
        out.reverse();
        out
    }

    pub fn recognize(&self) -> Recognized {
        if self.is_abelian() {
            return Recognized::Abelian;
        }
        match self.order() {
            60 if self.is_perfect() => Recognized::A5,
            120 if self.is_perfect() => {
                let z = self.center();
                if z.order() == 2 {
                    let q = self.quotient(&z).expect("center is normal");
                    if q.group.order() == 60 && q.group.is_perfect() {
                        return Recognized::I120;
                    }
                }
                Recognized::Other
            }
            _ => Recognized::Other,
        }
    }

    /// Number of homomorphisms into the multiplicative group of `k`.
    pub fn characters_to_field(&self, k: &FieldSpec) -> u64 {
        let w = k.roots_of_unity_order();
        self.abelianization().iter().map(|d| d.gcd(&w)).product()
    }
}

fn is_power_of(mut x: u64, p: u64) -> bool {
    while x % p == 0 {
        x /= p;
    }
    x == 1
}

fn log_exact(mut x: u64, p: u64) -> u32 {
    let mut e = 0;
    while x > 1 {
        debug_assert_eq!(x % p, 0);
        x /= p;
        e += 1;
    }
    e
}

/// Closure of realized generators with its multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    field: Option<FieldSpec>,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
    cayley: CayleyGroup,
}

impl FiniteGroup {
    pub fn closure(field: Option<&FieldSpec>, gens: &[GroupElement], cap: usize) -> Result<FiniteGroup, GroupError> {
        let first = gens.first().ok_or(GroupError::NoGenerators)?;
        if gens.iter().any(|g| !g.same_shape(first)) {
            return Err(GroupError::Mixed);
        }
        for (i, g) in gens.iter().enumerate() {
            match g {
                GroupElement::Matrix(m) => {
                    let k = field.ok_or(GroupError::Mixed)?;
                    if m.iter().any(|r| r.len() != m.len()) || k.is_zero(&linalg::determinant(k, m)) {
                        return Err(GroupError::Singular(i));
                    }
                }
                GroupElement::Moebius(m) => {
                    let k = field.ok_or(GroupError::Mixed)?;
                    if k.is_zero(&k.sub(&k.mul(&m[0], &m[3]), &k.mul(&m[1], &m[2]))) {
                        return Err(GroupError::Singular(i));
                    }
                }
                GroupElement::Permutation(s) => {
                    let mut seen = vec![false; s.len()];
                    for &x in s {
                        if x >= s.len() || seen[x] {
                            return Err(GroupError::NotPermutation(i));
                        }
                        seen[x] = true;
                    }
                }
            }
        }
        let id = first.identity_like(field);
        let mut elements = vec![id.clone()];
        let mut index: HashMap<GroupElement, usize> = HashMap::from([(id, 0)]);
        // right[j][i] = index of elements[i] * gens[j]; parent for the BFS tree
        let mut right: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None];
        let mut i = 0;
        while i < elements.len() {
            for (j, g) in gens.iter().enumerate() {
                let prod = elements[i].mul(g, field);
                let idx = match index.get(&prod) {
                    Some(&x) => x,
                    None => {
                        if elements.len() >= cap {
                            return Err(GroupError::CapExceeded { cap });
                        }
                        let x = elements.len();
                        index.insert(prod.clone(), x);
                        elements.push(prod);
                        parent.push(Some((i, j)));
                        x
                    }
                };
                right[j].push(idx as u32);
            }
            i += 1;
        }
        let n = elements.len();
        // table[a][b]: write b = parent * g, then a b = (a parent) g
        let mut table = vec![vec![0u32; n]; n];
        for (a, row) in table.iter_mut().enumerate() {
            row[0] = a as u32;
            for b in 1..n {
                let (pb, g) = parent[b].unwrap();
                row[b] = right[g][row[pb] as usize];
            }
        }
        let gen_idx: Vec<usize> = {
            let mut v: Vec<usize> = gens.iter().map(|g| index[&g.mul(&first.identity_like(field), field)]).collect();
            v.retain(|&x| x != 0);
            v.sort_unstable();
            v.dedup();
            v
        };
        Ok(FiniteGroup { field: field.cloned(), elements, index, cayley: CayleyGroup::from_table(table, gen_idx) })
    }

    pub fn field(&self) -> Option<&FieldSpec> {
        self.field.as_ref()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn cayley(&self) -> &CayleyGroup {
        &self.cayley
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self.elements[0], GroupElement::Matrix(_))
    }

    /// Number of variables the group acts on.
    pub fn arity(&self) -> usize {
        match &self.elements[0] {
            GroupElement::Matrix(m) => m.len(),
            GroupElement::Moebius(_) => 1,
            GroupElement::Permutation(s) => s.len(),
        }
    }

    /// Vector `v` with pairwise distinct images `g v`.
    pub fn find_separating_vector(&self, seed: u64) -> Result<Vec<Elem>, GroupError> {
        if !self.is_matrix() {
            return Err(GroupError::NotMatrix);
        }
        let k = self.field.as_ref().unwrap();
        let n = self.arity();
        let mut rng = rng_for(seed);
        const TRIALS: usize = 200;
        for t in 0..TRIALS {
            let height = 1 + t as i64 / 10;
            let v: Vec<Elem> = (0..n).map(|_| k.random_small(&mut rng, height)).collect();
            if separates(self, &v) {
                return Ok(v);
            }
        }
        Err(GroupError::TrialBudget(TRIALS))
    }
}

/// True iff `g v` are pairwise distinct over the group.
pub fn separates(g: &FiniteGroup, v: &[Elem]) -> bool {
    let k = g.field.as_ref().unwrap();
    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    g.elements.iter().all(|e| match e {
        GroupElement::Matrix(m) => seen.insert(linalg::mat_vec(k, m, v)),
        _ => false,
    })
}
