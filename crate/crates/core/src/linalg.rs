//! Exact linear algebra over a [`FieldSpec`]: dense matrix helpers and a
//! sparse Gaussian elimination for the coefficient systems in `closure`.

use std::collections::BTreeMap;

use crate::field::{Elem, FieldSpec};

pub type Matrix = Vec<Vec<Elem>>;

pub fn identity(k: &FieldSpec, n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect()).collect()
}

pub fn mat_mul(k: &FieldSpec, a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = k.zero();
                    for t in 0..inner {
                        if !k.is_zero(&a[i][t]) && !k.is_zero(&b[t][j]) {
                            acc = k.add(&acc, &k.mul(&a[i][t], &b[t][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(k: &FieldSpec, a: &Matrix, v: &[Elem]) -> Vec<Elem> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(k.zero(), |acc, (x, y)| k.add(&acc, &k.mul(x, y))))
        .collect()
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(k: &FieldSpec, a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Vec<Vec<Elem>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { k.one() } else { k.zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !k.is_zero(&m[r][col]))?;
        m.swap(col, piv);
        let inv = k.inv(&m[col][col]).unwrap();
        for x in m[col].iter_mut() {
            *x = k.mul(x, &inv);
        }
        for r in 0..n {
            if r != col && !k.is_zero(&m[r][col]) {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let delta = k.mul(&f, &m[col][c]);
                    m[r][c] = k.sub(&m[r][c], &delta);
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(k: &FieldSpec, a: &Matrix) -> Elem {
    let n = a.len();
    let mut m = a.clone();
    let mut det = k.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !k.is_zero(&m[r][col])) else { return k.zero() };
        if piv != col {
            m.swap(col, piv);
            det = k.neg(&det);
        }
        det = k.mul(&det, &m[col][col]);
        let inv = k.inv(&m[col][col]).unwrap();
        for r in col + 1..n {
            if !k.is_zero(&m[r][col]) {
                let f = k.mul(&m[r][col], &inv);
                for c in col..n {
                    let delta = k.mul(&f, &m[col][c]);
                    m[r][c] = k.sub(&m[r][c], &delta);
                }
            }
        }
    }
    det
}

/// Reduced row echelon form of a dense matrix; returns the nonzero rows and
/// their pivot columns.
pub fn rref(k: &FieldSpec, rows: &Matrix) -> (Matrix, Vec<usize>) {
    let mut m = rows.clone();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !k.is_zero(&m[i][col])) else { continue };
        m.swap(r, piv);
        let inv = k.inv(&m[r][col]).unwrap();
        for x in m[r].iter_mut() {
            *x = k.mul(x, &inv);
        }
        for i in 0..m.len() {
            if i != r && !k.is_zero(&m[i][col]) {
                let f = m[i][col].clone();
                for c in col..ncols {
                    let delta = k.mul(&f, &m[r][c]);
                    m[i][c] = k.sub(&m[i][c], &delta);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// Sparse row: column index to nonzero entry.
pub type SparseRow = BTreeMap<usize, Elem>;

/// Solves `A x = b` where row `i` of `A` is `rows[i]` and `b[i]` is the
/// right-hand side. Returns one solution (free variables set to zero) or
/// `None` if inconsistent; the second component is the rank deficiency.
pub fn solve_sparse(k: &FieldSpec, rows: Vec<SparseRow>, rhs: Vec<Elem>, ncols: usize) -> Option<(Vec<Elem>, usize)> {
    // augmented column index = ncols
    let mut work: Vec<SparseRow> = rows
        .into_iter()
        .zip(rhs)
        .map(|(mut r, b)| {
            if !k.is_zero(&b) {
                r.insert(ncols, b);
            }
            r
        })
        .filter(|r| !r.is_empty())
        .collect();
    let mut pivot_rows: Vec<(usize, SparseRow)> = Vec::new();
    for col in 0..ncols {
        // sparsest row containing this column
        let Some((idx, _)) = work
            .iter()
            .enumerate()
            .filter(|(_, r)| r.keys().next() == Some(&col))
            .min_by_key(|(_, r)| r.len())
        else {
            continue;
        };
        let mut prow = work.swap_remove(idx);
        let inv = k.inv(&prow[&col]).unwrap();
        for v in prow.values_mut() {
            *v = k.mul(v, &inv);
        }
        for r in work.iter_mut() {
            if r.keys().next() == Some(&col) {
                let f = r[&col].clone();
                for (c, v) in &prow {
                    let delta = k.mul(&f, v);
                    let e = r.entry(*c).or_insert_with(|| k.zero());
                    *e = k.sub(e, &delta);
                    if k.is_zero(e) {
                        r.remove(c);
                    }
                }
            }
        }
        work.retain(|r| !r.is_empty());
        pivot_rows.push((col, prow));
    }
    // any leftover row is 0 = b with b nonzero
    if work.iter().any(|r| !r.is_empty()) {
        return None;
    }
    let deficiency = ncols - pivot_rows.len();
    let mut x = vec![k.zero(); ncols];
    for (col, row) in pivot_rows.iter().rev() {
        let mut val = row.get(&ncols).cloned().unwrap_or_else(|| k.zero());
        for (c, v) in row.range(col + 1..ncols) {
            val = k.sub(&val, &k.mul(v, &x[*c]));
        }
        x[*col] = val;
    }
    Some((x, deficiency))
}

/// Basis of the right kernel of a dense matrix, one vector per free column,
/// in reduced-echelon form.
pub fn kernel(k: &FieldSpec, rows: &Matrix, ncols: usize) -> Vec<Vec<Elem>> {
    let (r, pivots) = if rows.is_empty() { (Vec::new(), Vec::new()) } else { rref(k, rows) };
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![k.zero(); ncols];
        v[free] = k.one();
        for (row, &pc) in r.iter().zip(&pivots) {
            v[pc] = k.neg(&row[free]);
        }
        out.push(v);
    }
    out
}
