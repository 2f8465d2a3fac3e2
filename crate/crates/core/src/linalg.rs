//! Small dense exact linear algebra used by the cone kernel.

use crate::scalar::Scalar;
use crate::vector::Vector;

/// Reduced row echelon form of `rows`; returns the nonzero rows and their
/// pivot columns.
pub fn rref<F: Scalar>(rows: &[Vector<F>], dim: usize) -> (Vec<Vector<F>>, Vec<usize>) {
    let mut m: Vec<Vector<F>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = F::one() / m[r][c].clone();
        m[r] = m[r].scale(&inv);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = -row[c].clone();
                row.add_scaled(&f, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank<F: Scalar>(rows: &[Vector<F>], dim: usize) -> usize {
    rref(rows, dim).0.len()
}

/// Orthogonal projection of `v` onto the complement of `span(basis)`.
/// `basis` must be linearly independent.
pub fn project_out<F: Scalar>(v: &Vector<F>, basis: &[Vector<F>]) -> Vector<F> {
    if basis.is_empty() {
        return v.clone();
    }
    let k = basis.len();
    // solve (B B^T) c = B v
    let mut aug: Vec<Vec<F>> = (0..k)
        .map(|i| {
            let mut row: Vec<F> = (0..k).map(|j| basis[i].dot(&basis[j])).collect();
            row.push(basis[i].dot(v));
            row
        })
        .collect();
    for c in 0..k {
        let p = (c..k).find(|&i| !aug[i][c].is_zero()).expect("basis must be independent");
        aug.swap(c, p);
        let inv = F::one() / aug[c][c].clone();
        for x in aug[c].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot = aug[c].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
    }
    let mut out = v.clone();
    for (i, b) in basis.iter().enumerate() {
        let coef = -aug[i][k].clone();
        out.add_scaled(&coef, b);
    }
    out
}
