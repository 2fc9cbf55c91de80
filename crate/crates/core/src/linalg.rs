//! Exact Gaussian elimination for small dense systems.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Solves `A x = b` for square nonsingular `A`; `None` if singular.
pub fn solve(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Option<Vec<Rational>> {
    let mut cols = solve_columns(a, vec![b])?;
    cols.pop()
}

/// Solves `A X = B` for several right-hand sides at once. `columns[j]` is
/// the j-th column of `B`; the result is laid out the same way.
pub fn solve_columns(mut a: Vec<Vec<Rational>>, columns: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let k = columns.len();
    debug_assert!(a.iter().all(|r| r.len() == n) && columns.iter().all(|c| c.len() == n));
    // row-major right-hand sides
    let mut b: Vec<Vec<Rational>> = (0..n)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::one() / &a[col][col];
        for x in a[col].iter_mut().skip(col) {
            *x *= &inv;
        }
        for x in b[col].iter_mut() {
            *x *= &inv;
        }
        let prow = a[col].clone();
        let pb = b[col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for (x, p) in a[r].iter_mut().zip(&prow).skip(col) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            for (x, p) in b[r].iter_mut().zip(&pb) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(
        (0..k)
            .map(|j| b.iter().map(|row| row[j].clone()).collect())
            .collect(),
    )
}
