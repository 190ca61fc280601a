//! Exact Gaussian elimination over [`Coeff`].

use crate::coeff::Coeff;

/// Solve `A x = b` exactly. Returns `None` if the system is inconsistent.
/// Free variables (if any) are set to zero.
pub fn solve(mut a: Vec<Vec<Coeff>>, mut b: Vec<Coeff>) -> Option<Vec<Coeff>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        b.swap(row, p);
        let inv = a[row][col].inv().unwrap();
        for k in col..cols {
            a[row][k] = &a[row][k] * &inv;
        }
        b[row] = &b[row] * &inv;
        for r in 0..rows {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for k in col..cols {
                if !a[row][k].is_zero() {
                    let t = &f * &a[row][k];
                    a[r][k] -= &t;
                }
            }
            let t = &f * &b[row];
            b[r] -= &t;
        }
        pivots.push(col);
        row += 1;
    }
    if b[row..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![Coeff::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = b[r].clone();
    }
    Some(x)
}
