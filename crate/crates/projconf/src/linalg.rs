//! Exact Gauss–Jordan elimination over rational functions.

use num_rational::BigRational;
use num_traits::Zero;
use symkernel::Expr;

/// Determinant and inverse of a square matrix, or `None` if it is singular.
pub fn invert(m: &[Vec<Expr>]) -> Option<(Expr, Vec<Vec<Expr>>)> {
    let n = m.len();
    let mut a: Vec<Vec<Expr>> = m.to_vec();
    let mut inv: Vec<Vec<Expr>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect()).collect();
    let mut det = Expr::one();
    for col in 0..n {
        // Prefer the simplest nonzero pivot to keep intermediate expressions small.
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| (a[r][col].total_degree(), a[r][col].numer().len() + a[r][col].denom().len()))?;
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det = &det * &p;
        let p_inv = p.recip().expect("pivot is nonzero");
        for j in 0..n {
            a[col][j] = &a[col][j] * &p_inv;
            inv[col][j] = &inv[col][j] * &p_inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                if !a[col][j].is_zero() {
                    a[r][j] = &a[r][j] - &(&factor * &a[col][j]);
                }
                if !inv[col][j].is_zero() {
                    inv[r][j] = &inv[r][j] - &(&factor * &inv[col][j]);
                }
            }
        }
    }
    Some((det, inv))
}

/// Solves `A x = b` for a rational matrix and expression right-hand side.
///
/// The system may be overdetermined. Returns `None` when it is inconsistent
/// or its solution is not unique.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[Expr]) -> Option<Vec<Expr>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut rhs: Vec<Expr> = b.to_vec();
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(cols);
    for col in 0..cols {
        let p = (pivot_row..rows).find(|&r| !m[r][col].is_zero())?;
        m.swap(p, pivot_row);
        rhs.swap(p, pivot_row);
        let inv = BigRational::from_integer(1.into()) / &m[pivot_row][col];
        for j in col..cols {
            m[pivot_row][j] = &m[pivot_row][j] * &inv;
        }
        rhs[pivot_row] = rhs[pivot_row].scale(&inv);
        for r in 0..rows {
            if r == pivot_row || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for j in col..cols {
                let delta = &factor * &m[pivot_row][j];
                m[r][j] -= delta;
            }
            let delta = rhs[pivot_row].scale(&factor);
            rhs[r] = &rhs[r] - &delta;
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if rhs[pivot_row..].iter().any(|e| !e.is_zero()) {
        return None;
    }
    Some(pivots.into_iter().map(|r| rhs[r].clone()).collect())
}
