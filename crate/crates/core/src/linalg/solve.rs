//! LU solve with partial pivoting for dense complex systems.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Relative pivot threshold below which the factorization reports
/// singularity. Scaled by the operator-norm estimate of the input.
pub const PIVOT_REL_TOL: f64 = 1e-12;

/// Solve `A X = B` by LU with partial pivoting.
///
/// Reports `SingularMatrix` when a pivot falls below
/// `PIVOT_REL_TOL * op_norm_est(A)`; resolvent callers treat that as a
/// spectrum hit.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "solve requires a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} rows, expected {}",
            b.rows(),
            a.rows()
        )));
    }
    let n = a.rows();
    let m = b.cols();
    let threshold = PIVOT_REL_TOL * a.op_norm_est().max(f64::MIN_POSITIVE);

    let mut lu = a.clone();
    let mut x = b.clone();

    for k in 0..n {
        // Partial pivoting: largest magnitude in column k at or below row k.
        let mut pivot_row = k;
        let mut pivot_mag = lu[(k, k)].norm();
        for i in k + 1..n {
            let mag = lu[(i, k)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag < threshold {
            return Err(Error::SingularMatrix {
                pivot: pivot_mag,
                threshold,
            });
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            for j in 0..m {
                let tmp = x[(k, j)];
                x[(k, j)] = x[(pivot_row, j)];
                x[(pivot_row, j)] = tmp;
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            if factor == C64::new(0.0, 0.0) {
                continue;
            }
            lu[(i, k)] = factor;
            for j in k + 1..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= factor * v;
            }
            for j in 0..m {
                let v = x[(k, j)];
                x[(i, j)] -= factor * v;
            }
        }
    }

    // Back substitution on the triangularized system.
    for j in 0..m {
        for i in (0..n).rev() {
            let mut acc = x[(i, j)];
            for k in i + 1..n {
                acc -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / lu[(i, i)];
        }
    }
    Ok(x)
}

/// Invert a square matrix via `solve(A, I)`.
pub fn invert(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}
