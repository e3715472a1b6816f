//! Singular value decomposition by one-sided Jacobi rotations.
//!
//! Works directly on the columns of the input, which keeps small singular
//! values accurate; this is the primitive behind seminorm null spaces,
//! quotient coordinates, and exact operator norms.

use num_complex::Complex64 as C64;

use crate::matrix::ComplexMatrix;

/// Default relative threshold for the numerical rank.
pub const RANK_REL_TOL: f64 = 1e-10;

/// Full decomposition `A = U diag(sigma) V^*`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// m x m unitary.
    pub u: ComplexMatrix,
    /// min(m, n) singular values, descending.
    pub singular_values: Vec<f64>,
    /// n x n unitary.
    pub v: ComplexMatrix,
}

impl Svd {
    /// Number of singular values above `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values
            .iter()
            .filter(|&&s| s > rel_tol * smax && s > 0.0)
            .count()
    }

    /// Orthonormal null-space basis: columns of V past the rank.
    /// Returns None when the null space is trivial.
    pub fn null_space(&self, rel_tol: f64) -> Option<ComplexMatrix> {
        let n = self.v.rows();
        let r = self.rank(rel_tol);
        if r >= n {
            return None;
        }
        let mut k = ComplexMatrix::zeros(n, n - r);
        for j in r..n {
            for i in 0..n {
                k[(i, j - r)] = self.v[(i, j)];
            }
        }
        Some(k)
    }

    /// First `r` columns of V (orthonormal basis of the row space).
    pub fn range_of_adjoint(&self, r: usize) -> ComplexMatrix {
        let n = self.v.rows();
        assert!(r >= 1 && r <= n);
        let mut m = ComplexMatrix::zeros(n, r);
        for j in 0..r {
            for i in 0..n {
                m[(i, j)] = self.v[(i, j)];
            }
        }
        m
    }

    /// Reconstruct `U diag(sigma) V^*` (test support).
    pub fn reconstruct(&self) -> ComplexMatrix {
        let m = self.u.rows();
        let n = self.v.rows();
        let mut us = ComplexMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            for i in 0..m {
                us[(i, k)] = self.u[(i, k)] * s;
            }
        }
        us.mul(&self.v.adjoint())
    }
}

/// One-sided Jacobi SVD. Always succeeds; zero matrices yield all-zero
/// singular values and identity factors completed as needed.
pub fn svd(a: &ComplexMatrix) -> Svd {
    let m = a.rows();
    let n = a.cols();
    let mut w = a.clone(); // columns get orthogonalized in place
    let mut v = ComplexMatrix::identity(n);

    let eps = f64::EPSILON;
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for k in 0..m {
                    let wi = w[(k, i)];
                    let wj = w[(k, j)];
                    alpha += wi.norm_sqr();
                    beta += wj.norm_sqr();
                    gamma += wi.conj() * wj;
                }
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g; // e^{i phi}
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let sp = phase * s; // s e^{i phi}
                for k in 0..m {
                    let wi = w[(k, i)];
                    let wj = w[(k, j)];
                    w[(k, i)] = wi * c - wj * sp.conj();
                    w[(k, j)] = wi * sp + wj * c;
                }
                for k in 0..n {
                    let vi = v[(k, i)];
                    let vj = v[(k, j)];
                    v[(k, i)] = vi * c - vj * sp.conj();
                    v[(k, j)] = vi * sp + vj * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|k| w[(k, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let mut v_sorted = ComplexMatrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            v_sorted[(i, new_j)] = v[(i, old_j)];
        }
    }

    let p = m.min(n);
    let sigma: Vec<f64> = order.iter().take(p).map(|&j| norms[j]).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);

    // Left vectors: normalized columns for significant singular values,
    // orthonormal completion for the rest.
    let mut u = ComplexMatrix::zeros(m, m);
    let drop_tol = smax * (m.max(n) as f64) * eps;
    let mut filled = 0;
    for (new_j, &old_j) in order.iter().take(p).enumerate() {
        if norms[old_j] > drop_tol && norms[old_j] > 0.0 {
            for i in 0..m {
                u[(i, new_j)] = w[(i, old_j)] / norms[old_j];
            }
            filled = new_j + 1;
        } else {
            break;
        }
    }
    complete_orthonormal(&mut u, filled);

    Svd {
        u,
        singular_values: sigma,
        v: v_sorted,
    }
}

/// Fill columns `from..` of `u` with an orthonormal completion of the
/// existing leading columns. For each new column, take the standard basis
/// vector with the largest component orthogonal to the current span; that
/// component has norm at least 1/sqrt(m), so the completion always succeeds.
fn complete_orthonormal(u: &mut ComplexMatrix, from: usize) {
    let m = u.rows();
    for next in from..m {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for candidate in 0..m {
            let mut col = vec![C64::new(0.0, 0.0); m];
            col[candidate] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for j in 0..next {
                    let mut proj = C64::new(0.0, 0.0);
                    for i in 0..m {
                        proj += u[(i, j)].conj() * col[i];
                    }
                    for i in 0..m {
                        col[i] -= proj * u[(i, j)];
                    }
                }
            }
            let norm = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, col));
            }
        }
        let (norm, col) = best.unwrap();
        debug_assert!(norm > 1e-8, "orthonormal completion degenerated");
        for i in 0..m {
            u[(i, next)] = col[i] / norm;
        }
    }
}

/// Exact spectral norm (largest singular value). Pre-scales by the largest
/// entry so that squared column norms inside the sweep cannot overflow.
/// Scaling divides entry-wise: a reciprocal would overflow for subnormal
/// scales (underflowed nilpotent powers).
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    if !scale.is_finite() {
        return f64::INFINITY;
    }
    let entries: Vec<C64> = a.entries().iter().map(|&z| z / scale).collect();
    let scaled = ComplexMatrix::new(a.rows(), a.cols(), entries).expect("scaled entries finite");
    scale * svd(&scaled).singular_values.first().copied().unwrap_or(0.0)
}
