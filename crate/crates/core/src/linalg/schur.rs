//! Complex Schur decomposition: Householder reduction to Hessenberg form,
//! then single-shift QR with Wilkinson shifts and Givens rotations.
//!
//! Self-contained and deterministic; adequate for the desk-scale dimensions
//! this crate targets.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Unitary similarity `A = Q T Q^*` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
}

impl SchurForm {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.rows()).map(|i| self.t[(i, i)]).collect()
    }
}

/// Complex Givens rotation `G = (1/r) [[conj(a), conj(b)], [-b, a]]`
/// mapping `(a, b)` to `(r, 0)` with `r = hypot(|a|, |b|) >= 0`.
#[derive(Clone, Copy)]
struct Givens {
    ca: C64, // conj(a)/r
    cb: C64, // conj(b)/r
    a: C64,  // a/r
    b: C64,  // b/r
}

impl Givens {
    fn new(a: C64, b: C64) -> Option<Self> {
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if r == 0.0 {
            return None;
        }
        Some(Self {
            ca: a.conj() / r,
            cb: b.conj() / r,
            a: a / r,
            b: b / r,
        })
    }

    /// Rows `k`, `k+1` of `m`, columns `j0..j1`: left-multiply by G.
    fn apply_left(&self, m: &mut ComplexMatrix, k: usize, j0: usize, j1: usize) {
        for j in j0..j1 {
            let x = m[(k, j)];
            let y = m[(k + 1, j)];
            m[(k, j)] = self.ca * x + self.cb * y;
            m[(k + 1, j)] = -self.b * x + self.a * y;
        }
    }

    /// Columns `k`, `k+1` of `m`, rows `i0..i1`: right-multiply by G^*.
    fn apply_right(&self, m: &mut ComplexMatrix, k: usize, i0: usize, i1: usize) {
        for i in i0..i1 {
            let x = m[(i, k)];
            let y = m[(i, k + 1)];
            m[(i, k)] = self.a * x + self.b * y;
            m[(i, k + 1)] = -self.cb * x + self.ca * y;
        }
    }
}

/// Reduce to upper Hessenberg form in place, accumulating the unitary `q`.
fn hessenberg(h: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k below the subdiagonal.
        let mut norm_sq = 0.0;
        for i in k + 1..n {
            norm_sq += h[(i, k)].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * norm
        } else {
            C64::new(-norm, 0.0)
        };
        let mut v = vec![C64::new(0.0, 0.0); n - k - 1];
        for i in k + 1..n {
            v[i - k - 1] = h[(i, k)];
        }
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;

        // H <- P H with P = I - beta v v^*  (rows k+1.., all columns)
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in 0..v.len() {
                dot += v[i].conj() * h[(k + 1 + i, j)];
            }
            dot *= beta;
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= v[i] * dot;
            }
        }
        // H <- H P (columns k+1.., all rows)
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in 0..v.len() {
                dot += h[(i, k + 1 + j)] * v[j];
            }
            dot *= beta;
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= dot * v[j].conj();
            }
        }
        // Q <- Q P
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in 0..v.len() {
                dot += q[(i, k + 1 + j)] * v[j];
            }
            dot *= beta;
            for j in 0..v.len() {
                q[(i, k + 1 + j)] -= dot * v[j].conj();
            }
        }
        // Exact zeros below the subdiagonal of column k.
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalue of the trailing 2x2 block closest to its bottom-right entry.
fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr_half = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let l1 = tr_half + root;
    let l2 = tr_half - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition.
pub fn schur(a: &ComplexMatrix) -> Result<SchurForm> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Schur decomposition requires a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    if n == 1 {
        return Ok(SchurForm { q, t: h });
    }

    hessenberg(&mut h, &mut q);

    let eps = f64::EPSILON;
    let floor = eps * a.max_abs().max(f64::MIN_POSITIVE);
    let max_iter = 60 * n * n + 200;
    let mut iter = 0usize;
    let mut since_deflation = 0usize;

    let mut hi = n - 1;
    loop {
        // Deflate negligible subdiagonals in the active window.
        while hi > 0 {
            let tol = (eps * (h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm())).max(floor);
            if h[(hi, hi - 1)].norm() <= tol {
                h[(hi, hi - 1)] = C64::new(0.0, 0.0);
                hi -= 1;
                since_deflation = 0;
            } else {
                break;
            }
        }
        if hi == 0 {
            break;
        }

        // Start of the unreduced block ending at hi.
        let mut lo = hi;
        while lo > 0 {
            let tol = (eps * (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm())).max(floor);
            if h[(lo, lo - 1)].norm() <= tol {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        iter += 1;
        since_deflation += 1;
        if iter > max_iter {
            return Err(Error::ConvergenceFailure { iterations: iter });
        }

        let mu = if since_deflation.is_multiple_of(12) {
            // Exceptional shift to break stagnation.
            h[(hi, hi)] + C64::new(1.5 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };

        // Implicit single-shift bulge chase over lo..=hi.
        let mut x = h[(lo, lo)] - mu;
        let mut z = h[(lo + 1, lo)];
        for k in lo..hi {
            if let Some(g) = Givens::new(x, z) {
                let j0 = k.saturating_sub(1).max(lo);
                g.apply_left(&mut h, k, j0, n);
                g.apply_right(&mut h, k, 0, (k + 3).min(hi + 1));
                g.apply_right(&mut q, k, 0, n);
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                z = h[(k + 2, k)];
            }
        }
        // The chase can leave round-off below the subdiagonal.
        for k in lo..hi.saturating_sub(1) {
            for i in k + 2..=hi {
                h[(i, k)] = C64::new(0.0, 0.0);
            }
        }
    }

    // Clean the strictly lower triangle.
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(SchurForm { q, t: h })
}

/// Eigenvalues without clustering (diagonal of the Schur form).
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    Ok(schur(a)?.eigenvalues())
}

/// Spectral radius: largest eigenvalue modulus.
pub fn spectral_radius(a: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?
        .into_iter()
        .map(|l| l.norm())
        .fold(0.0, f64::max))
}
