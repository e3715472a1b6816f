//! Dense complex matrices and vectors in row-major storage.
//!
//! These are the carriers for every operator and point in the calculus.
//! Dimensions are small (desk scale, n ≲ 64), so all operations are plain
//! triple loops; values are immutable after construction and cheap to clone.

use num_complex::Complex64;
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

/// Dense complex vector.
#[derive(Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<C64>,
}

impl ComplexMatrix {
    /// Build a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some((k, v)) = entries
            .iter()
            .enumerate()
            .find(|(_, v)| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite(format!(
                "matrix entry ({}, {}) = {v}",
                k / cols,
                k % cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Build from nested rows of complex entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(
                "rows have unequal lengths".into(),
            ));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    /// Build from nested rows of real entries (test and fixture helper).
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(
                "rows have unequal lengths".into(),
            ));
        }
        Self::new(
            r,
            c,
            rows.iter()
                .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "dimensions must be at least 1");
        Self {
            rows,
            cols,
            entries: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from((0..self.rows).map(|i| self[(i, j)]).collect::<Vec<_>>())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix addition shape mismatch"
        );
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix subtraction shape mismatch"
        );
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        ComplexVector::from(out)
    }

    /// Matrix power by binary powering (exact squarings, one extra multiply
    /// per set bit of the exponent).
    pub fn pow(&self, n: usize) -> Self {
        assert!(self.is_square(), "matrix power requires a square matrix");
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest-singular-value estimate by power iteration on A*A (30 steps,
    /// deterministic start). Used for tolerance scaling, not for quantities
    /// that enter identities.
    pub fn op_norm_est(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        if !scale.is_finite() {
            return f64::INFINITY;
        }
        // Entry-wise division: a reciprocal overflows for subnormal scales.
        let scaled = Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z / scale).collect(),
        };
        scale * scaled.op_norm_est_unscaled()
    }

    fn op_norm_est_unscaled(&self) -> f64 {
        let n = self.cols;
        // Fixed, non-degenerate start vector.
        let mut v: Vec<C64> = (0..n)
            .map(|j| C64::new(1.0 + 0.1 * j as f64, 0.05 * (j % 3) as f64))
            .collect();
        let norm0 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm0;
        }
        let mut sigma = 0.0;
        for _ in 0..30 {
            // w = A^* (A v)
            let mut av = vec![C64::new(0.0, 0.0); self.rows];
            for i in 0..self.rows {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n {
                    acc += self[(i, j)] * v[j];
                }
                av[i] = acc;
            }
            let mut w = vec![C64::new(0.0, 0.0); n];
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..self.rows {
                    acc += self[(i, j)].conj() * av[i];
                }
                w[j] = acc;
            }
            let wn = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if wn == 0.0 {
                return 0.0;
            }
            sigma = wn.sqrt();
            for x in &mut w {
                *x /= wn;
            }
            v = w;
        }
        sigma
    }

    /// Check that all entries are finite (used after long iterations).
    pub fn all_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let v = self[(i, j)];
                write!(f, "{:+.4e}{:+.4e}i  ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch(
                "vector must have at least one entry".into(),
            ));
        }
        if let Some((k, v)) = entries
            .iter()
            .enumerate()
            .find(|(_, v)| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite(format!("vector entry {k} = {v}")));
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            entries: vec![C64::new(0.0, 0.0); dim],
        }
    }

    /// Standard basis vector e_k.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut v = Self::zeros(dim);
        v.entries[k] = C64::new(1.0, 0.0);
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    /// Hermitian inner product <self, other> = self^* . other.
    pub fn dot(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl From<Vec<C64>> for ComplexVector {
    fn from(entries: Vec<C64>) -> Self {
        assert!(!entries.is_empty());
        Self { entries }
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    #[inline]
    fn index(&self, i: usize) -> &C64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.entries[i]
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexVector [")?;
        for v in &self.entries {
            write!(f, "{:+.4e}{:+.4e}i ", v.re, v.im)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_misshapen() {
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(2, 2, vec![C64::new(1.0, 0.0); 3]).is_err());
        assert!(ComplexVector::new(vec![]).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let bad = vec![
            C64::new(1.0, 0.0),
            C64::new(f64::NAN, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ];
        assert!(matches!(
            ComplexMatrix::new(2, 2, bad),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn product_and_adjoint() {
        let a = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 1.0), C64::new(0.0, 2.0)],
            vec![C64::new(3.0, 0.0), C64::new(0.0, -1.0)],
        ])
        .unwrap();
        let aa = a.adjoint();
        assert_eq!(aa[(0, 1)], C64::new(3.0, 0.0));
        assert_eq!(aa[(1, 0)], C64::new(0.0, -2.0));
        // (A B)* = B* A*
        let b = ComplexMatrix::from_real(&[&[2.0, 0.0], &[1.0, 1.0]]).unwrap();
        let lhs = a.mul(&b).adjoint();
        let rhs = b.adjoint().mul(&a.adjoint());
        assert!(lhs.sub(&rhs).max_abs() < 1e-14);
    }

    #[test]
    fn binary_power_matches_repeated_multiplication() {
        let a = ComplexMatrix::from_rows(&[
            vec![C64::new(0.3, 0.1), C64::new(0.5, -0.2)],
            vec![C64::new(-0.1, 0.4), C64::new(0.2, 0.0)],
        ])
        .unwrap();
        let mut acc = ComplexMatrix::identity(2);
        for n in 0..9 {
            assert!(a.pow(n).sub(&acc).max_abs() < 1e-13);
            acc = acc.mul(&a);
        }
    }

    #[test]
    fn op_norm_estimate_on_diagonal() {
        let a = ComplexMatrix::diagonal(&[C64::new(3.0, 0.0), C64::new(-1.0, 0.0)]);
        let est = a.op_norm_est();
        assert!((est - 3.0).abs() < 1e-8, "estimate {est}");
    }
}
