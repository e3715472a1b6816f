//! Local resolvents and local spectra.
//!
//! The local spectrum of `x` under `T` is the set of eigenvalue clusters
//! whose Riesz projection sees `x`; off that support the local resolvent
//! `x~(lambda)` solves `(lambda I - T) x~(lambda) = x` per invariant
//! subspace, and it keeps solving it at spectrum points that are not in the
//! support — which is the whole point of local extension.
//!
//! Every operator on a finite-dimensional space has the single-valued
//! extension property (an analytic solution of `(lambda I - T) f = 0`
//! vanishes off the finite spectrum, hence everywhere), so maximal
//! extensions are unique here by default; what this module computes are the
//! extension itself, its derivatives, and the transfer series that moves an
//! extension from `T` to any quasi-nilpotent equivalent `S`.

use num_complex::Complex64 as C64;

use crate::calibration::Calibration;
use crate::error::{Error, Result};
use crate::linalg::eigen::{eigendecompose_default, SpectralDecomposition};
use crate::linalg::solve::solve;
use crate::matrix::{ComplexMatrix, ComplexVector};
use crate::qnequiv::{decide_equivalence, EQUIVALENCE_REL_TOL};

/// Default relative threshold deciding whether a projection component
/// belongs to the support.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-8;

/// The support of a vector in the eigenvalue clusters of an operator.
#[derive(Debug, Clone)]
pub struct LocalSpectrum {
    /// Indices of the supporting clusters in the spectral decomposition.
    pub support_indices: Vec<usize>,
    /// Representatives of the supporting clusters.
    pub support_values: Vec<C64>,
    /// Total number of clusters of the operator.
    pub cluster_count: usize,
    /// The local resolvent set is exactly the complement of the support in
    /// the extended plane; nothing else is stored.
    pub complement_is_resolvent_set: bool,
}

impl LocalSpectrum {
    pub fn is_empty(&self) -> bool {
        self.support_indices.is_empty()
    }
}

/// Support of `x` with respect to a precomputed decomposition.
pub fn local_spectrum_with(
    decomp: &SpectralDecomposition,
    x: &ComplexVector,
    support_tol: f64,
) -> LocalSpectrum {
    let x_norm = x.norm();
    let mut support_indices = Vec::new();
    let mut support_values = Vec::new();
    for (i, p) in decomp.projections.iter().enumerate() {
        if p.apply(x).norm() > support_tol * x_norm {
            support_indices.push(i);
            support_values.push(decomp.eigenvalues[i]);
        }
    }
    LocalSpectrum {
        support_indices,
        support_values,
        cluster_count: decomp.cluster_count(),
        complement_is_resolvent_set: true,
    }
}

/// Local spectrum of `x` under `T`: the clusters with `|P_i x| > tol |x|`.
/// Empty exactly when `x` vanishes.
pub fn local_spectrum(
    t: &ComplexMatrix,
    x: &ComplexVector,
    support_tol: f64,
) -> Result<LocalSpectrum> {
    check_dims(t, x)?;
    let decomp = eigendecompose_default(t)?;
    Ok(local_spectrum_with(&decomp, x, support_tol))
}

fn check_dims(t: &ComplexMatrix, x: &ComplexVector) -> Result<()> {
    if !t.is_square() || t.rows() != x.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, vector has dimension {}",
            t.rows(),
            t.cols(),
            x.dim()
        )));
    }
    Ok(())
}

fn hit_tolerance(t: &ComplexMatrix, lambda: C64) -> f64 {
    1e-10 * (1.0 + t.op_norm_est() + lambda.norm())
}

/// Per-cluster restriction data for the supported components of `x`.
struct SupportSystem<'a> {
    decomp: &'a SpectralDecomposition,
    /// (cluster index, restricted operator, coordinates of P_i x).
    parts: Vec<(usize, ComplexMatrix, ComplexVector)>,
}

fn support_system<'a>(
    decomp: &'a SpectralDecomposition,
    t: &ComplexMatrix,
    x: &ComplexVector,
    support_tol: f64,
) -> SupportSystem<'a> {
    let spectrum = local_spectrum_with(decomp, x, support_tol);
    let mut parts = Vec::with_capacity(spectrum.support_indices.len());
    for &i in &spectrum.support_indices {
        let basis = &decomp.subspace_bases[i];
        let restricted = basis.adjoint().mul(&t.mul(basis));
        let coords = basis.adjoint().apply(&decomp.projections[i].apply(x));
        parts.push((i, restricted, coords));
    }
    SupportSystem { decomp, parts }
}

impl SupportSystem<'_> {
    /// Guard `lambda` against the supported clusters.
    fn check_off_support(&self, lambda: C64, tol: f64) -> Result<()> {
        for (i, _, _) in &self.parts {
            if self.decomp.distance_to_cluster(*i, lambda) <= tol {
                return Err(Error::LocalSpectrumHit(lambda));
            }
        }
        Ok(())
    }

    /// Apply `(lambda I - T_i)^{-1}` once to each stored coordinate vector.
    fn resolvent_step(&self, lambda: C64, vectors: &mut [ComplexVector]) -> Result<()> {
        for ((_, restricted, _), w) in self.parts.iter().zip(vectors.iter_mut()) {
            let m = restricted.rows();
            let mut shifted = restricted.scale(C64::new(-1.0, 0.0));
            for d in 0..m {
                shifted[(d, d)] += lambda;
            }
            let mut rhs = ComplexMatrix::zeros(m, 1);
            for d in 0..m {
                rhs[(d, 0)] = w[d];
            }
            let sol = solve(&shifted, &rhs).map_err(|e| match e {
                Error::SingularMatrix { .. } => Error::LocalSpectrumHit(lambda),
                other => other,
            })?;
            for d in 0..m {
                w[d] = sol[(d, 0)];
            }
        }
        Ok(())
    }

    /// Assemble the ambient vector `sum_i B_i w_i`.
    fn lift(&self, dim: usize, vectors: &[ComplexVector]) -> ComplexVector {
        let mut out = ComplexVector::zeros(dim);
        for ((i, _, _), w) in self.parts.iter().zip(vectors) {
            out = out.add(&self.decomp.subspace_bases[*i].apply(w));
        }
        out
    }

    fn coordinates(&self) -> Vec<ComplexVector> {
        self.parts.iter().map(|(_, _, c)| c.clone()).collect()
    }
}

/// The local resolvent `x~(lambda)`: the value at `lambda` of the maximal
/// analytic solution of `(lambda I - T) f = x`. Defined for every `lambda`
/// off the support of `x` — including spectrum points outside the support.
pub fn local_resolvent(t: &ComplexMatrix, x: &ComplexVector, lambda: C64) -> Result<ComplexVector> {
    check_dims(t, x)?;
    let decomp = eigendecompose_default(t)?;
    let system = support_system(&decomp, t, x, DEFAULT_SUPPORT_TOL);
    system.check_off_support(lambda, hit_tolerance(t, lambda))?;
    let mut vectors = system.coordinates();
    system.resolvent_step(lambda, &mut vectors)?;
    Ok(system.lift(x.dim(), &vectors))
}

/// Derivatives of the local resolvent:
/// `x^(n)(lambda) = (-1)^n n! (lambda I - T)^{-(n+1)} x` per supported
/// subspace. Satisfies `(lambda I - T) x^(n) = -n x^(n-1)`.
pub fn local_resolvent_derivative(
    t: &ComplexMatrix,
    x: &ComplexVector,
    lambda: C64,
    n: usize,
) -> Result<ComplexVector> {
    check_dims(t, x)?;
    let decomp = eigendecompose_default(t)?;
    let system = support_system(&decomp, t, x, DEFAULT_SUPPORT_TOL);
    system.check_off_support(lambda, hit_tolerance(t, lambda))?;
    let mut vectors = system.coordinates();
    for _ in 0..=n {
        system.resolvent_step(lambda, &mut vectors)?;
    }
    let mut factorial = 1.0_f64;
    for k in 1..=n {
        factorial *= k as f64;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(system
        .lift(x.dim(), &vectors)
        .scale(C64::new(sign * factorial, 0.0)))
}

/// Transfer the local resolvent of `x` from `T` to a quasi-nilpotent
/// equivalent `S` through the finite series
/// `x_1(lambda) = sum_n (-1)^n (S - T)^[n] x^(n)(lambda) / n!`,
/// which satisfies `(lambda I - S) x_1(lambda) = x`. The brackets vanish
/// from `2 dim - 1` on, so the series is a finite sum.
pub fn transfer_local_resolvent(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    x: &ComplexVector,
    lambda: C64,
    n_max: usize,
) -> Result<ComplexVector> {
    check_dims(t, x)?;
    check_dims(s, x)?;
    let dim = t.rows();

    // Equivalence is calibration-independent at desk scale (it is
    // semisimple-part equality), so the precondition is checked against the
    // Euclidean norm.
    let verdict = decide_equivalence(t, s, &Calibration::euclidean(dim), EQUIVALENCE_REL_TOL)?;
    if !verdict.oracle_agrees {
        return Err(Error::OracleDisagreement);
    }
    if !verdict.equivalent {
        return Err(Error::NotEquivalent);
    }

    let decomp = eigendecompose_default(t)?;
    let system = support_system(&decomp, t, x, DEFAULT_SUPPORT_TOL);
    system.check_off_support(lambda, hit_tolerance(t, lambda))?;

    // (-1)^n x^(n)/n! is one more resolvent application per term, so the
    // series assembles from repeated per-subspace solves and the (S, T)
    // bracket recurrence.
    let mut vectors = system.coordinates();
    let mut bracket = ComplexMatrix::identity(dim);
    let mut sum = ComplexVector::zeros(dim);
    let last = n_max.min(2 * dim - 1);
    for n in 0..=last {
        if n > 0 {
            bracket = s.mul(&bracket).sub(&bracket.mul(t));
        }
        system.resolvent_step(lambda, &mut vectors)?;
        let u = system.lift(dim, &vectors);
        sum = sum.add(&bracket.apply(&u));
    }
    Ok(sum)
}
