//! Spectral analysis of quotient-bounded operators: radius of boundedness,
//! resolvents and their identities, Neumann inversion, and the
//! union-of-quotient-spectra report.

use num_complex::Complex64 as C64;

use crate::calibration::Calibration;
use crate::error::{Error, Result};
use crate::linalg::eigen::{check_cluster_separation, cluster_points};
use crate::linalg::schur::{eigenvalues, spectral_radius};
use crate::linalg::solve::solve;
use crate::matrix::ComplexMatrix;

/// One merged spectrum cluster with the seminorms contributing it.
#[derive(Debug, Clone)]
pub struct SpectrumCluster {
    pub value: C64,
    pub seminorms: Vec<String>,
}

/// Spectrum of an operator seen through a calibration.
///
/// `regular` records that the resolvent vanishes at infinity; for a
/// quotient-bounded operator on a finite-dimensional space the resolvent is
/// rational, so the point at infinity never belongs to the extended spectrum
/// and the flag is always true. It is reported, not recomputed.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Union over seminorms of the induced-operator spectra, cluster-merged.
    pub qp_spectrum: Vec<SpectrumCluster>,
    /// Eigenvalue cluster representatives of the ambient operator.
    pub ambient_spectrum: Vec<C64>,
    /// Radius of boundedness: the largest induced spectral radius.
    pub radius_of_boundedness: f64,
    pub regular: bool,
    /// Spectral radius of each induced quotient operator.
    pub per_seminorm_radii: Vec<(String, f64)>,
}

/// Radius of boundedness, computed exactly as the largest spectral radius
/// among the induced quotient operators. Equal to the limit of
/// `max_p p_hat(T^n)^{1/n}` by the Gelfand formula on each quotient.
pub fn radius_exact(t: &ComplexMatrix, cal: &Calibration) -> Result<f64> {
    let mut radius = 0.0_f64;
    for p in cal.seminorms() {
        let induced = p.induced_operator(t)?;
        radius = radius.max(spectral_radius(&induced.matrix)?);
    }
    Ok(radius)
}

/// Powers of a fixed matrix by binary powering: squarings are computed once
/// and intermediate exponents assembled by multiplication.
struct PowerCache {
    squarings: Vec<ComplexMatrix>,
}

impl PowerCache {
    fn new(t: &ComplexMatrix) -> Self {
        Self {
            squarings: vec![t.clone()],
        }
    }

    fn power(&mut self, n: usize) -> ComplexMatrix {
        assert!(n >= 1);
        while (1usize << (self.squarings.len() - 1)) < n {
            let last = self.squarings.last().unwrap();
            self.squarings.push(last.mul(last));
        }
        let mut result: Option<ComplexMatrix> = None;
        let mut bit = 0;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                let factor = &self.squarings[bit];
                result = Some(match result {
                    None => factor.clone(),
                    Some(acc) => acc.mul(factor),
                });
            }
            e >>= 1;
            bit += 1;
        }
        result.unwrap()
    }
}

/// The sequence `g_n = max_p p_hat(T^n)^{1/n}` for `n = 1..=n_max`,
/// exercising the limit formula for the radius of boundedness directly.
pub fn radius_estimates(t: &ComplexMatrix, cal: &Calibration, n_max: usize) -> Result<Vec<f64>> {
    // Reject unbounded operators up front.
    cal.max_induced_norm(t)?;
    let mut cache = PowerCache::new(t);
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let tn = cache.power(n);
        if !tn.all_finite() {
            return Err(Error::Overflow { at_power: n });
        }
        let b = cal.max_member_norm(&tn);
        if !b.is_finite() {
            return Err(Error::Overflow { at_power: n });
        }
        out.push(b.powf(1.0 / n as f64));
    }
    Ok(out)
}

/// Neumann inversion of `I - T` with a certified geometric tail.
#[derive(Debug, Clone)]
pub struct NeumannResult {
    /// The truncated series `sum_{n=0}^{terms} T^n`.
    pub inverse: ComplexMatrix,
    /// Last power included in the sum.
    pub terms: usize,
    /// Certified ratio `g = max_p p_hat(T^{n0})^{1/n0} < 1`.
    pub certified_ratio: f64,
    /// `max_p p_hat((I - T) sum - I)` after truncation.
    pub residual: f64,
}

/// Sum the Neumann series for `(I - T)^{-1}`, truncating once the term
/// seminorms fall below `tol * (1 - g)` for a certified ratio `g < 1`.
pub fn neumann_inverse(t: &ComplexMatrix, cal: &Calibration, tol: f64) -> Result<NeumannResult> {
    let radius = radius_exact(t, cal)?;
    if radius >= 1.0 - 1e-9 {
        return Err(Error::RadiusNotLessThanOne { radius });
    }
    let dim = t.rows();

    // Geometric-tail certificate: the first n0 with p_hat(T^{n0})^{1/n0} < 1.
    // The scan normally succeeds within 2*dim; it is extended only for
    // extreme transient growth, where the bound still certifies once found.
    let mut cache = PowerCache::new(t);
    let mut certified_ratio = f64::INFINITY;
    for n0 in 1..=(2 * dim).max(2) {
        let g = cal.max_member_norm(&cache.power(n0)).powf(1.0 / n0 as f64);
        if g < 1.0 {
            certified_ratio = g;
            break;
        }
    }
    if !certified_ratio.is_finite() {
        let mut n0 = 2 * dim;
        while n0 < 4096 {
            n0 *= 2;
            let g = cal.max_member_norm(&cache.power(n0)).powf(1.0 / n0 as f64);
            if g < 1.0 {
                certified_ratio = g;
                break;
            }
        }
    }
    if !certified_ratio.is_finite() {
        return Err(Error::ConvergenceFailure { iterations: 4096 });
    }

    let identity = ComplexMatrix::identity(dim);
    let mut sum = identity.clone();
    let mut term = identity.clone();
    let cutoff = tol * (1.0 - certified_ratio);
    let mut terms = 0usize;
    for n in 1..=100_000usize {
        term = term.mul(t);
        sum = sum.add(&term);
        terms = n;
        let b = cal.max_member_norm(&term);
        if b <= cutoff {
            break;
        }
    }

    // (I - T) sum_{n<=N} T^n telescopes to I - T^{N+1}.
    let shifted = identity.sub(t);
    let residual = cal.max_member_norm(&shifted.mul(&sum).sub(&identity));
    Ok(NeumannResult {
        inverse: sum,
        terms,
        certified_ratio,
        residual,
    })
}

/// The resolvent `R(lambda, T) = (lambda I - T)^{-1}`.
pub fn resolvent(t: &ComplexMatrix, lambda: C64) -> Result<ComplexMatrix> {
    let n = t.rows();
    let mut shifted = t.scale(C64::new(-1.0, 0.0));
    for i in 0..n {
        shifted[(i, i)] += lambda;
    }
    solve(&shifted, &ComplexMatrix::identity(n)).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::SpectrumHit(lambda),
        other => other,
    })
}

/// `d^n/dlambda^n R(lambda, T) = (-1)^n n! R(lambda, T)^{n+1}`.
pub fn resolvent_derivative(t: &ComplexMatrix, lambda: C64, n: usize) -> Result<ComplexMatrix> {
    let r = resolvent(t, lambda)?;
    let mut factorial = 1.0_f64;
    for k in 1..=n {
        factorial *= k as f64;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(r.pow(n + 1).scale(C64::new(sign * factorial, 0.0)))
}

/// Spectrum through the calibration: per-seminorm induced spectra merged
/// into clusters tagged with their contributing seminorms.
pub fn qp_spectrum(t: &ComplexMatrix, cal: &Calibration, cluster_tol: f64) -> Result<SpectralReport> {
    // Per-seminorm spectra and radii.
    let mut contributions: Vec<(C64, String)> = Vec::new();
    let mut per_seminorm_radii = Vec::with_capacity(cal.seminorms().len());
    for p in cal.seminorms() {
        let induced = p.induced_operator(t)?;
        let raw = eigenvalues(&induced.matrix)?;
        let radius = raw.iter().map(|l| l.norm()).fold(0.0, f64::max);
        per_seminorm_radii.push((p.name().to_string(), radius));
        for cluster in cluster_points(&raw, cluster_tol) {
            contributions.push((cluster.representative, p.name().to_string()));
        }
    }

    // Merge contributions across seminorms.
    let points: Vec<C64> = contributions.iter().map(|(v, _)| *v).collect();
    let merged = cluster_points(&points, cluster_tol);
    check_cluster_separation(&merged, cluster_tol)?;
    let mut qp_clusters = Vec::with_capacity(merged.len());
    for cluster in &merged {
        let mut names: Vec<String> = cluster
            .member_indices
            .iter()
            .map(|&i| contributions[i].1.clone())
            .collect();
        names.sort();
        names.dedup();
        qp_clusters.push(SpectrumCluster {
            value: cluster.representative,
            seminorms: names,
        });
    }

    let ambient_raw = eigenvalues(t)?;
    let ambient_clusters = cluster_points(&ambient_raw, cluster_tol);
    check_cluster_separation(&ambient_clusters, cluster_tol)?;
    let ambient_spectrum = ambient_clusters
        .into_iter()
        .map(|c| c.representative)
        .collect();

    let radius_of_boundedness = per_seminorm_radii
        .iter()
        .map(|(_, r)| *r)
        .fold(0.0, f64::max);

    Ok(SpectralReport {
        qp_spectrum: qp_clusters,
        ambient_spectrum,
        radius_of_boundedness,
        regular: true,
        per_seminorm_radii,
    })
}

/// One circle of the resolvent decay profile.
#[derive(Debug, Clone)]
pub struct DecaySample {
    pub radius: f64,
    /// Largest `max_p p_hat(R(lambda, T))` over the circle samples.
    pub resolvent_norm: f64,
    /// Largest `max_p p_hat(R(1, T/lambda) - I)` over the circle samples.
    pub scaled_gap: f64,
}

/// Sample `p_hat(R(lambda, T))` and `p_hat(R(1, T/lambda) - I)` on circles
/// of the given radii (16 points each), witnessing the decay of the
/// resolvent at infinity.
pub fn resolvent_limits_check(
    t: &ComplexMatrix,
    cal: &Calibration,
    radii: &[f64],
) -> Result<Vec<DecaySample>> {
    cal.max_induced_norm(t)?;
    let n = t.rows();
    let identity = ComplexMatrix::identity(n);
    let mut samples = Vec::with_capacity(radii.len());
    for &radius in radii {
        let mut resolvent_norm = 0.0_f64;
        let mut scaled_gap = 0.0_f64;
        for k in 0..16 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
            let lambda = C64::new(0.0, theta).exp() * radius;
            let r = resolvent(t, lambda)?;
            resolvent_norm = resolvent_norm.max(cal.max_member_norm(&r));
            // R(1, T/lambda) = (I - T/lambda)^{-1}
            let scaled = identity.sub(&t.scale(1.0 / lambda));
            let r1 = solve(&scaled, &identity).map_err(|e| match e {
                Error::SingularMatrix { .. } => Error::SpectrumHit(lambda),
                other => other,
            })?;
            scaled_gap = scaled_gap.max(cal.max_member_norm(&r1.sub(&identity)));
        }
        samples.push(DecaySample {
            radius,
            resolvent_norm,
            scaled_gap,
        });
    }
    Ok(samples)
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let one_sided = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}
