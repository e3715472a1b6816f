//! Deterministic generators for the property suites.
#![allow(dead_code)] // each test target uses a different subset

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qbo_core::calibration::{Calibration, Seminorm};
use qbo_core::linalg::eigen::eigendecompose_default;
use qbo_core::linalg::svd::{svd, RANK_REL_TOL};
use qbo_core::matrix::{ComplexMatrix, ComplexVector};

pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> ComplexMatrix {
    let entries: Vec<_> = (0..dim * dim)
        .map(|_| C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        .collect();
    ComplexMatrix::new(dim, dim, entries).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> ComplexVector {
    ComplexVector::new(
        (0..dim)
            .map(|_| C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
            .collect(),
    )
    .unwrap()
}

pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    svd(&random_matrix(rng, dim, 1.0)).u
}

/// Eigenvalue pattern with repeated blocks, plus block-respecting strictly
/// upper nilpotents (which therefore commute with the pattern).
pub struct JordanTemplate {
    pub sizes: Vec<usize>,
    pub values: Vec<C64>,
    pub basis: ComplexMatrix,
}

impl JordanTemplate {
    pub fn sample(rng: &mut ChaCha8Rng, dim: usize) -> Self {
        let first = if dim >= 2 { 2 } else { 1 };
        let mut sizes = vec![first];
        let mut used = first;
        while used < dim {
            let s = (1 + rng.gen_range(0..2)).min(dim - used);
            sizes.push(s);
            used += s;
        }
        // Eigenvalues on a ring of radius 0.9: keeps operator norms near 1
        // while block separation stays O(1), which the exact-cutoff decision
        // threshold needs to split cleanly.
        let values = ring_values(rng, &sizes);
        let basis = random_unitary(rng, dim);
        Self {
            sizes,
            values,
            basis,
        }
    }

    pub fn semisimple(&self) -> ComplexMatrix {
        let d = ComplexMatrix::diagonal(&self.values);
        self.basis.mul(&d).mul(&self.basis.adjoint())
    }

    /// One operator with this semisimple part: pattern plus a fresh
    /// block-respecting nilpotent, conjugated into the template basis.
    pub fn operator(&self, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut inner = ComplexMatrix::diagonal(&self.values);
        let mut offset = 0;
        for &sz in &self.sizes {
            for i in 0..sz {
                for j in i + 1..sz {
                    inner[(offset + i, offset + j)] =
                        C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                }
            }
            offset += sz;
        }
        self.basis.mul(&inner).mul(&self.basis.adjoint())
    }
}

/// Block eigenvalues spread around a ring of radius 0.9 with a random phase
/// offset and a small jitter; adjacent blocks stay at least ~0.8 apart for
/// up to six blocks.
pub fn ring_values(rng: &mut ChaCha8Rng, sizes: &[usize]) -> Vec<C64> {
    let k = sizes.len();
    let offset = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut values = Vec::new();
    for (bi, &sz) in sizes.iter().enumerate() {
        let theta = offset + std::f64::consts::TAU * bi as f64 / k as f64;
        let lambda = C64::new(0.0, theta).exp() * 0.9
            + C64::new(rng.gen_range(-0.03..0.03), rng.gen_range(-0.03..0.03));
        for _ in 0..sz {
            values.push(lambda);
        }
    }
    values
}

/// Pair sharing a semisimple part: quasi-nilpotent equivalent by construction.
pub fn shared_semisimple_pair(rng: &mut ChaCha8Rng, dim: usize) -> (ComplexMatrix, ComplexMatrix) {
    let template = JordanTemplate::sample(rng, dim);
    (template.operator(rng), template.operator(rng))
}

/// Same-spectrum, non-equivalent pair: a diagonal and a nontrivial
/// permutation of it, in a common basis.
pub fn permuted_diagonal_pair(rng: &mut ChaCha8Rng, dim: usize) -> (ComplexMatrix, ComplexMatrix) {
    assert!(dim >= 2);
    let sizes = vec![1usize; dim];
    let values = ring_values(rng, &sizes);
    let mut permuted = values.clone();
    permuted.swap(0, 1);
    let q = random_unitary(rng, dim);
    let t = q.mul(&ComplexMatrix::diagonal(&values)).mul(&q.adjoint());
    let s = q.mul(&ComplexMatrix::diagonal(&permuted)).mul(&q.adjoint());
    (t, s)
}

/// Calibration whose nontrivial kernels are spans of invariant subspaces of
/// `t` (so `t` is quotient bounded), plus a full-rank seminorm that keeps
/// the family separating.
pub fn invariant_kernel_calibration(rng: &mut ChaCha8Rng, t: &ComplexMatrix) -> Calibration {
    let dim = t.rows();
    let decomp = eigendecompose_default(t).expect("generator matrices decompose");
    let mut seminorms = Vec::new();

    // Full-rank anchor, mildly conditioned.
    let mut anchor = ComplexMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            anchor[(i, j)] += C64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        }
    }
    seminorms.push(Seminorm::new("anchor", anchor).unwrap());

    if decomp.cluster_count() >= 2 {
        for variant in 0..2 {
            // Random nonempty proper subset of clusters as the kernel.
            let k = decomp.cluster_count();
            let mut chosen: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.5)).collect();
            if chosen.is_empty() {
                chosen.push(rng.gen_range(0..k));
            }
            if chosen.len() == k {
                chosen.pop();
            }
            let total: usize = chosen.iter().map(|&i| decomp.multiplicities[i]).sum();
            if total == 0 || total == dim {
                continue;
            }
            let mut stacked = ComplexMatrix::zeros(dim, total);
            let mut col = 0;
            for &i in &chosen {
                let basis = &decomp.subspace_bases[i];
                for j in 0..basis.cols() {
                    for r in 0..dim {
                        stacked[(r, col)] = basis[(r, j)];
                    }
                    col += 1;
                }
            }
            // Rows spanning the orthocomplement of the invariant subspace.
            if let Some(complement) = svd(&stacked.adjoint()).null_space(RANK_REL_TOL) {
                let mut mix = ComplexMatrix::identity(complement.cols());
                for i in 0..mix.rows() {
                    for j in 0..mix.cols() {
                        mix[(i, j)] += C64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
                    }
                }
                let defining = mix.mul(&complement.adjoint());
                seminorms.push(Seminorm::new(format!("invariant{variant}"), defining).unwrap());
            }
        }
    }
    Calibration::new(dim, seminorms).unwrap()
}
