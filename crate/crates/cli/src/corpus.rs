//! Deterministic scenario generation for the property corpora.
//!
//! Every kind is a pure function of (seed, dim): the same arguments yield a
//! byte-identical scenario.

use std::str::FromStr;

use indexmap::IndexMap;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use qbo_core::calibration::{Calibration, Seminorm, INVARIANCE_REL_TOL};
use qbo_core::linalg::eigen::eigendecompose_default;
use qbo_core::linalg::svd::{svd, RANK_REL_TOL};
use qbo_core::matrix::{ComplexMatrix, ComplexVector};

use crate::error::CliError;
use crate::scenario::{NamedMatrix, Scenario, Settings};

/// Corpus families.
///
/// * `shared-semisimple`: two operators with the same semisimple part
///   (equivalent by construction),
/// * `nilpotent-pair`: two independent nilpotents (both semisimple parts are
///   zero, so equivalent),
/// * `permuted-diagonal`: same spectrum, different semisimple parts (not
///   equivalent),
/// * `random-dense`: three dense operators with entries bounded by 2, plus a
///   calibration whose nontrivial kernels are invariant subspaces of `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    SharedSemisimple,
    NilpotentPair,
    PermutedDiagonal,
    RandomDense,
}

impl FromStr for CorpusKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "shared-semisimple" => Ok(Self::SharedSemisimple),
            "nilpotent-pair" => Ok(Self::NilpotentPair),
            "permuted-diagonal" => Ok(Self::PermutedDiagonal),
            "random-dense" => Ok(Self::RandomDense),
            other => Err(CliError::UnknownKind(other.to_string())),
        }
    }
}

impl CorpusKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SharedSemisimple => "shared-semisimple",
            Self::NilpotentPair => "nilpotent-pair",
            Self::PermutedDiagonal => "permuted-diagonal",
            Self::RandomDense => "random-dense",
        }
    }
}

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

/// Block eigenvalues around a ring of radius 0.9 with a random phase offset:
/// operator norms stay near one while block gaps stay O(1), the separation
/// the exact-cutoff equivalence threshold requires.
fn ring_values(rng: &mut ChaCha8Rng, sizes: &[usize]) -> Vec<C64> {
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

fn block_sizes(rng: &mut ChaCha8Rng, dim: usize) -> Vec<usize> {
    let first = if dim >= 2 { 2 } else { 1 };
    let mut sizes = vec![first];
    let mut used = first;
    while used < dim {
        let s = (1 + rng.gen_range(0..2)).min(dim - used);
        sizes.push(s);
        used += s;
    }
    sizes
}

/// Jordan-structured operators with a shared semisimple part: a common
/// eigenvalue pattern plus independent nilpotents that stay inside the
/// repeated-eigenvalue blocks (so they commute with the pattern).
pub struct SharedSemisimpleFamily {
    sizes: Vec<usize>,
    values: Vec<C64>,
    basis: ComplexMatrix,
}

impl SharedSemisimpleFamily {
    pub fn sample(rng: &mut ChaCha8Rng, dim: usize) -> Self {
        let sizes = block_sizes(rng, dim);
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

/// Matrix-level pair generators used by the property suites.
pub fn shared_semisimple_pair(rng: &mut ChaCha8Rng, dim: usize) -> (ComplexMatrix, ComplexMatrix) {
    let family = SharedSemisimpleFamily::sample(rng, dim);
    (family.operator(rng), family.operator(rng))
}

pub fn nilpotent_pair(rng: &mut ChaCha8Rng, dim: usize) -> (ComplexMatrix, ComplexMatrix) {
    let nil = |rng: &mut ChaCha8Rng| {
        let mut n = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i + 1..dim {
                n[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let q = random_unitary(rng, dim);
        q.mul(&n).mul(&q.adjoint())
    };
    (nil(rng), nil(rng))
}

pub fn permuted_diagonal_pair(rng: &mut ChaCha8Rng, dim: usize) -> (ComplexMatrix, ComplexMatrix) {
    assert!(dim >= 2);
    let values = ring_values(rng, &vec![1usize; dim]);
    let mut permuted = values.clone();
    permuted.swap(0, 1);
    let q = random_unitary(rng, dim);
    let t = q.mul(&ComplexMatrix::diagonal(&values)).mul(&q.adjoint());
    let s = q.mul(&ComplexMatrix::diagonal(&permuted)).mul(&q.adjoint());
    (t, s)
}

/// Non-equivalent pair whose semisimple parts differ by a diagonal shift of
/// modulus 0.9: the bracket norms then sit at 0.9^n, an O(1) spectral gap
/// on every component, while cluster separation is untouched.
pub fn spectral_gap_pair(rng: &mut ChaCha8Rng, dim: usize) -> (ComplexMatrix, ComplexMatrix) {
    let family = SharedSemisimpleFamily::sample(rng, dim);
    let t = family.operator(rng);
    let delta = C64::new(0.0, rng.gen_range(0.0..std::f64::consts::TAU)).exp() * 0.9;
    let mut s = family.operator(rng);
    for i in 0..dim {
        s[(i, i)] += delta;
    }
    (t, s)
}

/// A two-seminorm full-rank calibration (Euclidean plus a mildly mixed
/// anchor): every operator is quotient bounded for it.
fn full_rank_calibration(rng: &mut ChaCha8Rng, dim: usize) -> Vec<NamedMatrix> {
    let mut anchor = ComplexMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            anchor[(i, j)] += C64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        }
    }
    vec![
        NamedMatrix {
            name: "euclidean".into(),
            matrix: Scenario::encode_matrix(&ComplexMatrix::identity(dim)),
        },
        NamedMatrix {
            name: "anchor".into(),
            matrix: Scenario::encode_matrix(&anchor),
        },
    ]
}

/// Calibration whose nontrivial kernels are invariant subspaces of `t`,
/// built from random subsets of its eigenvalue clusters, plus a full-rank
/// anchor that keeps the family separating.
pub fn invariant_kernel_calibration(
    rng: &mut ChaCha8Rng,
    t: &ComplexMatrix,
) -> Result<Calibration, CliError> {
    let dim = t.rows();
    let decomp = eigendecompose_default(t)?;
    let mut seminorms = Vec::new();
    let mut anchor = ComplexMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            anchor[(i, j)] += C64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        }
    }
    seminorms.push(Seminorm::new("anchor", anchor).map_err(CliError::Core)?);

    if decomp.cluster_count() >= 2 {
        for variant in 0..2 {
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
            if let Some(complement) = svd(&stacked.adjoint()).null_space(RANK_REL_TOL) {
                let mut mix = ComplexMatrix::identity(complement.cols());
                for i in 0..mix.rows() {
                    for j in 0..mix.cols() {
                        mix[(i, j)] += C64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
                    }
                }
                let defining = mix.mul(&complement.adjoint());
                seminorms
                    .push(Seminorm::new(format!("invariant{variant}"), defining).map_err(CliError::Core)?);
            }
        }
    }
    Calibration::new(dim, seminorms).map_err(CliError::Core)
}

/// Generate a deterministic scenario of the given kind.
pub fn generate_corpus(seed: u64, dim: usize, kind: CorpusKind) -> Result<Scenario, CliError> {
    if dim == 0 || dim > 16 {
        return Err(CliError::Validation(format!(
            "corpus dimension must be in 1..=16, got {dim}"
        )));
    }
    if kind == CorpusKind::PermutedDiagonal && dim < 2 {
        return Err(CliError::Validation(
            "permuted-diagonal needs dimension at least 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut operators: IndexMap<String, Vec<Vec<crate::scenario::Cx>>> = IndexMap::new();
    let calibration;
    match kind {
        CorpusKind::SharedSemisimple => {
            let (t, s) = shared_semisimple_pair(&mut rng, dim);
            operators.insert("T".into(), Scenario::encode_matrix(&t));
            operators.insert("S".into(), Scenario::encode_matrix(&s));
            calibration = full_rank_calibration(&mut rng, dim);
        }
        CorpusKind::NilpotentPair => {
            let (t, s) = nilpotent_pair(&mut rng, dim);
            operators.insert("T".into(), Scenario::encode_matrix(&t));
            operators.insert("S".into(), Scenario::encode_matrix(&s));
            calibration = full_rank_calibration(&mut rng, dim);
        }
        CorpusKind::PermutedDiagonal => {
            let (t, s) = permuted_diagonal_pair(&mut rng, dim);
            operators.insert("T".into(), Scenario::encode_matrix(&t));
            operators.insert("S".into(), Scenario::encode_matrix(&s));
            calibration = full_rank_calibration(&mut rng, dim);
        }
        CorpusKind::RandomDense => {
            // Entries bounded by 2 in modulus; retry until T's spectrum
            // clusters cleanly so the invariant-kernel construction works.
            let mut t = random_matrix(&mut rng, dim, 1.0);
            let mut guard = 0;
            while eigendecompose_default(&t).is_err() {
                t = random_matrix(&mut rng, dim, 1.0);
                guard += 1;
                assert!(guard < 64, "random-dense generator failed to find a matrix");
            }
            let s = random_matrix(&mut rng, dim, 1.0);
            let r = random_matrix(&mut rng, dim, 1.0);
            operators.insert("T".into(), Scenario::encode_matrix(&t));
            operators.insert("S".into(), Scenario::encode_matrix(&s));
            operators.insert("R".into(), Scenario::encode_matrix(&r));
            let cal = invariant_kernel_calibration(&mut rng, &t)?;
            calibration = cal
                .seminorms()
                .iter()
                .map(|p| NamedMatrix {
                    name: p.name().to_string(),
                    matrix: Scenario::encode_matrix(p.defining_matrix()),
                })
                .collect();
            // The kernels must be invariant for T by construction.
            debug_assert!(cal.is_quotient_bounded(&t, INVARIANCE_REL_TOL).unwrap().bounded);
        }
    }

    let mut vectors = IndexMap::new();
    vectors.insert(
        "x".to_string(),
        Scenario::encode_vector(&random_vector(&mut rng, dim, 1.0)),
    );
    vectors.insert(
        "y".to_string(),
        Scenario::encode_vector(&random_vector(&mut rng, dim, 1.0)),
    );

    Ok(Scenario {
        space_dim: dim,
        calibration,
        operators,
        vectors,
        settings: Settings::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qbo_core::qnequiv::{decide_equivalence, EQUIVALENCE_REL_TOL};

    #[test]
    fn generation_is_deterministic() {
        for kind in [
            CorpusKind::SharedSemisimple,
            CorpusKind::NilpotentPair,
            CorpusKind::PermutedDiagonal,
            CorpusKind::RandomDense,
        ] {
            let a = generate_corpus(1, 3, kind).unwrap().to_json();
            let b = generate_corpus(1, 3, kind).unwrap().to_json();
            assert_eq!(a, b, "{kind:?} not deterministic");
            let c = generate_corpus(2, 3, kind).unwrap().to_json();
            assert_ne!(a, c, "{kind:?} ignores the seed");
        }
    }

    #[test]
    fn shared_semisimple_pairs_are_equivalent() {
        let scenario = generate_corpus(1, 3, CorpusKind::SharedSemisimple).unwrap();
        let cal = scenario.build_calibration().unwrap();
        let t = scenario.operator("T").unwrap();
        let s = scenario.operator("S").unwrap();
        let verdict = decide_equivalence(&t, &s, &cal, EQUIVALENCE_REL_TOL).unwrap();
        assert!(verdict.equivalent && verdict.oracle_agrees);
    }

    #[test]
    fn permuted_diagonal_pairs_are_not_equivalent() {
        let scenario = generate_corpus(1, 3, CorpusKind::PermutedDiagonal).unwrap();
        let cal = scenario.build_calibration().unwrap();
        let t = scenario.operator("T").unwrap();
        let s = scenario.operator("S").unwrap();
        let verdict = decide_equivalence(&t, &s, &cal, EQUIVALENCE_REL_TOL).unwrap();
        assert!(!verdict.equivalent && verdict.oracle_agrees);
    }

    #[test]
    fn random_dense_operator_is_bounded_for_its_calibration() {
        for seed in 0..5 {
            let scenario = generate_corpus(seed, 4, CorpusKind::RandomDense).unwrap();
            let cal = scenario.build_calibration().unwrap();
            assert!(cal.is_separating());
            let t = scenario.operator("T").unwrap();
            let report = cal.is_quotient_bounded(&t, INVARIANCE_REL_TOL).unwrap();
            assert!(report.bounded, "seed {seed}");
        }
    }

    #[test]
    fn unknown_kind_is_rejected() {
        assert!(matches!(
            "sparse-pair".parse::<CorpusKind>(),
            Err(CliError::UnknownKind(_))
        ));
    }
}
