//! Factorization quality at the upper end of the intended scale, and
//! clustered projections on defective structure with an appropriate
//! tolerance.

mod common;

use common::{random_matrix, random_unitary};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qbo_core::linalg::{
    eigendecompose, quadrature_radius, riesz_projection_quadrature, schur,
    semisimple_part, DEFAULT_QUADRATURE_NODES,
};
use qbo_core::matrix::ComplexMatrix;

#[test]
fn schur_residuals_up_to_dim_32() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for &dim in &[12usize, 16, 24, 32] {
        for _ in 0..2 {
            let a = random_matrix(&mut rng, dim, 1.0);
            let s = schur(&a).unwrap();
            let residual = s.q.mul(&s.t).mul(&s.q.adjoint()).sub(&a).max_abs();
            let unitarity = s
                .q
                .adjoint()
                .mul(&s.q)
                .sub(&ComplexMatrix::identity(dim))
                .max_abs();
            assert!(
                residual < 1e-11 * (1.0 + a.max_abs()) * dim as f64,
                "dim {dim}: residual {residual:.3e}"
            );
            assert!(unitarity < 1e-13 * dim as f64, "dim {dim}: unitarity {unitarity:.3e}");
        }
    }
}

/// Four hidden Jordan blocks of index 3 at dimension 12. Computed
/// eigenvalues of an index-3 block scatter at about eps^{1/3} (~6e-6), so
/// the clustering tolerance must sit above that scatter; the block gaps
/// (~2) leave plenty of room.
#[test]
fn defective_blocks_cluster_with_structure_tolerance() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let dim = 12;
    let lambdas = [
        C64::new(1.0, 0.5),
        C64::new(-1.0, -0.3),
        C64::new(0.2, 2.0),
        C64::new(2.5, -1.5),
    ];
    for _ in 0..3 {
        let mut inner = ComplexMatrix::zeros(dim, dim);
        let mut offset = 0;
        for lambda in &lambdas {
            for i in 0..3 {
                inner[(offset + i, offset + i)] = *lambda;
                if i + 1 < 3 {
                    inner[(offset + i, offset + i + 1)] = C64::new(1.0, 0.0);
                }
            }
            offset += 3;
        }
        let q = random_unitary(&mut rng, dim);
        let t = q.mul(&inner).mul(&q.adjoint());

        let cluster_tol = 1e-4;
        let d = eigendecompose(&t, cluster_tol).unwrap();
        assert_eq!(d.cluster_count(), 4);
        assert_eq!(d.multiplicities, vec![3; 4]);

        let mut sum = ComplexMatrix::zeros(dim, dim);
        for p in &d.projections {
            sum = sum.add(p);
        }
        assert!(sum.sub(&ComplexMatrix::identity(dim)).max_abs() < 1e-9);

        // Quadrature route agrees on every cluster.
        for i in 0..4 {
            let pq = riesz_projection_quadrature(
                &t,
                d.eigenvalues[i],
                quadrature_radius(&d, i),
                DEFAULT_QUADRATURE_NODES,
            )
            .unwrap();
            let agreement = pq.sub(&d.projections[i]).max_abs();
            assert!(agreement < 1e-8, "cluster {i}: {agreement:.3e}");
        }

        // Jordan-Chevalley at the same tolerance.
        let ss = semisimple_part(&t, cluster_tol).unwrap();
        let norm = t.op_norm_est();
        let commutator = t.mul(&ss).sub(&ss.mul(&t)).max_abs();
        assert!(commutator < 1e-8 * norm * norm);
        let nilpotent = t.sub(&ss).pow(3).max_abs();
        assert!(nilpotent < 1e-7, "nilpotency residual {nilpotent:.3e}");
    }
}
