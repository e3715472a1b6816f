//! Deterministic dense complex linear algebra: factorizations,
//! eigenstructure, Riesz projections, and the Jordan-Chevalley semisimple
//! part. Everything else in the crate builds on these kernels.

pub mod eigen;
pub mod schur;
pub mod solve;
pub mod svd;

pub use eigen::{
    check_cluster_separation, cluster_points, default_cluster_tol, defective_aware_cluster_tol,
    eigendecompose, eigendecompose_default,
    quadrature_radius, riesz_projection_quadrature, semisimple_part, semisimple_part_default,
    PointCluster, SpectralDecomposition, DEFAULT_QUADRATURE_NODES,
};
pub use schur::{eigenvalues, schur, spectral_radius, SchurForm};
pub use solve::{invert, solve, PIVOT_REL_TOL};
pub use svd::{spectral_norm, svd, Svd, RANK_REL_TOL};
