//! Calibrations: finite separating families of matrix-induced seminorms,
//! their null spaces and quotient coordinates, and the operators induced on
//! the quotients.
//!
//! A seminorm is `p(x) = |A_p x|_2` for a defining matrix `A_p`. Its null
//! space `N_p = ker A_p`, quotient coordinates, and weights all come from one
//! SVD of `A_p`, taken once at construction:
//!
//! * `quotient_coords = V_r^*` maps `x` to coordinates `z` on the quotient,
//! * `weight = diag(sigma_1..sigma_r)` carries the norm: `p(x) = |M z|_2`.
//!
//! An operator `T` is quotient bounded when every `N_p` is `T`-invariant;
//! the induced quotient operator is then `T_p = V_r^* T V_r` and the best
//! domination constant `p_hat(T)` is the spectral norm of `M T_p M^{-1}`.

use crate::error::{Error, Result};
use crate::linalg::svd::{spectral_norm, svd, RANK_REL_TOL};
use crate::matrix::{ComplexMatrix, ComplexVector};

/// Default relative tolerance separating structural null-space invariance
/// from roundoff.
pub const INVARIANCE_REL_TOL: f64 = 1e-10;

/// A matrix-induced seminorm with its cached quotient factorization.
#[derive(Debug, Clone)]
pub struct Seminorm {
    name: String,
    defining_matrix: ComplexMatrix,
    rank: usize,
    /// `V_r^*`: rank x n map from points to quotient coordinates.
    quotient_coords: ComplexMatrix,
    /// `V_r`: n x rank section of the quotient map (orthonormal columns).
    section: ComplexMatrix,
    /// Positive singular values `sigma_1..sigma_r` (the norm-carrying weight).
    weight: Vec<f64>,
    /// Orthonormal basis of the null space, when nontrivial.
    null_basis: Option<ComplexMatrix>,
}

impl Seminorm {
    pub fn new(name: impl Into<String>, defining_matrix: ComplexMatrix) -> Result<Self> {
        let name = name.into();
        let decomposition = svd(&defining_matrix);
        let rank = decomposition.rank(RANK_REL_TOL);
        if rank == 0 {
            return Err(Error::Validation(format!(
                "seminorm `{name}` is identically zero (defining matrix has rank 0)"
            )));
        }
        let section = decomposition.range_of_adjoint(rank);
        let quotient_coords = section.adjoint();
        let weight = decomposition.singular_values[..rank].to_vec();
        let null_basis = decomposition.null_space(RANK_REL_TOL);
        Ok(Self {
            name,
            defining_matrix,
            rank,
            quotient_coords,
            section,
            weight,
            null_basis,
        })
    }

    /// Euclidean norm on `C^dim` (identity defining matrix).
    pub fn euclidean(dim: usize) -> Self {
        Self::new("euclidean", ComplexMatrix::identity(dim)).expect("identity has full rank")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn defining_matrix(&self) -> &ComplexMatrix {
        &self.defining_matrix
    }

    pub fn space_dim(&self) -> usize {
        self.defining_matrix.cols()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn quotient_coords(&self) -> &ComplexMatrix {
        &self.quotient_coords
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn null_basis(&self) -> Option<&ComplexMatrix> {
        self.null_basis.as_ref()
    }

    /// Evaluate the seminorm: `p(x) = |A_p x|_2`.
    pub fn evaluate(&self, x: &ComplexVector) -> Result<f64> {
        if x.dim() != self.space_dim() {
            return Err(Error::DimensionMismatch(format!(
                "seminorm `{}` expects dimension {}, got {}",
                self.name,
                self.space_dim(),
                x.dim()
            )));
        }
        Ok(self.defining_matrix.apply(x).norm())
    }

    /// Evaluate through the quotient coordinates: `|M (V_r^* x)|_2`.
    /// Agrees with `evaluate` to machine precision.
    pub fn evaluate_via_quotient(&self, x: &ComplexVector) -> Result<f64> {
        if x.dim() != self.space_dim() {
            return Err(Error::DimensionMismatch(format!(
                "seminorm `{}` expects dimension {}, got {}",
                self.name,
                self.space_dim(),
                x.dim()
            )));
        }
        let z = self.quotient_coords.apply(x);
        Ok((0..self.rank)
            .map(|i| (z[i] * self.weight[i]).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Spectral norm of `A_p T K_p`: how far `T` moves the null space out of
    /// itself. Zero (up to roundoff) exactly when `N_p` is `T`-invariant.
    pub fn invariance_residual(&self, t: &ComplexMatrix) -> f64 {
        match &self.null_basis {
            None => 0.0,
            Some(k) => spectral_norm(&self.defining_matrix.mul(&t.mul(k))),
        }
    }

    /// Tolerance against which the invariance residual is judged.
    pub fn invariance_limit(&self, t: &ComplexMatrix, rel_tol: f64) -> f64 {
        rel_tol * self.defining_matrix.op_norm_est().max(f64::MIN_POSITIVE)
            * t.op_norm_est().max(f64::MIN_POSITIVE)
    }

    fn check_invariance(&self, t: &ComplexMatrix) -> Result<()> {
        if t.rows() != self.space_dim() || !t.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be {0}x{0} for seminorm `{1}`, got {2}x{3}",
                self.space_dim(),
                self.name,
                t.rows(),
                t.cols()
            )));
        }
        let residual = self.invariance_residual(t);
        let limit = self.invariance_limit(t, INVARIANCE_REL_TOL);
        if residual > limit {
            return Err(Error::NotQuotientBounded {
                seminorm: self.name.clone(),
                residual,
                limit,
            });
        }
        Ok(())
    }

    /// Matrix of the induced operator on quotient coordinates: `V_r^* T V_r`.
    fn induced_matrix(&self, t: &ComplexMatrix) -> ComplexMatrix {
        self.quotient_coords.mul(&t.mul(&self.section))
    }

    /// Conjugate the induced matrix by the weight: `M T_p M^{-1}`, whose
    /// Euclidean spectral norm is `p_hat(T)`.
    fn weighted_induced(&self, t_p: &ComplexMatrix) -> ComplexMatrix {
        let r = self.rank;
        let mut w = ComplexMatrix::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                w[(i, j)] = t_p[(i, j)] * (self.weight[i] / self.weight[j]);
            }
        }
        w
    }

    /// Best constant in `p(Tx) <= c p(x)`: the operator norm of the induced
    /// quotient operator. Fails when the null space is not `T`-invariant.
    pub fn induced_norm(&self, t: &ComplexMatrix) -> Result<f64> {
        self.check_invariance(t)?;
        Ok(spectral_norm(&self.weighted_induced(&self.induced_matrix(t))))
    }

    /// Induced norm without the invariance gate, for matrices that belong to
    /// the quotient-bounded algebra by construction (powers, brackets,
    /// resolvents, and sums of already-checked operators). On such members
    /// any null-space leakage is roundoff and the compression is the correct
    /// induced matrix up to that roundoff.
    pub(crate) fn member_norm(&self, m: &ComplexMatrix) -> f64 {
        debug_assert_eq!(m.rows(), self.space_dim());
        debug_assert!(m.is_square());
        spectral_norm(&self.weighted_induced(&self.induced_matrix(m)))
    }

    /// The induced quotient operator together with its norm.
    pub fn induced_operator(&self, t: &ComplexMatrix) -> Result<QuotientOperator> {
        self.check_invariance(t)?;
        let matrix = self.induced_matrix(t);
        let norm = spectral_norm(&self.weighted_induced(&matrix));
        Ok(QuotientOperator {
            seminorm_name: self.name.clone(),
            matrix,
            norm,
        })
    }
}

/// Operator induced on a quotient space, with its operator norm in the
/// weighted quotient coordinates.
#[derive(Debug, Clone)]
pub struct QuotientOperator {
    pub seminorm_name: String,
    /// rank x rank action on quotient coordinates.
    pub matrix: ComplexMatrix,
    /// `p_hat(T)`, the operator norm in the quotient norm.
    pub norm: f64,
}

/// Per-seminorm boundedness certificate.
#[derive(Debug, Clone)]
pub struct SeminormCertificate {
    pub seminorm: String,
    pub invariant: bool,
    pub residual: f64,
    pub limit: f64,
    /// `p_hat(T)` when the null space is invariant.
    pub bound: Option<f64>,
}

/// Decision returned by [`Calibration::is_quotient_bounded`].
#[derive(Debug, Clone)]
pub struct BoundednessReport {
    pub bounded: bool,
    pub certificates: Vec<SeminormCertificate>,
}

/// A finite separating family of seminorms on `C^dim`.
#[derive(Debug, Clone)]
pub struct Calibration {
    space_dim: usize,
    seminorms: Vec<Seminorm>,
}

impl Calibration {
    /// Build a calibration, rejecting empty or non-separating families.
    pub fn new(space_dim: usize, seminorms: Vec<Seminorm>) -> Result<Self> {
        let cal = Self::new_allow_degenerate(space_dim, seminorms)?;
        let joint_rank = cal.joint_rank();
        if joint_rank < space_dim {
            return Err(Error::Validation(format!(
                "calibration is not separating: stacked defining matrices have rank {joint_rank} < {space_dim}"
            )));
        }
        Ok(cal)
    }

    /// Build without the separating check (experiments only).
    pub fn new_allow_degenerate(space_dim: usize, seminorms: Vec<Seminorm>) -> Result<Self> {
        if seminorms.is_empty() {
            return Err(Error::Validation(
                "calibration must contain at least one seminorm".into(),
            ));
        }
        for p in &seminorms {
            if p.space_dim() != space_dim {
                return Err(Error::DimensionMismatch(format!(
                    "seminorm `{}` is defined on dimension {}, calibration expects {space_dim}",
                    p.name(),
                    p.space_dim()
                )));
            }
        }
        for i in 0..seminorms.len() {
            for j in i + 1..seminorms.len() {
                if seminorms[i].name() == seminorms[j].name() {
                    return Err(Error::Validation(format!(
                        "duplicate seminorm name `{}`",
                        seminorms[i].name()
                    )));
                }
            }
        }
        Ok(Self {
            space_dim,
            seminorms,
        })
    }

    /// The single-Euclidean-norm calibration on `C^dim`.
    pub fn euclidean(dim: usize) -> Self {
        Self::new(dim, vec![Seminorm::euclidean(dim)]).expect("euclidean calibration is separating")
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn seminorms(&self) -> &[Seminorm] {
        &self.seminorms
    }

    /// Numerical rank of the stacked defining matrices.
    fn joint_rank(&self) -> usize {
        let total_rows: usize = self.seminorms.iter().map(|p| p.defining_matrix().rows()).sum();
        let mut stacked = ComplexMatrix::zeros(total_rows, self.space_dim);
        let mut row = 0;
        for p in &self.seminorms {
            let a = p.defining_matrix();
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    stacked[(row, j)] = a[(i, j)];
                }
                row += 1;
            }
        }
        svd(&stacked).rank(RANK_REL_TOL)
    }

    /// Whether the stacked defining matrices separate points.
    pub fn is_separating(&self) -> bool {
        self.joint_rank() == self.space_dim
    }

    /// Decide quotient boundedness of `T`, with a per-seminorm certificate.
    /// `rel_tol` scales the invariance limit (`INVARIANCE_REL_TOL` default).
    pub fn is_quotient_bounded(&self, t: &ComplexMatrix, rel_tol: f64) -> Result<BoundednessReport> {
        if t.rows() != self.space_dim || !t.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be {0}x{0}, got {1}x{2}",
                self.space_dim,
                t.rows(),
                t.cols()
            )));
        }
        let mut certificates = Vec::with_capacity(self.seminorms.len());
        let mut bounded = true;
        for p in &self.seminorms {
            let residual = p.invariance_residual(t);
            let limit = p.invariance_limit(t, rel_tol);
            let invariant = residual <= limit;
            let bound = if invariant {
                Some(spectral_norm(&p.weighted_induced(&p.induced_matrix(t))))
            } else {
                bounded = false;
                None
            };
            certificates.push(SeminormCertificate {
                seminorm: p.name().to_string(),
                invariant,
                residual,
                limit,
                bound,
            });
        }
        Ok(BoundednessReport {
            bounded,
            certificates,
        })
    }

    /// `max_p p_hat(T)` over the calibration. Errors if any null space is
    /// not invariant.
    pub fn max_induced_norm(&self, t: &ComplexMatrix) -> Result<f64> {
        let mut max = 0.0_f64;
        for p in &self.seminorms {
            max = max.max(p.induced_norm(t)?);
        }
        Ok(max)
    }

    /// `max_p p_hat(M)` for a member of the quotient-bounded algebra; see
    /// [`Seminorm::member_norm`].
    pub(crate) fn max_member_norm(&self, m: &ComplexMatrix) -> f64 {
        self.seminorms
            .iter()
            .map(|p| p.member_norm(m))
            .fold(0.0, f64::max)
    }

    /// All induced quotient operators, in calibration order.
    pub fn induced_operators(&self, t: &ComplexMatrix) -> Result<Vec<QuotientOperator>> {
        self.seminorms.iter().map(|p| p.induced_operator(t)).collect()
    }
}
