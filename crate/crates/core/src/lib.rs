//! Calculus of quotient-bounded operators on calibrated finite-dimensional
//! complex spaces.
//!
//! A calibration is a finite separating family of seminorms `p(x) = |A_p x|`.
//! An operator is quotient bounded when every seminorm null space is
//! invariant; it then induces an operator on each quotient space, and the
//! induced operator norms drive a spectral calculus: the radius of
//! boundedness, Neumann inversion, resolvent identities, the
//! union-of-quotient-spectra formula, quasi-nilpotent equivalence through the
//! binomial bracket, and local resolvents with their transfer series.

pub mod calibration;
pub mod error;
pub mod linalg;
pub mod local_spectral;
pub mod matrix;
pub mod qnequiv;
pub mod spectral;

pub use calibration::{Calibration, QuotientOperator, Seminorm};
pub use error::{Error, ErrorClass, Result};
pub use linalg::{SpectralDecomposition, SchurForm, Svd};
pub use matrix::{ComplexMatrix, ComplexVector, C64};
pub use local_spectral::LocalSpectrum;
pub use qnequiv::{BracketSequence, EquivalenceVerdict};
pub use spectral::SpectralReport;
