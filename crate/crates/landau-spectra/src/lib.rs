//! Spectral toolkit for the Landau Hamiltonian on R^{2d}: level projections
//! and ladder algebra, the resolvent kernel G0 with its diagonal-singularity
//! expansion, Toeplitz operators P_q chi_U P_q and their eigenvalue
//! asymptotics, logarithmic capacity of planar domains, and Nystrom
//! discretizations of the magnetic single/double layer operators with the
//! Dirichlet-to-Robin calculus on smooth curves.

pub mod bie;
pub mod capacity;
pub mod curve;
pub mod green;
pub mod landau;
pub mod precision;
pub mod quad;
pub mod toeplitz;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("axis index {index} out of range 1..={dim}")]
    AxisOutOfRange { index: usize, dim: usize },
    #[error("curve is invalid: {0}")]
    InvalidCurve(String),
    #[error("linear system is numerically singular: {0}")]
    SingularSystem(String),
    #[error("quadrature failed to converge")]
    QuadratureNonconvergence,
    #[error("insufficient working precision: {0}")]
    PrecisionLoss(String),
    #[error("extrapolation failed to converge: {0}")]
    ExtrapolationFailure(String),
    #[error("curve file parse error at line {line}: {msg}")]
    CurveParse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
