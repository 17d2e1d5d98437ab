//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular or numerically rank-deficient")]
    SingularMatrix,
    #[error("matrix is not hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("determinant is not 1 (|det - 1| = {residual:e})")]
    NotUnimodular { residual: f64 },
    #[error("momentum is off the mass shell (relative residual {residual:e})")]
    OffShell { residual: f64 },
    #[error("momentum is too close to the cone tip (p0 = {p0:e} below floor {floor:e})")]
    NearConeTip { p0: f64, floor: f64 },
    #[error("element does not stabilize the standard momentum (residual {residual:e})")]
    NotStabilizer { residual: f64 },
    #[error("wave functions live on different grids or carry different spin")]
    GridMismatch,
    #[error("rotation is not part of the grid's exact symmetry group and the grid does not support interpolation")]
    NotGridSymmetry,
    #[error("invalid spin: {0}")]
    InvalidSpin(String),
    #[error("invalid split: dotted + undotted must equal twice the spin")]
    InvalidSplit,
    #[error("polarization system is singular (bad node choice)")]
    SingularPolarization,
    #[error("Fock space dimension {dim} exceeds the configured bound {bound}")]
    FockDimension { dim: usize, bound: usize },
    #[error("one-particle transformation does not preserve the mode set")]
    ModeSetNotClosed,
    #[error("extrapolation did not converge: {0}")]
    NoConvergence(String),
    #[error("invalid group data: {0}")]
    InvalidGroup(String),
    #[error("group must be abelian for this operation")]
    NotAbelian,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}
