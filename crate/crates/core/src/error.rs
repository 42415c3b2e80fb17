use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LieError {
    #[error("matrix does not have the structure of a Lie-algebra element")]
    Structure,
    #[error("not a rotation: |CᵀC − I| = {orthogonality:e}, det C = {determinant}")]
    NotARotation { orthogonality: f64, determinant: f64 },
    #[error("non-finite entry")]
    NonFinite,
    #[error("rotation angle {angle} is outside the principal branch of the logarithm")]
    BranchCut { angle: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("arclength must increase: {from} -> {to}")]
    NonIncreasing { from: f64, to: f64 },
    #[error("invalid node grid: {0}")]
    InvalidGrid(&'static str),
    #[error("power-spectral density must be symmetric positive definite")]
    InvalidPsd,
    #[error("covariance is singular on the measured subspace")]
    SingularCovariance,
    #[error("measurement at s = {0} does not coincide with a grid node")]
    OffGrid(f64),
    #[error("problem is malformed: {0}")]
    InvalidProblem(&'static str),
    #[error("information matrix is not positive definite at node {node}")]
    NotPositiveDefinite { node: usize },
    #[error("arclength {tau} is outside [{lo}, {hi}]")]
    OutOfRange { tau: f64, lo: f64, hi: f64 },
    #[error("invalid rod properties: {0}")]
    InvalidRod(&'static str),
    #[error("integration diverged at s = {0}")]
    Diverged(f64),
    #[error("shooting did not converge; best residual {residual:e}")]
    ShootingFailed { residual: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
