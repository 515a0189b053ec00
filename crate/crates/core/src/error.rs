use thiserror::Error;

/// Errors from the exact symbolic algebra.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("jet order overflow: total derivative would exceed the supported jet range")]
    JetOrderOverflow,
    #[error("n_tau cannot appear under a total x-derivative")]
    TauInTotalX,
    #[error("tau-derivative only defined for coefficients affine in n = v - v_xx")]
    TauOfNonAffine,
    #[error("unsupported polynomial shape: {0}")]
    UnsupportedShape(String),
}

/// Errors from grid, model and solver construction.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("grid half-length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("grid size must be a power of two >= 16, got {0}")]
    BadGridSize(usize),
    #[error("model parameter {0} is not finite")]
    NonFiniteParam(&'static str),
    #[error("unsupported rotation frequency: beta_f vanishes at Omega = {0}")]
    UnsupportedOmega(f64),
    #[error("sigma override {sigma} outside (0, {max}]")]
    SigmaOutOfRange { sigma: f64, max: f64 },
    #[error("field length {got} does not match grid size {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("initial data magnitude {value:.3e} at the domain boundary exceeds {threshold:.3e}")]
    BoundaryDecay { value: f64, threshold: f64 },
    #[error("initial data table has {got} samples, grid needs {want}")]
    TableLength { got: usize, want: usize },
}
