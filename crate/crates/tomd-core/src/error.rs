use alloc::string::String;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A mode index addressed a mode the tensor does not have.
    #[error("mode index {mode} out of range for order-{order} tensor")]
    ModeIndex { mode: usize, order: usize },
    /// Extents do not line up (unfold/fold/product/stacking mismatch).
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A contraction network violates its well-formedness invariants.
    #[error("invalid network: {0}")]
    Network(String),
    /// A decomposition rank is invalid for the tensor being fitted.
    #[error("invalid rank: {0}")]
    Rank(String),
    /// The reference tensor of a relative error has zero norm.
    #[error("reference tensor has zero norm")]
    DegenerateReference,
    /// A matrix required to be symmetric is not.
    #[error("matrix is not symmetric within tolerance")]
    Asymmetric,
    /// A scalar/configuration argument is out of its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArg(String),
    /// A numerical routine failed to meet its contract.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Two label sequences that must align have different lengths.
    #[error("label length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

pub type Result<T> = core::result::Result<T, Error>;
