use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NawcError {
    #[error("no su(m) generators exist for m = {0}")]
    NoGenerators(usize),
    #[error("degenerate basis: trace metric has smallest eigenvalue {0:e}")]
    DegenerateBasis(f64),
    #[error("inadmissible matrix-valued Y: hermiticity residual {0:e}")]
    InadmissibleY(f64),
    #[error("zero eigenvalue forbidden: |lambda| = {0:e}")]
    ZeroEigenvalue(f64),
    #[error("generators do not commute: commutator norm {0:e}")]
    NonCommuting(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("theta is not skew under the declared metric: residual {0:e}")]
    NotSkew(f64),
    #[error("not a Lorentz transformation: residual {0:e}")]
    NotLorentz(f64),
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, NawcError>;
