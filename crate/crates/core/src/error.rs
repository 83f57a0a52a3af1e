use thiserror::Error;

/// Errors raised by the algebra, decomposition, quadrature and kernel layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input quaternion is real; its imaginary unit is not determined")]
    RealInput,

    #[error("point with modulus {modulus} lies outside the domain of radius {radius}")]
    OutOfDomain { modulus: f64, radius: f64 },

    #[error(
        "series has coefficients outside the slice plane C(i) (component magnitude {offending})"
    )]
    NotSliceValued { offending: f64 },

    #[error("invalid quadrature order: {0}")]
    BadOrder(String),

    #[error(
        "Gram matrix is ill conditioned (condition number {condition:.3e} exceeds {limit:.1e})"
    )]
    IllConditioned { condition: f64, limit: f64 },

    #[error(
        "Gram entry ({row}, {col}) has imaginary part {imaginary:.3e}; expected a real matrix"
    )]
    NonRealGram {
        row: usize,
        col: usize,
        imaginary: f64,
    },

    #[error("kernel evaluation too close to the boundary: |z||w| = {product} exceeds {limit}")]
    NearBoundary { product: f64, limit: f64 },

    #[error("series degree {degree} exceeds the kernel truncation {truncation}")]
    DegreeTooHigh { degree: usize, truncation: usize },

    #[error("truncation {truncation} is below the minimum {minimum}")]
    TruncationTooLow { truncation: usize, minimum: usize },

    #[error("quadrature rule is exact to degree {available}, but degree {required} is needed")]
    RuleTooCoarse { required: usize, available: usize },

    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
