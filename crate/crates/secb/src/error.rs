use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fixed-point iteration did not converge within {max_iterations} steps (last iterate {last})")]
    IterationLimit { max_iterations: usize, last: f64 },

    #[error("operation requires the a priori bound, which is not set")]
    MissingAprioriBound,

    #[error("quadrature node too close to the spectrum: clearance {clearance:.3e} < {min_clearance:.1e}")]
    SpectrumTooClose { clearance: f64, min_clearance: f64 },

    #[error("resolvent solve at z = {z} is ill-conditioned: relative residual {residual:.3e}")]
    IllConditioned { z: Complex64, residual: f64 },

    #[error("time {t} outside the valid evaluation range [{min}, {max}]")]
    TimeOutOfRange { t: f64, min: f64, max: f64 },

    #[error("imaginary residue of the quadrature sum is too large: {norm:.3e}")]
    ImaginaryResidue { norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

/// True when `x` is a finite, strictly positive number.
pub(crate) fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}
