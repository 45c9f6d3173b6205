use thiserror::Error;

/// Errors produced by grid construction, field operations and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid resolution must be an even integer >= 4, got {0}")]
    InvalidResolution(usize),
    #[error("box length must be positive and finite, got {0}")]
    InvalidBoxLength(f64),
    #[error("operands live on different grids ({0}x L={1} vs {2}x L={3})")]
    GridMismatch(usize, f64, usize, f64),
    #[error("coefficient array has shape {got:?}, grid wants {want:?}")]
    ShapeMismatch { got: Vec<usize>, want: Vec<usize> },
    #[error("operator and operand arity do not match: {0}")]
    ArityMismatch(&'static str),
    #[error("grid too small to host any dyadic annulus")]
    GridTooSmall,
    #[error("dyadic index {k} outside usable range [{k_min}, {k_max}]")]
    ShellOutOfRange { k: i32, k_min: i32, k_max: i32 },
    #[error("invalid Lebesgue exponent p = {0}; need p >= 1")]
    InvalidExponent(f64),
    #[error("homogeneous norm with s <= 0 needs a mean-zero field")]
    NonZeroMean,
    #[error("field is identically zero; {0}")]
    ZeroField(&'static str),
    #[error("requested bandwidths exceed the padded Nyquist ({needed} modes, {available} available)")]
    PaddingOverflow { needed: usize, available: usize },
    #[error("spectral band [{0}, {1}] is empty or outside the profile range")]
    EmptyBand(i32, i32),
    #[error("box length must be a positive integer multiple of 2*pi for this flow, got {0}")]
    IncompatibleBox(f64),
    #[error("input fields must be divergence-free: relative divergence {0:.3e}")]
    NotDivergenceFree(f64),
    #[error("empty dyadic range")]
    EmptyRange,
    #[error("malformed field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("report value is not finite: {0}")]
    NonFiniteReport(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
