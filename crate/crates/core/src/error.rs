use thiserror::Error;

pub type Result<T, E = DclError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DclError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("packet support escapes the grid: nonzero amplitude {amplitude:.3e} within 3 spacings of the boundary")]
    SupportEscapesGrid { amplitude: f64 },

    #[error("support violation: mass {mass:.3e} at or right of the scattering centre x = {x}")]
    SupportViolation { x: f64, mass: f64 },

    #[error("grid escape: boundary mass {mass:.3e} exceeds threshold {threshold:.1e}")]
    GridEscape { mass: f64, threshold: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix of size {n}x{n} exceeds the cap of {cap}")]
    MatrixTooLarge { n: usize, cap: usize },

    #[error("packets do not overlap: centre separation {separation:.3} exceeds {limit:.3}")]
    NoOverlap { separation: f64, limit: f64 },

    #[error("malformed field container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
