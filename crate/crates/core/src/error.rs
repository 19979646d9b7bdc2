use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the numerical layers.
///
/// Diagnostics that merely report a residual (isometry checks, identity
/// checks) return values, not errors; errors are reserved for violated
/// preconditions and guard rejections.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (unknown backend, bad grid, bad cutoff).
    #[error("configuration error: {0}")]
    Config(String),

    /// Matrix-coefficient index outside `1..=d_π`.
    #[error("index ({i},{j}) out of range for a degree-{degree} representation")]
    IndexOutOfRange { i: usize, j: usize, degree: usize },

    /// A quadrature rule or basis truncation is too small for the input.
    #[error("band limit {available} insufficient, need at least {required}")]
    BandLimit { required: u32, available: u32 },

    /// Grid boundary mass above the aliasing threshold.
    #[error("aliasing: relative boundary mass {boundary:.3e} exceeds {threshold:.3e}")]
    Aliasing { boundary: f64, threshold: f64 },

    /// Evaluation outside the numerical overflow guard.
    #[error("overflow guard: {what} = {value:.6} exceeds limit {limit:.6}")]
    OverflowGuard {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    /// Holomorphic evaluation requested on a field that is not marked
    /// extendable.
    #[error("field is not holomorphically extendable")]
    NotExtendable,

    /// The moment integral σ(x) = ∫ e^{2x·y} μ(y) dy diverges on the grid.
    #[error("sigma diverges: e^{{2x·y}} growth beats the weight decay at |x| = {at:.4}")]
    SigmaDiverges { at: f64 },

    /// Inflating spectral coefficients left square-integrability
    /// (Poisson inversion hypothesis violated).
    #[error("spectral blow-up: inflated tail fraction {tail:.3e} exceeds {threshold:.3e}")]
    SpectralBlowup { tail: f64, threshold: f64 },

    /// Operation requires a specific backend.
    #[error("unsupported backend: {0}")]
    UnsupportedBackend(String),

    /// Serialization / deserialization failures of the on-disk formats.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Manifest (de)serialization failure.
    #[error("manifest error: {0}")]
    Manifest(#[from] serde_json::Error),

    /// Corrupt or mismatched binary field data.
    #[error("field data error: {0}")]
    FieldData(String),
}
