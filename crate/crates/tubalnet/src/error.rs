use thiserror::Error;

/// Errors produced by tensor algebra, network evaluation, training and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes do not chain for the requested operation.
    #[error("shape mismatch in {op}: {lhs} vs {rhs}")]
    ShapeMismatch {
        op: &'static str,
        lhs: String,
        rhs: String,
    },

    /// A tube has a transform-domain entry too close to zero to invert.
    #[error("singular tube: transform-domain entry {value:e} at frequency {index} is below the 1e-12 tolerance")]
    SingularTube { index: usize, value: f64 },

    /// The transform matrix failed a construction-time check.
    #[error("invalid transform matrix: {0}")]
    InvalidTransform(String),

    /// The operation requires an orthogonal-scaled transform.
    #[error("unsupported transform for {op}: requires a nonzero multiple of an orthogonal matrix")]
    UnsupportedTransform { op: &'static str },

    /// Invalid configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation that needs observed entries got an empty observation set.
    #[error("empty observation set")]
    EmptyObservations,

    /// A classification label is outside the class range.
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    /// Malformed container or text input, with the byte offset or row/column
    /// position where the problem was detected.
    #[error("format error in {path} at {position}: {msg}")]
    Format {
        path: String,
        position: String,
        msg: String,
    },

    /// Training produced a non-finite loss.
    #[error("training diverged at epoch {epoch} with learning rate {learning_rate}: loss is not finite")]
    Divergence { epoch: usize, learning_rate: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(op: &'static str, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            op,
            lhs: lhs.into(),
            rhs: rhs.into(),
        }
    }
}
