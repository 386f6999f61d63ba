use thiserror::Error;

/// Everything that can go wrong in the polarization algebra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range 1..=3")]
    IndexOutOfRange { index: usize },

    #[error("rotation axis is not a unit vector (norm {norm})")]
    NonUnitAxis { norm: f64 },

    #[error("invalid Stratton vector: {reason}")]
    InvalidStrattonVector { reason: String },

    #[error("invalid wave vector: {reason}")]
    InvalidWaveVector { reason: String },

    #[error("degenerate frame: Stratton vector parallel to k{}", node_suffix(*.node))]
    DegenerateFrame { node: Option<usize> },

    #[error("wavefunction is not transverse (residual {residual:e}{})", node_suffix(*.node))]
    NotTransverse { node: Option<usize>, residual: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },

    #[error("Jones vector not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("every node of the Stokes field is undefined")]
    AllNodesUndefined,

    #[error("total norm is zero")]
    ZeroNorm,

    #[error("eigenvalue must be +1 or -1, got {value}")]
    InvalidEigenvalue { value: i32 },

    #[error("state is not a helicity eigenstate with eigenvalue {sigma3}")]
    NotHelicityEigenstate { sigma3: i32 },

    #[error("consecutive states {step} and {} are orthogonal (|overlap| = {overlap:e})", step + 1)]
    OrthogonalStep { step: usize, overlap: f64 },

    #[error("phase path needs at least {required} entries, got {actual}")]
    PathTooShort { required: usize, actual: usize },

    #[error("invalid polarization vector: {reason}")]
    InvalidPolarization { reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

fn node_suffix(node: Option<usize>) -> String {
    match node {
        Some(i) => format!(" at node {i}"),
        None => String::new(),
    }
}

impl Error {
    /// Process exit code used by the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateFrame { .. } => 2,
            Error::NotTransverse { .. }
            | Error::NotNormalized { .. }
            | Error::ZeroNorm
            | Error::AllNodesUndefined
            | Error::OrthogonalStep { .. }
            | Error::NotHelicityEigenstate { .. }
            | Error::InvalidPolarization { .. } => 3,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
