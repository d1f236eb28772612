use thiserror::Error;

use crate::seed::ValidationReport;

pub type Result<T> = std::result::Result<T, ClusterError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("FrozenVertex: vertex {0} is frozen")]
    FrozenVertex(String),
    #[error("NotMutable: vertex {0} is not a mutable vertex")]
    NotMutable(String),
    #[error("UnknownVertex: no vertex labelled {0:?}")]
    UnknownVertex(String),
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("InvalidStep: step {step}: {reason}")]
    InvalidStep { step: usize, reason: String },
    #[error("NotMappingClass: {0}")]
    NotMappingClass(String),
    #[error("NotSkewSymmetric: quivers need every d[i] = 1")]
    NotSkewSymmetric,
    #[error("ValidationError: {0}")]
    Validation(ValidationReport),
    #[error("ParseError at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("BudgetExceeded: {0}")]
    BudgetExceeded(String),
    #[error("ZeroPoint: the zero tropical point has no projective class")]
    ZeroPoint,
    #[error("NoWitness: no non-negative cluster found within budget")]
    NoWitness,
    #[error("BadWeights: {0}")]
    BadWeights(String),
    #[error("UnsupportedRank: {0}")]
    UnsupportedRank(String),
    #[error("CellNotFound: no explored cluster contains the cell")]
    CellNotFound,
    #[error("NotPointwiseFixed: {0}")]
    NotPointwiseFixed(String),
    #[error("NoConvergence: {0}")]
    NoConvergence(String),
    #[error("InvalidTriangulation: {0}")]
    InvalidTriangulation(String),
    #[error("NotFlippable: {0}")]
    NotFlippable(String),
    #[error("UnknownName: no catalog entry {0:?}")]
    UnknownName(String),
    #[error("FlavorMismatch: {0}")]
    FlavorMismatch(String),
}

impl ClusterError {
    /// Variant name, as it leads the display text.
    pub fn kind(&self) -> &'static str {
        match self {
            ClusterError::FrozenVertex(_) => "FrozenVertex",
            ClusterError::NotMutable(_) => "NotMutable",
            ClusterError::UnknownVertex(_) => "UnknownVertex",
            ClusterError::ShapeMismatch(_) => "ShapeMismatch",
            ClusterError::InvalidStep { .. } => "InvalidStep",
            ClusterError::NotMappingClass(_) => "NotMappingClass",
            ClusterError::NotSkewSymmetric => "NotSkewSymmetric",
            ClusterError::Validation(_) => "ValidationError",
            ClusterError::Parse { .. } => "ParseError",
            ClusterError::BudgetExceeded(_) => "BudgetExceeded",
            ClusterError::ZeroPoint => "ZeroPoint",
            ClusterError::NoWitness => "NoWitness",
            ClusterError::BadWeights(_) => "BadWeights",
            ClusterError::UnsupportedRank(_) => "UnsupportedRank",
            ClusterError::CellNotFound => "CellNotFound",
            ClusterError::NotPointwiseFixed(_) => "NotPointwiseFixed",
            ClusterError::NoConvergence(_) => "NoConvergence",
            ClusterError::InvalidTriangulation(_) => "InvalidTriangulation",
            ClusterError::NotFlippable(_) => "NotFlippable",
            ClusterError::UnknownName(_) => "UnknownName",
            ClusterError::FlavorMismatch(_) => "FlavorMismatch",
        }
    }
}
