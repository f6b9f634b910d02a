use thiserror::Error;

use crate::algebra::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed table for `{symbol}`: {detail}")]
    Structural { symbol: String, detail: String },

    #[error("index {index} out of range for carrier of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("domain/codomain mismatch: {0}")]
    Mismatch(String),

    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(ValidationReport),

    #[error("law violation: {0}")]
    LawViolation(ValidationReport),

    #[error("section fails f∘s = 1 at element `{witness}`")]
    NotASection { witness: String },

    #[error("point morphism squares do not commute: {0}")]
    NotAPointMorphism(String),

    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    #[error("splitting identity fails for template `{template}`: {detail}")]
    SplittingIdentity { template: String, detail: String },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("term error: {0}")]
    Term(String),

    #[error("work bound exceeded: {0}")]
    WorkBound(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("parse error in {source_name} at line {line}, column {column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status: 1 for bad input, 2 for a violated property,
    /// 3 for an internal inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::LawViolation(_)
            | Error::NotAHomomorphism(_)
            | Error::NotASection { .. }
            | Error::NotAPointMorphism(_)
            | Error::SplittingIdentity { .. } => 2,
            Error::Inconsistency(_) => 3,
            _ => 1,
        }
    }
}
