//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum BsiError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("singular denominator: {0}")]
    Singular(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("training diverged at step {step}: loss is not finite")]
    Diverged { step: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BsiError>;
