//! File formats, synthetic generators and result exports.

pub mod export;
pub mod generate;
pub mod netfile;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("duplicate node id {0:?}")]
    DuplicateId(String),
    #[error("{path}: unknown node id {id:?}")]
    UnknownId { path: String, id: String },
}
