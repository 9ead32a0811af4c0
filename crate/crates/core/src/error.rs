use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("strand count mismatch: {0} vs {1}")]
    StrandMismatch(usize, usize),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("entry is not invertible over the integers: {0}")]
    NotInvertible(String),
    #[error("d^2 != 0: {0}")]
    NotAComplex(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("obstruction at bidegree ({h}, {q}) between terms {src} and {tgt}: {msg}")]
    Obstruction { h: i32, q: i32, src: i32, tgt: i32, msg: String },
    #[error("window too small: {0}")]
    Window(String),
    #[error("bidegree ({0}, {1}) lies outside the safe window")]
    Unsafe(i32, i32),
    #[error("object ceiling exceeded: {0} objects (limit {1})")]
    Ceiling(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
