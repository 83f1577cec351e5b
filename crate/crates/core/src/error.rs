use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("derivative of `{func}` of order {order} exceeds the maximum order {max}")]
    DerivativeOrder {
        func: String,
        order: usize,
        max: usize,
    },
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("singular matrix (determinant {det})")]
    Singular { det: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degenerate pairing: {0}")]
    Degenerate(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("line {line}: {msg}")]
    Definition { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
