use thiserror::Error;

/// Error type shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("symbol {symbol} outside alphabet [{min}, {max}]")]
    OutOfAlphabet { symbol: i32, min: i32, max: i32 },

    #[error("unknown channel {0}")]
    UnknownChannel(usize),

    #[error("alphabet span {span} too large for {precision}-bit frequencies")]
    Capacity { span: usize, precision: u8 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("corrupt stream: {0}")]
    Corruption(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("model validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
