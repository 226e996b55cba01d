use std::fmt;

use thiserror::Error;

/// Position inside a text input, 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
}

impl Pos {
    pub fn new(line: usize, column: usize) -> Self {
        Pos { file: None, line, column }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{}:{}:{}", file, self.line, self.column),
            None => write!(f, "<input>:{}:{}", self.line, self.column),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("no node at address {0}")]
    UnknownAddress(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("label {0} is not in the automaton alphabet")]
    AlphabetMismatch(String),
    #[error("rank mismatch: {0}")]
    Rank(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn syntax(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { pos: Pos::new(line, column), msg: msg.into() }
    }

    /// Attaches a file name to syntax errors.
    pub fn in_file(self, file: &str) -> Self {
        match self {
            Error::Syntax { mut pos, msg } => {
                pos.file = Some(file.to_string());
                Error::Syntax { pos, msg }
            }
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
