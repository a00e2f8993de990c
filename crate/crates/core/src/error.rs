use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element {element} is outside the universe 1..={n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("universe size {n} exceeds the supported maximum of {max}")]
    UniverseTooLarge { n: usize, max: usize },

    #[error("multiplicity {multiplicity} of query {query} is outside 1..=3")]
    InvalidMultiplicity { query: String, multiplicity: usize },

    #[error("answer sequence has length {actual}, family has {expected} questions")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("lie position {position} is out of range for a family of {m} questions")]
    LieOutOfRange { position: usize, m: usize },

    #[error("invalid answer character {0:?} (expected Y or N)")]
    InvalidAnswer(char),

    #[error("promise violated: {0}")]
    PromiseViolated(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// Errors that stem from refusing oversized work rather than bad input.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity(_) | Error::UniverseTooLarge { .. })
    }
}
