//! Search for one excellent element among `n` when the number of excellent
//! elements is unknown and at most one answer may be a lie.
//!
//! The crate builds strategies ([`strategies`]), decodes their answers
//! ([`decoder`]), checks whether an arbitrary multi-family solves the
//! problem ([`verifier`]) and confirms minimum family sizes by exhaustive
//! search on tiny universes ([`search`]).

pub mod cli;
pub mod decoder;
pub mod error;
pub mod model;
pub mod search;
pub mod strategies;
pub mod verifier;

pub use error::{Error, Result};
pub use model::{
    answers_for, truth_of, Answer, AnswerSequence, ElementSet, Entry, MultiFamily, Query, Scenario,
    Universe, Verdict,
};
