//! Lie-free adaptive search by prefix splitting.
//!
//! The search keeps a window `lo..=hi` of candidates that still matter and
//! whether the window is known to hold an excellent element. It asks a
//! prefix of the window: a YES narrows the window to that prefix (now known
//! non-empty), a NO discards the prefix. An unknown window of size `s` has
//! `s + 1` outcomes and is split at `2^(q-1)` with `q = ceil(log2(s + 1))`; a
//! known window has `s` outcomes and is bisected at `2^(ceil(log2 s) - 1)`.
//! Both keep every branch within `q - 1` further questions.

use serde::Serialize;

use crate::model::{truth_of, Answer, ElementSet, Query, Verdict};
use crate::strategies::ceil_log2;

/// Answers adaptive questions about a hidden excellent set.
pub trait AdaptiveOracle {
    fn ask(&mut self, query: Query) -> Answer;
}

impl<F: FnMut(Query) -> Answer> AdaptiveOracle for F {
    fn ask(&mut self, query: Query) -> Answer {
        self(query)
    }
}

/// Answers truthfully from a hidden set and records what was asked.
#[derive(Debug, Clone)]
pub struct TruthfulOracle {
    hidden: ElementSet,
    asked: Vec<Query>,
}

impl TruthfulOracle {
    pub fn new(hidden: ElementSet) -> Self {
        TruthfulOracle {
            hidden,
            asked: Vec::new(),
        }
    }

    pub fn asked(&self) -> &[Query] {
        &self.asked
    }
}

impl AdaptiveOracle for TruthfulOracle {
    fn ask(&mut self, query: Query) -> Answer {
        self.asked.push(query);
        truth_of(query, self.hidden)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdaptiveOutcome {
    pub verdict: Verdict,
    pub questions: usize,
}

/// Worst-case question count of [`adaptive_no_lie_search`] on `n` elements.
pub fn adaptive_complexity(n: usize) -> usize {
    ceil_log2(n + 1)
}

pub fn adaptive_no_lie_search<O: AdaptiveOracle + ?Sized>(oracle: &mut O, n: usize) -> AdaptiveOutcome {
    let mut lo = 1;
    let mut hi = n;
    let mut known_nonempty = false;
    let mut questions = 0;
    loop {
        let size = (hi + 1).saturating_sub(lo);
        if size == 0 {
            return AdaptiveOutcome {
                verdict: Verdict::NoExcellent,
                questions,
            };
        }
        if known_nonempty && size == 1 {
            return AdaptiveOutcome {
                verdict: Verdict::Found(lo),
                questions,
            };
        }
        let outcomes = if known_nonempty { size } else { size + 1 };
        let split = 1usize << (ceil_log2(outcomes) - 1);
        let prefix_end = lo + split - 1;
        questions += 1;
        match oracle.ask(ElementSet::range(lo, prefix_end)) {
            Answer::Yes => {
                hi = prefix_end;
                known_nonempty = true;
            }
            Answer::No => lo = prefix_end + 1,
        }
    }
}
