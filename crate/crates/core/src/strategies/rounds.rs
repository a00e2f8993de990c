//! Lie-free multi-round block plans.
//!
//! With branching factor `b` (the smallest integer with `b^r >= n`), round
//! `k` cuts the surviving block into consecutive sub-blocks of size
//! `b^(r-k)`. The lowest sub-block answering YES survives into the next
//! round; if every sub-block answers NO there is no excellent element and
//! later rounds are empty. A round is skipped when the surviving block is
//! already known to be non-empty and would not be cut, so a surviving
//! singleton ends the search early.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AnswerSequence, ElementSet, MultiFamily, Query, Verdict};
use crate::strategies::adaptive::AdaptiveOracle;

/// Where a multi-round run stands between rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundState {
    /// Candidates `lo..=hi`; `known` records that one of them is excellent.
    Searching { lo: usize, hi: usize, known: bool },
    Done(Verdict),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiRoundPlan {
    n: usize,
    rounds: usize,
    branching: usize,
    block_sizes: Vec<usize>,
}

/// Smallest `b >= 1` with `b^r >= n`.
pub fn ceil_root(n: usize, r: usize) -> usize {
    assert!(r >= 1);
    let reaches = |b: usize| {
        let mut acc = 1usize;
        for _ in 0..r {
            acc = acc.saturating_mul(b);
            if acc >= n {
                return true;
            }
        }
        acc >= n
    };
    let mut b = (n as f64).powf(1.0 / r as f64).floor().max(1.0) as usize;
    while b > 1 && reaches(b - 1) {
        b -= 1;
    }
    while !reaches(b) {
        b += 1;
    }
    b
}

impl MultiRoundPlan {
    pub fn new(n: usize, rounds: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("round plans need n >= 1".into()));
        }
        if rounds == 0 {
            return Err(Error::Precondition("round plans need r >= 1".into()));
        }
        if n > crate::model::MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge {
                n,
                max: crate::model::MAX_UNIVERSE,
            });
        }
        let branching = ceil_root(n, rounds);
        let block_sizes = (0..rounds)
            .map(|k| {
                let exp = (rounds - 1 - k) as u32;
                branching.checked_pow(exp).unwrap_or(usize::MAX).min(n)
            })
            .collect();
        Ok(MultiRoundPlan {
            n,
            rounds,
            branching,
            block_sizes,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn branching(&self) -> usize {
        self.branching
    }

    /// Sub-block size used in each round; the last is always 1.
    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn initial_state(&self) -> RoundState {
        RoundState::Searching {
            lo: 1,
            hi: self.n,
            known: false,
        }
    }

    /// Sub-blocks asked in `round` (0-based) from `state`.
    pub fn queries(&self, round: usize, state: RoundState) -> Vec<Query> {
        let RoundState::Searching { lo, hi, known } = state else {
            return Vec::new();
        };
        if round >= self.rounds {
            return Vec::new();
        }
        let size = self.block_sizes[round];
        if known && hi + 1 - lo <= size {
            return Vec::new();
        }
        (lo..=hi)
            .step_by(size)
            .map(|start| ElementSet::range(start, (start + size - 1).min(hi)))
            .collect()
    }

    /// The round's questions as a family (each sub-block once).
    pub fn family_for(&self, round: usize, state: RoundState) -> MultiFamily {
        MultiFamily::new(self.n, self.queries(round, state).into_iter().map(|q| (q, 1)))
            .expect("sub-blocks are distinct subsets of the universe")
    }

    /// Applies one round's answers.
    pub fn advance(&self, round: usize, state: RoundState, answers: &AnswerSequence) -> Result<RoundState> {
        let queries = self.queries(round, state);
        if answers.len() != queries.len() {
            return Err(Error::LengthMismatch {
                expected: queries.len(),
                actual: answers.len(),
            });
        }
        let RoundState::Searching { lo, hi, known } = state else {
            return Ok(state);
        };
        let next = if queries.is_empty() {
            RoundState::Searching { lo, hi, known }
        } else {
            match answers.as_slice().iter().position(|a| a.is_yes()) {
                Some(k) => {
                    let block = queries[k];
                    RoundState::Searching {
                        lo: block.min().expect("sub-blocks are non-empty"),
                        hi: block.max().expect("sub-blocks are non-empty"),
                        known: true,
                    }
                }
                None if known => return Ok(RoundState::Done(Verdict::Inconsistent)),
                None => RoundState::Done(Verdict::NoExcellent),
            }
        };
        Ok(match next {
            RoundState::Searching { lo, hi, known: true } if lo == hi => {
                RoundState::Done(Verdict::Found(lo))
            }
            other => other,
        })
    }

    /// Final verdict once all rounds have been applied.
    pub fn verdict(&self, state: RoundState) -> Verdict {
        match state {
            RoundState::Done(v) => v,
            RoundState::Searching { lo, hi, known: true } if lo == hi => Verdict::Found(lo),
            RoundState::Searching { .. } => Verdict::Undecidable,
        }
    }

    /// Replays a full run from per-round answers.
    pub fn decide(&self, answers: &[AnswerSequence]) -> Result<Verdict> {
        if answers.len() > self.rounds {
            return Err(Error::Input(format!(
                "{} rounds of answers for a {}-round plan",
                answers.len(),
                self.rounds
            )));
        }
        let mut state = self.initial_state();
        for round in 0..self.rounds {
            let empty = AnswerSequence::default();
            let a = answers.get(round).unwrap_or(&empty);
            state = self.advance(round, state, a)?;
        }
        Ok(self.verdict(state))
    }

    /// Runs the plan against an oracle, asking each round's questions.
    pub fn run<O: AdaptiveOracle + ?Sized>(&self, oracle: &mut O) -> RoundRun {
        let mut state = self.initial_state();
        let mut asked = Vec::with_capacity(self.rounds);
        for round in 0..self.rounds {
            let queries = self.queries(round, state);
            let answers = AnswerSequence::new(queries.iter().map(|&q| oracle.ask(q)).collect());
            asked.push(self.family_for(round, state));
            state = self
                .advance(round, state, &answers)
                .expect("answer count matches the round's questions");
        }
        RoundRun {
            verdict: self.verdict(state),
            questions: asked.iter().map(MultiFamily::len).sum(),
            rounds: asked,
        }
    }

    /// Worst-case number of questions over all runs.
    pub fn length(&self) -> usize {
        self.worst_from(0, self.n, false)
    }

    /// `r * b`, the guaranteed ceiling on [`MultiRoundPlan::length`].
    pub fn length_bound(&self) -> usize {
        self.rounds * self.branching
    }

    fn worst_from(&self, round: usize, size: usize, known: bool) -> usize {
        if round >= self.rounds || (known && size <= 1) {
            return 0;
        }
        let block = self.block_sizes[round];
        if known && size <= block {
            return self.worst_from(round + 1, size, known);
        }
        let asked = size.div_ceil(block);
        let mut worst = self.worst_from(round + 1, block.min(size), true);
        let tail = size % block;
        if tail != 0 {
            worst = worst.max(self.worst_from(round + 1, tail, true));
        }
        asked + worst
    }
}

/// Record of one executed multi-round run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundRun {
    pub verdict: Verdict,
    pub questions: usize,
    pub rounds: Vec<MultiFamily>,
}

/// Two-round plan: `ceil(n / b)` disjoint blocks of size `b = ceil(sqrt n)`,
/// then the singletons of the lowest YES block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoRoundPlan {
    #[serde(flatten)]
    plan: MultiRoundPlan,
}

pub fn two_round_plan(n: usize) -> Result<TwoRoundPlan> {
    Ok(TwoRoundPlan {
        plan: MultiRoundPlan::new(n, 2)?,
    })
}

pub fn multi_round_plan(n: usize, rounds: usize) -> Result<MultiRoundPlan> {
    MultiRoundPlan::new(n, rounds)
}

impl TwoRoundPlan {
    pub fn block_size(&self) -> usize {
        self.plan.branching
    }

    pub fn round1(&self) -> MultiFamily {
        self.plan.family_for(0, self.plan.initial_state())
    }

    /// Second-round questions for a given first-round answer string.
    pub fn round2_for(&self, round1: &AnswerSequence) -> Result<MultiFamily> {
        let state = self.plan.advance(0, self.plan.initial_state(), round1)?;
        Ok(self.plan.family_for(1, state))
    }

    pub fn decide(&self, round1: &AnswerSequence, round2: &AnswerSequence) -> Result<Verdict> {
        self.plan.decide(&[round1.clone(), round2.clone()])
    }

    pub fn length(&self) -> usize {
        self.plan.length()
    }

    pub fn length_bound(&self) -> usize {
        self.plan.length_bound()
    }

    pub fn run<O: AdaptiveOracle + ?Sized>(&self, oracle: &mut O) -> RoundRun {
        self.plan.run(oracle)
    }

    pub fn as_multi_round(&self) -> &MultiRoundPlan {
        &self.plan
    }
}
