//! Turning answers into verdicts.
//!
//! [`decode_optimal`] is the hand-written case analysis for
//! [`optimal_one_lie_family`](crate::strategies::optimal_one_lie_family).
//! [`decode_generic`] works for any family and lie budget by enumerating every
//! excellent set that explains the answers; it is the reference the case
//! analysis is checked against.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Answer, AnswerSequence, ElementSet, MultiFamily, Query, Universe, Verdict};

/// Largest universe the brute-force routines will enumerate (`2^n` subsets).
pub const MAX_BRUTE_FORCE_N: usize = 20;

const PARALLEL_MIN_N: usize = 12;

pub(crate) fn check_brute_force(n: usize) -> Result<()> {
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::Capacity(format!(
            "enumerating all subsets needs n <= {MAX_BRUTE_FORCE_N}, got n = {n}"
        )));
    }
    Ok(())
}

fn check_length(family: &MultiFamily, answers: &AnswerSequence) -> Result<()> {
    if family.len() != answers.len() {
        return Err(Error::LengthMismatch {
            expected: family.len(),
            actual: answers.len(),
        });
    }
    Ok(())
}

/// Case analysis for `[n]` followed by every singleton twice.
///
/// Position 0 answers `[n]`; positions `2i - 1` and `2i` answer `{i}`.
pub fn decode_optimal(n: usize, answers: &AnswerSequence) -> Result<Verdict> {
    let expected = if n == 0 { 0 } else { 2 * n + 1 };
    if answers.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: answers.len(),
        });
    }
    if n == 0 {
        return Ok(Verdict::NoExcellent);
    }
    let whole = answers[0];
    let pair = |i: usize| (answers[2 * i - 1], answers[2 * i]);

    let mut split = None;
    let mut first_yes = None;
    for i in 1..=n {
        match pair(i) {
            (a, b) if a != b => {
                if split.is_some() {
                    // Two disagreeing pairs need two lies.
                    return Ok(Verdict::Inconsistent);
                }
                split = Some(i);
            }
            (Answer::Yes, _) => {
                first_yes.get_or_insert(i);
            }
            _ => {}
        }
    }

    Ok(match (split, whole) {
        // The lie sits in pair i, so every other answer is true.
        (Some(i), Answer::Yes) => Verdict::Found(first_yes.unwrap_or(i)),
        // [n] answered NO truthfully: nothing is excellent, which a YES,YES
        // pair elsewhere would contradict.
        (Some(_), Answer::No) => match first_yes {
            Some(_) => Verdict::Inconsistent,
            None => Verdict::NoExcellent,
        },
        // All pairs agree and at most the [n] answer can be the lie.
        (None, _) => match first_yes {
            Some(j) => Verdict::Found(j),
            None => Verdict::NoExcellent,
        },
    })
}

/// Counts positions where the truthful answers for `excellent` disagree with
/// `observed`, stopping once the count passes `cap`.
fn mismatches(flat: &[Query], observed: &[Answer], excellent: ElementSet, cap: usize) -> usize {
    let mut count = 0;
    for (q, &a) in flat.iter().zip(observed) {
        if q.intersects(excellent) != a.is_yes() {
            count += 1;
            if count > cap {
                break;
            }
        }
    }
    count
}

/// Filters all subsets of the universe in ascending mask order, in parallel
/// chunks for larger universes. The result order does not depend on the
/// split.
fn filter_subsets<F>(universe: Universe, keep: F) -> Vec<ElementSet>
where
    F: Fn(ElementSet) -> bool + Sync,
{
    let n = universe.size();
    if n < PARALLEL_MIN_N {
        return universe.subsets().filter(|&t| keep(t)).collect();
    }
    let low_bits = n - 6;
    (0u64..64)
        .into_par_iter()
        .flat_map_iter(|high| {
            let base = high << low_bits;
            (0..1u64 << low_bits)
                .map(move |low| ElementSet::from_bits((base | low) as u128))
                .filter(|&t| keep(t))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Every excellent set whose truthful answers differ from `answers` in at
/// most `lie_budget` positions, in ascending mask order.
pub fn consistent_scenarios(
    family: &MultiFamily,
    answers: &AnswerSequence,
    lie_budget: usize,
) -> Result<Vec<ElementSet>> {
    check_length(family, answers)?;
    check_brute_force(family.n())?;
    let flat = family.flat();
    let observed = answers.as_slice();
    Ok(filter_subsets(family.universe(), |t| {
        mismatches(&flat, observed, t, lie_budget) <= lie_budget
    }))
}

/// Reduces a set of explanations to a verdict: nothing explains the answers
/// (Inconsistent), only the empty set does (NoExcellent), every explanation
/// is non-empty and they share an element (Found, smallest shared element),
/// otherwise Undecidable.
pub fn verdict_from_candidates(candidates: &[ElementSet]) -> Verdict {
    if candidates.is_empty() {
        return Verdict::Inconsistent;
    }
    if candidates.iter().all(|t| t.is_empty()) {
        return Verdict::NoExcellent;
    }
    if candidates.iter().any(|t| t.is_empty()) {
        return Verdict::Undecidable;
    }
    let common = candidates
        .iter()
        .fold(ElementSet::full(crate::model::MAX_UNIVERSE), |acc, &t| acc.intersection(t));
    match common.min() {
        Some(x) => Verdict::Found(x),
        None => Verdict::Undecidable,
    }
}

/// Decodes any family under a lie budget by enumerating explanations.
pub fn decode_generic(family: &MultiFamily, answers: &AnswerSequence, lie_budget: usize) -> Result<Verdict> {
    let candidates = consistent_scenarios(family, answers, lie_budget)?;
    Ok(verdict_from_candidates(&candidates))
}

/// Splits the flat positions of a family into two sides, F1 and F2. Copies of
/// one member may land on different sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionAssignment {
    in_first: Vec<bool>,
}

impl PartitionAssignment {
    pub fn new(in_first: Vec<bool>) -> Self {
        PartitionAssignment { in_first }
    }

    /// `m` positions, the listed ones in F1.
    pub fn from_first_positions(m: usize, first: &[usize]) -> Result<Self> {
        let mut in_first = vec![false; m];
        for &p in first {
            if p >= m {
                return Err(Error::Input(format!(
                    "partition position {p} out of range for m = {m}"
                )));
            }
            in_first[p] = true;
        }
        Ok(PartitionAssignment { in_first })
    }

    /// The assignment that puts YES positions in F1.
    pub fn from_answers(answers: &AnswerSequence) -> Self {
        PartitionAssignment {
            in_first: answers.as_slice().iter().map(|a| a.is_yes()).collect(),
        }
    }

    /// The answers that put exactly F1 on the YES side.
    pub fn as_answers(&self) -> AnswerSequence {
        AnswerSequence::new(self.in_first.iter().map(|&b| Answer::from(b)).collect())
    }

    pub fn len(&self) -> usize {
        self.in_first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.in_first.is_empty()
    }

    pub fn is_first(&self, position: usize) -> bool {
        self.in_first[position]
    }

    pub fn first_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.in_first[p]).collect()
    }

    pub fn second_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| !self.in_first[p]).collect()
    }

    pub fn first_count(&self) -> usize {
        self.in_first.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for PartitionAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F1 = {:?}, F2 = {:?}", self.first_positions(), self.second_positions())
    }
}

impl Serialize for PartitionAssignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Sides {
            first: Vec<usize>,
            second: Vec<usize>,
        }
        Sides {
            first: self.first_positions(),
            second: self.second_positions(),
        }
        .serialize(serializer)
    }
}

fn check_assignment(family: &MultiFamily, assignment: &PartitionAssignment) -> Result<()> {
    if assignment.len() != family.len() {
        return Err(Error::LengthMismatch {
            expected: family.len(),
            actual: assignment.len(),
        });
    }
    if assignment.first_count() < 2 {
        return Err(Error::Precondition(format!(
            "F1 must hold at least two questions, got {}",
            assignment.first_count()
        )));
    }
    Ok(())
}

/// Sets that meet every F1 question and miss every F2 question, with at most
/// one violated constraint. Each flat position is its own constraint.
pub fn t_star(family: &MultiFamily, assignment: &PartitionAssignment) -> Result<Vec<ElementSet>> {
    check_assignment(family, assignment)?;
    check_brute_force(family.n())?;
    let flat = family.flat();
    Ok(filter_subsets(family.universe(), |t| {
        let mut violated = 0;
        for (p, q) in flat.iter().enumerate() {
            let meets = q.intersects(t);
            if meets != assignment.is_first(p) {
                violated += 1;
                if violated > 1 {
                    return false;
                }
            }
        }
        true
    }))
}

/// Intersection of all members of T*, or a marker when T* has no members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "elements", rename_all = "snake_case")]
pub enum TStarIntersection {
    EmptyFamily,
    Intersection(#[serde(serialize_with = "serialize_set")] ElementSet),
}

pub(crate) fn serialize_set<S: serde::Serializer>(
    set: &ElementSet,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_seq(set.iter())
}

impl TStarIntersection {
    /// Whether the intersection condition holds (vacuously for an empty T*).
    pub fn holds(self) -> bool {
        match self {
            TStarIntersection::EmptyFamily => true,
            TStarIntersection::Intersection(s) => !s.is_empty(),
        }
    }
}

pub fn t_star_intersection(family: &MultiFamily, assignment: &PartitionAssignment) -> Result<TStarIntersection> {
    let members = t_star(family, assignment)?;
    Ok(match members.split_first() {
        None => TStarIntersection::EmptyFamily,
        Some((&head, rest)) => {
            TStarIntersection::Intersection(rest.iter().fold(head, |acc, &t| acc.intersection(t)))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{answers_for, Scenario};
    use crate::strategies::{optimal_one_lie_family, singleton_family_no_lie};

    fn set(elements: &[usize]) -> ElementSet {
        elements.iter().copied().collect()
    }

    fn seq(s: &str) -> AnswerSequence {
        s.parse().unwrap()
    }

    #[test]
    fn optimal_case_examples() {
        assert_eq!(decode_optimal(2, &seq("YYYNN")).unwrap(), Verdict::Found(1));
        assert_eq!(decode_optimal(2, &seq("NNNNN")).unwrap(), Verdict::NoExcellent);
        assert_eq!(decode_optimal(2, &seq("NYNNN")).unwrap(), Verdict::NoExcellent);
        assert_eq!(decode_optimal(2, &seq("YYNNN")).unwrap(), Verdict::Found(1));
        assert_eq!(decode_optimal(2, &seq("YYNYN")).unwrap(), Verdict::Inconsistent);
    }

    #[test]
    fn optimal_split_pair_with_yes_pair_elsewhere() {
        // [n]=Y, pair 1 split, pair 2 YES,YES: 2 is excellent.
        assert_eq!(decode_optimal(2, &seq("YYNYY")).unwrap(), Verdict::Found(2));
        // [n]=N with a YES,YES pair and a split pair needs two lies.
        assert_eq!(decode_optimal(2, &seq("NYNYY")).unwrap(), Verdict::Inconsistent);
    }

    #[test]
    fn optimal_rejects_wrong_length() {
        assert_eq!(
            decode_optimal(2, &seq("YYYN")).unwrap_err(),
            Error::LengthMismatch { expected: 5, actual: 4 }
        );
        assert_eq!(decode_optimal(0, &seq("")).unwrap(), Verdict::NoExcellent);
    }

    #[test]
    fn consistent_scenario_examples() {
        let f = optimal_one_lie_family(2).unwrap();
        assert_eq!(consistent_scenarios(&f, &seq("NYYYY"), 1).unwrap(), vec![set(&[1, 2])]);
        assert_eq!(consistent_scenarios(&f, &seq("NNNNN"), 1).unwrap(), vec![ElementSet::EMPTY]);
        let truth = answers_for(&f, &Scenario::truthful(set(&[2]))).unwrap();
        assert!(consistent_scenarios(&f, &truth, 0).unwrap().contains(&set(&[2])));
    }

    #[test]
    fn generic_examples() {
        let f = optimal_one_lie_family(2).unwrap();
        assert_eq!(decode_generic(&f, &seq("YYYNN"), 1).unwrap(), Verdict::Found(1));
        assert_eq!(decode_generic(&f, &seq("NYNNN"), 1).unwrap(), Verdict::NoExcellent);
        let single = MultiFamily::new(1, [(set(&[1]), 1)]).unwrap();
        assert_eq!(decode_generic(&single, &seq("Y"), 1).unwrap(), Verdict::Undecidable);
    }

    #[test]
    fn generic_singletons_without_lies() {
        let f = singleton_family_no_lie(3).unwrap();
        assert_eq!(decode_generic(&f, &seq("NYN"), 0).unwrap(), Verdict::Found(2));
        assert_eq!(decode_generic(&f, &seq("NNN"), 0).unwrap(), Verdict::NoExcellent);
    }

    #[test]
    fn brute_force_bound_enforced() {
        let f = singleton_family_no_lie(21).unwrap();
        let answers = AnswerSequence::from_bits(0, 21);
        assert!(decode_generic(&f, &answers, 0).unwrap_err().is_capacity());
    }

    #[test]
    fn parallel_enumeration_matches_sequential() {
        let f = singleton_family_no_lie(13).unwrap();
        let answers = AnswerSequence::from_bits(0b1_0000_0000_0101, 13);
        let got = consistent_scenarios(&f, &answers, 1).unwrap();
        let flat = f.flat();
        let expected: Vec<_> = f
            .universe()
            .subsets()
            .filter(|&t| mismatches(&flat, answers.as_slice(), t, usize::MAX) <= 1)
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn t_star_examples() {
        let f = optimal_one_lie_family(2).unwrap();
        let a = PartitionAssignment::from_first_positions(5, &[1, 2]).unwrap();
        let members = t_star(&f, &a).unwrap();
        assert!(!members.is_empty());
        assert!(members.iter().all(|t| t.contains(1)));
        assert_eq!(
            t_star_intersection(&f, &a).unwrap(),
            TStarIntersection::Intersection(set(&[1]))
        );

        let whole3 = MultiFamily::new(2, [(set(&[1, 2]), 3)]).unwrap();
        let all = PartitionAssignment::from_first_positions(3, &[0, 1, 2]).unwrap();
        assert_eq!(t_star(&whole3, &all).unwrap(), vec![set(&[1]), set(&[2]), set(&[1, 2])]);
        assert_eq!(
            t_star_intersection(&whole3, &all).unwrap(),
            TStarIntersection::Intersection(ElementSet::EMPTY)
        );

        let f1 = optimal_one_lie_family(1).unwrap();
        let all = PartitionAssignment::from_first_positions(3, &[0, 1, 2]).unwrap();
        assert_eq!(t_star(&f1, &all).unwrap(), vec![set(&[1])]);
    }

    #[test]
    fn t_star_empty_family_marker() {
        // YES on every singleton copy, NO on [2]: only {1,2} is within one
        // violation.
        let f = optimal_one_lie_family(2).unwrap();
        let a = PartitionAssignment::from_first_positions(5, &[1, 2, 3, 4]).unwrap();
        assert!(t_star(&f, &a).unwrap().len() == 1);
        // One copy of {1} and one of {2} on each side: every candidate
        // violates at least two constraints.
        let two_lies = PartitionAssignment::from_first_positions(5, &[1, 3]).unwrap();
        assert_eq!(t_star(&f, &two_lies).unwrap(), vec![]);
        assert_eq!(t_star_intersection(&f, &two_lies).unwrap(), TStarIntersection::EmptyFamily);
        assert!(TStarIntersection::EmptyFamily.holds());
    }

    #[test]
    fn t_star_needs_two_first_questions() {
        let f = optimal_one_lie_family(2).unwrap();
        let a = PartitionAssignment::from_first_positions(5, &[0]).unwrap();
        assert!(matches!(t_star(&f, &a), Err(Error::Precondition(_))));
    }
}
