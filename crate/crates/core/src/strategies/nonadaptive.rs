use crate::error::{Error, Result};
use crate::model::{Answer, AnswerSequence, ElementSet, MultiFamily, Universe};

/// The optimal family under one lie: `[n]` once and every singleton twice,
/// `2n + 1` questions. For `n = 1` the whole set is `{1}` itself, so the
/// entries merge into `{1}` three times.
pub fn optimal_one_lie_family(n: usize) -> Result<MultiFamily> {
    if n == 0 {
        return MultiFamily::empty(0);
    }
    Universe::new(n)?;
    let whole = std::iter::once((ElementSet::full(n), 1));
    let singles = (1..=n).map(|i| (ElementSet::singleton(i), 2));
    MultiFamily::new(n, whole.chain(singles))
}

/// Every singleton asked once. Solves the lie-free problem with `n`
/// questions.
pub fn singleton_family_no_lie(n: usize) -> Result<MultiFamily> {
    Universe::new(n)?;
    MultiFamily::new(n, (1..=n).map(|i| (ElementSet::singleton(i), 1)))
}

/// Number of bits needed to index `n` candidates, `ceil(log2 n)`.
pub fn ceil_log2(n: usize) -> usize {
    match n {
        0 | 1 => 0,
        _ => (usize::BITS - (n - 1).leading_zeros()) as usize,
    }
}

/// Bit masks for the promise that exactly one element is excellent.
/// Query `k` holds the elements whose zero-based index has bit `k` set.
pub fn binary_mask_family_exactly_one(n: usize) -> Result<MultiFamily> {
    if n == 0 {
        return Err(Error::Precondition(
            "exactly-one search needs at least one element".into(),
        ));
    }
    Universe::new(n)?;
    let queries = (0..ceil_log2(n)).map(|bit| {
        let q: ElementSet = (1..=n).filter(|i| (i - 1) >> bit & 1 == 1).collect();
        (q, 1)
    });
    MultiFamily::new(n, queries)
}

/// Reads the excellent element off the answers to
/// [`binary_mask_family_exactly_one`]: answer `k` is bit `k` of its index.
pub fn decode_exactly_one(n: usize, answers: &AnswerSequence) -> Result<usize> {
    let bits = ceil_log2(n);
    if n == 0 {
        return Err(Error::Precondition(
            "exactly-one search needs at least one element".into(),
        ));
    }
    if answers.len() != bits {
        return Err(Error::LengthMismatch {
            expected: bits,
            actual: answers.len(),
        });
    }
    let index = answers
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &a)| a == Answer::Yes)
        .fold(0usize, |acc, (k, _)| acc | 1 << k);
    let element = index + 1;
    if element > n {
        return Err(Error::PromiseViolated(format!(
            "answers {answers} name element {element}, but n = {n}"
        )));
    }
    Ok(element)
}
