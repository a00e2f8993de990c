//! Deciding whether a multi-family solves the one-lie problem.
//!
//! Two independent routes:
//!
//! * [`solves`] works forward from scenarios. It groups every answer string a
//!   scenario can produce and checks that each group admits a definite,
//!   correct verdict.
//! * [`check_coverage`] and [`check_partition_condition`] work backward from
//!   YES/NO splits of the questions: every element must be covered at least
//!   three times, and for every split with at least two YES questions the sets
//!   explaining it (up to one violated constraint) must share an element.
//!
//! [`restrict`] removes one element whose singleton is asked at least twice,
//! the step that shrinks a solving family on `n` elements to one on `n - 1`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::decoder::{check_brute_force, PartitionAssignment};
use crate::error::{Error, Result};
use crate::model::{truth_bits, AnswerSequence, ElementSet, MultiFamily, Query};

/// Scenario or assignment enumeration beyond this many steps is refused.
pub const MAX_ENUMERATION_WORK: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub covered: bool,
    pub under_covered: Vec<usize>,
}

/// Every element must lie in at least three questions (copies count).
pub fn check_coverage(family: &MultiFamily) -> CoverageReport {
    let under_covered: Vec<usize> = (1..=family.n())
        .filter(|&x| family.coverage_of(x) < 3)
        .collect();
    CoverageReport {
        covered: under_covered.is_empty(),
        under_covered,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionWitness {
    pub assignment: PartitionAssignment,
    /// The empty intersection of the explaining sets.
    pub explanations: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub holds: bool,
    pub witness: Option<PartitionWitness>,
    /// Distinct splits examined (copies of a member are interchangeable, so
    /// only how many go to F1 matters).
    pub splits_examined: u64,
}

/// Checks the split condition over all assignments with `|F1| >= 2`.
///
/// Copies of one member are interchangeable, so a split is described by how
/// many copies of each member go to F1; that cuts `2^m` assignments down to
/// the product of `(multiplicity + 1)`.
pub fn check_partition_condition(family: &MultiFamily) -> Result<PartitionReport> {
    check_brute_force(family.n())?;
    let entries = family.entries();
    let radices: Vec<u64> = entries.iter().map(|e| e.multiplicity as u64 + 1).collect();
    let splits = radices
        .iter()
        .try_fold(1u64, |acc, &r| acc.checked_mul(r))
        .filter(|&s| s.checked_mul(1 << family.n()).is_some_and(|w| w <= MAX_ENUMERATION_WORK))
        .ok_or_else(|| {
            Error::Capacity(format!(
                "split enumeration over {} members on n = {} is too large",
                entries.len(),
                family.n()
            ))
        })?;

    // For each candidate set T, which members it meets.
    let subsets: Vec<(ElementSet, Vec<bool>)> = family
        .universe()
        .subsets()
        .map(|t| (t, entries.iter().map(|e| e.query.intersects(t)).collect()))
        .collect();

    let decode = |index: u64| -> Vec<usize> {
        let mut rest = index;
        radices
            .iter()
            .map(|&r| {
                let c = rest % r;
                rest /= r;
                c as usize
            })
            .collect()
    };

    // Sets within one violation of the split, or None if the split has
    // fewer than two YES questions.
    let explanations = |counts: &[usize]| -> Option<Vec<ElementSet>> {
        if counts.iter().sum::<usize>() < 2 {
            return None;
        }
        Some(
            subsets
                .iter()
                .filter(|(_, meets)| {
                    let mut violated = 0;
                    for (k, e) in entries.iter().enumerate() {
                        violated += if meets[k] {
                            e.multiplicity - counts[k]
                        } else {
                            counts[k]
                        };
                        if violated > 1 {
                            return false;
                        }
                    }
                    true
                })
                .map(|&(t, _)| t)
                .collect(),
        )
    };

    let fails = |index: u64| -> bool {
        match explanations(&decode(index)) {
            Some(sets) if !sets.is_empty() => sets
                .iter()
                .fold(family.universe().full(), |acc, &t| acc.intersection(t))
                .is_empty(),
            _ => false,
        }
    };

    let first_failure = (0..splits).into_par_iter().find_first(|&i| fails(i));
    let witness = first_failure.map(|index| {
        let counts = decode(index);
        let mut in_first = Vec::with_capacity(family.len());
        for (k, e) in entries.iter().enumerate() {
            in_first.extend((0..e.multiplicity).map(|c| c < counts[k]));
        }
        PartitionWitness {
            assignment: PartitionAssignment::new(in_first),
            explanations: explanations(&counts)
                .unwrap_or_default()
                .into_iter()
                .map(|t| t.iter().collect())
                .collect(),
        }
    });
    Ok(PartitionReport {
        holds: witness.is_none(),
        witness,
        splits_examined: splits,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub solves: bool,
    /// Lowest reachable answer string (by packed bits) that cannot be decoded
    /// correctly.
    pub witness: Option<AnswerSequence>,
    /// Distinct answer strings reachable within the lie budget.
    pub reachable: usize,
}

/// Checks that every answer string reachable with at most `lie_budget` lies
/// determines a definite verdict that is right for every scenario that could
/// have produced it.
pub fn solves(family: &MultiFamily, lie_budget: usize) -> Result<SolveReport> {
    solves_flat(family.n(), &family.flat(), lie_budget)
}

/// [`solves`] on a raw question list, without the multiplicity cap.
pub fn solves_flat(n: usize, flat: &[Query], lie_budget: usize) -> Result<SolveReport> {
    check_brute_force(n)?;
    let m = flat.len();
    if m > 64 {
        return Err(Error::Capacity(format!(
            "semantic check packs answers into 64 bits, family has {m} questions"
        )));
    }
    if let Some(q) = flat.iter().find(|q| !q.is_subset(ElementSet::full(n))) {
        return Err(Error::Input(format!("query {q} is outside the universe 1..={n}")));
    }
    let pattern_count = (0..=lie_budget.min(m)).fold(0u64, |acc, k| acc.saturating_add(binomial(m, k)));
    if pattern_count.saturating_mul(1 << n) > MAX_ENUMERATION_WORK {
        return Err(Error::Capacity(format!(
            "{pattern_count} lie patterns over {} excellent sets is too many",
            1u64 << n
        )));
    }
    let patterns = lie_patterns(m, lie_budget);

    #[derive(Clone, Copy)]
    struct Explained {
        by_empty: bool,
        by_nonempty: bool,
        common: ElementSet,
    }

    let mut groups: BTreeMap<u64, Explained> = BTreeMap::new();
    for bits in 0..1u128 << n {
        let t = ElementSet::from_bits(bits);
        let truth = truth_bits(flat, t);
        for &p in &patterns {
            let g = groups.entry(truth ^ p).or_insert(Explained {
                by_empty: false,
                by_nonempty: false,
                common: ElementSet::full(n),
            });
            if t.is_empty() {
                g.by_empty = true;
            } else {
                g.by_nonempty = true;
                g.common = g.common.intersection(t);
            }
        }
    }

    // A group decodes to NoExcellent when only the empty set explains it, and
    // to Found(x) when no explanation is empty and all share x; each is then
    // right for every scenario in the group.
    let witness = groups
        .iter()
        .find(|(_, g)| !((g.by_empty && !g.by_nonempty) || (!g.by_empty && !g.common.is_empty())))
        .map(|(&s, _)| AnswerSequence::from_bits(s, m));
    Ok(SolveReport {
        solves: witness.is_none(),
        witness,
        reachable: groups.len(),
    })
}

fn binomial(m: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((m - i) as u64) / (i as u64 + 1))
}

/// All bitmasks over `m` positions with at most `budget` bits set.
fn lie_patterns(m: usize, budget: usize) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut frontier = vec![(0u64, 0usize)];
    for _ in 0..budget.min(m) {
        let mut next = Vec::new();
        for (mask, from) in frontier {
            for p in from..m {
                let grown = mask | 1 << p;
                out.push(grown);
                next.push((grown, p + 1));
            }
        }
        frontier = next;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub has_singleton: bool,
    pub has_repeated_singleton: bool,
}

pub fn structural_checks(family: &MultiFamily) -> StructuralReport {
    let singles = family.entries().iter().filter(|e| e.query.is_singleton());
    StructuralReport {
        has_singleton: singles.clone().next().is_some(),
        has_repeated_singleton: singles.clone().any(|e| e.multiplicity >= 2),
    }
}

/// Removes element `j`, whose singleton must be asked at least twice.
///
/// `j` is first swapped with `n`. Members without `n` are kept, members
/// containing `n` lose it, and the copies of `{n}` are dropped. Members that
/// coincide afterwards have their multiplicities added, clamped at 3.
pub fn restrict(family: &MultiFamily, j: usize) -> Result<MultiFamily> {
    let n = family.n();
    if j == 0 || j > n {
        return Err(Error::ElementOutOfRange { element: j, n });
    }
    let u = family.multiplicity_of(ElementSet::singleton(j));
    if u < 2 {
        return Err(Error::Precondition(format!(
            "{{{j}}} must be asked at least twice to be removed, found {u}"
        )));
    }
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.swap(j - 1, n - 1);
    let swapped = family.permuted(&perm);
    let last = ElementSet::singleton(n);
    let reduced = swapped
        .entries()
        .iter()
        .filter(|e| e.query != last)
        .map(|e| (e.query.without(n), e.multiplicity));
    MultiFamily::new_clamped(n - 1, reduced)
}

/// Combined result of both routes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semantic: Option<SolveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<CoverageReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionReport>,
    pub structure: StructuralReport,
    pub solves: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Semantic,
    Lemma,
    Both,
}

pub fn verify(family: &MultiFamily, mode: VerifyMode) -> Result<Verification> {
    let semantic = match mode {
        VerifyMode::Semantic | VerifyMode::Both => Some(solves(family, 1)?),
        VerifyMode::Lemma => None,
    };
    let (coverage, partition) = match mode {
        VerifyMode::Lemma | VerifyMode::Both => {
            (Some(check_coverage(family)), Some(check_partition_condition(family)?))
        }
        VerifyMode::Semantic => (None, None),
    };
    let lemma_ok = match (&coverage, &partition) {
        (Some(c), Some(p)) => Some(c.covered && p.holds),
        _ => None,
    };
    let semantic_ok = semantic.as_ref().map(|s| s.solves);
    Ok(Verification {
        solves: semantic_ok.unwrap_or(true) && lemma_ok.unwrap_or(true),
        semantic,
        coverage,
        partition,
        structure: structural_checks(family),
    })
}
