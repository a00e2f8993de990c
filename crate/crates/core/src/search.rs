//! Exhaustive search for the smallest solving families on tiny universes.
//!
//! A family on `n <= 4` elements is a multiplicity vector indexed by subset
//! mask (0..2^n), each multiplicity in 0..=3. Families are enumerated up to
//! relabeling of elements: a vector is kept only if it is the
//! lexicographically smallest among its images under all `n!` permutations.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ElementSet, MultiFamily, MAX_MULTIPLICITY};
use crate::verifier::{check_coverage, solves, structural_checks};

/// Largest universe [`min_family_size`] accepts.
pub const MAX_SEARCH_N: usize = 4;

/// Largest universe [`all_minimal_families`] accepts.
pub const MAX_ALL_MINIMAL_N: usize = 3;

const SLOTS: usize = 1 << MAX_SEARCH_N;

/// Multiplicity per subset mask.
type Counts = [u8; SLOTS];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Skip candidates failing a necessary condition before the full check.
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { prune: true }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PruneCounts {
    pub coverage: u64,
    pub no_singleton: u64,
    pub no_repeated_singleton: u64,
}

impl PruneCounts {
    fn add(self, other: PruneCounts) -> PruneCounts {
        PruneCounts {
            coverage: self.coverage + other.coverage,
            no_singleton: self.no_singleton + other.no_singleton,
            no_repeated_singleton: self.no_repeated_singleton + other.no_repeated_singleton,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub n: usize,
    /// `None` when nothing up to `max_m` solves.
    pub min_size: Option<usize>,
    pub max_m: usize,
    /// Every solving family of size `min_size`, one per isomorphism class.
    pub witnesses: Vec<MultiFamily>,
    /// Non-isomorphic families generated across all sizes tried.
    pub families_examined: u64,
    /// Families that reached the full semantic check.
    pub fully_checked: u64,
    pub pruned_by: PruneCounts,
}

/// Relabelings of `[n]` as subset-mask maps: `tables[p][mask]` is the image
/// of `mask`.
struct Relabelings {
    slots: usize,
    tables: Vec<Vec<usize>>,
}

impl Relabelings {
    fn new(n: usize) -> Self {
        let slots = 1usize << n;
        let tables = permutations(n)
            .into_iter()
            .map(|perm| {
                (0..slots)
                    .map(|mask| ElementSet::from_bits(mask as u128).permuted(&perm).bits() as usize)
                    .collect()
            })
            .collect();
        Relabelings { slots, tables }
    }

    fn apply(&self, table: &[usize], counts: &Counts) -> Counts {
        let mut out = [0u8; SLOTS];
        for mask in 0..self.slots {
            out[table[mask]] = counts[mask];
        }
        out
    }

    fn canonical(&self, counts: &Counts) -> Counts {
        self.tables
            .iter()
            .map(|t| self.apply(t, counts))
            .min()
            .expect("at least the identity permutation")
    }

    fn is_canonical(&self, counts: &Counts) -> bool {
        self.tables.iter().all(|t| self.apply(t, counts) >= *counts)
    }
}

/// All permutations of `1..=n` (as images of `1..=n`).
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i + 1);
                extend(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Every multiplicity vector over `slots` (lowest slot `first`) summing to `m`.
fn count_vectors(slots: usize, first: usize, m: usize) -> Vec<Counts> {
    fn fill(slot: usize, slots: usize, left: usize, cur: &mut Counts, out: &mut Vec<Counts>) {
        if slot == slots {
            if left == 0 {
                out.push(*cur);
            }
            return;
        }
        let room = (slots - slot - 1) * MAX_MULTIPLICITY;
        for u in 0..=MAX_MULTIPLICITY.min(left) {
            if left - u > room {
                continue;
            }
            cur[slot] = u as u8;
            fill(slot + 1, slots, left - u, cur, out);
        }
        cur[slot] = 0;
    }
    let mut out = Vec::new();
    fill(first, slots, m, &mut [0u8; SLOTS], &mut out);
    out
}

fn to_family(n: usize, counts: &Counts) -> MultiFamily {
    let pairs = (0..1usize << n)
        .filter(|&mask| counts[mask] > 0)
        .map(|mask| (ElementSet::from_bits(mask as u128), counts[mask] as usize));
    MultiFamily::new(n, pairs)
        .expect("enumerated vectors respect the universe and multiplicity cap")
        .canonical_order()
}

fn to_counts(family: &MultiFamily) -> Counts {
    assert!(family.n() <= MAX_SEARCH_N);
    let mut counts = [0u8; SLOTS];
    for e in family.entries() {
        counts[e.query.bits() as usize] = e.multiplicity as u8;
    }
    counts
}

/// The representative of a family's relabeling class, as enumerated by
/// [`enumerate_families`].
pub fn canonical_form(family: &MultiFamily) -> Result<MultiFamily> {
    check_search_n(family.n(), MAX_SEARCH_N)?;
    let rel = Relabelings::new(family.n());
    Ok(to_family(family.n(), &rel.canonical(&to_counts(family))))
}

fn check_search_n(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::Capacity(format!(
            "exhaustive family search supports n <= {max}, got n = {n}"
        )));
    }
    Ok(())
}

/// All families of exactly `m` questions on `[n]`, one per relabeling class,
/// in ascending vector order. Empty queries are included only on request.
pub fn enumerate_families(n: usize, m: usize, include_empty: bool) -> Result<Vec<MultiFamily>> {
    check_search_n(n, MAX_SEARCH_N)?;
    Ok(canonical_vectors(n, m, include_empty)
        .iter()
        .map(|c| to_family(n, c))
        .collect())
}

fn canonical_vectors(n: usize, m: usize, include_empty: bool) -> Vec<Counts> {
    let rel = Relabelings::new(n);
    let first = if include_empty { 0 } else { 1 };
    let mut vectors = count_vectors(1 << n, first, m);
    vectors.retain(|c| rel.is_canonical(c));
    vectors
}

#[derive(Default)]
struct SizeOutcome {
    examined: u64,
    checked: u64,
    pruned: PruneCounts,
    solving: Vec<Counts>,
}

fn examine(n: usize, m: usize, options: SearchOptions) -> Result<SizeOutcome> {
    let vectors = canonical_vectors(n, m, false);
    let outcomes: Vec<Result<(PruneCounts, bool, bool)>> = vectors
        .par_iter()
        .map(|c| {
            let family = to_family(n, c);
            let mut pruned = PruneCounts::default();
            // The singleton conditions only bind once there is an element.
            if options.prune && n > 0 {
                let structure = structural_checks(&family);
                if !check_coverage(&family).covered {
                    pruned.coverage = 1;
                } else if !structure.has_singleton {
                    pruned.no_singleton = 1;
                } else if !structure.has_repeated_singleton {
                    pruned.no_repeated_singleton = 1;
                }
                if pruned != PruneCounts::default() {
                    return Ok((pruned, false, false));
                }
            }
            Ok((pruned, true, solves(&family, 1)?.solves))
        })
        .collect();
    let mut out = SizeOutcome {
        examined: vectors.len() as u64,
        ..SizeOutcome::default()
    };
    for (c, outcome) in vectors.iter().zip(outcomes) {
        let (pruned, checked, solving) = outcome?;
        out.pruned = out.pruned.add(pruned);
        out.checked += checked as u64;
        if solving {
            out.solving.push(*c);
        }
    }
    Ok(out)
}

/// Smallest solving family size on `[n]`, trying `m = 0, 1, ..., max_m`
/// with the default pruning.
pub fn min_family_size(n: usize, max_m: usize) -> Result<SearchReport> {
    min_family_size_with(n, max_m, SearchOptions::default())
}

pub fn min_family_size_with(n: usize, max_m: usize, options: SearchOptions) -> Result<SearchReport> {
    check_search_n(n, MAX_SEARCH_N)?;
    if max_m < 2 * n + 1 && n > 0 {
        return Err(Error::Precondition(format!(
            "max_m must be at least 2n + 1 = {}, got {max_m}",
            2 * n + 1
        )));
    }
    let mut report = SearchReport {
        n,
        min_size: None,
        max_m,
        witnesses: Vec::new(),
        families_examined: 0,
        fully_checked: 0,
        pruned_by: PruneCounts::default(),
    };
    for m in 0..=max_m {
        let outcome = examine(n, m, options)?;
        report.families_examined += outcome.examined;
        report.fully_checked += outcome.checked;
        report.pruned_by = report.pruned_by.add(outcome.pruned);
        if !outcome.solving.is_empty() {
            report.min_size = Some(m);
            report.witnesses = outcome.solving.iter().map(|c| to_family(n, c)).collect();
            break;
        }
    }
    Ok(report)
}

/// Every solving family with exactly `2n + 1` questions, one per relabeling
/// class. No pruning is applied, so the result can be used to test the
/// necessary conditions the search prunes on.
pub fn all_minimal_families(n: usize) -> Result<Vec<MultiFamily>> {
    check_search_n(n, MAX_ALL_MINIMAL_N)?;
    let m = if n == 0 { 0 } else { 2 * n + 1 };
    let outcome = examine(n, m, SearchOptions { prune: false })?;
    Ok(outcome.solving.iter().map(|c| to_family(n, c)).collect())
}
