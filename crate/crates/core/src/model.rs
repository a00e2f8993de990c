//! Universe, queries, multi-families, scenarios and answers.
//!
//! Elements are 1-based indices `1..=n`. Sets are stored as 128-bit masks, so
//! the universe is capped at [`MAX_UNIVERSE`] elements. Every family has a
//! canonical flat order: entries in listed order, with the copies of one entry
//! consecutive. Answer strings and lie positions always refer to that order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest universe representable by [`ElementSet`].
pub const MAX_UNIVERSE: usize = 128;

/// Largest multiplicity a member of a multi-family may carry.
pub const MAX_MULTIPLICITY: usize = 3;

/// The ground set `[n] = {1, ..., n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Universe {
    n: usize,
}

impl Universe {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge {
                n,
                max: MAX_UNIVERSE,
            });
        }
        Ok(Universe { n })
    }

    pub fn size(self) -> usize {
        self.n
    }

    pub fn full(self) -> ElementSet {
        ElementSet::full(self.n)
    }

    pub fn contains(self, set: ElementSet) -> bool {
        set.is_subset(self.full())
    }

    /// Every subset of the universe, in ascending mask order.
    pub fn subsets(self) -> impl Iterator<Item = ElementSet> {
        assert!(self.n < 64, "subset enumeration needs n < 64");
        (0..1u64 << self.n).map(|bits| ElementSet::from_bits(bits as u128))
    }
}

/// A set of elements of the universe, as a bitmask where bit `i - 1` stands
/// for element `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElementSet(u128);

/// A question "does this set contain an excellent element?".
pub type Query = ElementSet;

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn from_bits(bits: u128) -> Self {
        ElementSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_UNIVERSE);
        if n == MAX_UNIVERSE {
            ElementSet(u128::MAX)
        } else {
            ElementSet((1u128 << n) - 1)
        }
    }

    /// `{1, ..., k}`, the prefix of length `k`.
    pub fn prefix(k: usize) -> Self {
        Self::full(k)
    }

    /// Consecutive elements `first..=last` (empty if `first > last`).
    pub fn range(first: usize, last: usize) -> Self {
        if first > last {
            return Self::EMPTY;
        }
        ElementSet(Self::full(last).0 & !Self::full(first - 1).0)
    }

    pub fn singleton(element: usize) -> Self {
        assert!((1..=MAX_UNIVERSE).contains(&element));
        ElementSet(1u128 << (element - 1))
    }

    /// Builds a set from 1-based indices. Fails on index 0 or beyond the
    /// representable range; universe membership is checked by the caller.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Result<Self> {
        let mut bits = 0u128;
        for e in elements {
            if e == 0 || e > MAX_UNIVERSE {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    n: MAX_UNIVERSE,
                });
            }
            bits |= 1u128 << (e - 1);
        }
        Ok(ElementSet(bits))
    }

    pub fn contains(self, element: usize) -> bool {
        (1..=MAX_UNIVERSE).contains(&element) && self.0 >> (element - 1) & 1 == 1
    }

    pub fn with(self, element: usize) -> Self {
        ElementSet(self.0 | Self::singleton(element).0)
    }

    pub fn without(self, element: usize) -> Self {
        ElementSet(self.0 & !Self::singleton(element).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_singleton(self) -> bool {
        self.0.is_power_of_two()
    }

    pub fn intersects(self, other: ElementSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn intersection(self, other: ElementSet) -> Self {
        ElementSet(self.0 & other.0)
    }

    pub fn union(self, other: ElementSet) -> Self {
        ElementSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: ElementSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest element, if any.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Largest element, if any.
    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 128 - self.0.leading_zeros() as usize)
    }

    /// Elements in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let low = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(low + 1)
        })
    }

    /// Applies an element relabeling: element `i` becomes `perm[i - 1]`.
    pub fn permuted(self, perm: &[usize]) -> Self {
        let mut bits = 0u128;
        for e in self.iter() {
            bits |= 1u128 << (perm[e - 1] - 1);
        }
        ElementSet(bits)
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for ElementSet {
    /// Panics on out-of-range indices; use [`ElementSet::from_elements`] for
    /// untrusted input.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ElementSet::from_elements(iter).expect("element index out of range")
    }
}

/// One member of a multi-family together with how often it is asked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Entry {
    pub query: Query,
    pub multiplicity: usize,
}

/// A non-adaptive strategy: a list of distinct queries, each with
/// multiplicity 1, 2 or 3.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiFamily {
    universe: Universe,
    entries: Vec<Entry>,
}

impl MultiFamily {
    /// Builds a family, merging equal query sets into one entry. Summed
    /// multiplicities above 3 are rejected.
    pub fn new<I>(n: usize, queries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Query, usize)>,
    {
        Self::build(n, queries, false)
    }

    /// Like [`MultiFamily::new`], but a summed multiplicity above 3 is
    /// clamped to 3 instead of rejected.
    pub fn new_clamped<I>(n: usize, queries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Query, usize)>,
    {
        Self::build(n, queries, true)
    }

    fn build<I>(n: usize, queries: I, clamp: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (Query, usize)>,
    {
        let universe = Universe::new(n)?;
        let mut entries: Vec<Entry> = Vec::new();
        for (query, multiplicity) in queries {
            if !universe.contains(query) {
                let element = query.without_all(universe.full()).min().unwrap_or(0);
                return Err(Error::ElementOutOfRange { element, n });
            }
            if multiplicity == 0 || (!clamp && multiplicity > MAX_MULTIPLICITY) {
                return Err(Error::InvalidMultiplicity {
                    query: query.to_string(),
                    multiplicity,
                });
            }
            match entries.iter_mut().find(|e| e.query == query) {
                Some(entry) => entry.multiplicity += multiplicity,
                None => entries.push(Entry {
                    query,
                    multiplicity,
                }),
            }
        }
        for entry in &mut entries {
            if entry.multiplicity > MAX_MULTIPLICITY {
                if !clamp {
                    return Err(Error::InvalidMultiplicity {
                        query: entry.query.to_string(),
                        multiplicity: entry.multiplicity,
                    });
                }
                entry.multiplicity = MAX_MULTIPLICITY;
            }
        }
        Ok(MultiFamily { universe, entries })
    }

    /// Regroups a flat question list. Equal sets merge into the entry of
    /// their first occurrence.
    pub fn from_flat(n: usize, flat: &[Query]) -> Result<Self> {
        Self::new(n, flat.iter().map(|&q| (q, 1)))
    }

    /// The family with no questions.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn n(&self) -> usize {
        self.universe.n
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Total number of questions `m`, counting copies.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Questions in canonical flat order.
    pub fn flat(&self) -> Vec<Query> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.query, e.multiplicity))
            .collect()
    }

    /// For each flat position, the index of the entry it belongs to.
    pub fn flat_entry_index(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .flat_map(|(k, e)| std::iter::repeat_n(k, e.multiplicity))
            .collect()
    }

    pub fn multiplicity_of(&self, query: Query) -> usize {
        self.entries
            .iter()
            .find(|e| e.query == query)
            .map_or(0, |e| e.multiplicity)
    }

    /// Number of flat positions whose query contains `element`.
    pub fn coverage_of(&self, element: usize) -> usize {
        self.entries
            .iter()
            .filter(|e| e.query.contains(element))
            .map(|e| e.multiplicity)
            .sum()
    }

    /// Entries sorted by decreasing size, ties broken by ascending element
    /// list. Multiplicities are unchanged.
    pub fn canonical_order(&self) -> MultiFamily {
        let mut entries = self.entries.clone();
        entries.sort_by(|a, b| {
            b.query
                .len()
                .cmp(&a.query.len())
                .then_with(|| a.query.iter().cmp(b.query.iter()))
        });
        MultiFamily {
            universe: self.universe,
            entries,
        }
    }

    /// Returns a copy with one more entry (merged if the set is present).
    pub fn with_entry(&self, query: Query, multiplicity: usize) -> Result<MultiFamily> {
        let pairs = self
            .entries
            .iter()
            .map(|e| (e.query, e.multiplicity))
            .chain(std::iter::once((query, multiplicity)));
        MultiFamily::new(self.n(), pairs)
    }

    /// Relabels elements: `i` becomes `perm[i - 1]`. Entry order is kept.
    pub fn permuted(&self, perm: &[usize]) -> MultiFamily {
        assert_eq!(perm.len(), self.n());
        MultiFamily {
            universe: self.universe,
            entries: self
                .entries
                .iter()
                .map(|e| Entry {
                    query: e.query.permuted(perm),
                    multiplicity: e.multiplicity,
                })
                .collect(),
        }
    }
}

impl ElementSet {
    fn without_all(self, other: ElementSet) -> Self {
        ElementSet(self.0 & !other.0)
    }
}

/// Ground truth for one run: the excellent set and where the lie (if any)
/// was told.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub excellent: ElementSet,
    pub lie: Option<usize>,
}

impl Scenario {
    pub fn truthful(excellent: ElementSet) -> Self {
        Scenario {
            excellent,
            lie: None,
        }
    }

    pub fn with_lie(excellent: ElementSet, position: usize) -> Self {
        Scenario {
            excellent,
            lie: Some(position),
        }
    }

    /// All scenarios over `family`: every subset of the universe, each with no
    /// lie and with a lie at every flat position.
    pub fn all_for(family: &MultiFamily) -> impl Iterator<Item = Scenario> + '_ {
        let m = family.len();
        family.universe().subsets().flat_map(move |t| {
            std::iter::once(Scenario::truthful(t)).chain((0..m).map(move |p| Scenario::with_lie(t, p)))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Answer {
    No,
    Yes,
}

impl Answer {
    pub fn flipped(self) -> Answer {
        match self {
            Answer::Yes => Answer::No,
            Answer::No => Answer::Yes,
        }
    }

    pub fn is_yes(self) -> bool {
        self == Answer::Yes
    }

    pub fn as_char(self) -> char {
        match self {
            Answer::Yes => 'Y',
            Answer::No => 'N',
        }
    }
}

impl From<bool> for Answer {
    fn from(yes: bool) -> Self {
        if yes {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}

/// Observed answers in canonical flat order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AnswerSequence(Vec<Answer>);

impl AnswerSequence {
    pub fn new(answers: Vec<Answer>) -> Self {
        AnswerSequence(answers)
    }

    /// Decodes the low `m` bits of `bits`; bit `k` set means position `k`
    /// answered Y.
    pub fn from_bits(bits: u64, m: usize) -> Self {
        AnswerSequence((0..m).map(|k| Answer::from(bits >> k & 1 == 1)).collect())
    }

    /// Packs into a bitmask (bit `k` = position `k` is Y). Needs `len() <= 64`.
    pub fn to_bits(&self) -> u64 {
        assert!(self.0.len() <= 64);
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, a)| acc | (a.is_yes() as u64) << k)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Answer] {
        &self.0
    }

    pub fn get(&self, position: usize) -> Option<Answer> {
        self.0.get(position).copied()
    }

    /// Number of positions where the two sequences differ.
    pub fn distance(&self, other: &AnswerSequence) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| a != b)
            .count()
            + self.0.len().abs_diff(other.0.len())
    }

    pub fn count_yes(&self) -> usize {
        self.0.iter().filter(|a| a.is_yes()).count()
    }
}

impl std::ops::Index<usize> for AnswerSequence {
    type Output = Answer;

    fn index(&self, position: usize) -> &Answer {
        &self.0[position]
    }
}

impl fmt::Display for AnswerSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|a| write!(f, "{}", a.as_char()))
    }
}

impl FromStr for AnswerSequence {
    type Err = Error;

    /// Accepts `Y`/`N` in either case.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'Y' | 'y' => Ok(Answer::Yes),
                'N' | 'n' => Ok(Answer::No),
                other => Err(Error::InvalidAnswer(other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(AnswerSequence)
    }
}

impl Serialize for AnswerSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Outcome of decoding a set of answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// The element is certainly excellent.
    Found(usize),
    /// There is certainly no excellent element.
    NoExcellent,
    /// Consistent explanations disagree; only possible for non-solving
    /// families.
    Undecidable,
    /// No scenario within the lie budget produces these answers.
    Inconsistent,
}

impl Verdict {
    /// Whether the verdict is a definite, usable answer.
    pub fn is_decisive(self) -> bool {
        matches!(self, Verdict::Found(_) | Verdict::NoExcellent)
    }

    /// Whether the verdict is right for a given excellent set. Undecidable
    /// and Inconsistent are never right.
    pub fn is_correct_for(self, excellent: ElementSet) -> bool {
        match self {
            Verdict::Found(x) => excellent.contains(x),
            Verdict::NoExcellent => excellent.is_empty(),
            Verdict::Undecidable | Verdict::Inconsistent => false,
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let len = if matches!(self, Verdict::Found(_)) { 2 } else { 1 };
        let mut map = serializer.serialize_map(Some(len))?;
        match self {
            Verdict::Found(x) => {
                map.serialize_entry("verdict", "found")?;
                map.serialize_entry("element", x)?;
            }
            Verdict::NoExcellent => map.serialize_entry("verdict", "none")?,
            Verdict::Undecidable => map.serialize_entry("verdict", "undecidable")?,
            Verdict::Inconsistent => map.serialize_entry("verdict", "inconsistent")?,
        }
        map.end()
    }
}

/// Y iff the query meets the excellent set.
pub fn truth_of(query: Query, excellent: ElementSet) -> Answer {
    Answer::from(query.intersects(excellent))
}

/// The answers a family receives in a scenario: truthful everywhere except
/// the lie position, which is flipped.
pub fn answers_for(family: &MultiFamily, scenario: &Scenario) -> Result<AnswerSequence> {
    let m = family.len();
    if let Some(position) = scenario.lie {
        if position >= m {
            return Err(Error::LieOutOfRange { position, m });
        }
    }
    let answers = family
        .flat()
        .into_iter()
        .enumerate()
        .map(|(k, q)| {
            let truth = truth_of(q, scenario.excellent);
            if scenario.lie == Some(k) {
                truth.flipped()
            } else {
                truth
            }
        })
        .collect();
    Ok(AnswerSequence(answers))
}

/// Packs the truthful answers of a flat question list into a bitmask.
pub(crate) fn truth_bits(flat: &[Query], excellent: ElementSet) -> u64 {
    debug_assert!(flat.len() <= 64);
    flat.iter()
        .enumerate()
        .fold(0u64, |acc, (k, q)| acc | (q.intersects(excellent) as u64) << k)
}

#[derive(Serialize, Deserialize)]
struct QueryJson {
    elements: Vec<usize>,
    multiplicity: usize,
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    n: usize,
    queries: Vec<QueryJson>,
}

impl Serialize for MultiFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyJson {
            n: self.n(),
            queries: self
                .entries
                .iter()
                .map(|e| QueryJson {
                    elements: e.query.iter().collect(),
                    multiplicity: e.multiplicity,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FamilyJson::deserialize(deserializer)?;
        let mut pairs = Vec::with_capacity(raw.queries.len());
        for q in raw.queries {
            if let Some(&e) = q.elements.iter().find(|&&e| e == 0 || e > raw.n) {
                return Err(D::Error::custom(Error::ElementOutOfRange { element: e, n: raw.n }));
            }
            let set = ElementSet::from_elements(q.elements).map_err(D::Error::custom)?;
            pairs.push((set, q.multiplicity));
        }
        MultiFamily::new(raw.n, pairs).map_err(D::Error::custom)
    }
}
