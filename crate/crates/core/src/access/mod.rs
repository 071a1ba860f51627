//! Monotone access structures over at most 16 participants.
//!
//! Participants are numbered from 1; a group is a [`Subset`] bitmask with bit
//! `p - 1` set for participant `p`. A structure is stored by its minimal
//! authorized groups and membership is upward closure.

mod matroid;

pub use matroid::{circuits_of_matrix, induced_by_matroid};

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_PARTICIPANTS: usize = 16;

/// A group of participants as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_members(members: &[usize]) -> Subset {
        Subset(members.iter().fold(0, |m, &p| m | 1 << (p - 1)))
    }

    /// All of `1..=n`.
    pub fn full(n: usize) -> Subset {
        Subset(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(p: usize) -> Subset {
        Subset(1 << (p - 1))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, p: usize) -> bool {
        (1..=32).contains(&p) && self.0 >> (p - 1) & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn without(self, p: usize) -> Subset {
        Subset(self.0 & !(1 << (p - 1)))
    }

    /// Lowest-indexed member.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Members in ascending order.
    pub fn members(self) -> Vec<usize> {
        (0..32)
            .filter(|i| self.0 >> i & 1 == 1)
            .map(|i| i + 1)
            .collect()
    }

    pub fn shifted(self, offset: usize) -> Subset {
        Subset(self.0 << offset)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members().iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

/// Lexicographic order on ascending member lists; used for report tie-breaks
/// and the JSON form.
pub fn lex_cmp(a: Subset, b: Subset) -> std::cmp::Ordering {
    a.members().cmp(&b.members())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AccessStructure {
    n: usize,
    minimal: Vec<Subset>,
}

impl AccessStructure {
    /// Builds the structure generated by `sets`, dropping every non-minimal member.
    pub fn from_minimal<S: AsRef<[usize]>>(n: usize, sets: &[S]) -> Result<Self> {
        check_n(n)?;
        let mut masks = Vec::with_capacity(sets.len());
        for s in sets {
            for &p in s.as_ref() {
                if p == 0 || p > n {
                    return Err(Error::OutOfRange(format!("participant {p} not in 1..={n}")));
                }
            }
            masks.push(Subset::from_members(s.as_ref()));
        }
        Self::from_subsets(n, masks)
    }

    pub fn from_subsets(n: usize, sets: Vec<Subset>) -> Result<Self> {
        check_n(n)?;
        if sets.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let full = Subset::full(n);
        for &s in &sets {
            if s.is_empty() {
                return Err(Error::EmptyAuthorizedSet);
            }
            if !s.is_subset_of(full) {
                return Err(Error::OutOfRange(format!("group {s} not within 1..={n}")));
            }
        }
        let mut minimal: Vec<Subset> = sets
            .iter()
            .copied()
            .filter(|&s| !sets.iter().any(|&t| t != s && t.is_subset_of(s)))
            .collect();
        minimal.sort();
        minimal.dedup();
        Ok(AccessStructure { n, minimal })
    }

    /// All groups of at least `t` of the `n` participants.
    pub fn threshold(t: usize, n: usize) -> Result<Self> {
        check_n(n)?;
        if t == 0 || t > n {
            return Err(Error::OutOfRange(format!("threshold {t} not in 1..={n}")));
        }
        let sets = (1u32..1 << n)
            .filter(|m| m.count_ones() as usize == t)
            .map(Subset)
            .collect();
        Self::from_subsets(n, sets)
    }

    pub fn n_participants(&self) -> usize {
        self.n
    }

    /// Minimal authorized groups, ascending by bitmask.
    pub fn minimal_sets(&self) -> &[Subset] {
        &self.minimal
    }

    pub fn is_authorized(&self, group: Subset) -> bool {
        self.minimal.iter().any(|m| m.is_subset_of(group))
    }

    /// Participants whose removal from some authorized group leaves it forbidden;
    /// the union of the minimal sets.
    pub fn essential_participants(&self) -> Subset {
        self.minimal
            .iter()
            .fold(Subset::EMPTY, |acc, &m| acc.union(m))
    }

    /// Maximal forbidden groups, ascending by bitmask.
    pub fn maximal_forbidden(&self) -> Vec<Subset> {
        let full = Subset::full(self.n);
        (0u32..1 << self.n)
            .map(Subset)
            .filter(|&b| !self.is_authorized(b))
            .filter(|&b| {
                (1..=self.n)
                    .filter(|&p| !b.contains(p))
                    .all(|p| self.is_authorized(b.union(Subset::singleton(p))))
            })
            .filter(|b| b.is_subset_of(full))
            .collect()
    }

    /// The structure on `self.n + other.n` participants where `other`'s
    /// participants follow `self`'s.
    pub fn disjoint_union(&self, other: &AccessStructure) -> Result<Self> {
        let n = self.n + other.n;
        check_n(n)?;
        let sets = self
            .minimal
            .iter()
            .copied()
            .chain(other.minimal.iter().map(|m| m.shifted(self.n)))
            .collect();
        Self::from_subsets(n, sets)
    }

    /// Connected components of the "appear together in a minimal set" relation.
    /// Inessential participants form singleton components.
    pub fn components(&self) -> Vec<Subset> {
        let mut comps: Vec<Subset> = Vec::new();
        for &m in &self.minimal {
            let (touching, rest): (Vec<Subset>, Vec<Subset>) =
                comps.into_iter().partition(|c| c.0 & m.0 != 0);
            let merged = touching.into_iter().fold(m, |acc, c| acc.union(c));
            comps = rest;
            comps.push(merged);
        }
        let covered = self.essential_participants();
        for p in 1..=self.n {
            if !covered.contains(p) {
                comps.push(Subset::singleton(p));
            }
        }
        comps.sort();
        comps
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PARTICIPANTS {
        return Err(Error::OutOfRange(format!(
            "participant count {n} not in 1..={MAX_PARTICIPANTS}"
        )));
    }
    Ok(())
}
