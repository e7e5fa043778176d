//! Probabilistic uncertain databases in the possible-worlds model.
//!
//! A source is a tuple set `T` together with a non-empty list of possible
//! worlds, each a subset of `T`. A tuple of `T` missing from a world is an
//! explicit denial; tuples outside `T` are unknown to the source. Two sources
//! integrate by pairing every compatible pair of worlds (see [`compatible`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{format_fraction, is_world_prob, Prob};

mod graph;
mod integrate;

pub use graph::{
    check_prob_constraints, compatibility_graph, CompatibilityGraph, Component, ComponentCheck,
    ComponentSummary, Violation,
};
pub use integrate::{
    compatible, integrate_pw, integrate_pw_prob, joint_distribution, JointCell, JointDistribution,
};

/// A tuple of attribute values, compared positionally.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple(Vec<String>);

/// Separates attribute values in [`Tuple::canonical_key`].
pub const KEY_SEP: char = '\u{1f}';

impl Tuple {
    pub fn new<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Tuple(values.into_iter().map(Into::into).collect())
    }

    pub fn values(&self) -> &[String] {
        &self.0
    }

    /// Values joined by an unprintable separator; sorts like the tuple itself
    /// for values free of control characters.
    pub fn canonical_key(&self) -> String {
        let mut key = String::with_capacity(self.0.iter().map(|v| v.len() + 1).sum());
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                key.push(KEY_SEP);
            }
            key.push_str(v);
        }
        key
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.join(", "))
    }
}

/// One possible world: a set of tuples. The derived order compares sorted
/// tuple lists, which is the canonical world identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World(BTreeSet<Tuple>);

impl World {
    pub fn new<I: IntoIterator<Item = Tuple>>(tuples: I) -> Self {
        World(tuples.into_iter().collect())
    }

    pub fn empty() -> Self {
        World(BTreeSet::new())
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        self.0.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &World) -> World {
        World(self.0.union(&other.0).cloned().collect())
    }

    /// Tuples of this world that belong to `set`.
    pub fn restrict(&self, set: &BTreeSet<Tuple>) -> World {
        World(self.0.iter().filter(|t| set.contains(t)).cloned().collect())
    }

    pub fn is_subset_of(&self, set: &BTreeSet<Tuple>) -> bool {
        self.0.iter().all(|t| set.contains(t))
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.0
    }
}

impl FromIterator<Tuple> for World {
    fn from_iter<I: IntoIterator<Item = Tuple>>(iter: I) -> Self {
        World::new(iter)
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}

/// A (possibly probabilistic) uncertain database.
///
/// Fields are public; operations assume the invariants checked by
/// [`UncertainDb::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertainDb {
    pub tuple_set: BTreeSet<Tuple>,
    pub worlds: Vec<World>,
    /// Aligned with `worlds` when present.
    pub probs: Option<Vec<Prob>>,
}

impl UncertainDb {
    pub fn new(tuple_set: BTreeSet<Tuple>, worlds: Vec<World>, probs: Option<Vec<Prob>>) -> Self {
        UncertainDb {
            tuple_set,
            worlds,
            probs,
        }
    }

    /// Uses the union of the worlds as the tuple set.
    pub fn from_worlds(worlds: Vec<World>, probs: Option<Vec<Prob>>) -> Self {
        let tuple_set = worlds.iter().flat_map(|w| w.iter().cloned()).collect();
        UncertainDb::new(tuple_set, worlds, probs)
    }

    /// A single world equal to the tuple set, with probability one.
    pub fn certain(tuples: BTreeSet<Tuple>) -> Self {
        let world = World(tuples.clone());
        UncertainDb::new(tuples, vec![world], Some(vec![Prob::one()]))
    }

    pub fn is_probabilistic(&self) -> bool {
        self.probs.is_some()
    }

    /// `(world, probability)` pairs, when probabilities are attached.
    pub fn distribution(&self) -> Option<Distribution> {
        let probs = self.probs.as_ref()?;
        Some(Distribution::new(
            self.worlds
                .iter()
                .cloned()
                .zip(probs.iter().cloned())
                .collect(),
        ))
    }

    pub fn world_set(&self) -> BTreeSet<World> {
        self.worlds.iter().cloned().collect()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_udb(self)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        write!(f, "{}", self.violations.join("; "))
    }
}

/// Lists every violated invariant of `u`; an empty report means valid.
pub fn validate_udb(u: &UncertainDb) -> ValidationReport {
    let mut violations = Vec::new();
    if u.worlds.is_empty() {
        violations.push("the set of possible worlds is empty".to_string());
    }
    for (i, w) in u.worlds.iter().enumerate() {
        if let Some(t) = w.iter().find(|t| !u.tuple_set.contains(t)) {
            violations.push(format!(
                "world {i} contains {t}, which is not in the tuple set"
            ));
        }
    }
    let mut seen = BTreeMap::new();
    for (i, w) in u.worlds.iter().enumerate() {
        if let Some(j) = seen.insert(w, i) {
            violations.push(format!("worlds {j} and {i} are identical"));
        }
    }
    if let Some(probs) = &u.probs {
        if probs.len() != u.worlds.len() {
            violations.push(format!(
                "{} probabilities given for {} worlds",
                probs.len(),
                u.worlds.len()
            ));
        }
        for (i, p) in probs.iter().enumerate() {
            if !is_world_prob(p) {
                violations.push(format!(
                    "world {i} has probability {} outside (0, 1]",
                    format_fraction(p)
                ));
            }
        }
        let total: Prob = probs.iter().sum();
        if !total.is_one() {
            violations.push(format!(
                "probabilities sum to {} ≠ 1",
                format_fraction(&total)
            ));
        }
    }
    ValidationReport { violations }
}

/// A probability distribution over distinct worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    entries: Vec<(World, Prob)>,
}

impl Distribution {
    pub fn new(entries: Vec<(World, Prob)>) -> Self {
        Distribution { entries }
    }

    /// Sums probabilities of repeated worlds, keeping first-occurrence order.
    pub fn merged<I: IntoIterator<Item = (World, Prob)>>(items: I) -> Self {
        let mut index: BTreeMap<World, usize> = BTreeMap::new();
        let mut entries: Vec<(World, Prob)> = Vec::new();
        for (w, p) in items {
            match index.get(&w) {
                Some(&i) => entries[i].1 += p,
                None => {
                    index.insert(w.clone(), entries.len());
                    entries.push((w, p));
                }
            }
        }
        Distribution { entries }
    }

    pub fn entries(&self) -> &[(World, Prob)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(World, Prob)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, w: &World) -> Option<&Prob> {
        self.entries.iter().find(|(x, _)| x == w).map(|(_, p)| p)
    }

    pub fn total(&self) -> Prob {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn to_map(&self) -> BTreeMap<World, Prob> {
        self.entries.iter().cloned().collect()
    }

    pub fn worlds(&self) -> BTreeSet<World> {
        self.entries.iter().map(|(w, _)| w.clone()).collect()
    }

    /// Distinct worlds, every probability in `(0, 1]`, exact sum one.
    pub fn is_normalized(&self) -> bool {
        self.worlds().len() == self.entries.len()
            && self.entries.iter().all(|(_, p)| is_world_prob(p))
            && self.total().is_one()
    }

    /// Exact world-by-world equality, ignoring order.
    pub fn same_as(&self, other: &Distribution) -> bool {
        self.to_map() == other.to_map()
    }

    pub fn into_udb(self, tuple_set: BTreeSet<Tuple>) -> UncertainDb {
        let (worlds, probs) = self.entries.into_iter().unzip();
        UncertainDb::new(tuple_set, worlds, Some(probs))
    }

    pub(crate) fn drop_zero(self) -> Self {
        Distribution {
            entries: self
                .entries
                .into_iter()
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        }
    }
}
