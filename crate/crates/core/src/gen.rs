//! Seeded random instances for property tests and the `gen` command.
//!
//! Everything is a pure function of the seed (ChaCha8).

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::logic::Formula;
use crate::prdb::{encode_pw, integrate_pr, EprRelation, PrRelation, PrTuple};
use crate::pwdb::{Tuple, UncertainDb, World};
use crate::rational::{ratio, Prob};

pub const MAX_TUPLES: usize = 8;
pub const MAX_VARS: usize = 4;
pub const MAX_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// Rows per relation, at least one.
    pub max_tuples: usize,
    /// Event variables per relation, at least one.
    pub max_vars: usize,
    pub max_depth: usize,
    /// Chance that a tuple of the second relation is taken from the first.
    pub overlap_bias: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_tuples: 4,
            max_vars: 3,
            max_depth: 2,
            overlap_bias: 0.3,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Invalid(what.to_string()));
        if !(1..=MAX_TUPLES).contains(&self.max_tuples) {
            return bad(&format!("max_tuples must be between 1 and {MAX_TUPLES}"));
        }
        if !(1..=MAX_VARS).contains(&self.max_vars) {
            return bad(&format!("max_vars must be between 1 and {MAX_VARS}"));
        }
        if self.max_depth > MAX_DEPTH {
            return bad(&format!("max_depth must be at most {MAX_DEPTH}"));
        }
        if !(0.0..=1.0).contains(&self.overlap_bias) {
            return bad("overlap_bias must lie in [0, 1]");
        }
        Ok(())
    }
}

fn var_name(i: usize) -> String {
    format!("x{}", i + 1)
}

fn random_formula(rng: &mut ChaCha8Rng, nvars: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        let v = Formula::var(var_name(rng.gen_range(0..nvars)));
        return if rng.gen_bool(0.3) {
            Formula::not(v)
        } else {
            v
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_formula(rng, nvars, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        _ => Formula::iff(sub(rng), sub(rng)),
    }
}

/// A probability `k/d` with `0 < k < d ≤ 20`.
fn random_var_prob(rng: &mut ChaCha8Rng) -> Prob {
    let d = rng.gen_range(2..=20);
    ratio(rng.gen_range(1..d), d)
}

/// Positive weights normalized to sum to `total`.
fn split_mass(rng: &mut ChaCha8Rng, total: &Prob, parts: usize) -> Vec<Prob> {
    let weights: Vec<i64> = (0..parts).map(|_| rng.gen_range(1..=9)).collect();
    let sum: i64 = weights.iter().sum();
    weights.iter().map(|&w| total * ratio(w, sum)).collect()
}

/// A pr-relation over `tuples` whose formulas are structurally distinct and
/// each mention at least one variable; every variable used gets a probability.
fn random_relation(rng: &mut ChaCha8Rng, tuples: &[Tuple], p: &GenParams) -> PrRelation {
    let nvars = rng.gen_range(1..=p.max_vars);
    let mut seen = BTreeSet::new();
    let mut rows = Vec::with_capacity(tuples.len());
    for t in tuples {
        let mut f = random_formula(rng, nvars, p.max_depth);
        let mut tries = 0;
        while seen.contains(&f) {
            tries += 1;
            // deeper formulas give room once shallow ones run out
            f = random_formula(rng, nvars, p.max_depth + tries / 50);
        }
        seen.insert(f.clone());
        rows.push(PrTuple::new(t.clone(), f));
    }
    let mut vars = BTreeSet::new();
    for r in &rows {
        vars.extend(r.event.vars());
    }
    let var_probs = vars
        .into_iter()
        .map(|v| (v, random_var_prob(rng)))
        .collect();
    PrRelation::new(rows, var_probs)
}

/// Two random pr-relations. Both draw variable names from `x1, x2, …`, so
/// integrating them usually exercises renaming. Each tuple of the second
/// relation is shared with the first with probability `overlap_bias`.
pub fn generate_pair(seed: u64, params: &GenParams) -> Result<(PrRelation, PrRelation)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n1 = rng.gen_range(1..=params.max_tuples);
    let n2 = rng.gen_range(1..=params.max_tuples);
    let left: Vec<Tuple> = (0..n1).map(|i| Tuple::new([format!("t{i}")])).collect();
    let mut pool = left.clone();
    pool.shuffle(&mut rng);
    let mut fresh = n1;
    let mut right = Vec::with_capacity(n2);
    for _ in 0..n2 {
        if !pool.is_empty() && rng.gen_bool(params.overlap_bias) {
            right.push(pool.pop().expect("non-empty"));
        } else {
            right.push(Tuple::new([format!("t{fresh}")]));
            fresh += 1;
        }
    }
    right.sort();
    let r = random_relation(&mut rng, &left, params);
    let s = random_relation(&mut rng, &right, params);
    Ok((r, s))
}

/// A random valid probabilistic uncertain database with between 1 and
/// `max_worlds` distinct worlds over at most four tuples. Some tuples may
/// belong to no world.
pub fn generate_udb(seed: u64, max_worlds: usize) -> UncertainDb {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ntuples = rng.gen_range(1..=4);
    let tuples: Vec<Tuple> = (0..ntuples)
        .map(|i| Tuple::new([format!("t{i}")]))
        .collect();
    let nworlds = rng.gen_range(1..=max_worlds.max(1).min(1 << ntuples));
    let mut masks: Vec<u32> = (0..1u32 << ntuples).collect();
    masks.shuffle(&mut rng);
    let worlds: Vec<World> = masks[..nworlds]
        .iter()
        .map(|m| {
            tuples
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, t)| t.clone())
                .collect()
        })
        .collect();
    let probs = split_mass(&mut rng, &ratio(1, 1), nworlds);
    UncertainDb::new(tuples.into_iter().collect(), worlds, Some(probs))
}

/// Both sources of a balanced integration.
#[derive(Debug, Clone)]
pub struct BalancedInstance {
    pub s1: UncertainDb,
    pub s2: UncertainDb,
    pub r: PrRelation,
    pub s: PrRelation,
    pub q: EprRelation,
}

/// Possible-worlds sources whose compatibility components carry equal mass
/// on both sides, their chain encodings (plus up to two independent private
/// rows that become free variable groups), and the integrated epr-relation
/// with probabilities.
pub fn generate_balanced(seed: u64) -> BalancedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(inst) = try_balanced(&mut rng) {
            return inst;
        }
    }
}

fn try_balanced(rng: &mut ChaCha8Rng) -> Option<BalancedInstance> {
    let named = |prefix: &str, n: usize| -> Vec<Tuple> {
        (0..n)
            .map(|i| Tuple::new([format!("{prefix}{i}")]))
            .collect()
    };
    let common = named("c", rng.gen_range(1..=2));
    let private1 = named("p", rng.gen_range(0..=2));
    let private2 = named("q", rng.gen_range(0..=2));

    let mut patterns: Vec<u32> = (0..1u32 << common.len()).collect();
    patterns.shuffle(rng);
    let ncomp = rng.gen_range(1..=patterns.len().min(3));
    let masses = split_mass(rng, &ratio(1, 1), ncomp);

    let side = |rng: &mut ChaCha8Rng, private: &[Tuple]| -> Option<UncertainDb> {
        let mut worlds = Vec::new();
        let mut probs = Vec::new();
        for (k, mass) in masses.iter().enumerate() {
            let mut extras: Vec<u32> = (0..1u32 << private.len()).collect();
            extras.shuffle(rng);
            let count = rng.gen_range(1..=extras.len().min(2));
            for (e, p) in extras[..count].iter().zip(split_mass(rng, mass, count)) {
                let mut w: BTreeSet<Tuple> = BTreeSet::new();
                w.extend(
                    common
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| patterns[k] >> i & 1 == 1)
                        .map(|(_, t)| t.clone()),
                );
                w.extend(
                    private
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| e >> i & 1 == 1)
                        .map(|(_, t)| t.clone()),
                );
                worlds.push(World::new(w));
                probs.push(p);
            }
        }
        let tuple_set: BTreeSet<Tuple> = common.iter().chain(private).cloned().collect();
        let u = UncertainDb::new(tuple_set, worlds, Some(probs));
        usable(&u).then_some(u)
    };
    let s1 = side(rng, &private1)?;
    let s2 = side(rng, &private2)?;

    let mut r = encode_pw(&s1).ok()?;
    let mut s = encode_pw(&s2).ok()?;
    for z in 0..rng.gen_range(0..=2) {
        let name = format!("z{}", z + 1);
        let target = if rng.gen_bool(0.5) { &mut r } else { &mut s };
        let event = if rng.gen_bool(0.5) {
            Formula::var(name.clone())
        } else {
            Formula::not(Formula::var(name.clone()))
        };
        target
            .rows
            .push(PrTuple::new(Tuple::new([format!("z{z}")]), event));
        target.var_probs.insert(name, random_var_prob(rng));
    }
    let q = integrate_pr(&r, &s);
    Some(BalancedInstance { s1, s2, r, s, q })
}

/// At least two worlds, every tuple in some world, and no two tuples with
/// the same membership, so the encoded formulas are non-constant and
/// pairwise distinct.
fn usable(u: &UncertainDb) -> bool {
    if u.worlds.len() < 2 || !u.validate().is_valid() {
        return false;
    }
    let mut seen = BTreeSet::new();
    u.tuple_set.iter().all(|t| {
        let membership: Vec<bool> = u.worlds.iter().map(|w| w.contains(t)).collect();
        membership.contains(&true) && seen.insert(membership)
    }) && u
        .probs
        .as_ref()
        .is_some_and(|p| p.iter().all(|x| !x.is_zero()))
}
