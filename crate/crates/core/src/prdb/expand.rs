//! Truth-assignment enumeration.
//!
//! World masses use a common denominator: with `P(a) = nₐ/dₐ`, the weight of
//! an assignment is `∏ (nₐ or dₐ − nₐ) / ∏ dₐ`, so only integer products are
//! accumulated and a single rational is built per world.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::logic::{Assignment, CompiledFormula, VarSet};
use crate::pwdb::{Distribution, UncertainDb, World};
use crate::rational::{format_fraction, is_var_prob};

use super::{EventRelation, PrRelation, VarProbs};

struct Enumerated {
    /// Bitset over rows, first valid mask, accumulated integer weight.
    worlds: Vec<(Vec<u64>, u64, BigInt)>,
}

fn check_cap(vars: &VarSet, cap: usize) -> Result<()> {
    if vars.len() > cap || vars.len() >= 64 {
        return Err(Error::ExpansionTooLarge {
            vars: vars.len(),
            cap,
        });
    }
    Ok(())
}

/// Integer weight tables for the low and high halves of the variable order.
struct Weights {
    low_bits: usize,
    low: Vec<BigInt>,
    high: Vec<BigInt>,
    denominator: BigInt,
}

impl Weights {
    fn new(vars: &VarSet, probs: &VarProbs) -> Result<Self> {
        let mut trues = Vec::with_capacity(vars.len());
        let mut falses = Vec::with_capacity(vars.len());
        let mut denominator = BigInt::one();
        // numerators over the shared denominator of each variable
        for v in vars {
            let p = probs
                .get(v)
                .ok_or_else(|| Error::MissingProbability(v.clone()))?;
            if !is_var_prob(p) {
                return Err(Error::InvalidProbability(format!(
                    "P({v}) = {}",
                    format_fraction(p)
                )));
            }
            trues.push(p.numer().clone());
            falses.push(p.denom() - p.numer());
            denominator *= p.denom();
        }
        let low_bits = vars.len() / 2;
        let table = |range: std::ops::Range<usize>| -> Vec<BigInt> {
            let width = range.len();
            (0..1u64 << width)
                .map(|m| {
                    range
                        .clone()
                        .enumerate()
                        .fold(BigInt::one(), |acc, (bit, var)| {
                            if m >> bit & 1 == 1 {
                                acc * &trues[var]
                            } else {
                                acc * &falses[var]
                            }
                        })
                })
                .collect()
        };
        Ok(Weights {
            low_bits,
            low: table(0..low_bits),
            high: table(low_bits..vars.len()),
            denominator,
        })
    }

    fn weight(&self, mask: u64) -> BigInt {
        let lo = (mask & ((1u64 << self.low_bits) - 1)) as usize;
        let hi = (mask >> self.low_bits) as usize;
        &self.low[lo] * &self.high[hi]
    }
}

fn enumerate<R: EventRelation + ?Sized>(
    rel: &R,
    vars: &VarSet,
    weights: Option<&Weights>,
) -> Enumerated {
    let index: HashMap<&str, u32> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i as u32))
        .collect();
    let rows: Vec<CompiledFormula> = rel
        .rows()
        .iter()
        .map(|r| CompiledFormula::with_index(&r.event, &index))
        .collect();
    let constraints: Vec<(CompiledFormula, CompiledFormula)> = rel
        .constraints()
        .iter()
        .map(|c| {
            (
                CompiledFormula::with_index(&c.lhs, &index),
                CompiledFormula::with_index(&c.rhs, &index),
            )
        })
        .collect();
    let words = rows.len().div_ceil(64);
    let mut slot: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut worlds: Vec<(Vec<u64>, u64, BigInt)> = Vec::new();
    for mask in 0..1u64 << vars.len() {
        if !constraints
            .iter()
            .all(|(l, r)| l.eval_mask(mask) == r.eval_mask(mask))
        {
            continue;
        }
        let mut bits = vec![0u64; words];
        for (i, f) in rows.iter().enumerate() {
            if f.eval_mask(mask) {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        let w = weights.map(|w| w.weight(mask)).unwrap_or_default();
        match slot.get(&bits) {
            Some(&i) => worlds[i].2 += w,
            None => {
                slot.insert(bits.clone(), worlds.len());
                worlds.push((bits, mask, w));
            }
        }
    }
    Enumerated { worlds }
}

fn world_of<R: EventRelation + ?Sized>(rel: &R, bits: &[u64]) -> World {
    rel.rows()
        .iter()
        .enumerate()
        .filter(|(i, _)| bits[i / 64] >> (i % 64) & 1 == 1)
        .map(|(_, r)| r.tuple.clone())
        .collect()
}

/// Expands a pr-relation into its possible worlds with their probabilities:
/// each truth assignment contributes the product of `P(a)` over true and
/// `1 − P(a)` over false variables to the world it selects.
///
/// Worlds come out in canonical order; the tuple set is every tuple of `r`.
pub fn expand_pr(r: &PrRelation, cap: usize) -> Result<(UncertainDb, Distribution)> {
    let vars = r.event_vars();
    check_cap(&vars, cap)?;
    let weights = Weights::new(&vars, &r.var_probs)?;
    let mut entries: Vec<(World, BigRational)> = enumerate(r, &vars, Some(&weights))
        .worlds
        .into_iter()
        .map(|(bits, _, w)| {
            (
                world_of(r, &bits),
                BigRational::new(w, weights.denominator.clone()),
            )
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let dist = Distribution::new(entries).drop_zero();
    let udb = dist.clone().into_udb(r.tuple_set());
    Ok((udb, dist))
}

/// Worlds reachable by valid assignments, each with the first valid
/// assignment (in counting order) that produces it. No probabilities.
pub fn expand_epr<R: EventRelation + ?Sized>(
    q: &R,
    cap: usize,
) -> Result<Vec<(World, Assignment)>> {
    let vars = q.event_vars();
    check_cap(&vars, cap)?;
    let found = enumerate(q, &vars, None);
    if found.worlds.is_empty() {
        return Err(Error::NoValidAssignment);
    }
    let mut out: Vec<(World, Assignment)> = found
        .worlds
        .into_iter()
        .map(|(bits, mask, _)| {
            (
                world_of(q, &bits),
                crate::logic::eval::assignment_from_mask(&vars, mask),
            )
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// The set of possible worlds of a pr- or epr-relation.
pub fn world_set<R: EventRelation + ?Sized>(rel: &R, cap: usize) -> Result<BTreeSet<World>> {
    Ok(expand_epr(rel, cap)?.into_iter().map(|(w, _)| w).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::logic::{parse_formula, Formula, DEFAULT_CAP};
    use crate::prdb::{Constraint, EprRelation, PrTuple};
    use crate::pwdb::Tuple;
    use crate::rational::ratio;

    #[test]
    fn single_certain_tuple() {
        let t = Tuple::new(["t"]);
        let r = PrRelation::new(
            vec![PrTuple::new(t.clone(), Formula::True)],
            VarProbs::new(),
        );
        let (udb, dist) = expand_pr(&r, DEFAULT_CAP).unwrap();
        assert_eq!(udb.worlds, vec![World::new([t])]);
        assert_eq!(dist.entries()[0].1, ratio(1, 1));
    }

    #[test]
    fn missing_probability_is_an_error() {
        let r = PrRelation::new(
            vec![PrTuple::new(Tuple::new(["t"]), parse_formula("x").unwrap())],
            VarProbs::new(),
        );
        assert!(
            matches!(expand_pr(&r, DEFAULT_CAP), Err(Error::MissingProbability(v)) if v == "x")
        );
    }

    #[test]
    fn cap_is_enforced() {
        let r = golden::example5_r2();
        assert!(matches!(
            expand_pr(&r, 2),
            Err(Error::ExpansionTooLarge { vars: 3, cap: 2 })
        ));
    }

    #[test]
    fn unsatisfiable_constraints() {
        let q = EprRelation::new(
            vec![PrTuple::new(Tuple::new(["t"]), parse_formula("x").unwrap())],
            vec![Constraint::new(
                parse_formula("x").unwrap(),
                parse_formula("!x").unwrap(),
            )],
            None,
        );
        assert!(matches!(
            expand_epr(&q, DEFAULT_CAP),
            Err(Error::NoValidAssignment)
        ));
    }

    #[test]
    fn probability_only_variables_are_ignored() {
        let mut r = golden::example5_r1();
        r.var_probs.insert("unused".into(), ratio(1, 3));
        let (_, with) = expand_pr(&r, DEFAULT_CAP).unwrap();
        let (_, without) = expand_pr(&golden::example5_r1(), DEFAULT_CAP).unwrap();
        assert_eq!(with, without);
    }
}
