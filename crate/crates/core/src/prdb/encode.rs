//! Chain encoding of a probabilistic possible-worlds database.
//!
//! With worlds `D₁…Dₙ`, fresh variables `x₁…xₙ₋₁` select world `i` through
//! `¬x₁ ∧ … ∧ ¬xᵢ₋₁ ∧ xᵢ` (the last world takes all negations), and
//! `P(xᵢ) = P(Dᵢ) / (1 − Σ_{k<i} P(Dₖ))`. A tuple's event is the disjunction of
//! the selectors of the worlds containing it.

use num_traits::One;

use crate::error::{Error, Result};
use crate::logic::Formula;
use crate::pwdb::UncertainDb;
use crate::rational::Prob;

use super::{PrRelation, PrTuple, VarProbs};

/// Chain variables are named `x1`, `x2`, ….
pub const CHAIN_VAR_PREFIX: &str = "x";

fn chain_var(i: usize) -> String {
    format!("{CHAIN_VAR_PREFIX}{}", i + 1)
}

/// Encodes a valid probabilistic uncertain database as a pr-relation whose
/// expansion reproduces the worlds and their probabilities exactly.
pub fn encode_pw(u: &UncertainDb) -> Result<PrRelation> {
    let report = u.validate();
    if !report.is_valid() {
        return Err(Error::Invalid(report.to_string()));
    }
    let probs = u
        .probs
        .as_ref()
        .ok_or_else(|| Error::Invalid("encoding needs world probabilities".into()))?;
    let n = u.worlds.len();

    let selectors: Vec<Formula> = (0..n)
        .map(|i| {
            let negs = (0..i).map(|k| Formula::not(Formula::var(chain_var(k))));
            let pos = (i + 1 < n).then(|| Formula::var(chain_var(i)));
            Formula::conjunction(negs.chain(pos))
        })
        .collect();

    let mut var_probs = VarProbs::new();
    let mut remaining = Prob::one();
    for (i, p) in probs.iter().enumerate().take(n.saturating_sub(1)) {
        var_probs.insert(chain_var(i), p / &remaining);
        remaining -= p;
    }

    let rows = u
        .tuple_set
        .iter()
        .map(|t| {
            let event = Formula::disjunction(
                u.worlds
                    .iter()
                    .zip(&selectors)
                    .filter(|(w, _)| w.contains(t))
                    .map(|(_, sel)| sel.clone()),
            );
            PrTuple::new(t.clone(), event)
        })
        .collect();
    Ok(PrRelation::new(rows, var_probs))
}
