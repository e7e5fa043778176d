//! Exact distribution of an integrated epr-relation under partial
//! independence: the relation is split back into a generating pr pair, both
//! sides are expanded, and each compatible pair of worlds gets
//! `P(rᵢ)·P(sⱼ)/P` for the constant `P` of its component.

use crate::decompose::{default_pair, enumerate_pairs, PrPair};
use crate::error::{Error, Result};
use crate::prdb::{expand_pr, EprRelation, EventRelation};
use crate::pwdb::{
    integrate_pw_prob, joint_distribution, ComponentSummary, Distribution, JointCell,
};

#[derive(Debug, Clone)]
pub struct IntegratedDistribution {
    /// Worlds in canonical order, duplicates merged.
    pub distribution: Distribution,
    /// Components of the compatibility graph between `pair_used.r` (left)
    /// and `pair_used.s` (right).
    pub components: Vec<ComponentSummary>,
    pub pair_used: PrPair,
    /// Per compatible pair, before merging.
    pub cells: Vec<JointCell>,
}

fn require_probs(q: &EprRelation) -> Result<()> {
    let vp = q
        .var_probs
        .as_ref()
        .ok_or_else(|| Error::Invalid("the relation carries no variable probabilities".into()))?;
    match q.event_vars().into_iter().find(|v| !vp.contains_key(v)) {
        Some(v) => Err(Error::MissingProbability(v)),
        None => Ok(()),
    }
}

fn pair_distribution(
    pair: &PrPair,
    cap: usize,
) -> Result<(Distribution, Vec<ComponentSummary>, Vec<JointCell>)> {
    let (u1, _) = expand_pr(&pair.r, cap)?;
    let (u2, _) = expand_pr(&pair.s, cap)?;
    let joint = joint_distribution(&u1, &u2)?;
    let mut entries = joint.distribution().entries().to_vec();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let components = joint.checks.into_iter().map(|c| c.summary).collect();
    Ok((Distribution::new(entries), components, joint.cells))
}

/// The distribution of `q`, computed through its default generating pair.
/// The cap bounds each side's expansion separately.
pub fn epr_distribution(q: &EprRelation, cap: usize) -> Result<IntegratedDistribution> {
    require_probs(q)?;
    let pair = default_pair(q)?;
    let (distribution, components, cells) = pair_distribution(&pair, cap)?;
    Ok(IntegratedDistribution {
        distribution,
        components,
        pair_used: pair,
        cells,
    })
}

/// Compares [`epr_distribution`] with the possible-worlds integration of the
/// expanded sources, for each of the first `limit` generating pairs.
pub fn cross_check(q: &EprRelation, cap: usize, limit: usize) -> Result<bool> {
    let base = epr_distribution(q, cap)?;
    for pair in enumerate_pairs(q, limit)? {
        let (u1, _) = expand_pr(&pair.r, cap)?;
        let (u2, _) = expand_pr(&pair.s, cap)?;
        let integrated = integrate_pw_prob(&u1, &u2)?;
        let other = integrated
            .distribution()
            .ok_or_else(|| Error::Invalid("integration lost its probabilities".into()))?;
        if !other.same_as(&base.distribution) {
            return Ok(false);
        }
    }
    Ok(true)
}
