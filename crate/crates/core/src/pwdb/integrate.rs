use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rational::Prob;

use super::graph::{
    check_prob_constraints, compatibility_graph, CompatibilityGraph, ComponentCheck,
};
use super::{Distribution, Tuple, UncertainDb, World};

/// Two worlds are compatible when they agree on every tuple both sources
/// know about.
pub fn compatible(di: &World, dj: &World, t1: &BTreeSet<Tuple>, t2: &BTreeSet<Tuple>) -> bool {
    let (small, large) = if t1.len() <= t2.len() {
        (t1, t2)
    } else {
        (t2, t1)
    };
    small
        .iter()
        .filter(|t| large.contains(*t))
        .all(|t| di.contains(t) == dj.contains(t))
}

/// Integrates two sources: every compatible pair contributes the union of its
/// worlds. Probabilities are ignored and not attached.
pub fn integrate_pw(s1: &UncertainDb, s2: &UncertainDb) -> Result<UncertainDb> {
    let mut seen = BTreeSet::new();
    let mut worlds = Vec::new();
    for di in &s1.worlds {
        for dj in &s2.worlds {
            if compatible(di, dj, &s1.tuple_set, &s2.tuple_set) {
                let q = di.union(dj);
                if seen.insert(q.clone()) {
                    worlds.push(q);
                }
            }
        }
    }
    if worlds.is_empty() {
        return Err(Error::EmptyIntegration);
    }
    let tuple_set = s1.tuple_set.union(&s2.tuple_set).cloned().collect();
    Ok(UncertainDb::new(tuple_set, worlds, None))
}

/// The probability of one compatible pair, before duplicate worlds merge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointCell {
    pub left: usize,
    pub right: usize,
    pub component: usize,
    pub world: World,
    pub prob: Prob,
}

#[derive(Debug, Clone)]
pub struct JointDistribution {
    pub graph: CompatibilityGraph,
    pub checks: Vec<ComponentCheck>,
    /// Row-major over compatible pairs.
    pub cells: Vec<JointCell>,
    pub tuple_set: BTreeSet<Tuple>,
}

impl JointDistribution {
    /// Merges cells that produce the same world.
    pub fn distribution(&self) -> Distribution {
        Distribution::merged(self.cells.iter().map(|c| (c.world.clone(), c.prob.clone())))
    }

    pub fn into_udb(self) -> UncertainDb {
        let tuple_set = self.tuple_set.clone();
        self.distribution().into_udb(tuple_set)
    }
}

/// Pairwise probabilities under partial independence: a compatible pair
/// `(i, j)` in a component with constant `P` gets `P(Dᵢ)·P(D′ⱼ)/P`.
pub fn joint_distribution(s1: &UncertainDb, s2: &UncertainDb) -> Result<JointDistribution> {
    let graph = compatibility_graph(s1, s2);
    if graph.edges.is_empty() {
        return Err(Error::EmptyIntegration);
    }
    let checks = check_prob_constraints(s1, s2, &graph)?;
    if checks.iter().any(|c| c.violation.is_some()) {
        return Err(Error::ProbConstraintViolation(checks));
    }
    // both present, checked above
    let p1 = s1.probs.as_ref().expect("checked");
    let p2 = s2.probs.as_ref().expect("checked");
    let cells = graph
        .edges
        .iter()
        .map(|&(i, j)| {
            let component = graph.left_component[i];
            let constant = &checks[component].summary.constant;
            JointCell {
                left: i,
                right: j,
                component,
                world: s1.worlds[i].union(&s2.worlds[j]),
                prob: &p1[i] * &p2[j] / constant,
            }
        })
        .collect();
    let tuple_set = s1.tuple_set.union(&s2.tuple_set).cloned().collect();
    Ok(JointDistribution {
        graph,
        checks,
        cells,
        tuple_set,
    })
}

/// Probabilistic integration of two possible-worlds sources.
pub fn integrate_pw_prob(s1: &UncertainDb, s2: &UncertainDb) -> Result<UncertainDb> {
    Ok(joint_distribution(s1, s2)?.into_udb())
}
