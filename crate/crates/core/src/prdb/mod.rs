//! Probabilistic relations (`t@f` rows over independent event variables) and
//! extended probabilistic relations (the same plus event constraints `f ≡ g`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::logic::{Formula, VarSet};
use crate::pwdb::{Tuple, ValidationReport};
use crate::rational::{format_fraction, is_var_prob, Prob};

mod encode;
mod evf;
mod expand;
mod integrate;

pub use encode::{encode_pw, CHAIN_VAR_PREFIX};
pub use evf::evf;
pub use expand::{expand_epr, expand_pr, world_set};
pub use integrate::{disjoint_sources, integrate_pr, LEFT_PREFIX, RIGHT_PREFIX};

/// Probabilities of event variables.
pub type VarProbs = BTreeMap<String, Prob>;

/// A tuple with its event formula, written `t@f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrTuple {
    pub tuple: Tuple,
    pub event: Formula,
}

impl PrTuple {
    pub fn new(tuple: Tuple, event: Formula) -> Self {
        PrTuple { tuple, event }
    }
}

impl fmt::Display for PrTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.tuple, self.event)
    }
}

/// An event constraint `lhs ≡ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Constraint {
    pub fn new(lhs: Formula, rhs: Formula) -> Self {
        Constraint { lhs, rhs }
    }

    pub fn as_formula(&self) -> Formula {
        Formula::iff(self.lhs.clone(), self.rhs.clone())
    }

    /// The constraint with its sides swapped.
    pub fn flipped(&self) -> Constraint {
        Constraint::new(self.rhs.clone(), self.lhs.clone())
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_formula())
    }
}

/// Read access shared by pr- and epr-relations.
pub trait EventRelation {
    fn rows(&self) -> &[PrTuple];

    fn constraints(&self) -> &[Constraint] {
        &[]
    }

    fn tuple_set(&self) -> BTreeSet<Tuple> {
        self.rows().iter().map(|r| r.tuple.clone()).collect()
    }

    /// Variables occurring in row formulas and constraints.
    fn event_vars(&self) -> VarSet {
        let mut vars = VarSet::new();
        for r in self.rows() {
            r.event.collect_vars(&mut vars);
        }
        for c in self.constraints() {
            c.lhs.collect_vars(&mut vars);
            c.rhs.collect_vars(&mut vars);
        }
        vars
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrRelation {
    pub rows: Vec<PrTuple>,
    pub var_probs: VarProbs,
}

impl EventRelation for PrRelation {
    fn rows(&self) -> &[PrTuple] {
        &self.rows
    }
}

impl PrRelation {
    pub fn new(rows: Vec<PrTuple>, var_probs: VarProbs) -> Self {
        PrRelation { rows, var_probs }
    }

    /// All variables, including probability-only ones.
    pub fn all_vars(&self) -> VarSet {
        let mut vars = self.event_vars();
        vars.extend(self.var_probs.keys().cloned());
        vars
    }

    pub fn rename_vars(&self, prefix: &str) -> PrRelation {
        let renamed = |v: &str| format!("{prefix}{}{v}", crate::logic::RENAME_SEP);
        PrRelation {
            rows: self
                .rows
                .iter()
                .map(|r| PrTuple::new(r.tuple.clone(), r.event.map_vars(&renamed)))
                .collect(),
            var_probs: self
                .var_probs
                .iter()
                .map(|(k, p)| (renamed(k), p.clone()))
                .collect(),
        }
    }

    /// Distinct tuples and in-range probabilities; variables may lack one.
    pub fn validate_structure(&self) -> ValidationReport {
        let mut violations = duplicate_tuples(&self.rows);
        violations.extend(bad_probs(&self.var_probs));
        ValidationReport { violations }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = duplicate_tuples(&self.rows);
        for v in self.event_vars() {
            if !self.var_probs.contains_key(&v) {
                violations.push(format!("event variable `{v}` has no probability"));
            }
        }
        violations.extend(bad_probs(&self.var_probs));
        ValidationReport { violations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EprRelation {
    pub rows: Vec<PrTuple>,
    pub constraints: Vec<Constraint>,
    pub var_probs: Option<VarProbs>,
}

impl EventRelation for EprRelation {
    fn rows(&self) -> &[PrTuple] {
        &self.rows
    }

    fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }
}

impl EprRelation {
    pub fn new(
        rows: Vec<PrTuple>,
        constraints: Vec<Constraint>,
        var_probs: Option<VarProbs>,
    ) -> Self {
        EprRelation {
            rows,
            constraints,
            var_probs,
        }
    }

    /// Checks tuple distinctness and that constraint variables come from the
    /// rows or the probability table.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = duplicate_tuples(&self.rows);
        let mut known = VarSet::new();
        for r in &self.rows {
            r.event.collect_vars(&mut known);
        }
        if let Some(vp) = &self.var_probs {
            known.extend(vp.keys().cloned());
            violations.extend(bad_probs(vp));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let mut cv = c.lhs.vars();
            c.rhs.collect_vars(&mut cv);
            for v in cv.difference(&known) {
                violations.push(format!("constraint {i} uses unknown variable `{v}`"));
            }
        }
        ValidationReport { violations }
    }
}

fn duplicate_tuples(rows: &[PrTuple]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    rows.iter()
        .filter(|r| !seen.insert(&r.tuple))
        .map(|r| format!("tuple {} appears more than once", r.tuple))
        .collect()
}

fn bad_probs(vp: &VarProbs) -> Vec<String> {
    vp.iter()
        .filter(|(_, p)| !is_var_prob(p))
        .map(|(v, p)| format!("P({v}) = {} is outside (0, 1)", format_fraction(p)))
        .collect()
}

impl fmt::Display for PrRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Display for EprRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        for c in &self.constraints {
            writeln!(f, "[{c}]")?;
        }
        Ok(())
    }
}
