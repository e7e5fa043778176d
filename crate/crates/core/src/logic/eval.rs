use std::collections::HashMap;

use super::{Assignment, Formula, VarSet};
use crate::error::{Error, Result};

/// Default bound on the number of variables enumerated by truth tables.
pub const DEFAULT_CAP: usize = 20;

/// Evaluates `f` under `mu`. Every variable of `f` must be bound.
pub fn eval(f: &Formula, mu: &Assignment) -> Result<bool> {
    Ok(match f {
        Formula::Var(v) => *mu.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?,
        Formula::True => true,
        Formula::False => false,
        Formula::Not(a) => !eval(a, mu)?,
        Formula::And(a, b) => eval(a, mu)? && eval(b, mu)?,
        Formula::Or(a, b) => eval(a, mu)? || eval(b, mu)?,
        Formula::Implies(a, b) => !eval(a, mu)? || eval(b, mu)?,
        Formula::Iff(a, b) => eval(a, mu)? == eval(b, mu)?,
    })
}

/// Truth-table equivalence with the default variable cap.
pub fn equivalent(f: &Formula, g: &Formula) -> Result<bool> {
    equivalent_with_cap(f, g, DEFAULT_CAP)
}

/// True iff `f` and `g` agree under all assignments to the union of their
/// variables. Fails with [`Error::ExpansionTooLarge`] above `cap` variables.
pub fn equivalent_with_cap(f: &Formula, g: &Formula, cap: usize) -> Result<bool> {
    let mut vars = f.vars();
    g.collect_vars(&mut vars);
    if vars.len() > cap || vars.len() >= 64 {
        return Err(Error::ExpansionTooLarge {
            vars: vars.len(),
            cap,
        });
    }
    let cf = CompiledFormula::new(f, &vars);
    let cg = CompiledFormula::new(g, &vars);
    Ok((0..1u64 << vars.len()).all(|mask| cf.eval_mask(mask) == cg.eval_mask(mask)))
}

#[derive(Debug, Clone)]
enum Node {
    Var(u32),
    Const(bool),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
}

/// A formula with its variables resolved to bit positions of a `u64` mask,
/// for the tight enumeration loops of world expansion.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    root: Node,
}

impl CompiledFormula {
    /// Bit `i` of the mask is the value of the `i`-th variable of `order`.
    /// Panics if a variable of `f` is missing from `order`.
    pub fn new(f: &Formula, order: &VarSet) -> Self {
        let index: HashMap<&str, u32> = order
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i as u32))
            .collect();
        Self::with_index(f, &index)
    }

    pub(crate) fn with_index(f: &Formula, index: &HashMap<&str, u32>) -> Self {
        CompiledFormula {
            root: compile(f, index),
        }
    }

    pub fn eval_mask(&self, mask: u64) -> bool {
        run(&self.root, mask)
    }
}

fn compile(f: &Formula, index: &HashMap<&str, u32>) -> Node {
    let bin = |a: &Formula, b: &Formula| (Box::new(compile(a, index)), Box::new(compile(b, index)));
    match f {
        Formula::Var(v) => Node::Var(
            *index
                .get(v.as_str())
                .unwrap_or_else(|| panic!("variable `{v}` missing from compilation order")),
        ),
        Formula::True => Node::Const(true),
        Formula::False => Node::Const(false),
        Formula::Not(a) => Node::Not(Box::new(compile(a, index))),
        Formula::And(a, b) => {
            let (a, b) = bin(a, b);
            Node::And(a, b)
        }
        Formula::Or(a, b) => {
            let (a, b) = bin(a, b);
            Node::Or(a, b)
        }
        Formula::Implies(a, b) => {
            let (a, b) = bin(a, b);
            Node::Implies(a, b)
        }
        Formula::Iff(a, b) => {
            let (a, b) = bin(a, b);
            Node::Iff(a, b)
        }
    }
}

fn run(n: &Node, mask: u64) -> bool {
    match n {
        Node::Var(i) => mask >> i & 1 == 1,
        Node::Const(b) => *b,
        Node::Not(a) => !run(a, mask),
        Node::And(a, b) => run(a, mask) && run(b, mask),
        Node::Or(a, b) => run(a, mask) || run(b, mask),
        Node::Implies(a, b) => !run(a, mask) || run(b, mask),
        Node::Iff(a, b) => run(a, mask) == run(b, mask),
    }
}

/// Decodes `mask` into a named assignment over `order`.
pub(crate) fn assignment_from_mask(order: &VarSet, mask: u64) -> Assignment {
    order
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), mask >> i & 1 == 1))
        .collect()
}
