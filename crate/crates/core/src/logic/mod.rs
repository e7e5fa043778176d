//! Propositional event formulas over named Boolean event variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub(crate) mod eval;
mod parse;

pub use eval::{equivalent, equivalent_with_cap, eval, CompiledFormula, DEFAULT_CAP};
pub use parse::parse_formula;

/// Lexicographically ordered, duplicate-free set of variable names.
pub type VarSet = BTreeSet<String>;

/// Truth assignment to event variables.
pub type Assignment = BTreeMap<String, bool>;

/// Separator used by [`Formula::rename_vars`].
pub const RENAME_SEP: &str = "::";

/// Event formula AST. `PartialEq` is structural equality; use
/// [`equivalent`] for semantic equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// The event variables occurring in the formula.
    pub fn vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut VarSet) {
        self.visit_vars(&mut |v| {
            if !out.contains(v) {
                out.insert(v.to_string());
            }
        });
    }

    pub(crate) fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Formula::Var(v) => f(v),
            Formula::True | Formula::False => {}
            Formula::Not(a) => a.visit_vars(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    /// True when no variable occurs in the formula.
    pub fn is_ground(&self) -> bool {
        let mut ground = true;
        self.visit_vars(&mut |_| ground = false);
        ground
    }

    /// Rewrites every variable `v` to `prefix::v`.
    pub fn rename_vars(&self, prefix: &str) -> Formula {
        self.map_vars(&|v| format!("{prefix}{RENAME_SEP}{v}"))
    }

    pub fn map_vars(&self, rename: &impl Fn(&str) -> String) -> Formula {
        match self {
            Formula::Var(v) => Formula::Var(rename(v)),
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Not(a) => Formula::not(a.map_vars(rename)),
            Formula::And(a, b) => Formula::and(a.map_vars(rename), b.map_vars(rename)),
            Formula::Or(a, b) => Formula::or(a.map_vars(rename), b.map_vars(rename)),
            Formula::Implies(a, b) => Formula::implies(a.map_vars(rename), b.map_vars(rename)),
            Formula::Iff(a, b) => Formula::iff(a.map_vars(rename), b.map_vars(rename)),
        }
    }

    pub fn eval(&self, mu: &Assignment) -> crate::Result<bool> {
        eval(self, mu)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            Formula::Var(_) | Formula::True | Formula::False => 6,
        }
    }
}

/// Checks `[A-Za-z_][A-Za-z0-9_]*`, optionally joined by `::`.
pub fn is_valid_var_name(name: &str) -> bool {
    !name.is_empty() && name.split(RENAME_SEP).all(is_identifier_segment) && !is_keyword(name)
}

pub(crate) fn is_identifier_segment(seg: &str) -> bool {
    let mut chars = seg.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_keyword(s: &str) -> bool {
    s == "true" || s == "false"
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

// Prints with the minimum parentheses needed to reparse to the same tree:
// `&`, `|`, `<->` are left-associative, `->` is right-associative.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            Formula::Var(v) => write!(f, "{v}"),
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Not(a) => {
                write!(f, "!")?;
                write_child(f, a, 5)
            }
            Formula::And(a, b) => {
                write_child(f, a, p)?;
                write!(f, " & ")?;
                write_child(f, b, p + 1)
            }
            Formula::Or(a, b) => {
                write_child(f, a, p)?;
                write!(f, " | ")?;
                write_child(f, b, p + 1)
            }
            Formula::Iff(a, b) => {
                write_child(f, a, p)?;
                write!(f, " <-> ")?;
                write_child(f, b, p + 1)
            }
            Formula::Implies(a, b) => {
                write_child(f, a, p + 1)?;
                write!(f, " -> ")?;
                write_child(f, b, p)
            }
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = crate::error::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}
