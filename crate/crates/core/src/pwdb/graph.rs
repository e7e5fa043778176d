use std::fmt;

use crate::error::{Error, Result};
use crate::rational::{format_fraction, Prob};
use crate::union_find::UnionFind;

use super::{compatible, UncertainDb};

/// Bipartite graph on the worlds of two sources, with an edge between every
/// compatible pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityGraph {
    pub n_left: usize,
    pub n_right: usize,
    /// `(i, j)` in row-major order.
    pub edges: Vec<(usize, usize)>,
    pub components: Vec<Component>,
    pub left_component: Vec<usize>,
    pub right_component: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub edge_count: usize,
}

impl Component {
    pub fn is_complete_bipartite(&self) -> bool {
        self.edge_count == self.left.len() * self.right.len()
    }

    pub fn is_isolated(&self) -> bool {
        self.edge_count == 0
    }
}

impl CompatibilityGraph {
    pub fn is_complete_bipartite(&self) -> bool {
        self.components.iter().all(Component::is_complete_bipartite)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }
}

/// Builds the compatibility graph of two sources. Components are numbered by
/// their first node, scanning left worlds then right worlds.
pub fn compatibility_graph(s1: &UncertainDb, s2: &UncertainDb) -> CompatibilityGraph {
    let (n, m) = (s1.worlds.len(), s2.worlds.len());
    let mut edges = Vec::new();
    let mut uf = UnionFind::new(n + m);
    for (i, di) in s1.worlds.iter().enumerate() {
        for (j, dj) in s2.worlds.iter().enumerate() {
            if compatible(di, dj, &s1.tuple_set, &s2.tuple_set) {
                edges.push((i, j));
                uf.union(i, n + j);
            }
        }
    }
    let (labels, k) = uf.labels();
    let mut components = vec![
        Component {
            left: Vec::new(),
            right: Vec::new(),
            edge_count: 0,
        };
        k
    ];
    for (i, &c) in labels[..n].iter().enumerate() {
        components[c].left.push(i);
    }
    for (j, &c) in labels[n..].iter().enumerate() {
        components[c].right.push(j);
    }
    for &(i, _) in &edges {
        components[labels[i]].edge_count += 1;
    }
    CompatibilityGraph {
        n_left: n,
        n_right: m,
        edges,
        components,
        left_component: labels[..n].to_vec(),
        right_component: labels[n..].to_vec(),
    }
}

/// One connected component with its probabilistic-constraint constant `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// Mass of the left worlds; equals the right mass when balanced.
    pub constant: Prob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// The two sides carry different probability mass.
    Unbalanced,
    /// A world compatible with no world of the other source.
    Isolated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCheck {
    pub summary: ComponentSummary,
    pub left_mass: Prob,
    pub right_mass: Prob,
    pub violation: Option<Violation>,
}

impl fmt::Display for ComponentCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |prefix: &str, xs: &[usize]| {
            xs.iter()
                .map(|i| format!("{prefix}{}", i + 1))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "{{{} | {}}} left={} right={}",
            names("D", &self.summary.left),
            names("D'", &self.summary.right),
            format_fraction(&self.left_mass),
            format_fraction(&self.right_mass),
        )?;
        match self.violation {
            None => write!(f, " balanced P={}", format_fraction(&self.summary.constant)),
            Some(Violation::Unbalanced) => write!(f, " UNBALANCED"),
            Some(Violation::Isolated) => write!(f, " ISOLATED"),
        }
    }
}

/// Checks, per component, that both sources put the same mass on it.
/// Fails only when a source carries no probabilities.
pub fn check_prob_constraints(
    s1: &UncertainDb,
    s2: &UncertainDb,
    graph: &CompatibilityGraph,
) -> Result<Vec<ComponentCheck>> {
    let (p1, p2) = match (&s1.probs, &s2.probs) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Invalid(
                "probabilistic constraints need probabilities on both sources".into(),
            ))
        }
    };
    Ok(graph
        .components
        .iter()
        .map(|c| {
            let left_mass: Prob = c.left.iter().map(|&i| &p1[i]).sum();
            let right_mass: Prob = c.right.iter().map(|&j| &p2[j]).sum();
            let violation = if c.is_isolated() {
                Some(Violation::Isolated)
            } else if left_mass != right_mass {
                Some(Violation::Unbalanced)
            } else {
                None
            };
            ComponentCheck {
                summary: ComponentSummary {
                    left: c.left.clone(),
                    right: c.right.clone(),
                    constant: left_mass.clone(),
                },
                left_mass,
                right_mass,
                violation,
            }
        })
        .collect())
}
