//! Recognizing integrated epr-relations and recovering pr-relation pairs
//! that integrate to them.
//!
//! [`partition`] groups variables that must stay together (they co-occur in
//! a row formula or in one side of a constraint), links groups joined by a
//! constraint, and 2-colors the links into a `V` side and a `W` side. Groups
//! untouched by constraints are free and may go to either side; every choice
//! yields a generating pair ([`enumerate_pairs`]).
//!
//! Recognition is sufficient, not necessary: a failed check means "not
//! recognized as integrated".

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::logic::{Formula, VarSet};
use crate::prdb::{EprRelation, EventRelation, PrRelation, PrTuple, VarProbs};
use crate::union_find::UnionFind;

/// Outcome of the variable partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionResult {
    /// Variables forced onto the `V` side.
    pub v1: VarSet,
    /// Variables forced onto the `W` side.
    pub w1: VarSet,
    /// Groups touched by no constraint, in order of their smallest variable.
    pub free_groups: Vec<VarSet>,
    /// Every constraint matches exactly one row formula (structurally).
    pub condition3_ok: bool,
    /// Set when some group would need both labels.
    pub failure: Option<String>,
}

impl PartitionResult {
    pub fn is_integrated(&self) -> bool {
        self.failure.is_none() && self.condition3_ok
    }

    /// Number of generating pairs, saturating at `usize::MAX`.
    pub fn pair_count(&self) -> usize {
        1usize
            .checked_shl(self.free_groups.len() as u32)
            .unwrap_or(usize::MAX)
    }

    /// The `(V, W)` split that sends free group `i` to `V` iff bit `i` of
    /// `mask` is set.
    pub fn split(&self, mask: u128) -> (VarSet, VarSet) {
        let mut v = self.v1.clone();
        let mut w = self.w1.clone();
        for (i, g) in self.free_groups.iter().enumerate() {
            let to_v = i < 128 && mask >> i & 1 == 1;
            if to_v {
                v.extend(g.iter().cloned());
            } else {
                w.extend(g.iter().cloned());
            }
        }
        (v, w)
    }
}

/// Two pr-relations over disjoint variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrPair {
    pub r: PrRelation,
    pub s: PrRelation,
}

/// Elementary steps taken, for checking that work grows linearly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount(pub u64);

impl OpCount {
    fn tick(&mut self, n: usize) {
        self.0 += n as u64;
    }
}

fn formulas(q: &EprRelation) -> impl Iterator<Item = &Formula> {
    q.rows
        .iter()
        .map(|r| &r.event)
        .chain(q.constraints.iter().flat_map(|c| [&c.lhs, &c.rhs]))
}

/// Runs the partition. Failure is reported in-band.
pub fn partition(q: &EprRelation) -> PartitionResult {
    partition_counted(q).0
}

pub fn partition_counted(q: &EprRelation) -> (PartitionResult, OpCount) {
    let mut ops = OpCount::default();
    let vars = q.event_vars();
    let index: HashMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let names: Vec<&String> = vars.iter().collect();

    // step 1: merge variables that co-occur in one formula
    let mut uf = UnionFind::new(vars.len());
    for f in formulas(q) {
        let mut first = None;
        f.visit_vars(&mut |v| {
            ops.tick(1);
            let i = index[v];
            match first {
                None => first = Some(i),
                Some(j) => {
                    uf.union(i, j);
                }
            }
        });
    }
    let (var_group, n_groups) = uf.labels();
    let mut groups = vec![VarSet::new(); n_groups];
    for (i, &g) in var_group.iter().enumerate() {
        groups[g].insert(names[i].clone());
    }
    let group_of = |f: &Formula| -> Option<usize> {
        let mut g = None;
        f.visit_vars(&mut |v| g = Some(var_group[index[v]]));
        g
    };

    // step 2: groups linked through a constraint must take opposite sides
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_groups];
    let mut failure = None;
    for (ci, c) in q.constraints.iter().enumerate() {
        ops.tick(1);
        if let (Some(a), Some(b)) = (group_of(&c.lhs), group_of(&c.rhs)) {
            if a == b && failure.is_none() {
                failure = Some(format!(
                    "constraint {ci} ({c}) has both sides in the variable group {{{}}}",
                    join(&groups[a])
                ));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
    }

    let mut label: Vec<Option<bool>> = vec![None; n_groups];
    for seed in 0..n_groups {
        if label[seed].is_some() || adj[seed].is_empty() || failure.is_some() {
            continue;
        }
        label[seed] = Some(true);
        let mut queue = VecDeque::from([seed]);
        while let Some(g) = queue.pop_front() {
            let here = label[g].expect("queued nodes are labeled");
            for &h in &adj[g] {
                ops.tick(1);
                match label[h] {
                    None => {
                        label[h] = Some(!here);
                        queue.push_back(h);
                    }
                    Some(l) if l == here => {
                        failure.get_or_insert_with(|| {
                            format!(
                                "variable group {{{}}} would be labeled both V and W",
                                join(&groups[h])
                            )
                        });
                    }
                    Some(_) => {}
                }
            }
        }
    }

    let condition3_ok = condition3(q, &mut ops).is_none();

    let result = if failure.is_some() {
        PartitionResult {
            v1: VarSet::new(),
            w1: VarSet::new(),
            free_groups: groups,
            condition3_ok,
            failure,
        }
    } else {
        let mut v1 = VarSet::new();
        let mut w1 = VarSet::new();
        let mut free_groups = Vec::new();
        for (g, vars) in groups.into_iter().enumerate() {
            match label[g] {
                Some(true) => v1.extend(vars),
                Some(false) => w1.extend(vars),
                None => free_groups.push(vars),
            }
        }
        PartitionResult {
            v1,
            w1,
            free_groups,
            condition3_ok,
            failure: None,
        }
    };
    (result, ops)
}

fn join(vars: &VarSet) -> String {
    vars.iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join(",")
}

/// For each constraint, the unique row whose formula is structurally one of
/// its sides, and whether that side is the left one.
fn constraint_rows(
    q: &EprRelation,
    ops: &mut OpCount,
) -> std::result::Result<Vec<(usize, bool)>, String> {
    let mut by_formula: HashMap<&Formula, Vec<usize>> = HashMap::new();
    for (i, r) in q.rows.iter().enumerate() {
        ops.tick(1);
        by_formula.entry(&r.event).or_default().push(i);
    }
    let none: Vec<usize> = Vec::new();
    q.constraints
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            ops.tick(1);
            let left = by_formula.get(&c.lhs).unwrap_or(&none);
            let right = by_formula.get(&c.rhs).unwrap_or(&none);
            let mut hits: Vec<(usize, bool)> = left.iter().map(|&i| (i, true)).collect();
            hits.extend(
                right
                    .iter()
                    .filter(|i| !left.contains(i))
                    .map(|&i| (i, false)),
            );
            match hits.as_slice() {
                [one] => Ok(*one),
                [] => Err(format!("constraint {ci} ({c}) matches no row formula")),
                _ => Err(format!(
                    "constraint {ci} ({c}) matches {} row formulas",
                    hits.len()
                )),
            }
        })
        .collect()
}

fn condition3(q: &EprRelation, ops: &mut OpCount) -> Option<String> {
    constraint_rows(q, ops).err()
}

/// The first reason `(v, w)` fails the recognition conditions, if any.
pub fn integration_problem(q: &EprRelation, v: &VarSet, w: &VarSet) -> Option<String> {
    if let Some(x) = v.intersection(w).next() {
        return Some(format!("variable `{x}` is on both sides"));
    }
    if let Some(x) = q
        .event_vars()
        .iter()
        .find(|x| !v.contains(*x) && !w.contains(*x))
    {
        return Some(format!("variable `{x}` is on neither side"));
    }
    let within = |f: &Formula, side: &VarSet| {
        let mut ok = true;
        f.visit_vars(&mut |x| ok &= side.contains(x));
        ok
    };
    for (i, r) in q.rows.iter().enumerate() {
        if !within(&r.event, v) && !within(&r.event, w) {
            return Some(format!("row {i} ({r}) mixes variables of both sides"));
        }
    }
    for (i, c) in q.constraints.iter().enumerate() {
        let split =
            (within(&c.lhs, v) && within(&c.rhs, w)) || (within(&c.lhs, w) && within(&c.rhs, v));
        if !split {
            return Some(format!(
                "constraint {i} ({c}) does not separate the two sides"
            ));
        }
    }
    condition3(q, &mut OpCount::default())
}

/// Whether `(v, w)` satisfies all three recognition conditions.
pub fn check_integrated(q: &EprRelation, v: &VarSet, w: &VarSet) -> bool {
    integration_problem(q, v, w).is_none()
}

pub fn build_pair(q: &EprRelation, v: &VarSet, w: &VarSet) -> Result<PrPair> {
    build_pair_counted(q, v, w).map(|(p, _)| p)
}

/// Splits the rows of `q` by the side owning their variables, then completes
/// each constrained tuple on the opposite side with the constraint's other
/// formula.
///
/// A variable-free row goes opposite its constraint partner when it has one
/// (so `(Bob,CS102)@false` with `false ≡ ¬y` lands with `x`), else on `r`.
pub fn build_pair_counted(q: &EprRelation, v: &VarSet, w: &VarSet) -> Result<(PrPair, OpCount)> {
    if let Some(reason) = integration_problem(q, v, w) {
        return Err(Error::NotIntegrated(reason));
    }
    let mut ops = OpCount::default();
    let matched = constraint_rows(q, &mut ops).map_err(Error::NotIntegrated)?;
    let mut partner_of: HashMap<usize, &Formula> = HashMap::new();
    for (c, &(row, left)) in q.constraints.iter().zip(&matched) {
        partner_of.insert(row, if left { &c.rhs } else { &c.lhs });
    }

    let on_v = |f: &Formula| {
        let mut any = false;
        let mut all = true;
        f.visit_vars(&mut |x| {
            any = true;
            all &= v.contains(x);
        });
        any.then_some(all)
    };

    // true: row goes to r
    let mut in_r = Vec::with_capacity(q.rows.len());
    for (i, row) in q.rows.iter().enumerate() {
        ops.tick(1);
        let side = match on_v(&row.event) {
            Some(side) => side,
            None => match partner_of.get(&i).and_then(|p| on_v(p)) {
                Some(partner_side) => !partner_side,
                None => true,
            },
        };
        in_r.push(side);
    }

    let mut r_rows: Vec<(usize, PrTuple)> = Vec::new();
    let mut s_rows: Vec<(usize, PrTuple)> = Vec::new();
    for (i, row) in q.rows.iter().enumerate() {
        let dest = if in_r[i] { &mut r_rows } else { &mut s_rows };
        dest.push((i, row.clone()));
    }
    for (c, &(row, left)) in q.constraints.iter().zip(&matched) {
        ops.tick(1);
        let partner = if left { &c.rhs } else { &c.lhs };
        let dest = if in_r[row] { &mut s_rows } else { &mut r_rows };
        dest.push((
            row,
            PrTuple::new(q.rows[row].tuple.clone(), partner.clone()),
        ));
    }
    r_rows.sort_by_key(|(i, _)| *i);
    s_rows.sort_by_key(|(i, _)| *i);

    let (mut r_probs, mut s_probs) = (VarProbs::new(), VarProbs::new());
    if let Some(vp) = &q.var_probs {
        for (k, p) in vp {
            if w.contains(k) {
                s_probs.insert(k.clone(), p.clone());
            } else {
                r_probs.insert(k.clone(), p.clone());
            }
        }
    }
    let pair = PrPair {
        r: PrRelation::new(r_rows.into_iter().map(|(_, t)| t).collect(), r_probs),
        s: PrRelation::new(s_rows.into_iter().map(|(_, t)| t).collect(), s_probs),
    };
    Ok((pair, ops))
}

/// Every generating pair, one per assignment of free groups to sides, in
/// binary-counter order (bit `i` set sends free group `i` to `r`),
/// truncated at `limit`.
pub fn enumerate_pairs(q: &EprRelation, limit: usize) -> Result<Vec<PrPair>> {
    let p = partition(q);
    if let Some(reason) = &p.failure {
        return Err(Error::NotIntegrated(reason.clone()));
    }
    if !p.condition3_ok {
        let reason = condition3(q, &mut OpCount::default()).unwrap_or_default();
        return Err(Error::NotIntegrated(reason));
    }
    let n = p.pair_count().min(limit);
    (0..n as u128)
        .map(|mask| {
            let (v, w) = p.split(mask);
            build_pair(q, &v, &w)
        })
        .collect()
}

/// The pair with every free group on the `s` side.
pub fn default_pair(q: &EprRelation) -> Result<PrPair> {
    enumerate_pairs(q, 1)?
        .pop()
        .ok_or_else(|| Error::NotIntegrated("no generating pair".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::logic::parse_formula;
    use crate::prdb::Constraint;
    use crate::pwdb::Tuple;

    fn vs(names: &[&str]) -> VarSet {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn rows(pairs: &[(&str, &str)]) -> Vec<PrTuple> {
        pairs
            .iter()
            .map(|(t, f)| PrTuple::new(Tuple::new([*t]), parse_formula(f).unwrap()))
            .collect()
    }

    fn pr(pairs: &[(&str, &str)]) -> PrRelation {
        PrRelation::new(rows(pairs), VarProbs::new())
    }

    #[test]
    fn appendix_partition() {
        let p = partition(&golden::appendix_epr());
        assert_eq!(p.v1, vs(&["a"]));
        assert_eq!(p.w1, vs(&["c", "d"]));
        assert_eq!(p.free_groups, vec![vs(&["b"])]);
        assert!(p.condition3_ok);
        assert!(p.failure.is_none());
    }

    #[test]
    fn shared_variable_across_sides_fails() {
        let q = EprRelation::new(
            rows(&[("t1", "x"), ("t2", "x | y")]),
            vec![Constraint::new(
                parse_formula("x").unwrap(),
                parse_formula("x | y").unwrap(),
            )],
            None,
        );
        let p = partition(&q);
        assert!(p.failure.is_some());
        assert!(matches!(
            enumerate_pairs(&q, 8),
            Err(Error::NotIntegrated(_))
        ));
    }

    #[test]
    fn odd_cycle_fails_coloring() {
        let q = EprRelation::new(
            rows(&[("t1", "a"), ("t2", "b"), ("t3", "c")]),
            vec![
                Constraint::new(parse_formula("a").unwrap(), parse_formula("b").unwrap()),
                Constraint::new(parse_formula("b").unwrap(), parse_formula("c").unwrap()),
                Constraint::new(parse_formula("c").unwrap(), parse_formula("a").unwrap()),
            ],
            None,
        );
        let p = partition(&q);
        assert!(p.failure.unwrap().contains("both V and W"));
    }

    #[test]
    fn constraint_free_relation_is_all_free() {
        let q = EprRelation::new(rows(&[("t1", "a & b"), ("t2", "c")]), vec![], None);
        let p = partition(&q);
        assert!(p.v1.is_empty() && p.w1.is_empty());
        assert_eq!(p.free_groups, vec![vs(&["a", "b"]), vs(&["c"])]);
        assert_eq!(enumerate_pairs(&q, 100).unwrap().len(), 4);
    }

    #[test]
    fn condition3_needs_a_unique_row() {
        let q = EprRelation::new(
            rows(&[("t1", "a"), ("t2", "c")]),
            vec![Constraint::new(
                parse_formula("a").unwrap(),
                parse_formula("c").unwrap(),
            )],
            None,
        );
        assert!(!partition(&q).condition3_ok);
        let q = EprRelation::new(
            rows(&[("t1", "a")]),
            vec![Constraint::new(
                parse_formula("b").unwrap(),
                parse_formula("c").unwrap(),
            )],
            None,
        );
        assert!(!partition(&q).condition3_ok);
    }

    #[test]
    fn check_integrated_conditions() {
        let q = golden::appendix_epr();
        assert!(check_integrated(&q, &vs(&["a", "b"]), &vs(&["c", "d"])));
        assert!(check_integrated(&q, &vs(&["a"]), &vs(&["b", "c", "d"])));
        assert!(!check_integrated(&q, &vs(&["a", "c"]), &vs(&["b", "d"])));
        assert!(!check_integrated(&q, &vs(&["a", "b", "c"]), &vs(&["d"])));
        assert!(!check_integrated(&q, &vs(&["a", "b"]), &vs(&["c"])));

        let plain = EprRelation::new(rows(&[("t1", "a & b"), ("t2", "c")]), vec![], None);
        assert!(check_integrated(&plain, &vs(&["a", "b"]), &vs(&["c"])));
        assert!(check_integrated(&plain, &vs(&[]), &vs(&["a", "b", "c"])));
        assert!(!check_integrated(&plain, &vs(&["a"]), &vs(&["b", "c"])));
    }

    #[test]
    fn appendix_pairs() {
        let q = golden::appendix_epr();
        let both = build_pair(&q, &vs(&["a", "b"]), &vs(&["c", "d"])).unwrap();
        assert_eq!(both.r, pr(&[("t1", "a"), ("t2", "b")]));
        assert_eq!(both.s, pr(&[("t1", "c"), ("t3", "!c | d")]));

        let alt = build_pair(&q, &vs(&["a"]), &vs(&["b", "c", "d"])).unwrap();
        assert_eq!(alt.r, pr(&[("t1", "a")]));
        assert_eq!(alt.s, pr(&[("t1", "c"), ("t2", "b"), ("t3", "!c | d")]));

        let all = enumerate_pairs(&q, 10).unwrap();
        assert_eq!(all, vec![alt, both]);
    }

    #[test]
    fn andy_jane_recovers_sources() {
        let pair = default_pair(&golden::andy_jane_epr()).unwrap();
        assert_eq!(pair.r, golden::andy_pr());
        assert_eq!(pair.s, golden::jane_pr());
    }

    #[test]
    fn enumeration_truncates() {
        let q = EprRelation::new(rows(&[("t1", "a"), ("t2", "b"), ("t3", "c")]), vec![], None);
        let pairs = enumerate_pairs(&q, 4).unwrap();
        assert_eq!(pairs.len(), 4);
        let all = enumerate_pairs(&q, usize::MAX).unwrap();
        assert_eq!(all.len(), 8);
        assert_eq!(&all[..4], &pairs[..]);
    }

    #[test]
    fn build_pair_rejects_bad_split() {
        let q = golden::appendix_epr();
        assert!(matches!(
            build_pair(&q, &vs(&["a", "c"]), &vs(&["b", "d"])),
            Err(Error::NotIntegrated(_))
        ));
    }

    #[test]
    fn probabilities_follow_variables() {
        let q = golden::appendix_epr_with("1/3", "1/2", "1/4");
        let pair = build_pair(&q, &vs(&["a"]), &vs(&["b", "c", "d"])).unwrap();
        assert_eq!(pair.r.var_probs.keys().collect::<Vec<_>>(), ["a"]);
        assert_eq!(pair.s.var_probs.keys().collect::<Vec<_>>(), ["b", "c", "d"]);
    }
}
