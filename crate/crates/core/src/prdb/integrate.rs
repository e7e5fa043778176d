use std::borrow::Cow;
use std::cmp::Ordering;

use super::{Constraint, EprRelation, PrRelation, PrTuple, VarProbs};

/// Variable prefix applied to the first source when the sources share names.
pub const LEFT_PREFIX: &str = "s1";
/// Variable prefix applied to the second source when the sources share names.
pub const RIGHT_PREFIX: &str = "s2";

/// Returns the sources with disjoint variable sets, renaming both with
/// [`LEFT_PREFIX`] / [`RIGHT_PREFIX`] only when their variables intersect.
pub fn disjoint_sources<'a>(
    r: &'a PrRelation,
    s: &'a PrRelation,
) -> (Cow<'a, PrRelation>, Cow<'a, PrRelation>) {
    let rv = r.all_vars();
    if s.all_vars().iter().any(|v| rv.contains(v)) {
        (
            Cow::Owned(r.rename_vars(LEFT_PREFIX)),
            Cow::Owned(s.rename_vars(RIGHT_PREFIX)),
        )
    } else {
        (Cow::Borrowed(r), Cow::Borrowed(s))
    }
}

/// Integrates two pr-relations into an epr-relation.
///
/// Non-common rows are copied from their source. A common tuple is copied
/// once, from `s`, and contributes the constraint `f ≡ g` with `f` from `r`
/// and `g` from `s`. Rows come out ordered by canonical tuple key and
/// constraints follow row order. Sorting dominates: `O(n log n)`.
pub fn integrate_pr(r: &PrRelation, s: &PrRelation) -> EprRelation {
    let (r, s) = disjoint_sources(r, s);

    let keyed = |rel: &PrRelation| {
        let mut v: Vec<(String, usize)> = rel
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| (row.tuple.canonical_key(), i))
            .collect();
        v.sort_unstable();
        v
    };
    let rk = keyed(&r);
    let sk = keyed(&s);

    let mut rows = Vec::with_capacity(rk.len() + sk.len());
    let mut constraints = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < rk.len() || j < sk.len() {
        let ord = match (rk.get(i), sk.get(j)) {
            (Some(a), Some(b)) => a.0.cmp(&b.0),
            (Some(_), None) => Ordering::Less,
            (None, _) => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                rows.push(r.rows[rk[i].1].clone());
                i += 1;
            }
            Ordering::Greater => {
                rows.push(s.rows[sk[j].1].clone());
                j += 1;
            }
            Ordering::Equal => {
                let from_r = &r.rows[rk[i].1];
                let from_s = &s.rows[sk[j].1];
                rows.push(PrTuple::new(from_s.tuple.clone(), from_s.event.clone()));
                constraints.push(Constraint::new(from_r.event.clone(), from_s.event.clone()));
                i += 1;
                j += 1;
            }
        }
    }

    let mut var_probs: VarProbs = r.var_probs.clone();
    var_probs.extend(s.var_probs.iter().map(|(k, v)| (k.clone(), v.clone())));
    let var_probs = (!var_probs.is_empty()).then_some(var_probs);

    EprRelation::new(rows, constraints, var_probs)
}
