use crate::logic::Formula;
use crate::pwdb::World;

use super::EventRelation;

/// The event-variable formula of `w`: the conjoined constraints (if any),
/// then `f` for every row whose tuple is in `w` and `¬f` for every other row,
/// in row order. It holds exactly under the valid assignments producing `w`,
/// and is a contradiction when `w` is not a possible world of `rel`.
pub fn evf<R: EventRelation + ?Sized>(rel: &R, w: &World) -> Formula {
    let constraints = rel.constraints().iter().map(|c| c.as_formula());
    let rows = rel.rows().iter().map(|r| {
        if w.contains(&r.tuple) {
            r.event.clone()
        } else {
            Formula::not(r.event.clone())
        }
    });
    Formula::conjunction(constraints.chain(rows))
}
