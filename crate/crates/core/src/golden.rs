//! Worked instances: the Andy/Jane course scenario (both tuple-set variants),
//! the two-source probabilistic example with its pr-relations and integrated
//! epr-relation, and the epr-relation with two generating pairs.

use crate::logic::{parse_formula, Formula};
use crate::prdb::{Constraint, EprRelation, PrRelation, PrTuple, VarProbs};
use crate::pwdb::{Distribution, Tuple, UncertainDb, World};
use crate::rational::{parse_prob, ratio};

pub fn bob(course: &str) -> Tuple {
    Tuple::new(["Bob", course])
}

/// The world `{(Bob, c) : c ∈ courses}`.
pub fn courses(courses: &[&str]) -> World {
    courses.iter().map(|c| bob(c)).collect()
}

fn f(text: &str) -> Formula {
    parse_formula(text).expect("golden formula")
}

fn row(course: &str, event: &str) -> PrTuple {
    PrTuple::new(bob(course), f(event))
}

fn probs(pairs: &[(&str, &str)]) -> VarProbs {
    pairs
        .iter()
        .map(|(v, p)| (v.to_string(), parse_prob(p).expect("golden probability")))
        .collect()
}

/// Andy: Bob takes exactly one of CS100/CS101; Andy also knows of CS102.
pub fn andy_pw_case1() -> UncertainDb {
    UncertainDb::new(
        [bob("CS100"), bob("CS101"), bob("CS102")]
            .into_iter()
            .collect(),
        vec![courses(&["CS100"]), courses(&["CS101"])],
        None,
    )
}

/// Andy without CS102 in his tuple set.
pub fn andy_pw_case2() -> UncertainDb {
    UncertainDb::new(
        [bob("CS100"), bob("CS101")].into_iter().collect(),
        vec![courses(&["CS100"]), courses(&["CS101"])],
        None,
    )
}

/// Jane: Bob takes exactly one of CS101/CS102.
pub fn jane_pw() -> UncertainDb {
    UncertainDb::new(
        [bob("CS101"), bob("CS102")].into_iter().collect(),
        vec![courses(&["CS101"]), courses(&["CS102"])],
        None,
    )
}

pub fn andy_pr() -> PrRelation {
    PrRelation::new(
        vec![row("CS100", "x"), row("CS101", "!x"), row("CS102", "false")],
        VarProbs::new(),
    )
}

pub fn jane_pr() -> PrRelation {
    PrRelation::new(vec![row("CS101", "y"), row("CS102", "!y")], VarProbs::new())
}

/// Integration of [`andy_pr`] and [`jane_pr`], common rows taken from Jane.
pub fn andy_jane_epr() -> EprRelation {
    EprRelation::new(
        vec![row("CS100", "x"), row("CS101", "y"), row("CS102", "!y")],
        vec![
            Constraint::new(f("!x"), f("y")),
            Constraint::new(f("false"), f("!y")),
        ],
        None,
    )
}

/// First source of the probabilistic example: worlds 3/10, 1/2, 1/5.
pub fn example5_s1() -> UncertainDb {
    UncertainDb::from_worlds(
        vec![
            courses(&["CS100"]),
            courses(&["CS100", "CS101"]),
            courses(&["CS101"]),
        ],
        Some(vec![ratio(3, 10), ratio(1, 2), ratio(1, 5)]),
    )
}

/// Second source of the probabilistic example: worlds 7/20, 9/20, 1/20, 3/20.
pub fn example5_s2() -> UncertainDb {
    UncertainDb::from_worlds(
        vec![
            courses(&["CS100"]),
            courses(&["CS100", "CS201"]),
            courses(&["CS201"]),
            courses(&["CS201", "CS202"]),
        ],
        Some(vec![ratio(7, 20), ratio(9, 20), ratio(1, 20), ratio(3, 20)]),
    )
}

pub fn example5_r1() -> PrRelation {
    PrRelation::new(
        vec![row("CS100", "!c1"), row("CS101", "c1 | c2")],
        probs(&[("c1", "0.2"), ("c2", "0.625")]),
    )
}

pub fn example5_r2() -> PrRelation {
    PrRelation::new(
        vec![
            row("CS100", "b1 | b2"),
            row("CS201", "!b1"),
            row("CS202", "!b1 & !b2 & !b3"),
        ],
        probs(&[("b1", "0.35"), ("b2", "9/13"), ("b3", "0.25")]),
    )
}

/// The integrated epr-relation as printed, with the common tuple taken
/// from the first source.
pub fn example5_epr() -> EprRelation {
    let mut vp = example5_r1().var_probs;
    vp.extend(example5_r2().var_probs);
    EprRelation::new(
        vec![
            row("CS100", "!c1"),
            row("CS101", "c1 | c2"),
            row("CS201", "!b1"),
            row("CS202", "!b1 & !b2 & !b3"),
        ],
        vec![Constraint::new(f("!c1"), f("b1 | b2"))],
        Some(vp),
    )
}

/// The six integrated worlds and their exact probabilities.
pub fn example5_expected() -> Distribution {
    Distribution::new(vec![
        (courses(&["CS100"]), ratio(21, 160)),
        (courses(&["CS100", "CS201"]), ratio(27, 160)),
        (courses(&["CS100", "CS101"]), ratio(35, 160)),
        (courses(&["CS100", "CS101", "CS201"]), ratio(45, 160)),
        (courses(&["CS101", "CS201"]), ratio(1, 20)),
        (courses(&["CS101", "CS201", "CS202"]), ratio(3, 20)),
    ])
}

pub fn t(name: &str) -> Tuple {
    Tuple::new([name])
}

/// `t1@a, t2@b, t3@(¬c ∨ d)` with `a ≡ c`: two generating pairs.
pub fn appendix_epr() -> EprRelation {
    EprRelation::new(
        vec![
            PrTuple::new(t("t1"), f("a")),
            PrTuple::new(t("t2"), f("b")),
            PrTuple::new(t("t3"), f("!c | d")),
        ],
        vec![Constraint::new(f("a"), f("c"))],
        None,
    )
}

/// [`appendix_epr`] with probabilities; `P(c)` is set equal to `P(a)` so the
/// generating sources satisfy their probabilistic constraints.
pub fn appendix_epr_with(a: &str, b: &str, d: &str) -> EprRelation {
    let mut q = appendix_epr();
    q.var_probs = Some(probs(&[("a", a), ("b", b), ("c", a), ("d", d)]));
    q
}
