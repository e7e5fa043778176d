//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the test
//! harness so the lines come out in order; exits non-zero on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::One;
use probint::decompose::enumerate_pairs;
use probint::gen::{generate_balanced, generate_pair, generate_udb, GenParams};
use probint::golden;
use probint::logic::{equivalent, Assignment, Formula, DEFAULT_CAP};
use probint::prdb::{
    disjoint_sources, encode_pw, evf, expand_pr, integrate_pr, world_set, EprRelation,
    EventRelation, PrRelation, PrTuple, VarProbs,
};
use probint::probcalc::epr_distribution;
use probint::pwdb::{
    check_prob_constraints, compatibility_graph, compatible, integrate_pw, integrate_pw_prob,
    Distribution, Tuple, UncertainDb, World,
};
use probint::rational::{parse_prob, Prob};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Structural checks gathered from every integration the other criteria run.
#[derive(Default)]
struct Structure {
    graphs: usize,
    balanced: usize,
    totals: usize,
    problems: Vec<String>,
}

impl Structure {
    fn sources(&mut self, label: &str, s1: &UncertainDb, s2: &UncertainDb, probabilistic: bool) {
        let graph = compatibility_graph(s1, s2);
        self.graphs += 1;
        for (k, c) in graph.components.iter().enumerate() {
            if !c.is_complete_bipartite() {
                self.problems.push(format!(
                    "{label}: component {k} has {} edges for {}x{} worlds",
                    c.edge_count,
                    c.left.len(),
                    c.right.len()
                ));
            }
        }
        if probabilistic {
            self.balanced += 1;
            match check_prob_constraints(s1, s2, &graph) {
                Ok(checks) => {
                    for c in checks.iter().filter(|c| c.violation.is_some()) {
                        self.problems.push(format!("{label}: {c}"));
                    }
                }
                Err(e) => self.problems.push(format!("{label}: {e}")),
            }
            for (side, u) in [("left", s1), ("right", s2)] {
                match u.distribution() {
                    Some(d) => self.total(&format!("{label} {side} source"), &d),
                    None => self
                        .problems
                        .push(format!("{label}: {side} source has no probabilities")),
                }
            }
        }
    }

    fn total(&mut self, label: &str, d: &Distribution) {
        self.totals += 1;
        if !d.total().is_one() {
            self.problems
                .push(format!("{label}: distribution sums to {}", d.total()));
        }
    }
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// The six decimals printed for the integrated example, as exact rationals,
/// keyed by the world they belong to.
fn printed_example5() -> BTreeMap<World, Prob> {
    let printed = ["0.13125", "0.16875", "0.21875", "0.28125", "0.05", "0.15"];
    golden::example5_expected()
        .iter()
        .zip(printed)
        .map(|((w, _), p)| (w.clone(), parse_prob(p).expect("printed decimal")))
        .collect()
}

fn with_probs(r: PrRelation, probs: &[(&str, &str)]) -> PrRelation {
    let var_probs: VarProbs = probs
        .iter()
        .map(|(v, p)| (v.to_string(), parse_prob(p).unwrap()))
        .collect();
    PrRelation::new(r.rows, var_probs)
}

fn criterion1(st: &mut Structure) -> Outcome {
    let r1 = with_probs(golden::example5_r1(), &[("c1", "1/5"), ("c2", "5/8")]);
    let r2 = with_probs(
        golden::example5_r2(),
        &[("b1", "7/20"), ("b2", "9/13"), ("b3", "1/4")],
    );
    for (name, r) in [("first source", &r1), ("second source", &r2)] {
        let (_, d) = expand_pr(r, DEFAULT_CAP).map_err(err)?;
        st.total(name, &d);
    }
    let q = integrate_pr(&r1, &r2);
    let d = epr_distribution(&q, DEFAULT_CAP).map_err(err)?;
    let (u1, _) = expand_pr(&d.pair_used.r, DEFAULT_CAP).map_err(err)?;
    let (u2, _) = expand_pr(&d.pair_used.s, DEFAULT_CAP).map_err(err)?;
    st.sources("pr route", &u1, &u2, true);
    st.total("pr route result", &d.distribution);

    let got = d.distribution.to_map();
    let want = printed_example5();
    ensure(got == want, || format!("got {got:?}"))?;
    Ok(format!("{} worlds, exact", got.len()))
}

fn criterion2(st: &mut Structure) -> Outcome {
    let (s1, s2) = (golden::example5_s1(), golden::example5_s2());
    st.sources("pw route", &s1, &s2, true);
    let u = integrate_pw_prob(&s1, &s2).map_err(err)?;
    let pw = u.distribution().ok_or("no probabilities on the result")?;
    st.total("pw route result", &pw);
    ensure(pw.to_map() == printed_example5(), || {
        format!("got {:?}", pw.to_map())
    })?;

    let q = integrate_pr(&golden::example5_r1(), &golden::example5_r2());
    let pr = epr_distribution(&q, DEFAULT_CAP).map_err(err)?.distribution;
    ensure(pr.same_as(&pw), || "the two routes differ".into())?;
    Ok("six worlds equal world-by-world across both routes".into())
}

fn criterion3(st: &mut Structure) -> Outcome {
    let q = integrate_pr(&golden::andy_pr(), &golden::jane_pr());
    ensure(q == golden::andy_jane_epr(), || {
        format!("integrated relation:\n{q}")
    })?;
    let only = BTreeSet::from([golden::courses(&["CS101"])]);
    let ws = world_set(&q, DEFAULT_CAP).map_err(err)?;
    ensure(ws == only, || format!("epr worlds {ws:?}"))?;

    let andy = golden::andy_pw_case1();
    let jane = golden::jane_pw();
    st.sources("andy/jane", &andy, &jane, false);
    let case1 = integrate_pw(&andy, &jane).map_err(err)?.world_set();
    ensure(case1 == only, || format!("case 1 worlds {case1:?}"))?;

    let andy2 = golden::andy_pw_case2();
    st.sources("andy/jane without CS102", &andy2, &jane, false);
    let case2 = integrate_pw(&andy2, &jane).map_err(err)?.world_set();
    let want = BTreeSet::from([
        golden::courses(&["CS101"]),
        golden::courses(&["CS100", "CS102"]),
    ]);
    ensure(case2 == want, || format!("case 2 worlds {case2:?}"))?;
    Ok("integrated relation, one world, and the two-world variant match".into())
}

fn criterion4(st: &mut Structure) -> Outcome {
    let params = GenParams {
        max_tuples: 4,
        max_vars: 3,
        max_depth: 2,
        overlap_bias: 0.5,
    };
    let (mut shared, mut empty) = (0, 0);
    let n = 250;
    for seed in 0..n {
        let (r, s) = generate_pair(seed, &params).map_err(err)?;
        if !r.tuple_set().is_disjoint(&s.tuple_set()) {
            shared += 1;
        }
        let (u1, d1) = expand_pr(&r, DEFAULT_CAP).map_err(err)?;
        let (u2, d2) = expand_pr(&s, DEFAULT_CAP).map_err(err)?;
        st.total(&format!("seed {seed} left expansion"), &d1);
        st.total(&format!("seed {seed} right expansion"), &d2);
        st.sources(&format!("seed {seed}"), &u1, &u2, false);
        let oracle = match integrate_pw(&u1, &u2) {
            Ok(u) => u.world_set(),
            Err(probint::Error::EmptyIntegration) => BTreeSet::new(),
            Err(e) => return Err(format!("seed {seed}: {e}")),
        };
        let q = integrate_pr(&r, &s);
        let got = match world_set(&q, DEFAULT_CAP) {
            Ok(ws) => ws,
            Err(probint::Error::NoValidAssignment) => BTreeSet::new(),
            Err(e) => return Err(format!("seed {seed}: {e}")),
        };
        if got.is_empty() {
            empty += 1;
        }
        ensure(got == oracle, || {
            format!("seed {seed}: {got:?} vs {oracle:?}")
        })?;
    }
    Ok(format!(
        "{n}/{n} pairs agree ({shared} share tuples, {empty} empty)"
    ))
}

/// Distribution of one generating pair through the possible-worlds route.
fn pair_distribution(
    st: &mut Structure,
    label: &str,
    r: &PrRelation,
    s: &PrRelation,
) -> Result<Distribution, String> {
    let (u1, _) = expand_pr(r, DEFAULT_CAP).map_err(err)?;
    let (u2, _) = expand_pr(s, DEFAULT_CAP).map_err(err)?;
    st.sources(label, &u1, &u2, true);
    let d = integrate_pw_prob(&u1, &u2)
        .map_err(|e| format!("{label}: {e}"))?
        .distribution()
        .ok_or("no probabilities")?;
    st.total(label, &d);
    Ok(d)
}

fn all_pairs_agree(
    st: &mut Structure,
    label: &str,
    q: &EprRelation,
    oracle: Option<&Distribution>,
) -> Result<usize, String> {
    let pairs = enumerate_pairs(q, usize::MAX).map_err(|e| format!("{label}: {e}"))?;
    let mut first: Option<BTreeMap<World, Prob>> = oracle.map(Distribution::to_map);
    for (k, p) in pairs.iter().enumerate() {
        let d = pair_distribution(st, &format!("{label} pair {k}"), &p.r, &p.s)?.to_map();
        match &first {
            None => first = Some(d),
            Some(f) => ensure(*f == d, || {
                format!("{label}: pair {k} gives a different distribution")
            })?,
        }
    }
    let via_probcalc = epr_distribution(q, DEFAULT_CAP).map_err(err)?;
    st.total(&format!("{label} probcalc"), &via_probcalc.distribution);
    ensure(Some(via_probcalc.distribution.to_map()) == first, || {
        format!("{label}: probcalc differs from the pairs")
    })?;
    Ok(pairs.len())
}

fn criterion5(st: &mut Structure) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pick = || {
        let d: i64 = rng.gen_range(2..=12);
        format!("{}/{d}", rng.gen_range(1..d))
    };
    for k in 0..3 {
        let (a, b, d) = (pick(), pick(), pick());
        let q = golden::appendix_epr_with(&a, &b, &d);
        let n = all_pairs_agree(st, &format!("two-pair relation {k}"), &q, None)?;
        ensure(n == 2, || format!("expected 2 pairs, got {n}"))?;
    }
    let mut pairs = 0;
    let mut multi = 0;
    let n = 120;
    for seed in 0..n {
        let inst = generate_balanced(seed);
        let oracle = pair_distribution(st, &format!("balanced {seed} sources"), &inst.r, &inst.s)?;
        let count = all_pairs_agree(st, &format!("balanced {seed}"), &inst.q, Some(&oracle))?;
        pairs += count;
        if count > 1 {
            multi += 1;
        }
    }
    Ok(format!(
        "3 assignments x 2 pairs; {n} generated relations, {pairs} pairs, {multi} with several pairs"
    ))
}

fn criterion6(st: &mut Structure) -> Outcome {
    ensure(st.graphs > 0 && st.balanced > 0 && st.totals > 0, || {
        "no integrations recorded".into()
    })?;
    ensure(st.problems.is_empty(), || {
        let shown: Vec<&String> = st.problems.iter().take(5).collect();
        format!("{} problem(s): {shown:?}", st.problems.len())
    })?;
    Ok(format!(
        "{} graphs complete bipartite, {} balanced, {} distributions sum to 1",
        st.graphs, st.balanced, st.totals
    ))
}

fn criterion7(_: &mut Structure) -> Outcome {
    let n = 150;
    for seed in 0..n {
        let u = generate_udb(seed, 6);
        let r = encode_pw(&u).map_err(err)?;
        let (back, d) = expand_pr(&r, DEFAULT_CAP).map_err(err)?;
        let original = u.distribution().expect("generated with probabilities");
        ensure(back.tuple_set == u.tuple_set, || {
            format!("seed {seed}: tuple set changed")
        })?;
        ensure(back.world_set() == u.world_set(), || {
            format!("seed {seed}: world set changed")
        })?;
        ensure(d.to_map() == original.to_map(), || {
            format!("seed {seed}: distribution changed")
        })?;
    }
    Ok(format!("{n} databases round-trip exactly"))
}

/// Every assignment over `vars`, in counting order.
fn assignments(vars: &[String]) -> impl Iterator<Item = Assignment> + '_ {
    (0..1u64 << vars.len()).map(move |mask| {
        vars.iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), mask >> i & 1 == 1))
            .collect()
    })
}

fn criterion8(_: &mut Structure) -> Outcome {
    let params = GenParams {
        max_tuples: 3,
        max_vars: 2,
        max_depth: 2,
        overlap_bias: 0.7,
    };
    let (mut checked, mut instances) = (0, 0);
    for seed in 0..120 {
        let (r0, s0) = generate_pair(seed, &params).map_err(err)?;
        let (r, s) = disjoint_sources(&r0, &s0);
        let q = integrate_pr(&r, &s);
        let rw = world_set(r.as_ref(), DEFAULT_CAP).map_err(err)?;
        let sw = world_set(s.as_ref(), DEFAULT_CAP).map_err(err)?;
        let (rt, strup) = (r.tuple_set(), s.tuple_set());
        let vars: Vec<String> = q.event_vars().into_iter().collect();
        instances += 1;
        for ri in &rw {
            for sj in sw.iter().filter(|sj| compatible(ri, sj, &rt, &strup)) {
                let joint = Formula::and(evf(r.as_ref(), ri), evf(s.as_ref(), sj));
                let whole = evf(&q, &ri.union(sj));
                ensure(equivalent(&whole, &joint).map_err(err)?, || {
                    format!("seed {seed}: formulas differ for {ri} and {sj}")
                })?;
                for mu in assignments(&vars) {
                    if joint.eval(&mu).map_err(err)? {
                        for c in &q.constraints {
                            ensure(c.as_formula().eval(&mu).map_err(err)?, || {
                                format!("seed {seed}: assignment breaks {c}")
                            })?;
                        }
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} compatible pairs over {instances} instances"
    ))
}

fn synthetic(n: usize) -> (PrRelation, PrRelation) {
    let row =
        |i: usize, var: String| PrTuple::new(Tuple::new([format!("k{i:08}")]), Formula::var(var));
    let r = (0..n).map(|i| row(i, format!("a{i}"))).collect();
    let s = (n / 2..n + n / 2)
        .rev()
        .map(|i| row(i, format!("b{i}")))
        .collect();
    (
        PrRelation::new(r, VarProbs::new()),
        PrRelation::new(s, VarProbs::new()),
    )
}

fn criterion9(_: &mut Structure) -> Outcome {
    let sizes = [25_000, 50_000, 100_000];
    let mut times = Vec::new();
    for &n in &sizes {
        let (r, s) = synthetic(n);
        let mut best = Duration::MAX;
        for _ in 0..3 {
            let start = Instant::now();
            let q = integrate_pr(&r, &s);
            best = best.min(start.elapsed());
            ensure(
                q.rows.len() == n + n / 2 && q.constraints.len() == n / 2,
                || "wrong row count".into(),
            )?;
        }
        times.push(best);
    }
    let total: Duration = times.iter().sum();
    let ratios: Vec<f64> = times
        .windows(2)
        .map(|w| w[1].as_secs_f64() / w[0].as_secs_f64())
        .collect();
    let shown = format!(
        "{:?} for {sizes:?} rows, ratios {:.2?}",
        times
            .iter()
            .map(|t| format!("{:.1}ms", t.as_secs_f64() * 1e3))
            .collect::<Vec<_>>(),
        ratios
    );
    ensure(ratios.iter().all(|&x| x < 3.0), || {
        format!("ratio too large: {shown}")
    })?;
    ensure(total < Duration::from_secs(10), || {
        format!("too slow: {shown}")
    })?;
    Ok(shown)
}

struct Criterion {
    id: u8,
    title: &'static str,
    limit: Duration,
    run: fn(&mut Structure) -> Outcome,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            title: "integrated example, pr route",
            limit: secs(1),
            run: criterion1,
        },
        Criterion {
            id: 2,
            title: "integrated example, pw route",
            limit: secs(1),
            run: criterion2,
        },
        Criterion {
            id: 3,
            title: "Andy/Jane goldens",
            limit: secs(1),
            run: criterion3,
        },
        Criterion {
            id: 4,
            title: "pr integration matches pw oracle",
            limit: secs(30),
            run: criterion4,
        },
        Criterion {
            id: 5,
            title: "every generating pair gives one distribution",
            limit: secs(60),
            run: criterion5,
        },
        Criterion {
            id: 7,
            title: "chain encoding round-trip",
            limit: secs(10),
            run: criterion7,
        },
        Criterion {
            id: 8,
            title: "event-variable formulas factor over sources",
            limit: secs(60),
            run: criterion8,
        },
        Criterion {
            id: 9,
            title: "pr integration scales near-linearly",
            limit: secs(10),
            run: criterion9,
        },
        Criterion {
            id: 6,
            title: "structural invariants across criteria 1-5",
            limit: secs(1),
            run: criterion6,
        },
    ];

    let mut st = Structure::default();
    let mut failed = 0;
    let mut lines = BTreeMap::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| (c.run)(&mut st))).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > c.limit => Err(format!("took {elapsed:.2?}, limit {:?}", c.limit)),
            o => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        lines.insert(
            c.id,
            format!(
                "{tag} criterion {}: {} [{elapsed:.2?}] {detail}",
                c.id, c.title
            ),
        );
    }
    // criterion 6 runs last because it audits the others
    for line in lines.values() {
        println!("{line}");
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
