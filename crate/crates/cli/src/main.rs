mod render;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use probint::decompose::{default_pair, enumerate_pairs, partition, PrPair};
use probint::document::Document;
use probint::gen::{generate_pair, GenParams};
use probint::logic::DEFAULT_CAP;
use probint::prdb::{expand_epr, expand_pr, integrate_pr, EprRelation, EventRelation, PrRelation};
use probint::probcalc::{cross_check, epr_distribution};
use probint::pwdb::{
    check_prob_constraints, compatibility_graph, integrate_pw, integrate_pw_prob, UncertainDb,
};
use probint::rational::{format_fraction, ratio};
use probint::Error;
use serde_json::{json, Value};

use render::ComponentLine;

#[derive(Parser)]
#[command(
    name = "probint",
    version,
    about = "Integrate uncertain databases and compute exact world probabilities"
)]
struct Cli {
    /// Largest number of event variables an expansion may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Pw,
    Pr,
}

#[derive(Subcommand)]
enum Command {
    /// List the possible worlds of a source, with probabilities when known.
    Expand {
        input: PathBuf,
        #[arg(long)]
        worlds_only: bool,
    },
    /// Integrate two sources into one document.
    Integrate {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
    },
    /// Distribution of an integrated epr-relation under partial independence.
    Prob { input: PathBuf },
    /// Component and balance report for two sources, or the recognition and
    /// two-route cross-check for one epr-relation.
    Check {
        a: PathBuf,
        b: Option<PathBuf>,
        /// Generating pairs to compare in the cross-check.
        #[arg(long, default_value_t = 1024)]
        limit: usize,
    },
    /// Recover pr-relation pairs that integrate to an epr-relation.
    Decompose {
        input: PathBuf,
        /// Emit every generating pair rather than the default one.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 1024)]
        limit: usize,
    },
    /// Generate a random pair of pr-relation sources.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = GenParams::default().max_tuples)]
        max_tuples: usize,
        #[arg(long, default_value_t = GenParams::default().max_vars)]
        max_vars: usize,
        #[arg(long, default_value_t = GenParams::default().max_depth)]
        max_depth: usize,
        #[arg(long, default_value_t = GenParams::default().overlap_bias)]
        overlap_bias: f64,
        /// Write `a.json` and `b.json` here instead of printing both.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
    detail: Option<String>,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            detail: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::ExpansionTooLarge { .. } => 3,
            Error::EmptyIntegration | Error::NoValidAssignment => 4,
            Error::ProbConstraintViolation(_) => 5,
            Error::NotIntegrated(_) => 6,
            _ => 2,
        };
        let detail = match &e {
            Error::ProbConstraintViolation(checks) => {
                Some(checks.iter().map(|c| format!("  {c}\n")).collect())
            }
            _ => None,
        };
        Failure {
            code,
            message: e.to_string(),
            detail,
        }
    }
}

type CmdResult = Result<Output, Failure>;

/// Rendered output plus the exit code for in-band verdicts.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn read(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))?;
    Document::from_json(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn as_epr(doc: Document, path: &Path) -> Result<EprRelation, Failure> {
    match doc {
        Document::Epr(q) => Ok(q),
        Document::Pr(r) => Ok(EprRelation::new(r.rows, vec![], Some(r.var_probs))),
        Document::Pw(_) => Err(Failure::new(
            2,
            format!("{}: expected a pr or epr document", path.display()),
        )),
    }
}

fn expand(cli: &Cli, input: &Path, worlds_only: bool) -> CmdResult {
    let json = cli.format == Some(Format::Json);
    let worlds_out = |worlds: Vec<probint::pwdb::World>| {
        if json {
            pretty(&render::worlds_json(&worlds))
        } else {
            render::worlds_table(&worlds)
        }
    };
    let dist_out = |d: &probint::pwdb::Distribution| {
        if json {
            pretty(&render::distribution_json(d))
        } else {
            render::distribution_table(d)
        }
    };
    let text = match read(input)? {
        Document::Pw(mut u) => {
            if u.probs.is_none() && u.worlds.len() == 1 {
                u.probs = Some(vec![ratio(1, 1)]);
            }
            match u.distribution() {
                Some(d) if !worlds_only => dist_out(&d),
                _ => worlds_out(u.worlds),
            }
        }
        Document::Pr(r) => {
            if worlds_only || (r.var_probs.is_empty() && !r.event_vars().is_empty()) {
                worlds_out(
                    expand_epr(&r, cli.cap)?
                        .into_iter()
                        .map(|(w, _)| w)
                        .collect(),
                )
            } else {
                dist_out(&expand_pr(&r, cli.cap)?.1)
            }
        }
        Document::Epr(q) => worlds_out(
            expand_epr(&q, cli.cap)?
                .into_iter()
                .map(|(w, _)| w)
                .collect(),
        ),
    };
    Ok(Output::ok(text))
}

fn integrate(cli: &Cli, a: &Path, b: &Path, model: Model) -> CmdResult {
    let (da, db) = (read(a)?, read(b)?);
    let doc = match (model, da, db) {
        (Model::Pw, Document::Pw(s1), Document::Pw(s2)) => {
            let u = if s1.is_probabilistic() && s2.is_probabilistic() {
                integrate_pw_prob(&s1, &s2)?
            } else {
                integrate_pw(&s1, &s2)?
            };
            Document::Pw(u)
        }
        (Model::Pr, Document::Pr(r), Document::Pr(s)) => Document::Epr(integrate_pr(&r, &s)),
        (Model::Pw, ..) => return Err(Failure::new(2, "--model pw needs two pw documents")),
        (Model::Pr, ..) => return Err(Failure::new(2, "--model pr needs two pr documents")),
    };
    Ok(Output::ok(match cli.format {
        Some(Format::Table) => match &doc {
            Document::Pw(u) => render::udb_table(u),
            Document::Epr(q) => q.to_string(),
            Document::Pr(r) => render::relation_text(r),
        },
        _ => format!("{}\n", doc.to_json()),
    }))
}

fn pair_json(p: &PrPair) -> Value {
    json!({
        "r": Document::Pr(p.r.clone()).to_value(),
        "s": Document::Pr(p.s.clone()).to_value(),
    })
}

fn pair_text(p: &PrPair) -> String {
    format!(
        "r:\n{}s:\n{}",
        render::relation_text(&p.r),
        render::relation_text(&p.s)
    )
}

fn prob(cli: &Cli, input: &Path) -> CmdResult {
    let q = as_epr(read(input)?, input)?;
    let d = epr_distribution(&q, cli.cap)?;
    Ok(Output::ok(match cli.format {
        Some(Format::Json) => pretty(&json!({
            "distribution": render::distribution_json(&d.distribution),
            "components": render::summaries_json(&d.components),
            "pair_used": pair_json(&d.pair_used),
        })),
        _ => format!(
            "{}\ncomponents:\n{}\npair used:\n{}",
            render::distribution_table(&d.distribution),
            render::summaries_table(&d.components),
            pair_text(&d.pair_used)
        ),
    }))
}

fn source_udb(doc: Document, path: &Path, cap: usize) -> Result<UncertainDb, Failure> {
    match doc {
        Document::Pw(u) => Ok(u),
        Document::Pr(r) => source_from_pr(&r, cap),
        Document::Epr(_) => Err(Failure::new(
            2,
            format!(
                "{}: checking two sources needs pw or pr documents",
                path.display()
            ),
        )),
    }
}

fn source_from_pr(r: &PrRelation, cap: usize) -> Result<UncertainDb, Failure> {
    if r.var_probs.is_empty() && !r.event_vars().is_empty() {
        let worlds = expand_epr(r, cap)?.into_iter().map(|(w, _)| w).collect();
        Ok(UncertainDb::new(r.tuple_set(), worlds, None))
    } else {
        Ok(expand_pr(r, cap)?.0)
    }
}

fn check_sources(cli: &Cli, s1: &UncertainDb, s2: &UncertainDb) -> CmdResult {
    let graph = compatibility_graph(s1, s2);
    let checks = if s1.is_probabilistic() && s2.is_probabilistic() {
        Some(check_prob_constraints(s1, s2, &graph)?)
    } else {
        None
    };
    let lines: Vec<ComponentLine> = graph
        .components
        .iter()
        .enumerate()
        .map(|(k, c)| match &checks {
            Some(cs) => ComponentLine::from_check(c.edge_count, c.is_complete_bipartite(), &cs[k]),
            None => ComponentLine {
                left: c.left.clone(),
                right: c.right.clone(),
                edges: c.edge_count,
                complete: c.is_complete_bipartite(),
                masses: None,
                verdict: if c.is_isolated() { "isolated" } else { "-" }.to_string(),
            },
        })
        .collect();
    let complete = graph.is_complete_bipartite();
    let balanced = checks
        .as_ref()
        .map(|cs| cs.iter().all(|c| c.violation.is_none()));
    let code = if balanced == Some(false) {
        5
    } else if !complete {
        1
    } else {
        0
    };
    let text = match cli.format {
        Some(Format::Json) => pretty(&json!({
            "components": render::components_json(&lines),
            "complete_bipartite": complete,
            "balanced": balanced,
        })),
        _ => {
            let verdict = match balanced {
                Some(true) => "balanced",
                Some(false) => "UNBALANCED",
                None => "no probabilities",
            };
            format!(
                "{}complete bipartite: {}\nprobabilistic constraints: {verdict}\n",
                render::components_table(&lines),
                if complete { "yes" } else { "NO" }
            )
        }
    };
    Ok(Output { text, code })
}

fn check_epr(cli: &Cli, q: &EprRelation, limit: usize) -> CmdResult {
    let p = partition(q);
    if !p.is_integrated() {
        let reason = p
            .failure
            .clone()
            .unwrap_or_else(|| "a constraint does not match exactly one row formula".into());
        return Err(Failure::from(Error::NotIntegrated(reason)));
    }
    let pairs = p.pair_count();
    let agree = cross_check(q, cli.cap, limit)?;
    let d = epr_distribution(q, cli.cap)?;
    let compared = pairs.min(limit);
    let text = match cli.format {
        Some(Format::Json) => pretty(&json!({
            "integrated": true,
            "free_groups": p.free_groups.len(),
            "pairs_compared": compared,
            "cross_check": agree,
            "components": render::summaries_json(&d.components),
            "total": format_fraction(&d.distribution.total()),
        })),
        _ => format!(
            "recognized as integrated; {} free group(s)\n{}cross-check over {compared} pair(s): {}\n",
            p.free_groups.len(),
            render::summaries_table(&d.components),
            if agree { "equal" } else { "DIFFERENT" }
        ),
    };
    Ok(Output {
        text,
        code: if agree { 0 } else { 1 },
    })
}

fn check(cli: &Cli, a: &Path, b: Option<&Path>, limit: usize) -> CmdResult {
    match b {
        Some(b) => {
            let s1 = source_udb(read(a)?, a, cli.cap)?;
            let s2 = source_udb(read(b)?, b, cli.cap)?;
            check_sources(cli, &s1, &s2)
        }
        None => {
            let q = as_epr(read(a)?, a)?;
            check_epr(cli, &q, limit)
        }
    }
}

fn decompose(cli: &Cli, input: &Path, all: bool, limit: usize) -> CmdResult {
    let q = as_epr(read(input)?, input)?;
    let pairs = if all {
        enumerate_pairs(&q, limit)?
    } else {
        vec![default_pair(&q)?]
    };
    Ok(Output::ok(match cli.format {
        Some(Format::Table) => pairs
            .iter()
            .enumerate()
            .map(|(i, p)| format!("pair {}\n{}", i + 1, pair_text(p)))
            .collect::<Vec<_>>()
            .join("\n"),
        _ if all => pretty(&Value::Array(pairs.iter().map(pair_json).collect())),
        _ => pretty(&pair_json(&pairs[0])),
    }))
}

fn gen(cli: &Cli, seed: u64, params: GenParams, out_dir: Option<&Path>) -> CmdResult {
    let (r, s) = generate_pair(seed, &params)?;
    let (r, s) = (Document::Pr(r), Document::Pr(s));
    if let Some(dir) = out_dir {
        let io =
            |e: std::io::Error| Failure::new(2, format!("cannot write to {}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join("a.json"), format!("{}\n", r.to_json())).map_err(io)?;
        fs::write(dir.join("b.json"), format!("{}\n", s.to_json())).map_err(io)?;
        return Ok(Output::ok(String::new()));
    }
    Ok(Output::ok(match cli.format {
        Some(Format::Table) => match (&r, &s) {
            (Document::Pr(r), Document::Pr(s)) => format!(
                "a:\n{}b:\n{}",
                render::relation_text(r),
                render::relation_text(s)
            ),
            _ => unreachable!("generated documents are pr-relations"),
        },
        _ => pretty(&json!({ "a": r.to_value(), "b": s.to_value() })),
    }))
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Expand { input, worlds_only } => expand(cli, input, *worlds_only),
        Command::Integrate { a, b, model } => integrate(cli, a, b, *model),
        Command::Prob { input } => prob(cli, input),
        Command::Check { a, b, limit } => check(cli, a, b.as_deref(), *limit),
        Command::Decompose { input, all, limit } => decompose(cli, input, *all, *limit),
        Command::Gen {
            seed,
            max_tuples,
            max_vars,
            max_depth,
            overlap_bias,
            out_dir,
        } => gen(
            cli,
            *seed,
            GenParams {
                max_tuples: *max_tuples,
                max_vars: *max_vars,
                max_depth: *max_depth,
                overlap_bias: *overlap_bias,
            },
            out_dir.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            if let Some(detail) = f.detail {
                eprint!("{detail}");
            }
            ExitCode::from(f.code)
        }
    }
}
