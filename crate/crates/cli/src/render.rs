use std::fmt::Write;

use probint::prdb::PrRelation;
use probint::pwdb::{ComponentCheck, ComponentSummary, Distribution, UncertainDb, World};
use probint::rational::{format_decimal, format_fraction, Prob};
use serde_json::{json, Value};

pub const DECIMAL_PLACES: usize = 6;

fn tuples_json(w: &World) -> Value {
    Value::Array(w.iter().map(|t| json!(t.values())).collect())
}

pub fn distribution_json(d: &Distribution) -> Value {
    let worlds: Vec<Value> = d
        .iter()
        .map(|(w, p)| {
            json!({
                "tuples": tuples_json(w),
                "prob": format_fraction(p),
                "decimal": format_decimal(p, DECIMAL_PLACES),
            })
        })
        .collect();
    json!({ "worlds": worlds, "total": format_fraction(&d.total()) })
}

pub fn worlds_json<'a>(worlds: impl IntoIterator<Item = &'a World>) -> Value {
    let worlds: Vec<Value> = worlds
        .into_iter()
        .map(|w| json!({ "tuples": tuples_json(w) }))
        .collect();
    json!({ "worlds": worlds })
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut text = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                text.push_str(cell);
            } else {
                let pad = w - cell.chars().count();
                let _ = write!(text, "{cell}{}  ", " ".repeat(pad));
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn distribution_table(d: &Distribution) -> String {
    let rows: Vec<Vec<String>> = d
        .iter()
        .map(|(w, p)| {
            vec![
                w.to_string(),
                format_fraction(p),
                format_decimal(p, DECIMAL_PLACES),
            ]
        })
        .collect();
    let mut out = table(&["world", "probability", "decimal"], &rows);
    let total = d.total();
    let _ = writeln!(out, "total {}", format_fraction(&total));
    out
}

pub fn worlds_table<'a>(worlds: impl IntoIterator<Item = &'a World>) -> String {
    let mut out = String::from("world\n");
    let mut n = 0;
    for w in worlds {
        let _ = writeln!(out, "{w}");
        n += 1;
    }
    let _ = writeln!(out, "{n} world(s)");
    out
}

fn names(prefix: &str, xs: &[usize]) -> String {
    xs.iter()
        .map(|i| format!("{prefix}{}", i + 1))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn summaries_table(components: &[ComponentSummary]) -> String {
    let rows: Vec<Vec<String>> = components
        .iter()
        .enumerate()
        .map(|(k, c)| {
            vec![
                (k + 1).to_string(),
                names("D", &c.left),
                names("D'", &c.right),
                format_fraction(&c.constant),
            ]
        })
        .collect();
    table(&["component", "left", "right", "P"], &rows)
}

pub fn summaries_json(components: &[ComponentSummary]) -> Value {
    Value::Array(
        components
            .iter()
            .map(|c| json!({ "left": c.left, "right": c.right, "constant": format_fraction(&c.constant) }))
            .collect(),
    )
}

/// One line per component: worlds, edge count, completeness and balance.
pub struct ComponentLine {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub edges: usize,
    pub complete: bool,
    pub masses: Option<(Prob, Prob)>,
    pub verdict: String,
}

impl ComponentLine {
    pub fn from_check(edges: usize, complete: bool, c: &ComponentCheck) -> Self {
        let verdict = match c.violation {
            None => "balanced".to_string(),
            Some(v) => format!("{v:?}").to_lowercase(),
        };
        ComponentLine {
            left: c.summary.left.clone(),
            right: c.summary.right.clone(),
            edges,
            complete,
            masses: Some((c.left_mass.clone(), c.right_mass.clone())),
            verdict,
        }
    }
}

pub fn components_table(lines: &[ComponentLine]) -> String {
    let rows: Vec<Vec<String>> = lines
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let (lm, rm) = match &l.masses {
                Some((a, b)) => (format_fraction(a), format_fraction(b)),
                None => ("-".into(), "-".into()),
            };
            vec![
                (k + 1).to_string(),
                names("D", &l.left),
                names("D'", &l.right),
                l.edges.to_string(),
                if l.complete { "yes" } else { "NO" }.to_string(),
                lm,
                rm,
                l.verdict.clone(),
            ]
        })
        .collect();
    table(
        &[
            "component",
            "left",
            "right",
            "edges",
            "complete",
            "left mass",
            "right mass",
            "verdict",
        ],
        &rows,
    )
}

pub fn components_json(lines: &[ComponentLine]) -> Value {
    Value::Array(
        lines
            .iter()
            .map(|l| {
                let mut v = json!({
                    "left": l.left,
                    "right": l.right,
                    "edges": l.edges,
                    "complete_bipartite": l.complete,
                    "verdict": l.verdict,
                });
                if let Some((a, b)) = &l.masses {
                    v["left_mass"] = json!(format_fraction(a));
                    v["right_mass"] = json!(format_fraction(b));
                }
                v
            })
            .collect(),
    )
}

pub fn udb_table(u: &UncertainDb) -> String {
    match u.distribution() {
        Some(d) => distribution_table(&d),
        None => worlds_table(&u.worlds),
    }
}

pub fn relation_text(r: &PrRelation) -> String {
    let mut out = r.to_string();
    for (v, p) in &r.var_probs {
        let _ = writeln!(out, "P({v}) = {}", format_fraction(p));
    }
    out
}
