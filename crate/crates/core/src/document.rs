//! JSON source documents.
//!
//! ```json
//! {"model": "pw", "tuples": [["Bob", "CS100"]], "worlds": [{"tuples": [0], "prob": "3/10"}]}
//! {"model": "pr", "rows": [{"tuple": ["Bob", "CS100"], "event": "!c1"}], "var_probs": {"c1": "0.2"}}
//! {"model": "epr", "rows": [...], "constraints": [{"lhs": "!c1", "rhs": "b1 | b2"}], "var_probs": {...}}
//! ```
//!
//! Probabilities are written as exact fractions and read from fractions or
//! decimals. `prob` is either on every world or on none.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::parse_formula;
use crate::prdb::{Constraint, EprRelation, PrRelation, PrTuple, VarProbs};
use crate::pwdb::{Tuple, UncertainDb, World};
use crate::rational::{format_fraction, parse_prob};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Pw(UncertainDb),
    Pr(PrRelation),
    Epr(EprRelation),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
enum Raw {
    Pw {
        tuples: Vec<Vec<String>>,
        worlds: Vec<RawWorld>,
    },
    Pr {
        rows: Vec<RawRow>,
        #[serde(default)]
        var_probs: BTreeMap<String, String>,
    },
    Epr {
        rows: Vec<RawRow>,
        #[serde(default)]
        constraints: Vec<RawConstraint>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        var_probs: Option<BTreeMap<String, String>>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorld {
    tuples: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prob: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRow {
    tuple: Vec<String>,
    event: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    lhs: String,
    rhs: String,
}

fn raw_rows(rows: &[PrTuple]) -> Vec<RawRow> {
    rows.iter()
        .map(|r| RawRow {
            tuple: r.tuple.values().to_vec(),
            event: r.event.to_string(),
        })
        .collect()
}

fn raw_probs(vp: &VarProbs) -> BTreeMap<String, String> {
    vp.iter()
        .map(|(k, p)| (k.clone(), format_fraction(p)))
        .collect()
}

fn rows_from(raw: Vec<RawRow>) -> Result<Vec<PrTuple>> {
    raw.into_iter()
        .enumerate()
        .map(|(i, r)| {
            let event = parse_formula(&r.event)
                .map_err(|e| Error::Document(format!("row {i}: event `{}`: {e}", r.event)))?;
            Ok(PrTuple::new(Tuple::new(r.tuple), event))
        })
        .collect()
}

fn probs_from(raw: BTreeMap<String, String>) -> Result<VarProbs> {
    raw.into_iter()
        .map(|(k, p)| {
            let p = parse_prob(&p).map_err(|e| Error::Document(format!("P({k}): {e}")))?;
            Ok((k, p))
        })
        .collect()
}

fn checked<T>(value: T, report: crate::pwdb::ValidationReport) -> Result<T> {
    if report.is_valid() {
        Ok(value)
    } else {
        Err(Error::Invalid(report.to_string()))
    }
}

impl Document {
    pub fn model(&self) -> &'static str {
        match self {
            Document::Pw(_) => "pw",
            Document::Pr(_) => "pr",
            Document::Epr(_) => "epr",
        }
    }

    /// Parses and validates a document. Event variables of a pr-relation may
    /// lack probabilities; operations that need them fail later.
    pub fn from_json(text: &str) -> Result<Document> {
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        match raw {
            Raw::Pw { tuples, worlds } => {
                let tuples: Vec<Tuple> = tuples.into_iter().map(Tuple::new).collect();
                let with_prob = worlds.iter().filter(|w| w.prob.is_some()).count();
                if with_prob != 0 && with_prob != worlds.len() {
                    return Err(Error::Document(
                        "either every world or no world carries a probability".into(),
                    ));
                }
                let mut ws = Vec::with_capacity(worlds.len());
                let mut probs = Vec::new();
                for (i, w) in worlds.into_iter().enumerate() {
                    let members = w
                        .tuples
                        .iter()
                        .map(|&k| {
                            tuples.get(k).cloned().ok_or_else(|| {
                                Error::Document(format!(
                                    "world {i} refers to missing tuple index {k}"
                                ))
                            })
                        })
                        .collect::<Result<World>>()?;
                    ws.push(members);
                    if let Some(p) = w.prob {
                        probs.push(
                            parse_prob(&p)
                                .map_err(|e| Error::Document(format!("world {i}: {e}")))?,
                        );
                    }
                }
                let tuple_count = tuples.len();
                let tuple_set: std::collections::BTreeSet<Tuple> = tuples.into_iter().collect();
                if tuple_set.len() != tuple_count {
                    return Err(Error::Invalid("the tuple list has duplicates".into()));
                }
                let u = UncertainDb::new(tuple_set, ws, (with_prob > 0).then_some(probs));
                let report = u.validate();
                checked(Document::Pw(u), report)
            }
            Raw::Pr { rows, var_probs } => {
                let r = PrRelation::new(rows_from(rows)?, probs_from(var_probs)?);
                let report = r.validate_structure();
                checked(Document::Pr(r), report)
            }
            Raw::Epr {
                rows,
                constraints,
                var_probs,
            } => {
                let constraints = constraints
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let side = |s: &str| {
                            parse_formula(s)
                                .map_err(|e| Error::Document(format!("constraint {i}: `{s}`: {e}")))
                        };
                        Ok(Constraint::new(side(&c.lhs)?, side(&c.rhs)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let var_probs = var_probs.map(probs_from).transpose()?;
                let q = EprRelation::new(rows_from(rows)?, constraints, var_probs);
                let report = q.validate();
                checked(Document::Epr(q), report)
            }
        }
    }

    fn to_raw(&self) -> Raw {
        match self {
            Document::Pw(u) => {
                let tuples: Vec<&Tuple> = u.tuple_set.iter().collect();
                let index: BTreeMap<&Tuple, usize> =
                    tuples.iter().enumerate().map(|(i, t)| (*t, i)).collect();
                let worlds = u
                    .worlds
                    .iter()
                    .enumerate()
                    .map(|(i, w)| RawWorld {
                        tuples: w.iter().map(|t| index[t]).collect(),
                        prob: u.probs.as_ref().map(|p| format_fraction(&p[i])),
                    })
                    .collect();
                Raw::Pw {
                    tuples: tuples.iter().map(|t| t.values().to_vec()).collect(),
                    worlds,
                }
            }
            Document::Pr(r) => Raw::Pr {
                rows: raw_rows(&r.rows),
                var_probs: raw_probs(&r.var_probs),
            },
            Document::Epr(q) => Raw::Epr {
                rows: raw_rows(&q.rows),
                constraints: q
                    .constraints
                    .iter()
                    .map(|c| RawConstraint {
                        lhs: c.lhs.to_string(),
                        rhs: c.rhs.to_string(),
                    })
                    .collect(),
                var_probs: q.var_probs.as_ref().map(raw_probs),
            },
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_raw()).expect("documents serialize")
    }

    /// Pretty-printed JSON; identical documents give identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("documents serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;

    fn round_trip(d: Document) {
        let text = d.to_json();
        assert_eq!(Document::from_json(&text).unwrap(), d, "{text}");
    }

    #[test]
    fn golden_round_trips() {
        round_trip(Document::Pw(golden::andy_pw_case1()));
        round_trip(Document::Pw(golden::example5_s2()));
        round_trip(Document::Pr(golden::andy_pr()));
        round_trip(Document::Pr(golden::example5_r2()));
        round_trip(Document::Epr(golden::andy_jane_epr()));
        round_trip(Document::Epr(golden::example5_epr()));
    }

    #[test]
    fn reads_decimals_and_fractions() {
        let text = r#"{"model": "pr", "rows": [{"tuple": ["a"], "event": "x & y"}],
                       "var_probs": {"x": "0.35", "y": "9/13"}}"#;
        let Document::Pr(r) = Document::from_json(text).unwrap() else {
            panic!("expected a pr document")
        };
        assert_eq!(format_fraction(&r.var_probs["x"]), "7/20");
        assert_eq!(format_fraction(&r.var_probs["y"]), "9/13");
    }

    #[test]
    fn serialization_shape() {
        let v = Document::Pw(golden::jane_pw()).to_value();
        assert_eq!(
            v,
            serde_json::json!({
                "model": "pw",
                "tuples": [["Bob", "CS101"], ["Bob", "CS102"]],
                "worlds": [{"tuples": [0]}, {"tuples": [1]}]
            })
        );
    }

    #[test]
    fn rejects_bad_documents() {
        let cases = [
            r#"{"model": "pw", "tuples": [["a"]], "worlds": [{"tuples": [3]}]}"#,
            r#"{"model": "pw", "tuples": [["a"]], "worlds": [{"tuples": [0], "prob": "1/2"}, {"tuples": []}]}"#,
            r#"{"model": "pw", "tuples": [["a"]], "worlds": [{"tuples": [0], "prob": "1/2"}, {"tuples": [], "prob": "1/3"}]}"#,
            r#"{"model": "pr", "rows": [{"tuple": ["a"], "event": "x &"}]}"#,
            r#"{"model": "pr", "rows": [{"tuple": ["a"], "event": "x"}, {"tuple": ["a"], "event": "y"}]}"#,
            r#"{"model": "pr", "rows": [], "var_probs": {"x": "1"}}"#,
            r#"{"model": "epr", "rows": [], "constraints": [{"lhs": "x", "rhs": "y"}]}"#,
            r#"{"model": "table", "rows": []}"#,
            r#"{"model": "pr", "rows": [], "extra": 1}"#,
        ];
        for text in cases {
            assert!(Document::from_json(text).is_err(), "{text}");
        }
    }
}
