//! The native line-oriented instance format.
//!
//! Designed to keep fixtures diffable; the exact grammar is documented in
//! the guide's formats chapter. One directive per line:
//!
//! ```text
//! csp <name>
//! var <id> <v1> <v2> ...
//! ctr <x> <y> allowed [<a>:<b> ...]
//! ctr <x> <y> forbidden [<a>:<b> ...]
//! ctr <x> <y> rel <op>
//! ctr <x> <y> absdiff <op> <k>
//! ctr <x> <y> diff <op> <k>
//! ctr <x> <y> queens <k>
//! meta <key> <value>
//! ```
//!
//! `#` starts a comment, blank lines are ignored, `op` is one of
//! `eq ne lt le gt ge`. Parsing then serializing then parsing is the
//! identity on documents.

use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::{ConstraintSpec, InstanceDoc};
use crate::network::{CmpOp, Relation};

#[derive(Debug, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        msg: msg.into(),
    })
}

fn parse_op(token: &str, line: usize) -> Result<CmpOp, ParseError> {
    match token {
        "eq" => Ok(CmpOp::Eq),
        "ne" => Ok(CmpOp::Ne),
        "lt" => Ok(CmpOp::Lt),
        "le" => Ok(CmpOp::Le),
        "gt" => Ok(CmpOp::Gt),
        "ge" => Ok(CmpOp::Ge),
        other => err(line, format!("unknown comparison operator '{other}'")),
    }
}

fn parse_int(token: &str, line: usize) -> Result<i32, ParseError> {
    token
        .parse()
        .map_err(|_| ParseError {
            line,
            msg: format!("expected integer, found '{token}'"),
        })
}

fn parse_pairs(tokens: &[&str], line: usize) -> Result<Vec<(i32, i32)>, ParseError> {
    tokens
        .iter()
        .map(|t| {
            let (a, b) = t
                .split_once(':')
                .ok_or_else(|| ParseError {
                    line,
                    msg: format!("expected value pair 'a:b', found '{t}'"),
                })?;
            Ok((parse_int(a, line)?, parse_int(b, line)?))
        })
        .collect()
}

pub fn parse_native(text: &str) -> Result<InstanceDoc, ParseError> {
    let mut doc: Option<InstanceDoc> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let directive = tokens.next().expect("non-empty line");
        let rest: Vec<&str> = tokens.collect();
        match directive {
            "csp" => {
                if doc.is_some() {
                    return err(line, "duplicate csp header");
                }
                if rest.is_empty() {
                    return err(line, "csp header needs a name");
                }
                doc = Some(InstanceDoc::new(rest.join(" ")));
            }
            "var" => {
                let doc = doc
                    .as_mut()
                    .ok_or_else(|| ParseError {
                        line,
                        msg: "var before csp header".into(),
                    })?;
                if rest.len() < 2 {
                    return err(line, "var needs an id and at least one value");
                }
                let id: usize = rest[0].parse().map_err(|_| ParseError {
                    line,
                    msg: format!("bad variable id '{}'", rest[0]),
                })?;
                if id != doc.domains.len() {
                    return err(
                        line,
                        format!("variable ids must be consecutive; expected {}", doc.domains.len()),
                    );
                }
                let values: Vec<i32> = rest[1..]
                    .iter()
                    .map(|t| parse_int(t, line))
                    .collect::<Result<_, _>>()?;
                if values.windows(2).any(|w| w[0] >= w[1]) {
                    return err(line, "domain values must be strictly increasing");
                }
                doc.domains.push(values);
            }
            "ctr" => {
                let doc = doc
                    .as_mut()
                    .ok_or_else(|| ParseError {
                        line,
                        msg: "ctr before csp header".into(),
                    })?;
                if rest.len() < 3 {
                    return err(line, "ctr needs two variables and a relation kind");
                }
                let x: usize = rest[0].parse().map_err(|_| ParseError {
                    line,
                    msg: format!("bad variable id '{}'", rest[0]),
                })?;
                let y: usize = rest[1].parse().map_err(|_| ParseError {
                    line,
                    msg: format!("bad variable id '{}'", rest[1]),
                })?;
                for v in [x, y] {
                    if v >= doc.domains.len() {
                        return err(line, format!("constraint references unknown variable {v}"));
                    }
                }
                let relation = match rest[2] {
                    "allowed" | "forbidden" => {
                        let pairs = parse_pairs(&rest[3..], line)?;
                        for &(a, b) in &pairs {
                            if doc.domains[x].binary_search(&a).is_err() {
                                return err(line, format!("value {a} not in domain of variable {x}"));
                            }
                            if doc.domains[y].binary_search(&b).is_err() {
                                return err(line, format!("value {b} not in domain of variable {y}"));
                            }
                        }
                        if rest[2] == "allowed" {
                            Relation::Allowed(pairs)
                        } else {
                            Relation::Forbidden(pairs)
                        }
                    }
                    "rel" => {
                        if rest.len() != 4 {
                            return err(line, "rel takes exactly one operator");
                        }
                        Relation::Cmp(parse_op(rest[3], line)?)
                    }
                    "absdiff" | "diff" => {
                        if rest.len() != 5 {
                            return err(line, format!("{} takes an operator and a constant", rest[2]));
                        }
                        let op = parse_op(rest[3], line)?;
                        let k = parse_int(rest[4], line)?;
                        if rest[2] == "absdiff" {
                            Relation::AbsDiff(op, k)
                        } else {
                            Relation::Diff(op, k)
                        }
                    }
                    "queens" => {
                        if rest.len() != 4 {
                            return err(line, "queens takes one constant");
                        }
                        Relation::QueensSafe(parse_int(rest[3], line)?)
                    }
                    other => return err(line, format!("unknown relation kind '{other}'")),
                };
                doc.constraints.push(ConstraintSpec { x, y, relation });
            }
            "meta" => {
                let doc = doc
                    .as_mut()
                    .ok_or_else(|| ParseError {
                        line,
                        msg: "meta before csp header".into(),
                    })?;
                if rest.is_empty() {
                    return err(line, "meta needs a key");
                }
                doc.provenance
                    .push((rest[0].to_string(), rest[1..].join(" ")));
            }
            other => return err(line, format!("unknown directive '{other}'")),
        }
    }
    doc.ok_or_else(|| ParseError {
        line: 0,
        msg: "missing csp header".into(),
    })
}

pub fn serialize_native(doc: &InstanceDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "csp {}", doc.name);
    for (i, values) in doc.domains.iter().enumerate() {
        let _ = write!(out, "var {i}");
        for v in values {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    for c in &doc.constraints {
        let _ = write!(out, "ctr {} {}", c.x, c.y);
        match &c.relation {
            Relation::Allowed(pairs) | Relation::Forbidden(pairs) => {
                let kind = if matches!(c.relation, Relation::Allowed(_)) {
                    "allowed"
                } else {
                    "forbidden"
                };
                let _ = write!(out, " {kind}");
                for (a, b) in pairs {
                    let _ = write!(out, " {a}:{b}");
                }
            }
            Relation::Cmp(op) => {
                let _ = write!(out, " rel {}", op.name());
            }
            Relation::AbsDiff(op, k) => {
                let _ = write!(out, " absdiff {} {k}", op.name());
            }
            Relation::Diff(op, k) => {
                let _ = write!(out, " diff {} {k}", op.name());
            }
            Relation::QueensSafe(k) => {
                let _ = write!(out, " queens {k}");
            }
        }
        out.push('\n');
    }
    for (key, value) in &doc.provenance {
        if value.is_empty() {
            let _ = writeln!(out, "meta {key}");
        } else {
            let _ = writeln!(out, "meta {key} {value}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two variables, one table
csp sample
var 0 0 1 2
var 1 -1 0 4
ctr 0 1 forbidden 0:-1 2:4
meta format test
meta seed 7
";

    #[test]
    fn parse_then_serialize_is_identity() {
        let doc = parse_native(SAMPLE).unwrap();
        assert_eq!(doc.name, "sample");
        assert_eq!(doc.domains, vec![vec![0, 1, 2], vec![-1, 0, 4]]);
        assert_eq!(doc.meta("seed"), Some("7"));
        let text = serialize_native(&doc);
        let again = parse_native(&text).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn intensional_directives() {
        let text = "csp i\nvar 0 0 1 2 3 4\nvar 1 0 1 2 3 4\nctr 0 1 absdiff gt 3\n";
        let doc = parse_native(text).unwrap();
        assert_eq!(doc.constraints[0].relation, Relation::AbsDiff(CmpOp::Gt, 3));
        assert!(doc.constraints[0].relation.allows(0, 4));
        assert!(!doc.constraints[0].relation.allows(0, 3));
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let text = "csp bad\nvar 0 0 1\nctr 0 5 rel ne\n";
        let e = parse_native(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.msg.contains("unknown variable 5"));

        let text = "csp bad\nvar 0 1 1\n";
        let e = parse_native(text).unwrap_err();
        assert_eq!(e.line, 2);

        let text = "csp bad\nvar 0 0 1\nvar 1 0 1\nctr 0 1 allowed 0:7\n";
        let e = parse_native(text).unwrap_err();
        assert!(e.msg.contains("not in domain"));
    }

    #[test]
    fn empty_tables_are_legal() {
        let text = "csp e\nvar 0 0\nvar 1 0\nctr 0 1 allowed\n";
        let doc = parse_native(text).unwrap();
        assert_eq!(doc.constraints[0].relation, Relation::Allowed(vec![]));
    }
}
