//! Reader for the binary-CSP subset of XCSP 2.1 documents.
//!
//! Supported: integer domains (value lists and `a..b` ranges), binary
//! extensional relations with `supports` or `conflicts` semantics, and binary
//! intensional predicates whose functional expression is a comparison
//! (`eq ne lt le gt ge`) over the two scope variables, their difference
//! `sub`, or absolute difference `abs(sub(..))`, with integer parameters.
//! Anything else is rejected with a diagnostic naming the offending element.
//!
//! Extensional tuples mentioning values outside a scope variable's domain are
//! semantic no-ops and are dropped during conversion.

use std::collections::HashMap;

use thiserror::Error;

use crate::instance::{ConstraintSpec, InstanceDoc};
use crate::network::{CmpOp, Relation};

#[derive(Debug, Error)]
pub enum XcspError {
    #[error("XML parse error: {0}")]
    Xml(#[from] roxmltree::Error),
    #[error("document is not UTF-8")]
    Encoding,
    #[error("missing <{0}> section")]
    MissingSection(&'static str),
    #[error("element <{element}> '{name}': {msg}")]
    Element {
        element: &'static str,
        name: String,
        msg: String,
    },
    #[error("unsupported feature in <{element}> '{name}': {msg}")]
    Unsupported {
        element: &'static str,
        name: String,
        msg: String,
    },
}

fn element_err<T>(element: &'static str, name: &str, msg: impl Into<String>) -> Result<T, XcspError> {
    Err(XcspError::Element {
        element,
        name: name.to_string(),
        msg: msg.into(),
    })
}

fn unsupported<T>(element: &'static str, name: &str, msg: impl Into<String>) -> Result<T, XcspError> {
    Err(XcspError::Unsupported {
        element,
        name: name.to_string(),
        msg: msg.into(),
    })
}

/// Functional expression tree of a predicate body.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Expr {
    Var(String),
    Const(i64),
    Call(String, Vec<Expr>),
}

fn parse_expr(text: &str) -> Result<Expr, String> {
    let mut parser = ExprParser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.chars.len() {
        return Err(format!("trailing input at offset {}", parser.pos));
    }
    Ok(expr)
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
}

impl ExprParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, String> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '-' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let ident = self.ident();
                if self.peek() == Some('(') {
                    self.pos += 1;
                    let mut args = Vec::new();
                    loop {
                        args.push(self.expr()?);
                        match self.peek() {
                            Some(',') => self.pos += 1,
                            Some(')') => {
                                self.pos += 1;
                                break;
                            }
                            other => return Err(format!("expected ',' or ')', found {other:?}")),
                        }
                    }
                    Ok(Expr::Call(ident, args))
                } else {
                    Ok(Expr::Var(ident))
                }
            }
            other => Err(format!("unexpected character {other:?}")),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> Result<Expr, String> {
        let start = self.pos;
        if self.chars.get(self.pos) == Some(&'-') {
            self.pos += 1;
        }
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map(Expr::Const).map_err(|e| e.to_string())
    }
}

fn cmp_by_name(name: &str) -> Option<CmpOp> {
    match name {
        "eq" => Some(CmpOp::Eq),
        "ne" => Some(CmpOp::Ne),
        "lt" => Some(CmpOp::Lt),
        "le" => Some(CmpOp::Le),
        "gt" => Some(CmpOp::Gt),
        "ge" => Some(CmpOp::Ge),
        _ => None,
    }
}

/// A predicate argument after substituting constraint parameters: a scope
/// variable slot or an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Operand {
    First,
    Second,
    Const(i64),
}

/// One side of the top-level comparison after shape analysis.
#[derive(Debug, Clone, Copy)]
enum Side {
    Leaf(Operand),
    /// `sub(u, v)`; `negated` means the scope order is (second, first).
    Sub { negated: bool },
    /// `abs(sub(u, v))` in either order.
    AbsSub,
}

struct Predicate {
    formals: Vec<String>,
    body: Expr,
}

fn substitute(expr: &Expr, binding: &HashMap<&str, Operand>) -> Result<Expr, String> {
    Ok(match expr {
        Expr::Const(_) => expr.clone(),
        Expr::Var(name) => match binding.get(name.as_str()) {
            Some(Operand::Const(k)) => Expr::Const(*k),
            Some(Operand::First) => Expr::Var("\u{0}first".into()),
            Some(Operand::Second) => Expr::Var("\u{0}second".into()),
            None => return Err(format!("unbound parameter '{name}'")),
        },
        Expr::Call(f, args) => Expr::Call(
            f.clone(),
            args.iter()
                .map(|a| substitute(a, binding))
                .collect::<Result<_, _>>()?,
        ),
    })
}

fn classify_leaf(expr: &Expr) -> Option<Operand> {
    match expr {
        Expr::Const(k) => Some(Operand::Const(*k)),
        Expr::Var(name) if name == "\u{0}first" => Some(Operand::First),
        Expr::Var(name) if name == "\u{0}second" => Some(Operand::Second),
        _ => None,
    }
}

fn classify_side(expr: &Expr) -> Result<Side, String> {
    if let Some(leaf) = classify_leaf(expr) {
        return Ok(Side::Leaf(leaf));
    }
    match expr {
        Expr::Call(f, args) if f == "sub" && args.len() == 2 => {
            match (classify_leaf(&args[0]), classify_leaf(&args[1])) {
                (Some(Operand::First), Some(Operand::Second)) => Ok(Side::Sub { negated: false }),
                (Some(Operand::Second), Some(Operand::First)) => Ok(Side::Sub { negated: true }),
                _ => Err("sub must apply to the two scope variables".into()),
            }
        }
        Expr::Call(f, args) if f == "abs" && args.len() == 1 => match classify_side(&args[0])? {
            Side::Sub { .. } => Ok(Side::AbsSub),
            _ => Err("abs must wrap sub of the two scope variables".into()),
        },
        Expr::Call(f, _) => Err(format!("function '{f}' is outside the supported subset")),
        _ => Err("expression shape outside the supported subset".into()),
    }
}

fn const_i32(k: i64) -> Result<i32, String> {
    i32::try_from(k).map_err(|_| format!("constant {k} out of 32-bit range"))
}

/// Lowers a substituted comparison into a [`Relation`] evaluated on the scope
/// order (first, second).
fn lower(body: &Expr) -> Result<Relation, String> {
    let Expr::Call(f, args) = body else {
        return Err("predicate body must be a comparison call".into());
    };
    let Some(op) = cmp_by_name(f) else {
        return Err(format!("top-level function '{f}' is not a comparison"));
    };
    if args.len() != 2 {
        return Err(format!("comparison '{f}' needs two arguments"));
    }
    let lhs = classify_side(&args[0])?;
    let rhs = classify_side(&args[1])?;
    match (lhs, rhs) {
        (Side::Leaf(Operand::First), Side::Leaf(Operand::Second)) => Ok(Relation::Cmp(op)),
        (Side::Leaf(Operand::Second), Side::Leaf(Operand::First)) => {
            Ok(Relation::Cmp(op.swapped()))
        }
        (Side::AbsSub, Side::Leaf(Operand::Const(k))) => Ok(Relation::AbsDiff(op, const_i32(k)?)),
        (Side::Leaf(Operand::Const(k)), Side::AbsSub) => {
            Ok(Relation::AbsDiff(op.swapped(), const_i32(k)?))
        }
        (Side::Sub { negated }, Side::Leaf(Operand::Const(k))) => {
            let k = const_i32(k)?;
            if negated {
                // second - first op k  <=>  first - second op.swapped() -k
                Ok(Relation::Diff(op.swapped(), k.checked_neg().ok_or("constant overflow")?))
            } else {
                Ok(Relation::Diff(op, k))
            }
        }
        (Side::Leaf(Operand::Const(k)), Side::Sub { negated }) => {
            let k = const_i32(k)?;
            if negated {
                Ok(Relation::Diff(op, k.checked_neg().ok_or("constant overflow")?))
            } else {
                Ok(Relation::Diff(op.swapped(), k))
            }
        }
        _ => Err("comparison operands outside the supported subset".into()),
    }
}

fn parse_domain_values(text: &str, name: &str) -> Result<Vec<i32>, XcspError> {
    let mut values = Vec::new();
    for token in text.split_whitespace() {
        if let Some((lo, hi)) = token.split_once("..") {
            let lo: i32 = lo.parse().map_err(|_| XcspError::Element {
                element: "domain",
                name: name.to_string(),
                msg: format!("bad range start '{lo}'"),
            })?;
            let hi: i32 = hi.parse().map_err(|_| XcspError::Element {
                element: "domain",
                name: name.to_string(),
                msg: format!("bad range end '{hi}'"),
            })?;
            if lo > hi {
                return element_err("domain", name, format!("empty range {lo}..{hi}"));
            }
            values.extend(lo..=hi);
        } else {
            let v: i32 = token.parse().map_err(|_| XcspError::Element {
                element: "domain",
                name: name.to_string(),
                msg: format!("bad value '{token}'"),
            })?;
            values.push(v);
        }
    }
    values.sort_unstable();
    values.dedup();
    if values.is_empty() {
        return element_err("domain", name, "no values");
    }
    Ok(values)
}

enum Reference {
    Table { allowed: bool, tuples: Vec<(i32, i32)> },
    Pred(Predicate),
}

pub fn parse_xcsp(bytes: &[u8]) -> Result<InstanceDoc, XcspError> {
    let text = std::str::from_utf8(bytes).map_err(|_| XcspError::Encoding)?;
    let xml = roxmltree::Document::parse(text)?;
    let root = xml.root_element();
    if root.tag_name().name() != "instance" {
        return element_err("instance", root.tag_name().name(), "root must be <instance>");
    }
    let section = |tag: &'static str| {
        root.children()
            .find(|n| n.is_element() && n.tag_name().name() == tag)
    };

    let instance_name = section("presentation")
        .and_then(|p| p.attribute("name"))
        .unwrap_or("xcsp-instance")
        .to_string();

    // Domains.
    let mut domains_by_name: HashMap<String, Vec<i32>> = HashMap::new();
    let domains_section = section("domains").ok_or(XcspError::MissingSection("domains"))?;
    for node in domains_section.children().filter(|n| n.is_element()) {
        let name = node.attribute("name").unwrap_or("?").to_string();
        let body = node.text().unwrap_or("");
        domains_by_name.insert(name.clone(), parse_domain_values(body, &name)?);
    }

    // Variables, in document order.
    let mut var_ids: HashMap<String, usize> = HashMap::new();
    let mut doc = InstanceDoc::new(instance_name);
    let variables_section = section("variables").ok_or(XcspError::MissingSection("variables"))?;
    for node in variables_section.children().filter(|n| n.is_element()) {
        let name = node.attribute("name").unwrap_or("?").to_string();
        let domain_ref = node
            .attribute("domain")
            .ok_or_else(|| XcspError::Element {
                element: "variable",
                name: name.clone(),
                msg: "missing domain attribute".into(),
            })?;
        let values = domains_by_name
            .get(domain_ref)
            .ok_or_else(|| XcspError::Element {
                element: "variable",
                name: name.clone(),
                msg: format!("unknown domain '{domain_ref}'"),
            })?;
        var_ids.insert(name, doc.domains.len());
        doc.domains.push(values.clone());
    }

    // Relations and predicates.
    let mut references: HashMap<String, Reference> = HashMap::new();
    if let Some(relations) = section("relations") {
        for node in relations.children().filter(|n| n.is_element()) {
            let name = node.attribute("name").unwrap_or("?").to_string();
            let arity = node.attribute("arity").unwrap_or("2");
            if arity != "2" {
                return unsupported("relation", &name, format!("arity {arity}; only binary relations are supported"));
            }
            let allowed = match node.attribute("semantics") {
                Some("supports") => true,
                Some("conflicts") => false,
                other => {
                    return element_err(
                        "relation",
                        &name,
                        format!("semantics must be supports or conflicts, found {other:?}"),
                    )
                }
            };
            let mut tuples = Vec::new();
            for chunk in node
                .text()
                .unwrap_or("")
                .split('|')
                .map(str::trim)
                .filter(|s| !s.is_empty())
            {
                let parts: Vec<&str> = chunk.split_whitespace().collect();
                if parts.len() != 2 {
                    return element_err(
                        "relation",
                        &name,
                        format!("tuple '{chunk}' does not have two components"),
                    );
                }
                let a: i32 = parts[0].parse().map_err(|_| XcspError::Element {
                    element: "relation",
                    name: name.clone(),
                    msg: format!("bad tuple value '{}'", parts[0]),
                })?;
                let b: i32 = parts[1].parse().map_err(|_| XcspError::Element {
                    element: "relation",
                    name: name.clone(),
                    msg: format!("bad tuple value '{}'", parts[1]),
                })?;
                tuples.push((a, b));
            }
            references.insert(name, Reference::Table { allowed, tuples });
        }
    }
    if let Some(predicates) = section("predicates") {
        for node in predicates.children().filter(|n| n.is_element()) {
            let name = node.attribute("name").unwrap_or("?").to_string();
            let params_text = node
                .children()
                .find(|n| n.tag_name().name() == "parameters")
                .and_then(|n| n.text())
                .unwrap_or("")
                .to_string();
            let formals: Vec<String> = params_text
                .split_whitespace()
                .filter(|t| *t != "int")
                .map(str::to_string)
                .collect();
            let body_text = node
                .children()
                .find(|n| n.tag_name().name() == "expression")
                .and_then(|e| {
                    e.children()
                        .find(|n| n.tag_name().name() == "functional")
                        .and_then(|f| f.text())
                })
                .ok_or_else(|| XcspError::Unsupported {
                    element: "predicate",
                    name: name.clone(),
                    msg: "only functional expressions are supported".into(),
                })?;
            let body = parse_expr(body_text).map_err(|msg| XcspError::Element {
                element: "predicate",
                name: name.clone(),
                msg,
            })?;
            references.insert(name, Reference::Pred(Predicate { formals, body }));
        }
    }

    // Constraints.
    let constraints_section =
        section("constraints").ok_or(XcspError::MissingSection("constraints"))?;
    for node in constraints_section.children().filter(|n| n.is_element()) {
        let name = node.attribute("name").unwrap_or("?").to_string();
        let arity = node.attribute("arity").unwrap_or("2");
        if arity != "2" {
            return unsupported(
                "constraint",
                &name,
                format!("arity {arity}; only binary constraints are supported"),
            );
        }
        let scope_text = node.attribute("scope").unwrap_or("");
        let scope: Vec<&str> = scope_text.split_whitespace().collect();
        if scope.len() != 2 {
            return unsupported(
                "constraint",
                &name,
                format!("scope '{scope_text}' does not have two variables"),
            );
        }
        let x = *var_ids.get(scope[0]).ok_or_else(|| XcspError::Element {
            element: "constraint",
            name: name.clone(),
            msg: format!("unknown scope variable '{}'", scope[0]),
        })?;
        let y = *var_ids.get(scope[1]).ok_or_else(|| XcspError::Element {
            element: "constraint",
            name: name.clone(),
            msg: format!("unknown scope variable '{}'", scope[1]),
        })?;
        let reference = node.attribute("reference").unwrap_or("");
        let relation = match references.get(reference) {
            Some(Reference::Table { allowed, tuples }) => {
                // Drop tuples outside the scope variables' domains: they can
                // never be taken and keeping documents strictly in-range lets
                // the native format stay strict.
                let in_range: Vec<(i32, i32)> = tuples
                    .iter()
                    .copied()
                    .filter(|&(a, b)| {
                        doc.domains[x].binary_search(&a).is_ok()
                            && doc.domains[y].binary_search(&b).is_ok()
                    })
                    .collect();
                if *allowed {
                    Relation::Allowed(in_range)
                } else {
                    Relation::Forbidden(in_range)
                }
            }
            Some(Reference::Pred(pred)) => {
                let params_text = node
                    .children()
                    .find(|n| n.tag_name().name() == "parameters")
                    .and_then(|n| n.text())
                    .map(str::to_string)
                    .unwrap_or_else(|| scope_text.to_string());
                let actuals: Vec<&str> = params_text.split_whitespace().collect();
                if actuals.len() != pred.formals.len() {
                    return element_err(
                        "constraint",
                        &name,
                        format!(
                            "predicate '{reference}' expects {} parameters, found {}",
                            pred.formals.len(),
                            actuals.len()
                        ),
                    );
                }
                let mut binding: HashMap<&str, Operand> = HashMap::new();
                for (formal, actual) in pred.formals.iter().zip(&actuals) {
                    let operand = if let Ok(k) = actual.parse::<i64>() {
                        Operand::Const(k)
                    } else if *actual == scope[0] {
                        Operand::First
                    } else if *actual == scope[1] {
                        Operand::Second
                    } else {
                        return element_err(
                            "constraint",
                            &name,
                            format!("parameter '{actual}' is neither an integer nor in scope"),
                        );
                    };
                    binding.insert(formal.as_str(), operand);
                }
                let substituted =
                    substitute(&pred.body, &binding).map_err(|msg| XcspError::Element {
                        element: "constraint",
                        name: name.clone(),
                        msg,
                    })?;
                lower(&substituted).map_err(|msg| XcspError::Unsupported {
                    element: "constraint",
                    name: name.clone(),
                    msg,
                })?
            }
            None => {
                return element_err(
                    "constraint",
                    &name,
                    format!("unknown reference '{reference}'"),
                )
            }
        };
        doc.constraints.push(ConstraintSpec { x, y, relation });
    }

    doc.provenance.push(("format".into(), "xcsp-2.1".into()));
    Ok(doc)
}
