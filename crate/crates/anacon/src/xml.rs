//! XML import and export for contract clauses. Action names are restricted
//! to `[A-Za-z0-9_]`, so no character escaping is needed in either
//! direction; the writer emits a fixed two-space-indented layout so equal
//! clause lists serialize to byte-identical documents.

use crate::ast::{ActionExpr, AtomicAction, Clause};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum XmlError {
    #[error("malformed XML at byte {0}")]
    Malformed(usize),
    #[error("unexpected element <{name}> at {path}")]
    UnexpectedElement { name: String, path: String },
    #[error("element <{name}> at {path} expects {expected} children, found {found}")]
    ChildCount {
        name: String,
        path: String,
        expected: usize,
        found: usize,
    },
    #[error("element <atom> at {path} is missing its name attribute")]
    MissingName { path: String },
    #[error("invalid action name `{name}` at {path}")]
    BadName { name: String, path: String },
    #[error("exclusive choice at {path} mixes obligations and permissions")]
    MixedXChoice { path: String },
}

// ---------------------------------------------------------------------------
// Writer

pub fn contract_to_xml(clauses: &[Clause]) -> String {
    let mut out = String::from("<contract>\n");
    for clause in clauses {
        write_clause(&mut out, clause, 1);
    }
    out.push_str("</contract>\n");
    out
}

pub fn clause_to_xml(clause: &Clause) -> String {
    let mut out = String::new();
    write_clause(&mut out, clause, 0);
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_clause(out: &mut String, clause: &Clause, level: usize) {
    match clause {
        Clause::Top => {
            indent(out, level);
            out.push_str("<top/>\n");
        }
        Clause::Bottom => {
            indent(out, level);
            out.push_str("<bottom/>\n");
        }
        Clause::Obligation { action, reparation } => {
            write_deontic(out, "obligation", action, reparation.as_deref(), level)
        }
        Clause::Prohibition { action, reparation } => {
            write_deontic(out, "prohibition", action, reparation.as_deref(), level)
        }
        Clause::Permission(action) => {
            indent(out, level);
            out.push_str("<permission>\n");
            write_action(out, action, level + 1);
            indent(out, level);
            out.push_str("</permission>\n");
        }
        Clause::Guarded { guard, body } => {
            indent(out, level);
            out.push_str("<box>\n");
            indent(out, level + 1);
            out.push_str("<guard>\n");
            write_action(out, guard, level + 2);
            indent(out, level + 1);
            out.push_str("</guard>\n");
            write_clause(out, body, level + 1);
            indent(out, level);
            out.push_str("</box>\n");
        }
        Clause::And(parts) => {
            indent(out, level);
            out.push_str("<and>\n");
            for part in parts {
                write_clause(out, part, level + 1);
            }
            indent(out, level);
            out.push_str("</and>\n");
        }
        Clause::XChoice { left, right, .. } => {
            indent(out, level);
            out.push_str("<xchoice>\n");
            write_clause(out, left, level + 1);
            write_clause(out, right, level + 1);
            indent(out, level);
            out.push_str("</xchoice>\n");
        }
    }
}

fn write_deontic(
    out: &mut String,
    tag: &str,
    action: &ActionExpr,
    reparation: Option<&Clause>,
    level: usize,
) {
    indent(out, level);
    let _ = writeln!(out, "<{tag}>");
    write_action(out, action, level + 1);
    if let Some(rep) = reparation {
        indent(out, level + 1);
        out.push_str("<reparation>\n");
        write_clause(out, rep, level + 2);
        indent(out, level + 1);
        out.push_str("</reparation>\n");
    }
    indent(out, level);
    let _ = writeln!(out, "</{tag}>");
}

fn write_action(out: &mut String, action: &ActionExpr, level: usize) {
    indent(out, level);
    match action {
        ActionExpr::Impossible => out.push_str("<impossible/>\n"),
        ActionExpr::Skip => out.push_str("<skip/>\n"),
        ActionExpr::Atom(a) => {
            let _ = writeln!(out, "<atom name=\"{}\"/>", a.name());
        }
        ActionExpr::Concurrent(a, b) => write_binary(out, "concurrent", a, b, level),
        ActionExpr::Sequence(a, b) => write_binary(out, "sequence", a, b, level),
        ActionExpr::Choice(a, b) => write_binary(out, "choice", a, b, level),
        ActionExpr::Negation(a) => write_unary(out, "not", a, level),
        ActionExpr::Star(a) => write_unary(out, "star", a, level),
    }
}

fn write_binary(out: &mut String, tag: &str, a: &ActionExpr, b: &ActionExpr, level: usize) {
    let _ = writeln!(out, "<{tag}>");
    write_action(out, a, level + 1);
    write_action(out, b, level + 1);
    indent(out, level);
    let _ = writeln!(out, "</{tag}>");
}

fn write_unary(out: &mut String, tag: &str, a: &ActionExpr, level: usize) {
    let _ = writeln!(out, "<{tag}>");
    write_action(out, a, level + 1);
    indent(out, level);
    let _ = writeln!(out, "</{tag}>");
}

// ---------------------------------------------------------------------------
// Reader

#[derive(Debug)]
struct Node {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
}

impl Node {
    fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self) -> Result<T, XmlError> {
        Err(XmlError::Malformed(self.pos))
    }

    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), XmlError> {
        if self.bytes.get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            self.err()
        }
    }

    fn read_name(&mut self) -> Result<String, XmlError> {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_' || *b == b'-')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err();
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    /// Parses one element starting at `<`; declarations and comments are
    /// not accepted.
    fn read_element(&mut self) -> Result<Node, XmlError> {
        self.expect(b'<')?;
        let name = self.read_name()?;
        let mut attrs = Vec::new();
        loop {
            self.skip_ws();
            match self.bytes.get(self.pos) {
                Some(b'/') => {
                    self.pos += 1;
                    self.expect(b'>')?;
                    return Ok(Node {
                        name,
                        attrs,
                        children: Vec::new(),
                    });
                }
                Some(b'>') => {
                    self.pos += 1;
                    break;
                }
                Some(_) => {
                    let key = self.read_name()?;
                    self.skip_ws();
                    self.expect(b'=')?;
                    self.skip_ws();
                    self.expect(b'"')?;
                    let start = self.pos;
                    while self.bytes.get(self.pos).is_some_and(|b| *b != b'"') {
                        self.pos += 1;
                    }
                    let value =
                        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned();
                    self.expect(b'"')?;
                    attrs.push((key, value));
                }
                None => return self.err(),
            }
        }
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            if self.bytes.get(self.pos) != Some(&b'<') {
                return self.err();
            }
            if self.bytes.get(self.pos + 1) == Some(&b'/') {
                self.pos += 2;
                let close = self.read_name()?;
                if close != name {
                    return self.err();
                }
                self.skip_ws();
                self.expect(b'>')?;
                return Ok(Node {
                    name,
                    attrs,
                    children,
                });
            }
            children.push(self.read_element()?);
        }
    }
}

pub fn contract_from_xml(text: &str) -> Result<Vec<Clause>, XmlError> {
    let mut reader = Reader::new(text);
    reader.skip_ws();
    let root = reader.read_element()?;
    reader.skip_ws();
    if reader.pos != reader.bytes.len() {
        return reader.err();
    }
    if root.name != "contract" {
        return Err(XmlError::UnexpectedElement {
            name: root.name,
            path: "/".into(),
        });
    }
    root.children
        .iter()
        .enumerate()
        .map(|(i, child)| clause_from_node(child, &format!("/contract[{i}]")))
        .collect()
}

pub fn clause_from_xml(text: &str) -> Result<Clause, XmlError> {
    let mut reader = Reader::new(text);
    reader.skip_ws();
    let root = reader.read_element()?;
    reader.skip_ws();
    if reader.pos != reader.bytes.len() {
        return reader.err();
    }
    clause_from_node(&root, "/")
}

fn child_count_err(node: &Node, path: &str, expected: usize) -> XmlError {
    XmlError::ChildCount {
        name: node.name.clone(),
        path: path.to_string(),
        expected,
        found: node.children.len(),
    }
}

fn clause_from_node(node: &Node, path: &str) -> Result<Clause, XmlError> {
    let here = format!("{path}/{}", node.name);
    match node.name.as_str() {
        "top" => Ok(Clause::Top),
        "bottom" => Ok(Clause::Bottom),
        "obligation" | "prohibition" => {
            let (action_node, rep_node) = match node.children.as_slice() {
                [a] => (a, None),
                [a, r] if r.name == "reparation" => (a, Some(r)),
                _ => return Err(child_count_err(node, path, 2)),
            };
            let action = action_from_node(action_node, &here)?;
            let reparation = match rep_node {
                None => None,
                Some(r) => {
                    let rpath = format!("{here}/reparation");
                    match r.children.as_slice() {
                        [c] => Some(Box::new(clause_from_node(c, &rpath)?)),
                        _ => return Err(child_count_err(r, &here, 1)),
                    }
                }
            };
            if node.name == "obligation" {
                Ok(Clause::Obligation { action, reparation })
            } else {
                Ok(Clause::Prohibition { action, reparation })
            }
        }
        "permission" => match node.children.as_slice() {
            [a] => Ok(Clause::Permission(action_from_node(a, &here)?)),
            _ => Err(child_count_err(node, path, 1)),
        },
        "box" => {
            let (guard_node, body_node) = match node.children.as_slice() {
                [g, b] if g.name == "guard" => (g, b),
                _ => return Err(child_count_err(node, path, 2)),
            };
            let gpath = format!("{here}/guard");
            let guard = match guard_node.children.as_slice() {
                [a] => action_from_node(a, &gpath)?,
                _ => return Err(child_count_err(guard_node, &here, 1)),
            };
            Ok(Clause::guarded(guard, clause_from_node(body_node, &here)?))
        }
        "and" => Ok(Clause::And(
            node.children
                .iter()
                .map(|c| clause_from_node(c, &here))
                .collect::<Result<_, _>>()?,
        )),
        "xchoice" => match node.children.as_slice() {
            [l, r] => {
                let left = clause_from_node(l, &here)?;
                let right = clause_from_node(r, &here)?;
                Clause::xchoice(left, right).map_err(|_| XmlError::MixedXChoice { path: here })
            }
            _ => Err(child_count_err(node, path, 2)),
        },
        _ => Err(XmlError::UnexpectedElement {
            name: node.name.clone(),
            path: path.to_string(),
        }),
    }
}

fn action_from_node(node: &Node, path: &str) -> Result<ActionExpr, XmlError> {
    let here = format!("{path}/{}", node.name);
    let binary = |ctor: fn(ActionExpr, ActionExpr) -> ActionExpr| match node.children.as_slice() {
        [a, b] => Ok(ctor(
            action_from_node(a, &here)?,
            action_from_node(b, &here)?,
        )),
        _ => Err(child_count_err(node, path, 2)),
    };
    match node.name.as_str() {
        "impossible" => Ok(ActionExpr::Impossible),
        "skip" => Ok(ActionExpr::Skip),
        "atom" => {
            let name = node
                .attr("name")
                .ok_or_else(|| XmlError::MissingName { path: here.clone() })?;
            let atom = AtomicAction::new(name).map_err(|_| XmlError::BadName {
                name: name.to_string(),
                path: here.clone(),
            })?;
            Ok(ActionExpr::Atom(atom))
        }
        "concurrent" => binary(ActionExpr::concurrent),
        "sequence" => binary(ActionExpr::sequence),
        "choice" => binary(ActionExpr::choice),
        "not" => match node.children.as_slice() {
            [a] => Ok(ActionExpr::Negation(Box::new(action_from_node(a, &here)?))),
            _ => Err(child_count_err(node, path, 1)),
        },
        "star" => match node.children.as_slice() {
            [a] => Ok(ActionExpr::Star(Box::new(action_from_node(a, &here)?))),
            _ => Err(child_count_err(node, path, 1)),
        },
        _ => Err(XmlError::UnexpectedElement {
            name: node.name.clone(),
            path: path.to_string(),
        }),
    }
}
