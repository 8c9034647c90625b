//! Bidirectional translation between the restricted-English templates and
//! clause ASTs: `parse_re` (English to AST) and `linearize_re` (AST to
//! English). Both concrete syntaxes share the same abstract syntax.

use crate::ast::{ActionExpr, Clause, CoreError};
use thiserror::Error;

pub const TEMPORAL_WORDS: &[&str] = &["Always", "After", "When", "Before"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnglishError {
    #[error("at offset {offset}: expected {expected}, found {found:?}")]
    Unexpected {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unexpected end of input, expected {expected}")]
    Eof { expected: String },
    #[error("at offset {offset}: the repeated action of the reparation template must match the primary action")]
    ReparationMismatch { offset: usize },
    #[error("at offset {offset}: {source}")]
    Clause { offset: usize, source: CoreError },
    #[error("clause has no restricted-English form: {0}")]
    NotLinearizable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Token {
    text: String,
    offset: usize,
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut toks = Vec::new();
    let mut word_start = None;
    for (i, c) in text.char_indices() {
        match c {
            '(' | ')' => {
                if let Some(s) = word_start.take() {
                    toks.push(Token {
                        text: text[s..i].to_string(),
                        offset: s,
                    });
                }
                toks.push(Token {
                    text: c.to_string(),
                    offset: i,
                });
            }
            c if c.is_whitespace() => {
                if let Some(s) = word_start.take() {
                    toks.push(Token {
                        text: text[s..i].to_string(),
                        offset: s,
                    });
                }
            }
            _ => {
                if word_start.is_none() {
                    word_start = Some(i);
                }
            }
        }
    }
    if let Some(s) = word_start {
        toks.push(Token {
            text: text[s..].to_string(),
            offset: s,
        });
    }
    toks
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(|t| t.text.as_str())
    }

    fn peek_at(&self, ahead: usize) -> Option<&str> {
        self.toks.get(self.pos + ahead).map(|t| t.text.as_str())
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.offset).unwrap_or(0)
    }

    fn next(&mut self, expected: &str) -> Result<Token, EnglishError> {
        match self.toks.get(self.pos).cloned() {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => Err(EnglishError::Eof {
                expected: expected.to_string(),
            }),
        }
    }

    fn expect(&mut self, word: &str) -> Result<(), EnglishError> {
        let tok = self.next(word)?;
        if tok.text == word {
            Ok(())
        } else {
            Err(EnglishError::Unexpected {
                offset: tok.offset,
                expected: format!("{word:?}"),
                found: tok.text,
            })
        }
    }

    fn expect_words(&mut self, words: &[&str]) -> Result<(), EnglishError> {
        for w in words {
            self.expect(w)?;
        }
        Ok(())
    }

    fn clause(&mut self) -> Result<Clause, EnglishError> {
        self.expect("(")?;
        let offset = self.offset();
        match self.peek() {
            Some("It") => {
                let c = self.modality()?;
                self.expect(")")?;
                Ok(c)
            }
            Some("If") => {
                let c = self.conditional()?;
                self.expect(")")?;
                Ok(c)
            }
            Some("trivially") => {
                self.expect_words(&["trivially", "satisfied", ")"])?;
                Ok(Clause::Top)
            }
            Some("violated") => {
                self.expect_words(&["violated", ")"])?;
                Ok(Clause::Bottom)
            }
            Some("(") => {
                if let Some(word) = self.peek_at(1) {
                    if TEMPORAL_WORDS.contains(&word) {
                        return self.temporal();
                    }
                }
                self.combination()
            }
            Some(found) => Err(EnglishError::Unexpected {
                offset,
                expected: "a clause template".to_string(),
                found: found.to_string(),
            }),
            None => Err(EnglishError::Eof {
                expected: "a clause template".to_string(),
            }),
        }
    }

    // `It is mandatory|prohibited|permitted to ( ACT ) [reparation]`
    fn modality(&mut self) -> Result<Clause, EnglishError> {
        self.expect("It")?;
        self.expect("is")?;
        let kind_tok = self.next("mandatory, prohibited or permitted")?;
        self.expect("to")?;
        self.expect("(")?;
        let offset = self.offset();
        let action = self.action()?;
        self.expect(")")?;
        match kind_tok.text.as_str() {
            "mandatory" => {
                let reparation = if self.peek() == Some("if") {
                    self.expect("if")?;
                    self.expect("not")?;
                    Some(self.reparation(&action)?)
                } else {
                    None
                };
                Clause::obligation(action, reparation)
                    .map_err(|e| EnglishError::Clause { offset, source: e })
            }
            "prohibited" => {
                let reparation = if self.peek() == Some("if") {
                    self.expect("if")?;
                    Some(self.reparation(&action)?)
                } else {
                    None
                };
                Clause::prohibition(action, reparation)
                    .map_err(|e| EnglishError::Clause { offset, source: e })
            }
            "permitted" => Clause::permission(action)
                .map_err(|e| EnglishError::Clause { offset, source: e }),
            other => Err(EnglishError::Unexpected {
                offset: kind_tok.offset,
                expected: "\"mandatory\", \"prohibited\" or \"permitted\"".to_string(),
                found: other.to_string(),
            }),
        }
    }

    // `( ACT' ) then CL` where ACT' must repeat the primary action.
    fn reparation(&mut self, primary: &ActionExpr) -> Result<Clause, EnglishError> {
        self.expect("(")?;
        let offset = self.offset();
        let repeated = self.action()?;
        self.expect(")")?;
        if repeated != *primary {
            return Err(EnglishError::ReparationMismatch { offset });
        }
        self.expect("then")?;
        self.clause()
    }

    // `If ( ACT ) then CL`
    fn conditional(&mut self) -> Result<Clause, EnglishError> {
        self.expect("If")?;
        self.expect("(")?;
        let guard = self.action()?;
        self.expect(")")?;
        self.expect("then")?;
        let body = self.clause()?;
        Ok(Clause::guarded(guard, body))
    }

    // `( Always|After|When|Before ) ( If ( ACT ) then CL )`
    fn temporal(&mut self) -> Result<Clause, EnglishError> {
        self.expect("(")?;
        let word = self.next("a temporal word")?;
        if !TEMPORAL_WORDS.contains(&word.text.as_str()) {
            return Err(EnglishError::Unexpected {
                offset: word.offset,
                expected: "\"Always\", \"After\", \"When\" or \"Before\"".to_string(),
                found: word.text,
            });
        }
        self.expect(")")?;
        let offset = self.offset();
        let inner = self.clause()?;
        self.expect(")")?;
        match inner {
            guarded @ Clause::Guarded { .. } => Ok(Clause::always(guarded)),
            _ => Err(EnglishError::Unexpected {
                offset,
                expected: "an \"If ... then ...\" clause after the temporal word".to_string(),
                found: "another clause form".to_string(),
            }),
        }
    }

    // `( CL and CL [and CL ...] )` or `( CL xor CL )`; a single
    // parenthesized clause is accepted as redundant grouping.
    fn combination(&mut self) -> Result<Clause, EnglishError> {
        let first = self.clause()?;
        match self.peek() {
            Some("and") => {
                let mut parts = vec![first];
                while self.peek() == Some("and") {
                    self.expect("and")?;
                    parts.push(self.clause()?);
                }
                self.expect(")")?;
                Ok(Clause::And(parts))
            }
            Some("xor") => {
                self.expect("xor")?;
                let offset = self.offset();
                let right = self.clause()?;
                self.expect(")")?;
                Clause::xchoice(first, right)
                    .map_err(|e| EnglishError::Clause { offset, source: e })
            }
            Some(")") => {
                self.expect(")")?;
                Ok(first)
            }
            Some(found) => Err(EnglishError::Unexpected {
                offset: self.offset(),
                expected: "\"and\", \"xor\" or \")\"".to_string(),
                found: found.to_string(),
            }),
            None => Err(EnglishError::Eof {
                expected: "\"and\", \"xor\" or \")\"".to_string(),
            }),
        }
    }

    // ACT precedence, tightest first: `and`, `followed-by`, `or`.
    fn action(&mut self) -> Result<ActionExpr, EnglishError> {
        let mut left = self.action_fb()?;
        while self.peek() == Some("or") {
            self.expect("or")?;
            let right = self.action_fb()?;
            left = ActionExpr::choice(left, right);
        }
        Ok(left)
    }

    fn action_fb(&mut self) -> Result<ActionExpr, EnglishError> {
        let mut left = self.action_and()?;
        while self.peek() == Some("followed-by") {
            self.expect("followed-by")?;
            let right = self.action_and()?;
            left = ActionExpr::sequence(left, right);
        }
        Ok(left)
    }

    fn action_and(&mut self) -> Result<ActionExpr, EnglishError> {
        let mut left = self.action_name()?;
        while self.peek() == Some("and") {
            self.expect("and")?;
            let right = self.action_name()?;
            left = ActionExpr::concurrent(left, right);
        }
        Ok(left)
    }

    fn action_name(&mut self) -> Result<ActionExpr, EnglishError> {
        let tok = self.next("an action name")?;
        if tok.text == "(" || tok.text == ")" {
            return Err(EnglishError::Unexpected {
                offset: tok.offset,
                expected: "an action name".to_string(),
                found: tok.text,
            });
        }
        split_compound_name(&tok.text)
            .map_err(|e| EnglishError::Clause {
                offset: tok.offset,
                source: e,
            })
    }
}

/// Splits a name at `_and_` / `_or_` markers, left to right, folding the
/// pieces left-associatively into `&` / `+` compounds.
pub fn split_compound_name(name: &str) -> Result<ActionExpr, CoreError> {
    enum Op {
        And,
        Or,
    }
    let mut rest = name;
    let mut expr: Option<ActionExpr> = None;
    let mut pending = None;
    loop {
        let and_pos = rest.find("_and_");
        let or_pos = rest.find("_or_");
        let (cut, op, skip) = match (and_pos, or_pos) {
            (Some(a), Some(o)) if a <= o => (a, Some(Op::And), 5),
            (Some(a), None) => (a, Some(Op::And), 5),
            (_, Some(o)) => (o, Some(Op::Or), 4),
            (None, None) => (rest.len(), None, 0),
        };
        let piece = ActionExpr::atom(&rest[..cut])?;
        expr = Some(match (expr, pending) {
            (None, _) => piece,
            (Some(acc), Some(Op::And)) => ActionExpr::concurrent(acc, piece),
            (Some(acc), Some(Op::Or)) => ActionExpr::choice(acc, piece),
            (Some(_), None) => unreachable!(),
        });
        match op {
            Some(op) => {
                pending = Some(op);
                rest = &rest[cut + skip..];
            }
            None => return Ok(expr.unwrap()),
        }
    }
}

/// Parses a restricted-English clause.
pub fn parse_re(text: &str) -> Result<Clause, EnglishError> {
    let mut p = Parser {
        toks: tokenize(text),
        pos: 0,
    };
    let clause = p.clause()?;
    if let Some(found) = p.peek() {
        return Err(EnglishError::Unexpected {
            offset: p.offset(),
            expected: "end of input".to_string(),
            found: found.to_string(),
        });
    }
    Ok(clause)
}

/// Renders a clause in restricted English. Clauses outside the template
/// language (negation, `0`/`1` under a modality, stars beyond the
/// `[1*][g]C` pattern) are reported as not linearizable.
pub fn linearize_re(clause: &Clause) -> Result<String, EnglishError> {
    let mut out = String::new();
    write_clause(clause, &mut out)?;
    Ok(out)
}

fn write_clause(clause: &Clause, out: &mut String) -> Result<(), EnglishError> {
    match clause {
        Clause::Top => out.push_str("( trivially satisfied )"),
        Clause::Bottom => out.push_str("( violated )"),
        Clause::Obligation { action, reparation } => {
            let act = render_action(action)?;
            out.push_str("( It is mandatory to ( ");
            out.push_str(&act);
            out.push_str(" )");
            if let Some(rep) = reparation {
                out.push_str(" if not ( ");
                out.push_str(&act);
                out.push_str(" ) then ");
                write_clause(rep, out)?;
            }
            out.push_str(" )");
        }
        Clause::Prohibition { action, reparation } => {
            let act = render_action(action)?;
            out.push_str("( It is prohibited to ( ");
            out.push_str(&act);
            out.push_str(" )");
            if let Some(rep) = reparation {
                out.push_str(" if ( ");
                out.push_str(&act);
                out.push_str(" ) then ");
                write_clause(rep, out)?;
            }
            out.push_str(" )");
        }
        Clause::Permission(action) => {
            out.push_str("( It is permitted to ( ");
            out.push_str(&render_action(action)?);
            out.push_str(" ) )");
        }
        Clause::Guarded { guard, body } => {
            if is_star_skip(guard) {
                match &**body {
                    Clause::Guarded { .. } => {
                        out.push_str("( ( Always ) ");
                        write_clause(body, out)?;
                        out.push_str(" )");
                    }
                    _ => {
                        return Err(EnglishError::NotLinearizable(
                            "a repeated condition must wrap an If-then clause".to_string(),
                        ))
                    }
                }
            } else {
                out.push_str("( If ( ");
                out.push_str(&render_action(guard)?);
                out.push_str(" ) then ");
                write_clause(body, out)?;
                out.push_str(" )");
            }
        }
        Clause::And(parts) => {
            out.push_str("( ");
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" and ");
                }
                write_clause(part, out)?;
            }
            out.push_str(" )");
        }
        Clause::XChoice { left, right, .. } => {
            out.push_str("( ");
            write_clause(left, out)?;
            out.push_str(" xor ");
            write_clause(right, out)?;
            out.push_str(" )");
        }
    }
    Ok(())
}

fn is_star_skip(expr: &ActionExpr) -> bool {
    matches!(expr, ActionExpr::Star(inner) if **inner == ActionExpr::Skip)
}

fn render_action(expr: &ActionExpr) -> Result<String, EnglishError> {
    let mut out = String::new();
    render_or(expr, &mut out)?;
    Ok(out)
}

// The English action grammar has no parentheses, so only left-associated
// trees respecting the and > followed-by > or precedence are expressible.
fn render_or(expr: &ActionExpr, out: &mut String) -> Result<(), EnglishError> {
    if let ActionExpr::Choice(l, r) = expr {
        render_or(l, out)?;
        out.push_str(" or ");
        render_fb(r, out)
    } else {
        render_fb(expr, out)
    }
}

fn render_fb(expr: &ActionExpr, out: &mut String) -> Result<(), EnglishError> {
    if let ActionExpr::Sequence(l, r) = expr {
        render_fb(l, out)?;
        out.push_str(" followed-by ");
        render_and(r, out)
    } else {
        render_and(expr, out)
    }
}

fn render_and(expr: &ActionExpr, out: &mut String) -> Result<(), EnglishError> {
    if let ActionExpr::Concurrent(l, r) = expr {
        render_and(l, out)?;
        out.push_str(" and ");
        render_atom(r, out)
    } else {
        render_atom(expr, out)
    }
}

fn render_atom(expr: &ActionExpr, out: &mut String) -> Result<(), EnglishError> {
    match expr {
        ActionExpr::Atom(a) => {
            out.push_str(a.name());
            Ok(())
        }
        other => Err(EnglishError::NotLinearizable(format!(
            "action {other:?} has no restricted-English form in this position"
        ))),
    }
}
