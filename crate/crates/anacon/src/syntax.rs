//! Parser and printer for the symbolic CL concrete syntax
//! (`O`, `F`, `P`, `[ ]`, `^`, `(+)`, `_` reparations, `T`, `_|_`).

use crate::ast::{ActionExpr, AtomicAction, Clause, CoreError};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("lexical error at offset {offset}: unexpected character {found:?}")]
    Lexical { offset: usize, found: char },
    #[error("syntax error at offset {offset}: expected {expected}, found {found}")]
    Unexpected {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("syntax error at offset {offset}: unexpected end of input, expected {expected}")]
    Eof { offset: usize, expected: String },
    #[error("at offset {offset}: {source}")]
    Clause {
        offset: usize,
        source: CoreError,
    },
    #[error("at offset {offset}: `^` and `(+)` at the same level require parentheses")]
    MixedConnectives { offset: usize },
    #[error("at offset {offset}: negation applies only to atoms or concurrent atoms")]
    BadNegation { offset: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBrack,
    RBrack,
    Obl,
    For,
    Per,
    Top,
    Bottom,
    Underscore,
    Caret,
    OPlus,
    Amp,
    Dot,
    Plus,
    Bang,
    Star,
    Zero,
    One,
    Name(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Obl => "O",
            Tok::For => "F",
            Tok::Per => "P",
            Tok::Top => "T",
            Tok::Bottom => "_|_",
            Tok::Underscore => "_",
            Tok::Caret => "^",
            Tok::OPlus => "(+)",
            Tok::Amp => "&",
            Tok::Dot => ".",
            Tok::Plus => "+",
            Tok::Bang => "!",
            Tok::Star => "*",
            Tok::Zero => "0",
            Tok::One => "1",
            Tok::Name(n) => return f.write_str(n),
        };
        f.write_str(s)
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '(' if text[i..].starts_with("(+)") => {
                i += 3;
                Tok::OPlus
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '[' => {
                i += 1;
                Tok::LBrack
            }
            ']' => {
                i += 1;
                Tok::RBrack
            }
            '^' => {
                i += 1;
                Tok::Caret
            }
            '/' if text[i..].starts_with("/\\") => {
                i += 2;
                Tok::Caret
            }
            '&' => {
                i += 1;
                Tok::Amp
            }
            '.' => {
                i += 1;
                Tok::Dot
            }
            '+' => {
                i += 1;
                Tok::Plus
            }
            '!' => {
                i += 1;
                Tok::Bang
            }
            '*' => {
                i += 1;
                Tok::Star
            }
            '_' if text[i..].starts_with("_|_") => {
                i += 3;
                Tok::Bottom
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut j = i;
                while j < bytes.len() {
                    let d = bytes[j] as char;
                    if d.is_ascii_alphanumeric() || d == '_' {
                        j += 1;
                    } else {
                        break;
                    }
                }
                let word = &text[i..j];
                i = j;
                match word {
                    "O" => Tok::Obl,
                    "F" => Tok::For,
                    "P" => Tok::Per,
                    "T" => Tok::Top,
                    "0" => Tok::Zero,
                    "1" => Tok::One,
                    "_" => Tok::Underscore,
                    _ => Tok::Name(word.to_string()),
                }
            }
            other => {
                return Err(SyntaxError::Lexical {
                    offset: i,
                    found: other,
                })
            }
        };
        toks.push((tok, start));
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn next(&mut self, expected: &str) -> Result<Tok, SyntaxError> {
        match self.toks.get(self.pos).cloned() {
            Some((t, _)) => {
                self.pos += 1;
                Ok(t)
            }
            None => Err(SyntaxError::Eof {
                offset: self.end,
                expected: expected.to_string(),
            }),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        let offset = self.offset();
        let found = self.next(&tok.to_string())?;
        if found == tok {
            Ok(())
        } else {
            Err(SyntaxError::Unexpected {
                offset,
                expected: format!("`{tok}`"),
                found: format!("`{found}`"),
            })
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn clause_err(&self, offset: usize, source: CoreError) -> SyntaxError {
        SyntaxError::Clause { offset, source }
    }

    // clause := term (('^' term)+ | '(+)' term)?
    fn clause(&mut self) -> Result<Clause, SyntaxError> {
        let offset = self.offset();
        let first = self.term()?;
        match self.peek() {
            Some(Tok::Caret) => {
                let mut parts = vec![first];
                while self.eat(&Tok::Caret) {
                    parts.push(self.term()?);
                    if self.peek() == Some(&Tok::OPlus) {
                        return Err(SyntaxError::MixedConnectives {
                            offset: self.offset(),
                        });
                    }
                }
                Ok(Clause::And(parts))
            }
            Some(Tok::OPlus) => {
                self.pos += 1;
                let right = self.term()?;
                if self.peek() == Some(&Tok::Caret) || self.peek() == Some(&Tok::OPlus) {
                    return Err(SyntaxError::MixedConnectives {
                        offset: self.offset(),
                    });
                }
                Clause::xchoice(first, right).map_err(|e| self.clause_err(offset, e))
            }
            _ => Ok(first),
        }
    }

    fn term(&mut self) -> Result<Clause, SyntaxError> {
        let offset = self.offset();
        match self.next("a clause")? {
            Tok::Top => Ok(Clause::Top),
            Tok::Bottom => Ok(Clause::Bottom),
            Tok::Obl => {
                let (action, reparation) = self.modality_body()?;
                Clause::obligation(action, reparation).map_err(|e| self.clause_err(offset, e))
            }
            Tok::For => {
                let (action, reparation) = self.modality_body()?;
                Clause::prohibition(action, reparation).map_err(|e| self.clause_err(offset, e))
            }
            Tok::Per => {
                self.expect(Tok::LParen)?;
                let action = self.action()?;
                self.expect(Tok::RParen)?;
                Clause::permission(action).map_err(|e| self.clause_err(offset, e))
            }
            Tok::LBrack => {
                let guard = self.action()?;
                self.expect(Tok::RBrack)?;
                let body = self.clause()?;
                Ok(Clause::guarded(guard, body))
            }
            Tok::LParen => {
                let inner = self.clause()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            found => Err(SyntaxError::Unexpected {
                offset,
                expected: "a clause".to_string(),
                found: format!("`{found}`"),
            }),
        }
    }

    fn modality_body(&mut self) -> Result<(ActionExpr, Option<Clause>), SyntaxError> {
        self.expect(Tok::LParen)?;
        let action = self.action()?;
        self.expect(Tok::RParen)?;
        let reparation = if self.eat(&Tok::Underscore) {
            Some(self.term()?)
        } else {
            None
        };
        Ok((action, reparation))
    }

    // Precedence, tightest first: * ! & . +
    fn action(&mut self) -> Result<ActionExpr, SyntaxError> {
        let mut left = self.action_seq()?;
        while self.eat(&Tok::Plus) {
            let right = self.action_seq()?;
            left = ActionExpr::choice(left, right);
        }
        Ok(left)
    }

    fn action_seq(&mut self) -> Result<ActionExpr, SyntaxError> {
        let mut left = self.action_conc()?;
        while self.eat(&Tok::Dot) {
            let right = self.action_conc()?;
            left = ActionExpr::sequence(left, right);
        }
        Ok(left)
    }

    fn action_conc(&mut self) -> Result<ActionExpr, SyntaxError> {
        let mut left = self.action_unary()?;
        while self.eat(&Tok::Amp) {
            let right = self.action_unary()?;
            left = ActionExpr::concurrent(left, right);
        }
        Ok(left)
    }

    fn action_unary(&mut self) -> Result<ActionExpr, SyntaxError> {
        if self.eat(&Tok::Bang) {
            let offset = self.offset();
            let inner = self.action_unary()?;
            if !negatable(&inner) {
                return Err(SyntaxError::BadNegation { offset });
            }
            return Ok(ActionExpr::Negation(Box::new(inner)));
        }
        self.action_postfix()
    }

    fn action_postfix(&mut self) -> Result<ActionExpr, SyntaxError> {
        let mut expr = self.action_primary()?;
        while self.eat(&Tok::Star) {
            expr = ActionExpr::Star(Box::new(expr));
        }
        Ok(expr)
    }

    fn action_primary(&mut self) -> Result<ActionExpr, SyntaxError> {
        let offset = self.offset();
        match self.next("an action")? {
            Tok::Zero => Ok(ActionExpr::Impossible),
            Tok::One => Ok(ActionExpr::Skip),
            Tok::Name(name) => {
                let atom = AtomicAction::new(name).map_err(|e| self.clause_err(offset, e))?;
                Ok(ActionExpr::Atom(atom))
            }
            Tok::LParen => {
                let inner = self.action()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            found => Err(SyntaxError::Unexpected {
                offset,
                expected: "an action".to_string(),
                found: format!("`{found}`"),
            }),
        }
    }
}

fn negatable(expr: &ActionExpr) -> bool {
    match expr {
        ActionExpr::Atom(_) => true,
        ActionExpr::Concurrent(a, b) => negatable(a) && negatable(b),
        _ => false,
    }
}

/// Parses a symbolic CL clause.
pub fn parse_cl(text: &str) -> Result<Clause, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let clause = p.clause()?;
    if let Some(found) = p.peek() {
        return Err(SyntaxError::Unexpected {
            offset: p.offset(),
            expected: "end of input".to_string(),
            found: format!("`{found}`"),
        });
    }
    Ok(clause)
}

/// Renders a clause in the symbolic concrete syntax; single spaces between
/// tokens, every clause self-parenthesized.
pub fn print_cl(clause: &Clause) -> String {
    let mut out = String::new();
    write_clause(clause, &mut out);
    out
}

fn write_clause(clause: &Clause, out: &mut String) {
    match clause {
        Clause::Top => out.push('T'),
        Clause::Bottom => out.push_str("_|_"),
        Clause::Obligation { action, reparation } => write_modality("O", action, reparation, out),
        Clause::Prohibition { action, reparation } => write_modality("F", action, reparation, out),
        Clause::Permission(action) => {
            out.push_str("( P ( ");
            write_action(action, 0, out);
            out.push_str(" ) )");
        }
        Clause::Guarded { guard, body } => {
            out.push_str("( [ ");
            if is_star_skip(guard) {
                out.push_str("1 *");
            } else {
                out.push_str("( ");
                write_action(guard, 0, out);
                out.push_str(" )");
            }
            out.push_str(" ] ");
            write_clause(body, out);
            out.push_str(" )");
        }
        Clause::And(parts) => {
            out.push_str("( ");
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" ^ ");
                }
                write_clause(part, out);
            }
            out.push_str(" )");
        }
        Clause::XChoice { left, right, .. } => {
            out.push_str("( ");
            write_clause(left, out);
            out.push_str(" (+) ");
            write_clause(right, out);
            out.push_str(" )");
        }
    }
}

fn is_star_skip(expr: &ActionExpr) -> bool {
    matches!(expr, ActionExpr::Star(inner) if **inner == ActionExpr::Skip)
}

fn write_modality(
    symbol: &str,
    action: &ActionExpr,
    reparation: &Option<Box<Clause>>,
    out: &mut String,
) {
    out.push_str("( ");
    out.push_str(symbol);
    out.push_str(" ( ");
    write_action(action, 0, out);
    out.push_str(" )");
    if let Some(rep) = reparation {
        out.push_str(" _ ");
        write_clause(rep, out);
    }
    out.push_str(" )");
}

// Binding strength for minimal parenthesization: + < . < & < ! < * and atoms.
fn write_action(expr: &ActionExpr, min_level: u8, out: &mut String) {
    let level = match expr {
        ActionExpr::Choice(..) => 1,
        ActionExpr::Sequence(..) => 2,
        ActionExpr::Concurrent(..) => 3,
        ActionExpr::Negation(..) => 4,
        _ => 5,
    };
    let parens = level < min_level;
    if parens {
        out.push_str("( ");
    }
    match expr {
        ActionExpr::Impossible => out.push('0'),
        ActionExpr::Skip => out.push('1'),
        ActionExpr::Atom(a) => out.push_str(a.name()),
        ActionExpr::Choice(a, b) => {
            write_action(a, 1, out);
            out.push_str(" + ");
            write_action(b, 2, out);
        }
        ActionExpr::Sequence(a, b) => {
            write_action(a, 2, out);
            out.push_str(" . ");
            write_action(b, 3, out);
        }
        ActionExpr::Concurrent(a, b) => {
            write_action(a, 3, out);
            out.push_str(" & ");
            write_action(b, 4, out);
        }
        ActionExpr::Negation(a) => {
            out.push_str("! ");
            write_action(a, 4, out);
        }
        ActionExpr::Star(a) => {
            write_action(a, 5, out);
            out.push_str(" *");
        }
    }
    if parens {
        out.push_str(" )");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(name: &str) -> ActionExpr {
        ActionExpr::atom(name).unwrap()
    }

    #[test]
    fn smallest_obligation() {
        let c = parse_cl("( O ( a ) )").unwrap();
        assert_eq!(c, Clause::obligation(act("a"), None).unwrap());
        assert_eq!(print_cl(&c), "( O ( a ) )");
    }

    #[test]
    fn case_study_item_one_shape() {
        let text = "( [ ( two_hours_before_the_flight_leaves ) ] ( O ( open_the_check_in_desk & request_the_passenger_manifest ) _ ( O ( pay_a_fine ) ) ) )";
        let c = parse_cl(text).unwrap();
        let expected = Clause::guarded(
            act("two_hours_before_the_flight_leaves"),
            Clause::obligation(
                ActionExpr::concurrent(
                    act("open_the_check_in_desk"),
                    act("request_the_passenger_manifest"),
                ),
                Some(Clause::obligation(act("pay_a_fine"), None).unwrap()),
            )
            .unwrap(),
        );
        assert_eq!(c, expected);
        assert_eq!(print_cl(&c), text);
    }

    #[test]
    fn case_study_item_nine_shape() {
        let text = "( [ 1 * ] ( [ ( close_the_check_in_desk ) ] ( F ( issue_the_boarding_pass + open_the_check_in_desk ) _ ( O ( pay_a_fine ) ) ) ) )";
        let c = parse_cl(text).unwrap();
        let expected = Clause::always(Clause::guarded(
            act("close_the_check_in_desk"),
            Clause::prohibition(
                ActionExpr::choice(act("issue_the_boarding_pass"), act("open_the_check_in_desk")),
                Some(Clause::obligation(act("pay_a_fine"), None).unwrap()),
            )
            .unwrap(),
        ));
        assert_eq!(c, expected);
        assert_eq!(print_cl(&c), text);
    }

    #[test]
    fn top_bottom_and_always_tokens() {
        assert_eq!(parse_cl("T").unwrap(), Clause::Top);
        assert_eq!(parse_cl("_|_").unwrap(), Clause::Bottom);
        let c = Clause::always(Clause::Top);
        assert_eq!(print_cl(&c), "( [ 1 * ] T )");
        assert_eq!(parse_cl("( [ 1 * ] T )").unwrap(), c);
    }

    #[test]
    fn conjunction_is_flat_and_nary() {
        let c = parse_cl("( O ( a ) ^ ( O ( b ) ) ^ F ( c ) )").unwrap();
        match c {
            Clause::And(parts) => assert_eq!(parts.len(), 3),
            other => panic!("expected conjunction, got {other:?}"),
        }
    }

    #[test]
    fn alternate_conjunction_token() {
        assert_eq!(
            parse_cl(r"( O ( a ) /\ O ( b ) )").unwrap(),
            parse_cl("( O ( a ) ^ O ( b ) )").unwrap()
        );
    }

    #[test]
    fn xchoice_roundtrip() {
        let c = parse_cl("( O ( a ) (+) O ( b ) )").unwrap();
        assert_eq!(print_cl(&c), "( ( O ( a ) ) (+) ( O ( b ) ) )");
        assert_eq!(parse_cl(&print_cl(&c)).unwrap(), c);
    }

    #[test]
    fn action_precedence() {
        // * binds tighter than !, & than ., . than +
        let c = parse_cl("( O ( a & b . c + d ) )").unwrap();
        let expected = Clause::obligation(
            ActionExpr::choice(
                ActionExpr::sequence(ActionExpr::concurrent(act("a"), act("b")), act("c")),
                act("d"),
            ),
            None,
        )
        .unwrap();
        assert_eq!(c, expected);
    }

    #[test]
    fn negation_parses_and_reprints() {
        let c = parse_cl("( P ( ! a ) )").unwrap();
        assert_eq!(print_cl(&c), "( P ( ! a ) )");
        assert!(matches!(
            parse_cl("( P ( ! ( a + b ) ) )"),
            Err(SyntaxError::BadNegation { .. })
        ));
    }

    #[test]
    fn star_under_modality_is_rejected() {
        let err = parse_cl("( O ( a * ) )").unwrap_err();
        assert!(matches!(
            err,
            SyntaxError::Clause {
                source: CoreError::StarUnderModality,
                ..
            }
        ));
    }

    #[test]
    fn lexical_and_syntax_errors_carry_positions() {
        assert!(matches!(
            parse_cl("( O ( a@ ) )"),
            Err(SyntaxError::Lexical { found: '@', .. })
        ));
        assert!(matches!(parse_cl("( O ( a )"), Err(SyntaxError::Eof { .. })));
        assert!(matches!(parse_cl(""), Err(SyntaxError::Eof { .. })));
    }

    #[test]
    fn mixing_caret_and_xchoice_needs_parens() {
        assert!(matches!(
            parse_cl("( O ( a ) ^ O ( b ) (+) O ( c ) )"),
            Err(SyntaxError::MixedConnectives { .. })
        ));
    }
}
