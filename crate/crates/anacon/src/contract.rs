//! The three-part contract input file: `DICTIONARY`, `CONTRACT` (restricted
//! English, one clause per blank-line-separated block) and `CONTRADICTION`.
//! `%` starts a comment line; dictionary lines are `name : description`,
//! contradiction lines `name # name`.

use crate::ast::{AtomicAction, Clause, MutexRelation};
use crate::english::{linearize_re, parse_re, EnglishError};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContractError {
    #[error("line {line}: expected section header `{expected}`")]
    MissingHeader { line: usize, expected: &'static str },
    #[error("line {line}: malformed dictionary line (expected `name : description`)")]
    BadDictionaryLine { line: usize },
    #[error("line {line}: malformed contradiction line (expected `name # name`)")]
    BadContradictionLine { line: usize },
    #[error("clause starting at line {line}: {source}")]
    BadClause { line: usize, source: EnglishError },
}

/// One dictionary entry, kept raw so that validation can report problems
/// instead of the parser rejecting the file outright.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictionaryEntry {
    pub name: String,
    pub description: String,
    pub line: usize,
}

/// A raw contradiction pair with its source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContradictionEntry {
    pub left: String,
    pub right: String,
    pub line: usize,
}

/// A parsed contract file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDocument {
    pub dictionary: Vec<DictionaryEntry>,
    pub clauses: Vec<Clause>,
    /// Line range (first, last) of each clause block, parallel to `clauses`.
    pub clause_spans: Vec<(usize, usize)>,
    pub contradictions: Vec<ContradictionEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    UndeclaredActionInContract,
    UndeclaredActionInContradiction,
    DuplicateDictionaryEntry,
    EmptyString,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagnosticKind::UndeclaredActionInContract => "UndeclaredActionInContract",
            DiagnosticKind::UndeclaredActionInContradiction => "UndeclaredActionInContradiction",
            DiagnosticKind::DuplicateDictionaryEntry => "DuplicateDictionaryEntry",
            DiagnosticKind::EmptyString => "EmptyString",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub action: String,
    pub line: usize,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {:?}", self.line, self.kind, self.action)
    }
}

/// Splits the file into its three sections and parses each; problems beyond
/// structure are left to [`validate`].
pub fn parse_contract_file(text: &str) -> Result<ContractDocument, ContractError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut idx = 0;
    let skip_blank = |idx: &mut usize| {
        while *idx < lines.len() {
            let l = lines[*idx].trim();
            if l.is_empty() || l.starts_with('%') {
                *idx += 1;
            } else {
                break;
            }
        }
    };

    skip_blank(&mut idx);
    if idx >= lines.len() || lines[idx].trim() != "DICTIONARY" {
        return Err(ContractError::MissingHeader {
            line: idx + 1,
            expected: "DICTIONARY",
        });
    }
    idx += 1;

    let mut dictionary = Vec::new();
    while idx < lines.len() && lines[idx].trim() != "CONTRACT" {
        let line = lines[idx].trim();
        if line.is_empty() || line.starts_with('%') {
            idx += 1;
            continue;
        }
        if line == "CONTRADICTION" {
            return Err(ContractError::MissingHeader {
                line: idx + 1,
                expected: "CONTRACT",
            });
        }
        let Some((name, description)) = line.split_once(':') else {
            return Err(ContractError::BadDictionaryLine { line: idx + 1 });
        };
        dictionary.push(DictionaryEntry {
            name: name.trim().to_string(),
            description: description.trim().to_string(),
            line: idx + 1,
        });
        idx += 1;
    }
    if idx >= lines.len() {
        return Err(ContractError::MissingHeader {
            line: idx + 1,
            expected: "CONTRACT",
        });
    }
    idx += 1; // CONTRACT header

    // Clause blocks separated by blank lines.
    let mut blocks: Vec<(String, usize, usize)> = Vec::new();
    let mut current: Option<(String, usize, usize)> = None;
    while idx < lines.len() && lines[idx].trim() != "CONTRADICTION" {
        let raw = lines[idx];
        let line = raw.trim();
        if line.starts_with('%') {
            idx += 1;
            continue;
        }
        if line.is_empty() {
            if let Some(block) = current.take() {
                blocks.push(block);
            }
        } else {
            match &mut current {
                Some((text, _, last)) => {
                    text.push(' ');
                    text.push_str(line);
                    *last = idx + 1;
                }
                None => current = Some((line.to_string(), idx + 1, idx + 1)),
            }
        }
        idx += 1;
    }
    if let Some(block) = current.take() {
        blocks.push(block);
    }
    if idx >= lines.len() {
        return Err(ContractError::MissingHeader {
            line: idx + 1,
            expected: "CONTRADICTION",
        });
    }
    idx += 1; // CONTRADICTION header

    let mut clauses = Vec::new();
    let mut clause_spans = Vec::new();
    for (text, first, last) in blocks {
        let clause = parse_re(&text).map_err(|source| ContractError::BadClause {
            line: first,
            source,
        })?;
        clauses.push(clause);
        clause_spans.push((first, last));
    }

    let mut contradictions = Vec::new();
    while idx < lines.len() {
        let line = lines[idx].trim();
        if line.is_empty() || line.starts_with('%') {
            idx += 1;
            continue;
        }
        let Some((left, right)) = line.split_once('#') else {
            return Err(ContractError::BadContradictionLine { line: idx + 1 });
        };
        contradictions.push(ContradictionEntry {
            left: left.trim().to_string(),
            right: right.trim().to_string(),
            line: idx + 1,
        });
        idx += 1;
    }

    Ok(ContractDocument {
        dictionary,
        clauses,
        clause_spans,
        contradictions,
    })
}

/// Collects every consistency problem; an empty list means the document is
/// ready for analysis.
pub fn validate(doc: &ContractDocument) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();
    let mut declared: BTreeMap<&str, usize> = BTreeMap::new();

    for entry in &doc.dictionary {
        if entry.name.is_empty() {
            diagnostics.push(Diagnostic {
                kind: DiagnosticKind::EmptyString,
                action: String::new(),
                line: entry.line,
            });
            continue;
        }
        if entry.description.is_empty() {
            diagnostics.push(Diagnostic {
                kind: DiagnosticKind::EmptyString,
                action: entry.name.clone(),
                line: entry.line,
            });
        }
        if declared.contains_key(entry.name.as_str()) {
            diagnostics.push(Diagnostic {
                kind: DiagnosticKind::DuplicateDictionaryEntry,
                action: entry.name.clone(),
                line: entry.line,
            });
        } else {
            declared.insert(&entry.name, entry.line);
        }
    }

    for (clause, span) in doc.clauses.iter().zip(&doc.clause_spans) {
        let mut missing: BTreeSet<String> = BTreeSet::new();
        for atom in clause.atoms() {
            if !declared.contains_key(atom.name()) {
                missing.insert(atom.name().to_string());
            }
        }
        for name in missing {
            diagnostics.push(Diagnostic {
                kind: DiagnosticKind::UndeclaredActionInContract,
                action: name,
                line: span.0,
            });
        }
    }

    for entry in &doc.contradictions {
        for name in [&entry.left, &entry.right] {
            if name.is_empty() {
                diagnostics.push(Diagnostic {
                    kind: DiagnosticKind::EmptyString,
                    action: String::new(),
                    line: entry.line,
                });
            } else if !declared.contains_key(name.as_str()) {
                diagnostics.push(Diagnostic {
                    kind: DiagnosticKind::UndeclaredActionInContradiction,
                    action: name.clone(),
                    line: entry.line,
                });
            }
        }
    }

    diagnostics
}

impl ContractDocument {
    /// The declared alphabet, in dictionary order. Call only on validated
    /// documents (names must be well-formed atoms).
    pub fn alphabet(&self) -> Vec<AtomicAction> {
        self.dictionary
            .iter()
            .filter_map(|e| AtomicAction::new(e.name.clone()).ok())
            .collect()
    }

    pub fn mutex(&self) -> MutexRelation {
        let mut mutex = MutexRelation::new();
        for entry in &self.contradictions {
            if let (Ok(a), Ok(b)) = (
                AtomicAction::new(entry.left.clone()),
                AtomicAction::new(entry.right.clone()),
            ) {
                mutex.insert(a, b);
            }
        }
        mutex
    }

    /// Re-serializes the document in the contract-file format.
    pub fn to_text(&self) -> Result<String, EnglishError> {
        let mut out = String::from("DICTIONARY\n");
        for entry in &self.dictionary {
            out.push_str(&format!("{} : {}\n", entry.name, entry.description));
        }
        out.push_str("\nCONTRACT\n");
        for clause in &self.clauses {
            out.push('\n');
            out.push_str(&linearize_re(clause)?);
            out.push('\n');
        }
        out.push_str("\nCONTRADICTION\n");
        for entry in &self.contradictions {
            out.push_str(&format!("{} # {}\n", entry.left, entry.right));
        }
        Ok(out)
    }
}
