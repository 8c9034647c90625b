//! Abstract syntax of the contract language: clauses, the action algebra
//! and the supporting relations (concurrent steps, mutual exclusion).

use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Words that may not be used as atomic action names because they collide
/// with keywords of one of the two concrete syntaxes.
pub const RESERVED_WORDS: &[&str] = &[
    "O", "F", "P", "T", "If", "if", "then", "Always", "After", "When", "Before", "and", "or",
    "not", "xor", "It", "is", "mandatory", "prohibited", "permitted", "to", "0", "1",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("empty action name")]
    EmptyActionName,
    #[error("invalid character {1:?} in action name {0:?}")]
    InvalidActionChar(String, char),
    #[error("action name {0:?} contains the reserved infix marker {1:?}")]
    ReservedInfix(String, &'static str),
    #[error("action name {0:?} is a reserved word")]
    ReservedWord(String),
    #[error("Kleene star is not allowed under a deontic modality")]
    StarUnderModality,
    #[error("negation is not supported in this position")]
    NegationUnsupported,
    #[error("exclusive choice requires two obligation clauses or two permission clauses")]
    MixedExclusiveChoice,
}

/// An atomic action name: letters, digits and underscores, with the
/// concrete-syntax keywords and the `_and_`/`_or_` markers excluded.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomicAction(String);

impl AtomicAction {
    pub fn new(name: impl Into<String>) -> Result<Self, CoreError> {
        let name = name.into();
        if name.is_empty() {
            return Err(CoreError::EmptyActionName);
        }
        if let Some(c) = name.chars().find(|c| !c.is_ascii_alphanumeric() && *c != '_') {
            return Err(CoreError::InvalidActionChar(name.clone(), c));
        }
        for marker in ["_and_", "_or_"] {
            if name.contains(marker) {
                let m: &'static str = if marker == "_and_" { "_and_" } else { "_or_" };
                return Err(CoreError::ReservedInfix(name, m));
            }
        }
        if RESERVED_WORDS.contains(&name.as_str()) {
            return Err(CoreError::ReservedWord(name));
        }
        Ok(AtomicAction(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AtomicAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Compound action expressions: `0`, `1`, atoms, `&`, `.`, `+`, `!`, `*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionExpr {
    Impossible,
    Skip,
    Atom(AtomicAction),
    Concurrent(Box<ActionExpr>, Box<ActionExpr>),
    Sequence(Box<ActionExpr>, Box<ActionExpr>),
    Choice(Box<ActionExpr>, Box<ActionExpr>),
    Negation(Box<ActionExpr>),
    Star(Box<ActionExpr>),
}

impl ActionExpr {
    pub fn atom(name: &str) -> Result<Self, CoreError> {
        Ok(ActionExpr::Atom(AtomicAction::new(name)?))
    }

    pub fn concurrent(a: ActionExpr, b: ActionExpr) -> Self {
        ActionExpr::Concurrent(Box::new(a), Box::new(b))
    }

    pub fn sequence(a: ActionExpr, b: ActionExpr) -> Self {
        ActionExpr::Sequence(Box::new(a), Box::new(b))
    }

    pub fn choice(a: ActionExpr, b: ActionExpr) -> Self {
        ActionExpr::Choice(Box::new(a), Box::new(b))
    }

    pub fn contains_star(&self) -> bool {
        match self {
            ActionExpr::Impossible | ActionExpr::Skip | ActionExpr::Atom(_) => false,
            ActionExpr::Concurrent(a, b)
            | ActionExpr::Sequence(a, b)
            | ActionExpr::Choice(a, b) => a.contains_star() || b.contains_star(),
            ActionExpr::Negation(a) => a.contains_star(),
            ActionExpr::Star(_) => true,
        }
    }

    pub fn contains_negation(&self) -> bool {
        match self {
            ActionExpr::Impossible | ActionExpr::Skip | ActionExpr::Atom(_) => false,
            ActionExpr::Concurrent(a, b)
            | ActionExpr::Sequence(a, b)
            | ActionExpr::Choice(a, b) => a.contains_negation() || b.contains_negation(),
            ActionExpr::Negation(_) => true,
            ActionExpr::Star(a) => a.contains_negation(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<AtomicAction> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AtomicAction>) {
        match self {
            ActionExpr::Impossible | ActionExpr::Skip => {}
            ActionExpr::Atom(a) => {
                out.insert(a.clone());
            }
            ActionExpr::Concurrent(a, b)
            | ActionExpr::Sequence(a, b)
            | ActionExpr::Choice(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            ActionExpr::Negation(a) | ActionExpr::Star(a) => a.collect_atoms(out),
        }
    }
}

/// Which deontic family an exclusive choice ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum XChoiceKind {
    Obligation,
    Permission,
}

/// A contract clause.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    Top,
    Bottom,
    Obligation {
        action: ActionExpr,
        reparation: Option<Box<Clause>>,
    },
    Prohibition {
        action: ActionExpr,
        reparation: Option<Box<Clause>>,
    },
    Permission(ActionExpr),
    Guarded {
        guard: ActionExpr,
        body: Box<Clause>,
    },
    And(Vec<Clause>),
    XChoice {
        left: Box<Clause>,
        right: Box<Clause>,
        kind: XChoiceKind,
    },
}

impl Clause {
    /// `O_C(alpha)`; rejects a star inside the obliged action.
    pub fn obligation(action: ActionExpr, reparation: Option<Clause>) -> Result<Self, CoreError> {
        if action.contains_star() {
            return Err(CoreError::StarUnderModality);
        }
        Ok(Clause::Obligation {
            action,
            reparation: reparation.map(Box::new),
        })
    }

    /// `F_C(alpha)`; rejects a star inside the forbidden action.
    pub fn prohibition(action: ActionExpr, reparation: Option<Clause>) -> Result<Self, CoreError> {
        if action.contains_star() {
            return Err(CoreError::StarUnderModality);
        }
        Ok(Clause::Prohibition {
            action,
            reparation: reparation.map(Box::new),
        })
    }

    /// `P(alpha)`; rejects a star inside the permitted action.
    pub fn permission(action: ActionExpr) -> Result<Self, CoreError> {
        if action.contains_star() {
            return Err(CoreError::StarUnderModality);
        }
        Ok(Clause::Permission(action))
    }

    /// `[beta]C`; stars are allowed in the guard.
    pub fn guarded(guard: ActionExpr, body: Clause) -> Self {
        Clause::Guarded {
            guard,
            body: Box::new(body),
        }
    }

    /// `[1*]C`, the always form produced by the temporal keywords.
    pub fn always(body: Clause) -> Self {
        Clause::guarded(ActionExpr::Star(Box::new(ActionExpr::Skip)), body)
    }

    /// `C (+) C`; both branches must belong to the same deontic family.
    pub fn xchoice(left: Clause, right: Clause) -> Result<Self, CoreError> {
        let kind = match (left.xchoice_family(), right.xchoice_family()) {
            (Some(a), Some(b)) if a == b => a,
            _ => return Err(CoreError::MixedExclusiveChoice),
        };
        Ok(Clause::XChoice {
            left: Box::new(left),
            right: Box::new(right),
            kind,
        })
    }

    fn xchoice_family(&self) -> Option<XChoiceKind> {
        match self {
            Clause::Obligation { .. } => Some(XChoiceKind::Obligation),
            Clause::Permission(_) => Some(XChoiceKind::Permission),
            Clause::XChoice { kind, .. } => Some(*kind),
            _ => None,
        }
    }

    pub fn atoms(&self) -> BTreeSet<AtomicAction> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AtomicAction>) {
        match self {
            Clause::Top | Clause::Bottom => {}
            Clause::Obligation { action, reparation }
            | Clause::Prohibition { action, reparation } => {
                action.collect_atoms(out);
                if let Some(r) = reparation {
                    r.collect_atoms(out);
                }
            }
            Clause::Permission(action) => action.collect_atoms(out),
            Clause::Guarded { guard, body } => {
                guard.collect_atoms(out);
                body.collect_atoms(out);
            }
            Clause::And(parts) => {
                for p in parts {
                    p.collect_atoms(out);
                }
            }
            Clause::XChoice { left, right, .. } => {
                left.collect_atoms(out);
                right.collect_atoms(out);
            }
        }
    }
}

/// One concurrent time step: the non-empty set of atoms performed together.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionStep {
    atoms: BTreeSet<AtomicAction>,
}

impl ActionStep {
    pub fn new(atoms: BTreeSet<AtomicAction>) -> Option<Self> {
        if atoms.is_empty() {
            None
        } else {
            Some(ActionStep { atoms })
        }
    }

    pub fn atoms(&self) -> &BTreeSet<AtomicAction> {
        &self.atoms
    }
}

impl fmt::Display for ActionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.atoms.iter().map(|a| a.name()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// Unordered pairs of atoms declared unable to co-occur in one step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MutexRelation {
    pairs: BTreeSet<(AtomicAction, AtomicAction)>,
}

impl MutexRelation {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an unordered pair; a pair of an action with itself is ignored.
    pub fn insert(&mut self, a: AtomicAction, b: AtomicAction) {
        if a == b {
            return;
        }
        let pair = if a < b { (a, b) } else { (b, a) };
        self.pairs.insert(pair);
    }

    pub fn contains(&self, a: &AtomicAction, b: &AtomicAction) -> bool {
        let pair = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        self.pairs.contains(&pair)
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(AtomicAction, AtomicAction)> {
        self.pairs.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// True if some step set would be internally contradictory.
    pub fn violates(&self, atoms: &BTreeSet<AtomicAction>) -> bool {
        self.pairs
            .iter()
            .any(|(a, b)| atoms.contains(a) && atoms.contains(b))
    }
}

/// Flattens conjunctions, drops `T` from them and collapses any conjunction
/// containing `_|_`. Idempotent.
pub fn normalize(clause: &Clause) -> Clause {
    match clause {
        Clause::Top => Clause::Top,
        Clause::Bottom => Clause::Bottom,
        Clause::Obligation { action, reparation } => Clause::Obligation {
            action: action.clone(),
            reparation: reparation.as_ref().map(|r| Box::new(normalize(r))),
        },
        Clause::Prohibition { action, reparation } => Clause::Prohibition {
            action: action.clone(),
            reparation: reparation.as_ref().map(|r| Box::new(normalize(r))),
        },
        Clause::Permission(action) => Clause::Permission(action.clone()),
        Clause::Guarded { guard, body } => Clause::Guarded {
            guard: guard.clone(),
            body: Box::new(normalize(body)),
        },
        Clause::And(parts) => {
            let mut flat = Vec::new();
            for part in parts {
                match normalize(part) {
                    Clause::Top => {}
                    Clause::Bottom => return Clause::Bottom,
                    Clause::And(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            let mut seen = BTreeSet::new();
            flat.retain(|c| seen.insert(c.clone()));
            match flat.len() {
                0 => Clause::Top,
                1 => flat.pop().unwrap(),
                _ => Clause::And(flat),
            }
        }
        Clause::XChoice { left, right, kind } => Clause::XChoice {
            left: Box::new(normalize(left)),
            right: Box::new(normalize(right)),
            kind: *kind,
        },
    }
}
