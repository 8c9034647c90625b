//! First-step decomposition and trace enumeration for star-free action
//! expressions, plus step satisfaction and mutual exclusion.

use crate::ast::{ActionExpr, ActionStep, AtomicAction, CoreError, MutexRelation};
use std::collections::BTreeSet;

/// The demand one time step must meet: a set of atoms that have to be
/// performed together, or a wildcard (skip) matched by any step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FirstStep {
    pub atoms: BTreeSet<AtomicAction>,
    pub wildcard: bool,
}

impl FirstStep {
    fn atom(a: AtomicAction) -> Self {
        FirstStep {
            atoms: BTreeSet::from([a]),
            wildcard: false,
        }
    }

    fn skip() -> Self {
        FirstStep {
            atoms: BTreeSet::new(),
            wildcard: true,
        }
    }

    fn merge(&self, other: &FirstStep) -> Self {
        FirstStep {
            atoms: self.atoms.union(&other.atoms).cloned().collect(),
            wildcard: self.wildcard && other.wildcard,
        }
    }
}

/// What remains of an action expression after one first step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Residual {
    Done,
    Rest(ActionExpr),
}

fn reject_star_and_negation(alpha: &ActionExpr) -> Result<(), CoreError> {
    if alpha.contains_star() {
        return Err(CoreError::StarUnderModality);
    }
    if alpha.contains_negation() {
        return Err(CoreError::NegationUnsupported);
    }
    Ok(())
}

/// Every way the first time step of `alpha` can be performed, paired with
/// what is left to perform afterwards.
pub fn first_steps(alpha: &ActionExpr) -> Result<Vec<(FirstStep, Residual)>, CoreError> {
    reject_star_and_negation(alpha)?;
    let mut out = decompose(alpha);
    out.sort();
    out.dedup();
    Ok(out)
}

fn decompose(alpha: &ActionExpr) -> Vec<(FirstStep, Residual)> {
    match alpha {
        ActionExpr::Impossible => Vec::new(),
        ActionExpr::Skip => vec![(FirstStep::skip(), Residual::Done)],
        ActionExpr::Atom(a) => vec![(FirstStep::atom(a.clone()), Residual::Done)],
        ActionExpr::Choice(a, b) => {
            let mut out = decompose(a);
            out.extend(decompose(b));
            out
        }
        ActionExpr::Sequence(a, b) => decompose(a)
            .into_iter()
            .map(|(step, res)| {
                let rest = match res {
                    Residual::Done => (**b).clone(),
                    Residual::Rest(ra) => ActionExpr::sequence(ra, (**b).clone()),
                };
                (step, Residual::Rest(rest))
            })
            .collect(),
        ActionExpr::Concurrent(a, b) => {
            let left = decompose(a);
            let right = decompose(b);
            let mut out = Vec::new();
            for (sa, ra) in &left {
                for (sb, rb) in &right {
                    let res = match (ra, rb) {
                        (Residual::Done, Residual::Done) => Residual::Done,
                        (Residual::Done, Residual::Rest(r)) => Residual::Rest(r.clone()),
                        (Residual::Rest(r), Residual::Done) => Residual::Rest(r.clone()),
                        (Residual::Rest(x), Residual::Rest(y)) => {
                            Residual::Rest(ActionExpr::concurrent(x.clone(), y.clone()))
                        }
                    };
                    out.push((sa.merge(sb), res));
                }
            }
            out
        }
        ActionExpr::Negation(_) | ActionExpr::Star(_) => unreachable!("rejected upfront"),
    }
}

/// The finite set of complete traces of a star-free action expression.
pub fn traces(alpha: &ActionExpr) -> Result<BTreeSet<Vec<FirstStep>>, CoreError> {
    reject_star_and_negation(alpha)?;
    Ok(trace_set(alpha))
}

fn trace_set(alpha: &ActionExpr) -> BTreeSet<Vec<FirstStep>> {
    match alpha {
        ActionExpr::Impossible => BTreeSet::new(),
        ActionExpr::Skip => BTreeSet::from([vec![FirstStep::skip()]]),
        ActionExpr::Atom(a) => BTreeSet::from([vec![FirstStep::atom(a.clone())]]),
        ActionExpr::Choice(a, b) => {
            let mut out = trace_set(a);
            out.extend(trace_set(b));
            out
        }
        ActionExpr::Sequence(a, b) => {
            let left = trace_set(a);
            let right = trace_set(b);
            let mut out = BTreeSet::new();
            for l in &left {
                for r in &right {
                    let mut t = l.clone();
                    t.extend(r.iter().cloned());
                    out.insert(t);
                }
            }
            out
        }
        ActionExpr::Concurrent(a, b) => {
            let left = trace_set(a);
            let right = trace_set(b);
            let mut out = BTreeSet::new();
            for l in &left {
                for r in &right {
                    out.insert(zip_union(l, r));
                }
            }
            out
        }
        ActionExpr::Negation(_) | ActionExpr::Star(_) => unreachable!("rejected upfront"),
    }
}

// Pointwise union of two traces; the longer tail is kept as-is.
fn zip_union(a: &[FirstStep], b: &[FirstStep]) -> Vec<FirstStep> {
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    for i in 0..a.len().max(b.len()) {
        out.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.merge(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        });
    }
    out
}

/// True iff `step` performs everything `required` demands. A wildcard
/// demand (skip) is met by any step; otherwise the required atoms must be
/// a subset of what the step performs.
pub fn step_satisfies(step: &ActionStep, required: &BTreeSet<AtomicAction>, wildcard: bool) -> bool {
    wildcard || required.is_subset(step.atoms())
}

/// Convenience wrapper over [`step_satisfies`] for a [`FirstStep`] demand.
pub fn step_meets(step: &ActionStep, demand: &FirstStep) -> bool {
    step_satisfies(step, &demand.atoms, demand.wildcard)
}

/// True iff some atom of `s1` and some atom of `s2` are declared
/// contradictory.
pub fn mutually_exclusive(
    s1: &BTreeSet<AtomicAction>,
    s2: &BTreeSet<AtomicAction>,
    mutex: &MutexRelation,
) -> bool {
    s1.iter().any(|a| s2.iter().any(|b| mutex.contains(a, b)))
}
