//! Explicit-state conflict detection: residuate the active clauses over
//! concurrent action steps, search breadth-first for a state holding one of
//! the four deontic clashes, and package the witness trace as a clause.

use crate::algebra::{first_steps, mutually_exclusive, step_meets, FirstStep, Residual};
use crate::ast::{normalize, ActionExpr, ActionStep, AtomicAction, Clause, MutexRelation};
use crate::contract::ContractDocument;
use crate::english::{linearize_re, EnglishError};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use thiserror::Error;

/// Hard cap on the step alphabet; every state enumerates all of its
/// mutex-free subsets, so anything larger is hopeless anyway.
pub const MAX_ALPHABET: usize = 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("guards with a Kleene star other than `1 *` are not analyzable")]
    UnsupportedStarGuard,
    #[error("negated actions are not analyzable")]
    NegationUnsupported,
    #[error("a step containing a contradictory pair cannot be performed")]
    MutexStep,
    #[error("alphabet of {0} actions exceeds the supported maximum of {MAX_ALPHABET}")]
    AlphabetTooLarge(usize),
}

/// A detected clash: its kind plus the indices of the two offending
/// source clauses.
pub type Clash = (ConflictKind, (usize, usize));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConflictKind {
    ObligationVsProhibition,
    PermissionVsProhibition,
    ObligationVsObligationMutex,
    PermissionVsObligationMutex,
}

impl fmt::Display for ConflictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConflictKind::ObligationVsProhibition => "ObligationVsProhibition",
            ConflictKind::PermissionVsProhibition => "PermissionVsProhibition",
            ConflictKind::ObligationVsObligationMutex => "ObligationVsObligationMutex",
            ConflictKind::PermissionVsObligationMutex => "PermissionVsObligationMutex",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XBranch {
    Left,
    Right,
}

impl fmt::Display for XBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            XBranch::Left => "left",
            XBranch::Right => "right",
        })
    }
}

/// A set of active normalized clauses, each tagged with the index of the
/// contract clause it descends from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisState {
    active: Vec<(Clause, usize)>,
    pub depth: usize,
}

impl AnalysisState {
    pub fn active(&self) -> &[(Clause, usize)] {
        &self.active
    }

    fn key(&self) -> BTreeSet<Clause> {
        self.active.iter().map(|(c, _)| c.clone()).collect()
    }

    fn is_terminal(&self) -> bool {
        self.active.iter().all(|(c, _)| *c == Clause::Bottom)
    }

    pub fn is_violating(&self) -> bool {
        self.active.iter().any(|(c, _)| *c == Clause::Bottom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictReport {
    pub kind: ConflictKind,
    /// The two clashing deontic statements, as active in the state.
    pub clash: (Clause, Clause),
    /// Contract clause indices the clashing statements descend from.
    pub clash_origins: (usize, usize),
    pub trace: Vec<ActionStep>,
    /// The clash and its witness trace packaged as one clause.
    pub as_formula: Clause,
    /// Exclusive-choice branches taken on the way to the conflict.
    pub branches: Vec<XBranch>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    States(usize),
    Depth(usize),
    Alphabet(usize),
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::States(n) => write!(f, "state bound of {n} states"),
            Bound::Depth(n) => write!(f, "depth bound of {n} steps"),
            Bound::Alphabet(n) => write!(f, "alphabet of {n} actions"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Conflict(Box<ConflictReport>),
    NoConflict,
    Exceeded(Bound),
}

/// The explored labeled transition system, recorded on request.
#[derive(Debug, Clone)]
pub struct Automaton {
    pub states: Vec<Vec<Clause>>,
    pub initial: Vec<usize>,
    pub transitions: Vec<(usize, ActionStep, usize)>,
    pub alphabet: Vec<AtomicAction>,
}

#[derive(Debug, Clone, Copy)]
pub struct ExploreConfig {
    pub max_states: usize,
    pub max_depth: usize,
    pub record_automaton: bool,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig {
            max_states: 100_000,
            max_depth: 10,
            record_automaton: false,
        }
    }
}

#[derive(Debug)]
pub struct Exploration {
    pub outcome: Outcome,
    pub automaton: Option<Automaton>,
    pub states_visited: usize,
}

// ---------------------------------------------------------------------------
// State expansion

fn reject_unanalyzable(action: &ActionExpr) -> Result<(), EngineError> {
    if action.contains_negation() {
        return Err(EngineError::NegationUnsupported);
    }
    Ok(())
}

fn is_star_skip(expr: &ActionExpr) -> bool {
    matches!(expr, ActionExpr::Star(inner) if **inner == ActionExpr::Skip)
}

type Items = Vec<(Clause, usize)>;

/// Flattens a clause list into analysis states: conjunctions are spread,
/// `T` dropped, `[1*]C` boxes activate their body alongside themselves, and
/// exclusive choices split the state (the returned branch path records the
/// sides taken).
fn expand(pending: Items) -> Result<Vec<(Items, Vec<XBranch>)>, EngineError> {
    let mut out = Vec::new();
    expand_rec(Vec::new(), pending, Vec::new(), &mut out)?;
    Ok(out)
}

fn expand_rec(
    mut done: Items,
    mut pending: Items,
    branches: Vec<XBranch>,
    out: &mut Vec<(Items, Vec<XBranch>)>,
) -> Result<(), EngineError> {
    while let Some((clause, origin)) = pending.first().cloned() {
        pending.remove(0);
        match normalize(&clause) {
            Clause::Top => {}
            Clause::And(parts) => {
                for (i, part) in parts.into_iter().enumerate() {
                    pending.insert(i, (part, origin));
                }
            }
            Clause::XChoice { left, right, .. } => {
                for (side, branch) in [(left, XBranch::Left), (right, XBranch::Right)] {
                    let mut sub_pending = vec![((*side).clone(), origin)];
                    sub_pending.extend(pending.iter().cloned());
                    let mut sub_branches = branches.clone();
                    sub_branches.push(branch);
                    expand_rec(done.clone(), sub_pending, sub_branches, out)?;
                }
                return Ok(());
            }
            Clause::Guarded { guard, body } if is_star_skip(&guard) => {
                let boxed = Clause::Guarded {
                    guard,
                    body: body.clone(),
                };
                if !done.iter().any(|(c, _)| *c == boxed) {
                    done.push((boxed, origin));
                }
                pending.insert(0, ((*body).clone(), origin));
            }
            Clause::Guarded { guard, body } => {
                if guard.contains_star() {
                    return Err(EngineError::UnsupportedStarGuard);
                }
                reject_unanalyzable(&guard)?;
                let item = Clause::Guarded { guard, body };
                if !done.iter().any(|(existing, _)| *existing == item) {
                    done.push((item, origin));
                }
            }
            c @ (Clause::Obligation { .. } | Clause::Prohibition { .. } | Clause::Permission(_)) => {
                let action = match &c {
                    Clause::Obligation { action, .. }
                    | Clause::Prohibition { action, .. }
                    | Clause::Permission(action) => action,
                    _ => unreachable!(),
                };
                reject_unanalyzable(action)?;
                if !done.iter().any(|(existing, _)| *existing == c) {
                    done.push((c, origin));
                }
            }
            c @ Clause::Bottom => {
                if !done.iter().any(|(existing, _)| *existing == c) {
                    done.push((c, origin));
                }
            }
        }
    }
    out.push((done, branches));
    Ok(())
}

// ---------------------------------------------------------------------------
// Active deontic statements and the four clash checks

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Modality {
    Obligation,
    Permission,
    Prohibition,
}

/// One demand a directly active deontic statement places on the next step.
#[derive(Debug, Clone)]
pub struct DeonticEntry {
    modality: Modality,
    step: FirstStep,
    /// Index into the state's active clause list.
    source: usize,
}

impl DeonticEntry {
    pub fn first_step_atoms(&self) -> &BTreeSet<AtomicAction> {
        &self.step.atoms
    }

    pub fn is_obligation(&self) -> bool {
        self.modality == Modality::Obligation
    }

    pub fn is_permission(&self) -> bool {
        self.modality == Modality::Permission
    }

    pub fn is_prohibition(&self) -> bool {
        self.modality == Modality::Prohibition
    }

    pub fn source_clause<'a>(&self, state: &'a AnalysisState) -> &'a Clause {
        &state.active[self.source].0
    }
}

/// The deontic statements directly active in a state, one entry per
/// first-step decomposition of each statement's action.
pub fn active_deontics(state: &AnalysisState) -> Result<Vec<DeonticEntry>, EngineError> {
    let mut out = Vec::new();
    for (idx, (clause, _)) in state.active.iter().enumerate() {
        let (modality, action) = match clause {
            Clause::Obligation { action, .. } => (Modality::Obligation, action),
            Clause::Prohibition { action, .. } => (Modality::Prohibition, action),
            Clause::Permission(action) => (Modality::Permission, action),
            _ => continue,
        };
        let steps = first_steps(action).map_err(|_| EngineError::NegationUnsupported)?;
        for (step, _) in steps {
            out.push(DeonticEntry {
                modality,
                step,
                source: idx,
            });
        }
    }
    Ok(out)
}

/// Scans the four conflict classes in order, entries in source order, and
/// returns the first clash. Entries descending from the same active clause
/// are never paired with each other, and wildcard (skip) demands make no
/// claim about any particular action.
pub fn check_state(
    state: &AnalysisState,
    mutex: &MutexRelation,
) -> Result<Option<Clash>, EngineError> {
    let entries = active_deontics(state)?;
    let usable: Vec<&DeonticEntry> = entries.iter().filter(|e| !e.step.wildcard).collect();

    let pair = |a: &DeonticEntry, b: &DeonticEntry| (a.source, b.source);

    // (1) obligation and prohibition of the same action
    for o in usable.iter().filter(|e| e.is_obligation()) {
        for f in usable.iter().filter(|e| e.is_prohibition()) {
            if o.source == f.source {
                continue;
            }
            if f.step.atoms.is_subset(&o.step.atoms) || o.step.atoms.is_subset(&f.step.atoms) {
                return Ok(Some((ConflictKind::ObligationVsProhibition, pair(o, f))));
            }
        }
    }
    // (2) permission and prohibition of the same action
    for p in usable.iter().filter(|e| e.is_permission()) {
        for f in usable.iter().filter(|e| e.is_prohibition()) {
            if p.source == f.source {
                continue;
            }
            if f.step.atoms.is_subset(&p.step.atoms) || p.step.atoms.is_subset(&f.step.atoms) {
                return Ok(Some((ConflictKind::PermissionVsProhibition, pair(p, f))));
            }
        }
    }
    // (3) obligations over mutually exclusive actions
    let obligations: Vec<&&DeonticEntry> = usable.iter().filter(|e| e.is_obligation()).collect();
    for (i, o1) in obligations.iter().enumerate() {
        for o2 in obligations.iter().skip(i + 1) {
            if o1.source == o2.source {
                continue;
            }
            if mutually_exclusive(&o1.step.atoms, &o2.step.atoms, mutex) {
                return Ok(Some((
                    ConflictKind::ObligationVsObligationMutex,
                    pair(o1, o2),
                )));
            }
        }
    }
    // (4) permission and obligation over mutually exclusive actions
    for p in usable.iter().filter(|e| e.is_permission()) {
        for o in usable.iter().filter(|e| e.is_obligation()) {
            if p.source == o.source {
                continue;
            }
            if mutually_exclusive(&p.step.atoms, &o.step.atoms, mutex) {
                return Ok(Some((ConflictKind::PermissionVsObligationMutex, pair(p, o))));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Residuation

/// The possible remainders of one active clause after a step. More than one
/// entry means the performer's branch choice is observable and each choice
/// becomes its own successor state.
fn clause_residual(clause: &Clause, step: &ActionStep) -> Result<Vec<Clause>, EngineError> {
    match clause {
        Clause::Top => Ok(vec![Clause::Top]),
        Clause::Bottom => Ok(vec![Clause::Bottom]),
        Clause::Permission(_) => Ok(vec![Clause::Top]),
        Clause::Obligation { action, reparation } => {
            let branches = first_steps(action).map_err(|_| EngineError::NegationUnsupported)?;
            let satisfied: Vec<&(FirstStep, Residual)> = branches
                .iter()
                .filter(|(fs, _)| step_meets(step, fs))
                .collect();
            if satisfied.is_empty() {
                return Ok(vec![reparation
                    .as_ref()
                    .map(|r| (**r).clone())
                    .unwrap_or(Clause::Bottom)]);
            }
            let mut alts: Vec<Clause> = Vec::new();
            for (_, residual) in satisfied {
                let alt = match residual {
                    Residual::Done => Clause::Top,
                    Residual::Rest(rest) => Clause::Obligation {
                        action: rest.clone(),
                        reparation: reparation.clone(),
                    },
                };
                if !alts.contains(&alt) {
                    alts.push(alt);
                }
            }
            Ok(alts)
        }
        Clause::Prohibition { action, reparation } => {
            let branches = first_steps(action).map_err(|_| EngineError::NegationUnsupported)?;
            let satisfied: Vec<&(FirstStep, Residual)> = branches
                .iter()
                .filter(|(fs, _)| step_meets(step, fs))
                .collect();
            if satisfied.is_empty() {
                return Ok(vec![Clause::Top]);
            }
            if satisfied.iter().any(|(_, r)| *r == Residual::Done) {
                return Ok(vec![reparation
                    .as_ref()
                    .map(|r| (**r).clone())
                    .unwrap_or(Clause::Bottom)]);
            }
            let mut rest: Option<ActionExpr> = None;
            for (_, residual) in satisfied {
                if let Residual::Rest(r) = residual {
                    rest = Some(match rest {
                        None => r.clone(),
                        Some(acc) => ActionExpr::choice(acc, r.clone()),
                    });
                }
            }
            Ok(vec![Clause::Prohibition {
                action: rest.expect("non-done satisfied branch"),
                reparation: reparation.clone(),
            }])
        }
        Clause::Guarded { guard, body } if is_star_skip(guard) => Ok(vec![clause.clone()]),
        Clause::Guarded { guard, body } => {
            let branches = first_steps(guard).map_err(|e| match e {
                crate::ast::CoreError::StarUnderModality => EngineError::UnsupportedStarGuard,
                _ => EngineError::NegationUnsupported,
            })?;
            // The box is a condition over every way the guard may be in
            // progress, so satisfied branches are conjoined.
            let mut parts = Vec::new();
            for (fs, residual) in &branches {
                if !step_meets(step, fs) {
                    continue;
                }
                let part = match residual {
                    Residual::Done => (**body).clone(),
                    Residual::Rest(rest) => Clause::Guarded {
                        guard: rest.clone(),
                        body: body.clone(),
                    },
                };
                if !parts.contains(&part) {
                    parts.push(part);
                }
            }
            Ok(match parts.len() {
                0 => vec![Clause::Top],
                1 => vec![parts.pop().unwrap()],
                _ => vec![Clause::And(parts)],
            })
        }
        Clause::And(_) | Clause::XChoice { .. } => {
            unreachable!("analysis states are expanded before residuation")
        }
    }
}

/// All successor states of `state` under `step` (several when a branch
/// choice or an exclusive choice splits).
pub fn residual(
    state: &AnalysisState,
    step: &ActionStep,
    mutex: &MutexRelation,
) -> Result<Vec<(AnalysisState, Vec<XBranch>)>, EngineError> {
    if mutex.violates(step.atoms()) {
        return Err(EngineError::MutexStep);
    }
    let per_item: Vec<(Vec<Clause>, usize)> = state
        .active
        .iter()
        .map(|(c, origin)| clause_residual(c, step).map(|alts| (alts, *origin)))
        .collect::<Result<_, _>>()?;

    let mut combos: Vec<Items> = vec![Vec::new()];
    for (alts, origin) in &per_item {
        let mut next = Vec::with_capacity(combos.len() * alts.len());
        for combo in &combos {
            for alt in alts {
                let mut c = combo.clone();
                c.push((alt.clone(), *origin));
                next.push(c);
            }
        }
        combos = next;
    }

    let mut out = Vec::new();
    for combo in combos {
        for (items, branches) in expand(combo)? {
            out.push((
                AnalysisState {
                    active: items,
                    depth: state.depth + 1,
                },
                branches,
            ));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Breadth-first exploration

fn fold_concurrent(atoms: &BTreeSet<AtomicAction>) -> ActionExpr {
    let mut iter = atoms.iter();
    let first = ActionExpr::Atom(iter.next().expect("non-empty step").clone());
    iter.fold(first, |acc, a| {
        ActionExpr::concurrent(acc, ActionExpr::Atom(a.clone()))
    })
}

fn trace_formula(trace: &[ActionStep], left: &Clause, right: &Clause) -> Clause {
    let clash = Clause::And(vec![left.clone(), right.clone()]);
    if trace.is_empty() {
        return clash;
    }
    let mut steps = trace.iter().map(|s| fold_concurrent(s.atoms()));
    let first = steps.next().unwrap();
    let guard = steps.fold(first, ActionExpr::sequence);
    Clause::guarded(guard, clash)
}

/// Breadth-first conflict search over the clause list. Successor steps of
/// every state range over all non-empty mutex-free subsets of the alphabet,
/// enumerated from the largest subset down, so the first conflict reported
/// carries a shortest trace.
pub fn check_clauses(
    clauses: &[Clause],
    alphabet: &[AtomicAction],
    mutex: &MutexRelation,
    cfg: &ExploreConfig,
) -> Result<Exploration, EngineError> {
    if alphabet.len() > MAX_ALPHABET {
        return Ok(Exploration {
            outcome: Outcome::Exceeded(Bound::Alphabet(alphabet.len())),
            automaton: None,
            states_visited: 0,
        });
    }

    struct Rec {
        state: AnalysisState,
        trace: Vec<ActionStep>,
        branches: Vec<XBranch>,
    }

    let mut recs: Vec<Rec> = Vec::new();
    let mut visited: HashMap<BTreeSet<Clause>, usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut transitions: Vec<(usize, ActionStep, usize)> = Vec::new();
    let mut initial_ids = Vec::new();
    let mut depth_truncated = false;

    let conflict = |rec: &Rec,
                    kind: ConflictKind,
                    sources: (usize, usize)|
     -> Box<ConflictReport> {
        let left = rec.state.active[sources.0].clone();
        let right = rec.state.active[sources.1].clone();
        let as_formula = trace_formula(&rec.trace, &left.0, &right.0);
        Box::new(ConflictReport {
            kind,
            clash: (left.0, right.0),
            clash_origins: (left.1, right.1),
            trace: rec.trace.clone(),
            as_formula,
            branches: rec.branches.clone(),
        })
    };

    let finish = |outcome: Outcome, recs: &[Rec], transitions: Vec<(usize, ActionStep, usize)>, record: bool| Exploration {
        states_visited: recs.len(),
        automaton: if record {
            Some(Automaton {
                states: recs
                    .iter()
                    .map(|r| r.state.active.iter().map(|(c, _)| c.clone()).collect())
                    .collect(),
                initial: (0..recs.iter().take_while(|r| r.trace.is_empty()).count()).collect(),
                transitions,
                alphabet: alphabet.to_vec(),
            })
        } else {
            None
        },
        outcome,
    };

    let initial_items: Items = clauses
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    for (items, branches) in expand(initial_items)? {
        let state = AnalysisState {
            active: items,
            depth: 0,
        };
        let key = state.key();
        if visited.contains_key(&key) {
            continue;
        }
        let id = recs.len();
        visited.insert(key, id);
        recs.push(Rec {
            state,
            trace: Vec::new(),
            branches,
        });
        initial_ids.push(id);
        if let Some((kind, sources)) = check_state(&recs[id].state, mutex)? {
            let report = conflict(&recs[id], kind, sources);
            return Ok(finish(
                Outcome::Conflict(report),
                &recs,
                transitions,
                cfg.record_automaton,
            ));
        }
        queue.push_back(id);
    }

    let n = alphabet.len();
    while let Some(id) = queue.pop_front() {
        if recs[id].state.active.is_empty() || recs[id].state.is_terminal() {
            continue;
        }
        if recs[id].state.depth >= cfg.max_depth {
            depth_truncated = true;
            continue;
        }
        for mask in (1u64..(1u64 << n)).rev() {
            let atoms: BTreeSet<AtomicAction> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| alphabet[i].clone())
                .collect();
            if mutex.violates(&atoms) {
                continue;
            }
            let step = ActionStep::new(atoms).expect("mask is non-zero");
            for (succ, new_branches) in residual(&recs[id].state, &step, mutex)? {
                let key = succ.key();
                if let Some(&existing) = visited.get(&key) {
                    if cfg.record_automaton {
                        transitions.push((id, step.clone(), existing));
                    }
                    continue;
                }
                if recs.len() >= cfg.max_states {
                    return Ok(finish(
                        Outcome::Exceeded(Bound::States(cfg.max_states)),
                        &recs,
                        transitions,
                        cfg.record_automaton,
                    ));
                }
                let succ_id = recs.len();
                visited.insert(key, succ_id);
                let mut trace = recs[id].trace.clone();
                trace.push(step.clone());
                let mut branches = recs[id].branches.clone();
                branches.extend(new_branches);
                recs.push(Rec {
                    state: succ,
                    trace,
                    branches,
                });
                if cfg.record_automaton {
                    transitions.push((id, step.clone(), succ_id));
                }
                if let Some((kind, sources)) = check_state(&recs[succ_id].state, mutex)? {
                    let report = conflict(&recs[succ_id], kind, sources);
                    return Ok(finish(
                        Outcome::Conflict(report),
                        &recs,
                        transitions,
                        cfg.record_automaton,
                    ));
                }
                queue.push_back(succ_id);
            }
        }
    }

    let outcome = if depth_truncated {
        Outcome::Exceeded(Bound::Depth(cfg.max_depth))
    } else {
        Outcome::NoConflict
    };
    Ok(finish(outcome, &recs, transitions, cfg.record_automaton))
}

/// Analyzes a validated contract document.
pub fn build_and_check(
    doc: &ContractDocument,
    cfg: &ExploreConfig,
) -> Result<Exploration, EngineError> {
    check_clauses(&doc.clauses, &doc.alphabet(), &doc.mutex(), cfg)
}

/// Renders a conflict report in restricted English: a header naming the
/// conflict class and the source lines of the clashing clauses, then the
/// counter-example formula.
pub fn report_to_english(
    report: &ConflictReport,
    spans: &[(usize, usize)],
) -> Result<String, EnglishError> {
    let mut header = format!("% conflict {}", report.kind);
    let (a, b) = report.clash_origins;
    if let (Some(sa), Some(sb)) = (spans.get(a), spans.get(b)) {
        header.push_str(&format!(
            ": clause at lines {}-{} clashes with clause at lines {}-{}",
            sa.0, sa.1, sb.0, sb.1
        ));
    }
    if !report.branches.is_empty() {
        let path: Vec<String> = report.branches.iter().map(|b| b.to_string()).collect();
        header.push_str(&format!(" (exclusive-choice branches: {})", path.join(", ")));
    }
    Ok(format!("{header}\n{}\n", linearize_re(&report.as_formula)?))
}
