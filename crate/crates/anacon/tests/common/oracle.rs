//! Brute-force conflict oracle. Enumerates every mutex-free step sequence
//! up to a length bound and simulates the clause set over each sequence
//! directly, with demand sets read off complete-trace enumeration rather
//! than the engine's first-step decomposition.

use anacon::algebra::traces;
use anacon::ast::{ActionExpr, AtomicAction, Clause, MutexRelation};
use std::collections::{BTreeSet, VecDeque};

type Step = BTreeSet<AtomicAction>;
type Config = Vec<Clause>;

fn is_star_skip(expr: &ActionExpr) -> bool {
    matches!(expr, ActionExpr::Star(inner) if **inner == ActionExpr::Skip)
}

/// The ways `alpha` can be satisfied by `step`: one entry per satisfied
/// branch, `None` when the branch completes the action.
fn satisfied(alpha: &ActionExpr, step: &Step) -> Vec<Option<ActionExpr>> {
    match alpha {
        ActionExpr::Impossible => Vec::new(),
        ActionExpr::Skip => vec![None],
        ActionExpr::Atom(a) => {
            if step.contains(a) {
                vec![None]
            } else {
                Vec::new()
            }
        }
        ActionExpr::Choice(a, b) => {
            let mut out = satisfied(a, step);
            out.extend(satisfied(b, step));
            out
        }
        ActionExpr::Sequence(a, b) => satisfied(a, step)
            .into_iter()
            .map(|r| match r {
                None => Some((**b).clone()),
                Some(ra) => Some(ActionExpr::sequence(ra, (**b).clone())),
            })
            .collect(),
        ActionExpr::Concurrent(a, b) => {
            let left = satisfied(a, step);
            let right = satisfied(b, step);
            let mut out = Vec::new();
            for ra in &left {
                for rb in &right {
                    out.push(match (ra, rb) {
                        (None, None) => None,
                        (None, Some(r)) | (Some(r), None) => Some(r.clone()),
                        (Some(x), Some(y)) => {
                            Some(ActionExpr::concurrent(x.clone(), y.clone()))
                        }
                    });
                }
            }
            out
        }
        ActionExpr::Negation(_) | ActionExpr::Star(_) => {
            panic!("oracle inputs are star- and negation-free")
        }
    }
}

/// Non-wildcard first-step demand sets, read from the complete traces.
fn demand_heads(alpha: &ActionExpr) -> Vec<Step> {
    let mut heads = BTreeSet::new();
    for trace in traces(alpha).expect("star-free action") {
        if let Some(first) = trace.first() {
            if !first.wildcard {
                heads.insert(first.atoms.clone());
            }
        }
    }
    heads.into_iter().collect()
}

/// Flattens clauses into configurations, splitting on exclusive choice.
fn expand(pending: Vec<Clause>) -> Vec<Config> {
    let mut out = Vec::new();
    expand_rec(Vec::new(), pending, &mut out);
    out
}

fn expand_rec(mut done: Config, mut pending: Vec<Clause>, out: &mut Vec<Config>) {
    while !pending.is_empty() {
        let clause = pending.remove(0);
        match clause {
            Clause::Top => {}
            Clause::And(parts) => {
                for (i, part) in parts.into_iter().enumerate() {
                    pending.insert(i, part);
                }
            }
            Clause::XChoice { left, right, .. } => {
                for side in [left, right] {
                    let mut sub = vec![*side];
                    sub.extend(pending.iter().cloned());
                    expand_rec(done.clone(), sub, out);
                }
                return;
            }
            Clause::Guarded { ref guard, ref body } if is_star_skip(guard) => {
                if !done.contains(&clause) {
                    done.push(clause.clone());
                }
                pending.insert(0, (**body).clone());
            }
            other => {
                if !done.contains(&other) {
                    done.push(other);
                }
            }
        }
    }
    out.push(done);
}

fn rep_or_bottom(rep: &Option<Box<Clause>>) -> Clause {
    rep.as_ref().map(|r| (**r).clone()).unwrap_or(Clause::Bottom)
}

/// Per-item stepping alternatives; each alternative is the list of clauses
/// the item contributes to a successor configuration.
fn step_item(clause: &Clause, step: &Step) -> Vec<Vec<Clause>> {
    match clause {
        Clause::Bottom => vec![vec![Clause::Bottom]],
        Clause::Permission(_) => vec![vec![]],
        Clause::Obligation { action, reparation } => {
            let sats = satisfied(action, step);
            if sats.is_empty() {
                return vec![vec![rep_or_bottom(reparation)]];
            }
            sats.into_iter()
                .map(|r| match r {
                    None => vec![],
                    Some(rest) => vec![Clause::Obligation {
                        action: rest,
                        reparation: reparation.clone(),
                    }],
                })
                .collect()
        }
        Clause::Prohibition { action, reparation } => {
            let sats = satisfied(action, step);
            if sats.is_empty() {
                return vec![vec![]];
            }
            if sats.iter().any(|r| r.is_none()) {
                return vec![vec![rep_or_bottom(reparation)]];
            }
            let rest = sats
                .into_iter()
                .flatten()
                .reduce(ActionExpr::choice)
                .expect("non-empty partial branches");
            vec![vec![Clause::Prohibition {
                action: rest,
                reparation: reparation.clone(),
            }]]
        }
        Clause::Guarded { guard, body } if is_star_skip(guard) => vec![vec![clause.clone()]],
        Clause::Guarded { guard, body } => {
            let mut parts = Vec::new();
            for r in satisfied(guard, step) {
                let part = match r {
                    None => (**body).clone(),
                    Some(rest) => Clause::Guarded {
                        guard: rest,
                        body: body.clone(),
                    },
                };
                if !parts.contains(&part) {
                    parts.push(part);
                }
            }
            vec![parts]
        }
        Clause::Top | Clause::And(_) | Clause::XChoice { .. } => {
            panic!("configurations are expanded")
        }
    }
}

fn successors(config: &Config, step: &Step) -> Vec<Config> {
    let mut combos: Vec<Vec<Clause>> = vec![Vec::new()];
    for item in config {
        let alts = step_item(item, step);
        let mut next = Vec::new();
        for combo in &combos {
            for alt in &alts {
                let mut c = combo.clone();
                c.extend(alt.iter().cloned());
                next.push(c);
            }
        }
        combos = next;
    }
    combos.into_iter().flat_map(expand).collect()
}

/// True iff the configuration holds one of the four deontic clashes.
fn has_clash(config: &Config, mutex: &MutexRelation) -> bool {
    #[derive(PartialEq)]
    enum M {
        O,
        P,
        F,
    }
    let mut entries: Vec<(M, Step, usize)> = Vec::new();
    for (idx, clause) in config.iter().enumerate() {
        let (m, action) = match clause {
            Clause::Obligation { action, .. } => (M::O, action),
            Clause::Prohibition { action, .. } => (M::F, action),
            Clause::Permission(action) => (M::P, action),
            _ => continue,
        };
        for head in demand_heads(action) {
            entries.push(match m {
                M::O => (M::O, head, idx),
                M::P => (M::P, head, idx),
                M::F => (M::F, head, idx),
            });
        }
    }
    let excl = |x: &Step, y: &Step| x.iter().any(|a| y.iter().any(|b| mutex.contains(a, b)));
    for (ma, sa, ia) in &entries {
        for (mb, sb, ib) in &entries {
            if ia == ib {
                continue;
            }
            let same = sa.is_subset(sb) || sb.is_subset(sa);
            match (ma, mb) {
                (M::O, M::F) | (M::P, M::F) if same => return true,
                (M::O, M::O) | (M::P, M::O) if excl(sa, sb) => return true,
                _ => {}
            }
        }
    }
    false
}

fn alphabet_of(clauses: &[Clause]) -> Vec<AtomicAction> {
    let mut set = BTreeSet::new();
    for c in clauses {
        set.extend(c.atoms());
    }
    set.into_iter().collect()
}

/// All mutex-free non-empty steps over the alphabet.
fn all_steps(alphabet: &[AtomicAction], mutex: &MutexRelation) -> Vec<Step> {
    let n = alphabet.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let step: Step = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| alphabet[i].clone())
            .collect();
        if !mutex.violates(&step) {
            out.push(step);
        }
    }
    out
}

/// Minimal number of steps to a clashing configuration, searching every
/// step sequence of length at most `max_len`; `None` when no reachable
/// configuration within the bound clashes.
pub fn conflict_within(
    clauses: &[Clause],
    mutex: &MutexRelation,
    max_len: usize,
) -> Option<usize> {
    let steps = all_steps(&alphabet_of(clauses), mutex);
    let mut visited: BTreeSet<Config> = BTreeSet::new();
    let mut queue: VecDeque<(Config, usize)> = VecDeque::new();
    for config in expand(clauses.to_vec()) {
        let mut key = config.clone();
        key.sort();
        if visited.insert(key) {
            if has_clash(&config, mutex) {
                return Some(0);
            }
            queue.push_back((config, 0));
        }
    }
    while let Some((config, depth)) = queue.pop_front() {
        if depth >= max_len {
            continue;
        }
        for step in &steps {
            for succ in successors(&config, step) {
                let mut key = succ.clone();
                key.sort();
                if visited.insert(key) {
                    if has_clash(&succ, mutex) {
                        return Some(depth + 1);
                    }
                    queue.push_back((succ, depth + 1));
                }
            }
        }
    }
    None
}
