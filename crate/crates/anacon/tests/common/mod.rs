//! Shared generators for the integration suites.

#![allow(dead_code)]

pub mod oracle;

use anacon::ast::{ActionExpr, Clause};
use proptest::prelude::*;

/// Action names safe in every concrete syntax (no reserved words, no
/// `_and_`/`_or_` infixes).
const NAMES: &[&str] = &["pay", "open_desk", "close_desk", "send_info", "sign_contract"];

/// Three-atom pool for the small engine-versus-oracle instances.
const SMALL_NAMES: &[&str] = &["a", "b", "c"];

fn named_atom(pool: &'static [&'static str]) -> impl Strategy<Value = ActionExpr> {
    prop::sample::select(pool).prop_map(|n| ActionExpr::atom(n).unwrap())
}

/// Star- and negation-free action over three atoms with every trace of
/// length at most four.
pub fn small_action() -> impl Strategy<Value = ActionExpr> {
    let leaf = named_atom(SMALL_NAMES);
    leaf.prop_recursive(2, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ActionExpr::concurrent(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ActionExpr::sequence(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| ActionExpr::choice(a, b)),
        ]
    })
}

/// Star-free clause of depth at most three over the small action pool.
pub fn small_clause() -> impl Strategy<Value = Clause> {
    let act = small_action;
    let leaf = prop_oneof![
        act().prop_map(|a| Clause::obligation(a, None).unwrap()),
        act().prop_map(|a| Clause::prohibition(a, None).unwrap()),
        act().prop_map(|a| Clause::permission(a).unwrap()),
        Just(Clause::Top),
    ];
    leaf.prop_recursive(3, 24, 3, move |inner| {
        prop_oneof![
            (act(), inner.clone())
                .prop_map(|(a, rep)| Clause::obligation(a, Some(rep)).unwrap()),
            (act(), inner.clone())
                .prop_map(|(a, rep)| Clause::prohibition(a, Some(rep)).unwrap()),
            (act(), inner.clone()).prop_map(|(a, c)| Clause::guarded(a, c)),
            (act(), inner.clone()).prop_map(|(a, c)| Clause::always(Clause::guarded(a, c))),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Clause::And),
            (act(), act(), inner.clone(), prop::bool::ANY).prop_map(|(a, b, rep, ob)| {
                if ob {
                    Clause::xchoice(
                        Clause::obligation(a, Some(rep)).unwrap(),
                        Clause::obligation(b, None).unwrap(),
                    )
                    .unwrap()
                } else {
                    Clause::xchoice(
                        Clause::permission(a).unwrap(),
                        Clause::permission(b).unwrap(),
                    )
                    .unwrap()
                }
            }),
        ]
    })
}

/// A small contract: one to three clauses plus an optional mutex pair
/// drawn from the three-atom pool.
pub fn small_contract() -> impl Strategy<Value = (Vec<Clause>, Option<(&'static str, &'static str)>)>
{
    (
        prop::collection::vec(small_clause(), 1..=3),
        prop::option::of(prop::sample::select(vec![("a", "b"), ("a", "c"), ("b", "c")])),
    )
}

// ---------------------------------------------------------------------------
// Round-trip generators (criterion: identity on 1,000 clauses, depth <= 6)

/// Action expressible in the parenthesis-free English action grammar:
/// a left-associated or-list of followed-by-lists of and-lists of names.
pub fn english_action() -> impl Strategy<Value = ActionExpr> {
    let and_group = prop::collection::vec(named_atom(NAMES), 1..=2).prop_map(fold_concurrent);
    let fb_group = prop::collection::vec(and_group, 1..=2).prop_map(|gs| fold_with(gs, ActionExpr::sequence));
    prop::collection::vec(fb_group, 1..=2).prop_map(|gs| fold_with(gs, ActionExpr::choice))
}

fn fold_concurrent(atoms: Vec<ActionExpr>) -> ActionExpr {
    fold_with(atoms, ActionExpr::concurrent)
}

fn fold_with(mut items: Vec<ActionExpr>, f: fn(ActionExpr, ActionExpr) -> ActionExpr) -> ActionExpr {
    let first = items.remove(0);
    items.into_iter().fold(first, f)
}

/// Clause within the restricted-English template language.
pub fn english_clause() -> impl Strategy<Value = Clause> {
    let act = english_action;
    let leaf = prop_oneof![
        act().prop_map(|a| Clause::obligation(a, None).unwrap()),
        act().prop_map(|a| Clause::prohibition(a, None).unwrap()),
        act().prop_map(|a| Clause::permission(a).unwrap()),
        Just(Clause::Top),
        Just(Clause::Bottom),
    ];
    leaf.prop_recursive(4, 32, 3, move |inner| {
        prop_oneof![
            (act(), inner.clone())
                .prop_map(|(a, rep)| Clause::obligation(a, Some(rep)).unwrap()),
            (act(), inner.clone())
                .prop_map(|(a, rep)| Clause::prohibition(a, Some(rep)).unwrap()),
            (act(), inner.clone()).prop_map(|(a, c)| Clause::guarded(a, c)),
            (act(), inner.clone()).prop_map(|(a, c)| Clause::always(Clause::guarded(a, c))),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Clause::And),
            (act(), act(), prop::bool::ANY).prop_map(|(a, b, ob)| {
                if ob {
                    Clause::xchoice(
                        Clause::obligation(a, None).unwrap(),
                        Clause::obligation(b, None).unwrap(),
                    )
                    .unwrap()
                } else {
                    Clause::xchoice(
                        Clause::permission(a).unwrap(),
                        Clause::permission(b).unwrap(),
                    )
                    .unwrap()
                }
            }),
        ]
    })
}

/// Action for the symbolic syntax: adds `0`, `1`, grouping in any shape and
/// negation over atoms or concurrent atoms.
pub fn cl_action() -> impl Strategy<Value = ActionExpr> {
    let leaf = prop_oneof![
        4 => named_atom(NAMES),
        1 => Just(ActionExpr::Skip),
        1 => Just(ActionExpr::Impossible),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ActionExpr::concurrent(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ActionExpr::sequence(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| ActionExpr::choice(a, b)),
            negatable_action(),
        ]
    })
}

/// Negation as the symbolic parser accepts it: over an atom or a
/// concurrent group of atoms.
fn negatable_action() -> impl Strategy<Value = ActionExpr> {
    prop::collection::vec(named_atom(NAMES), 1..=3)
        .prop_map(|atoms| ActionExpr::Negation(Box::new(fold_concurrent(atoms))))
}

/// Clause for the symbolic and XML round trips; the Kleene star stays
/// confined to the `[1*]` box form.
pub fn cl_clause() -> impl Strategy<Value = Clause> {
    let modal_act = || {
        // Stars are rejected under modalities; everything else goes.
        cl_action().prop_filter("star-free", |a| !a.contains_star())
    };
    let leaf = prop_oneof![
        modal_act().prop_map(|a| Clause::obligation(a, None).unwrap()),
        modal_act().prop_map(|a| Clause::prohibition(a, None).unwrap()),
        modal_act().prop_map(|a| Clause::permission(a).unwrap()),
        Just(Clause::Top),
        Just(Clause::Bottom),
    ];
    leaf.prop_recursive(4, 32, 3, move |inner| {
        prop_oneof![
            (modal_act(), inner.clone())
                .prop_map(|(a, rep)| Clause::obligation(a, Some(rep)).unwrap()),
            (modal_act(), inner.clone())
                .prop_map(|(a, rep)| Clause::prohibition(a, Some(rep)).unwrap()),
            (cl_action(), inner.clone()).prop_map(|(a, c)| Clause::guarded(a, c)),
            inner.clone().prop_map(Clause::always),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Clause::And),
            (modal_act(), modal_act(), prop::bool::ANY, inner.clone()).prop_map(
                |(a, b, ob, rep)| {
                    if ob {
                        Clause::xchoice(
                            Clause::obligation(a, Some(rep)).unwrap(),
                            Clause::obligation(b, None).unwrap(),
                        )
                        .unwrap()
                    } else {
                        Clause::xchoice(
                            Clause::permission(a).unwrap(),
                            Clause::permission(b).unwrap(),
                        )
                        .unwrap()
                    }
                }
            ),
        ]
    })
}
