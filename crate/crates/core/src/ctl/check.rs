//! Model checking: fixpoint labeling and the bounded semantics.
//!
//! The labeling checker is the trusted reference: least fixpoints for
//! `AF/EF/AU/EU`, greatest fixpoints for `AG/EG`. The bounded checker
//! evaluates the same temporal operators through rank recurrences, reading
//! the value of state `q` at rank `bound(q)` and clamping successor ranks
//! to `min(bound(q'), u - 1)`; with any sound diameter bound the two agree.

use thiserror::Error;

use super::{Formula, Head};
use crate::diameter::DiameterBound;
use crate::kripke::{KripkeStructure, Sample, StateId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("formula uses atom id {atom} but the structure declares {atom_count} atoms")]
    UnknownAtom { atom: usize, atom_count: usize },
}

fn validate_atoms(ks: &KripkeStructure, f: &Formula) -> Result<(), CheckError> {
    match f.max_atom() {
        Some(a) if a >= ks.atom_count() => {
            Err(CheckError::UnknownAtom { atom: a, atom_count: ks.atom_count() })
        }
        _ => Ok(()),
    }
}

/// Labels every state with the truth of `f` (fixpoint algorithm).
pub fn satisfying_states(ks: &KripkeStructure, f: &Formula) -> Result<Vec<bool>, CheckError> {
    validate_atoms(ks, f)?;
    let n = ks.state_count();
    let mut table: Vec<Vec<bool>> = Vec::with_capacity(f.size());
    for node in f.nodes() {
        let right = node.right.map(|c| &table[c]);
        let left = node.left.map(|c| &table[c]);
        let mut states = match node.head {
            Head::True => vec![true; n],
            Head::Atom(a) => ks.states().map(|q| ks.has_atom(q, a)).collect(),
            Head::Not => right.unwrap().iter().map(|b| !b).collect(),
            Head::And => {
                left.unwrap().iter().zip(right.unwrap()).map(|(a, b)| *a && *b).collect()
            }
            Head::Or => {
                left.unwrap().iter().zip(right.unwrap()).map(|(a, b)| *a || *b).collect()
            }
            Head::Ax => all_next(ks, right.unwrap()),
            Head::Ex => some_next(ks, right.unwrap()),
            Head::Af => least_fixpoint(ks, right.unwrap(), None, true),
            Head::Ef => least_fixpoint(ks, right.unwrap(), None, false),
            Head::Au => least_fixpoint(ks, right.unwrap(), left, true),
            Head::Eu => least_fixpoint(ks, right.unwrap(), left, false),
            Head::Ag => greatest_fixpoint(ks, right.unwrap(), true),
            Head::Eg => greatest_fixpoint(ks, right.unwrap(), false),
        };
        if node.negated {
            for b in &mut states {
                *b = !*b;
            }
        }
        table.push(states);
    }
    Ok(table.swap_remove(f.root()))
}

/// Truth of `f` at one state.
pub fn check(ks: &KripkeStructure, q: StateId, f: &Formula) -> Result<bool, CheckError> {
    Ok(satisfying_states(ks, f)?[q])
}

fn all_next(ks: &KripkeStructure, child: &[bool]) -> Vec<bool> {
    ks.states().map(|q| ks.successors(q).iter().all(|&q2| child[q2])).collect()
}

fn some_next(ks: &KripkeStructure, child: &[bool]) -> Vec<bool> {
    ks.states().map(|q| ks.successors(q).iter().any(|&q2| child[q2])).collect()
}

/// `target ∪ (guard ∩ pre(X))` iterated to the least fixpoint, with the
/// universal or existential pre-image. `guard = None` means no guard
/// (the finally operators).
fn least_fixpoint(
    ks: &KripkeStructure,
    target: &[bool],
    guard: Option<&Vec<bool>>,
    universal: bool,
) -> Vec<bool> {
    let mut current = target.to_vec();
    loop {
        let mut changed = false;
        for q in ks.states() {
            if current[q] || !guard.map_or(true, |g| g[q]) {
                continue;
            }
            let step = if universal {
                ks.successors(q).iter().all(|&q2| current[q2])
            } else {
                ks.successors(q).iter().any(|&q2| current[q2])
            };
            if step {
                current[q] = true;
                changed = true;
            }
        }
        if !changed {
            return current;
        }
    }
}

/// `invariant ∩ pre(X)` iterated to the greatest fixpoint.
fn greatest_fixpoint(ks: &KripkeStructure, invariant: &[bool], universal: bool) -> Vec<bool> {
    let mut current = invariant.to_vec();
    loop {
        let mut changed = false;
        for q in ks.states() {
            if !current[q] {
                continue;
            }
            let keep = if universal {
                ks.successors(q).iter().all(|&q2| current[q2])
            } else {
                ks.successors(q).iter().any(|&q2| current[q2])
            };
            if !keep {
                current[q] = false;
                changed = true;
            }
        }
        if !changed {
            return current;
        }
    }
}

/// Labels every state with the truth of `f` under the bounded semantics.
pub fn satisfying_states_bounded(
    ks: &KripkeStructure,
    f: &Formula,
    bound: &DiameterBound,
) -> Result<Vec<bool>, CheckError> {
    validate_atoms(ks, f)?;
    assert_eq!(bound.per_state.len(), ks.state_count(), "bound must cover every state");
    let n = ks.state_count();
    let mut table: Vec<Vec<bool>> = Vec::with_capacity(f.size());
    for node in f.nodes() {
        let right = node.right.map(|c| &table[c]);
        let left = node.left.map(|c| &table[c]);
        let mut states = match node.head {
            Head::True => vec![true; n],
            Head::Atom(a) => ks.states().map(|q| ks.has_atom(q, a)).collect(),
            Head::Not => right.unwrap().iter().map(|b| !b).collect(),
            Head::And => {
                left.unwrap().iter().zip(right.unwrap()).map(|(a, b)| *a && *b).collect()
            }
            Head::Or => {
                left.unwrap().iter().zip(right.unwrap()).map(|(a, b)| *a || *b).collect()
            }
            Head::Ax => all_next(ks, right.unwrap()),
            Head::Ex => some_next(ks, right.unwrap()),
            head => ranked(ks, bound, head, left.map(|v| v.as_slice()), right.unwrap()),
        };
        if node.negated {
            for b in &mut states {
                *b = !*b;
            }
        }
        table.push(states);
    }
    Ok(table.swap_remove(f.root()))
}

/// Truth of `f` at one state under the bounded semantics.
pub fn check_bounded(
    ks: &KripkeStructure,
    q: StateId,
    f: &Formula,
    bound: &DiameterBound,
) -> Result<bool, CheckError> {
    Ok(satisfying_states_bounded(ks, f, bound)?[q])
}

/// Rank table for one temporal node. `guard` is the left-hand side of an
/// until; `target` is the unary child or the right-hand side.
fn ranked(
    ks: &KripkeStructure,
    bound: &DiameterBound,
    head: Head,
    guard: Option<&[bool]>,
    target: &[bool],
) -> Vec<bool> {
    debug_assert!(head.is_ranked_temporal());
    let universal = matches!(head, Head::Af | Head::Ag | Head::Au);
    let globally = matches!(head, Head::Ag | Head::Eg);

    // ranks[q][u] for u in 0..=bound(q); rank 0 is the target itself.
    let mut ranks: Vec<Vec<bool>> =
        ks.states().map(|q| vec![target[q]; bound.of(q) + 1]).collect();
    let max_rank = bound.max();
    for u in 1..=max_rank {
        for q in ks.states() {
            if u > bound.of(q) {
                continue;
            }
            let spread = |q2: StateId| ranks[q2][bound.of(q2).min(u - 1)];
            let next = if universal {
                ks.successors(q).iter().all(|&q2| spread(q2))
            } else {
                ks.successors(q).iter().any(|&q2| spread(q2))
            };
            ranks[q][u] = match head {
                Head::Af | Head::Ef => target[q] || next,
                Head::Ag | Head::Eg => target[q] && next,
                Head::Au | Head::Eu => target[q] || (guard.unwrap()[q] && next),
                _ => unreachable!(),
            };
            // Rank truth spreads monotonically: upward for the finally and
            // until operators, downward for globally.
            if globally {
                debug_assert!(ranks[q][u] <= ranks[q][u - 1]);
            } else {
                debug_assert!(ranks[q][u] >= ranks[q][u - 1]);
            }
        }
    }
    ks.states().map(|q| ranks[q][bound.of(q)]).collect()
}

/// True when the formula holds on every positive state and no negative one.
pub fn consistent_with(sample: &Sample, f: &Formula) -> Result<bool, CheckError> {
    let states = satisfying_states(&sample.structure, f)?;
    Ok(sample.positives.iter().all(|&q| states[q])
        && sample.negatives.iter().all(|&q| !states[q]))
}
