//! Upper bounds on the recurrence diameter.
//!
//! The recurrence diameter of a state is the length of the longest simple
//! path starting there; computing it exactly is NP-hard, so the encoder
//! works with a per-state upper bound instead. Two bounds are provided: the
//! coarse `|Q| - 1` and a finer one obtained from the condensation of the
//! structure, where a path may at best visit every state of each strongly
//! connected component it crosses.

use crate::kripke::{KripkeStructure, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterKind {
    Coarse,
    Scc,
}

impl DiameterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiameterKind::Coarse => "coarse",
            DiameterKind::Scc => "scc",
        }
    }
}

/// A per-state upper bound on the recurrence diameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiameterBound {
    pub kind: DiameterKind,
    pub per_state: Vec<usize>,
}

impl DiameterBound {
    pub fn of(&self, q: StateId) -> usize {
        self.per_state[q]
    }

    pub fn max(&self) -> usize {
        self.per_state.iter().copied().max().unwrap_or(0)
    }
}

/// The constant bound `|Q| - 1`.
pub fn coarse_bound(ks: &KripkeStructure) -> DiameterBound {
    let n = ks.state_count();
    DiameterBound { kind: DiameterKind::Coarse, per_state: vec![n - 1; n] }
}

/// Condensation-based bound: weight each component of the condensation by
/// its size; the bound of `q` is the heaviest condensation path starting at
/// `q`'s component, minus one so that `q` itself is not counted.
pub fn scc_bound(ks: &KripkeStructure) -> DiameterBound {
    let sccs = tarjan_scc(ks);
    let comp_count = sccs.component_count;
    let mut weight = vec![0usize; comp_count];
    for q in ks.states() {
        weight[sccs.component_of[q]] += 1;
    }

    // Tarjan emits components in reverse topological order: every edge goes
    // from a higher component index to a lower or equal one, so a single
    // forward pass is a topological-order dynamic program.
    let mut heaviest = weight.clone();
    for comp in 0..comp_count {
        let mut best_succ = 0;
        for &q in &sccs.members[comp] {
            for &q2 in ks.successors(q) {
                let c2 = sccs.component_of[q2];
                if c2 != comp {
                    debug_assert!(c2 < comp, "condensation edge must respect emission order");
                    best_succ = best_succ.max(heaviest[c2]);
                }
            }
        }
        heaviest[comp] += best_succ;
    }

    let per_state = ks.states().map(|q| heaviest[sccs.component_of[q]] - 1).collect();
    DiameterBound { kind: DiameterKind::Scc, per_state }
}

struct SccResult {
    component_of: Vec<usize>,
    members: Vec<Vec<StateId>>,
    component_count: usize,
}

/// Iterative Tarjan over the successor lists.
fn tarjan_scc(ks: &KripkeStructure) -> SccResult {
    const UNSET: usize = usize::MAX;
    let n = ks.state_count();
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<StateId> = Vec::new();
    let mut next_index = 0;
    let mut component_of = vec![UNSET; n];
    let mut members: Vec<Vec<StateId>> = Vec::new();

    // (state, next successor position to explore)
    let mut call_stack: Vec<(StateId, usize)> = Vec::new();

    for start in ks.states() {
        if index[start] != UNSET {
            continue;
        }
        call_stack.push((start, 0));
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut pos)) = call_stack.last_mut() {
            if let Some(&w) = ks.successors(v).get(*pos) {
                *pos += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call_stack.pop();
                if let Some(&mut (parent, _)) = call_stack.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let comp = members.len();
                    let mut comp_members = Vec::new();
                    loop {
                        let w = stack.pop().expect("scc stack underflow");
                        on_stack[w] = false;
                        component_of[w] = comp;
                        comp_members.push(w);
                        if w == v {
                            break;
                        }
                    }
                    members.push(comp_members);
                }
            }
        }
    }

    let component_count = members.len();
    SccResult { component_of, members, component_count }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::KripkeStructure;
    use std::collections::BTreeSet;

    fn ks(transitions: Vec<Vec<StateId>>) -> KripkeStructure {
        let n = transitions.len();
        KripkeStructure::new(transitions, vec![BTreeSet::new(); n], vec![]).unwrap()
    }

    /// Seven states: one source, a three-cycle, a two-cycle, one sink.
    pub(crate) fn condensation_example() -> KripkeStructure {
        ks(vec![
            vec![1, 4],
            vec![2],
            vec![3, 6],
            vec![1],
            vec![5, 6],
            vec![4],
            vec![6],
        ])
    }

    #[test]
    fn coarse_bound_of_self_loop_is_zero() {
        let b = coarse_bound(&ks(vec![vec![0]]));
        assert_eq!(b.per_state, vec![0]);
    }

    #[test]
    fn coarse_bound_is_constant() {
        assert_eq!(coarse_bound(&condensation_example()).per_state, vec![6; 7]);
        let cycle = ks(vec![vec![1], vec![2], vec![0]]);
        assert_eq!(coarse_bound(&cycle).per_state, vec![2; 3]);
    }

    #[test]
    fn scc_bound_on_condensation_example() {
        let b = scc_bound(&condensation_example());
        assert_eq!(b.per_state, vec![4, 3, 3, 3, 2, 2, 0]);
    }

    #[test]
    fn scc_bound_on_chain() {
        let chain = ks(vec![vec![1], vec![2], vec![2]]);
        assert_eq!(scc_bound(&chain).per_state, vec![2, 1, 0]);
    }

    #[test]
    fn scc_bound_on_cycle() {
        let cycle = ks(vec![vec![1], vec![2], vec![0]]);
        assert_eq!(scc_bound(&cycle).per_state, vec![2, 2, 2]);
    }
}
