//! Mutation-based benchmark generation.
//!
//! A `k`-mutant of a structure is obtained by applying `k` random edits:
//! relabelling a state, rerouting an outgoing edge to a fresh destination,
//! or splicing a new state into an edge. Every edit preserves totality.
//! Pairing a structure (positive) with one of its mutants (negative) and
//! coalescing yields a candidate sample; mutants that stay bisimilar to the
//! original are reported instead of emitted.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bisim;
use crate::kripke::{
    coalesce, AtomId, InputInstance, KripkeStructure, Polarity, Sample, StateId,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MutationOp {
    Relabel { state: StateId, old_label: BTreeSet<AtomId>, new_label: BTreeSet<AtomId> },
    /// `added` is empty when every state was already a successor but the
    /// edge could still be dropped.
    Reroute { from: StateId, removed: StateId, added: Option<StateId> },
    Spawn { from: StateId, via: StateId, to: StateId, label: BTreeSet<AtomId> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MutationError {
    #[error("at least one mutation is required")]
    ZeroMutations,
    #[error("no mutation rule is applicable to this structure")]
    NoApplicableRule,
}

const RETRIES: usize = 200;

struct Workspace {
    transitions: Vec<BTreeSet<StateId>>,
    labels: Vec<BTreeSet<AtomId>>,
    atom_count: usize,
}

impl Workspace {
    fn state_count(&self) -> usize {
        self.transitions.len()
    }

    fn random_label(&self, rng: &mut ChaCha8Rng) -> BTreeSet<AtomId> {
        (0..self.atom_count).filter(|_| rng.gen_bool(0.5)).collect()
    }

    fn relabel(&mut self, rng: &mut ChaCha8Rng) -> Option<MutationOp> {
        if self.atom_count == 0 {
            return None;
        }
        let state = rng.gen_range(0..self.state_count());
        let old_label = self.labels[state].clone();
        let new_label = loop {
            let candidate = self.random_label(rng);
            if candidate != old_label {
                break candidate;
            }
        };
        self.labels[state] = new_label.clone();
        Some(MutationOp::Relabel { state, old_label, new_label })
    }

    fn reroute(&mut self, rng: &mut ChaCha8Rng) -> Option<MutationOp> {
        let from = rng.gen_range(0..self.state_count());
        let successors: Vec<StateId> = self.transitions[from].iter().copied().collect();
        let removed = successors[rng.gen_range(0..successors.len())];
        let candidates: Vec<StateId> =
            (0..self.state_count()).filter(|q| !self.transitions[from].contains(q)).collect();
        if candidates.is_empty() {
            if self.transitions[from].len() == 1 {
                // dropping the only edge would break totality
                return None;
            }
            self.transitions[from].remove(&removed);
            return Some(MutationOp::Reroute { from, removed, added: None });
        }
        let added = candidates[rng.gen_range(0..candidates.len())];
        self.transitions[from].remove(&removed);
        self.transitions[from].insert(added);
        Some(MutationOp::Reroute { from, removed, added: Some(added) })
    }

    fn spawn(&mut self, rng: &mut ChaCha8Rng) -> Option<MutationOp> {
        let from = rng.gen_range(0..self.state_count());
        let successors: Vec<StateId> = self.transitions[from].iter().copied().collect();
        let to = successors[rng.gen_range(0..successors.len())];
        let via = self.state_count();
        let label = self.random_label(rng);
        self.transitions[from].remove(&to);
        self.transitions[from].insert(via);
        self.transitions.push([to].into_iter().collect());
        self.labels.push(label.clone());
        Some(MutationOp::Spawn { from, via, to, label })
    }
}

/// Applies `k` random mutations. Identical `(ks, k, seed)` yield identical
/// output; a rule drawn on a location where it does not apply is redrawn.
pub fn mutate(
    ks: &KripkeStructure,
    k: usize,
    seed: u64,
) -> Result<(KripkeStructure, Vec<MutationOp>), MutationError> {
    if k == 0 {
        return Err(MutationError::ZeroMutations);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut work = Workspace {
        transitions: ks
            .states()
            .map(|q| ks.successors(q).iter().copied().collect())
            .collect(),
        labels: ks.states().map(|q| ks.label(q).clone()).collect(),
        atom_count: ks.atom_count(),
    };
    let mut ops = Vec::with_capacity(k);
    for _ in 0..k {
        let mut applied = None;
        for _ in 0..RETRIES {
            let op = match rng.gen_range(0..3) {
                0 => work.relabel(&mut rng),
                1 => work.reroute(&mut rng),
                _ => work.spawn(&mut rng),
            };
            if let Some(op) = op {
                applied = Some(op);
                break;
            }
        }
        ops.push(applied.ok_or(MutationError::NoApplicableRule)?);
    }
    let mutant = KripkeStructure::new(
        work.transitions.into_iter().map(|s| s.into_iter().collect()).collect(),
        work.labels,
        ks.atom_names().to_vec(),
    )
    .expect("mutations preserve structure validity");
    Ok((mutant, ops))
}

/// Result of pairing a structure with one of its mutants.
#[derive(Debug)]
pub enum MutantSample {
    Consistent { instances: Vec<InputInstance>, sample: Sample, ops: Vec<MutationOp> },
    /// The mutant's initial state is bisimilar to the original's: no
    /// formula can tell them apart, so nothing is emitted.
    Bisimilar { mutant: KripkeStructure, ops: Vec<MutationOp> },
}

/// Mutates `ks` and builds the sample pairing the original (positive, from
/// state 0) with the mutant (negative). Consistency is checked through the
/// bisimulation engine.
pub fn make_sample(
    ks: &KripkeStructure,
    name: &str,
    k: usize,
    seed: u64,
) -> Result<MutantSample, MutationError> {
    let (mutant, ops) = mutate(ks, k, seed)?;
    let instances = vec![
        InputInstance {
            structure: ks.clone(),
            initial: 0,
            polarity: Polarity::Positive,
            name: name.to_string(),
        },
        InputInstance {
            structure: mutant.clone(),
            initial: 0,
            polarity: Polarity::Negative,
            name: format!("{name}-mut-k{k}-s{seed}"),
        },
    ];
    let sample = coalesce(&instances).expect("one positive and one negative instance");
    let result = bisim::refine(&sample.structure);
    match bisim::check_sample(&result, &sample) {
        Ok(_) => Ok(MutantSample::Consistent { instances, sample, ops }),
        Err(_) => Ok(MutantSample::Bisimilar { mutant, ops }),
    }
}
