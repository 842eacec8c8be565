//! Bisimulation by partition refinement.
//!
//! The refinement sequence starts from the label partition and repeatedly
//! splits classes by the set of successor classes until it stabilizes. The
//! whole history of rounds is kept: the explicit distinguishing-formula
//! construction needs membership queries against intermediate rounds, not
//! just the fixed point.

use std::collections::BTreeSet;
use std::collections::HashMap;

use thiserror::Error;

use crate::kripke::{KripkeStructure, Sample, StateId};

pub type ClassId = usize;

/// One equivalence relation of the refinement sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    /// Class of each state. Classes are numbered by their smallest member,
    /// in state order.
    pub class_of: Vec<ClassId>,
    /// Members of each class, ascending.
    pub classes: Vec<Vec<StateId>>,
    /// Which refinement round this partition represents.
    pub round: usize,
}

impl Partition {
    pub fn same_class(&self, q1: StateId, q2: StateId) -> bool {
        self.class_of[q1] == self.class_of[q2]
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// The refinement history, rounds `0..=characteristic_number`.
#[derive(Debug, Clone)]
pub struct BisimResult {
    history: Vec<Partition>,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("positive state {positive} is bisimilar to negative state {negative}")]
pub struct SampleViolation {
    pub positive: StateId,
    pub negative: StateId,
}

impl BisimResult {
    /// Round at which refinement stabilizes.
    pub fn characteristic_number(&self) -> usize {
        self.history.len() - 1
    }

    pub fn history(&self) -> &[Partition] {
        &self.history
    }

    /// The coarsest bisimulation.
    pub fn final_partition(&self) -> &Partition {
        self.history.last().expect("history is never empty")
    }

    /// Equivalence at a given round; rounds past stabilization coincide
    /// with the final partition.
    pub fn equivalent_at(&self, round: usize, q1: StateId, q2: StateId) -> bool {
        let round = round.min(self.characteristic_number());
        self.history[round].same_class(q1, q2)
    }

    pub fn bisimilar(&self, q1: StateId, q2: StateId) -> bool {
        self.final_partition().same_class(q1, q2)
    }

    /// Smallest round separating the pair; `None` when bisimilar.
    pub fn pair_characteristic(&self, q1: StateId, q2: StateId) -> Option<usize> {
        if self.bisimilar(q1, q2) {
            return None;
        }
        Some(
            (0..=self.characteristic_number())
                .find(|&i| !self.history[i].same_class(q1, q2))
                .expect("a dissimilar pair separates at some round"),
        )
    }
}

/// Groups states by a signature, assigning class ids in order of first
/// occurrence (so classes are numbered by smallest member).
fn group_by<S: std::hash::Hash + Eq>(signatures: Vec<S>, round: usize) -> Partition {
    let mut ids: HashMap<S, ClassId> = HashMap::new();
    let mut class_of = Vec::with_capacity(signatures.len());
    let mut classes: Vec<Vec<StateId>> = Vec::new();
    for (q, sig) in signatures.into_iter().enumerate() {
        let next = classes.len();
        let class = *ids.entry(sig).or_insert(next);
        if class == next {
            classes.push(Vec::new());
        }
        class_of.push(class);
        classes[class].push(q);
    }
    Partition { class_of, classes, round }
}

/// Computes the coarsest bisimulation and the full refinement history.
pub fn refine(ks: &KripkeStructure) -> BisimResult {
    let labels: Vec<_> = ks.states().map(|q| ks.label(q).clone()).collect();
    let mut history = vec![group_by(labels, 0)];
    loop {
        let current = history.last().unwrap();
        let signatures: Vec<(ClassId, BTreeSet<ClassId>)> = ks
            .states()
            .map(|q| {
                let succ_classes: BTreeSet<ClassId> =
                    ks.successors(q).iter().map(|&q2| current.class_of[q2]).collect();
                (current.class_of[q], succ_classes)
            })
            .collect();
        let next = group_by(signatures, current.round + 1);
        // Refinement only ever splits classes, so an unchanged count means
        // an unchanged partition.
        debug_assert!(next.class_count() >= current.class_count());
        if next.class_count() == current.class_count() {
            return BisimResult { history };
        }
        history.push(next);
    }
}

/// Characteristic number of the sample: the smallest round at which every
/// positive state is separated from every negative one. The first bisimilar
/// cross pair (in state order) is reported as a violation.
pub fn check_sample(result: &BisimResult, sample: &Sample) -> Result<usize, SampleViolation> {
    let mut needed = 0;
    for &qp in &sample.positives {
        for &qn in &sample.negatives {
            match result.pair_characteristic(qp, qn) {
                Some(c) => needed = needed.max(c),
                None => return Err(SampleViolation { positive: qp, negative: qn }),
            }
        }
    }
    Ok(needed)
}

/// Quotient of the sample by the coarsest bisimulation. Each class is
/// represented by its smallest state; the positive and negative sets map to
/// class representatives (duplicates collapse).
pub fn minimize(result: &BisimResult, sample: &Sample) -> Result<Sample, SampleViolation> {
    check_sample(result, sample)?;
    let partition = result.final_partition();
    let ks = &sample.structure;
    let mut transitions = Vec::with_capacity(partition.class_count());
    let mut labels = Vec::with_capacity(partition.class_count());
    for members in &partition.classes {
        let rep = members[0];
        let succ: BTreeSet<ClassId> =
            ks.successors(rep).iter().map(|&q2| partition.class_of[q2]).collect();
        transitions.push(succ.into_iter().collect::<Vec<_>>());
        labels.push(ks.label(rep).clone());
    }
    let structure = KripkeStructure::new(transitions, labels, ks.atom_names().to_vec())
        .expect("quotient of a valid structure is valid");
    let positives = sample.positives.iter().map(|&q| partition.class_of[q]).collect();
    let negatives = sample.negatives.iter().map(|&q| partition.class_of[q]).collect();
    Ok(Sample { structure, positives, negatives })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ks(transitions: Vec<Vec<StateId>>, labels: Vec<&[usize]>, atoms: &[&str]) -> KripkeStructure {
        KripkeStructure::new(
            transitions,
            labels.into_iter().map(|l| l.iter().copied().collect::<BTreeSet<_>>()).collect(),
            atoms.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    fn sample(structure: KripkeStructure, pos: &[StateId], neg: &[StateId]) -> Sample {
        Sample {
            structure,
            positives: pos.iter().copied().collect(),
            negatives: neg.iter().copied().collect(),
        }
    }

    #[test]
    fn uniform_cycle_collapses_to_one_class() {
        let m = ks(vec![vec![1], vec![2], vec![0]], vec![&[0], &[0], &[0]], &["a"]);
        let r = refine(&m);
        assert_eq!(r.characteristic_number(), 0);
        assert_eq!(r.final_partition().class_count(), 1);
        assert_eq!(r.history().len(), 1);
    }

    #[test]
    fn label_split_at_round_zero() {
        let m = ks(vec![vec![0], vec![1]], vec![&[0], &[]], &["a"]);
        let r = refine(&m);
        assert_eq!(r.characteristic_number(), 0);
        assert_eq!(r.final_partition().class_count(), 2);
    }

    #[test]
    fn deterministic_unlabelled_states_are_all_bisimilar() {
        // Chain into a self-loop plus a detached self-loop: every state has
        // exactly one successor and the empty label, so one class remains.
        let m = ks(
            vec![vec![1], vec![2], vec![2], vec![3]],
            vec![&[], &[], &[], &[]],
            &[],
        );
        let r = refine(&m);
        assert_eq!(r.final_partition().class_count(), 1);
        assert_eq!(r.characteristic_number(), 0);
        assert!(r.bisimilar(2, 3));
        assert!(r.bisimilar(0, 1));
    }

    #[test]
    fn sample_characteristic_zero_on_label_difference() {
        let m = ks(vec![vec![0], vec![1]], vec![&[0], &[]], &["a"]);
        let r = refine(&m);
        let c = check_sample(&r, &sample(m, &[0], &[1])).unwrap();
        assert_eq!(c, 0);
    }

    #[test]
    fn identical_states_violate_the_sample() {
        let m = ks(vec![vec![0], vec![1]], vec![&[0], &[0]], &["a"]);
        let r = refine(&m);
        let err = check_sample(&r, &sample(m, &[0], &[1])).unwrap_err();
        assert_eq!(err, SampleViolation { positive: 0, negative: 1 });
    }

    #[test]
    fn one_refinement_round_separates_successor_labels() {
        // q0 -> q1 (labelled a, loop), q2 -> q3 (unlabelled, loop)
        let m = ks(
            vec![vec![1], vec![1], vec![3], vec![3]],
            vec![&[], &[0], &[], &[]],
            &["a"],
        );
        let r = refine(&m);
        assert_eq!(r.pair_characteristic(0, 2), Some(1));
        let c = check_sample(&r, &sample(m, &[0], &[2])).unwrap();
        assert_eq!(c, 1);
    }

    #[test]
    fn history_is_strictly_refining() {
        let m = ks(
            vec![vec![1], vec![2], vec![3], vec![3]],
            vec![&[], &[], &[], &[0]],
            &["a"],
        );
        let r = refine(&m);
        for pair in r.history().windows(2) {
            assert!(pair[1].class_count() > pair[0].class_count());
            // refinement: same class later implies same class earlier
            for q1 in 0..m_state_count(&pair[0]) {
                for q2 in 0..m_state_count(&pair[0]) {
                    if pair[1].same_class(q1, q2) {
                        assert!(pair[0].same_class(q1, q2));
                    }
                }
            }
        }
        assert_eq!(r.history().len(), r.characteristic_number() + 1);
    }

    fn m_state_count(p: &Partition) -> usize {
        p.class_of.len()
    }

    #[test]
    fn quotient_of_cycle_and_fresh_loop() {
        // Uniform 3-cycle (positive) next to a fresh `b` self-loop
        // (negative): two classes remain.
        let m = ks(
            vec![vec![1], vec![2], vec![0], vec![3]],
            vec![&[0], &[0], &[0], &[1]],
            &["a", "b"],
        );
        let r = refine(&m);
        let min = minimize(&r, &sample(m, &[0], &[3])).unwrap();
        assert_eq!(min.structure.state_count(), 2);
        assert_eq!(min.positives, [0].into_iter().collect::<BTreeSet<_>>());
        assert_eq!(min.negatives, [1].into_iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn minimization_is_idempotent_on_minimal_samples() {
        let m = ks(vec![vec![0], vec![1]], vec![&[0], &[]], &["a"]);
        let s = sample(m, &[0], &[1]);
        let r = refine(&s.structure);
        let min = minimize(&r, &s).unwrap();
        assert_eq!(min.structure.state_count(), 2);
        let r2 = refine(&min.structure);
        let min2 = minimize(&r2, &min).unwrap();
        assert_eq!(min2.structure, min.structure);
    }

    #[test]
    fn bisimilar_copies_collapse_in_the_quotient() {
        // Two copies of the same positive structure and one negative.
        let m = ks(
            vec![vec![0], vec![1], vec![2]],
            vec![&[0], &[0], &[]],
            &["a"],
        );
        let r = refine(&m);
        let min = minimize(&r, &sample(m, &[0, 1], &[2])).unwrap();
        assert_eq!(min.structure.state_count(), 2);
        assert_eq!(min.positives.len(), 1);
    }

    #[test]
    fn minimize_propagates_inconsistency() {
        let m = ks(vec![vec![0], vec![1]], vec![&[], &[]], &[]);
        let r = refine(&m);
        let err = minimize(&r, &sample(m, &[0], &[1])).unwrap_err();
        assert_eq!(err, SampleViolation { positive: 0, negative: 1 });
    }
}
