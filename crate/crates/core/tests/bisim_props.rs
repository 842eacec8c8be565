//! Properties of the partition-refinement engine on random structures.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctlsynth::bisim::{check_sample, minimize, refine, Partition};
use ctlsynth::ctl;
use ctlsynth::kripke::{KripkeStructure, Sample};

/// Transfer condition of a candidate equivalence given as a class map:
/// related states agree on labels and can match each other's successors.
fn is_bisimulation(ks: &KripkeStructure, class_of: &[usize]) -> bool {
    for q1 in ks.states() {
        for q2 in ks.states() {
            if class_of[q1] != class_of[q2] {
                continue;
            }
            if ks.label(q1) != ks.label(q2) {
                return false;
            }
            let matched = ks.successors(q1).iter().all(|&s1| {
                ks.successors(q2).iter().any(|&s2| class_of[s1] == class_of[s2])
            });
            if !matched {
                return false;
            }
        }
    }
    true
}

fn merged_classes(partition: &Partition, c1: usize, c2: usize) -> Vec<usize> {
    partition
        .class_of
        .iter()
        .map(|&c| if c == c2 { c1 } else { c })
        .collect()
}

#[test]
fn final_partition_is_the_coarsest_bisimulation() {
    for seed in 0..60 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states = rng.gen_range(2..=12);
        let ks = common::random_structure(&mut rng, states, 2);
        let result = refine(&ks);
        let partition = result.final_partition();
        assert!(
            is_bisimulation(&ks, &partition.class_of),
            "seed {seed}: final partition is not a bisimulation"
        );
        // merging any two classes must break the transfer condition
        for c1 in 0..partition.class_count() {
            for c2 in (c1 + 1)..partition.class_count() {
                let merged = merged_classes(partition, c1, c2);
                assert!(
                    !is_bisimulation(&ks, &merged),
                    "seed {seed}: classes {c1} and {c2} can be merged"
                );
            }
        }
    }
}

#[test]
fn history_refines_strictly_then_stabilizes() {
    for seed in 0..60 {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
        let states = rng.gen_range(2..=12);
        let ks = common::random_structure(&mut rng, states, 2);
        let result = refine(&ks);
        let history = result.history();
        assert_eq!(history.len(), result.characteristic_number() + 1);
        for (round, partition) in history.iter().enumerate() {
            assert_eq!(partition.round, round);
        }
        for pair in history.windows(2) {
            assert!(pair[1].class_count() > pair[0].class_count());
            for q1 in ks.states() {
                for q2 in ks.states() {
                    if pair[1].same_class(q1, q2) {
                        assert!(pair[0].same_class(q1, q2), "later rounds only split");
                    }
                }
            }
        }
        // one more refinement round leaves the fixpoint unchanged
        let fixpoint = result.final_partition();
        assert!(is_bisimulation(&ks, &fixpoint.class_of));
    }
}

#[test]
fn quotient_preserves_model_checking() {
    let mut checked = 0;
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2_000 + seed);
        let states = rng.gen_range(2..=12);
        let ks = common::random_structure(&mut rng, states, 2);
        let result = refine(&ks);
        let partition = result.final_partition().clone();
        // a sample with every class on the positive side and nothing
        // negative is always consistent, which lets us take the quotient
        let s = Sample {
            structure: ks.clone(),
            positives: ks.states().collect(),
            negatives: Default::default(),
        };
        let quotient = minimize(&result, &s).unwrap();
        for _ in 0..8 {
            let f = common::random_formula(&mut rng, 2, 4);
            let original = ctl::satisfying_states(&ks, &f).unwrap();
            let reduced = ctl::satisfying_states(&quotient.structure, &f).unwrap();
            for q in ks.states() {
                assert_eq!(
                    original[q], reduced[partition.class_of[q]],
                    "seed {seed}: formula {} differs on state {q}",
                    f.to_text(ks.atom_names())
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 1_000);
}

#[test]
fn sample_characteristic_matches_pairwise_history() {
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3_000 + seed);
        let states = rng.gen_range(2..=10);
        let ks = common::random_structure(&mut rng, states, 1);
        let result = refine(&ks);
        let positives = [0usize];
        let negatives = [states - 1];
        let s = common::sample(ks, &positives, &negatives);
        match check_sample(&result, &s) {
            Ok(c) => {
                assert!(!result.equivalent_at(c, 0, states - 1));
                if c > 0 {
                    assert!(result.equivalent_at(c - 1, 0, states - 1));
                }
            }
            Err(v) => {
                assert!(result.bisimilar(v.positive, v.negative));
            }
        }
    }
}
