//! The condensation bound against the brute-force recurrence diameter.

mod common;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctlsynth::diameter::{coarse_bound, scc_bound};
use ctlsynth::kripke::KripkeStructure;

#[test]
fn bounds_dominate_the_exact_diameter() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states = rng.gen_range(1..=10);
        let ks = common::random_structure(&mut rng, states, 1);
        let exact = common::exhaustive_recurrence_diameter(&ks);
        let scc = scc_bound(&ks);
        let coarse = coarse_bound(&ks);
        for q in ks.states() {
            assert!(
                scc.of(q) >= exact[q],
                "seed {seed}: scc bound {} below diameter {} at state {q}",
                scc.of(q),
                exact[q]
            );
            assert!(scc.of(q) <= states - 1, "scc bound must not exceed the coarse one");
            assert_eq!(coarse.of(q), states - 1);
        }
    }
}

/// On a forward-edge DAG whose only cycles are sink self-loops, the
/// condensation bound is exact.
#[test]
fn exact_on_dags_with_sink_loops() {
    for seed in 0..60u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let states = rng.gen_range(2..=9);
        let mut transitions: Vec<Vec<usize>> = vec![Vec::new(); states];
        for q in 0..states {
            for q2 in (q + 1)..states {
                if rng.gen_bool(0.4) {
                    transitions[q].push(q2);
                }
            }
            if transitions[q].is_empty() {
                // sinks keep totality through a self-loop
                transitions[q].push(q);
            }
        }
        let ks = KripkeStructure::new(
            transitions,
            vec![BTreeSet::new(); states],
            vec![],
        )
        .unwrap();
        let exact = common::exhaustive_recurrence_diameter(&ks);
        let scc = scc_bound(&ks);
        assert_eq!(scc.per_state, exact, "seed {seed}");
    }
}
