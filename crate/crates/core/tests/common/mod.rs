//! Shared helpers for the integration suites: structure constructors,
//! seeded random generators, the brute-force formula-enumeration oracle,
//! and the deterministic benchmark corpus.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctlsynth::benchgen::{self, MutantSample};
use ctlsynth::ctl::{self, Formula, FormulaBuilder, Fragment, Head};
use ctlsynth::kripke::{KripkeStructure, Sample, StateId};

pub fn ks(
    transitions: Vec<Vec<StateId>>,
    labels: Vec<&[usize]>,
    atoms: &[&str],
) -> KripkeStructure {
    KripkeStructure::new(
        transitions,
        labels.into_iter().map(|l| l.iter().copied().collect::<BTreeSet<_>>()).collect(),
        atoms.iter().map(|s| s.to_string()).collect(),
    )
    .unwrap()
}

pub fn sample(structure: KripkeStructure, pos: &[StateId], neg: &[StateId]) -> Sample {
    Sample {
        structure,
        positives: pos.iter().copied().collect(),
        negatives: neg.iter().copied().collect(),
    }
}

/// Seven states: a source over a three-cycle and a two-cycle, one sink.
pub fn condensation_example() -> KripkeStructure {
    ks(
        vec![vec![1, 4], vec![2], vec![3, 6], vec![1], vec![5, 6], vec![4], vec![6]],
        vec![&[], &[], &[], &[], &[], &[], &[]],
        &[],
    )
}

/// Three-cycle with every state labelled by the single atom.
pub fn labelled_cycle() -> KripkeStructure {
    ks(vec![vec![1], vec![2], vec![0]], vec![&[0], &[0], &[0]], &["a"])
}

/// Random total structure with `state_count` states over `atom_count`
/// atoms named a, b, c, ...
pub fn random_structure(
    rng: &mut ChaCha8Rng,
    state_count: usize,
    atom_count: usize,
) -> KripkeStructure {
    let atoms: Vec<String> =
        (0..atom_count).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut transitions = Vec::with_capacity(state_count);
    let mut labels = Vec::with_capacity(state_count);
    for _ in 0..state_count {
        let mut succs = BTreeSet::new();
        succs.insert(rng.gen_range(0..state_count));
        for q in 0..state_count {
            if rng.gen_bool(1.5 / state_count as f64) {
                succs.insert(q);
            }
        }
        transitions.push(succs.into_iter().collect::<Vec<_>>());
        labels.push((0..atom_count).filter(|_| rng.gen_bool(0.5)).collect::<BTreeSet<_>>());
    }
    KripkeStructure::new(transitions, labels, atoms).unwrap()
}

/// Random plain formula of the full logic with at most `budget` nodes in
/// its syntactic tree.
pub fn random_formula(rng: &mut ChaCha8Rng, atom_count: usize, budget: usize) -> Formula {
    if budget <= 1 {
        return if atom_count > 0 && rng.gen_bool(0.8) {
            Formula::atom(rng.gen_range(0..atom_count))
        } else {
            Formula::top()
        };
    }
    match rng.gen_range(0..9) {
        0 => random_formula(rng, atom_count, budget - 1).not(),
        1 => {
            let left = random_formula(rng, atom_count, (budget - 1) / 2 + 1);
            let right = random_formula(rng, atom_count, (budget - 1) / 2 + 1);
            if rng.gen_bool(0.5) {
                left.and(&right)
            } else {
                left.or(&right)
            }
        }
        2 => random_formula(rng, atom_count, budget - 1).ax(),
        3 => random_formula(rng, atom_count, budget - 1).ex(),
        4 => random_formula(rng, atom_count, budget - 1).af(),
        5 => random_formula(rng, atom_count, budget - 1).ag(),
        6 => random_formula(rng, atom_count, budget - 1).ef(),
        7 => random_formula(rng, atom_count, budget - 1).eg(),
        _ => {
            let left = random_formula(rng, atom_count, (budget - 1) / 2 + 1);
            let right = random_formula(rng, atom_count, (budget - 1) / 2 + 1);
            if rng.gen_bool(0.5) {
                left.au(&right)
            } else {
                left.eu(&right)
            }
        }
    }
}

/// All plain formulas of the fragment whose syntax DAG has exactly `size`
/// nodes (up to isomorphism): node tuples are pairwise distinct and every
/// node is reachable from the root.
pub fn enumerate_exact(fragment: Fragment, atom_count: usize, size: usize) -> Vec<Formula> {
    let mut heads: Vec<Head> = (0..atom_count).map(Head::Atom).collect();
    heads.push(Head::True);
    heads.extend(fragment.operator_heads());
    let mut nodes: Vec<(Head, usize, usize)> = Vec::new();
    let mut out = Vec::new();
    enumerate_rec(&heads, size, &mut nodes, &mut out);
    out
}

fn enumerate_rec(
    heads: &[Head],
    size: usize,
    nodes: &mut Vec<(Head, usize, usize)>,
    out: &mut Vec<Formula>,
) {
    if nodes.len() == size {
        if !all_reachable(nodes) {
            return;
        }
        let mut builder = FormulaBuilder::new();
        for &(head, l, r) in nodes.iter() {
            let left = (l != 0).then(|| l - 1);
            let right = (r != 0).then(|| r - 1);
            builder.add(false, head, left, right);
        }
        let formula = builder.finish(size - 1);
        debug_assert_eq!(formula.size(), size);
        out.push(formula);
        return;
    }
    let i = nodes.len() + 1;
    for &head in heads {
        match head.arity() {
            0 => {
                nodes.push((head, 0, 0));
                if nodes.iter().take(nodes.len() - 1).all(|&n| n != (head, 0, 0)) {
                    enumerate_rec(heads, size, nodes, out);
                }
                nodes.pop();
            }
            1 => {
                for r in 1..i {
                    nodes.push((head, 0, r));
                    if nodes.iter().take(nodes.len() - 1).all(|&n| n != (head, 0, r)) {
                        enumerate_rec(heads, size, nodes, out);
                    }
                    nodes.pop();
                }
            }
            _ => {
                for l in 1..i {
                    for r in 1..i {
                        nodes.push((head, l, r));
                        if nodes.iter().take(nodes.len() - 1).all(|&n| n != (head, l, r)) {
                            enumerate_rec(heads, size, nodes, out);
                        }
                        nodes.pop();
                    }
                }
            }
        }
    }
}

fn all_reachable(nodes: &[(Head, usize, usize)]) -> bool {
    let size = nodes.len();
    let mut seen = vec![false; size + 1];
    let mut stack = vec![size];
    while let Some(i) = stack.pop() {
        if seen[i] {
            continue;
        }
        seen[i] = true;
        let (_, l, r) = nodes[i - 1];
        for c in [l, r] {
            if c != 0 {
                stack.push(c);
            }
        }
    }
    (1..=size).all(|i| seen[i])
}

/// Smallest fragment-formula size consistent with the sample, found by
/// exhaustive enumeration plus fixpoint checking; `None` above `cap`.
pub fn minimal_size_oracle(s: &Sample, fragment: Fragment, cap: usize) -> Option<usize> {
    for size in 1..=cap {
        for formula in enumerate_exact(fragment, s.structure.atom_count(), size) {
            if ctl::consistent_with(s, &formula).unwrap() {
                return Some(size);
            }
        }
    }
    None
}

/// Like [`minimal_size_oracle`] but reusing a pre-computed enumeration
/// (indexed by size - 1).
pub fn oracle_with(s: &Sample, enumerations: &[Vec<Formula>]) -> Option<usize> {
    for (idx, formulas) in enumerations.iter().enumerate() {
        if formulas.iter().any(|f| ctl::consistent_with(s, f).unwrap()) {
            return Some(idx + 1);
        }
    }
    None
}

/// Base structures for the mutation corpus: small, two atoms each.
pub fn corpus_bases() -> Vec<KripkeStructure> {
    vec![
        ks(
            vec![vec![1], vec![2], vec![0]],
            vec![&[0], &[], &[1]],
            &["a", "b"],
        ),
        ks(
            vec![vec![1, 2], vec![0], vec![2]],
            vec![&[0], &[0, 1], &[]],
            &["a", "b"],
        ),
        ks(
            vec![vec![1], vec![2], vec![3], vec![0]],
            vec![&[], &[0], &[], &[1]],
            &["a", "b"],
        ),
        ks(
            vec![vec![0, 1], vec![2, 3], vec![2], vec![4], vec![3]],
            vec![&[0], &[], &[1], &[0, 1], &[]],
            &["a", "b"],
        ),
        ks(
            vec![vec![1, 3], vec![2], vec![1], vec![3]],
            vec![&[], &[0], &[1], &[0]],
            &["a", "b"],
        ),
        ks(
            vec![vec![1], vec![0]],
            vec![&[0], &[1]],
            &["a", "b"],
        ),
    ]
}

/// Deterministic corpus of consistent mutation samples whose minimal size
/// is at most 4 in every fragment. At least `want` samples.
pub fn learning_corpus(want: usize) -> Vec<Sample> {
    let enumerations: Vec<(Fragment, Vec<Vec<Formula>>)> =
        [Fragment::Ctl, Fragment::CtlUniv, Fragment::CtlU]
            .into_iter()
            .map(|frag| {
                (frag, (1..=4).map(|m| enumerate_exact(frag, 2, m)).collect())
            })
            .collect();
    let mut out = Vec::new();
    let bases = corpus_bases();
    'outer: for k in 1..=3 {
        for seed in 0..40u64 {
            for base in &bases {
                if let Ok(MutantSample::Consistent { sample, .. }) =
                    benchgen::make_sample(base, "base", k, seed)
                {
                    if enumerations.iter().all(|(_, en)| oracle_with(&sample, en).is_some()) {
                        out.push(sample);
                        if out.len() >= want {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    assert!(out.len() >= want, "corpus generation fell short: {}", out.len());
    out
}

/// Exhaustive recurrence diameter: longest simple path from each state,
/// by depth-first search. Exponential; test-only, for small structures.
pub fn exhaustive_recurrence_diameter(ks: &KripkeStructure) -> Vec<usize> {
    fn dfs(ks: &KripkeStructure, q: StateId, visited: &mut Vec<bool>) -> usize {
        let mut best = 0;
        for &q2 in ks.successors(q) {
            if !visited[q2] {
                visited[q2] = true;
                best = best.max(1 + dfs(ks, q2, visited));
                visited[q2] = false;
            }
        }
        best
    }
    ks.states()
        .map(|q| {
            let mut visited = vec![false; ks.state_count()];
            visited[q] = true;
            dfs(ks, q, &mut visited)
        })
        .collect()
}

/// Random consistent samples: unions of 2-4 random structures with at
/// least one initial state on each side, filtered for consistency.
pub fn random_consistent_samples(
    count: usize,
    max_union_states: usize,
    seed_base: u64,
) -> Vec<Sample> {
    let mut out = Vec::new();
    let mut seed = seed_base;
    while out.len() < count {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let instances = rng.gen_range(2..=4usize);
        let per = (max_union_states / instances).max(2);
        let mut transitions: Vec<Vec<StateId>> = Vec::new();
        let mut labels: Vec<BTreeSet<usize>> = Vec::new();
        let mut initials = Vec::new();
        let mut atoms: Vec<String> = Vec::new();
        let atom_count = rng.gen_range(1..=2usize);
        for i in 0..atom_count {
            atoms.push(((b'a' + i as u8) as char).to_string());
        }
        for _ in 0..instances {
            let part = random_structure(&mut rng, rng.gen_range(2..=per), atom_count);
            let offset = transitions.len();
            initials.push(offset);
            for q in part.states() {
                transitions
                    .push(part.successors(q).iter().map(|&q2| q2 + offset).collect());
                labels.push(part.label(q).clone());
            }
        }
        let structure = KripkeStructure::new(transitions, labels, atoms).unwrap();
        // split initial states over the two sides, at least one each
        let split = rng.gen_range(1..initials.len());
        let s = Sample {
            structure,
            positives: initials[..split].iter().copied().collect(),
            negatives: initials[split..].iter().copied().collect(),
        };
        let result = ctlsynth::bisim::refine(&s.structure);
        if ctlsynth::bisim::check_sample(&result, &s).is_ok() {
            out.push(s);
        }
    }
    out
}
