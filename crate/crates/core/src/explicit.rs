//! Explicit separating formulas.
//!
//! For any two dissimilar states a distinguishing formula can be read off
//! the refinement history: either the labels differ and a literal suffices,
//! or one state has a successor that no successor of the other matches one
//! round earlier, which yields an `EX` (or dually `AX !`) step around the
//! recursively built distinguishers. Combining the pairwise formulas over a
//! sample gives a formula consistent with it, entirely inside
//! `{!, &, |, AX, EX}`. It is a guaranteed solution, not a minimal one.

use std::collections::HashMap;

use thiserror::Error;

use crate::bisim::{BisimResult, SampleViolation};
use crate::ctl::{Formula, FormulaBuilder, Fragment, Head};
use crate::kripke::{KripkeStructure, Sample, StateId};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("states {0} and {1} are bisimilar, no formula distinguishes them")]
pub struct BisimilarStates(pub StateId, pub StateId);

struct Builder<'a> {
    ks: &'a KripkeStructure,
    bisim: &'a BisimResult,
    memo: HashMap<(StateId, StateId), Formula>,
}

impl Builder<'_> {
    /// Distinguisher for an ordered dissimilar pair: true on `q1`, false on
    /// `q2`. Ties break towards the smallest atom and the smallest witness
    /// successor.
    fn distinguish(&mut self, q1: StateId, q2: StateId) -> Formula {
        if let Some(f) = self.memo.get(&(q1, q2)) {
            return f.clone();
        }
        let c = self
            .bisim
            .pair_characteristic(q1, q2)
            .expect("distinguish called on a dissimilar pair");
        let formula = if c == 0 {
            let l1 = self.ks.label(q1);
            let l2 = self.ks.label(q2);
            match l1.difference(l2).next() {
                Some(&a) => Formula::atom(a),
                None => {
                    let &a = l2.difference(l1).next().expect("round-0 split means labels differ");
                    Formula::atom(a).not()
                }
            }
        } else {
            let succ1 = self.ks.successors(q1);
            let succ2 = self.ks.successors(q2);
            let separated =
                |a: StateId, b: StateId| !self.bisim.equivalent_at(c - 1, a, b);
            if let Some(&w) = succ1.iter().find(|&&q| succ2.iter().all(|&q2p| separated(q, q2p))) {
                // q1 has a successor no q2-successor can imitate.
                let parts: Vec<Formula> =
                    succ2.iter().map(|&q2p| self.recurse(c, w, q2p)).collect();
                Formula::conj(&parts).ex()
            } else {
                let &w = succ2
                    .iter()
                    .find(|&&q| succ1.iter().all(|&q1p| separated(q1p, q)))
                    .expect("a pair separated at round c splits on one side's successors");
                let parts: Vec<Formula> =
                    succ1.iter().map(|&q1p| self.recurse(c, w, q1p)).collect();
                Formula::conj(&parts).not().ax()
            }
        };
        self.memo.insert((q1, q2), formula.clone());
        formula
    }

    fn recurse(&mut self, parent_c: usize, q1: StateId, q2: StateId) -> Formula {
        debug_assert!(
            self.bisim.pair_characteristic(q1, q2).is_some_and(|c| c < parent_c),
            "recursion must strictly decrease the pair characteristic"
        );
        self.distinguish(q1, q2)
    }
}

/// Distinguishing formula for one dissimilar pair.
pub fn distinguish(
    ks: &KripkeStructure,
    bisim: &BisimResult,
    q1: StateId,
    q2: StateId,
) -> Result<Formula, BisimilarStates> {
    if bisim.bisimilar(q1, q2) {
        return Err(BisimilarStates(q1, q2));
    }
    let mut b = Builder { ks, bisim, memo: HashMap::new() };
    Ok(b.distinguish(q1, q2))
}

/// The separating formula of a sample: for each positive state the
/// conjunction of its distinguishers against all negative states, then the
/// disjunction over positive states.
pub fn separating_formula(
    sample: &Sample,
    bisim: &BisimResult,
) -> Result<Formula, SampleViolation> {
    let mut b = Builder { ks: &sample.structure, bisim, memo: HashMap::new() };
    for &qp in &sample.positives {
        for &qn in &sample.negatives {
            if bisim.bisimilar(qp, qn) {
                return Err(SampleViolation { positive: qp, negative: qn });
            }
        }
    }
    let mut arms = Vec::new();
    for &qp in &sample.positives {
        let parts: Vec<Formula> =
            sample.negatives.iter().map(|&qn| b.distinguish(qp, qn)).collect();
        arms.push(Formula::conj(&parts));
    }
    Ok(Formula::disj(&arms))
}

/// Size bound on the separating formula's syntactic tree, as a function of
/// the structure degree `k`, the sample characteristic number `c`, and the
/// sample cardinalities.
pub fn tree_size_bound(degree: usize, c: usize, positives: usize, negatives: usize) -> u128 {
    let pairs = (positives as u128).saturating_mul(negatives as u128);
    let per_pair = if degree >= 2 {
        (degree as u128).saturating_pow(c as u32).saturating_mul(5).saturating_add(1)
    } else {
        2 * c as u128 + 3
    };
    per_pair.saturating_mul(pairs)
}

/// Rewrites a formula over `{!, &, |, AX, EX}` into the given fragment,
/// preserving semantics: `EX` becomes `!AX!` for the universal fragment;
/// `&` and `AX` become `!(!..|!..)` and `!EX!` for the until fragment.
///
/// Panics on other operators; it exists to turn the explicit construction
/// into an in-fragment size cap for the learner.
pub fn into_fragment(f: &Formula, fragment: Fragment) -> Formula {
    if fragment == Fragment::Ctl {
        return f.clone();
    }
    let mut b = FormulaBuilder::new();
    let mut map = vec![0usize; f.size()];
    for (i, n) in f.nodes().iter().enumerate() {
        assert!(!n.negated, "explicit formulas are plain");
        let left = n.left.map(|c| map[c]);
        let right = n.right.map(|c| map[c]);
        let negated_unary = |b: &mut FormulaBuilder, head: Head, child: usize| {
            let inner = b.add(false, Head::Not, None, Some(child));
            let op = b.add(false, head, None, Some(inner));
            b.add(false, Head::Not, None, Some(op))
        };
        map[i] = match (n.head, fragment) {
            (Head::Ex, Fragment::CtlUniv) => negated_unary(&mut b, Head::Ax, right.unwrap()),
            (Head::Ax, Fragment::CtlU) => negated_unary(&mut b, Head::Ex, right.unwrap()),
            (Head::And, Fragment::CtlU) => {
                let nl = b.add(false, Head::Not, None, Some(left.unwrap()));
                let nr = b.add(false, Head::Not, None, Some(right.unwrap()));
                let or = b.add(false, Head::Or, Some(nl), Some(nr));
                b.add(false, Head::Not, None, Some(or))
            }
            (Head::True | Head::Atom(_) | Head::Not | Head::And | Head::Or | Head::Ax, _) => {
                b.add(false, n.head, left, right)
            }
            (Head::Ex, Fragment::CtlU) => b.add(false, n.head, left, right),
            (head, _) => panic!("into_fragment does not handle {head}"),
        };
    }
    let f = b.finish(map[f.root()]);
    debug_assert!(f.in_fragment(fragment));
    f
}
