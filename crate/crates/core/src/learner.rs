//! The minimal learning loop.
//!
//! The sample is first validated (no positive state may be bisimilar to a
//! negative one) and minimized by the bisimulation quotient, since the
//! semantic clause count scales with the structure size. The loop then
//! solves the size-`n` encoding for n = 1, 2, ... and stops at the first
//! satisfiable bound; the decoded formula is re-checked with the fixpoint
//! model checker against the original, un-minimized sample before it is
//! returned. The explicit separating formula, rewritten into the target
//! fragment, caps the iteration: a solution no larger than it always
//! exists.

use std::time::Duration;

use thiserror::Error;

use crate::bisim::{self, SampleViolation};
use crate::ctl::{self, Formula, Fragment};
use crate::diameter::{coarse_bound, scc_bound, DiameterKind};
use crate::encoder::{self, EncodeOptions, TemporalSemantics};
use crate::explicit;
use crate::kripke::Sample;
use crate::sat::{self, SolverBackend, SolverStatus};

#[derive(Debug, Clone)]
pub struct LearnerConfig {
    pub fragment: Fragment,
    pub diameter: DiameterKind,
    pub embed_negations: bool,
    pub ascent_descent: bool,
    /// Upper bound on the formula size; defaults to the size of the
    /// explicit separating formula rewritten into the fragment.
    pub max_size: Option<usize>,
    pub solver: SolverBackend,
    /// Per-solver-call timeout.
    pub timeout: Option<Duration>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            fragment: Fragment::Ctl,
            diameter: DiameterKind::Scc,
            embed_negations: false,
            ascent_descent: true,
            max_size: None,
            solver: SolverBackend::Builtin,
            timeout: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IterationStats {
    pub n: usize,
    pub atlas_vars: u32,
    pub cnf_vars: u32,
    pub cnf_clauses: usize,
    pub solver_time: Duration,
    pub status: SolverStatus,
}

/// Context shared by the per-iteration stats: what the loop ran against.
#[derive(Debug, Clone)]
pub struct LearnStats {
    pub original_states: usize,
    pub minimized_states: usize,
    pub sample_characteristic: usize,
    pub positives: usize,
    pub negatives: usize,
    pub degree: usize,
    pub size_cap: usize,
    pub iterations: Vec<IterationStats>,
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub formula: Formula,
    /// Node count of the learnt DAG: the smallest satisfiable bound. With
    /// embedded negations this is the embedded metric, in which negations
    /// are free; the result is then minimal in that metric only.
    pub size: usize,
    /// Size after rewriting flags into explicit negation nodes; equals
    /// `size` in plain mode.
    pub plain_size: usize,
    pub embedded: bool,
    pub stats: LearnStats,
}

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("inconsistent sample: {0}")]
    InconsistentSample(#[from] SampleViolation),
    #[error("no formula of size up to {max} separates the sample")]
    SizeCapExhausted { max: usize },
    #[error("solver gave up at size {n} ({status}); a smaller formula may have been missed")]
    SolverUnknown { n: usize, status: &'static str },
    #[error(transparent)]
    Solver(#[from] sat::SolverError),
    #[error("decoded formula is malformed: {0}")]
    Decode(#[from] encoder::DecodeError),
    #[error("decoded formula fails the model-checking sanity check")]
    VerificationFailed { formula: Formula },
}

/// Runs the bottom-up loop and returns the smallest consistent formula.
pub fn learn(sample: &Sample, config: &LearnerConfig) -> Result<LearnOutcome, LearnError> {
    let bisim = bisim::refine(&sample.structure);
    let sample_characteristic = bisim::check_sample(&bisim, sample)?;
    let minimized = bisim::minimize(&bisim, sample)?;

    let bound = match config.diameter {
        DiameterKind::Coarse => coarse_bound(&minimized.structure),
        DiameterKind::Scc => scc_bound(&minimized.structure),
    };

    // A consistent formula of this size always exists, so the loop is a
    // bounded search even without a user cap.
    let min_bisim = bisim::refine(&minimized.structure);
    let witness = explicit::separating_formula(&minimized, &min_bisim)
        .expect("minimized sample stays consistent");
    let witness_size = explicit::into_fragment(&witness, config.fragment).size();
    let size_cap = config.max_size.unwrap_or(witness_size);

    let options = EncodeOptions {
        fragment: config.fragment,
        embed_negations: config.embed_negations,
        ascent_descent: config.ascent_descent,
        semantics: TemporalSemantics::Ranked,
    };

    let mut stats = LearnStats {
        original_states: sample.structure.state_count(),
        minimized_states: minimized.structure.state_count(),
        sample_characteristic,
        positives: minimized.positives.len(),
        negatives: minimized.negatives.len(),
        degree: minimized.structure.degree(),
        size_cap,
        iterations: Vec::new(),
    };

    for n in 1..=size_cap {
        let ctx = encoder::build(&minimized, n, &bound, &options)
            .expect("n >= 1 by construction");
        let cnf = ctx.to_cnf();
        let verdict = sat::solve(&cnf, &config.solver, config.timeout)?;
        stats.iterations.push(IterationStats {
            n,
            atlas_vars: ctx.var_count(),
            cnf_vars: cnf.var_count,
            cnf_clauses: cnf.clauses.len(),
            solver_time: verdict.stats.wall,
            status: verdict.status,
        });
        match verdict.status {
            SolverStatus::Unsat => continue,
            SolverStatus::Unknown => {
                // Skipping to n+1 would silently surrender minimality.
                return Err(LearnError::SolverUnknown { n, status: "unknown" });
            }
            SolverStatus::Sat => {
                let model = verdict.model.expect("sat verdicts carry a model");
                let formula = ctx.decode(&model)?;
                let consistent = ctl::consistent_with(sample, &formula)
                    .expect("decoded formulas only use declared atoms");
                if !consistent {
                    return Err(LearnError::VerificationFailed { formula });
                }
                let plain_size = formula.normalize().size();
                return Ok(LearnOutcome {
                    size: formula.size(),
                    plain_size,
                    embedded: config.embed_negations,
                    formula,
                    stats,
                });
            }
        }
    }
    Err(LearnError::SizeCapExhausted { max: size_cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{KripkeStructure, StateId};
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

    fn config(fragment: Fragment) -> LearnerConfig {
        LearnerConfig { fragment, ..LearnerConfig::default() }
    }

    #[test]
    fn distinct_atoms_need_one_node() {
        let m = ks(vec![vec![0], vec![1]], vec![&[0], &[1]], &["a", "b"]);
        let s = sample(m, &[0], &[1]);
        let outcome = learn(&s, &config(Fragment::Ctl)).unwrap();
        assert_eq!(outcome.size, 1);
        assert_eq!(outcome.formula, Formula::atom(0));
        assert_eq!(outcome.stats.iterations.len(), 1);
        assert_eq!(outcome.stats.iterations[0].status, SolverStatus::Sat);
    }

    #[test]
    fn reachability_needs_two_nodes() {
        // a holds on the positive side only after one step
        let m = ks(
            vec![vec![1], vec![1], vec![2]],
            vec![&[], &[0], &[]],
            &["a"],
        );
        let s = sample(m.clone(), &[0], &[2]);
        for fragment in [Fragment::CtlUniv, Fragment::Ctl, Fragment::CtlU] {
            let outcome = learn(&s, &config(fragment)).unwrap();
            assert_eq!(outcome.size, 2, "{fragment:?}");
            assert!(outcome.formula.in_fragment(fragment));
            assert!(ctl::consistent_with(&s, &outcome.formula).unwrap());
            // first iteration must have failed
            assert_eq!(outcome.stats.iterations[0].status, SolverStatus::Unsat);
            let text = outcome.formula.to_text(&["a".to_string()]);
            assert!(
                ["AF a", "AX a", "EF a", "EX a"].contains(&text.as_str()),
                "unexpected formula {text} for {fragment:?}"
            );
        }
    }

    #[test]
    fn uniform_cycle_against_empty_loop_is_an_atom() {
        let m = ks(
            vec![vec![1], vec![2], vec![0], vec![3]],
            vec![&[0], &[0], &[0], &[]],
            &["a"],
        );
        let s = sample(m, &[0], &[3]);
        let outcome = learn(&s, &config(Fragment::CtlUniv)).unwrap();
        assert_eq!(outcome.size, 1);
        assert_eq!(outcome.formula, Formula::atom(0));
    }

    #[test]
    fn inconsistent_sample_is_reported_with_the_pair() {
        let m = ks(vec![vec![0], vec![1]], vec![&[0], &[0]], &["a"]);
        let s = sample(m, &[0], &[1]);
        match learn(&s, &config(Fragment::Ctl)) {
            Err(LearnError::InconsistentSample(v)) => {
                assert_eq!((v.positive, v.negative), (0, 1));
            }
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn user_cap_exhaustion_is_an_error() {
        let m = ks(
            vec![vec![1], vec![1], vec![2]],
            vec![&[], &[0], &[]],
            &["a"],
        );
        let s = sample(m, &[0], &[2]);
        let cfg = LearnerConfig { max_size: Some(1), ..config(Fragment::Ctl) };
        match learn(&s, &cfg) {
            Err(LearnError::SizeCapExhausted { max: 1 }) => {}
            other => panic!("expected cap exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn embedded_mode_reports_both_metrics() {
        // Positive can reach b, negative cannot: EF b for full CTL, and
        // with embedded negations the universal fragment finds the same
        // thing as !AG!b at embedded size 2.
        let m = ks(
            vec![vec![0, 1], vec![1], vec![2]],
            vec![&[0], &[1], &[0]],
            &["a", "b"],
        );
        let s = sample(m, &[0], &[2]);
        let cfg = LearnerConfig {
            embed_negations: true,
            ..config(Fragment::CtlUniv)
        };
        let outcome = learn(&s, &cfg).unwrap();
        assert!(outcome.embedded);
        assert_eq!(outcome.size, 2);
        assert!(outcome.plain_size >= outcome.size);
        assert!(ctl::consistent_with(&s, &outcome.formula).unwrap());
    }
}
