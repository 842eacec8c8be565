//! Propositional encoding of the bounded learning problem.
//!
//! For a bound `n` the encoding describes a forest of syntax DAGs over
//! nodes `1..=n` (label, left child, right child per node, where child 0
//! means none and children have smaller indices than their parents),
//! together with the truth value of every node at every sample state. Only
//! the DAG rooted in node `n` is constrained by the sample. Temporal
//! operators other than `AX`/`EX` are evaluated through rank variables
//! following the bounded semantics, which rules out the spurious fixed
//! points a naive encoding of their expansion laws admits; that naive
//! variant is kept behind [`TemporalSemantics::NaiveFixpoint`] purely so
//! tests can demonstrate the failure.
//!
//! With embedded negations, `!` disappears from the label set and every
//! node gets a polarity variable instead; the truth variable of a node
//! keeps meaning "this state satisfies the node's subformula, negation
//! included", while each semantic clause defines the pre-negation value.

use thiserror::Error;

use crate::ctl::{Formula, FormulaBuilder, Fragment, Head};
use crate::diameter::DiameterBound;
use crate::kripke::{Sample, StateId};
use crate::sat::{tseitin, CnfInstance, Prop, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemporalSemantics {
    /// Rank-based bounded semantics; the sound encoding.
    Ranked,
    /// Plain expansion-law equivalences. Unsound (admits spurious fixed
    /// points on cycles); retained for regression tests and demos.
    NaiveFixpoint,
}

#[derive(Debug, Clone)]
pub struct EncodeOptions {
    pub fragment: Fragment,
    pub embed_negations: bool,
    /// Include the redundant rank-monotonicity clauses.
    pub ascent_descent: bool,
    pub semantics: TemporalSemantics,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions {
            fragment: Fragment::Ctl,
            embed_negations: false,
            ascent_descent: true,
            semantics: TemporalSemantics::Ranked,
        }
    }
}

/// Clause families of the encoding, used for reporting and for tests that
/// need to drop or count a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClauseFamily {
    ExactlyOneLabel,
    ExactlyOneLeft,
    ExactlyOneRight,
    LeafArity,
    UnaryArity,
    BinaryArity,
    SemTrue,
    SemAtom,
    SemNot,
    SemAnd,
    SemOr,
    SemAllNext,
    SemExistsNext,
    /// Truth of a temporal node is its rank value at the state's bound.
    RankLink,
    RankAscent,
    RankDescent,
    /// Rank variables are forced off on non-temporal nodes.
    RankDisabled,
    /// Rank 0 is the operand itself.
    RankBase,
    SemAllFinally,
    SemAllGlobally,
    SemAllUntil,
    SemExistsFinally,
    SemExistsGlobally,
    SemExistsUntil,
    /// The root holds on every positive state and no negative one.
    SampleRoot,
    /// Expansion-law equivalences of the naive variant.
    Naive,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("the encoding needs a bound of at least one node")]
    ZeroBound,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("node {node}: model assigns {count} labels (exactly one expected)")]
    LabelViolation { node: usize, count: usize },
    #[error("node {node}: model assigns {count} {side} children")]
    ChildViolation { node: usize, side: &'static str, count: usize },
    #[error("node {node}: label {head} is inconsistent with its children")]
    ArityViolation { node: usize, head: Head },
    #[error("decoded formula leaves the target fragment")]
    FragmentViolation,
}

/// The variable atlas and clause store of one encoding.
#[derive(Debug, Clone)]
pub struct EncodingContext {
    n: usize,
    state_count: usize,
    labels: Vec<Head>,
    options: EncodeOptions,
    bound: DiameterBound,
    label_vars: Vec<Vec<Var>>,
    left_vars: Vec<Vec<Var>>,
    right_vars: Vec<Vec<Var>>,
    polarity_vars: Vec<Var>,
    truth_vars: Vec<Vec<Var>>,
    rank_vars: Vec<Vec<Vec<Var>>>,
    var_count: Var,
    clauses: Vec<(ClauseFamily, Prop)>,
}

impl EncodingContext {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[Head] {
        &self.labels
    }

    pub fn options(&self) -> &EncodeOptions {
        &self.options
    }

    /// Variable stating that node `i` carries `head`.
    pub fn label_var(&self, i: usize, head: Head) -> Var {
        let idx = self
            .labels
            .iter()
            .position(|&h| h == head)
            .unwrap_or_else(|| panic!("{head} is not in the label set"));
        self.label_vars[i - 1][idx]
    }

    /// Variable stating that `j` is the left child of `i` (0 = none).
    pub fn left_var(&self, i: usize, j: usize) -> Var {
        self.left_vars[i - 1][j]
    }

    pub fn right_var(&self, i: usize, j: usize) -> Var {
        self.right_vars[i - 1][j]
    }

    /// Variable stating that state `q` satisfies the subformula rooted in
    /// node `i` (with embedded negations: including the node's flag).
    pub fn truth_var(&self, i: usize, q: StateId) -> Var {
        self.truth_vars[i - 1][q]
    }

    /// Variable for the rank-`u` bounded truth of node `i` at state `q`.
    pub fn rank_var(&self, i: usize, q: StateId, u: usize) -> Var {
        self.rank_vars[i - 1][q][u]
    }

    /// Polarity variable of node `i`; false means the node is negated.
    /// Only allocated with embedded negations.
    pub fn polarity_var(&self, i: usize) -> Var {
        assert!(self.options.embed_negations, "polarity variables need embedded mode");
        self.polarity_vars[i - 1]
    }

    pub fn var_count(&self) -> Var {
        self.var_count
    }

    pub fn truth_var_count(&self) -> usize {
        self.n * self.state_count
    }

    pub fn rank_var_count(&self) -> usize {
        self.rank_vars.iter().map(|per_q| per_q.iter().map(Vec::len).sum::<usize>()).sum()
    }

    pub fn clauses(&self) -> &[(ClauseFamily, Prop)] {
        &self.clauses
    }

    pub fn family_count(&self, family: ClauseFamily) -> usize {
        self.clauses.iter().filter(|(f, _)| *f == family).count()
    }

    pub fn to_cnf(&self) -> CnfInstance {
        tseitin(self.var_count, self.clauses.iter().map(|(_, p)| p))
    }

    /// CNF without the listed families (for regression tests that probe
    /// the encoding with hand-picked assumptions).
    pub fn to_cnf_without(&self, excluded: &[ClauseFamily]) -> CnfInstance {
        tseitin(
            self.var_count,
            self.clauses.iter().filter(|(f, _)| !excluded.contains(f)).map(|(_, p)| p),
        )
    }

    /// Reads the formula rooted in node `n` out of a model, ignoring
    /// disconnected forest nodes.
    pub fn decode(&self, model: &[bool]) -> Result<Formula, DecodeError> {
        let value = |v: Var| model[v as usize - 1];
        let mut builder = FormulaBuilder::new();
        let mut built: Vec<Option<usize>> = vec![None; self.n + 1];
        // Nodes are resolved children-first by walking indices upward once
        // the needed subtrees are known; recursion is avoided by an
        // explicit stack over node indices.
        let mut stack = vec![self.n];
        while let Some(&i) = stack.last() {
            if built[i].is_some() {
                stack.pop();
                continue;
            }
            let head = self.decode_head(i, model)?;
            let left = self.decode_child(i, "left", &self.left_vars[i - 1], &value)?;
            let right = self.decode_child(i, "right", &self.right_vars[i - 1], &value)?;
            let arity_ok = match head.arity() {
                0 => left == 0 && right == 0,
                1 => left == 0 && right != 0,
                _ => left != 0 && right != 0,
            };
            if !arity_ok {
                return Err(DecodeError::ArityViolation { node: i, head });
            }
            let mut pending = false;
            for child in [left, right] {
                if child != 0 && built[child].is_none() {
                    stack.push(child);
                    pending = true;
                }
            }
            if pending {
                continue;
            }
            stack.pop();
            let negated = self.options.embed_negations && !value(self.polarity_var(i));
            let l = (left != 0).then(|| built[left].unwrap());
            let r = (right != 0).then(|| built[right].unwrap());
            built[i] = Some(builder.add(negated, head, l, r));
        }
        let formula = builder.finish(built[self.n].unwrap());
        if !formula.in_fragment(self.options.fragment) {
            return Err(DecodeError::FragmentViolation);
        }
        Ok(formula)
    }

    fn decode_head(&self, i: usize, model: &[bool]) -> Result<Head, DecodeError> {
        let assigned: Vec<Head> = self
            .labels
            .iter()
            .copied()
            .filter(|&h| model[self.label_var(i, h) as usize - 1])
            .collect();
        match assigned.as_slice() {
            [head] => Ok(*head),
            other => Err(DecodeError::LabelViolation { node: i, count: other.len() }),
        }
    }

    fn decode_child(
        &self,
        i: usize,
        side: &'static str,
        vars: &[Var],
        value: &impl Fn(Var) -> bool,
    ) -> Result<usize, DecodeError> {
        let assigned: Vec<usize> =
            (0..vars.len()).filter(|&j| value(vars[j])).collect();
        match assigned.as_slice() {
            [j] => Ok(*j),
            other => {
                Err(DecodeError::ChildViolation { node: i, side, count: other.len() })
            }
        }
    }
}

/// Label set for the options: atoms in declaration order, `True`, then the
/// fragment's operators (minus `!` with embedded negations).
fn label_set(atom_count: usize, options: &EncodeOptions) -> Vec<Head> {
    let mut labels: Vec<Head> = (0..atom_count).map(Head::Atom).collect();
    labels.push(Head::True);
    for &op in options.fragment.operator_heads() {
        if options.embed_negations && op == Head::Not {
            continue;
        }
        labels.push(op);
    }
    labels
}

/// Builds the full clause system for formulas of size at most `n`.
pub fn build(
    sample: &Sample,
    n: usize,
    bound: &DiameterBound,
    options: &EncodeOptions,
) -> Result<EncodingContext, EncodeError> {
    if n == 0 {
        return Err(EncodeError::ZeroBound);
    }
    let state_count = sample.structure.state_count();
    assert_eq!(bound.per_state.len(), state_count, "bound must cover the sample structure");
    let labels = label_set(sample.structure.atom_count(), options);

    let mut next: Var = 0;
    let mut fresh = || {
        next += 1;
        next
    };

    // Structural variables first, root node first: the builtin solver
    // decides variables in index order, so this makes it enumerate syntax
    // DAGs top-down and lets propagation fill in the semantics.
    let mut label_vars = vec![Vec::new(); n];
    let mut left_vars = vec![Vec::new(); n];
    let mut right_vars = vec![Vec::new(); n];
    let mut polarity_vars = vec![0; n];
    for i in (1..=n).rev() {
        label_vars[i - 1] = labels.iter().map(|_| fresh()).collect();
        left_vars[i - 1] = (0..i).map(|_| fresh()).collect();
        right_vars[i - 1] = (0..i).map(|_| fresh()).collect();
        if options.embed_negations {
            polarity_vars[i - 1] = fresh();
        }
    }
    let truth_vars: Vec<Vec<Var>> =
        (0..n).map(|_| (0..state_count).map(|_| fresh()).collect()).collect();
    let rank_vars: Vec<Vec<Vec<Var>>> = (0..n)
        .map(|_| (0..state_count).map(|q| (0..=bound.of(q)).map(|_| fresh()).collect()).collect())
        .collect();

    let mut ctx = EncodingContext {
        n,
        state_count,
        labels,
        options: options.clone(),
        bound: bound.clone(),
        label_vars,
        left_vars,
        right_vars,
        polarity_vars,
        truth_vars,
        rank_vars,
        var_count: next,
        clauses: Vec::new(),
    };
    emit_structure(&mut ctx, sample);
    emit_semantics(&mut ctx, sample);
    Ok(ctx)
}

/// Exactly-one constraints and arity constraints.
fn emit_structure(ctx: &mut EncodingContext, _sample: &Sample) {
    let n = ctx.n;
    for i in 1..=n {
        let labels: Vec<Var> = ctx.label_vars[i - 1].clone();
        exactly_one(ctx, ClauseFamily::ExactlyOneLabel, &labels);
        let lefts = ctx.left_vars[i - 1].clone();
        exactly_one(ctx, ClauseFamily::ExactlyOneLeft, &lefts);
        let rights = ctx.right_vars[i - 1].clone();
        exactly_one(ctx, ClauseFamily::ExactlyOneRight, &rights);

        for &head in &ctx.labels.clone() {
            let tau = Prop::var(ctx.label_var(i, head));
            let no_left = Prop::var(ctx.left_var(i, 0));
            let no_right = Prop::var(ctx.right_var(i, 0));
            let (family, shape) = match head.arity() {
                0 => (ClauseFamily::LeafArity, Prop::and([no_left, no_right])),
                1 => (ClauseFamily::UnaryArity, Prop::and([no_left, Prop::not(no_right)])),
                _ => (
                    ClauseFamily::BinaryArity,
                    Prop::and([Prop::not(no_left), Prop::not(no_right)]),
                ),
            };
            ctx.clauses.push((family, Prop::implies(tau, shape)));
        }
    }
}

fn exactly_one(ctx: &mut EncodingContext, family: ClauseFamily, vars: &[Var]) {
    ctx.clauses.push((family, Prop::or(vars.iter().map(|&v| Prop::var(v)))));
    for (a, &v1) in vars.iter().enumerate() {
        for &v2 in &vars[a + 1..] {
            ctx.clauses.push((family, Prop::or([Prop::nvar(v1), Prop::nvar(v2)])));
        }
    }
}

/// Truth of node `i` at `q` on the side being defined by a semantic
/// equivalence: the raw operator value, before the node's own negation.
fn defined_truth(ctx: &EncodingContext, i: usize, q: StateId) -> Prop {
    let truth = Prop::var(ctx.truth_var(i, q));
    if !ctx.options.embed_negations {
        return truth;
    }
    let polarity = Prop::var(ctx.polarity_var(i));
    Prop::or([
        Prop::and([Prop::not(polarity.clone()), Prop::not(truth.clone())]),
        Prop::and([polarity, truth]),
    ])
}

fn emit_semantics(ctx: &mut EncodingContext, sample: &Sample) {
    let n = ctx.n;
    let ks = &sample.structure;
    let states: Vec<StateId> = ks.states().collect();

    // Leaf semantics.
    for i in 1..=n {
        for &q in &states {
            if ctx.labels.contains(&Head::True) {
                let tau = Prop::var(ctx.label_var(i, Head::True));
                ctx.clauses.push((ClauseFamily::SemTrue, Prop::implies(tau, defined_truth(ctx, i, q))));
            }
            for a in 0..ks.atom_count() {
                let tau = Prop::var(ctx.label_var(i, Head::Atom(a)));
                let value = defined_truth(ctx, i, q);
                let consequent = if ks.has_atom(q, a) { value } else { Prop::not(value) };
                ctx.clauses.push((ClauseFamily::SemAtom, Prop::implies(tau, consequent)));
            }
        }
    }

    let has = |ctx: &EncodingContext, h: Head| ctx.labels.contains(&h);
    let naive = ctx.options.semantics == TemporalSemantics::NaiveFixpoint;

    // Connectives and next operators, plus the ranked machinery.
    for i in 2..=n {
        for k in 1..i {
            let right = Prop::var(ctx.right_var(i, k));

            if has(ctx, Head::Not) {
                for &q in &states {
                    let guard =
                        Prop::and([Prop::var(ctx.label_var(i, Head::Not)), right.clone()]);
                    let eq = Prop::iff(
                        defined_truth(ctx, i, q),
                        Prop::not(Prop::var(ctx.truth_var(k, q))),
                    );
                    ctx.clauses.push((ClauseFamily::SemNot, Prop::implies(guard, eq)));
                }
            }

            for (head, family, universal) in [
                (Head::Ax, ClauseFamily::SemAllNext, true),
                (Head::Ex, ClauseFamily::SemExistsNext, false),
            ] {
                if !has(ctx, head) {
                    continue;
                }
                for &q in &states {
                    let guard = Prop::and([Prop::var(ctx.label_var(i, head)), right.clone()]);
                    let step = successors_prop(ks, q, universal, |q2| {
                        Prop::var(ctx.truth_var(k, q2))
                    });
                    let eq = Prop::iff(defined_truth(ctx, i, q), step);
                    ctx.clauses.push((family, Prop::implies(guard, eq)));
                }
            }

            for (head, family) in [
                (Head::And, ClauseFamily::SemAnd),
                (Head::Or, ClauseFamily::SemOr),
            ] {
                if !has(ctx, head) {
                    continue;
                }
                for j in 1..i {
                    let guard = Prop::and([
                        Prop::var(ctx.label_var(i, head)),
                        Prop::var(ctx.left_var(i, j)),
                        right.clone(),
                    ]);
                    for &q in &states {
                        let lhs = Prop::var(ctx.truth_var(j, q));
                        let rhs = Prop::var(ctx.truth_var(k, q));
                        let op = if head == Head::And {
                            Prop::and([lhs, rhs])
                        } else {
                            Prop::or([lhs, rhs])
                        };
                        let eq = Prop::iff(defined_truth(ctx, i, q), op);
                        ctx.clauses.push((family, Prop::implies(guard.clone(), eq)));
                    }
                }
            }
        }

        if naive {
            emit_naive_temporal(ctx, sample, i);
        } else {
            emit_ranked_temporal(ctx, sample, i);
        }
    }

    // The root is what separates the sample.
    for &q in &sample.positives {
        ctx.clauses.push((ClauseFamily::SampleRoot, Prop::var(ctx.truth_var(n, q))));
    }
    for &q in &sample.negatives {
        ctx.clauses.push((ClauseFamily::SampleRoot, Prop::nvar(ctx.truth_var(n, q))));
    }
}

/// Conjunction or disjunction of `make(q')` over the successors of `q`.
fn successors_prop(
    ks: &crate::kripke::KripkeStructure,
    q: StateId,
    universal: bool,
    make: impl Fn(StateId) -> Prop,
) -> Prop {
    let parts = ks.successors(q).iter().map(|&q2| make(q2));
    if universal {
        Prop::and(parts)
    } else {
        Prop::or(parts)
    }
}

const RANKED_HEADS: [Head; 6] = [Head::Af, Head::Ag, Head::Au, Head::Ef, Head::Eg, Head::Eu];

fn emit_ranked_temporal(ctx: &mut EncodingContext, sample: &Sample, i: usize) {
    let ks = &sample.structure;
    let states: Vec<StateId> = ks.states().collect();
    let present: Vec<Head> =
        RANKED_HEADS.iter().copied().filter(|&h| ctx.labels.contains(&h)).collect();
    if present.is_empty() {
        return;
    }

    // Rank variables are only meaningful on temporal nodes; truth is read
    // off the rank at the state's own bound.
    for &head in &present {
        let tau = Prop::var(ctx.label_var(i, head));
        for &q in &states {
            let eq = Prop::iff(
                defined_truth(ctx, i, q),
                Prop::var(ctx.rank_var(i, q, ctx.bound.of(q))),
            );
            ctx.clauses.push((ClauseFamily::RankLink, Prop::implies(tau.clone(), eq)));
        }
        if ctx.options.ascent_descent {
            let descending = matches!(head, Head::Ag | Head::Eg);
            for &q in &states {
                for u in 1..=ctx.bound.of(q) {
                    let lower = Prop::var(ctx.rank_var(i, q, u - 1));
                    let upper = Prop::var(ctx.rank_var(i, q, u));
                    let (family, from, to) = if descending {
                        (ClauseFamily::RankDescent, upper, lower)
                    } else {
                        (ClauseFamily::RankAscent, lower, upper)
                    };
                    ctx.clauses.push((
                        family,
                        Prop::implies(Prop::and([tau.clone(), from]), to),
                    ));
                }
            }
        }
    }

    // Non-temporal nodes carry no rank truth at all.
    let none_temporal =
        Prop::and(present.iter().map(|&h| Prop::nvar(ctx.label_var(i, h))));
    for &q in &states {
        for u in 0..=ctx.bound.of(q) {
            ctx.clauses.push((
                ClauseFamily::RankDisabled,
                Prop::implies(none_temporal.clone(), Prop::nvar(ctx.rank_var(i, q, u))),
            ));
        }
    }

    for k in 1..i {
        let right = Prop::var(ctx.right_var(i, k));
        for &head in &present {
            let tau = Prop::var(ctx.label_var(i, head));
            // Base case: at rank 0 the operator reduces to its operand
            // (the right child for until).
            for &q in &states {
                let eq = Prop::iff(
                    Prop::var(ctx.rank_var(i, q, 0)),
                    Prop::var(ctx.truth_var(k, q)),
                );
                ctx.clauses.push((
                    ClauseFamily::RankBase,
                    Prop::implies(Prop::and([tau.clone(), right.clone()]), eq),
                ));
            }

            let universal = matches!(head, Head::Af | Head::Ag | Head::Au);
            match head {
                Head::Af | Head::Ag | Head::Ef | Head::Eg => {
                    let family = match head {
                        Head::Af => ClauseFamily::SemAllFinally,
                        Head::Ag => ClauseFamily::SemAllGlobally,
                        Head::Ef => ClauseFamily::SemExistsFinally,
                        _ => ClauseFamily::SemExistsGlobally,
                    };
                    let guard = Prop::and([tau.clone(), right.clone()]);
                    for &q in &states {
                        for u in 1..=ctx.bound.of(q) {
                            let step = successors_prop(ks, q, universal, |q2| {
                                Prop::var(ctx.rank_var(i, q2, ctx.bound.of(q2).min(u - 1)))
                            });
                            let operand = Prop::var(ctx.truth_var(k, q));
                            let value = if matches!(head, Head::Af | Head::Ef) {
                                Prop::or([operand, step])
                            } else {
                                Prop::and([operand, step])
                            };
                            let eq = Prop::iff(Prop::var(ctx.rank_var(i, q, u)), value);
                            ctx.clauses.push((family, Prop::implies(guard.clone(), eq)));
                        }
                    }
                }
                Head::Au | Head::Eu => {
                    let family = if head == Head::Au {
                        ClauseFamily::SemAllUntil
                    } else {
                        ClauseFamily::SemExistsUntil
                    };
                    for j in 1..i {
                        let guard = Prop::and([
                            tau.clone(),
                            Prop::var(ctx.left_var(i, j)),
                            right.clone(),
                        ]);
                        for &q in &states {
                            for u in 1..=ctx.bound.of(q) {
                                let step = successors_prop(ks, q, universal, |q2| {
                                    Prop::var(ctx.rank_var(i, q2, ctx.bound.of(q2).min(u - 1)))
                                });
                                let value = Prop::or([
                                    Prop::var(ctx.truth_var(k, q)),
                                    Prop::and([Prop::var(ctx.truth_var(j, q)), step]),
                                ]);
                                let eq = Prop::iff(Prop::var(ctx.rank_var(i, q, u)), value);
                                ctx.clauses.push((family, Prop::implies(guard.clone(), eq)));
                            }
                        }
                    }
                }
                _ => unreachable!("only ranked heads reach here"),
            }
        }
    }
}

/// The unsound variant: temporal truth defined directly by the expansion
/// laws, with no ranks.
fn emit_naive_temporal(ctx: &mut EncodingContext, sample: &Sample, i: usize) {
    let ks = &sample.structure;
    let states: Vec<StateId> = ks.states().collect();
    let present: Vec<Head> =
        RANKED_HEADS.iter().copied().filter(|&h| ctx.labels.contains(&h)).collect();
    for k in 1..i {
        let right = Prop::var(ctx.right_var(i, k));
        for &head in &present {
            let tau = Prop::var(ctx.label_var(i, head));
            let universal = matches!(head, Head::Af | Head::Ag | Head::Au);
            match head {
                Head::Af | Head::Ag | Head::Ef | Head::Eg => {
                    let guard = Prop::and([tau.clone(), right.clone()]);
                    for &q in &states {
                        let step = successors_prop(ks, q, universal, |q2| {
                            Prop::var(ctx.truth_var(i, q2))
                        });
                        let operand = Prop::var(ctx.truth_var(k, q));
                        let value = if matches!(head, Head::Af | Head::Ef) {
                            Prop::or([operand, step])
                        } else {
                            Prop::and([operand, step])
                        };
                        let eq = Prop::iff(defined_truth(ctx, i, q), value);
                        ctx.clauses.push((ClauseFamily::Naive, Prop::implies(guard.clone(), eq)));
                    }
                }
                Head::Au | Head::Eu => {
                    for j in 1..i {
                        let guard = Prop::and([
                            tau.clone(),
                            Prop::var(ctx.left_var(i, j)),
                            right.clone(),
                        ]);
                        for &q in &states {
                            let step = successors_prop(ks, q, universal, |q2| {
                                Prop::var(ctx.truth_var(i, q2))
                            });
                            let value = Prop::or([
                                Prop::var(ctx.truth_var(k, q)),
                                Prop::and([Prop::var(ctx.truth_var(j, q)), step]),
                            ]);
                            let eq = Prop::iff(defined_truth(ctx, i, q), value);
                            ctx.clauses
                                .push((ClauseFamily::Naive, Prop::implies(guard.clone(), eq)));
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
    }
}
