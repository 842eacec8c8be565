//! CTL formulas as hash-consed syntax DAGs.
//!
//! A formula owns a node table in which structurally identical subterms
//! share a single node; the size of a formula is the size of that table.
//! Each node carries an optional negation flag, so the same type serves two
//! styles: the plain style uses explicit `!` nodes and no flags, while the
//! embedded style uses flags and no `!` nodes. [`Formula::normalize`] turns
//! flags into explicit `!` nodes for printing and model checking.
//!
//! Formula values are immutable; each value holds its own table, so sharing
//! across threads needs no synchronization.

mod check;
mod parse;

pub use check::{
    check, check_bounded, consistent_with, satisfying_states, satisfying_states_bounded,
    CheckError,
};
pub use parse::{parse, FormulaParseError};

use std::collections::HashMap;
use std::fmt;

use crate::kripke::AtomId;

/// Node labels of the syntax DAG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    True,
    Atom(AtomId),
    Not,
    And,
    Or,
    Ax,
    Af,
    Ag,
    Au,
    Ex,
    Ef,
    Eg,
    Eu,
}

impl Head {
    pub fn arity(self) -> usize {
        match self {
            Head::True | Head::Atom(_) => 0,
            Head::Not | Head::Ax | Head::Af | Head::Ag | Head::Ex | Head::Ef | Head::Eg => 1,
            Head::And | Head::Or | Head::Au | Head::Eu => 2,
        }
    }

    /// Temporal operators whose encoding uses rank variables.
    pub fn is_ranked_temporal(self) -> bool {
        matches!(self, Head::Af | Head::Ag | Head::Au | Head::Ef | Head::Eg | Head::Eu)
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Head::True => "True",
            Head::Atom(a) => return write!(f, "atom#{a}"),
            Head::Not => "!",
            Head::And => "&",
            Head::Or => "|",
            Head::Ax => "AX",
            Head::Af => "AF",
            Head::Ag => "AG",
            Head::Au => "AU",
            Head::Ex => "EX",
            Head::Ef => "EF",
            Head::Eg => "EG",
            Head::Eu => "EU",
        };
        f.write_str(s)
    }
}

/// Syntactic fragments the learner can target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fragment {
    /// Universal operators only: `{!, &, |, AX, AF, AG, AU}`.
    CtlUniv,
    /// The full logic.
    Ctl,
    /// `{!, |, EX, EG, EU}`.
    CtlU,
}

impl Fragment {
    /// Operator heads of this fragment (atoms and `True` are always allowed).
    pub fn operator_heads(self) -> &'static [Head] {
        match self {
            Fragment::CtlUniv => {
                &[Head::Not, Head::And, Head::Or, Head::Ax, Head::Af, Head::Ag, Head::Au]
            }
            Fragment::Ctl => &[
                Head::Not,
                Head::And,
                Head::Or,
                Head::Ax,
                Head::Af,
                Head::Ag,
                Head::Au,
                Head::Ex,
                Head::Ef,
                Head::Eg,
                Head::Eu,
            ],
            Fragment::CtlU => &[Head::Not, Head::Or, Head::Ex, Head::Eg, Head::Eu],
        }
    }

    pub fn allows(self, head: Head) -> bool {
        matches!(head, Head::True | Head::Atom(_)) || self.operator_heads().contains(&head)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Fragment::CtlUniv => "ctl-univ",
            Fragment::Ctl => "ctl",
            Fragment::CtlU => "ctl-u",
        }
    }
}

/// Index of a node inside a formula's table.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub negated: bool,
    pub head: Head,
    pub left: Option<NodeId>,
    pub right: Option<NodeId>,
}

/// A CTL formula as an immutable hash-consed syntax DAG.
///
/// The node table contains exactly the nodes reachable from the root, in a
/// canonical order where children precede parents, so two structurally
/// equal formulas have identical tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    nodes: Vec<Node>,
    root: NodeId,
}

impl Formula {
    /// Number of nodes of the syntax DAG. With embedded negations the
    /// flags are free: a flagged node still counts once.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// True if no node carries a negation flag (the plain style).
    pub fn is_plain(&self) -> bool {
        self.nodes.iter().all(|n| !n.negated)
    }

    /// Largest atom id referenced, if any.
    pub fn max_atom(&self) -> Option<AtomId> {
        self.nodes
            .iter()
            .filter_map(|n| match n.head {
                Head::Atom(a) => Some(a),
                _ => None,
            })
            .max()
    }

    /// True if every operator belongs to `fragment` (negation flags are
    /// always allowed, as is the explicit `!` node: all fragments carry it).
    pub fn in_fragment(&self, fragment: Fragment) -> bool {
        self.nodes.iter().all(|n| fragment.allows(n.head))
    }

    /// Rewrites negation flags into explicit `!` nodes, yielding a plain
    /// formula; plain input is returned unchanged (up to sharing).
    pub fn normalize(&self) -> Formula {
        let mut b = FormulaBuilder::new();
        let mut map = vec![0usize; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            let left = n.left.map(|c| map[c]);
            let right = n.right.map(|c| map[c]);
            let mut id = b.add(false, n.head, left, right);
            if n.negated {
                id = b.add(false, Head::Not, None, Some(id));
            }
            map[i] = id;
        }
        b.finish(map[self.root])
    }

    /// Number of nodes of the syntactic tree obtained by undoing all
    /// sharing. Saturates at `u128::MAX`.
    pub fn tree_size(&self) -> u128 {
        let mut sizes = vec![0u128; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            let mut total: u128 = 1;
            for c in [n.left, n.right].into_iter().flatten() {
                total = total.saturating_add(sizes[c]);
            }
            sizes[i] = total;
        }
        sizes[self.root]
    }

    pub fn top() -> Formula {
        FormulaBuilder::leaf(Head::True)
    }

    pub fn atom(a: AtomId) -> Formula {
        FormulaBuilder::leaf(Head::Atom(a))
    }

    pub fn not(&self) -> Formula {
        FormulaBuilder::unary(Head::Not, self)
    }

    pub fn and(&self, other: &Formula) -> Formula {
        FormulaBuilder::binary(Head::And, self, other)
    }

    pub fn or(&self, other: &Formula) -> Formula {
        FormulaBuilder::binary(Head::Or, self, other)
    }

    pub fn ax(&self) -> Formula {
        FormulaBuilder::unary(Head::Ax, self)
    }

    pub fn af(&self) -> Formula {
        FormulaBuilder::unary(Head::Af, self)
    }

    pub fn ag(&self) -> Formula {
        FormulaBuilder::unary(Head::Ag, self)
    }

    pub fn ex(&self) -> Formula {
        FormulaBuilder::unary(Head::Ex, self)
    }

    pub fn ef(&self) -> Formula {
        FormulaBuilder::unary(Head::Ef, self)
    }

    pub fn eg(&self) -> Formula {
        FormulaBuilder::unary(Head::Eg, self)
    }

    pub fn au(&self, other: &Formula) -> Formula {
        FormulaBuilder::binary(Head::Au, self, other)
    }

    pub fn eu(&self, other: &Formula) -> Formula {
        FormulaBuilder::binary(Head::Eu, self, other)
    }

    /// Conjunction of a non-empty list, folded left.
    pub fn conj(parts: &[Formula]) -> Formula {
        let (first, rest) = parts.split_first().expect("conj of empty list");
        rest.iter().fold(first.clone(), |acc, f| acc.and(f))
    }

    /// Disjunction of a non-empty list, folded left.
    pub fn disj(parts: &[Formula]) -> Formula {
        let (first, rest) = parts.split_first().expect("disj of empty list");
        rest.iter().fold(first.clone(), |acc, f| acc.or(f))
    }

    /// Canonical text rendering. Embedded-style formulas are normalized
    /// first, so the output always uses the plain surface syntax.
    pub fn to_text(&self, atom_names: &[String]) -> String {
        let plain = if self.is_plain() { self.clone() } else { self.normalize() };
        let mut out = String::new();
        plain.write_or(plain.root, atom_names, &mut out);
        out
    }

    fn write_or(&self, id: NodeId, atoms: &[String], out: &mut String) {
        let n = &self.nodes[id];
        if n.head == Head::Or {
            self.write_or(n.left.unwrap(), atoms, out);
            out.push_str(" | ");
            self.write_and(n.right.unwrap(), atoms, out);
        } else {
            self.write_and(id, atoms, out);
        }
    }

    fn write_and(&self, id: NodeId, atoms: &[String], out: &mut String) {
        let n = &self.nodes[id];
        match n.head {
            Head::And => {
                self.write_and(n.left.unwrap(), atoms, out);
                out.push_str(" & ");
                self.write_unary(n.right.unwrap(), atoms, out);
            }
            Head::Or => {
                out.push('(');
                self.write_or(id, atoms, out);
                out.push(')');
            }
            _ => self.write_unary(id, atoms, out),
        }
    }

    fn write_unary(&self, id: NodeId, atoms: &[String], out: &mut String) {
        let n = &self.nodes[id];
        match n.head {
            Head::True => out.push_str("True"),
            Head::Atom(a) => match atoms.get(a) {
                Some(name) => out.push_str(name),
                None => {
                    let _ = fmt::Write::write_fmt(out, format_args!("atom#{a}"));
                }
            },
            Head::Not => {
                out.push('!');
                self.write_unary(n.right.unwrap(), atoms, out);
            }
            Head::Ax | Head::Af | Head::Ag | Head::Ex | Head::Ef | Head::Eg => {
                let _ = fmt::Write::write_fmt(out, format_args!("{} ", n.head));
                self.write_unary(n.right.unwrap(), atoms, out);
            }
            Head::Au | Head::Eu => {
                out.push(if n.head == Head::Au { 'A' } else { 'E' });
                out.push(' ');
                self.write_unary(n.left.unwrap(), atoms, out);
                out.push_str(" U ");
                self.write_unary(n.right.unwrap(), atoms, out);
            }
            Head::And | Head::Or => {
                out.push('(');
                self.write_or(id, atoms, out);
                out.push(')');
            }
        }
    }
}

/// Incremental hash-consing constructor for formulas.
///
/// `add` interns one node; children must already be interned, so indices of
/// children are always below their parent. `finish` extracts the DAG rooted
/// in a given node and re-canonicalizes it.
pub struct FormulaBuilder {
    nodes: Vec<Node>,
    interned: HashMap<Node, NodeId>,
}

impl Default for FormulaBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl FormulaBuilder {
    pub fn new() -> Self {
        FormulaBuilder { nodes: Vec::new(), interned: HashMap::new() }
    }

    /// Interns a node, returning the existing id for structurally identical
    /// nodes. Unary heads take a right child only.
    pub fn add(
        &mut self,
        negated: bool,
        head: Head,
        left: Option<NodeId>,
        right: Option<NodeId>,
    ) -> NodeId {
        match head.arity() {
            0 => debug_assert!(left.is_none() && right.is_none(), "leaf with children"),
            1 => debug_assert!(
                left.is_none() && right.is_some(),
                "unary head takes exactly a right child"
            ),
            _ => debug_assert!(left.is_some() && right.is_some(), "binary head needs two children"),
        }
        debug_assert!(left.map_or(true, |c| c < self.nodes.len()));
        debug_assert!(right.map_or(true, |c| c < self.nodes.len()));
        let node = Node { negated, head, left, right };
        if let Some(&id) = self.interned.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node);
        self.interned.insert(node, id);
        id
    }

    /// Interns every node of `f` and returns the id of its root.
    pub fn merge(&mut self, f: &Formula) -> NodeId {
        let mut map = vec![0usize; f.nodes.len()];
        for (i, n) in f.nodes.iter().enumerate() {
            map[i] = self.add(n.negated, n.head, n.left.map(|c| map[c]), n.right.map(|c| map[c]));
        }
        map[f.root]
    }

    /// Extracts the formula rooted in `root`, dropping unreachable nodes
    /// and renumbering into the canonical post-order.
    pub fn finish(self, root: NodeId) -> Formula {
        canonicalize(&self.nodes, root)
    }

    fn leaf(head: Head) -> Formula {
        let mut b = FormulaBuilder::new();
        let root = b.add(false, head, None, None);
        b.finish(root)
    }

    fn unary(head: Head, child: &Formula) -> Formula {
        let mut b = FormulaBuilder::new();
        let c = b.merge(child);
        let root = b.add(false, head, None, Some(c));
        b.finish(root)
    }

    fn binary(head: Head, left: &Formula, right: &Formula) -> Formula {
        let mut b = FormulaBuilder::new();
        let l = b.merge(left);
        let r = b.merge(right);
        let root = b.add(false, head, Some(l), Some(r));
        b.finish(root)
    }
}

/// Rebuilds the table with only the nodes reachable from `root`, in
/// post-order (left subtree, right subtree, node). The result is the unique
/// canonical table of the DAG.
fn canonicalize(nodes: &[Node], root: NodeId) -> Formula {
    struct Walk<'a> {
        nodes: &'a [Node],
        out: Vec<Node>,
        map: HashMap<NodeId, NodeId>,
    }
    impl Walk<'_> {
        fn visit(&mut self, id: NodeId) -> NodeId {
            if let Some(&new) = self.map.get(&id) {
                return new;
            }
            let n = self.nodes[id];
            let left = n.left.map(|c| self.visit(c));
            let right = n.right.map(|c| self.visit(c));
            let new = self.out.len();
            self.out.push(Node { left, right, ..n });
            self.map.insert(id, new);
            new
        }
    }
    let mut walk = Walk { nodes, out: Vec::new(), map: HashMap::new() };
    let root = walk.visit(root);
    Formula { nodes: walk.out, root }
}
