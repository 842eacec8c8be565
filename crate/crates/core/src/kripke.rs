//! Kripke structures, the sample file format, and coalescing.
//!
//! A Kripke structure is a finite directed graph whose states carry sets of
//! atomic propositions and whose transition relation is total: every state
//! has at least one successor. Several named structures (each tagged
//! positive or negative) are parsed from one file and coalesced into a
//! single structure plus a sample of initial states.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

/// Dense index of an atomic proposition. The order of atom ids is the
/// declaration order in the input file and is the total order on atoms used
/// everywhere else in the crate.
pub type AtomId = usize;

/// Dense index of a state.
pub type StateId = usize;

/// A finite labelled graph with a total successor relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    /// Per-state successor lists, duplicate-free and sorted.
    transitions: Vec<Vec<StateId>>,
    /// Per-state label sets.
    labels: Vec<BTreeSet<AtomId>>,
    /// Atom names, indexed by `AtomId`.
    atom_names: Vec<String>,
}

/// Construction-time violations of the structure invariants.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("state {0} has no successors")]
    NoSuccessors(StateId),
    #[error("state {0} has successor {1} out of range (only {2} states)")]
    SuccessorOutOfRange(StateId, StateId, usize),
    #[error("state {0} is labelled with undeclared atom {1}")]
    UndeclaredAtom(StateId, AtomId),
    #[error("structure has no states")]
    Empty,
}

impl KripkeStructure {
    /// Builds a structure, normalizing successor lists (sort + dedup) and
    /// checking the totality invariant.
    pub fn new(
        transitions: Vec<Vec<StateId>>,
        labels: Vec<BTreeSet<AtomId>>,
        atom_names: Vec<String>,
    ) -> Result<Self, StructureError> {
        let n = transitions.len();
        if n == 0 {
            return Err(StructureError::Empty);
        }
        assert_eq!(labels.len(), n, "labels and transitions must agree");
        let mut transitions = transitions;
        for (q, succs) in transitions.iter_mut().enumerate() {
            succs.sort_unstable();
            succs.dedup();
            if succs.is_empty() {
                return Err(StructureError::NoSuccessors(q));
            }
            if let Some(&bad) = succs.iter().find(|&&s| s >= n) {
                return Err(StructureError::SuccessorOutOfRange(q, bad, n));
            }
        }
        for (q, label) in labels.iter().enumerate() {
            if let Some(&bad) = label.iter().find(|&&a| a >= atom_names.len()) {
                return Err(StructureError::UndeclaredAtom(q, bad));
            }
        }
        Ok(KripkeStructure { transitions, labels, atom_names })
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn atom_count(&self) -> usize {
        self.atom_names.len()
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atom_names
    }

    pub fn successors(&self, q: StateId) -> &[StateId] {
        &self.transitions[q]
    }

    pub fn label(&self, q: StateId) -> &BTreeSet<AtomId> {
        &self.labels[q]
    }

    pub fn has_atom(&self, q: StateId, a: AtomId) -> bool {
        self.labels[q].contains(&a)
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        0..self.state_count()
    }

    /// Maximum successor-list length.
    pub fn degree(&self) -> usize {
        self.transitions.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Whether an input structure belongs to the positive or negative side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }
}

/// One named structure from an input file, with its initial state.
#[derive(Debug, Clone)]
pub struct InputInstance {
    pub structure: KripkeStructure,
    pub initial: StateId,
    pub polarity: Polarity,
    pub name: String,
}

/// A coalesced structure together with the positive and negative state sets.
#[derive(Debug, Clone)]
pub struct Sample {
    pub structure: KripkeStructure,
    pub positives: BTreeSet<StateId>,
    pub negatives: BTreeSet<StateId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: state {state} has no successors")]
    NoSuccessors { line: usize, state: StateId },
    #[error("line {line}: undeclared atom \"{atom}\"")]
    UndeclaredAtom { line: usize, atom: String },
    #[error("line {line}: duplicate state id {state}")]
    DuplicateState { line: usize, state: StateId },
    #[error("structure \"{name}\": {source}")]
    Structure { name: String, source: StructureError },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoalesceError {
    #[error("sample has no positive structure")]
    NoPositive,
    #[error("sample has no negative structure")]
    NoNegative,
}

/// Names that the formula syntax reserves; atoms may not use them.
const RESERVED: &[&str] = &["True", "A", "E", "U", "AX", "AF", "AG", "EX", "EF", "EG"];

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct BlockInProgress {
    name: String,
    polarity: Polarity,
    header_line: usize,
    // (line, id, label, successors)
    states: Vec<(usize, StateId, BTreeSet<AtomId>, Vec<StateId>)>,
}

/// Parses a sample file into its instances (file order).
///
/// The format is line oriented; `#` starts a comment. A single `atoms` line
/// declares the atomic propositions, then each `ks <name> <polarity>` line
/// opens a structure block made of `state <id> {<atoms>} -> <id>...` lines.
/// State `0` of each block is its initial state.
pub fn parse_instances(text: &str) -> Result<Vec<InputInstance>, ParseError> {
    let syntax = |line: usize, message: &str| ParseError::Syntax { line, message: message.into() };

    let mut atoms: Option<Vec<String>> = None;
    let mut blocks: Vec<BlockInProgress> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next().unwrap() {
            "atoms" => {
                if atoms.is_some() {
                    return Err(syntax(line_no, "duplicate atoms line"));
                }
                if !blocks.is_empty() {
                    return Err(syntax(line_no, "atoms line must precede all ks blocks"));
                }
                let mut names = Vec::new();
                for tok in tokens {
                    if !is_identifier(tok) {
                        return Err(syntax(line_no, &format!("invalid atom name \"{tok}\"")));
                    }
                    if RESERVED.contains(&tok) {
                        return Err(syntax(line_no, &format!("reserved atom name \"{tok}\"")));
                    }
                    if names.iter().any(|n| n == tok) {
                        return Err(syntax(line_no, &format!("duplicate atom \"{tok}\"")));
                    }
                    names.push(tok.to_string());
                }
                atoms = Some(names);
            }
            "ks" => {
                if atoms.is_none() {
                    return Err(syntax(line_no, "ks block before atoms line"));
                }
                let name = tokens
                    .next()
                    .ok_or_else(|| syntax(line_no, "ks line needs a name"))?
                    .to_string();
                let polarity = match tokens.next() {
                    Some("positive") => Polarity::Positive,
                    Some("negative") => Polarity::Negative,
                    _ => return Err(syntax(line_no, "ks line needs \"positive\" or \"negative\"")),
                };
                if tokens.next().is_some() {
                    return Err(syntax(line_no, "trailing tokens after ks header"));
                }
                blocks.push(BlockInProgress {
                    name,
                    polarity,
                    header_line: line_no,
                    states: Vec::new(),
                });
            }
            "state" => {
                let atoms = atoms
                    .as_ref()
                    .ok_or_else(|| syntax(line_no, "state line before atoms line"))?;
                let block = blocks
                    .last_mut()
                    .ok_or_else(|| syntax(line_no, "state line outside of a ks block"))?;
                // Re-split on the arrow so labels like "{a b}" keep their spaces.
                let rest = line["state".len()..].trim();
                let (head, succ_part) = rest
                    .split_once("->")
                    .ok_or_else(|| syntax(line_no, "state line needs \"->\""))?;
                let head = head.trim();
                let (id_part, label_part) = match head.find('{') {
                    Some(pos) => (head[..pos].trim(), head[pos..].trim()),
                    None => return Err(syntax(line_no, "state line needs a {...} label set")),
                };
                let id: StateId = id_part
                    .parse()
                    .map_err(|_| syntax(line_no, &format!("invalid state id \"{id_part}\"")))?;
                if !label_part.starts_with('{') || !label_part.ends_with('}') {
                    return Err(syntax(line_no, "malformed label set, expected {a b ...}"));
                }
                let mut label = BTreeSet::new();
                for tok in label_part[1..label_part.len() - 1].split_whitespace() {
                    match atoms.iter().position(|a| a == tok) {
                        Some(a) => {
                            label.insert(a);
                        }
                        None => {
                            return Err(ParseError::UndeclaredAtom {
                                line: line_no,
                                atom: tok.to_string(),
                            })
                        }
                    }
                }
                let mut succs = Vec::new();
                for tok in succ_part.split_whitespace() {
                    let s: StateId = tok
                        .parse()
                        .map_err(|_| syntax(line_no, &format!("invalid successor \"{tok}\"")))?;
                    succs.push(s);
                }
                if succs.is_empty() {
                    return Err(ParseError::NoSuccessors { line: line_no, state: id });
                }
                if block.states.iter().any(|(_, other, _, _)| *other == id) {
                    return Err(ParseError::DuplicateState { line: line_no, state: id });
                }
                block.states.push((line_no, id, label, succs));
            }
            other => {
                return Err(syntax(line_no, &format!("unknown directive \"{other}\"")));
            }
        }
    }

    let atom_names = atoms.unwrap_or_default();
    let mut instances = Vec::new();
    for block in blocks {
        let count = block.states.len();
        if count == 0 {
            return Err(ParseError::Syntax {
                line: block.header_line,
                message: format!("structure \"{}\" has no states", block.name),
            });
        }
        let mut transitions = vec![Vec::new(); count];
        let mut labels = vec![BTreeSet::new(); count];
        let mut seen = vec![false; count];
        for (line, id, label, succs) in block.states {
            if id >= count {
                return Err(ParseError::Syntax {
                    line,
                    message: format!(
                        "state id {id} is not dense (structure has {count} state lines)"
                    ),
                });
            }
            for &s in &succs {
                if s >= count {
                    return Err(ParseError::Syntax {
                        line,
                        message: format!("successor {s} refers to an undeclared state"),
                    });
                }
            }
            transitions[id] = succs;
            labels[id] = label;
            seen[id] = true;
        }
        debug_assert!(seen.iter().all(|&s| s));
        let structure = KripkeStructure::new(transitions, labels, atom_names.clone())
            .map_err(|source| ParseError::Structure { name: block.name.clone(), source })?;
        instances.push(InputInstance {
            structure,
            initial: 0,
            polarity: block.polarity,
            name: block.name,
        });
    }
    Ok(instances)
}

/// Serializes instances back into the file format, in canonical form.
pub fn serialize_instances(instances: &[InputInstance]) -> String {
    let mut out = String::new();
    let atom_names: &[String] =
        instances.first().map(|i| i.structure.atom_names()).unwrap_or(&[]);
    out.push_str("atoms");
    for a in atom_names {
        let _ = write!(out, " {a}");
    }
    out.push('\n');
    for inst in instances {
        let _ = writeln!(out, "ks {} {}", inst.name, inst.polarity.as_str());
        for q in inst.structure.states() {
            let label: Vec<&str> = inst
                .structure
                .label(q)
                .iter()
                .map(|&a| atom_names[a].as_str())
                .collect();
            let succs: Vec<String> =
                inst.structure.successors(q).iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "state {q} {{{}}} -> {}", label.join(" "), succs.join(" "));
        }
    }
    out
}

/// Disjoint union of the instances; the positive/negative sets are the
/// images of the initial states.
pub fn coalesce(instances: &[InputInstance]) -> Result<Sample, CoalesceError> {
    if !instances.iter().any(|i| i.polarity == Polarity::Positive) {
        return Err(CoalesceError::NoPositive);
    }
    if !instances.iter().any(|i| i.polarity == Polarity::Negative) {
        return Err(CoalesceError::NoNegative);
    }
    let offsets = instance_offsets(instances);
    let atom_names = instances[0].structure.atom_names().to_vec();
    let mut transitions = Vec::new();
    let mut labels = Vec::new();
    let mut positives = BTreeSet::new();
    let mut negatives = BTreeSet::new();
    for (inst, &offset) in instances.iter().zip(&offsets) {
        for q in inst.structure.states() {
            transitions
                .push(inst.structure.successors(q).iter().map(|&s| s + offset).collect());
            labels.push(inst.structure.label(q).clone());
        }
        let init = offset + inst.initial;
        match inst.polarity {
            Polarity::Positive => positives.insert(init),
            Polarity::Negative => negatives.insert(init),
        };
    }
    let structure = KripkeStructure::new(transitions, labels, atom_names)
        .expect("instances are valid, so their union is valid");
    Ok(Sample { structure, positives, negatives })
}

/// State offset of each instance inside the coalesced structure.
pub fn instance_offsets(instances: &[InputInstance]) -> Vec<StateId> {
    let mut offsets = Vec::with_capacity(instances.len());
    let mut total = 0;
    for inst in instances {
        offsets.push(total);
        total += inst.structure.state_count();
    }
    offsets
}
