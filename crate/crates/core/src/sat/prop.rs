//! Propositional formulas, the pre-CNF clause language of the encoder.

/// A propositional variable, numbered from 1 (DIMACS convention).
pub type Var = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Prop {
    Const(bool),
    Var(Var),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Implies(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn var(v: Var) -> Prop {
        Prop::Var(v)
    }

    pub fn nvar(v: Var) -> Prop {
        Prop::Not(Box::new(Prop::Var(v)))
    }

    pub fn not(p: Prop) -> Prop {
        match p {
            Prop::Const(b) => Prop::Const(!b),
            Prop::Not(inner) => *inner,
            other => Prop::Not(Box::new(other)),
        }
    }

    /// Conjunction with constant folding.
    pub fn and(parts: impl IntoIterator<Item = Prop>) -> Prop {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Prop::Const(true) => {}
                Prop::Const(false) => return Prop::Const(false),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Prop::Const(true),
            1 => out.pop().unwrap(),
            _ => Prop::And(out),
        }
    }

    /// Disjunction with constant folding.
    pub fn or(parts: impl IntoIterator<Item = Prop>) -> Prop {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Prop::Const(false) => {}
                Prop::Const(true) => return Prop::Const(true),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Prop::Const(false),
            1 => out.pop().unwrap(),
            _ => Prop::Or(out),
        }
    }

    pub fn implies(antecedent: Prop, consequent: Prop) -> Prop {
        match (&antecedent, &consequent) {
            (Prop::Const(true), _) => consequent,
            (Prop::Const(false), _) => Prop::Const(true),
            (_, Prop::Const(true)) => Prop::Const(true),
            (_, Prop::Const(false)) => Prop::not(antecedent),
            _ => Prop::Implies(Box::new(antecedent), Box::new(consequent)),
        }
    }

    pub fn iff(a: Prop, b: Prop) -> Prop {
        match (&a, &b) {
            (Prop::Const(true), _) => b,
            (_, Prop::Const(true)) => a,
            (Prop::Const(false), _) => Prop::not(b),
            (_, Prop::Const(false)) => Prop::not(a),
            _ => Prop::Iff(Box::new(a), Box::new(b)),
        }
    }

    /// Evaluates under a total assignment (`index 0` is variable 1).
    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Var(v) => assignment[*v as usize - 1],
            Prop::Not(p) => !p.eval(assignment),
            Prop::And(ps) => ps.iter().all(|p| p.eval(assignment)),
            Prop::Or(ps) => ps.iter().any(|p| p.eval(assignment)),
            Prop::Implies(a, b) => !a.eval(assignment) || b.eval(assignment),
            Prop::Iff(a, b) => a.eval(assignment) == b.eval(assignment),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_fold_constants() {
        assert_eq!(Prop::and([Prop::Const(true), Prop::var(1)]), Prop::var(1));
        assert_eq!(Prop::and([Prop::Const(false), Prop::var(1)]), Prop::Const(false));
        assert_eq!(Prop::or([]), Prop::Const(false));
        assert_eq!(Prop::not(Prop::nvar(2)), Prop::var(2));
        assert_eq!(Prop::implies(Prop::Const(true), Prop::var(1)), Prop::var(1));
        assert_eq!(Prop::iff(Prop::Const(false), Prop::var(1)), Prop::nvar(1));
    }

    #[test]
    fn eval_matches_connective_semantics() {
        let p = Prop::iff(
            Prop::var(1),
            Prop::implies(Prop::var(2), Prop::and([Prop::var(3), Prop::nvar(4)])),
        );
        // v1=true, v2=true, v3=true, v4=false: implication holds
        assert!(p.eval(&[true, true, true, false]));
        // v4 flips the conjunction
        assert!(!p.eval(&[true, true, true, true]));
    }
}
