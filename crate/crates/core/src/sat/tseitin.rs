//! Tseitin conversion of the encoder's clause store to CNF.
//!
//! Every composite subformula gets a defining auxiliary variable with both
//! implication directions, so the CNF is not just equisatisfiable: each
//! assignment of the original variables extends uniquely to the
//! auxiliaries. Auxiliary variables live strictly above the atlas prefix.
//! Top-level conjunctions, disjunctions of literals, and guarded
//! implications are flattened directly instead of being named.

use std::collections::HashMap;

use super::prop::{Prop, Var};
use super::CnfInstance;

struct Tseitin {
    next_var: Var,
    clauses: Vec<Vec<i32>>,
    defs: HashMap<Prop, i32>,
    true_lit: Option<i32>,
}

impl Tseitin {
    fn fresh(&mut self) -> i32 {
        self.next_var += 1;
        self.next_var as i32
    }

    /// Literal that is true in every model.
    fn constant(&mut self, value: bool) -> i32 {
        let t = match self.true_lit {
            Some(t) => t,
            None => {
                let t = self.fresh();
                self.clauses.push(vec![t]);
                self.true_lit = Some(t);
                t
            }
        };
        if value {
            t
        } else {
            -t
        }
    }

    /// Returns a literal equivalent to `p`, defining auxiliaries as needed.
    fn literal(&mut self, p: &Prop) -> i32 {
        match p {
            Prop::Const(b) => return self.constant(*b),
            Prop::Var(v) => return *v as i32,
            Prop::Not(inner) => return -self.literal(inner),
            _ => {}
        }
        if let Some(&lit) = self.defs.get(p) {
            return lit;
        }
        let lit = match p {
            Prop::And(parts) => {
                let lits: Vec<i32> = parts.iter().map(|q| self.literal(q)).collect();
                let t = self.fresh();
                for &l in &lits {
                    self.clauses.push(vec![-t, l]);
                }
                let mut long: Vec<i32> = lits.iter().map(|&l| -l).collect();
                long.push(t);
                self.clauses.push(long);
                t
            }
            Prop::Or(parts) => {
                let lits: Vec<i32> = parts.iter().map(|q| self.literal(q)).collect();
                let t = self.fresh();
                for &l in &lits {
                    self.clauses.push(vec![-l, t]);
                }
                let mut long = vec![-t];
                long.extend(&lits);
                self.clauses.push(long);
                t
            }
            Prop::Implies(a, b) => {
                let la = self.literal(a);
                let lb = self.literal(b);
                let t = self.fresh();
                self.clauses.push(vec![-t, -la, lb]);
                self.clauses.push(vec![t, la]);
                self.clauses.push(vec![t, -lb]);
                t
            }
            Prop::Iff(a, b) => {
                let la = self.literal(a);
                let lb = self.literal(b);
                let t = self.fresh();
                self.clauses.push(vec![-t, -la, lb]);
                self.clauses.push(vec![-t, la, -lb]);
                self.clauses.push(vec![t, la, lb]);
                self.clauses.push(vec![t, -la, -lb]);
                t
            }
            _ => unreachable!("literal cases handled above"),
        };
        self.defs.insert(p.clone(), lit);
        lit
    }

    /// Asserts `p` at the top level.
    fn assert(&mut self, p: &Prop) {
        match p {
            Prop::Const(true) => {}
            Prop::Const(false) => self.clauses.push(Vec::new()),
            Prop::And(parts) => {
                for q in parts {
                    self.assert(q);
                }
            }
            Prop::Or(parts) => {
                let clause = parts.iter().map(|q| self.literal(q)).collect();
                self.clauses.push(clause);
            }
            Prop::Implies(a, b) => {
                // (c1 & ... & ck) -> (d1 | ... | dm) is one clause over the
                // conjunct and disjunct literals.
                let mut clause = Vec::new();
                match &**a {
                    Prop::And(parts) => {
                        for q in parts {
                            let l = self.literal(q);
                            clause.push(-l);
                        }
                    }
                    other => {
                        let l = self.literal(other);
                        clause.push(-l);
                    }
                }
                match &**b {
                    Prop::Or(parts) => {
                        for q in parts {
                            clause.push(self.literal(q));
                        }
                    }
                    other => clause.push(self.literal(other)),
                }
                self.clauses.push(clause);
            }
            Prop::Iff(a, b) => {
                let la = self.literal(a);
                let lb = self.literal(b);
                self.clauses.push(vec![-la, lb]);
                self.clauses.push(vec![la, -lb]);
            }
            _ => {
                let l = self.literal(p);
                self.clauses.push(vec![l]);
            }
        }
    }
}

/// Converts the given formulas to one CNF over variables `1..=atlas_vars`
/// plus fresh auxiliaries above that prefix.
pub fn tseitin<'a>(atlas_vars: Var, props: impl IntoIterator<Item = &'a Prop>) -> CnfInstance {
    let mut ctx = Tseitin {
        next_var: atlas_vars,
        clauses: Vec::new(),
        defs: HashMap::new(),
        true_lit: None,
    };
    for p in props {
        ctx.assert(p);
    }
    CnfInstance { var_count: ctx.next_var, atlas_vars, clauses: ctx.clauses }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(clauses: &[Vec<i32>]) -> Vec<Vec<i32>> {
        let mut out: Vec<Vec<i32>> = clauses
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn conjunction_gate_definition() {
        // t <-> (x & y), forced by asserting Not(And(x, y)).
        let p = Prop::not(Prop::And(vec![Prop::var(1), Prop::var(2)]));
        let cnf = tseitin(2, [&p]);
        let t = 3;
        assert_eq!(cnf.var_count, 3);
        assert_eq!(
            sorted(&cnf.clauses),
            sorted(&[vec![-t, 1], vec![-t, 2], vec![-1, -2, t], vec![-t]])
        );
    }

    #[test]
    fn disjunction_gate_definition() {
        let p = Prop::not(Prop::Or(vec![Prop::var(1), Prop::var(2)]));
        let cnf = tseitin(2, [&p]);
        let t = 3;
        assert_eq!(
            sorted(&cnf.clauses),
            sorted(&[vec![-1, t], vec![-2, t], vec![-t, 1, 2], vec![-t]])
        );
    }

    #[test]
    fn top_level_implication_is_one_clause() {
        let p = Prop::implies(
            Prop::and([Prop::var(1), Prop::var(2)]),
            Prop::or([Prop::var(3), Prop::nvar(4)]),
        );
        let cnf = tseitin(4, [&p]);
        assert_eq!(cnf.var_count, 4);
        assert_eq!(cnf.clauses, vec![vec![-1, -2, 3, -4]]);
    }

    #[test]
    fn identical_subterms_share_one_definition() {
        let shared = Prop::and([Prop::var(1), Prop::var(2)]);
        let p1 = Prop::or([Prop::var(3), shared.clone()]);
        let p2 = Prop::or([Prop::var(4), shared]);
        let cnf = tseitin(4, [&p1, &p2]);
        // one auxiliary for the shared conjunction, none for the top-level
        // disjunctions of literals
        assert_eq!(cnf.var_count, 5);
    }
}
