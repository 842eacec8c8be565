//! Built-in DPLL solver.
//!
//! Two watched literals per clause, decisions in ascending variable order
//! trying `true` first, chronological backtracking. The atlas is laid out
//! so that the structural variables of the encoding come first, which makes
//! this order behave like syntax-guided enumeration with propagation: small
//! instances solve quickly and the whole test suite runs without any
//! external solver. Swap in a real solver through the external backend for
//! anything heavyweight.

use std::time::{Duration, Instant};

use super::CnfInstance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DpllOutcome {
    Sat(Vec<bool>),
    Unsat,
    Unknown,
}

const TIMEOUT_CHECK_MASK: u64 = 0x7f;

struct Dpll {
    clauses: Vec<Vec<i32>>,
    /// literal code -> indices of clauses watching that literal
    watches: Vec<Vec<usize>>,
    /// var-1 -> 0 unassigned, 1 true, -1 false
    assign: Vec<i8>,
    trail: Vec<i32>,
    prop_head: usize,
    /// (trail index, decision literal, flipped already)
    decisions: Vec<(usize, i32, bool)>,
    steps: u64,
    deadline: Option<Instant>,
}

fn code(lit: i32) -> usize {
    let v = (lit.unsigned_abs() as usize) - 1;
    v * 2 + usize::from(lit < 0)
}

impl Dpll {
    fn value(&self, lit: i32) -> i8 {
        let v = self.assign[(lit.unsigned_abs() as usize) - 1];
        if lit > 0 {
            v
        } else {
            -v
        }
    }

    /// Asserts a literal; returns false on an immediate contradiction.
    fn enqueue(&mut self, lit: i32) -> bool {
        match self.value(lit) {
            1 => true,
            -1 => false,
            _ => {
                self.assign[(lit.unsigned_abs() as usize) - 1] = if lit > 0 { 1 } else { -1 };
                self.trail.push(lit);
                true
            }
        }
    }

    /// Unit propagation; returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.prop_head < self.trail.len() {
            let falsified = -self.trail[self.prop_head];
            self.prop_head += 1;
            let widx = code(falsified);
            let mut i = 0;
            while i < self.watches[widx].len() {
                let ci = self.watches[widx][i];
                if self.clauses[ci][0] == falsified {
                    self.clauses[ci].swap(0, 1);
                }
                debug_assert_eq!(self.clauses[ci][1], falsified);
                let first = self.clauses[ci][0];
                if self.value(first) == 1 {
                    i += 1;
                    continue;
                }
                let replacement =
                    (2..self.clauses[ci].len()).find(|&k| self.value(self.clauses[ci][k]) != -1);
                if let Some(k) = replacement {
                    self.clauses[ci].swap(1, k);
                    let moved = self.clauses[ci][1];
                    self.watches[code(moved)].push(ci);
                    self.watches[widx].swap_remove(i);
                    continue;
                }
                // no replacement watch: unit or conflict on clause[0]
                match self.value(first) {
                    0 => {
                        self.enqueue(first);
                        i += 1;
                    }
                    _ => return false,
                }
            }
        }
        true
    }

    /// Undoes the newest decision that still has an untried value; returns
    /// false when the search space is exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some((mark, lit, flipped)) = self.decisions.pop() {
            for l in self.trail.drain(mark..) {
                self.assign[(l.unsigned_abs() as usize) - 1] = 0;
            }
            self.prop_head = self.trail.len();
            if !flipped {
                self.decisions.push((mark, -lit, true));
                let ok = self.enqueue(-lit);
                debug_assert!(ok, "flipped decision cannot be already falsified");
                return true;
            }
        }
        false
    }

    fn out_of_time(&mut self) -> bool {
        let Some(deadline) = self.deadline else { return false };
        self.steps += 1;
        if self.steps & TIMEOUT_CHECK_MASK == 1 {
            return Instant::now() >= deadline;
        }
        false
    }

    fn run(&mut self) -> DpllOutcome {
        loop {
            if self.out_of_time() {
                return DpllOutcome::Unknown;
            }
            if !self.propagate() {
                if !self.backtrack() {
                    return DpllOutcome::Unsat;
                }
                continue;
            }
            match self.assign.iter().position(|&v| v == 0) {
                None => {
                    let model = self.assign.iter().map(|&v| v == 1).collect();
                    return DpllOutcome::Sat(model);
                }
                Some(var0) => {
                    let lit = var0 as i32 + 1;
                    self.decisions.push((self.trail.len(), lit, false));
                    self.enqueue(lit);
                }
            }
        }
    }
}

pub fn solve(cnf: &CnfInstance, timeout: Option<Duration>) -> DpllOutcome {
    let n = cnf.var_count as usize;
    let mut solver = Dpll {
        clauses: Vec::with_capacity(cnf.clauses.len()),
        watches: vec![Vec::new(); n * 2],
        assign: vec![0; n],
        trail: Vec::new(),
        prop_head: 0,
        decisions: Vec::new(),
        steps: 0,
        deadline: timeout.map(|t| Instant::now() + t),
    };

    let mut units = Vec::new();
    'load: for clause in &cnf.clauses {
        let mut c = clause.clone();
        c.sort_unstable_by_key(|l| (l.abs(), *l));
        c.dedup();
        for pair in c.windows(2) {
            if pair[0] == -pair[1] {
                continue 'load; // tautology
            }
        }
        match c.len() {
            0 => return DpllOutcome::Unsat,
            1 => units.push(c[0]),
            _ => {
                let ci = solver.clauses.len();
                solver.watches[code(c[0])].push(ci);
                solver.watches[code(c[1])].push(ci);
                solver.clauses.push(c);
            }
        }
    }
    for lit in units {
        if !solver.enqueue(lit) {
            return DpllOutcome::Unsat;
        }
    }
    solver.run()
}
