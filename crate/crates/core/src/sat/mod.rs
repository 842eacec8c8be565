//! Propositional layer: pre-CNF formulas, Tseitin conversion, DIMACS, and
//! solver backends.

pub mod dimacs;
mod dpll;
pub mod prop;
mod solver;
mod tseitin;

pub use dimacs::{emit_dimacs, parse_dimacs, DimacsError};
pub use prop::{Prop, Var};
pub use solver::{
    parse_solver_output, solve, SolverBackend, SolverError, SolverStats, SolverStatus,
    SolverVerdict,
};
pub use tseitin::tseitin;

/// A CNF instance. Atlas variables (the encoder's) occupy the stable prefix
/// `1..=atlas_vars` of the index space; Tseitin auxiliaries follow, so a
/// model can be decoded by reading the prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    pub var_count: Var,
    pub atlas_vars: Var,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfInstance {
    /// Copy of the instance with extra unit clauses, used to pin parts of a
    /// model (assumption-style solving).
    pub fn with_units(&self, units: &[i32]) -> CnfInstance {
        let mut clauses = self.clauses.clone();
        clauses.extend(units.iter().map(|&lit| vec![lit]));
        CnfInstance { var_count: self.var_count, atlas_vars: self.atlas_vars, clauses }
    }
}
