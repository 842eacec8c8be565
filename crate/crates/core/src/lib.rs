//! Learning minimal CTL formulas that tell Kripke structures apart.
//!
//! Given structures tagged positive and negative, the library finds a
//! smallest CTL formula holding on every positive initial state and on no
//! negative one. The search reduces each size bound to a SAT instance
//! built from the bounded semantics of the temporal operators, solved
//! either in-process or by an external DIMACS solver. Around that core sit
//! a bisimulation engine (sample validation, minimization, and an explicit
//! non-minimal separating formula), two model checkers used as mutual
//! oracles, recurrence-diameter bounds, and a mutation-based generator for
//! benchmark samples.

pub mod benchgen;
pub mod bisim;
pub mod ctl;
pub mod diameter;
pub mod encoder;
pub mod explicit;
pub mod kripke;
pub mod learner;
pub mod sat;
