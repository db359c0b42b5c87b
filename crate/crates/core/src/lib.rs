//! Random 2-SAT laboratory core.
//!
//! Building blocks for experiments on random 2-CNF formulas: the uniform
//! random-formula distribution, an exact WalkSAT implementation with O(1)
//! uniform sampling of unsatisfied clauses, unit clause propagation and the
//! implication-sub-formula statistics, exact 2-SAT oracles, and online
//! instrumentation of WalkSAT traces (mismatch-count supermartingale,
//! lock-in persistence, flip-case classification).

pub mod cnf;
pub mod dimacs;
pub mod engine;
pub mod implication;
pub mod instrument;
pub mod rng;
pub mod solver;
pub mod union_find;
pub mod unsat_set;

pub use cnf::{generate_random_2cnf, Assignment, Clause, CnfError, Evaluation, Formula, Literal, Occurrence};
pub use dimacs::{parse_dimacs, write_dimacs, DimacsError};
pub use engine::{
    default_cap, run, run_state, run_traced, run_with_sink, EngineState, FlipRecord, RunOutcome,
    RunStatus,
};
pub use rng::{derive_seed, stream};
pub use implication::{
    implication_subformula, predicate_e, subformula_sizes, ucp, x_statistic, x_statistic_from_sizes,
    y_statistic, y_statistic_from_sizes, ImplicationError, ImplicationSubformula, UcpResult, UcpScratch,
};
pub use instrument::{
    check_fact_2_5, classify_flip, delta_star, drift_report, DeltaTracker, DriftEstimate, DriftReport,
    Fact25Report, FlipCase, Instrumentation, InstrumentError, TransitionStat,
};
pub use solver::{brute_force_sat, solve_2sat, SatCertificate, SolveError};
pub use union_find::{variable_graph_components, UnionFind, VariableComponents};
pub use unsat_set::UnsatClauseSet;
