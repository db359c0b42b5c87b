//! WalkSAT for 2-CNF.
//!
//! Start from the all-true assignment; while some clause is unsatisfied and
//! the flip budget is not exhausted, pick an unsatisfied clause uniformly at
//! random, pick one of its two positions uniformly, and flip that variable.
//! The final assignment is returned unconditionally.
//!
//! The unsatisfied-clause set is maintained incrementally: a flip of
//! variable `v` rescans only the occurrence lists of `v`'s two literals, an
//! expected O(1) amount of work on random formulas.

use rand::Rng;

use crate::cnf::{Assignment, Formula};
use crate::rng::stream;
use crate::unsat_set::UnsatClauseSet;

/// Default flip budget, `100 n^2`.
pub fn default_cap(num_variables: u32) -> u64 {
    100 * u64::from(num_variables) * u64::from(num_variables)
}

/// One executed flip. `t` is the step index before the flip, so the first
/// record of a run carries `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlipRecord {
    pub t: u64,
    pub clause_index: u32,
    /// Chosen position in the clause, 1 or 2.
    pub h: u8,
    pub flipped_variable: u32,
    pub unsat_count_after: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Satisfied,
    CapReached,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: RunStatus,
    /// Total number of flips T.
    pub flips: u64,
    pub final_assignment: Assignment,
    /// Flip count per variable, index `v - 1`.
    pub per_variable_flip_counts: Vec<u64>,
    /// Present only for [`run_traced`].
    pub trace: Option<Vec<FlipRecord>>,
}

/// Mutable WalkSAT state over a borrowed formula.
#[derive(Clone, Debug)]
pub struct EngineState<'a> {
    formula: &'a Formula,
    assignment: Assignment,
    unsat: UnsatClauseSet,
    t: u64,
    cap: u64,
}

impl<'a> EngineState<'a> {
    /// All-true initial assignment; the unsat set holds exactly the clauses
    /// whose literals are both negations.
    pub fn new(formula: &'a Formula, cap: Option<u64>) -> Self {
        let assignment = Assignment::all_true(formula.num_variables());
        let mut unsat = UnsatClauseSet::new(formula.num_clauses());
        for (i, clause) in formula.clauses().iter().enumerate() {
            if !assignment.is_true(clause.first()) && !assignment.is_true(clause.second()) {
                unsat.insert(i as u32);
            }
        }
        EngineState {
            formula,
            assignment,
            unsat,
            t: 0,
            cap: cap.unwrap_or_else(|| default_cap(formula.num_variables())),
        }
    }

    pub fn formula(&self) -> &'a Formula {
        self.formula
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn unsat(&self) -> &UnsatClauseSet {
        &self.unsat
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn is_satisfied(&self) -> bool {
        self.unsat.is_empty()
    }

    pub fn at_cap(&self) -> bool {
        self.t >= self.cap
    }

    /// Uniform draw over the currently unsatisfied clauses.
    pub fn sample_unsat_clause<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.unsat.sample(rng)
    }

    /// Negate one variable and repair the unsat set by rescanning the
    /// occurrence lists of the variable's two literals.
    pub fn apply_flip(&mut self, variable: u32) {
        self.assignment.flip(variable);
        let positive = crate::cnf::Literal::positive(variable);
        for lit in [positive, positive.negated()] {
            for occ in self.formula.occurrences(lit) {
                let clause = self.formula.clause(occ.clause);
                let satisfied = self.assignment.is_true(clause.first())
                    || self.assignment.is_true(clause.second());
                if satisfied {
                    self.unsat.remove(occ.clause);
                } else {
                    self.unsat.insert(occ.clause);
                }
            }
        }
    }

    /// One WalkSAT step: clause draw first, then the position draw, in that
    /// fixed order for determinism under a fixed seed.
    ///
    /// Calling this on a satisfied state or past the cap is a contract
    /// violation and panics.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> FlipRecord {
        assert!(!self.is_satisfied(), "step on satisfied state");
        assert!(self.t < self.cap, "step past flip cap");
        let clause_index = self.unsat.sample(rng);
        let h = 1 + rng.random_range(0..2u8);
        let flipped_variable = self.formula.clause(clause_index).literal(h).variable();
        self.apply_flip(flipped_variable);
        let record = FlipRecord {
            t: self.t,
            clause_index,
            h,
            flipped_variable,
            unsat_count_after: self.unsat.len() as u32,
        };
        self.t += 1;
        record
    }
}

/// Run WalkSAT to completion on a prepared state, delivering every flip to
/// `sink` in order.
pub fn run_state<R: Rng + ?Sized>(
    mut state: EngineState<'_>,
    rng: &mut R,
    mut sink: impl FnMut(&FlipRecord),
) -> RunOutcome {
    let n = state.formula.num_variables() as usize;
    let mut per_variable_flip_counts = vec![0u64; n];
    while !state.is_satisfied() && !state.at_cap() {
        let record = state.step(rng);
        per_variable_flip_counts[record.flipped_variable as usize - 1] += 1;
        sink(&record);
    }
    RunOutcome {
        status: if state.is_satisfied() {
            RunStatus::Satisfied
        } else {
            RunStatus::CapReached
        },
        flips: state.t,
        final_assignment: state.assignment,
        per_variable_flip_counts,
        trace: None,
    }
}

/// Run WalkSAT from a seed with the default or given cap.
pub fn run(formula: &Formula, seed: u64, cap: Option<u64>) -> RunOutcome {
    run_with_sink(formula, seed, cap, |_| {})
}

/// Like [`run`], streaming each [`FlipRecord`] to `sink`.
pub fn run_with_sink(
    formula: &Formula,
    seed: u64,
    cap: Option<u64>,
    sink: impl FnMut(&FlipRecord),
) -> RunOutcome {
    let mut rng = stream(seed);
    run_state(EngineState::new(formula, cap), &mut rng, sink)
}

/// Like [`run`], buffering the full trace into the outcome. Intended for
/// small instances; a full trace at large n is huge.
pub fn run_traced(formula: &Formula, seed: u64, cap: Option<u64>) -> RunOutcome {
    let mut trace = Vec::new();
    let mut outcome = run_with_sink(formula, seed, cap, |r| trace.push(*r));
    outcome.trace = Some(trace);
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{Clause, Literal};
    use crate::rng::stream;

    fn formula(n: u32, spec: &[(i64, i64)]) -> Formula {
        let clauses = spec
            .iter()
            .map(|&(a, b)| {
                Clause::new(
                    Literal::from_dimacs(a).unwrap(),
                    Literal::from_dimacs(b).unwrap(),
                )
                .unwrap()
            })
            .collect();
        Formula::new(n, clauses).unwrap()
    }

    #[test]
    fn init_positive_clause_already_satisfied() {
        let f = formula(2, &[(1, 2)]);
        let state = EngineState::new(&f, None);
        assert!(state.is_satisfied());
        assert_eq!(state.cap(), 400);
    }

    #[test]
    fn init_all_negative_clause_unsatisfied() {
        let f = formula(2, &[(-1, -2)]);
        let state = EngineState::new(&f, None);
        assert_eq!(state.unsat().as_slice(), &[0]);
    }

    #[test]
    fn init_hand_checked_mixed_pair() {
        let f = formula(2, &[(-1, 2), (-1, -2)]);
        let state = EngineState::new(&f, None);
        assert_eq!(state.unsat().as_slice(), &[1]);
    }

    #[test]
    fn single_negative_clause_needs_exactly_one_flip() {
        let f = formula(2, &[(-1, -2)]);
        for seed in 0..50 {
            let outcome = run(&f, seed, None);
            assert_eq!(outcome.status, RunStatus::Satisfied);
            assert_eq!(outcome.flips, 1);
            let values = outcome.final_assignment.values();
            assert_eq!(values.iter().filter(|&&v| v == -1).count(), 1);
        }
    }

    #[test]
    fn satisfied_at_start_means_zero_flips() {
        let f = formula(3, &[(1, 2), (2, 3), (1, -3)]);
        let outcome = run(&f, 7, None);
        assert_eq!(outcome.status, RunStatus::Satisfied);
        assert_eq!(outcome.flips, 0);
    }

    #[test]
    fn unsatisfiable_gadget_hits_cap_and_returns_assignment() {
        let f = formula(2, &[(1, 2), (1, -2), (-1, 2), (-1, -2)]);
        let outcome = run(&f, 3, Some(100));
        assert_eq!(outcome.status, RunStatus::CapReached);
        assert_eq!(outcome.flips, 100);
        assert_eq!(outcome.final_assignment.len(), 2);
    }

    #[test]
    fn forced_branch_trace() {
        // From all-true the only unsatisfied clause is (-1 v -2). Flipping
        // x2 (h = 2) leaves clause (-1 v 2) unsatisfied; flipping x1 (h = 1)
        // satisfies both.
        let f = formula(2, &[(-1, -2), (-1, 2)]);
        let mut state = EngineState::new(&f, None);
        assert_eq!(state.unsat().as_slice(), &[0]);
        state.apply_flip(2);
        assert_eq!(state.unsat().as_slice(), &[1]);
        state.apply_flip(2); // involution: back to the original set
        assert_eq!(state.unsat().as_slice(), &[0]);
        state.apply_flip(1);
        assert!(state.is_satisfied());
    }

    #[test]
    fn step_keeps_unsat_set_consistent_with_full_reevaluation() {
        let f = crate::cnf::generate_random_2cnf(40, 60, 11).unwrap();
        let mut state = EngineState::new(&f, Some(500));
        let mut rng = stream(21);
        while !state.is_satisfied() && !state.at_cap() {
            let before = state.assignment().clone();
            let record = state.step(&mut rng);
            // exactly one variable changed
            let diff: Vec<u32> = (1..=f.num_variables())
                .filter(|&v| before.value(v) != state.assignment().value(v))
                .collect();
            assert_eq!(diff, vec![record.flipped_variable]);
            // incremental set matches a full re-evaluation
            let eval = f.evaluate(state.assignment()).unwrap();
            let mut incremental: Vec<u32> = state.unsat().iter().collect();
            incremental.sort_unstable();
            assert_eq!(incremental, eval.unsat_indices);
            assert_eq!(record.unsat_count_after as usize, eval.unsat_indices.len());
        }
    }

    #[test]
    fn corrupted_unsat_set_is_caught_by_reevaluation() {
        // Negative control: skipping the repair must be visible to the
        // consistency check above.
        let f = formula(2, &[(-1, -2), (-1, 2)]);
        let mut state = EngineState::new(&f, None);
        state.assignment.flip(2); // flip without repairing the set
        let eval = f.evaluate(state.assignment()).unwrap();
        let mut incremental: Vec<u32> = state.unsat().iter().collect();
        incremental.sort_unstable();
        assert_ne!(incremental, eval.unsat_indices);
    }

    #[test]
    fn flip_counts_sum_to_total() {
        let f = crate::cnf::generate_random_2cnf(30, 27, 5).unwrap();
        let outcome = run(&f, 17, None);
        assert_eq!(
            outcome.per_variable_flip_counts.iter().sum::<u64>(),
            outcome.flips
        );
        if outcome.status == RunStatus::Satisfied {
            assert!(f.is_satisfied_by(&outcome.final_assignment));
        }
    }

    #[test]
    fn trace_is_delivered_in_order() {
        let f = formula(2, &[(-1, -2), (-1, 2), (1, -2)]);
        let outcome = run_traced(&f, 42, None);
        let trace = outcome.trace.unwrap();
        assert_eq!(trace.len() as u64, outcome.flips);
        for (i, record) in trace.iter().enumerate() {
            assert_eq!(record.t, i as u64);
            assert!(record.h == 1 || record.h == 2);
            assert_eq!(
                record.flipped_variable,
                f.clause(record.clause_index).literal(record.h).variable()
            );
        }
    }

    #[test]
    fn runs_are_reproducible_by_seed() {
        let f = crate::cnf::generate_random_2cnf(60, 54, 8).unwrap();
        let a = run(&f, 99, None);
        let b = run(&f, 99, None);
        assert_eq!(a.flips, b.flips);
        assert_eq!(a.final_assignment, b.final_assignment);
    }
}
