//! Unit clause propagation, implication sub-formulas and the X and Y
//! statistics.
//!
//! UCP closes a set of literals deemed true under the rule: if `l` is in the
//! set and the formula has a clause `¬l ∨ l'`, then `l'` joins the set. The
//! closure seeded with a single literal `l` spans the implication
//! sub-formula of `l`; the X statistic is the sum over all `2n` literals of
//! the squared variable counts of these sub-formulas.

use std::collections::VecDeque;

use thiserror::Error;

use crate::cnf::{Assignment, Formula, Literal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImplicationError {
    #[error("y statistic needs n >= 2, got {n}")]
    DegenerateLogarithm { n: u32 },
}

/// Output of UCP: the closed literal set L, one triggering clause per
/// propagated literal, and the underlying variable set V.
///
/// `literals` is in propagation (FIFO) order with the seeds first; as a set
/// it does not depend on processing order. `clauses` records the first
/// clause that triggered each propagated literal and may differ between
/// equivalent processing orders.
///
/// L may contain both a variable and its negation; UCP does not detect
/// conflicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UcpResult {
    pub literals: Vec<Literal>,
    pub clauses: Vec<u32>,
    pub variables: Vec<u32>,
}

/// The implication sub-formula of a single seed literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationSubformula {
    pub root: Literal,
    pub variables: Vec<u32>,
    pub clause_indices: Vec<u32>,
}

/// Reusable epoch-stamped scratch space for repeated UCP runs on one
/// formula size. Avoids per-call clearing: a slot is visited iff its stamp
/// equals the current epoch.
#[derive(Clone, Debug)]
pub struct UcpScratch {
    literal_epoch: Vec<u32>,
    variable_epoch: Vec<u32>,
    epoch: u32,
    queue: VecDeque<Literal>,
}

impl UcpScratch {
    pub fn new(num_variables: u32) -> Self {
        UcpScratch {
            literal_epoch: vec![0; 2 * num_variables as usize],
            variable_epoch: vec![0; num_variables as usize],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    fn begin(&mut self, num_variables: u32) {
        let lits = 2 * num_variables as usize;
        if self.literal_epoch.len() < lits {
            self.literal_epoch.resize(lits, 0);
            self.variable_epoch.resize(num_variables as usize, 0);
        }
        if self.epoch == u32::MAX {
            self.literal_epoch.fill(0);
            self.variable_epoch.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.queue.clear();
    }

    /// Run UCP from `seeds`, invoking `on_literal(literal, newly_seen_variable)`
    /// for every member of L in FIFO order and `on_clause` for every recorded
    /// triggering clause. Returns (|L|, |V|).
    pub fn run(
        &mut self,
        formula: &Formula,
        seeds: impl IntoIterator<Item = Literal>,
        mut on_literal: impl FnMut(Literal, bool),
        mut on_clause: impl FnMut(u32),
    ) -> (usize, usize) {
        self.begin(formula.num_variables());
        let epoch = self.epoch;
        let mut literal_count = 0usize;
        let mut variable_count = 0usize;
        let visit = |lit: Literal,
                         literal_epoch: &mut [u32],
                         variable_epoch: &mut [u32],
                         literal_count: &mut usize,
                         variable_count: &mut usize,
                         on_literal: &mut dyn FnMut(Literal, bool)|
         -> bool {
            if literal_epoch[lit.index()] == epoch {
                return false;
            }
            literal_epoch[lit.index()] = epoch;
            *literal_count += 1;
            let var_slot = &mut variable_epoch[lit.variable() as usize - 1];
            let new_variable = *var_slot != epoch;
            if new_variable {
                *var_slot = epoch;
                *variable_count += 1;
            }
            on_literal(lit, new_variable);
            true
        };
        for seed in seeds {
            if visit(
                seed,
                &mut self.literal_epoch,
                &mut self.variable_epoch,
                &mut literal_count,
                &mut variable_count,
                &mut on_literal,
            ) {
                self.queue.push_back(seed);
            }
        }
        while let Some(lit) = self.queue.pop_front() {
            // Clauses of the form ¬lit ∨ l' are exactly the occurrences of
            // the negation of lit.
            for occ in formula.occurrences(lit.negated()) {
                let clause = formula.clause(occ.clause);
                let implied = clause.literal(if occ.h == 1 { 2 } else { 1 });
                if visit(
                    implied,
                    &mut self.literal_epoch,
                    &mut self.variable_epoch,
                    &mut literal_count,
                    &mut variable_count,
                    &mut on_literal,
                ) {
                    self.queue.push_back(implied);
                    on_clause(occ.clause);
                }
            }
        }
        (literal_count, variable_count)
    }

    /// |V| of the sub-formula seeded with one literal.
    pub fn subformula_size(&mut self, formula: &Formula, seed: Literal) -> usize {
        self.run(formula, [seed], |_, _| {}, |_| {}).1
    }
}

/// Least fixed point of the propagation rule over `seeds`.
pub fn ucp(formula: &Formula, seeds: &[Literal]) -> UcpResult {
    let mut result = UcpResult {
        literals: Vec::new(),
        clauses: Vec::new(),
        variables: Vec::new(),
    };
    let mut scratch = UcpScratch::new(formula.num_variables());
    scratch.run(
        formula,
        seeds.iter().copied(),
        |lit, new_var| {
            result.literals.push(lit);
            if new_var {
                result.variables.push(lit.variable());
            }
        },
        |clause| result.clauses.push(clause),
    );
    result
}

/// The implication sub-formula of a single literal.
pub fn implication_subformula(formula: &Formula, literal: Literal) -> ImplicationSubformula {
    let result = ucp(formula, &[literal]);
    ImplicationSubformula {
        root: literal,
        variables: result.variables,
        clause_indices: result.clauses,
    }
}

/// `|V(Φ, {l})|` for every literal, indexed by `Literal::index()`.
pub fn subformula_sizes(formula: &Formula) -> Vec<u32> {
    let mut scratch = UcpScratch::new(formula.num_variables());
    (0..2 * formula.num_variables() as usize)
        .map(|idx| scratch.subformula_size(formula, Literal::from_index(idx)) as u32)
        .collect()
}

pub fn x_statistic_from_sizes(sizes: &[u32]) -> u64 {
    sizes.iter().map(|&s| u64::from(s) * u64::from(s)).sum()
}

/// X(Φ): the sum over all 2n literals of the squared sizes of their
/// implication sub-formulas.
pub fn x_statistic(formula: &Formula) -> u64 {
    x_statistic_from_sizes(&subformula_sizes(formula))
}

/// Y(Φ): per-variable terms of X truncated at `ln(n)^4`.
pub fn y_statistic_from_sizes(sizes: &[u32], num_variables: u32) -> Result<f64, ImplicationError> {
    if num_variables < 2 {
        return Err(ImplicationError::DegenerateLogarithm { n: num_variables });
    }
    let truncation = f64::from(num_variables).ln().powi(4);
    let mut total = 0.0;
    for v in 1..=num_variables {
        let pos = f64::from(sizes[Literal::positive(v).index()]);
        let neg = f64::from(sizes[Literal::negative(v).index()]);
        total += (pos * pos + neg * neg).min(truncation);
    }
    Ok(total)
}

/// Y(Φ) computed from scratch; truncation uses the natural logarithm.
pub fn y_statistic(formula: &Formula) -> Result<f64, ImplicationError> {
    y_statistic_from_sizes(&subformula_sizes(formula), formula.num_variables())
}

/// The lock-in predicate: all literals of L(Φ, {l}) are true under the
/// assignment.
pub fn predicate_e(formula: &Formula, literal: Literal, assignment: &Assignment) -> bool {
    ucp(formula, &[literal])
        .literals
        .iter()
        .all(|&l| assignment.is_true(l))
}
