//! Online verification of structural claims along WalkSAT traces.
//!
//! For a satisfiable formula with a fixed satisfying assignment σ*, each
//! tracked root variable x owns the implication sub-formula of the literal
//! σ*(x)·x. Along a run we maintain the mismatch count
//!
//!   Δ*(x, t) = 1{σ(t) does not satisfy Φ} · #{l in L : σ(t)(l) ≠ σ*(l)},
//!
//! classify every flip by which of the chosen clause's variables lie in the
//! tracked variable set (Cases 1-4), tally the realized one-step
//! transitions, watch the lock-in predicate for persistence violations, and
//! count flips landing in the tracked set (the N counters).
//!
//! Case tallies and drift are accumulated on the raw mismatch sum, whose
//! one-step transitions are exactly the per-case equalities; the
//! satisfied-formula indicator is applied for Δ* values, hitting times and
//! the stopped-process check.

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::{Assignment, Clause, Formula, Literal};
use crate::engine::{FlipRecord, RunOutcome};
use crate::implication::{ucp, UcpScratch};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstrumentError {
    #[error("sigma_star does not satisfy the formula")]
    SigmaStarNotSatisfying,
    #[error("tracked root variable x{variable} out of range 1..={n}")]
    RootOutOfRange { variable: u32, n: u32 },
    #[error("drift report needs at least one tracker")]
    NoTrackers,
}

/// Flip classification by membership of the chosen clause's variables in a
/// tracked variable set: (out, out) -> 1, (in, out) -> 2, (out, in) -> 3,
/// (in, in) -> 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipCase {
    Case1,
    Case2,
    Case3,
    Case4,
}

impl FlipCase {
    pub fn index(self) -> usize {
        match self {
            FlipCase::Case1 => 0,
            FlipCase::Case2 => 1,
            FlipCase::Case3 => 2,
            FlipCase::Case4 => 3,
        }
    }

    pub const ALL: [FlipCase; 4] = [
        FlipCase::Case1,
        FlipCase::Case2,
        FlipCase::Case3,
        FlipCase::Case4,
    ];
}

pub fn classify_flip(clause: Clause, in_tracked_set: impl Fn(u32) -> bool) -> FlipCase {
    let first_in = in_tracked_set(clause.first().variable());
    let second_in = in_tracked_set(clause.second().variable());
    match (first_in, second_in) {
        (false, false) => FlipCase::Case1,
        (true, false) => FlipCase::Case2,
        (false, true) => FlipCase::Case3,
        (true, true) => FlipCase::Case4,
    }
}

/// Running tally of one-step transitions: count, sum and sum of squares.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TransitionStat {
    pub count: u64,
    pub sum: i64,
    pub sum_sq: u64,
}

impl TransitionStat {
    pub fn record(&mut self, delta: i32) {
        self.count += 1;
        self.sum += i64::from(delta);
        self.sum_sq += u64::from(delta.unsigned_abs()) * u64::from(delta.unsigned_abs());
    }

    pub fn merge(&mut self, other: &TransitionStat) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum as f64 / self.count as f64)
    }

    /// Standard error of the mean; None with fewer than two observations.
    pub fn stderr(&self) -> Option<f64> {
        if self.count < 2 {
            return None;
        }
        let n = self.count as f64;
        let mean = self.sum as f64 / n;
        let variance = (self.sum_sq as f64 / n - mean * mean).max(0.0) * n / (n - 1.0);
        Some((variance / n).sqrt())
    }
}

/// State for one tracked root variable.
#[derive(Clone, Debug)]
pub struct DeltaTracker {
    pub root_variable: u32,
    pub root_literal: Literal,
    /// Variable -> the unique literal of L over it. σ* satisfies all of L,
    /// so L holds at most one literal per variable.
    members: HashMap<u32, Literal>,
    literal_count: usize,
    /// Raw mismatch sum, before the satisfied-formula indicator.
    mismatch: u32,
    /// First t with Δ* = 0 (indicator applied).
    pub hit_time: Option<u64>,
    /// First t at which the lock-in predicate currently holds.
    established_at: Option<u64>,
    /// (t established, t violated) pairs; must stay empty.
    pub violations: Vec<(u64, u64)>,
    /// Steps at which Δ* > 0 after the hitting time.
    pub stopped_violations: u64,
    /// Steps at which Δ* exceeded |L|.
    pub bound_violations: u64,
    /// Realized raw-sum transitions per case, restricted to steps with
    /// Δ* > 0 before the flip.
    pub case_stats: [TransitionStat; 4],
    /// (case, h, delta) tuples outside the per-case transition table.
    pub bad_transitions: u64,
    /// N(Φ, root): flips landing in the tracked variable set, whole run.
    pub flips_in_set: u64,
    /// Δ* at every time 0..=T when history recording is on.
    pub history: Option<Vec<u32>>,
}

impl DeltaTracker {
    pub fn tracked_set_size(&self) -> usize {
        self.members.len()
    }

    pub fn literal_set_size(&self) -> usize {
        self.literal_count
    }

    pub fn contains_variable(&self, variable: u32) -> bool {
        self.members.contains_key(&variable)
    }

    /// Current Δ* given the satisfied indicator.
    fn delta(&self, satisfied: bool) -> u32 {
        if satisfied {
            0
        } else {
            self.mismatch
        }
    }
}

/// Per-run instrumentation context. Construct once per run on a satisfiable
/// formula and feed every [`FlipRecord`] in order via [`Instrumentation::on_flip`].
pub struct Instrumentation<'a> {
    formula: &'a Formula,
    trackers: Vec<DeltaTracker>,
    /// variable -> trackers whose L-set holds a literal over it
    by_variable: HashMap<u32, Vec<u32>>,
    current: Assignment,
    satisfied: bool,
    t: u64,
}

impl<'a> Instrumentation<'a> {
    pub fn new(
        formula: &'a Formula,
        sigma_star: &Assignment,
        roots: &[u32],
        record_history: bool,
    ) -> Result<Self, InstrumentError> {
        if !formula.is_satisfied_by(sigma_star) {
            return Err(InstrumentError::SigmaStarNotSatisfying);
        }
        let n = formula.num_variables();
        let current = Assignment::all_true(n);
        let satisfied = formula.is_satisfied_by(&current);

        let mut trackers = Vec::new();
        let mut by_variable: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut seen_roots = std::collections::HashSet::new();
        for &root in roots {
            if root == 0 || root > n {
                return Err(InstrumentError::RootOutOfRange { variable: root, n });
            }
            if !seen_roots.insert(root) {
                continue;
            }
            let root_literal = sigma_star.true_literal(root);
            let closure = ucp(formula, &[root_literal]);
            let mut members = HashMap::with_capacity(closure.variables.len());
            for &lit in &closure.literals {
                // σ* satisfies all of L, so no variable appears twice
                let prev = members.insert(lit.variable(), lit);
                debug_assert!(prev.is_none(), "conflicting literals under a satisfying σ*");
            }
            let mismatch = closure
                .literals
                .iter()
                .filter(|&&l| !current.is_true(l))
                .count() as u32;
            let tracker_index = trackers.len() as u32;
            for &v in members.keys() {
                by_variable.entry(v).or_default().push(tracker_index);
            }
            let delta0 = if satisfied { 0 } else { mismatch };
            trackers.push(DeltaTracker {
                root_variable: root,
                root_literal,
                literal_count: closure.literals.len(),
                members,
                mismatch,
                hit_time: (delta0 == 0).then_some(0),
                established_at: (mismatch == 0).then_some(0),
                violations: Vec::new(),
                stopped_violations: 0,
                bound_violations: 0,
                case_stats: [TransitionStat::default(); 4],
                bad_transitions: 0,
                flips_in_set: 0,
                history: record_history.then(|| vec![delta0]),
            });
        }
        Ok(Instrumentation {
            formula,
            trackers,
            by_variable,
            current,
            satisfied,
            t: 0,
        })
    }

    pub fn trackers(&self) -> &[DeltaTracker] {
        &self.trackers
    }

    pub fn current_time(&self) -> u64 {
        self.t
    }

    /// Consume one flip. Records must arrive in step order starting at 0.
    pub fn on_flip(&mut self, record: &FlipRecord) {
        assert_eq!(record.t, self.t, "out-of-order flip record");
        let flipped = record.flipped_variable;
        self.current.flip(flipped);
        let satisfied_after = record.unsat_count_after == 0;
        let clause = self.formula.clause(record.clause_index);

        for tracker in &mut self.trackers {
            let delta_before = tracker.delta(self.satisfied);

            let mut raw_change: i32 = 0;
            if let Some(&lit) = tracker.members.get(&flipped) {
                tracker.flips_in_set += 1;
                if self.current.is_true(lit) {
                    tracker.mismatch -= 1;
                    raw_change = -1;
                } else {
                    tracker.mismatch += 1;
                    raw_change = 1;
                }
            }

            if delta_before > 0 {
                let case = classify_flip(clause, |v| tracker.members.contains_key(&v));
                let conforms = match case {
                    FlipCase::Case1 => raw_change == 0,
                    FlipCase::Case2 => raw_change == if record.h == 1 { -1 } else { 0 },
                    FlipCase::Case3 => raw_change == if record.h == 2 { -1 } else { 0 },
                    FlipCase::Case4 => raw_change == -1 || raw_change == 1,
                };
                if !conforms {
                    tracker.bad_transitions += 1;
                }
                tracker.case_stats[case.index()].record(raw_change);
            }

            let delta_after = tracker.delta(satisfied_after);
            match tracker.hit_time {
                None => {
                    if delta_after == 0 {
                        tracker.hit_time = Some(record.t + 1);
                    }
                }
                Some(_) => {
                    if delta_after != 0 {
                        tracker.stopped_violations += 1;
                    }
                }
            }
            match tracker.established_at {
                Some(t0) => {
                    if tracker.mismatch > 0 {
                        tracker.violations.push((t0, record.t + 1));
                        tracker.established_at = None;
                    }
                }
                None => {
                    if tracker.mismatch == 0 {
                        tracker.established_at = Some(record.t + 1);
                    }
                }
            }
            if delta_after as usize > tracker.literal_count {
                tracker.bound_violations += 1;
            }
            if let Some(history) = &mut tracker.history {
                history.push(delta_after);
            }
        }

        self.satisfied = satisfied_after;
        self.t += 1;
    }

    pub fn persistence_violations(&self) -> u64 {
        self.trackers.iter().map(|t| t.violations.len() as u64).sum()
    }

    pub fn bad_transitions(&self) -> u64 {
        self.trackers.iter().map(|t| t.bad_transitions).sum()
    }

    pub fn stopped_violations(&self) -> u64 {
        self.trackers.iter().map(|t| t.stopped_violations).sum()
    }

    pub fn bound_violations(&self) -> u64 {
        self.trackers.iter().map(|t| t.bound_violations).sum()
    }

    /// Case tallies pooled over all trackers.
    pub fn case_totals(&self) -> [TransitionStat; 4] {
        let mut totals = [TransitionStat::default(); 4];
        for tracker in &self.trackers {
            for (total, stat) in totals.iter_mut().zip(tracker.case_stats.iter()) {
                total.merge(stat);
            }
        }
        totals
    }

    /// `by_variable` is internal; exposed for tests.
    pub fn trackers_over_variable(&self, variable: u32) -> usize {
        self.by_variable.get(&variable).map_or(0, Vec::len)
    }
}

/// Recompute Δ*(Φ, x, ·) from scratch for one variable.
pub fn delta_star(
    formula: &Formula,
    x: u32,
    sigma_star: &Assignment,
    sigma: &Assignment,
) -> Result<u64, InstrumentError> {
    if !formula.is_satisfied_by(sigma_star) {
        return Err(InstrumentError::SigmaStarNotSatisfying);
    }
    if formula.is_satisfied_by(sigma) {
        return Ok(0);
    }
    let root = sigma_star.true_literal(x);
    let closure = ucp(formula, &[root]);
    Ok(closure
        .literals
        .iter()
        .filter(|&&l| sigma.literal_value(l) != sigma_star.literal_value(l))
        .count() as u64)
}

/// Result of the flips-dominate-total check `T <= Σ_x N(Φ, σ*(x)·x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fact25Report {
    pub holds: bool,
    pub flips: u64,
    pub bound: u64,
}

/// Verify `T <= Σ_x N(Φ, σ*(x)·x)` with the sum over all n roots, using
/// per-variable flip counts: `Σ_x N = Σ_v flips(v) · #{x : v in V(Φ, σ*(x)·x)}`.
pub fn check_fact_2_5(
    outcome: &RunOutcome,
    sigma_star: &Assignment,
    formula: &Formula,
) -> Result<Fact25Report, InstrumentError> {
    if !formula.is_satisfied_by(sigma_star) {
        return Err(InstrumentError::SigmaStarNotSatisfying);
    }
    let n = formula.num_variables();
    let mut cover = vec![0u64; n as usize];
    let mut scratch = UcpScratch::new(n);
    for x in 1..=n {
        scratch.run(
            formula,
            [sigma_star.true_literal(x)],
            |lit, new_var| {
                if new_var {
                    cover[lit.variable() as usize - 1] += 1;
                }
            },
            |_| {},
        );
    }
    let bound = outcome
        .per_variable_flip_counts
        .iter()
        .zip(cover.iter())
        .map(|(&flips, &c)| flips * c)
        .sum();
    Ok(Fact25Report {
        holds: outcome.flips <= bound,
        flips: outcome.flips,
        bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftEstimate {
    pub count: u64,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
}

impl DriftEstimate {
    fn from_stat(stat: &TransitionStat) -> Self {
        DriftEstimate {
            count: stat.count,
            mean: stat.mean(),
            stderr: stat.stderr(),
        }
    }
}

/// One-step drift of the mismatch sum, overall and per case, restricted to
/// steps with Δ* > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftReport {
    pub overall: DriftEstimate,
    pub per_case: [DriftEstimate; 4],
}

/// Pool case tallies from many runs into drift estimates.
pub fn drift_report<'a>(
    tallies: impl IntoIterator<Item = &'a [TransitionStat; 4]>,
) -> Result<DriftReport, InstrumentError> {
    let mut totals = [TransitionStat::default(); 4];
    let mut any = false;
    for tally in tallies {
        any = true;
        for (total, stat) in totals.iter_mut().zip(tally.iter()) {
            total.merge(stat);
        }
    }
    if !any {
        return Err(InstrumentError::NoTrackers);
    }
    let mut overall = TransitionStat::default();
    for stat in &totals {
        overall.merge(stat);
    }
    Ok(DriftReport {
        overall: DriftEstimate::from_stat(&overall),
        per_case: [
            DriftEstimate::from_stat(&totals[0]),
            DriftEstimate::from_stat(&totals[1]),
            DriftEstimate::from_stat(&totals[2]),
            DriftEstimate::from_stat(&totals[3]),
        ],
    })
}
