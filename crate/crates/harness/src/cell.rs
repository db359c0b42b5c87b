//! Grid cells: one (n, alpha, replicate) point of an experiment, run through
//! the full generate / solve / walk / instrument pipeline.
//!
//! All randomness in a cell derives from its single `seed` through fixed
//! stream roles, so results are identical for any worker count and for the
//! sequential and parallel drivers alike.

use std::time::Instant;

use walklab_core::{
    default_cap, derive_seed, generate_random_2cnf, run_state, solve_2sat, stream,
    subformula_sizes, variable_graph_components, x_statistic_from_sizes, y_statistic_from_sizes,
    Assignment, EngineState, Formula, Instrumentation, SatCertificate,
};

use crate::record::RunRecord;

/// Stream roles under a cell seed.
const ROLE_GEN: u64 = 1;
const ROLE_WALK: u64 = 2;
const ROLE_TRACK: u64 = 3;

/// On instances the oracle proves unsatisfiable, WalkSAT would burn the full
/// default budget of `100 n^2` flips to no end; cap those runs at `32 n`
/// instead (still far above any satisfiable-run time at the sizes we sweep).
const UNSAT_CAP_FACTOR: u64 = 32;

#[derive(Clone, Copy, Debug)]
pub struct Cell {
    pub n: u32,
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Cell {
    /// Cell for a (n, alpha) grid point: m = round(alpha * n), seed derived
    /// from the experiment seed and all cell coordinates. The alpha index is
    /// part of the hash because two nearby grid alphas can round to the same
    /// m at small n.
    pub fn new(n: u32, alpha: f64, alpha_index: u64, replicate: u64, experiment_seed: u64) -> Cell {
        let m = (alpha * f64::from(n)).round() as usize;
        Cell {
            n,
            m,
            alpha,
            seed: derive_seed(&[experiment_seed, u64::from(n), m as u64, alpha_index, replicate]),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CellOptions {
    /// Flip budget; None means the default `100 n^2`.
    pub cap: Option<u64>,
    /// Number of uniformly drawn tracked root variables for the mismatch
    /// supermartingale; 0 disables instrumentation. Only satisfiable
    /// instances are instrumented.
    pub track_vars: usize,
}

fn tracked_roots(formula: &Formula, cell: &Cell, count: usize) -> Vec<u32> {
    let mut rng = stream(derive_seed(&[cell.seed, ROLE_TRACK]));
    let n = formula.num_variables();
    let mut roots: Vec<u32> = Vec::with_capacity(count + 2);
    // the variables of the first clause unsatisfied at the all-true start,
    // so at least one tracked set is active from step 0
    let all_true = Assignment::all_true(n);
    if let Some(clause) = formula
        .clauses()
        .iter()
        .find(|c| !all_true.is_true(c.first()) && !all_true.is_true(c.second()))
    {
        roots.push(clause.first().variable());
        roots.push(clause.second().variable());
    }
    use rand::Rng;
    let target = (roots.len() + count).min(n as usize);
    while roots.len() < target {
        let v = rng.random_range(1..=n);
        if !roots.contains(&v) {
            roots.push(v);
        }
    }
    roots
}

/// Run one cell end to end: generate the formula, decide it exactly, compute
/// the structural statistics, run WalkSAT (instrumented when requested), and
/// assemble the record.
pub fn run_cell(cell: &Cell, options: &CellOptions) -> RunRecord {
    let formula = generate_random_2cnf(cell.n, cell.m, derive_seed(&[cell.seed, ROLE_GEN]))
        .expect("cell parameters are valid");
    run_formula(&formula, cell, options, |_| {})
}

/// The cell pipeline on an existing formula: exact oracle, structural
/// statistics, WalkSAT with optional instrumentation. `extra_sink` sees every
/// flip record in order (used by the CLI to stream traces to disk).
pub fn run_formula(
    formula: &Formula,
    cell: &Cell,
    options: &CellOptions,
    mut extra_sink: impl FnMut(&walklab_core::FlipRecord),
) -> RunRecord {
    let certificate = solve_2sat(formula);
    let sat = certificate.is_sat();

    let sizes = subformula_sizes(formula);
    let x_stat = x_statistic_from_sizes(&sizes);
    let y_stat = y_statistic_from_sizes(&sizes, cell.n).expect("n >= 2 in experiment grids");
    let max_subformula = sizes.iter().copied().max().unwrap_or(0);
    let max_component = variable_graph_components(formula).max_size();

    let user_cap = options.cap.unwrap_or_else(|| default_cap(cell.n));
    let cap = if sat {
        user_cap
    } else {
        user_cap.min(UNSAT_CAP_FACTOR * u64::from(cell.n))
    };

    let mut instrumentation = match (&certificate, options.track_vars) {
        (SatCertificate::Satisfiable(sigma_star), count) if count > 0 => {
            let roots = tracked_roots(formula, cell, count);
            Some(
                Instrumentation::new(formula, sigma_star, &roots, false)
                    .expect("oracle assignment satisfies the formula"),
            )
        }
        _ => None,
    };

    let mut rng = stream(derive_seed(&[cell.seed, ROLE_WALK]));
    let state = EngineState::new(formula, Some(cap));
    let started = Instant::now();
    let outcome = match instrumentation.as_mut() {
        Some(instr) => run_state(state, &mut rng, |record| {
            instr.on_flip(record);
            extra_sink(record);
        }),
        None => run_state(state, &mut rng, |record| extra_sink(record)),
    };
    let wall_ns = started.elapsed().as_nanos();

    let (persistence_violations, drift_mean, drift_stderr, case_counts) = match &instrumentation {
        Some(instr) => {
            let totals = instr.case_totals();
            let mut overall = walklab_core::TransitionStat::default();
            for stat in &totals {
                overall.merge(stat);
            }
            (
                instr.persistence_violations(),
                overall.mean(),
                overall.stderr(),
                [
                    totals[0].count,
                    totals[1].count,
                    totals[2].count,
                    totals[3].count,
                ],
            )
        }
        None => (0, None, None, [0; 4]),
    };

    RunRecord {
        n: cell.n,
        m: cell.m,
        alpha: cell.alpha,
        seed: cell.seed,
        sat,
        status: outcome.status,
        flips: outcome.flips,
        wall_ns,
        x_stat,
        y_stat,
        max_subformula,
        max_component,
        persistence_violations,
        drift_mean,
        drift_stderr,
        case_counts,
    }
}

/// Run every cell in order on the current thread.
pub fn run_cells_sequential(cells: &[Cell], options: &CellOptions) -> Vec<RunRecord> {
    cells.iter().map(|cell| run_cell(cell, options)).collect()
}

/// Run cells on a rayon pool of `workers` threads (0 = rayon's default).
/// Output order and content match the sequential driver exactly.
#[cfg(feature = "parallel")]
pub fn run_cells_parallel(cells: &[Cell], options: &CellOptions, workers: usize) -> Vec<RunRecord> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("rayon pool construction");
    pool.install(|| {
        cells
            .par_iter()
            .map(|cell| run_cell(cell, options))
            .collect()
    })
}

/// Dispatch to the parallel driver when compiled in, otherwise run
/// sequentially. `workers = 1` forces the sequential path.
pub fn run_cells(cells: &[Cell], options: &CellOptions, workers: usize) -> Vec<RunRecord> {
    #[cfg(feature = "parallel")]
    {
        if workers != 1 {
            return run_cells_parallel(cells, options, workers);
        }
    }
    let _ = workers;
    run_cells_sequential(cells, options)
}
