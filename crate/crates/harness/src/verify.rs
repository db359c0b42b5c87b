//! Verification suites behind `walklab verify`.
//!
//! Exact checks cross-validate independent implementations of the same
//! mathematical object (SCC solver vs enumeration, UCP vs digraph
//! reachability, incremental unsat set vs full re-evaluation) and assert the
//! trace-level laws (lock-in persistence, the flips-dominate-total
//! inequality, sub-formula domination by graph components, the per-case
//! transition table). Statistical checks assert Monte Carlo estimates
//! against their theoretical targets with explicit slack.

use std::collections::BTreeSet;

use rand::Rng;

use walklab_core::{
    brute_force_sat, check_fact_2_5, derive_seed, generate_random_2cnf, run_state,
    solve_2sat, stream, subformula_sizes, ucp, variable_graph_components, EngineState, Formula,
    Instrumentation, Literal, SatCertificate, TransitionStat, UnsatClauseSet,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// Must hold with zero tolerance; a failure is a bug.
    Exact,
    /// Monte Carlo estimate against a bound with stated slack.
    Statistical,
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub kind: CheckKind,
    pub passed: bool,
    /// Per-check counts or the failing quantity, for the report.
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, kind: CheckKind, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name,
            kind,
            passed,
            detail,
        }
    }
}

/// Literals reachable from `root` (inclusive) in the implication digraph,
/// built edge-by-edge with a plain BFS. Independent of the UCP code path.
pub fn reachable_literals(formula: &Formula, root: Literal) -> BTreeSet<Literal> {
    let n = formula.num_variables() as usize;
    let mut adjacency: Vec<Vec<Literal>> = vec![Vec::new(); 2 * n];
    for clause in formula.clauses() {
        let (l1, l2) = (clause.first(), clause.second());
        adjacency[l1.negated().index()].push(l2);
        adjacency[l2.negated().index()].push(l1);
    }
    let mut seen = BTreeSet::new();
    let mut queue = vec![root];
    seen.insert(root);
    while let Some(lit) = queue.pop() {
        for &next in &adjacency[lit.index()] {
            if seen.insert(next) {
                queue.push(next);
            }
        }
    }
    seen
}

/// SCC solver vs brute-force enumeration on small formulas.
pub fn check_oracle_equivalence(
    per_pair: usize,
    n_range: std::ops::RangeInclusive<u32>,
    m_range: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> CheckOutcome {
    let mut checked = 0u64;
    for n in n_range {
        for m in m_range.clone() {
            for i in 0..per_pair {
                let f = generate_random_2cnf(
                    n,
                    m,
                    derive_seed(&[seed, u64::from(n), m as u64, i as u64]),
                )
                .expect("valid parameters");
                let scc = solve_2sat(&f);
                let brute = brute_force_sat(&f).expect("n is small");
                if scc.is_sat() != brute.is_sat() {
                    return CheckOutcome::new(
                        "oracle-equivalence",
                        CheckKind::Exact,
                        false,
                        format!("verdict mismatch at n={n} m={m} instance {i}"),
                    );
                }
                if let SatCertificate::Satisfiable(a) = &scc {
                    if !f.is_satisfied_by(a) {
                        return CheckOutcome::new(
                            "oracle-equivalence",
                            CheckKind::Exact,
                            false,
                            format!("non-satisfying certificate at n={n} m={m} instance {i}"),
                        );
                    }
                }
                checked += 1;
            }
        }
    }
    CheckOutcome::new(
        "oracle-equivalence",
        CheckKind::Exact,
        true,
        format!("{checked} instances agree with enumeration"),
    )
}

/// UCP closure vs implication-digraph reachability, all 2n seeds per formula.
pub fn check_ucp_closure(formulas: usize, max_n: u32, seed: u64) -> CheckOutcome {
    let mut rng = stream(derive_seed(&[seed, 0x0c10]));
    let mut closures = 0u64;
    for i in 0..formulas {
        let n = rng.random_range(2..=max_n);
        let m = rng.random_range(0..=(2 * n) as usize);
        let f = generate_random_2cnf(n, m, rng.random::<u64>()).expect("valid parameters");
        for idx in 0..2 * n as usize {
            let root = Literal::from_index(idx);
            let via_ucp: BTreeSet<Literal> = ucp(&f, &[root]).literals.into_iter().collect();
            let via_bfs = reachable_literals(&f, root);
            if via_ucp != via_bfs {
                return CheckOutcome::new(
                    "ucp-closure",
                    CheckKind::Exact,
                    false,
                    format!("closure mismatch at formula {i}, root {root:?}"),
                );
            }
            closures += 1;
        }
    }
    CheckOutcome::new(
        "ucp-closure",
        CheckKind::Exact,
        true,
        format!("{closures} closures match digraph reachability"),
    )
}

/// Every literal propagated from σ*(x)·x is true under σ*, for every
/// variable of every satisfiable instance drawn.
pub fn check_closure_truth(formulas: usize, max_n: u32, seed: u64) -> CheckOutcome {
    let mut rng = stream(derive_seed(&[seed, 0x0fac]));
    let mut sat_instances = 0u64;
    for i in 0..formulas {
        let n = rng.random_range(2..=max_n);
        let m = rng.random_range(0..=(2 * n) as usize);
        let f = generate_random_2cnf(n, m, rng.random::<u64>()).expect("valid parameters");
        let SatCertificate::Satisfiable(sigma_star) = solve_2sat(&f) else {
            continue;
        };
        sat_instances += 1;
        for x in 1..=n {
            let closure = ucp(&f, &[sigma_star.true_literal(x)]);
            if !closure.literals.iter().all(|&l| sigma_star.is_true(l)) {
                return CheckOutcome::new(
                    "closure-truth",
                    CheckKind::Exact,
                    false,
                    format!("false literal propagated at formula {i}, root x{x}"),
                );
            }
        }
    }
    CheckOutcome::new(
        "closure-truth",
        CheckKind::Exact,
        true,
        format!("{sat_instances} satisfiable instances, all closures true under sigma*"),
    )
}

/// Aggregates from a batch of instrumented runs.
pub struct InstrumentedBatch {
    pub runs: u64,
    pub persistence_violations: u64,
    pub bad_transitions: u64,
    pub fact_2_5_failures: u64,
    pub case_totals: [TransitionStat; 4],
}

/// Run `runs` instrumented WalkSAT runs at (n, alpha) with `roots` tracked
/// variables each, pooling violation counts and case tallies.
pub fn instrumented_batch(runs: usize, n: u32, alpha: f64, roots: usize, seed: u64) -> InstrumentedBatch {
    let m = (alpha * f64::from(n)).round() as usize;
    let mut batch = InstrumentedBatch {
        runs: 0,
        persistence_violations: 0,
        bad_transitions: 0,
        fact_2_5_failures: 0,
        case_totals: [TransitionStat::default(); 4],
    };
    let mut i = 0u64;
    while batch.runs < runs as u64 {
        let gen_seed = derive_seed(&[seed, i, 1]);
        let walk_seed = derive_seed(&[seed, i, 2]);
        let root_seed = derive_seed(&[seed, i, 3]);
        i += 1;
        let f = generate_random_2cnf(n, m, gen_seed).expect("valid parameters");
        let SatCertificate::Satisfiable(sigma_star) = solve_2sat(&f) else {
            continue;
        };
        let mut rng = stream(root_seed);
        let mut tracked: Vec<u32> = Vec::with_capacity(roots);
        while tracked.len() < roots.min(n as usize) {
            let v = rng.random_range(1..=n);
            if !tracked.contains(&v) {
                tracked.push(v);
            }
        }
        let mut instr =
            Instrumentation::new(&f, &sigma_star, &tracked, false).expect("sigma* satisfies");
        let mut walk_rng = stream(walk_seed);
        let outcome = run_state(EngineState::new(&f, None), &mut walk_rng, |r| {
            instr.on_flip(r)
        });
        batch.runs += 1;
        batch.persistence_violations += instr.persistence_violations();
        batch.bad_transitions += instr.bad_transitions();
        let report = check_fact_2_5(&outcome, &sigma_star, &f).expect("sigma* satisfies");
        if !report.holds {
            batch.fact_2_5_failures += 1;
        }
        for (total, stat) in batch.case_totals.iter_mut().zip(instr.case_totals().iter()) {
            total.merge(stat);
        }
    }
    batch
}

/// Sub-formula sizes never exceed the size of the containing variable-graph
/// component, all 2n literals per instance.
pub fn check_domination(instances: usize, n: u32, alpha: f64, seed: u64) -> CheckOutcome {
    let m = (alpha * f64::from(n)).round() as usize;
    let mut literals = 0u64;
    for i in 0..instances {
        let f = generate_random_2cnf(n, m, derive_seed(&[seed, 0x0d0e, i as u64]))
            .expect("valid parameters");
        let sizes = subformula_sizes(&f);
        let comps = variable_graph_components(&f);
        for (idx, &size) in sizes.iter().enumerate() {
            let variable = Literal::from_index(idx).variable();
            if size > comps.size_of(variable) {
                return CheckOutcome::new(
                    "component-domination",
                    CheckKind::Exact,
                    false,
                    format!("|V| exceeds component size at instance {i}, literal index {idx}"),
                );
            }
            literals += 1;
        }
    }
    CheckOutcome::new(
        "component-domination",
        CheckKind::Exact,
        true,
        format!("{literals} literal sub-formulas dominated by their components"),
    )
}

/// Incremental unsat set equals a full re-evaluation after every step.
pub fn check_engine_consistency(instances: usize, max_n: u32, seed: u64) -> CheckOutcome {
    let mut rng = stream(derive_seed(&[seed, 0x0e0c]));
    let mut steps = 0u64;
    for i in 0..instances {
        let n = rng.random_range(2..=max_n);
        let m = rng.random_range(0..=(2 * n) as usize);
        let f = generate_random_2cnf(n, m, rng.random::<u64>()).expect("valid parameters");
        let mut state = EngineState::new(&f, Some(500));
        let mut walk_rng = stream(rng.random::<u64>());
        while !state.is_satisfied() && !state.at_cap() {
            state.step(&mut walk_rng);
            let eval = f.evaluate(state.assignment()).expect("assignment fits");
            let mut incremental: Vec<u32> = state.unsat().iter().collect();
            incremental.sort_unstable();
            if incremental != eval.unsat_indices {
                return CheckOutcome::new(
                    "engine-consistency",
                    CheckKind::Exact,
                    false,
                    format!("unsat set diverged at instance {i}, step {}", state.t()),
                );
            }
            steps += 1;
        }
    }
    CheckOutcome::new(
        "engine-consistency",
        CheckKind::Exact,
        true,
        format!("{steps} steps consistent with full re-evaluation"),
    )
}

/// Uniformity of the swap-remove sampler: each member of a fixed set is
/// drawn within 1% absolute of its fair share over 10^5 draws.
pub fn check_sampler_uniformity(seed: u64) -> CheckOutcome {
    let members = [3u32, 7, 11, 13, 19];
    let mut set = UnsatClauseSet::new(32);
    for &m in &members {
        set.insert(m);
    }
    let draws = 100_000u64;
    let mut counts = std::collections::HashMap::new();
    let mut rng = stream(derive_seed(&[seed, 0x5a3b]));
    for _ in 0..draws {
        *counts.entry(set.sample(&mut rng)).or_insert(0u64) += 1;
    }
    let fair = 1.0 / members.len() as f64;
    let worst = members
        .iter()
        .map(|m| (*counts.get(m).unwrap_or(&0) as f64 / draws as f64 - fair).abs())
        .fold(0.0f64, f64::max);
    CheckOutcome::new(
        "sampler-uniformity",
        CheckKind::Statistical,
        worst < 0.01,
        format!("max |empirical - fair| = {worst:.5} over {draws} draws"),
    )
}

/// Pooled one-step drift of the mismatch count is non-positive within three
/// standard errors.
pub fn check_drift_sign(batch: &InstrumentedBatch) -> CheckOutcome {
    let mut overall = TransitionStat::default();
    for stat in &batch.case_totals {
        overall.merge(stat);
    }
    match (overall.mean(), overall.stderr()) {
        (Some(mean), Some(stderr)) => CheckOutcome::new(
            "drift-sign",
            CheckKind::Statistical,
            mean <= 3.0 * stderr,
            format!("mean = {mean:.5}, stderr = {stderr:.5}, {} transitions", overall.count),
        ),
        _ => CheckOutcome::new(
            "drift-sign",
            CheckKind::Statistical,
            false,
            "too few transitions to estimate drift".to_string(),
        ),
    }
}

/// Empirical tail of sub-formula sizes against 3 exp(-alpha t / 20), checked
/// for all integer t in (4/(1-alpha), t_max].
pub fn check_tail_bound(
    n: u32,
    alpha: f64,
    instances: usize,
    t_max: u32,
    seed: u64,
) -> CheckOutcome {
    let m = (alpha * f64::from(n)).round() as usize;
    let t_min = (4.0 / (1.0 - alpha)).floor() as u32 + 1;
    let mut sizes: Vec<u32> = Vec::new();
    for i in 0..instances {
        let f = generate_random_2cnf(n, m, derive_seed(&[seed, 0x7a11, i as u64]))
            .expect("valid parameters");
        sizes.extend(subformula_sizes(&f));
    }
    let total = sizes.len() as f64;
    for t in t_min..=t_max {
        let empirical = sizes.iter().filter(|&&s| s > t).count() as f64 / total;
        let bound = 3.0 * (-alpha * f64::from(t) / 20.0).exp();
        if empirical > bound {
            return CheckOutcome::new(
                "tail-bound",
                CheckKind::Statistical,
                false,
                format!("Pr[|V| > {t}] = {empirical:.3e} exceeds bound {bound:.3e}"),
            );
        }
    }
    CheckOutcome::new(
        "tail-bound",
        CheckKind::Statistical,
        true,
        format!(
            "tail below 3 exp(-{alpha} t / 20) for t in {t_min}..={t_max} over {} literals",
            sizes.len()
        ),
    )
}

/// The full default verification suite, sized to finish in seconds.
pub fn run_default_suite(seed: u64) -> Vec<CheckOutcome> {
    let mut report = Vec::new();
    report.push(check_oracle_equivalence(60, 2..=7, 0..=12, seed));
    report.push(check_ucp_closure(120, 10, seed));
    report.push(check_closure_truth(120, 10, seed));
    let batch = instrumented_batch(12, 400, 0.8, 24, seed);
    report.push(CheckOutcome::new(
        "lock-in-persistence",
        CheckKind::Exact,
        batch.persistence_violations == 0,
        format!(
            "{} violations over {} instrumented runs",
            batch.persistence_violations, batch.runs
        ),
    ));
    report.push(CheckOutcome::new(
        "flips-dominate-total",
        CheckKind::Exact,
        batch.fact_2_5_failures == 0,
        format!("{} failures over {} runs", batch.fact_2_5_failures, batch.runs),
    ));
    report.push(CheckOutcome::new(
        "case-transition-table",
        CheckKind::Exact,
        batch.bad_transitions == 0,
        format!(
            "{} nonconforming transitions over {} runs",
            batch.bad_transitions, batch.runs
        ),
    ));
    report.push(check_domination(20, 2_000, 0.9, seed));
    report.push(check_engine_consistency(60, 60, seed));
    report.push(check_sampler_uniformity(seed));
    report.push(check_drift_sign(&batch));
    report.push(check_tail_bound(20_000, 0.5, 5, 100, seed));
    report
}

/// Exit code for a report: 0 all green, 1 any exact failure, 2 only
/// statistical failures.
pub fn exit_code(report: &[CheckOutcome]) -> i32 {
    if report
        .iter()
        .any(|c| !c.passed && c.kind == CheckKind::Exact)
    {
        1
    } else if report.iter().any(|c| !c.passed) {
        2
    } else {
        0
    }
}
