//! `walklab`: generate random 2-CNF formulas, run WalkSAT on them, sweep
//! experiment grids, verify the implementation against independent oracles,
//! and plot the results.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use walklab::{
    exit_code, render_svg, run_cells, run_default_suite, run_formula, summarize, Cell,
    CellOptions, CheckKind, RunRecord, CSV_HEADER,
};
use walklab_core::{
    generate_random_2cnf, parse_dimacs, subformula_sizes, variable_graph_components, write_dimacs,
    x_statistic_from_sizes, y_statistic_from_sizes, Formula,
};

#[derive(Parser)]
#[command(name = "walklab", about = "Random 2-SAT laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random 2-CNF formula and write it as DIMACS CNF.
    Gen {
        /// Number of variables.
        #[arg(long)]
        n: u32,
        /// Clause density; m = round(alpha * n).
        #[arg(long, conflicts_with = "m")]
        alpha: Option<f64>,
        /// Exact number of clauses.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One full run: oracle, WalkSAT, statistics; prints a one-row CSV.
    Run {
        /// DIMACS CNF input; a formula is generated from --n/--alpha/--m
        /// when omitted.
        formula: Option<PathBuf>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, conflicts_with = "m")]
        alpha: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Flip budget override (default 100 n^2).
        #[arg(long)]
        cap: Option<u64>,
        /// Tracked root variables for mismatch instrumentation.
        #[arg(long, default_value_t = 0)]
        track_vars: usize,
        /// Write the flip trace (t, clause, h, variable, unsat-after) here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sweep problem sizes at fixed clause densities; emit CSV and a summary.
    SweepN {
        /// Explicit n values; default is 16 points geometric in [2^10, 2^18].
        #[arg(long)]
        n: Vec<u32>,
        /// Clause densities; default 0.1 0.3 0.5 0.7 0.9.
        #[arg(long)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        replicates: u64,
        #[arg(long)]
        cap: Option<u64>,
        /// Worker threads; 0 = all cores, 1 = sequential.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = 0)]
        track_vars: usize,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep clause density at fixed n; emit CSV and a summary.
    SweepAlpha {
        #[arg(long, default_value_t = 1_000_000)]
        n: u32,
        /// Explicit densities; default is 32 points evenly in
        /// [0.5, 1 - 2^-10].
        #[arg(long)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        replicates: u64,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = 0)]
        track_vars: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suites; nonzero exit on failure (1 = exact
    /// check, 2 = statistical check only).
    Verify {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Implication sub-formula statistics (X, Y, maxima) for generated
    /// instances.
    UcpStats {
        #[arg(long)]
        n: u32,
        #[arg(long, conflicts_with = "m")]
        alpha: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        replicates: u64,
    },
    /// Render a sweep CSV as a standalone SVG.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn clause_count(n: u32, alpha: Option<f64>, m: Option<usize>) -> Result<usize> {
    match (alpha, m) {
        (_, Some(m)) => Ok(m),
        (Some(a), None) => {
            if a <= 0.0 || !a.is_finite() {
                bail!("--alpha must be positive and finite");
            }
            Ok((a * f64::from(n)).round() as usize)
        }
        (None, None) => bail!("one of --alpha or --m is required"),
    }
}

/// 16 geometrically spaced sizes in [2^10, 2^18], deduplicated.
fn default_n_grid() -> Vec<u32> {
    let points = 16;
    let (lo, hi) = (10.0f64, 18.0f64);
    let mut grid: Vec<u32> = (0..points)
        .map(|i| {
            let exponent = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            2f64.powf(exponent).round() as u32
        })
        .collect();
    grid.dedup();
    grid
}

/// 32 densities evenly spaced in [0.5, 1 - 2^-10].
fn default_alpha_grid() -> Vec<f64> {
    let points = 32;
    let (lo, hi) = (0.5, 1.0 - 2f64.powi(-10));
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn emit_csv(records: &[RunRecord], out: Option<&PathBuf>) -> Result<()> {
    let mut csv = String::with_capacity(64 * (records.len() + 1));
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for record in records {
        csv.push_str(&record.csv_row());
        csv.push('\n');
    }
    write_output(out, &csv)
}

fn print_summary(records: &[RunRecord]) {
    eprintln!(
        "{:>9} {:>8} {:>6} {:>10} {:>10} {:>10} {:>10} {:>8} {:>9} {:>9}",
        "n", "alpha", "runs", "mean T/n", "med T/n", "p10", "p90", "success", "mean X/n", "unsat%"
    );
    for s in summarize(records) {
        eprintln!(
            "{:>9} {:>8.4} {:>6} {:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>8.3} {:>9.3} {:>8.1}%",
            s.n,
            s.alpha,
            s.samples,
            s.mean_flips_per_n,
            s.median_flips_per_n,
            s.p10_flips_per_n,
            s.p90_flips_per_n,
            s.success_rate,
            s.mean_x_per_n,
            100.0 * (1.0 - s.sat_samples as f64 / s.samples as f64),
        );
    }
}

fn sweep(
    ns: &[u32],
    alphas: &[f64],
    seed: u64,
    replicates: u64,
    workers: usize,
    options: CellOptions,
    out: Option<&PathBuf>,
) -> Result<()> {
    if replicates == 0 {
        bail!("--replicates must be at least 1");
    }
    let mut cells = Vec::new();
    for &n in ns {
        if n < 2 {
            bail!("n must be at least 2, got {n}");
        }
        for (alpha_index, &alpha) in alphas.iter().enumerate() {
            if alpha <= 0.0 || !alpha.is_finite() {
                bail!("alpha must be positive and finite, got {alpha}");
            }
            for replicate in 0..replicates {
                cells.push(Cell::new(n, alpha, alpha_index as u64, replicate, seed));
            }
        }
    }
    let records = run_cells(&cells, &options, workers);
    emit_csv(&records, out)?;
    print_summary(&records);
    Ok(())
}

fn cmd_run(
    formula_path: Option<&PathBuf>,
    n: Option<u32>,
    alpha: Option<f64>,
    m: Option<usize>,
    seed: u64,
    options: CellOptions,
    trace: Option<&PathBuf>,
) -> Result<()> {
    let formula: Formula = match formula_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_dimacs(&text).context("parsing DIMACS input")?
        }
        None => {
            let n = n.context("--n is required without a formula file")?;
            let m = clause_count(n, alpha, m)?;
            generate_random_2cnf(n, m, seed).context("generating formula")?
        }
    };
    let cell = Cell {
        n: formula.num_variables(),
        m: formula.num_clauses(),
        alpha: formula.num_clauses() as f64 / f64::from(formula.num_variables()),
        seed,
    };
    let record = match trace {
        Some(path) => {
            let file = fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            let mut writer = BufWriter::new(file);
            writeln!(writer, "t,clause_index,h,flipped_variable,unsat_count_after")?;
            let record = run_formula(&formula, &cell, &options, |r| {
                writeln!(
                    writer,
                    "{},{},{},{},{}",
                    r.t, r.clause_index, r.h, r.flipped_variable, r.unsat_count_after
                )
                .expect("trace write");
            });
            writer.flush()?;
            record
        }
        None => run_formula(&formula, &cell, &options, |_| {}),
    };
    println!("{CSV_HEADER}");
    println!("{}", record.csv_row());
    Ok(())
}

fn cmd_ucp_stats(n: u32, alpha: Option<f64>, m: Option<usize>, seed: u64, replicates: u64) -> Result<()> {
    let m = clause_count(n, alpha, m)?;
    println!("n,m,seed,x_stat,x_per_n,y_stat,max_subformula,max_component");
    let mut sum_x_per_n = 0.0;
    for replicate in 0..replicates {
        let instance_seed = walklab_core::derive_seed(&[seed, replicate]);
        let formula = generate_random_2cnf(n, m, instance_seed)?;
        let sizes = subformula_sizes(&formula);
        let x = x_statistic_from_sizes(&sizes);
        let y = y_statistic_from_sizes(&sizes, n)?;
        let max_sub = sizes.iter().copied().max().unwrap_or(0);
        let max_comp = variable_graph_components(&formula).max_size();
        let x_per_n = x as f64 / f64::from(n);
        sum_x_per_n += x_per_n;
        println!("{n},{m},{instance_seed},{x},{x_per_n},{y},{max_sub},{max_comp}");
    }
    eprintln!(
        "mean X/n over {replicates} instances: {:.4}",
        sum_x_per_n / replicates as f64
    );
    Ok(())
}

fn cmd_verify(seed: u64) -> Result<ExitCode> {
    let report = run_default_suite(seed);
    for check in &report {
        let kind = match check.kind {
            CheckKind::Exact => "exact",
            CheckKind::Statistical => "stat ",
        };
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {kind} {:<24} {}", check.name, check.detail);
    }
    Ok(ExitCode::from(exit_code(&report) as u8))
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen { n, alpha, m, seed, out } => {
            let m = clause_count(n, alpha, m)?;
            let formula = generate_random_2cnf(n, m, seed).context("generating formula")?;
            write_output(out.as_ref(), &write_dimacs(&formula))?;
            eprintln!("n={n} m={m} seed={seed}");
        }
        Command::Run {
            formula,
            n,
            alpha,
            m,
            seed,
            cap,
            track_vars,
            trace,
        } => cmd_run(
            formula.as_ref(),
            n,
            alpha,
            m,
            seed,
            CellOptions { cap, track_vars },
            trace.as_ref(),
        )?,
        Command::SweepN {
            n,
            alpha,
            seed,
            replicates,
            cap,
            workers,
            track_vars,
            out,
        } => {
            let ns = if n.is_empty() { default_n_grid() } else { n };
            let alphas = if alpha.is_empty() {
                vec![0.1, 0.3, 0.5, 0.7, 0.9]
            } else {
                alpha
            };
            sweep(
                &ns,
                &alphas,
                seed,
                replicates,
                workers,
                CellOptions { cap, track_vars },
                out.as_ref(),
            )?;
        }
        Command::SweepAlpha {
            n,
            alpha,
            seed,
            replicates,
            cap,
            workers,
            track_vars,
            out,
        } => {
            let alphas = if alpha.is_empty() {
                default_alpha_grid()
            } else {
                alpha
            };
            sweep(
                &[n],
                &alphas,
                seed,
                replicates,
                workers,
                CellOptions { cap, track_vars },
                out.as_ref(),
            )?;
        }
        Command::Verify { seed } => return cmd_verify(seed),
        Command::UcpStats {
            n,
            alpha,
            m,
            seed,
            replicates,
        } => cmd_ucp_stats(n, alpha, m, seed, replicates)?,
        Command::Plot { csv, out } => {
            let text = fs::read_to_string(&csv)
                .with_context(|| format!("reading {}", csv.display()))?;
            let svg = render_svg(&text)?;
            fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
