//! One experiment data point per WalkSAT run, and the CSV schema it
//! serializes to.

use walklab_core::RunStatus;

/// Fixed header, fixed column order. `drift_mean` and `drift_stderr` are
/// empty when no drift data was collected.
pub const CSV_HEADER: &str = "n,m,alpha,seed,sat,status,flips,flips_per_n,wall_ns,x_stat,y_stat,max_subformula,max_component,persistence_violations,drift_mean,drift_stderr,case1,case2,case3,case4";

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub n: u32,
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
    pub sat: bool,
    pub status: RunStatus,
    pub flips: u64,
    /// Wall time around the flip loop only.
    pub wall_ns: u128,
    pub x_stat: u64,
    pub y_stat: f64,
    pub max_subformula: u32,
    pub max_component: u32,
    pub persistence_violations: u64,
    pub drift_mean: Option<f64>,
    pub drift_stderr: Option<f64>,
    pub case_counts: [u64; 4],
}

impl RunRecord {
    pub fn flips_per_n(&self) -> f64 {
        self.flips as f64 / f64::from(self.n)
    }

    pub fn status_str(&self) -> &'static str {
        match self.status {
            RunStatus::Satisfied => "Satisfied",
            RunStatus::CapReached => "CapReached",
        }
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.alpha,
            self.seed,
            if self.sat { "SAT" } else { "UNSAT" },
            self.status_str(),
            self.flips,
            self.flips_per_n(),
            self.wall_ns,
            self.x_stat,
            self.y_stat,
            self.max_subformula,
            self.max_component,
            self.persistence_violations,
            opt(self.drift_mean),
            opt(self.drift_stderr),
            self.case_counts[0],
            self.case_counts[1],
            self.case_counts[2],
            self.case_counts[3],
        )
    }
}

/// Per grid point summary over the satisfiable rows.
#[derive(Clone, Debug)]
pub struct GroupSummary {
    pub n: u32,
    pub alpha: f64,
    pub samples: usize,
    pub sat_samples: usize,
    pub mean_flips_per_n: f64,
    pub median_flips_per_n: f64,
    pub p10_flips_per_n: f64,
    pub p90_flips_per_n: f64,
    /// Fraction of runs where WalkSAT finished with a satisfying assignment.
    pub success_rate: f64,
    pub mean_x_per_n: f64,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Group records by (n, alpha) in first-appearance order; T/n statistics use
/// only oracle-satisfiable rows.
pub fn summarize(records: &[RunRecord]) -> Vec<GroupSummary> {
    let mut order: Vec<(u32, f64)> = Vec::new();
    for r in records {
        if !order.iter().any(|&(n, a)| n == r.n && a == r.alpha) {
            order.push((r.n, r.alpha));
        }
    }
    order
        .into_iter()
        .map(|(n, alpha)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.n == n && r.alpha == alpha)
                .collect();
            let sat: Vec<&&RunRecord> = group.iter().filter(|r| r.sat).collect();
            let mut tn: Vec<f64> = sat.iter().map(|r| r.flips_per_n()).collect();
            tn.sort_by(|a, b| a.partial_cmp(b).expect("flips_per_n is finite"));
            let mean = |v: &[f64]| {
                if v.is_empty() {
                    f64::NAN
                } else {
                    v.iter().sum::<f64>() / v.len() as f64
                }
            };
            let successes = group
                .iter()
                .filter(|r| r.status == RunStatus::Satisfied)
                .count();
            let x_per_n: Vec<f64> = sat
                .iter()
                .map(|r| r.x_stat as f64 / f64::from(r.n))
                .collect();
            GroupSummary {
                n,
                alpha,
                samples: group.len(),
                sat_samples: sat.len(),
                mean_flips_per_n: mean(&tn),
                median_flips_per_n: percentile(&tn, 0.5),
                p10_flips_per_n: percentile(&tn, 0.1),
                p90_flips_per_n: percentile(&tn, 0.9),
                success_rate: successes as f64 / group.len() as f64,
                mean_x_per_n: mean(&x_per_n),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: u32, alpha: f64, sat: bool, flips: u64) -> RunRecord {
        RunRecord {
            n,
            m: (alpha * n as f64).round() as usize,
            alpha,
            seed: 0,
            sat,
            status: if sat {
                RunStatus::Satisfied
            } else {
                RunStatus::CapReached
            },
            flips,
            wall_ns: 0,
            x_stat: 2 * u64::from(n),
            y_stat: 2.0 * f64::from(n),
            max_subformula: 1,
            max_component: 1,
            persistence_violations: 0,
            drift_mean: None,
            drift_stderr: None,
            case_counts: [0; 4],
        }
    }

    #[test]
    fn csv_row_has_schema_arity() {
        let row = record(100, 0.5, true, 42).csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn summary_filters_unsat_rows_from_flip_stats() {
        let records = vec![
            record(100, 0.5, true, 100),
            record(100, 0.5, true, 300),
            record(100, 0.5, false, 10_000),
        ];
        let summary = summarize(&records);
        assert_eq!(summary.len(), 1);
        let s = &summary[0];
        assert_eq!(s.samples, 3);
        assert_eq!(s.sat_samples, 2);
        assert!((s.mean_flips_per_n - 2.0).abs() < 1e-12);
        assert!((s.success_rate - 2.0 / 3.0).abs() < 1e-12);
        assert!(s.p10_flips_per_n <= s.median_flips_per_n);
        assert!(s.median_flips_per_n <= s.p90_flips_per_n);
    }
}
