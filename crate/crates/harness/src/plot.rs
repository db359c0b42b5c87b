//! Self-contained SVG rendering of sweep results.
//!
//! The input is a CSV in the harness schema. Satisfiable rows are plotted as
//! normalized flip counts T/n; the x axis is chosen automatically: against n
//! on a log scale when the file covers more than one problem size, otherwise
//! against the clause density alpha. A polyline connects the per-group
//! means. The output is deterministic for a given input.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};

use crate::record::CSV_HEADER;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum XAxis {
    LogN,
    Alpha,
}

#[derive(Clone, Copy, Debug)]
struct Point {
    n: u32,
    alpha: f64,
    flips_per_n: f64,
}

fn parse_rows(csv: &str) -> Result<Vec<Point>> {
    let mut lines = csv.lines();
    let header = lines.next().context("empty input: missing CSV header")?;
    if header.trim_end() != CSV_HEADER {
        bail!("unexpected CSV header: {header:?}");
    }
    let columns: Vec<&str> = CSV_HEADER.split(',').collect();
    let col = |name: &str| {
        columns
            .iter()
            .position(|&c| c == name)
            .expect("column exists in schema")
    };
    let (c_n, c_alpha, c_sat, c_tpn) = (col("n"), col("alpha"), col("sat"), col("flips_per_n"));

    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            bail!("row {}: expected {} fields, got {}", i + 2, columns.len(), fields.len());
        }
        if fields[c_sat] != "SAT" {
            continue;
        }
        points.push(Point {
            n: fields[c_n].parse().with_context(|| format!("row {}: n", i + 2))?,
            alpha: fields[c_alpha]
                .parse()
                .with_context(|| format!("row {}: alpha", i + 2))?,
            flips_per_n: fields[c_tpn]
                .parse()
                .with_context(|| format!("row {}: flips_per_n", i + 2))?,
        });
    }
    Ok(points)
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let raw_step = (hi - lo) / target as f64;
    let magnitude = 10f64.powf(raw_step.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|&m| m * magnitude)
        .find(|&s| s >= raw_step)
        .unwrap_or(10.0 * magnitude);
    let mut ticks = Vec::new();
    let mut t = (lo / step).ceil() * step;
    while t <= hi + 1e-9 * step {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Render the CSV to a standalone SVG document. An input with only a header
/// (or no satisfiable rows) still yields a valid plot with axes.
pub fn render_svg(csv: &str) -> Result<String> {
    let points = parse_rows(csv)?;

    let distinct_n: Vec<u32> = {
        let mut ns: Vec<u32> = points.iter().map(|p| p.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    };
    let axis = if distinct_n.len() > 1 {
        XAxis::LogN
    } else {
        XAxis::Alpha
    };

    let xs: Vec<f64> = points
        .iter()
        .map(|p| match axis {
            XAxis::LogN => f64::from(p.n).log10(),
            XAxis::Alpha => p.alpha,
        })
        .collect();
    let ys: Vec<f64> = points.iter().map(|p| p.flips_per_n).collect();

    let (x_lo, x_hi) = bounds(&xs, match axis {
        XAxis::LogN => (3.0, 6.0),
        XAxis::Alpha => (0.0, 1.0),
    });
    let (y_lo, y_hi) = bounds(&ys, (0.0, 1.0));

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axes
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );

    // x ticks and labels
    match axis {
        XAxis::LogN => {
            let lo_exp = x_lo.floor() as i32;
            let hi_exp = x_hi.ceil() as i32;
            for e in lo_exp..=hi_exp {
                let x = f64::from(e);
                if x < x_lo - 1e-9 || x > x_hi + 1e-9 {
                    continue;
                }
                let px = sx(x);
                let _ = writeln!(
                    svg,
                    r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
                    y0 + 6.0
                );
                let _ = writeln!(
                    svg,
                    r#"<text x="{px:.2}" y="{:.2}" font-size="12" text-anchor="middle">1e{e}</text>"#,
                    y0 + 22.0
                );
            }
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">n (log scale)</text>"#,
                (x0 + x1) / 2.0,
                HEIGHT - 15.0
            );
        }
        XAxis::Alpha => {
            for t in nice_ticks(x_lo, x_hi, 8) {
                let px = sx(t);
                let _ = writeln!(
                    svg,
                    r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
                    y0 + 6.0
                );
                let _ = writeln!(
                    svg,
                    r#"<text x="{px:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
                    y0 + 22.0,
                    fmt_num((t * 1e6).round() / 1e6)
                );
            }
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">clause density alpha</text>"#,
                (x0 + x1) / 2.0,
                HEIGHT - 15.0
            );
        }
    }

    // y ticks and label
    for t in nice_ticks(y_lo, y_hi, 8) {
        let py = sy(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#,
            x0 - 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            x0 - 10.0,
            py + 4.0,
            fmt_num((t * 1e6).round() / 1e6)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {:.2})">flips per variable (T/n)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    // scatter of satisfiable runs
    for (x, y) in xs.iter().zip(ys.iter()) {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue" fill-opacity="0.6"/>"#,
            sx(*x),
            sy(*y)
        );
    }

    // per-group mean line, groups ordered along the x axis
    let mut groups: Vec<(f64, f64, u64)> = Vec::new();
    for (x, y) in xs.iter().zip(ys.iter()) {
        match groups.iter_mut().find(|(gx, _, _)| (*gx - x).abs() < 1e-12) {
            Some(group) => {
                group.1 += y;
                group.2 += 1;
            }
            None => groups.push((*x, *y, 1)),
        }
    }
    groups.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite x"));
    if groups.len() > 1 {
        let path: Vec<String> = groups
            .iter()
            .map(|&(x, sum, count)| format!("{:.2},{:.2}", sx(x), sy(sum / count as f64)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="crimson" stroke-width="2"/>"#,
            path.join(" ")
        );
    }

    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

fn bounds(values: &[f64], fallback: (f64, f64)) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return fallback;
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: u32, alpha: f64, sat: &str, flips: u64) -> String {
        let tpn = flips as f64 / f64::from(n);
        format!(
            "{n},{m},{alpha},1,{sat},Satisfied,{flips},{tpn},0,0,0,0,0,0,,,0,0,0,0",
            m = (alpha * f64::from(n)).round() as usize
        )
    }

    #[test]
    fn header_only_input_renders_axes() {
        let svg = render_svg(&format!("{CSV_HEADER}\n")).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<circle"));
        assert!(svg.matches("<line").count() >= 2);
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(render_svg("n,m,alpha\n").is_err());
        assert!(render_svg("").is_err());
    }

    #[test]
    fn multiple_sizes_choose_log_n_axis() {
        let csv = format!(
            "{CSV_HEADER}\n{}\n{}\n{}\n",
            row(1000, 0.5, "SAT", 500),
            row(10000, 0.5, "SAT", 6000),
            row(100000, 0.5, "SAT", 70000)
        );
        let svg = render_svg(&csv).unwrap();
        assert!(svg.contains("n (log scale)"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn single_size_chooses_alpha_axis_and_skips_unsat() {
        let csv = format!(
            "{CSV_HEADER}\n{}\n{}\n{}\n",
            row(1000, 0.5, "SAT", 400),
            row(1000, 0.9, "SAT", 2000),
            row(1000, 0.9, "UNSAT", 32000)
        );
        let svg = render_svg(&csv).unwrap();
        assert!(svg.contains("clause density alpha"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn rendering_is_deterministic() {
        let csv = format!(
            "{CSV_HEADER}\n{}\n{}\n",
            row(1000, 0.5, "SAT", 500),
            row(1000, 0.7, "SAT", 900)
        );
        assert_eq!(render_svg(&csv).unwrap(), render_svg(&csv).unwrap());
    }
}
