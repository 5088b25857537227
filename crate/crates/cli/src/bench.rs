//! Corpus benchmark: generate games, solve each by decomposition, and
//! optionally time plain support enumeration on the same game.

use std::io::Write;
use std::time::{Duration, Instant};

use bimatrix_core::equilibrium::solve_base_until;
use bimatrix_core::exec::{Clock, Sequential};
use bimatrix_core::gen::{generate_tree, realize_with, GenConfig};
use bimatrix_core::solver::SolveOptions;
use bimatrix_core::{is_nash, Error};

use crate::runtime::{millis, with_fork, InstantClock};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub count: usize,
    /// Game `i` (0-based) is generated with seed `seed + i`.
    pub seed: u64,
    /// Generator settings; the seed field is ignored.
    pub config: GenConfig,
    pub eliminate: bool,
    pub baseline: bool,
    /// Larger games are not given to the baseline at all.
    pub baseline_max_size: usize,
    pub baseline_timeout: Duration,
    pub threads: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            count: 100,
            seed: 1,
            config: GenConfig::default(),
            eliminate: true,
            baseline: false,
            baseline_max_size: 400,
            baseline_timeout: Duration::from_secs(10),
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineStatus {
    /// Not requested, or the game exceeds `baseline_max_size`.
    Skipped,
    Solved,
    TimedOut,
}

impl BaselineStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BaselineStatus::Skipped => "skipped",
            BaselineStatus::Solved => "ok",
            BaselineStatus::TimedOut => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub size: usize,
    pub lambda: usize,
    pub sum_nodes: usize,
    pub product_nodes: usize,
    pub elim_nodes: usize,
    pub leaf_nodes: usize,
    pub solve_ms: f64,
    /// Decomposition plus lifting, leaf solving excluded.
    pub structure_ms: f64,
    pub verified: bool,
    /// On a timeout this is the time limit.
    pub baseline_ms: Option<f64>,
    pub baseline_status: BaselineStatus,
    /// `baseline_ms / solve_ms`; a lower bound when the baseline timed out.
    pub speedup: Option<f64>,
}

pub const CSV_HEADER: [&str; 15] = [
    "seed",
    "n",
    "m",
    "S",
    "lambda",
    "sum_nodes",
    "product_nodes",
    "elim_nodes",
    "leaf_nodes",
    "solve_ms",
    "structure_ms",
    "verified",
    "baseline_ms",
    "baseline_status",
    "speedup",
];

/// Runs one game of the corpus.
pub fn bench_one(options: &BenchOptions, index: usize) -> Result<BenchRow, Error> {
    let seed = options.seed.wrapping_add(index as u64);
    let config = GenConfig { seed, ..options.config.clone() };
    let tree = generate_tree(&config)?;
    let (game, _) = realize_with(&tree, &config, &Sequential);

    let solve_options = SolveOptions::new(options.eliminate);
    let (solved, elapsed) = with_fork(options.threads, |fork| {
        let clock = InstantClock::start();
        let solved = fork.solve(&game, &solve_options, &clock);
        (solved, clock.now())
    })?;
    let (eq, report) = solved?;
    let solve_ms = millis(elapsed);
    let verified = is_nash(&game, eq.x(), eq.y())?;

    let (baseline_ms, baseline_status) = if options.baseline && game.size() <= options.baseline_max_size {
        let start = Instant::now();
        let limit = options.baseline_timeout;
        let found = solve_base_until(&game, &mut || start.elapsed() > limit)?;
        match found {
            Some(_) => (Some(millis(start.elapsed())), BaselineStatus::Solved),
            None => (Some(millis(limit)), BaselineStatus::TimedOut),
        }
    } else {
        (None, BaselineStatus::Skipped)
    };

    Ok(BenchRow {
        seed,
        n: game.rows(),
        m: game.cols(),
        size: report.size,
        lambda: report.lambda,
        sum_nodes: report.node_counts.sum,
        product_nodes: report.node_counts.product,
        elim_nodes: report.node_counts.elim,
        leaf_nodes: report.node_counts.leaf,
        solve_ms,
        structure_ms: millis(report.timings.decompose + report.timings.lift),
        verified,
        baseline_ms,
        baseline_status,
        speedup: baseline_ms.map(|b| b / solve_ms.max(1e-6)),
    })
}

/// Runs the whole corpus in order, handing each row to `on_row` as soon as
/// it is done.
pub fn run_bench(options: &BenchOptions, mut on_row: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>, Error> {
    options.config.validate()?;
    let mut rows = Vec::with_capacity(options.count);
    for i in 0..options.count {
        let row = bench_one(options, i)?;
        on_row(&row);
        rows.push(row);
    }
    Ok(rows)
}

/// Median of the reported speedups, timeouts counted at their lower bound.
pub fn median_speedup(rows: &[BenchRow]) -> Option<f64> {
    let mut v: Vec<f64> = rows.iter().filter_map(|r| r.speedup).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}

/// Writes the rows as CSV. With any baseline data, a final comment line
/// `# median_speedup=<x>` follows.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.3}"));
        w.write_record([
            r.seed.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.size.to_string(),
            r.lambda.to_string(),
            r.sum_nodes.to_string(),
            r.product_nodes.to_string(),
            r.elim_nodes.to_string(),
            r.leaf_nodes.to_string(),
            format!("{:.3}", r.solve_ms),
            format!("{:.3}", r.structure_ms),
            r.verified.to_string(),
            opt(r.baseline_ms),
            r.baseline_status.as_str().to_string(),
            opt(r.speedup),
        ])?;
    }
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    if let Some(median) = median_speedup(rows) {
        writeln!(out, "# median_speedup={median:.3}")?;
    }
    out.flush()
}
