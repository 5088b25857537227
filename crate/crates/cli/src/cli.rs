//! Argument parsing and the subcommands.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use bimatrix_core::gen::{generate_tree, GenConfig};
use bimatrix_core::solver::SolveOptions;
use bimatrix_core::{is_nash, Error, Equilibrium, MixedStrategy};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use thiserror::Error as ThisError;

use crate::bench::{median_speedup, run_bench, write_csv, BenchOptions};
use crate::json::{self, JsonError};
use crate::runtime::{with_fork, InstantClock};
use crate::text::{parse_game, write_game, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bimatrix", version, about = "Decompose and solve bimatrix games exactly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a game; prints the equilibrium as JSON.
    Solve {
        game: PathBuf,
        /// Hand the whole game to support enumeration.
        #[arg(long)]
        no_decompose: bool,
        /// Keep strictly dominated strategies.
        #[arg(long)]
        no_eliminate: bool,
        /// Write run statistics as JSON to this file.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        threads: u16,
    },
    /// Print the decomposition tree of a game as JSON.
    Decompose {
        game: PathBuf,
        #[arg(long)]
        no_eliminate: bool,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        threads: u16,
    },
    /// Generate a random decomposable game.
    Generate {
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(short = 'o', long = "output", value_name = "GAME_FILE")]
        output: PathBuf,
        /// Also write the game's planned structure as tree JSON.
        #[arg(long, value_name = "PATH")]
        tree: Option<PathBuf>,
    },
    /// Exit 0 iff the equilibrium is a Nash equilibrium of the game.
    Verify { game: PathBuf, equilibrium: PathBuf },
    /// Generate and solve a corpus, writing one CSV row per game.
    Bench {
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Game i (from 0) uses seed + i.
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        no_eliminate: bool,
        /// Also time support enumeration on the undecomposed game.
        #[arg(long)]
        baseline: bool,
        /// Skip the baseline on games with more payoff cells than this.
        #[arg(long, default_value_t = 400)]
        baseline_max_size: usize,
        /// Give up on the baseline after this many seconds.
        #[arg(long, default_value_t = 10.0)]
        baseline_timeout: f64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        threads: u16,
        /// CSV destination; standard output if absent.
        #[arg(short = 'o', long = "output", value_name = "CSV")]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 95)]
    min_strategies: usize,
    #[arg(long, default_value_t = 105)]
    max_strategies: usize,
    #[arg(long, default_value_t = 0.4)]
    p_sum: f64,
    #[arg(long, default_value_t = 0.4)]
    p_prod: f64,
    #[arg(long, default_value_t = 0.2)]
    p_elim: f64,
    #[arg(long, default_value_t = 80)]
    max_height: usize,
    #[arg(long, default_value_t = 6)]
    leaf_max_size: usize,
    /// Leaf payoffs are drawn from 0..=payoff-max.
    #[arg(long, default_value_t = 50)]
    payoff_max: u32,
}

impl GenArgs {
    fn config(&self, seed: u64) -> GenConfig {
        GenConfig {
            p_sum: self.p_sum,
            p_prod: self.p_prod,
            p_elim: self.p_elim,
            max_height: self.max_height,
            leaf_max_size: self.leaf_max_size,
            min_strategies: self.min_strategies,
            max_strategies: self.max_strategies,
            leaf_payoff_max: self.payoff_max,
            seed,
            ..GenConfig::default()
        }
    }
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Game { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: JsonError },
    #[error("not an equilibrium: {0}")]
    Verify(String),
    #[error("{0}")]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(Error::Config(_)) => EXIT_USAGE,
            CliError::Io { .. } | CliError::Game { .. } | CliError::Json { .. } => EXIT_PARSE,
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::Core(Error::Internal(_)) => EXIT_INTERNAL,
            // Anything else the core rejects came from the input.
            CliError::Core(_) => EXIT_PARSE,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.into(), source })
}

fn read_game(path: &Path) -> Result<bimatrix_core::BimatrixGame, CliError> {
    parse_game(&read(path)?).map_err(|source| CliError::Game { path: path.into(), source })
}

fn stdout_error(source: std::io::Error) -> CliError {
    CliError::Io { path: "<stdout>".into(), source }
}

/// Runs one command line (including the program name) and returns the
/// process exit code. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Solve {
            game,
            no_decompose,
            no_eliminate,
            report,
            threads,
        } => {
            let game = read_game(&game)?;
            let options = SolveOptions {
                decompose: !no_decompose,
                ..SolveOptions::new(!no_eliminate)
            };
            let (eq, rep) = with_fork(threads.into(), |fork| fork.solve(&game, &options, &InstantClock::start()))??;
            writeln!(stdout, "{}", json::equilibrium_to_json(&eq)).map_err(stdout_error)?;
            if let Some(path) = report {
                write(&path, &(json::report_to_json(&rep) + "\n"))?;
            }
            Ok(EXIT_OK)
        }
        Command::Decompose { game, no_eliminate, threads } => {
            let game = read_game(&game)?;
            let tree = with_fork(threads.into(), |fork| fork.decompose(game, !no_eliminate))?;
            writeln!(stdout, "{}", json::tree_to_json(&tree)).map_err(stdout_error)?;
            Ok(EXIT_OK)
        }
        Command::Generate { seed, gen, output, tree } => {
            let config = gen.config(seed);
            let plan = generate_tree(&config)?;
            let (game, structure) = with_fork(1, |fork| fork.realize(&plan, &config))?;
            write(&output, &write_game(&game))?;
            if let Some(path) = tree {
                write(&path, &(json::tree_to_json(&structure) + "\n"))?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { game, equilibrium } => {
            let game = read_game(&game)?;
            let claim = json::parse_equilibrium(&read(&equilibrium)?).map_err(|source| CliError::Json { path: equilibrium.clone(), source })?;
            let dims = (game.rows(), game.cols());
            if (claim.x.len(), claim.y.len()) != dims {
                return Err(CliError::Verify(format!(
                    "strategies have {} and {} entries, the game is {}x{}",
                    claim.x.len(),
                    claim.y.len(),
                    dims.0,
                    dims.1
                )));
            }
            let (x, y) = match (MixedStrategy::new(claim.x.clone()), MixedStrategy::new(claim.y.clone())) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => return Err(CliError::Verify(e.to_string())),
            };
            if !is_nash(&game, &x, &y)? {
                return Err(CliError::Verify("a player has a profitable deviation".into()));
            }
            let actual = Equilibrium::evaluate(&game, x, y)?;
            if (actual.p1_payoff(), actual.p2_payoff()) != (&claim.p1_payoff, &claim.p2_payoff) {
                let _ = writeln!(
                    stderr,
                    "note: claimed payoffs ({}, {}) differ from the actual ({}, {})",
                    claim.p1_payoff,
                    claim.p2_payoff,
                    actual.p1_payoff(),
                    actual.p2_payoff()
                );
            }
            Ok(EXIT_OK)
        }
        Command::Bench {
            count,
            seed,
            gen,
            no_eliminate,
            baseline,
            baseline_max_size,
            baseline_timeout,
            threads,
            output,
        } => {
            if !(baseline_timeout.is_finite() && baseline_timeout > 0.0) {
                return Err(CliError::Usage(format!("--baseline-timeout {baseline_timeout} is not a positive number of seconds")));
            }
            let options = BenchOptions {
                count,
                seed,
                config: gen.config(seed),
                eliminate: !no_eliminate,
                baseline,
                baseline_max_size,
                baseline_timeout: Duration::from_secs_f64(baseline_timeout),
                threads: threads.into(),
            };
            let rows = run_bench(&options, |r| {
                let _ = writeln!(stderr, "seed {}: {}x{} lambda {} in {:.1} ms", r.seed, r.n, r.m, r.lambda, r.solve_ms);
            })?;
            match &output {
                Some(path) => {
                    let mut buf = Vec::new();
                    write_csv(&rows, &mut buf).expect("writing to memory");
                    write(path, std::str::from_utf8(&buf).expect("CSV is UTF-8"))?;
                }
                None => write_csv(&rows, &mut *stdout).map_err(stdout_error)?,
            }
            if let Some(median) = median_speedup(&rows) {
                let _ = writeln!(stderr, "median speedup over the baseline: {median:.2}");
            }
            if let Some(bad) = rows.iter().find(|r| !r.verified) {
                return Err(Error::Internal(format!("seed {}: the solver returned a non-equilibrium", bad.seed)).into());
            }
            Ok(EXIT_OK)
        }
    }
}
