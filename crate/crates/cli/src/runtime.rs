//! Thread-pool and wall-clock implementations of the core's execution hooks.

use std::time::{Duration, Instant};

use bimatrix_core::decompose::{decompose_tree_with, DecomposeOptions, DecompositionTree};
use bimatrix_core::exec::{Clock, Fork, Sequential};
use bimatrix_core::gen::{realize_with, GenConfig, GenTree};
use bimatrix_core::solver::{solve_with, SolveOptions, SolveReport};
use bimatrix_core::{BimatrixGame, Equilibrium, Error};

/// Runs both closures through `rayon::join`, inside whatever pool is current.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayonFork;

impl Fork for RayonFork {
    fn join<A, B, RA, RB>(&self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        rayon::join(a, b)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InstantClock(Instant);

impl InstantClock {
    pub fn start() -> Self {
        InstantClock(Instant::now())
    }
}

impl Default for InstantClock {
    fn default() -> Self {
        InstantClock::start()
    }
}

impl Clock for InstantClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

pub fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Object-safe face of the forks the CLI picks between at run time.
pub trait Runner: Sync {
    fn solve(&self, game: &BimatrixGame, options: &SolveOptions, clock: &InstantClock) -> Result<(Equilibrium, SolveReport), Error>;
    fn decompose(&self, game: BimatrixGame, eliminate: bool) -> DecompositionTree;
    fn realize(&self, tree: &GenTree, config: &GenConfig) -> (BimatrixGame, DecompositionTree);
}

impl<F: Fork> Runner for F {
    fn solve(&self, game: &BimatrixGame, options: &SolveOptions, clock: &InstantClock) -> Result<(Equilibrium, SolveReport), Error> {
        solve_with(game, options, self, clock)
    }

    fn decompose(&self, game: BimatrixGame, eliminate: bool) -> DecompositionTree {
        decompose_tree_with(game, &DecomposeOptions::new(eliminate), self)
    }

    fn realize(&self, tree: &GenTree, config: &GenConfig) -> (BimatrixGame, DecompositionTree) {
        realize_with(tree, config, self)
    }
}

/// Runs `f` inline for one thread, otherwise inside a fresh rayon pool of
/// `threads` workers with subtrees forked through [`RayonFork`].
pub fn with_fork<R: Send>(threads: usize, f: impl FnOnce(&dyn Runner) -> R + Send) -> Result<R, Error> {
    if threads <= 1 {
        return Ok(f(&Sequential));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} threads: {e}")))?;
    Ok(pool.install(|| f(&RayonFork)))
}
