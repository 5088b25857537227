//! Divide-and-conquer equilibrium computation over the decomposition tree.
//!
//! The tree is built once. Leaves go to [`solve_base`]; equilibria are then
//! lifted bottom-up through product, sum, and elimination nodes, and every
//! lifted profile is re-verified on its node's game.

use alloc::format;
use alloc::vec::Vec;
use core::time::Duration;

use crate::compose;
use crate::decompose::{decompose_tree_with, DecomposeOptions, DecompositionTree, DetectionOrder, NodeCounts};
use crate::equilibrium::{lift_elimination, lift_product, lift_sum, solve_base};
use crate::error::{Error, Result};
use crate::exec::{Clock, Fork, NoClock, Sequential};
use crate::game::{BimatrixGame, Equilibrium};

/// Wall-clock time spent in each phase, summed over all nodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseTimings {
    pub decompose: Duration,
    pub base_solve: Duration,
    pub lift: Duration,
}

/// Statistics of one solve run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    /// `n * m` of the input game.
    pub size: usize,
    /// `n * m` of the largest game handed to the base solver.
    pub lambda: usize,
    pub node_counts: NodeCounts,
    /// Sizes of all leaves, ascending.
    pub leaf_sizes: Vec<usize>,
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub eliminate: bool,
    pub order: DetectionOrder,
    /// When false the whole game goes straight to the base solver.
    pub decompose: bool,
}

impl SolveOptions {
    pub fn new(eliminate: bool) -> Self {
        SolveOptions {
            eliminate,
            order: DetectionOrder::SumFirst,
            decompose: true,
        }
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions::new(true)
    }
}

/// Solves `game` by decomposition, eliminating dominated strategies at every
/// node when `eliminate` is set.
pub fn solve(game: &BimatrixGame, eliminate: bool) -> Result<(Equilibrium, SolveReport)> {
    solve_with(game, &SolveOptions::new(eliminate), &Sequential, &NoClock)
}

pub fn solve_with<F: Fork, C: Clock>(
    game: &BimatrixGame,
    options: &SolveOptions,
    fork: &F,
    clock: &C,
) -> Result<(Equilibrium, SolveReport)> {
    let start = clock.now();
    let tree = if options.decompose {
        let decompose = DecomposeOptions {
            eliminate: options.eliminate,
            order: options.order,
        };
        decompose_tree_with(game.clone(), &decompose, fork)
    } else {
        DecompositionTree::Leaf(game.clone())
    };
    let decompose_time = clock.now().saturating_sub(start);

    let solved = solve_tree(&tree, fork, clock)?;
    if solved.game != *game {
        return Err(Error::Internal("decomposition tree does not recompose to the input game".into()));
    }
    let leaf_sizes = tree.leaf_sizes();
    let report = SolveReport {
        size: game.size(),
        lambda: leaf_sizes.last().copied().unwrap_or(0),
        node_counts: tree.node_counts(),
        leaf_sizes,
        timings: PhaseTimings {
            decompose: decompose_time,
            base_solve: solved.base_time,
            lift: solved.lift_time,
        },
    };
    Ok((solved.equilibrium, report))
}

/// Solves an already built tree.
pub fn solve_tree_equilibrium(tree: &DecompositionTree) -> Result<Equilibrium> {
    solve_tree(tree, &Sequential, &NoClock).map(|s| s.equilibrium)
}

struct Solved {
    equilibrium: Equilibrium,
    /// The game at this node, rebuilt from the children.
    game: BimatrixGame,
    base_time: Duration,
    lift_time: Duration,
}

fn solve_tree<F: Fork, C: Clock>(tree: &DecompositionTree, fork: &F, clock: &C) -> Result<Solved> {
    let (left, right) = match tree {
        DecompositionTree::Leaf(game) => {
            let start = clock.now();
            let equilibrium = solve_base(game)?;
            return Ok(Solved {
                equilibrium,
                game: game.clone(),
                base_time: clock.now().saturating_sub(start),
                lift_time: Duration::ZERO,
            });
        }
        DecompositionTree::Elim { record, child } => {
            let inner = solve_tree(child, fork, clock)?;
            let start = clock.now();
            let game = record.reinsert(&inner.game)?;
            let equilibrium = lift_elimination(&inner.equilibrium, record)?;
            check(&equilibrium, &game, "elimination")?;
            return Ok(Solved {
                equilibrium,
                game,
                base_time: inner.base_time,
                lift_time: inner.lift_time + clock.now().saturating_sub(start),
            });
        }
        DecompositionTree::Sum { left, right, .. } | DecompositionTree::Product { left, right, .. } => {
            let (l, r) = fork.join(|| solve_tree(left, fork, clock), || solve_tree(right, fork, clock));
            (l?, r?)
        }
    };

    let start = clock.now();
    let (game, equilibrium, what) = match tree {
        DecompositionTree::Sum { layout, .. } => (
            compose::sum(&left.game, &right.game, &layout.k)?,
            lift_sum(&left.equilibrium, &right.equilibrium, &layout.k)?,
            "sum",
        ),
        DecompositionTree::Product { layout, .. } => (
            compose::product(&left.game, &right.game),
            lift_product(&left.equilibrium, &right.equilibrium, layout)?,
            "product",
        ),
        _ => unreachable!("leaf and elimination nodes return early"),
    };
    check(&equilibrium, &game, what)?;
    Ok(Solved {
        equilibrium,
        game,
        base_time: left.base_time + right.base_time,
        lift_time: left.lift_time + right.lift_time + clock.now().saturating_sub(start),
    })
}

fn check(eq: &Equilibrium, game: &BimatrixGame, what: &str) -> Result<()> {
    if eq.is_consistent_nash(game)? {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "{what} lift produced a profile that is not an equilibrium of the {}x{} node game",
            game.rows(),
            game.cols()
        )))
    }
}
