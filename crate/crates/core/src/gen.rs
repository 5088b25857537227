//! Seeded generation of decomposable games.
//!
//! A structure tree is sampled first; payoffs are then realised bottom-up so
//! that every node's game has exactly the planned structure.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compose::{self, ProductLayout, SumLayout};
use crate::decompose::{DecompositionTree, EliminationRecord, Removal};
use crate::error::{Error, Result};
use crate::exec::{Fork, Sequential};
use crate::game::{BimatrixGame, Matrix, Player};
use crate::rational::Rational;

/// Largest per-entry weakening of an inserted dominated strategy.
pub const MAX_SLACK: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub p_sum: f64,
    pub p_prod: f64,
    pub p_elim: f64,
    pub max_height: usize,
    /// Nodes with `n * m` at most this become leaves.
    pub leaf_max_size: usize,
    pub min_strategies: usize,
    pub max_strategies: usize,
    /// Leaf payoffs are drawn from `0..=leaf_payoff_max`.
    pub leaf_payoff_max: u32,
    /// Upper bound on dominated strategies added per player at an
    /// elimination node.
    pub max_elim_insertions: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            p_sum: 0.4,
            p_prod: 0.4,
            p_elim: 0.2,
            max_height: 80,
            leaf_max_size: 6,
            min_strategies: 95,
            max_strategies: 105,
            leaf_payoff_max: 50,
            max_elim_insertions: 3,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenConfig { seed, ..GenConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [("p_sum", self.p_sum), ("p_prod", self.p_prod), ("p_elim", self.p_elim)];
        if let Some((name, p)) = probs.iter().find(|(_, p)| !p.is_finite() || *p < 0.0) {
            return Err(Error::Config(format!("{name} = {p} is not a probability")));
        }
        let total: f64 = probs.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("p_sum + p_prod + p_elim = {total}, expected 1")));
        }
        if self.min_strategies < 1 {
            return Err(Error::Config("min_strategies must be at least 1".into()));
        }
        if self.min_strategies > self.max_strategies {
            return Err(Error::Config(format!(
                "min_strategies {} exceeds max_strategies {}",
                self.min_strategies, self.max_strategies
            )));
        }
        if self.leaf_max_size < 1 {
            return Err(Error::Config("leaf_max_size must be at least 1".into()));
        }
        if self.max_elim_insertions < 1 {
            return Err(Error::Config("max_elim_insertions must be at least 1".into()));
        }
        Ok(())
    }
}

/// A planned dominated strategy: a copy of `source` with the owner's payoffs
/// lowered by `slack`, inserted before `position`.
///
/// Indices refer to the game as it is just before this insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Insertion {
    pub player: Player,
    pub source: usize,
    pub position: usize,
    /// One entry per opponent strategy, each in `1..=MAX_SLACK`.
    pub slack: Vec<u32>,
}

/// Planned decomposition structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenTree {
    Leaf { rows: usize, cols: usize, seed: u64 },
    Sum { left: Box<GenTree>, right: Box<GenTree> },
    Product { left: Box<GenTree>, right: Box<GenTree> },
    /// Player one's insertions come first, then player two's.
    Elim { insertions: Vec<Insertion>, child: Box<GenTree> },
}

impl GenTree {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            GenTree::Leaf { rows, cols, .. } => (*rows, *cols),
            GenTree::Sum { left, right } => {
                let ((n1, m1), (n2, m2)) = (left.dims(), right.dims());
                (n1 + n2, m1 + m2)
            }
            GenTree::Product { left, right } => {
                let ((n1, m1), (n2, m2)) = (left.dims(), right.dims());
                (n1 * n2, m1 * m2)
            }
            GenTree::Elim { insertions, child } => {
                let (n, m) = child.dims();
                let added = |p| insertions.iter().filter(|i| i.player == p).count();
                (n + added(Player::One), m + added(Player::Two))
            }
        }
    }

    pub fn height(&self) -> usize {
        match self {
            GenTree::Leaf { .. } => 0,
            GenTree::Sum { left, right } | GenTree::Product { left, right } => 1 + left.height().max(right.height()),
            GenTree::Elim { child, .. } => 1 + child.height(),
        }
    }

    pub fn leaf_dims(&self) -> Vec<(usize, usize)> {
        match self {
            GenTree::Leaf { rows, cols, .. } => alloc::vec![(*rows, *cols)],
            GenTree::Sum { left, right } | GenTree::Product { left, right } => {
                let mut v = left.leaf_dims();
                v.extend(right.leaf_dims());
                v
            }
            GenTree::Elim { child, .. } => child.leaf_dims(),
        }
    }

    /// An upper bound on the absolute value of every realised payoff.
    pub fn payoff_bound(&self, leaf_payoff_max: u32) -> u128 {
        match self {
            GenTree::Leaf { .. } => u128::from(leaf_payoff_max),
            GenTree::Sum { left, right } => 1 + left.payoff_bound(leaf_payoff_max).max(right.payoff_bound(leaf_payoff_max)),
            GenTree::Product { left, right } => left.payoff_bound(leaf_payoff_max) + right.payoff_bound(leaf_payoff_max),
            GenTree::Elim { child, .. } => child.payoff_bound(leaf_payoff_max) + u128::from(MAX_SLACK),
        }
    }
}

/// Derives the seed of child `k` from its parent's seed (splitmix64).
fn child_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Sum,
    Product,
    Elim,
}

/// Samples a structure tree. Deterministic in `config`.
pub fn generate_tree(config: &GenConfig) -> Result<GenTree> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rows = rng.gen_range(config.min_strategies..=config.max_strategies);
    let cols = rng.gen_range(config.min_strategies..=config.max_strategies);
    Ok(plan_node(config, rows, cols, 0, child_seed(config.seed, 0)))
}

/// Generates the structure tree for an explicit root shape.
pub fn generate_tree_with_dims(config: &GenConfig, rows: usize, cols: usize) -> Result<GenTree> {
    config.validate()?;
    if rows == 0 || cols == 0 {
        return Err(Error::Config(format!("cannot generate a {rows}x{cols} game")));
    }
    Ok(plan_node(config, rows, cols, 0, child_seed(config.seed, 0)))
}

/// Nontrivial factorisations `(d, n / d)` of one dimension; a dimension of 1
/// splits only as `1 * 1`.
fn dimension_splits(n: usize) -> Vec<(usize, usize)> {
    if n == 1 {
        return alloc::vec![(1, 1)];
    }
    (2..n).filter(|d| n.is_multiple_of(*d)).map(|d| (d, n / d)).collect()
}

fn plan_node(config: &GenConfig, rows: usize, cols: usize, depth: usize, seed: u64) -> GenTree {
    if rows * cols <= config.leaf_max_size || depth >= config.max_height {
        return GenTree::Leaf {
            rows,
            cols,
            seed: child_seed(seed, 0),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw: f64 = rng.gen();
    let wanted = if draw < config.p_sum {
        Kind::Sum
    } else if draw < config.p_sum + config.p_prod {
        Kind::Product
    } else {
        Kind::Elim
    };

    let row_splits = dimension_splits(rows);
    let col_splits = dimension_splits(cols);
    let can_sum = rows >= 2 && cols >= 2;
    let can_product = !row_splits.is_empty() && !col_splits.is_empty();
    let kind = match wanted {
        Kind::Sum if can_sum => Kind::Sum,
        Kind::Sum if can_product => Kind::Product,
        Kind::Product if can_product => Kind::Product,
        Kind::Product if can_sum => Kind::Sum,
        _ => Kind::Elim,
    };

    let (left_seed, right_seed) = (child_seed(seed, 1), child_seed(seed, 2));
    match kind {
        Kind::Sum => {
            let n1 = rng.gen_range(1..rows);
            let m1 = rng.gen_range(1..cols);
            GenTree::Sum {
                left: Box::new(plan_node(config, n1, m1, depth + 1, left_seed)),
                right: Box::new(plan_node(config, rows - n1, cols - m1, depth + 1, right_seed)),
            }
        }
        Kind::Product => {
            let (n1, n2) = row_splits[rng.gen_range(0..row_splits.len())];
            let (m1, m2) = col_splits[rng.gen_range(0..col_splits.len())];
            GenTree::Product {
                left: Box::new(plan_node(config, n1, m1, depth + 1, left_seed)),
                right: Box::new(plan_node(config, n2, m2, depth + 1, right_seed)),
            }
        }
        Kind::Elim => {
            let mut reserve = |n: usize| {
                if n >= 2 {
                    rng.gen_range(1..=config.max_elim_insertions.min(n - 1))
                } else {
                    0
                }
            };
            let (k1, k2) = (reserve(rows), reserve(cols));
            let (child_rows, child_cols) = (rows - k1, cols - k2);
            let mut insertions = Vec::with_capacity(k1 + k2);
            for t in 0..k1 {
                let current = child_rows + t;
                insertions.push(Insertion {
                    player: Player::One,
                    source: rng.gen_range(0..current),
                    position: rng.gen_range(0..=current),
                    slack: (0..child_cols).map(|_| rng.gen_range(1..=MAX_SLACK)).collect(),
                });
            }
            for t in 0..k2 {
                let current = child_cols + t;
                insertions.push(Insertion {
                    player: Player::Two,
                    source: rng.gen_range(0..current),
                    position: rng.gen_range(0..=current),
                    slack: (0..rows).map(|_| rng.gen_range(1..=MAX_SLACK)).collect(),
                });
            }
            GenTree::Elim {
                insertions,
                child: Box::new(plan_node(config, child_rows, child_cols, depth + 1, left_seed)),
            }
        }
    }
}

/// Realises the payoffs of a planned tree.
pub fn realize(tree: &GenTree, config: &GenConfig) -> BimatrixGame {
    realize_tree(tree, config).0
}

/// Realises a planned tree, also returning its structure as a
/// [`DecompositionTree`] that recomposes to the game.
pub fn realize_tree(tree: &GenTree, config: &GenConfig) -> (BimatrixGame, DecompositionTree) {
    realize_with(tree, config, &Sequential)
}

/// [`realize_tree`] with sibling subtrees run through `fork`. The output does
/// not depend on `fork`.
pub fn realize_with<F: Fork>(tree: &GenTree, config: &GenConfig, fork: &F) -> (BimatrixGame, DecompositionTree) {
    match tree {
        GenTree::Leaf { rows, cols, seed } => {
            let game = random_leaf(*rows, *cols, *seed, config.leaf_payoff_max);
            (game.clone(), DecompositionTree::Leaf(game))
        }
        GenTree::Sum { left, right } => {
            let ((gl, tl), (gr, tr)) = fork.join(|| realize_with(left, config, fork), || realize_with(right, config, fork));
            let k = Rational::one() + core::cmp::max(gl.max_abs_payoff(), gr.max_abs_payoff());
            let game = compose::sum(&gl, &gr, &k).expect("K exceeds every child payoff");
            let layout = SumLayout {
                n1: gl.rows(),
                m1: gl.cols(),
                k,
            };
            (
                game,
                DecompositionTree::Sum {
                    layout,
                    left: Box::new(tl),
                    right: Box::new(tr),
                },
            )
        }
        GenTree::Product { left, right } => {
            let ((gl, tl), (gr, tr)) = fork.join(|| realize_with(left, config, fork), || realize_with(right, config, fork));
            let layout = ProductLayout::of(&gl, &gr);
            (
                compose::product(&gl, &gr),
                DecompositionTree::Product {
                    layout,
                    left: Box::new(tl),
                    right: Box::new(tr),
                },
            )
        }
        GenTree::Elim { insertions, child } => {
            let (inner, inner_tree) = realize_with(child, config, fork);
            let (game, record) = insert_dominated(&inner, insertions);
            (
                game,
                DecompositionTree::Elim {
                    record,
                    child: Box::new(inner_tree),
                },
            )
        }
    }
}

fn random_leaf(rows: usize, cols: usize, seed: u64, max: u32) -> BimatrixGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || Matrix::from_fn(rows, cols, |_, _| Rational::from_integer(i64::from(rng.gen_range(0..=max)))).expect("nonempty");
    let a = draw();
    let b = draw();
    BimatrixGame::new(a, b).expect("same shape")
}

/// Applies the planned insertions to `game`, returning the enlarged game and
/// the elimination record that undoes them.
fn insert_dominated(game: &BimatrixGame, insertions: &[Insertion]) -> (BimatrixGame, EliminationRecord) {
    let mut a: Vec<Vec<Rational>> = (0..game.rows()).map(|i| game.a().row(i).to_vec()).collect();
    let mut b: Vec<Vec<Rational>> = (0..game.rows()).map(|i| game.b().row(i).to_vec()).collect();
    let mut removals = Vec::with_capacity(insertions.len());
    for ins in insertions {
        let dominated_by = if ins.position <= ins.source { ins.source + 1 } else { ins.source };
        match ins.player {
            Player::One => {
                let new_a: Vec<Rational> = a[ins.source]
                    .iter()
                    .zip(&ins.slack)
                    .map(|(v, &s)| v - Rational::from_integer(i64::from(s)))
                    .collect();
                let new_b = b[ins.source].clone();
                removals.push(Removal {
                    player: Player::One,
                    index: ins.position,
                    dominated_by,
                    a: new_a.clone(),
                    b: new_b.clone(),
                });
                a.insert(ins.position, new_a);
                b.insert(ins.position, new_b);
            }
            Player::Two => {
                let new_a: Vec<Rational> = a.iter().map(|row| row[ins.source].clone()).collect();
                let new_b: Vec<Rational> = b
                    .iter()
                    .zip(&ins.slack)
                    .map(|(row, &s)| &row[ins.source] - Rational::from_integer(i64::from(s)))
                    .collect();
                for (i, (ra, rb)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
                    ra.insert(ins.position, new_a[i].clone());
                    rb.insert(ins.position, new_b[i].clone());
                }
                removals.push(Removal {
                    player: Player::Two,
                    index: ins.position,
                    dominated_by,
                    a: new_a,
                    b: new_b,
                });
            }
        }
    }
    let enlarged = BimatrixGame::new(Matrix::from_rows(a).expect("rectangular"), Matrix::from_rows(b).expect("rectangular"))
        .expect("same shape");
    removals.reverse();
    let record = EliminationRecord::from_removals(enlarged.rows(), enlarged.cols(), removals).expect("insertions are undoable");
    (enlarged, record)
}

/// Plans and realises one game.
pub fn generate_game(config: &GenConfig) -> Result<BimatrixGame> {
    Ok(realize(&generate_tree(config)?, config))
}
