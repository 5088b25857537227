//! Recognising sums and products, removing strictly dominated strategies,
//! and the recursive decomposition tree built from these steps.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::compose::{self, ProductLayout, SumLayout};
use crate::error::{Error, Result};
use crate::exec::{Fork, Sequential};
use crate::game::{BimatrixGame, Matrix, Player};
use crate::rational::Rational;

/// A game split as `sum(left, right, layout.k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumDecomposition {
    pub left: BimatrixGame,
    pub right: BimatrixGame,
    pub layout: SumLayout,
}

/// A game split as `product(left, right)`.
///
/// Additive constants sit in `left`: both payoffs of `right` at its top-left
/// cell are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductDecomposition {
    pub left: BimatrixGame,
    pub right: BimatrixGame,
    pub layout: ProductLayout,
}

/// Counts entry reads made by the detectors.
pub(crate) trait Probe {
    fn touch(&mut self, entries: u64);
}

impl Probe for () {
    #[inline]
    fn touch(&mut self, _: u64) {}
}

impl Probe for u64 {
    #[inline]
    fn touch(&mut self, entries: u64) {
        *self += entries;
    }
}

/// Recognises `game` as a sum of two smaller games.
///
/// The constant `K` must sit in the top-right corner. The first summand's
/// extent is read off the maximal run of `(K, -K)` down the last column and
/// along the last row; the rest of the structure is then verified.
pub fn detect_sum(game: &BimatrixGame) -> Option<SumDecomposition> {
    detect_sum_probed(game, &mut ())
}

pub(crate) fn detect_sum_probed(game: &BimatrixGame, probe: &mut impl Probe) -> Option<SumDecomposition> {
    let (n, m) = (game.rows(), game.cols());
    if n < 2 || m < 2 {
        return None;
    }
    let (a, b) = (game.a(), game.b());
    let k = a.get(0, m - 1).clone();
    let neg_k = -&k;
    probe.touch(1);
    if !k.is_positive() || b.get(0, m - 1) != &neg_k {
        return None;
    }
    let is_off = |i: usize, j: usize| a.get(i, j) == &k && b.get(i, j) == &neg_k;

    let n1 = (0..n).take_while(|&i| is_off(i, m - 1)).count();
    probe.touch(n1 as u64 + 1);
    let m1 = (0..m).take_while(|&j| is_off(n - 1, j)).count();
    probe.touch(m1 as u64 + 1);
    if n1 == 0 || n1 >= n || m1 == 0 || m1 >= m {
        return None;
    }

    for i in 0..n {
        for j in 0..m {
            probe.touch(1);
            let inside = (i < n1) == (j < m1);
            if inside {
                if a.get(i, j).abs() >= k || b.get(i, j).abs() >= k {
                    return None;
                }
            } else if !is_off(i, j) {
                return None;
            }
        }
    }

    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..m).collect();
    let left = game.restrict(&rows[..n1], &cols[..m1]).ok()?;
    let right = game.restrict(&rows[n1..], &cols[m1..]).ok()?;
    Some(SumDecomposition {
        left,
        right,
        layout: SumLayout { n1, m1, k },
    })
}

/// A game that becomes a sum once a constant is subtracted from each
/// player's payoffs: both off-diagonal blocks are uniform `(alpha, beta)`,
/// every diagonal-block payoff of player 1 is below `alpha`, and every one
/// of player 2 is above `beta`.
struct SumShape {
    alpha: Rational,
    beta: Rational,
    n1: usize,
    m1: usize,
}

fn sum_shape(game: &BimatrixGame) -> Option<SumShape> {
    let (n, m) = (game.rows(), game.cols());
    if n < 2 || m < 2 {
        return None;
    }
    let (a, b) = (game.a(), game.b());
    let (alpha, beta) = (a.get(0, m - 1), b.get(0, m - 1));
    let is_off = |i: usize, j: usize| a.get(i, j) == alpha && b.get(i, j) == beta;
    let n1 = (0..n).take_while(|&i| is_off(i, m - 1)).count();
    let m1 = (0..m).take_while(|&j| is_off(n - 1, j)).count();
    if n1 == 0 || n1 >= n || m1 == 0 || m1 >= m {
        return None;
    }
    for i in 0..n {
        for j in 0..m {
            let ok = if (i < n1) == (j < m1) {
                a.get(i, j) < alpha && b.get(i, j) > beta
            } else {
                is_off(i, j)
            };
            if !ok {
                return None;
            }
        }
    }
    Some(SumShape {
        alpha: alpha.clone(),
        beta: beta.clone(),
        n1,
        m1,
    })
}

/// Shifting `game` by `(K - alpha, -K - beta)` turns it into a sum with
/// constant `K`. Returns a strict lower bound on `K` under which that sum
/// and every sum nested along its summands stay valid.
fn shifted_sum_bound(game: &BimatrixGame, shape: SumShape, eliminate: bool) -> Rational {
    let two = Rational::from_integer(2);
    let (alpha0, beta0) = (shape.alpha.clone(), shape.beta.clone());
    let level = &alpha0 + &beta0;
    let mut bound: Option<Rational> = None;
    let mut pending = alloc::vec![(game.clone(), shape)];
    while let Some((g, sh)) = pending.pop() {
        let (n, m) = (g.rows(), g.cols());
        for i in 0..n {
            for j in 0..m {
                if (i < sh.n1) != (j < sh.m1) {
                    continue;
                }
                // the nested constant is K + alpha_n - alpha0
                let low_a = (&alpha0 + &alpha0 - &sh.alpha - g.a().get(i, j)) / &two;
                let low_b = (g.b().get(i, j) - &beta0 - &sh.alpha + &alpha0) / &two;
                let low = core::cmp::max(low_a, low_b);
                if bound.as_ref().is_none_or(|b| &low > b) {
                    bound = Some(low);
                }
            }
        }
        let rows: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (0..m).collect();
        let blocks = [(&rows[..sh.n1], &cols[..sh.m1]), (&rows[sh.n1..], &cols[sh.m1..])];
        for (r, c) in blocks {
            let mut child = g.restrict(r, c).expect("block indices are in range");
            if eliminate {
                child = eliminate_dominated(&child).0;
            }
            if let Some(inner) = sum_shape(&child) {
                if &inner.alpha + &inner.beta == level {
                    pending.push((child, inner));
                }
            }
        }
    }
    bound.expect("a sum shape has diagonal entries")
}

/// Splits a game that is a sum up to a constant shift into the 1x1 game
/// holding the shift and the exact sum.
fn split_shift(game: &BimatrixGame, shape: SumShape, eliminate: bool) -> (BimatrixGame, BimatrixGame) {
    let (alpha, beta) = (shape.alpha.clone(), shape.beta.clone());
    let k = shifted_sum_bound(game, shape, eliminate).floor() + Rational::one();
    let (da, db) = (&alpha - &k, beta + k);
    let rest = BimatrixGame::new(game.a().map(|v| v - &da), game.b().map(|v| v - &db)).expect("same shape");
    (BimatrixGame::constant(da, db), rest)
}

fn divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |d| n.is_multiple_of(*d))
}

/// Candidate factor shapes for an `n x m` product, in detection order:
/// `n1` ascending, then `m1` ascending. Layouts with a 1x1 factor are left
/// out.
pub fn product_layouts(n: usize, m: usize) -> impl Iterator<Item = ProductLayout> {
    divisors(n).flat_map(move |n1| {
        divisors(m).filter_map(move |m1| {
            let (n2, m2) = (n / n1, m / m1);
            if (n1 == 1 && m1 == 1) || (n2 == 1 && m2 == 1) {
                None
            } else {
                Some(ProductLayout { n1, m1, n2, m2 })
            }
        })
    })
}

/// Recognises `game` as a product of two games, neither of them 1x1.
///
/// For each candidate layout the factors are read off the first row block
/// and the first column block, and the full product is then verified.
pub fn detect_product(game: &BimatrixGame) -> Option<ProductDecomposition> {
    detect_product_probed(game, &mut ())
}

pub(crate) fn detect_product_probed(game: &BimatrixGame, probe: &mut impl Probe) -> Option<ProductDecomposition> {
    product_layouts(game.rows(), game.cols()).find_map(|layout| try_product_layout(game, layout, probe))
}

fn try_product_layout(game: &BimatrixGame, layout: ProductLayout, probe: &mut impl Probe) -> Option<ProductDecomposition> {
    let extract = |m: &Matrix| {
        let corner = m.get(0, 0);
        let first = Matrix::from_fn(layout.n1, layout.m1, |i1, j1| m.get(layout.row(i1, 0), layout.col(j1, 0)).clone())
            .expect("nonempty");
        let second = Matrix::from_fn(layout.n2, layout.m2, |i2, j2| {
            m.get(layout.row(0, i2), layout.col(0, j2)) - corner
        })
        .expect("nonempty");
        (first, second)
    };
    let (a1, a2) = extract(game.a());
    let (b1, b2) = extract(game.b());
    probe.touch((layout.n1 * layout.m1 + layout.n2 * layout.m2) as u64);

    let (a, b) = (game.a(), game.b());
    for r in 0..game.rows() {
        let (i1, i2) = layout.split_row(r);
        for c in 0..game.cols() {
            let (j1, j2) = layout.split_col(c);
            probe.touch(1);
            if *a.get(r, c) != a1.get(i1, j1) + a2.get(i2, j2) || *b.get(r, c) != b1.get(i1, j1) + b2.get(i2, j2) {
                return None;
            }
        }
    }
    Some(ProductDecomposition {
        left: BimatrixGame::new(a1, b1).expect("same shape"),
        right: BimatrixGame::new(a2, b2).expect("same shape"),
        layout,
    })
}

/// One removed strategy, as seen in the game at the moment of removal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Removal {
    pub player: Player,
    /// Position of the removed strategy in the game it was removed from.
    pub index: usize,
    /// Position, in the same game, of a strategy strictly dominating it.
    pub dominated_by: usize,
    /// Player one's payoffs of the removed strategy against the opponent's
    /// strategies present at the time.
    pub a: Vec<Rational>,
    /// Player two's payoffs, likewise.
    pub b: Vec<Rational>,
}

/// The removals performed by iterated elimination, sufficient to rebuild
/// the original game from the reduced one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationRecord {
    pub removals: Vec<Removal>,
    /// Surviving rows as indices into the original game, ascending.
    pub surviving_rows: Vec<usize>,
    /// Surviving columns as indices into the original game, ascending.
    pub surviving_cols: Vec<usize>,
}

impl EliminationRecord {
    pub fn identity(rows: usize, cols: usize) -> Self {
        EliminationRecord {
            removals: Vec::new(),
            surviving_rows: (0..rows).collect(),
            surviving_cols: (0..cols).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.removals.is_empty()
    }

    pub fn original_rows(&self) -> usize {
        self.surviving_rows.len() + self.removals.iter().filter(|r| r.player == Player::One).count()
    }

    pub fn original_cols(&self) -> usize {
        self.surviving_cols.len() + self.removals.iter().filter(|r| r.player == Player::Two).count()
    }

    /// Rebuilds a record from its removal list alone.
    ///
    /// `rows` and `cols` are the dimensions of the original game.
    pub fn from_removals(rows: usize, cols: usize, removals: Vec<Removal>) -> Result<Self> {
        let mut alive_rows: Vec<usize> = (0..rows).collect();
        let mut alive_cols: Vec<usize> = (0..cols).collect();
        for (step, r) in removals.iter().enumerate() {
            let (alive, other) = match r.player {
                Player::One => (&mut alive_rows, alive_cols.len()),
                Player::Two => (&mut alive_cols, alive_rows.len()),
            };
            if r.index >= alive.len() || r.dominated_by >= alive.len() || r.index == r.dominated_by {
                return Err(Error::InvalidInput(format!(
                    "removal {} of {} refers to strategy {} (dominated by {}) among {}",
                    step + 1,
                    r.player,
                    r.index + 1,
                    r.dominated_by + 1,
                    alive.len()
                )));
            }
            if r.a.len() != other || r.b.len() != other {
                return Err(Error::Dimension(format!(
                    "removal {} stores {} payoffs, opponent has {other} strategies",
                    step + 1,
                    r.a.len()
                )));
            }
            alive.remove(r.index);
            if alive.is_empty() {
                return Err(Error::InvalidInput(format!("removal {} leaves {} without strategies", step + 1, r.player)));
            }
        }
        Ok(EliminationRecord {
            removals,
            surviving_rows: alive_rows,
            surviving_cols: alive_cols,
        })
    }

    /// Applies the removals in order to `original`.
    pub fn apply(&self, original: &BimatrixGame) -> Result<BimatrixGame> {
        if original.rows() != self.original_rows() || original.cols() != self.original_cols() {
            return Err(Error::Dimension(format!(
                "record is for a {}x{} game, got {}x{}",
                self.original_rows(),
                self.original_cols(),
                original.rows(),
                original.cols()
            )));
        }
        original.restrict(&self.surviving_rows, &self.surviving_cols)
    }

    /// Undoes the removals: re-inserts every removed strategy into `reduced`.
    pub fn reinsert(&self, reduced: &BimatrixGame) -> Result<BimatrixGame> {
        if reduced.rows() != self.surviving_rows.len() || reduced.cols() != self.surviving_cols.len() {
            return Err(Error::Dimension(format!(
                "record reduces to {}x{}, got a {}x{} game",
                self.surviving_rows.len(),
                self.surviving_cols.len(),
                reduced.rows(),
                reduced.cols()
            )));
        }
        let mut a: Vec<Vec<Rational>> = (0..reduced.rows()).map(|i| reduced.a().row(i).to_vec()).collect();
        let mut b: Vec<Vec<Rational>> = (0..reduced.rows()).map(|i| reduced.b().row(i).to_vec()).collect();
        for r in self.removals.iter().rev() {
            match r.player {
                Player::One => {
                    let width = a.first().map_or(0, Vec::len);
                    if r.a.len() != width || r.index > a.len() {
                        return Err(Error::Dimension("stored row does not fit".into()));
                    }
                    a.insert(r.index, r.a.clone());
                    b.insert(r.index, r.b.clone());
                }
                Player::Two => {
                    if r.a.len() != a.len() || r.index > a.first().map_or(0, Vec::len) {
                        return Err(Error::Dimension("stored column does not fit".into()));
                    }
                    for (i, (ra, rb)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
                        ra.insert(r.index, r.a[i].clone());
                        rb.insert(r.index, r.b[i].clone());
                    }
                }
            }
        }
        BimatrixGame::new(Matrix::from_rows(a)?, Matrix::from_rows(b)?)
    }
}

/// The order in which candidate strategies are examined during elimination.
///
/// Priorities are permutations of the original indices; lower positions are
/// examined first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOrder {
    pub first: Player,
    pub row_priority: Vec<usize>,
    pub col_priority: Vec<usize>,
}

impl ScanOrder {
    /// Rows ascending, then columns ascending.
    pub fn standard(rows: usize, cols: usize) -> Self {
        ScanOrder {
            first: Player::One,
            row_priority: (0..rows).collect(),
            col_priority: (0..cols).collect(),
        }
    }
}

/// Iteratively removes pure strategies strictly dominated by another pure
/// strategy of the same player.
///
/// Rows are scanned ascending, then columns ascending; the scan restarts
/// after every removal.
pub fn eliminate_dominated(game: &BimatrixGame) -> (BimatrixGame, EliminationRecord) {
    eliminate_dominated_with_order(game, &ScanOrder::standard(game.rows(), game.cols()))
        .expect("standard order fits the game")
}

/// [`eliminate_dominated`] with a custom scan order.
pub fn eliminate_dominated_with_order(game: &BimatrixGame, order: &ScanOrder) -> Result<(BimatrixGame, EliminationRecord)> {
    let is_perm = |p: &[usize], len: usize| {
        let mut seen = alloc::vec![false; len];
        p.len() == len && p.iter().all(|&i| i < len && !core::mem::replace(&mut seen[i], true))
    };
    if !is_perm(&order.row_priority, game.rows()) || !is_perm(&order.col_priority, game.cols()) {
        return Err(Error::Dimension("scan priorities must permute the strategies".into()));
    }

    let invert = |p: &[usize]| {
        let mut inv = alloc::vec![0; p.len()];
        for (rank, &s) in p.iter().enumerate() {
            inv[s] = rank;
        }
        inv
    };
    let (row_rank, col_rank) = (invert(&order.row_priority), invert(&order.col_priority));
    let rank = |table: &[usize], s: usize| table[s];

    let mut alive_rows: Vec<usize> = (0..game.rows()).collect();
    let mut alive_cols: Vec<usize> = (0..game.cols()).collect();
    let mut removals = Vec::new();

    let players = [order.first, order.first.opponent()];
    'scan: loop {
        for &player in &players {
            let (own, opp, payoff, priority) = match player {
                Player::One => (&alive_rows, &alive_cols, game.a(), &row_rank),
                Player::Two => (&alive_cols, &alive_rows, game.b(), &col_rank),
            };
            let value = |s: usize, o: usize| match player {
                Player::One => payoff.get(s, o),
                Player::Two => payoff.get(o, s),
            };
            let dominates = |better: usize, worse: usize| opp.iter().all(|&o| value(better, o) > value(worse, o));

            let mut ordered: Vec<usize> = (0..own.len()).collect();
            ordered.sort_unstable_by_key(|&pos| rank(priority, own[pos]));
            let found = ordered.iter().find_map(|&pos| {
                ordered
                    .iter()
                    .find(|&&dpos| dpos != pos && dominates(own[dpos], own[pos]))
                    .map(|&dpos| (pos, dpos))
            });

            if let Some((pos, dpos)) = found {
                let s = own[pos];
                let (a, b): (Vec<Rational>, Vec<Rational>) = match player {
                    Player::One => opp.iter().map(|&o| (game.a().get(s, o).clone(), game.b().get(s, o).clone())).unzip(),
                    Player::Two => opp.iter().map(|&o| (game.a().get(o, s).clone(), game.b().get(o, s).clone())).unzip(),
                };
                removals.push(Removal {
                    player,
                    index: pos,
                    dominated_by: dpos,
                    a,
                    b,
                });
                match player {
                    Player::One => alive_rows.remove(pos),
                    Player::Two => alive_cols.remove(pos),
                };
                continue 'scan;
            }
        }
        break;
    }

    let reduced = game.restrict(&alive_rows, &alive_cols)?;
    Ok((
        reduced,
        EliminationRecord {
            removals,
            surviving_rows: alive_rows,
            surviving_cols: alive_cols,
        },
    ))
}

/// Recursive decomposition structure of a game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionTree {
    Leaf(BimatrixGame),
    Sum {
        layout: SumLayout,
        left: Box<DecompositionTree>,
        right: Box<DecompositionTree>,
    },
    Product {
        layout: ProductLayout,
        left: Box<DecompositionTree>,
        right: Box<DecompositionTree>,
    },
    Elim {
        record: EliminationRecord,
        child: Box<DecompositionTree>,
    },
}

/// Number of nodes of each kind in a tree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct NodeCounts {
    pub sum: usize,
    pub product: usize,
    pub elim: usize,
    pub leaf: usize,
}

impl core::ops::Add for NodeCounts {
    type Output = NodeCounts;
    fn add(self, o: NodeCounts) -> NodeCounts {
        NodeCounts {
            sum: self.sum + o.sum,
            product: self.product + o.product,
            elim: self.elim + o.elim,
            leaf: self.leaf + o.leaf,
        }
    }
}

impl DecompositionTree {
    /// Rebuilds the game the tree describes.
    pub fn recompose(&self) -> Result<BimatrixGame> {
        match self {
            DecompositionTree::Leaf(g) => Ok(g.clone()),
            DecompositionTree::Sum { layout, left, right } => {
                let (l, r) = (left.recompose()?, right.recompose()?);
                if (l.rows(), l.cols()) != (layout.n1, layout.m1) {
                    return Err(Error::Dimension("sum layout disagrees with its first summand".into()));
                }
                compose::sum(&l, &r, &layout.k)
            }
            DecompositionTree::Product { layout, left, right } => {
                let (l, r) = (left.recompose()?, right.recompose()?);
                if ProductLayout::of(&l, &r) != *layout {
                    return Err(Error::Dimension("product layout disagrees with its factors".into()));
                }
                Ok(compose::product(&l, &r))
            }
            DecompositionTree::Elim { record, child } => record.reinsert(&child.recompose()?),
        }
    }

    /// `(rows, cols)` of the game at this node, computed from the structure.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            DecompositionTree::Leaf(g) => (g.rows(), g.cols()),
            DecompositionTree::Sum { left, right, .. } => {
                let ((n1, m1), (n2, m2)) = (left.dims(), right.dims());
                (n1 + n2, m1 + m2)
            }
            DecompositionTree::Product { left, right, .. } => {
                let ((n1, m1), (n2, m2)) = (left.dims(), right.dims());
                (n1 * n2, m1 * m2)
            }
            DecompositionTree::Elim { record, .. } => (record.original_rows(), record.original_cols()),
        }
    }

    pub fn leaves(&self) -> Vec<&BimatrixGame> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a BimatrixGame>) {
        match self {
            DecompositionTree::Leaf(g) => out.push(g),
            DecompositionTree::Sum { left, right, .. } | DecompositionTree::Product { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
            DecompositionTree::Elim { child, .. } => child.collect_leaves(out),
        }
    }

    /// Sizes `n * m` of all leaves, ascending.
    pub fn leaf_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.leaves().iter().map(|g| g.size()).collect();
        sizes.sort_unstable();
        sizes
    }

    /// Size of the largest leaf.
    pub fn lambda(&self) -> usize {
        self.leaves().iter().map(|g| g.size()).max().unwrap_or(0)
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        match self {
            DecompositionTree::Leaf(_) => 0,
            DecompositionTree::Sum { left, right, .. } | DecompositionTree::Product { left, right, .. } => {
                1 + left.height().max(right.height())
            }
            DecompositionTree::Elim { child, .. } => 1 + child.height(),
        }
    }

    pub fn node_counts(&self) -> NodeCounts {
        match self {
            DecompositionTree::Leaf(_) => NodeCounts { leaf: 1, ..NodeCounts::default() },
            DecompositionTree::Sum { left, right, .. } => {
                NodeCounts { sum: 1, ..NodeCounts::default() } + left.node_counts() + right.node_counts()
            }
            DecompositionTree::Product { left, right, .. } => {
                NodeCounts { product: 1, ..NodeCounts::default() } + left.node_counts() + right.node_counts()
            }
            DecompositionTree::Elim { child, .. } => NodeCounts { elim: 1, ..NodeCounts::default() } + child.node_counts(),
        }
    }
}

/// Which structure test runs first at each node.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DetectionOrder {
    #[default]
    SumFirst,
    ProductFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecomposeOptions {
    /// Remove strictly dominated strategies at every node before testing
    /// for structure.
    pub eliminate: bool,
    pub order: DetectionOrder,
}

impl DecomposeOptions {
    pub fn new(eliminate: bool) -> Self {
        DecomposeOptions {
            eliminate,
            order: DetectionOrder::SumFirst,
        }
    }
}

/// Decomposes `game` recursively: at each node, optionally eliminate
/// dominated strategies, then try a sum split, then a product split; a game
/// admitting none of these becomes a leaf.
pub fn decompose_tree(game: &BimatrixGame, eliminate: bool) -> DecompositionTree {
    decompose_tree_with(game.clone(), &DecomposeOptions::new(eliminate), &Sequential)
}

/// [`decompose_tree`] with explicit options, running sibling subtrees
/// through `fork`.
pub fn decompose_tree_with<F: Fork>(game: BimatrixGame, options: &DecomposeOptions, fork: &F) -> DecompositionTree {
    if options.eliminate {
        let (reduced, record) = eliminate_dominated(&game);
        if !record.is_empty() {
            let child = decompose_tree_with(reduced, options, fork);
            return DecompositionTree::Elim {
                record,
                child: Box::new(child),
            };
        }
    }

    enum Split {
        Sum(SumDecomposition),
        Product(ProductDecomposition),
    }
    let split = match options.order {
        DetectionOrder::SumFirst => detect_sum(&game)
            .map(Split::Sum)
            .or_else(|| detect_product(&game).map(Split::Product)),
        DetectionOrder::ProductFirst => detect_product(&game)
            .map(Split::Product)
            .or_else(|| detect_sum(&game).map(Split::Sum)),
    };

    match split {
        // A sum with a constant added to each player's payoffs, typically
        // what remains of a product after one factor was eliminated down to
        // a single cell. Peel the constant off as a 1x1 product factor.
        None => match sum_shape(&game) {
            None => DecompositionTree::Leaf(game),
            Some(shape) => {
                let (shift, rest) = split_shift(&game, shape, options.eliminate);
                let layout = ProductLayout::of(&shift, &rest);
                DecompositionTree::Product {
                    layout,
                    left: Box::new(DecompositionTree::Leaf(shift)),
                    right: Box::new(decompose_tree_with(rest, options, fork)),
                }
            }
        },
        Some(Split::Sum(d)) => {
            drop(game);
            let (left, right) = fork.join(
                || decompose_tree_with(d.left, options, fork),
                || decompose_tree_with(d.right, options, fork),
            );
            DecompositionTree::Sum {
                layout: d.layout,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
        Some(Split::Product(d)) => {
            drop(game);
            let (left, right) = fork.join(
                || decompose_tree_with(d.left, options, fork),
                || decompose_tree_with(d.right, options, fork),
            );
            DecompositionTree::Product {
                layout: d.layout,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::{product, sum};
    use crate::q;
    use alloc::vec;

    fn worked_a() -> BimatrixGame {
        BimatrixGame::zero_sum(Matrix::from_integers(&[&[1, 2, 3, 4], &[0, 1, 0, 1], &[2, 2, 2, 2], &[4, 1, 2, 3]]).unwrap())
    }

    fn worked_b() -> BimatrixGame {
        BimatrixGame::zero_sum(Matrix::from_integers(&[&[0, 0, 0], &[1, 0, 1], &[1, 2, 3]]).unwrap())
    }

    fn pennies() -> BimatrixGame {
        BimatrixGame::from_integers(&[&[1, -1], &[-1, 1]], &[&[-1, 1], &[1, -1]]).unwrap()
    }

    fn shift(g: &BimatrixGame, da: i64, db: i64) -> BimatrixGame {
        BimatrixGame::new(g.a().map(|v| v + q!(da)), g.b().map(|v| v + q!(db))).unwrap()
    }

    #[test]
    fn sum_of_the_worked_games_is_recovered() {
        let g = sum(&worked_a(), &worked_b(), &q!(5)).unwrap();
        let d = detect_sum(&g).unwrap();
        assert_eq!((d.left, d.right), (worked_a(), worked_b()));
        assert_eq!((d.layout.n1, d.layout.m1, d.layout.k), (4, 4, q!(5)));
    }

    #[test]
    fn zero_sum_a_is_not_a_sum() {
        assert!(detect_sum(&worked_a()).is_none());
        assert!(detect_product(&worked_a()).is_none());
    }

    #[test]
    fn pennies_as_sum_of_zeros() {
        let zero = BimatrixGame::constant(q!(0), q!(0));
        let d = detect_sum(&sum(&zero, &zero, &q!(1)).unwrap()).unwrap();
        assert_eq!((d.left, d.right, d.layout.k), (zero.clone(), zero, q!(1)));
    }

    #[test]
    fn product_factors_are_normalised() {
        let d = detect_product(&product(&pennies(), &pennies())).unwrap();
        assert_eq!(d.left.a(), &Matrix::from_integers(&[&[2, 0], &[0, 2]]).unwrap());
        assert_eq!(d.right.a(), &Matrix::from_integers(&[&[0, -2], &[-2, 0]]).unwrap());
        assert_eq!(product(&d.left, &d.right), product(&pennies(), &pennies()));

        let d = detect_product(&product(&worked_a(), &worked_b())).unwrap();
        assert_eq!((d.left, d.right), (worked_a(), worked_b()));
    }

    #[test]
    fn detectors_touch_each_entry_a_bounded_number_of_times() {
        let g = sum(&worked_a(), &worked_b(), &q!(5)).unwrap();
        let mut touched = 0u64;
        detect_sum_probed(&g, &mut touched).unwrap();
        assert!(touched <= 2 * g.size() as u64, "{touched}");

        let g = product(&worked_a(), &worked_b());
        let layouts = product_layouts(g.rows(), g.cols()).count() as u64;
        let mut touched = 0u64;
        detect_product_probed(&g, &mut touched).unwrap();
        assert!(touched <= 2 * layouts * g.size() as u64, "{touched}");
    }

    #[test]
    fn layouts_skip_single_cell_factors() {
        let all: Vec<_> = product_layouts(2, 2).map(|l| (l.n1, l.m1)).collect();
        assert_eq!(all, vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn elimination_examples() {
        // row 1 goes first; without it, column 3 is worse than column 2 for
        // player 2 everywhere
        let (reduced, record) = eliminate_dominated(&worked_b());
        assert_eq!((reduced.rows(), reduced.cols()), (2, 2));
        assert_eq!(record.surviving_rows, vec![1, 2]);
        assert_eq!(record.surviving_cols, vec![0, 1]);
        assert_eq!((record.removals[0].index, record.removals[0].dominated_by), (0, 2));
        assert_eq!((record.removals[1].player, record.removals[1].index, record.removals[1].dominated_by), (Player::Two, 2, 1));
        assert_eq!(record.reinsert(&reduced).unwrap(), worked_b());

        let (reduced, record) = eliminate_dominated(&pennies());
        assert!(record.is_empty());
        assert_eq!(reduced, pennies());

        let pd = BimatrixGame::from_integers(&[&[3, 0], &[5, 1]], &[&[3, 5], &[0, 1]]).unwrap();
        let (reduced, record) = eliminate_dominated(&pd);
        assert_eq!(reduced, BimatrixGame::constant(q!(1), q!(1)));
        assert_eq!(record.removals.iter().map(|r| r.player).collect::<Vec<_>>(), vec![Player::One, Player::Two]);
        assert_eq!(record.apply(&pd).unwrap(), reduced);
    }

    #[test]
    fn record_rejects_bad_removals() {
        let r = Removal {
            player: Player::One,
            index: 0,
            dominated_by: 0,
            a: vec![q!(0)],
            b: vec![q!(0)],
        };
        assert!(EliminationRecord::from_removals(2, 1, vec![r]).is_err());
    }

    #[test]
    fn trees_of_the_examples() {
        let t = decompose_tree(&product(&worked_a(), &worked_b()), false);
        match &t {
            DecompositionTree::Product { left, right, .. } => {
                assert_eq!(**left, DecompositionTree::Leaf(worked_a()));
                assert_eq!(**right, DecompositionTree::Leaf(worked_b()));
            }
            other => panic!("expected a product, got {other:?}"),
        }

        let zero = BimatrixGame::constant(q!(0), q!(0));
        let t = decompose_tree(&sum(&zero, &zero, &q!(1)).unwrap(), false);
        assert_eq!(t.node_counts(), NodeCounts { sum: 1, leaf: 2, ..Default::default() });
        assert_eq!(t.leaves(), vec![&zero, &zero]);
    }

    #[test]
    fn irreducible_game_is_a_leaf() {
        let g = BimatrixGame::from_integers(&[&[3, 0, 1], &[0, 2, 1], &[1, 1, 0]], &[&[0, 2, 1], &[3, 0, 0], &[1, 1, 2]]).unwrap();
        for eliminate in [false, true] {
            assert_eq!(decompose_tree(&g, eliminate), DecompositionTree::Leaf(g.clone()));
        }
    }

    #[test]
    fn shifted_sum_splits_off_its_constant() {
        let s = sum(&worked_a(), &worked_b(), &q!(5)).unwrap();
        let g = shift(&s, 7, -2);
        assert!(detect_sum(&g).is_none());
        let t = decompose_tree(&g, false);
        assert_eq!(t.recompose().unwrap(), g);
        assert_eq!(t.lambda(), 16);
        assert_eq!(t.node_counts(), NodeCounts { sum: 1, product: 1, leaf: 3, elim: 0 });
    }

    #[test]
    fn shifted_sums_inside_a_product_factor_are_found() {
        // the inner sum has K = 6; the shift that product detection applies
        // must be undone with a K large enough for the nested sum as well
        let inner = sum(&pennies(), &BimatrixGame::from_integers(&[&[5]], &[&[-5]]).unwrap(), &q!(6)).unwrap();
        let outer = sum(&inner, &worked_b(), &q!(7)).unwrap();
        let g = product(&BimatrixGame::from_integers(&[&[1, 4]], &[&[2, 0]]).unwrap(), &shift(&outer, 3, 3));
        let t = decompose_tree(&g, false);
        assert_eq!(t.recompose().unwrap(), g);
        assert!(t.lambda() <= 9, "{t:?}");
        assert_eq!(t.node_counts().sum, 2);
    }

    #[test]
    fn elimination_nodes_recompose() {
        let pd = BimatrixGame::from_integers(&[&[3, 0], &[5, 1]], &[&[3, 5], &[0, 1]]).unwrap();
        let g = product(&pd, &worked_b());
        let t = decompose_tree(&g, true);
        assert!(matches!(t, DecompositionTree::Elim { .. }));
        assert_eq!(t.recompose().unwrap(), g);
        assert_eq!(t.lambda(), 4);
    }
}
