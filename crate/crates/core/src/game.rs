//! Games, mixed strategies, and the exact equilibrium check.
//!
//! Every quantity is an exact [`Rational`]; comparisons carry no tolerance.
//! Indices are 0-based in the API and 1-based in error messages.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational};

/// A dense row-major matrix of rationals with at least one row and column.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGame(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(Error::Dimension(format!(
                "row {} has {} entries, expected {m}",
                i + 1,
                row.len()
            )));
        }
        Matrix::new(n, m, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::new(rows, cols, data)
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = &Rational> + '_ {
        (0..self.rows).map(move |i| self.get(i, j))
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn map(&self, f: impl FnMut(&Rational) -> Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            data.extend(self.column(j).cloned());
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Largest absolute entry value.
    pub fn max_abs(&self) -> Rational {
        self.data
            .iter()
            .map(Rational::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// The matrix over a common denominator: `(numerators, denominator)`.
    fn scaled(&self) -> (Vec<BigInt>, BigInt) {
        common_denominator(&self.data)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.rows {
            list.entry(&self.row(i));
        }
        list.finish()
    }
}

/// One of the two players. Player one picks rows, player two picks columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn number(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "player {}", self.number())
    }
}

/// A two-player normal-form game `(A, B)` with `n` rows and `m` columns.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BimatrixGame {
    a: Matrix,
    b: Matrix,
}

impl BimatrixGame {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if a.rows != b.rows || a.cols != b.cols {
            return Err(Error::Dimension(format!(
                "payoff matrices differ in shape: A is {}x{}, B is {}x{}",
                a.rows, a.cols, b.rows, b.cols
            )));
        }
        Ok(BimatrixGame { a, b })
    }

    pub fn from_integers(a: &[&[i64]], b: &[&[i64]]) -> Result<Self> {
        BimatrixGame::new(Matrix::from_integers(a)?, Matrix::from_integers(b)?)
    }

    /// The zero-sum game `(A, -A)`.
    pub fn zero_sum(a: Matrix) -> Self {
        let b = a.map(|v| -v);
        BimatrixGame { a, b }
    }

    /// A 1x1 game with payoffs `(a, b)`.
    pub fn constant(a: Rational, b: Rational) -> Self {
        BimatrixGame {
            a: Matrix { rows: 1, cols: 1, data: alloc::vec![a] },
            b: Matrix { rows: 1, cols: 1, data: alloc::vec![b] },
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.a.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.a.cols
    }

    /// `n * m`, the number of pure strategy profiles.
    pub fn size(&self) -> usize {
        self.a.rows * self.a.cols
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn payoffs(&self, player: Player) -> &Matrix {
        match player {
            Player::One => &self.a,
            Player::Two => &self.b,
        }
    }

    /// Number of pure strategies of `player`.
    pub fn strategies(&self, player: Player) -> usize {
        match player {
            Player::One => self.rows(),
            Player::Two => self.cols(),
        }
    }

    /// Largest absolute payoff of either player.
    pub fn max_abs_payoff(&self) -> Rational {
        core::cmp::max(self.a.max_abs(), self.b.max_abs())
    }

    /// The subgame on the given rows and columns, in the given order.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let a = Matrix::from_fn(rows.len(), cols.len(), |i, j| self.a.get(rows[i], cols[j]).clone())?;
        let b = Matrix::from_fn(rows.len(), cols.len(), |i, j| self.b.get(rows[i], cols[j]).clone())?;
        Ok(BimatrixGame { a, b })
    }

    /// The same game with the roles of the players exchanged.
    pub fn transpose(&self) -> Self {
        BimatrixGame {
            a: self.b.transpose(),
            b: self.a.transpose(),
        }
    }
}

impl fmt::Debug for BimatrixGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BimatrixGame")
            .field("a", &self.a)
            .field("b", &self.b)
            .finish()
    }
}

/// A probability distribution over one player's pure strategies.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MixedStrategy(Vec<Rational>);

impl MixedStrategy {
    /// Checks nonnegativity and that the entries sum to exactly one.
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("no strategies".into()));
        }
        if let Some(k) = probs.iter().position(Rational::is_negative) {
            return Err(Error::InvalidStrategy(format!(
                "probability {} of strategy {} is negative",
                probs[k],
                k + 1
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidStrategy(format!("probabilities sum to {total}, not 1")));
        }
        Ok(MixedStrategy(probs))
    }

    /// Wraps probabilities already known to form a distribution.
    pub(crate) fn new_unchecked(probs: Vec<Rational>) -> Self {
        debug_assert!(MixedStrategy::new(probs.clone()).is_ok());
        MixedStrategy(probs)
    }

    pub fn pure(len: usize, index: usize) -> Result<Self> {
        if index >= len {
            return Err(Error::Dimension(format!(
                "pure strategy {} out of range 1..={len}",
                index + 1
            )));
        }
        let mut probs = alloc::vec![Rational::zero(); len];
        probs[index] = Rational::one();
        Ok(MixedStrategy(probs))
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidStrategy("no strategies".into()));
        }
        let p = Rational::new(1, len as i64).expect("len > 0");
        Ok(MixedStrategy(alloc::vec![p; len]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_probs(self) -> Vec<Rational> {
        self.0
    }

    /// Indices played with positive probability, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_positive())
            .map(|(i, _)| i)
            .collect()
    }
}

impl core::ops::Index<usize> for MixedStrategy {
    type Output = Rational;
    fn index(&self, index: usize) -> &Rational {
        &self.0[index]
    }
}

impl fmt::Debug for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// A strategy profile together with the payoffs it yields.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equilibrium {
    x: MixedStrategy,
    y: MixedStrategy,
    p1_payoff: Rational,
    p2_payoff: Rational,
}

impl Equilibrium {
    /// Pairs `x` and `y` with their expected payoffs in `game`.
    ///
    /// This does not check the equilibrium property; use [`is_nash`].
    pub fn evaluate(game: &BimatrixGame, x: MixedStrategy, y: MixedStrategy) -> Result<Self> {
        let (p1_payoff, p2_payoff) = expected_payoffs(game, &x, &y)?;
        Ok(Equilibrium { x, y, p1_payoff, p2_payoff })
    }

    /// Assembles a profile from payoffs computed elsewhere.
    pub(crate) fn from_parts(x: MixedStrategy, y: MixedStrategy, p1_payoff: Rational, p2_payoff: Rational) -> Self {
        Equilibrium { x, y, p1_payoff, p2_payoff }
    }

    pub fn x(&self) -> &MixedStrategy {
        &self.x
    }

    pub fn y(&self) -> &MixedStrategy {
        &self.y
    }

    /// Player one's expected payoff, `P = x^T A y`.
    pub fn p1_payoff(&self) -> &Rational {
        &self.p1_payoff
    }

    /// Player two's expected payoff, `Q = x^T B y`.
    pub fn p2_payoff(&self) -> &Rational {
        &self.p2_payoff
    }

    pub fn payoff(&self, player: Player) -> &Rational {
        match player {
            Player::One => &self.p1_payoff,
            Player::Two => &self.p2_payoff,
        }
    }

    /// Whether this profile is a Nash equilibrium of `game` and the stored
    /// payoffs are its true expected payoffs there.
    pub fn is_consistent_nash(&self, game: &BimatrixGame) -> Result<bool> {
        let (p, q) = expected_payoffs(game, &self.x, &self.y)?;
        Ok(p == self.p1_payoff && q == self.p2_payoff && is_nash(game, &self.x, &self.y)?)
    }
}

fn check_dims(game: &BimatrixGame, x: Option<&MixedStrategy>, y: Option<&MixedStrategy>) -> Result<()> {
    if let Some(x) = x {
        if x.len() != game.rows() {
            return Err(Error::Dimension(format!(
                "row strategy has {} entries, game has {} rows",
                x.len(),
                game.rows()
            )));
        }
    }
    if let Some(y) = y {
        if y.len() != game.cols() {
            return Err(Error::Dimension(format!(
                "column strategy has {} entries, game has {} columns",
                y.len(),
                game.cols()
            )));
        }
    }
    Ok(())
}

/// Integer image of `M y`: entry `i` equals `(M y)_i * scale`.
fn scaled_row_values(matrix: &Matrix, y: &MixedStrategy) -> (Vec<BigInt>, BigInt) {
    let (m, md) = matrix.scaled();
    let (y, yd) = common_denominator(y.probs());
    let values = (0..matrix.rows)
        .map(|i| {
            let row = &m[i * matrix.cols..(i + 1) * matrix.cols];
            row.iter()
                .zip(&y)
                .filter(|(_, yj)| !yj.is_zero())
                .fold(BigInt::zero(), |acc, (a, yj)| acc + a * yj)
        })
        .collect();
    (values, md * yd)
}

/// Integer image of `x^T M`: entry `j` equals `(x^T M)_j * scale`.
fn scaled_col_values(matrix: &Matrix, x: &MixedStrategy) -> (Vec<BigInt>, BigInt) {
    let (m, md) = matrix.scaled();
    let (x, xd) = common_denominator(x.probs());
    let mut values = alloc::vec![BigInt::zero(); matrix.cols];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let row = &m[i * matrix.cols..(i + 1) * matrix.cols];
        for (v, a) in values.iter_mut().zip(row) {
            *v += a * xi;
        }
    }
    (values, md * xd)
}

fn dot(u: &[BigInt], v: &[BigInt]) -> BigInt {
    u.iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
}

/// Exact expected payoffs `(x^T A y, x^T B y)`.
pub fn expected_payoffs(game: &BimatrixGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<(Rational, Rational)> {
    check_dims(game, Some(x), Some(y))?;
    let (xs, xd) = common_denominator(x.probs());
    let eval = |matrix: &Matrix| {
        let (rows, scale) = scaled_row_values(matrix, y);
        Rational::from_parts(dot(&xs, &rows), scale * &xd).expect("positive scale")
    };
    Ok((eval(&game.a), eval(&game.b)))
}

/// The best payoff `player` can get by a pure strategy against `opponent`.
///
/// For player one this is `max_i (A y)_i`, for player two `max_j (x^T B)_j`.
pub fn best_response_value(game: &BimatrixGame, player: Player, opponent: &MixedStrategy) -> Result<Rational> {
    let (values, scale) = match player {
        Player::One => {
            check_dims(game, None, Some(opponent))?;
            scaled_row_values(&game.a, opponent)
        }
        Player::Two => {
            check_dims(game, Some(opponent), None)?;
            scaled_col_values(&game.b, opponent)
        }
    };
    let best = values.into_iter().max().expect("games are nonempty");
    Ok(Rational::from_parts(best, scale).expect("positive scale"))
}

/// Whether neither player gains by a unilateral pure deviation. Exact.
pub fn is_nash(game: &BimatrixGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<bool> {
    check_dims(game, Some(x), Some(y))?;

    // x^T A y >= (A y)_i for all i, compared over the common scale of x.
    let (rows, _) = scaled_row_values(&game.a, y);
    let (xs, xd) = common_denominator(x.probs());
    let best_row = rows.iter().max().expect("nonempty");
    if dot(&xs, &rows) != best_row * &xd {
        return Ok(false);
    }

    let (cols, _) = scaled_col_values(&game.b, x);
    let (ys, yd) = common_denominator(y.probs());
    let best_col = cols.iter().max().expect("nonempty");
    Ok(dot(&ys, &cols) == best_col * &yd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn matching_pennies() -> BimatrixGame {
        BimatrixGame::from_integers(&[&[1, -1], &[-1, 1]], &[&[-1, 1], &[1, -1]]).unwrap()
    }

    fn prisoners() -> BimatrixGame {
        BimatrixGame::from_integers(&[&[3, 0], &[5, 1]], &[&[3, 5], &[0, 1]]).unwrap()
    }

    fn worked_a() -> BimatrixGame {
        BimatrixGame::zero_sum(
            Matrix::from_integers(&[&[1, 2, 3, 4], &[0, 1, 0, 1], &[2, 2, 2, 2], &[4, 1, 2, 3]]).unwrap(),
        )
    }

    #[test]
    fn expected_payoffs_examples() {
        let mp = matching_pennies();
        let u = MixedStrategy::uniform(2).unwrap();
        assert_eq!(expected_payoffs(&mp, &u, &u).unwrap(), (q!(0), q!(0)));

        let g = worked_a();
        let x = MixedStrategy::pure(4, 2).unwrap();
        let y = MixedStrategy::pure(4, 0).unwrap();
        assert_eq!(expected_payoffs(&g, &x, &y).unwrap(), (q!(2), q!(-2)));

        let one = BimatrixGame::constant(q!(7, 3), q!(-1));
        let p = MixedStrategy::pure(1, 0).unwrap();
        assert_eq!(expected_payoffs(&one, &p, &p).unwrap(), (q!(7, 3), q!(-1)));
    }

    #[test]
    fn best_response_examples() {
        let mp = matching_pennies();
        let u = MixedStrategy::uniform(2).unwrap();
        assert_eq!(best_response_value(&mp, Player::One, &u).unwrap(), q!(0));

        let col1 = MixedStrategy::pure(4, 0).unwrap();
        assert_eq!(best_response_value(&worked_a(), Player::One, &col1).unwrap(), q!(4));

        let one = BimatrixGame::constant(q!(5), q!(-2, 3));
        let p = MixedStrategy::pure(1, 0).unwrap();
        assert_eq!(best_response_value(&one, Player::One, &p).unwrap(), q!(5));
        assert_eq!(best_response_value(&one, Player::Two, &p).unwrap(), q!(-2, 3));
    }

    #[test]
    fn is_nash_examples() {
        let mp = matching_pennies();
        let u = MixedStrategy::uniform(2).unwrap();
        assert!(is_nash(&mp, &u, &u).unwrap());
        let top = MixedStrategy::pure(2, 0).unwrap();
        assert!(!is_nash(&mp, &top, &u).unwrap());

        let pd = prisoners();
        let second = MixedStrategy::pure(2, 1).unwrap();
        assert!(is_nash(&pd, &second, &second).unwrap());
        assert!(!is_nash(&pd, &top, &top).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mp = matching_pennies();
        let three = MixedStrategy::uniform(3).unwrap();
        let two = MixedStrategy::uniform(2).unwrap();
        assert!(matches!(expected_payoffs(&mp, &three, &two), Err(Error::Dimension(_))));
        assert!(matches!(is_nash(&mp, &two, &three), Err(Error::Dimension(_))));
        assert!(matches!(best_response_value(&mp, Player::Two, &three), Err(Error::Dimension(_))));
    }

    #[test]
    fn strategy_validation() {
        assert!(MixedStrategy::new(alloc::vec![q!(1, 2), q!(1, 3)]).is_err());
        assert!(MixedStrategy::new(alloc::vec![q!(3, 2), q!(-1, 2)]).is_err());
        assert!(MixedStrategy::new(alloc::vec![]).is_err());
        let s = MixedStrategy::new(alloc::vec![q!(1, 2), q!(0), q!(1, 2)]).unwrap();
        assert_eq!(s.support(), alloc::vec![0, 2]);
    }

    #[test]
    fn game_shape_validation() {
        let a = Matrix::from_integers(&[&[1, 2]]).unwrap();
        let b = Matrix::from_integers(&[&[1], &[2]]).unwrap();
        assert!(matches!(BimatrixGame::new(a, b), Err(Error::Dimension(_))));
        assert!(Matrix::from_integers(&[&[1, 2], &[3]]).is_err());
        assert!(Matrix::new(0, 3, alloc::vec![]).is_err());
    }
}
