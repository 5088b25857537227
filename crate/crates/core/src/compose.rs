//! Products and sums of games.
//!
//! In a product both component games are played at once and payoffs add. In
//! a sum the players first play matching pennies over which component to
//! play; disagreement pays `K` to player one and `-K` to player two.

use alloc::format;

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, Matrix};
use crate::rational::Rational;

/// Shapes of the two factors of a product game.
///
/// Rows of the product are ordered factor-one-major: row `(i1, i2)` sits at
/// `i1 * n2 + i2`. Columns are ordered factor-two-major: column `(j1, j2)`
/// sits at `j2 * m1 + j1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductLayout {
    pub n1: usize,
    pub m1: usize,
    pub n2: usize,
    pub m2: usize,
}

impl ProductLayout {
    pub fn new(n1: usize, m1: usize, n2: usize, m2: usize) -> Result<Self> {
        if n1 == 0 || m1 == 0 || n2 == 0 || m2 == 0 {
            return Err(Error::Dimension(format!(
                "product factors must be nonempty, got {n1}x{m1} and {n2}x{m2}"
            )));
        }
        Ok(ProductLayout { n1, m1, n2, m2 })
    }

    pub fn of(g1: &BimatrixGame, g2: &BimatrixGame) -> Self {
        ProductLayout {
            n1: g1.rows(),
            m1: g1.cols(),
            n2: g2.rows(),
            m2: g2.cols(),
        }
    }

    pub fn rows(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn cols(&self) -> usize {
        self.m1 * self.m2
    }

    #[inline]
    pub fn row(&self, i1: usize, i2: usize) -> usize {
        debug_assert!(i1 < self.n1 && i2 < self.n2);
        i1 * self.n2 + i2
    }

    #[inline]
    pub fn col(&self, j1: usize, j2: usize) -> usize {
        debug_assert!(j1 < self.m1 && j2 < self.m2);
        j2 * self.m1 + j1
    }

    /// Position of the profile `((i1, i2), (j1, j2))` in the product, with
    /// range checks.
    pub fn index(&self, i1: usize, i2: usize, j1: usize, j2: usize) -> Result<(usize, usize)> {
        let check = |what: &str, v: usize, bound: usize| {
            if v < bound {
                Ok(())
            } else {
                Err(Error::Dimension(format!(
                    "component index {what} = {} out of range 1..={bound}",
                    v + 1
                )))
            }
        };
        check("i1", i1, self.n1)?;
        check("i2", i2, self.n2)?;
        check("j1", j1, self.m1)?;
        check("j2", j2, self.m2)?;
        Ok((self.row(i1, i2), self.col(j1, j2)))
    }

    /// Inverse of [`ProductLayout::row`]: `r -> (i1, i2)`.
    #[inline]
    pub fn split_row(&self, r: usize) -> (usize, usize) {
        (r / self.n2, r % self.n2)
    }

    /// Inverse of [`ProductLayout::col`]: `c -> (j1, j2)`.
    #[inline]
    pub fn split_col(&self, c: usize) -> (usize, usize) {
        (c % self.m1, c / self.m1)
    }

    /// Inverse of [`ProductLayout::index`].
    pub fn split(&self, r: usize, c: usize) -> Result<(usize, usize, usize, usize)> {
        if r >= self.rows() || c >= self.cols() {
            return Err(Error::Dimension(format!(
                "product cell ({}, {}) outside {}x{}",
                r + 1,
                c + 1,
                self.rows(),
                self.cols()
            )));
        }
        let (i1, i2) = self.split_row(r);
        let (j1, j2) = self.split_col(c);
        Ok((i1, i2, j1, j2))
    }
}

/// Split point and constant of a sum game.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SumLayout {
    /// Rows belonging to the first summand.
    pub n1: usize,
    /// Columns belonging to the first summand.
    pub m1: usize,
    pub k: Rational,
}

/// The product game: entry `((i1,i2),(j1,j2))` pays `g1[i1,j1] + g2[i2,j2]`
/// to each player.
pub fn product(g1: &BimatrixGame, g2: &BimatrixGame) -> BimatrixGame {
    let layout = ProductLayout::of(g1, g2);
    let build = |m1: &Matrix, m2: &Matrix| {
        Matrix::from_fn(layout.rows(), layout.cols(), |r, c| {
            let (i1, i2) = layout.split_row(r);
            let (j1, j2) = layout.split_col(c);
            m1.get(i1, j1) + m2.get(i2, j2)
        })
        .expect("product of nonempty games is nonempty")
    };
    BimatrixGame::new(build(g1.a(), g2.a()), build(g1.b(), g2.b())).expect("shapes agree")
}

/// The sum game via constant `k`, which must exceed every payoff of both
/// components in absolute value.
pub fn sum(g1: &BimatrixGame, g2: &BimatrixGame, k: &Rational) -> Result<BimatrixGame> {
    for (label, g) in [("first", g1), ("second", g2)] {
        for (name, m) in [("A", g.a()), ("B", g.b())] {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let v = m.get(i, j);
                    if v.abs() >= *k {
                        return Err(Error::Precondition(format!(
                            "K = {k} does not exceed |{name}[{},{}]| = |{v}| of the {label} summand",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
    }
    let (n1, m1) = (g1.rows(), g1.cols());
    let (n, m) = (n1 + g2.rows(), m1 + g2.cols());
    let neg_k = -k;
    let build = |p1: &Matrix, p2: &Matrix, off: &Rational| {
        Matrix::from_fn(n, m, |i, j| match (i < n1, j < m1) {
            (true, true) => p1.get(i, j).clone(),
            (false, false) => p2.get(i - n1, j - m1).clone(),
            _ => off.clone(),
        })
        .expect("nonempty")
    };
    BimatrixGame::new(build(g1.a(), g2.a(), k), build(g1.b(), g2.b(), &neg_k))
}
