//! Exact decomposition of bimatrix games.
//!
//! Games built as products (both games played at once) or sums (a round of
//! matching pennies picks which game is played) can be recognised, split
//! into their components, solved separately, and the component equilibria
//! combined. Removing strictly dominated strategies along the way exposes
//! more structure. Everything is computed over exact rationals.
//!
//! ```
//! use bimatrix_core::{compose, solver, BimatrixGame};
//!
//! let pennies = BimatrixGame::from_integers(&[&[1, -1], &[-1, 1]], &[&[-1, 1], &[1, -1]]).unwrap();
//! let pd = BimatrixGame::from_integers(&[&[3, 0], &[5, 1]], &[&[3, 5], &[0, 1]]).unwrap();
//! let game = compose::product(&pennies, &pd);
//!
//! let (eq, report) = solver::solve(&game, true).unwrap();
//! assert!(bimatrix_core::is_nash(&game, eq.x(), eq.y()).unwrap());
//! assert!(report.lambda <= 4);
//! ```
#![no_std]

extern crate alloc;

pub mod compose;
pub mod decompose;
pub mod equilibrium;
mod error;
pub mod exec;
pub mod game;
pub mod gen;
mod rational;
pub mod solver;

pub use error::{Error, Result};
pub use game::{best_response_value, expected_payoffs, is_nash, BimatrixGame, Equilibrium, Matrix, MixedStrategy, Player};
pub use rational::{common_denominator, ParseRationalError, Rational};

/// Arbitrary-precision integers used for numerators and denominators.
pub use num_bigint::BigInt;
