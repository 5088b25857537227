mod common;

use bimatrix_core::equilibrium::solve_base;
use bimatrix_core::{BimatrixGame, Rational};
use common::game;
use proptest::prelude::*;

/// Best-response check written out longhand: every pure strategy's payoff
/// against the opponent's mix is compared with the mix's own payoff.
fn naive_is_nash(g: &BimatrixGame, x: &[Rational], y: &[Rational]) -> bool {
    let (n, m) = (g.rows(), g.cols());
    if x.len() != n || y.len() != m {
        return false;
    }
    let total = |p: &[Rational]| p.iter().fold(Rational::zero(), |acc, v| acc + v);
    if x.iter().chain(y).any(Rational::is_negative) || !total(x).is_one() || !total(y).is_one() {
        return false;
    }
    let row_value = |i: usize| (0..m).fold(Rational::zero(), |acc, j| acc + g.a().get(i, j) * &y[j]);
    let col_value = |j: usize| (0..n).fold(Rational::zero(), |acc, i| acc + g.b().get(i, j) * &x[i]);
    let p1 = (0..n).fold(Rational::zero(), |acc, i| acc + &x[i] * row_value(i));
    let p2 = (0..m).fold(Rational::zero(), |acc, j| acc + &y[j] * col_value(j));
    (0..n).all(|i| row_value(i) <= p1) && (0..m).all(|j| col_value(j) <= p2)
}

#[test]
fn all_small_two_by_two_games() {
    // payoffs in {-1, 0, 1}: 3^8 games
    for code in 0..3usize.pow(8) {
        let digits: Vec<i64> = (0..8).map(|d| (code / 3usize.pow(d)) as i64 % 3 - 1).collect();
        let g = BimatrixGame::new(common::matrix(2, 2, &digits[..4]), common::matrix(2, 2, &digits[4..])).unwrap();
        let eq = solve_base(&g).unwrap();
        assert!(naive_is_nash(&g, eq.x().probs(), eq.y().probs()), "{g:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn random_small_games(g in game(3, 3, -2, 2)) {
        let eq = solve_base(&g).unwrap();
        prop_assert!(naive_is_nash(&g, eq.x().probs(), eq.y().probs()));
        let (p1, p2) = bimatrix_core::expected_payoffs(&g, eq.x(), eq.y()).unwrap();
        prop_assert_eq!((eq.p1_payoff(), eq.p2_payoff()), (&p1, &p2));
        prop_assert_eq!(solve_base(&g).unwrap(), eq);
    }

    #[test]
    fn random_leaf_sized_games(g in game(6, 6, 0, 50).prop_filter("leaf sized", |g| g.size() <= 12)) {
        let eq = solve_base(&g).unwrap();
        prop_assert!(naive_is_nash(&g, eq.x().probs(), eq.y().probs()));
    }
}
