//! The base solver for irreducible games, and the maps that carry equilibria
//! across sum, product, and elimination steps.

use alloc::format;
use alloc::vec::Vec;

use crate::compose::{ProductLayout, SumLayout};
use crate::decompose::{EliminationRecord, SumDecomposition};
use crate::error::{Error, Result};
use crate::game::{BimatrixGame, Equilibrium, Matrix, MixedStrategy};
use crate::rational::Rational;

/// Finds an exact Nash equilibrium by support enumeration.
///
/// Support pairs are tried by total size, then lexicographically (rows
/// first). For each pair the indifference conditions are solved exactly; the
/// first nonnegative solution without a profitable deviation is returned.
/// Degenerate games where no such pair works fall back to pairing the two
/// players' equilibrium vertices.
pub fn solve_base(game: &BimatrixGame) -> Result<Equilibrium> {
    match solve_base_until(game, &mut || false)? {
        Some(eq) => Ok(eq),
        None => unreachable!("no abort was requested"),
    }
}

/// [`solve_base`], polling `abort` between support pairs. Returns `None`
/// once `abort` answers true.
pub fn solve_base_until(game: &BimatrixGame, abort: &mut dyn FnMut() -> bool) -> Result<Option<Equilibrium>> {
    let (n, m) = (game.rows(), game.cols());
    // A pair with |S1| != |S2| always leaves one of the two indifference
    // systems underdetermined, and underdetermined systems are skipped.
    // Zero probabilities are allowed, so smaller supports still show up.
    for k in 1..=n.min(m) {
        let row_sets = subsets(n, k);
        let col_sets = subsets(m, k);
        for s1 in &row_sets {
            for s2 in &col_sets {
                if abort() {
                    return Ok(None);
                }
                if let Some(eq) = try_supports(game, s1, s2) {
                    return Ok(Some(eq));
                }
            }
        }
    }
    // Degenerate games can have every equilibrium outside the coupled
    // enumeration above: the rows making player 2 indifferent need not be
    // player 1's support. Enumerate each player's candidate vertices on
    // their own and pair them up.
    match pair_vertices(game, abort) {
        None => Ok(None),
        Some(Some(eq)) => Ok(Some(eq)),
        Some(None) => Err(Error::Internal(format!(
            "support enumeration found no equilibrium of a {n}x{m} game"
        ))),
    }
}

/// Tries every pair of candidate vertices. The outer `None` means aborted.
fn pair_vertices(game: &BimatrixGame, abort: &mut dyn FnMut() -> bool) -> Option<Option<Equilibrium>> {
    let xs = vertex_candidates(game, false, abort)?;
    let ys = vertex_candidates(game, true, abort)?;
    for (x, v) in &xs {
        for (y, u) in &ys {
            if abort() {
                return None;
            }
            if bilinear(game.a(), x, y) == *u && bilinear(game.b(), x, y) == *v {
                return Some(Some(Equilibrium::from_parts(
                    MixedStrategy::new_unchecked(x.clone()),
                    MixedStrategy::new_unchecked(y.clone()),
                    u.clone(),
                    v.clone(),
                )));
            }
        }
    }
    Some(None)
}
/// Mixed strategies of one player (columns when `columns` is set) that are
/// uniquely pinned down by a support and an equally large set of opponent
/// strategies held indifferent, and under which no opponent strategy does
/// better than those. Paired with the opponent's value. `None` on abort.
fn vertex_candidates(
    game: &BimatrixGame,
    columns: bool,
    abort: &mut dyn FnMut() -> bool,
) -> Option<Vec<(Vec<Rational>, Rational)>> {
    let (own, opp) = if columns { (game.cols(), game.rows()) } else { (game.rows(), game.cols()) };
    let (a, b) = (game.a(), game.b());
    let mut out: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for k in 1..=own.min(opp) {
        for support in subsets(own, k) {
            for held in subsets(opp, k) {
                if abort() {
                    return None;
                }
                let solved = if columns {
                    indifference(|i, j| a.get(i, j).clone(), &held, &support)
                } else {
                    indifference(|j, i| b.get(i, j).clone(), &held, &support)
                };
                let Some((part, value)) = solved else { continue };
                if part.iter().any(Rational::is_negative) {
                    continue;
                }
                let p = scatter(own, &support, part);
                let ok = if columns { no_better_reply(a, &p, &value, false) } else { no_better_reply(b, &p, &value, true) };
                if ok && !out.iter().any(|(q, _)| *q == p) {
                    out.push((p, value));
                }
            }
        }
    }
    Some(out)
}

fn bilinear(m: &Matrix, x: &[Rational], y: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for (i, xi) in x.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
        for (j, yj) in y.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
            total += &(m.get(i, j) * xi * yj);
        }
    }
    total
}

/// All `k`-subsets of `0..n` as ascending index lists, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let Some(pos) = (0..k).rev().find(|&p| current[p] < n - k + p) else {
            return out;
        };
        current[pos] += 1;
        for p in pos + 1..k {
            current[p] = current[p - 1] + 1;
        }
    }
}

/// Solves `(M_{S, T} p)_s = v` for `s` in `eq_set`, with `p` supported on
/// `var_set` and summing to one. Returns `(p, v)` when the solution is
/// unique.
fn indifference(value: impl Fn(usize, usize) -> Rational, eq_set: &[usize], var_set: &[usize]) -> Option<(Vec<Rational>, Rational)> {
    let k = var_set.len();
    // Unknowns: p_0..p_{k-1}, v. Rows: one per equation plus normalisation.
    let mut rows: Vec<Vec<Rational>> = eq_set
        .iter()
        .map(|&s| {
            let mut row: Vec<Rational> = var_set.iter().map(|&t| value(s, t)).collect();
            row.push(-Rational::one());
            row.push(Rational::zero());
            row
        })
        .collect();
    let mut norm = alloc::vec![Rational::one(); k];
    norm.push(Rational::zero());
    norm.push(Rational::one());
    rows.push(norm);

    let solution = solve_square(rows)?;
    let v = solution[k].clone();
    Some((solution[..k].to_vec(), v))
}

/// Gauss-Jordan elimination on an augmented square system. `None` when
/// singular.
fn solve_square(mut rows: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let size = rows.len();
    for col in 0..size {
        let pivot = (col..size).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, pivot);
        let inv = rows[col][col].recip().expect("nonzero pivot");
        for entry in rows[col][col..].iter_mut() {
            *entry = &*entry * &inv;
        }
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (entry, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *entry = &*entry - &(&factor * p);
            }
        }
    }
    Some(rows.into_iter().map(|mut r| r.pop().expect("augmented")).collect())
}

fn try_supports(game: &BimatrixGame, s1: &[usize], s2: &[usize]) -> Option<Equilibrium> {
    let (a, b) = (game.a(), game.b());
    let (y_part, p1) = indifference(|i, j| a.get(i, j).clone(), s1, s2)?;
    if y_part.iter().any(Rational::is_negative) {
        return None;
    }
    let (x_part, p2) = indifference(|j, i| b.get(i, j).clone(), s2, s1)?;
    if x_part.iter().any(Rational::is_negative) {
        return None;
    }
    let x = scatter(game.rows(), s1, x_part);
    let y = scatter(game.cols(), s2, y_part);
    if !no_better_reply(a, &y, &p1, false) || !no_better_reply(b, &x, &p2, true) {
        return None;
    }
    Some(Equilibrium::from_parts(
        MixedStrategy::new_unchecked(x),
        MixedStrategy::new_unchecked(y),
        p1,
        p2,
    ))
}

fn scatter(len: usize, support: &[usize], values: Vec<Rational>) -> Vec<Rational> {
    let mut out = alloc::vec![Rational::zero(); len];
    for (&s, v) in support.iter().zip(values) {
        out[s] = v;
    }
    out
}

/// Whether every pure strategy earns at most `value` against `opponent`.
/// With `by_column`, strategies are columns of `m`.
fn no_better_reply(m: &Matrix, opponent: &[Rational], value: &Rational, by_column: bool) -> bool {
    let own = if by_column { m.cols() } else { m.rows() };
    (0..own).all(|s| {
        let payoff: Rational = opponent
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(o, p)| if by_column { m.get(o, s) * p } else { m.get(s, o) * p })
            .sum();
        payoff <= *value
    })
}

/// Combines equilibria of two factors into one of their product.
///
/// Row `(i1, i2)` gets probability `x1[i1] * x2[i2]`, columns likewise, and
/// payoffs add.
pub fn lift_product(eq1: &Equilibrium, eq2: &Equilibrium, layout: &ProductLayout) -> Result<Equilibrium> {
    if eq1.x().len() != layout.n1 || eq1.y().len() != layout.m1 || eq2.x().len() != layout.n2 || eq2.y().len() != layout.m2 {
        return Err(Error::Dimension(format!(
            "equilibria of shapes {}x{} and {}x{} do not fit layout {}x{} * {}x{}",
            eq1.x().len(),
            eq1.y().len(),
            eq2.x().len(),
            eq2.y().len(),
            layout.n1,
            layout.m1,
            layout.n2,
            layout.m2
        )));
    }
    let x = (0..layout.rows())
        .map(|r| {
            let (i1, i2) = layout.split_row(r);
            &eq1.x()[i1] * &eq2.x()[i2]
        })
        .collect();
    let y = (0..layout.cols())
        .map(|c| {
            let (j1, j2) = layout.split_col(c);
            &eq1.y()[j1] * &eq2.y()[j2]
        })
        .collect();
    Ok(Equilibrium::from_parts(
        MixedStrategy::new_unchecked(x),
        MixedStrategy::new_unchecked(y),
        eq1.p1_payoff() + eq2.p1_payoff(),
        eq1.p2_payoff() + eq2.p2_payoff(),
    ))
}

/// One of the two components of a compound game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    First,
    Second,
}

/// Marginal of a product-game equilibrium on one factor.
///
/// Payoffs are evaluated in `factor_game`, which must have the factor's
/// shape.
pub fn project_product(
    eq: &Equilibrium,
    layout: &ProductLayout,
    component: Component,
    factor_game: &BimatrixGame,
) -> Result<Equilibrium> {
    if eq.x().len() != layout.rows() || eq.y().len() != layout.cols() {
        return Err(Error::Dimension(format!(
            "equilibrium is {}x{}, layout is {}x{}",
            eq.x().len(),
            eq.y().len(),
            layout.rows(),
            layout.cols()
        )));
    }
    let (rows, cols) = match component {
        Component::First => (layout.n1, layout.m1),
        Component::Second => (layout.n2, layout.m2),
    };
    if (factor_game.rows(), factor_game.cols()) != (rows, cols) {
        return Err(Error::Dimension(format!(
            "factor game is {}x{}, layout expects {rows}x{cols}",
            factor_game.rows(),
            factor_game.cols()
        )));
    }
    let mut x = alloc::vec![Rational::zero(); rows];
    for (r, p) in eq.x().probs().iter().enumerate() {
        let (i1, i2) = layout.split_row(r);
        x[if component == Component::First { i1 } else { i2 }] += p;
    }
    let mut y = alloc::vec![Rational::zero(); cols];
    for (c, p) in eq.y().probs().iter().enumerate() {
        let (j1, j2) = layout.split_col(c);
        y[if component == Component::First { j1 } else { j2 }] += p;
    }
    Equilibrium::evaluate(factor_game, MixedStrategy::new_unchecked(x), MixedStrategy::new_unchecked(y))
}

/// Probability that player one picks the first summand's rows, and that
/// player two picks its columns, when both summands are in equilibrium.
pub fn sum_block_masses(eq1: &Equilibrium, eq2: &Equilibrium, k: &Rational) -> Result<(Rational, Rational)> {
    for (name, v) in [
        ("P1", eq1.p1_payoff()),
        ("P2", eq2.p1_payoff()),
        ("Q1", eq1.p2_payoff()),
        ("Q2", eq2.p2_payoff()),
    ] {
        if v.abs() >= *k {
            return Err(Error::Precondition(format!("K = {k} does not exceed |{name}| = |{v}|")));
        }
    }
    let (p1, p2) = (eq1.p1_payoff(), eq2.p1_payoff());
    let (q1, q2) = (eq1.p2_payoff(), eq2.p2_payoff());
    let two_k = k + k;
    // Player two pays -K off the diagonal, so row weights make her
    // indifferent between alpha*Q1 - (1-alpha)*K and -alpha*K + (1-alpha)*Q2.
    let row_mass = (k + q2) / (&two_k + q1 + q2);
    // Player one is paid +K off the diagonal.
    let col_mass = (k - p2) / (&two_k - p1 - p2);
    Ok((row_mass, col_mass))
}

/// Combines equilibria of two summands into one of their sum via `k`.
pub fn lift_sum(eq1: &Equilibrium, eq2: &Equilibrium, k: &Rational) -> Result<Equilibrium> {
    let (alpha, beta) = sum_block_masses(eq1, eq2, k)?;
    let one = Rational::one();
    let (alpha_c, beta_c) = (&one - &alpha, &one - &beta);

    let x: Vec<Rational> = eq1
        .x()
        .probs()
        .iter()
        .map(|p| p * &alpha)
        .chain(eq2.x().probs().iter().map(|p| p * &alpha_c))
        .collect();
    let y: Vec<Rational> = eq1
        .y()
        .probs()
        .iter()
        .map(|p| p * &beta)
        .chain(eq2.y().probs().iter().map(|p| p * &beta_c))
        .collect();

    let both_first = &alpha * &beta;
    let both_second = &alpha_c * &beta_c;
    let mismatch = &one - &both_first - &both_second;
    let p = &both_first * eq1.p1_payoff() + &both_second * eq2.p1_payoff() + &mismatch * k;
    let q = &both_first * eq1.p2_payoff() + &both_second * eq2.p2_payoff() - &mismatch * k;
    Ok(Equilibrium::from_parts(
        MixedStrategy::new_unchecked(x),
        MixedStrategy::new_unchecked(y),
        p,
        q,
    ))
}

/// Splits an equilibrium of a sum game into equilibria of its summands by
/// renormalising each block.
pub fn project_sum(eq: &Equilibrium, decomposition: &SumDecomposition) -> Result<(Equilibrium, Equilibrium)> {
    let SumLayout { n1, m1, .. } = decomposition.layout;
    let (g1, g2) = (&decomposition.left, &decomposition.right);
    if eq.x().len() != n1 + g2.rows() || eq.y().len() != m1 + g2.cols() || (g1.rows(), g1.cols()) != (n1, m1) {
        return Err(Error::Dimension(format!(
            "equilibrium is {}x{}, sum is {}x{}",
            eq.x().len(),
            eq.y().len(),
            n1 + g2.rows(),
            m1 + g2.cols()
        )));
    }
    let split = |probs: &[Rational], at: usize, who: &str| -> Result<(Vec<Rational>, Vec<Rational>)> {
        let mass: Rational = probs[..at].iter().sum();
        if mass.is_zero() || mass.is_one() {
            return Err(Error::InvalidInput(format!(
                "{who} puts mass {mass} on the first summand; equilibria of sums mix both"
            )));
        }
        let rest = Rational::one() - &mass;
        Ok((
            probs[..at].iter().map(|p| p / &mass).collect(),
            probs[at..].iter().map(|p| p / &rest).collect(),
        ))
    };
    let (x1, x2) = split(eq.x().probs(), n1, "player 1")?;
    let (y1, y2) = split(eq.y().probs(), m1, "player 2")?;
    Ok((
        Equilibrium::evaluate(g1, MixedStrategy::new_unchecked(x1), MixedStrategy::new_unchecked(y1))?,
        Equilibrium::evaluate(g2, MixedStrategy::new_unchecked(x2), MixedStrategy::new_unchecked(y2))?,
    ))
}

/// Extends an equilibrium of the reduced game with zero probability on
/// every eliminated strategy.
pub fn lift_elimination(eq: &Equilibrium, record: &EliminationRecord) -> Result<Equilibrium> {
    if eq.x().len() != record.surviving_rows.len() || eq.y().len() != record.surviving_cols.len() {
        return Err(Error::Dimension(format!(
            "equilibrium is {}x{}, record reduces to {}x{}",
            eq.x().len(),
            eq.y().len(),
            record.surviving_rows.len(),
            record.surviving_cols.len()
        )));
    }
    let x = scatter(record.original_rows(), &record.surviving_rows, eq.x().probs().to_vec());
    let y = scatter(record.original_cols(), &record.surviving_cols, eq.y().probs().to_vec());
    Ok(Equilibrium::from_parts(
        MixedStrategy::new_unchecked(x),
        MixedStrategy::new_unchecked(y),
        eq.p1_payoff().clone(),
        eq.p2_payoff().clone(),
    ))
}
