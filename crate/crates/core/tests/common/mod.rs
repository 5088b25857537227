#![allow(dead_code)]

use bimatrix_core::{BimatrixGame, Matrix, Rational};
use proptest::prelude::*;

pub fn matrix(rows: usize, cols: usize, values: &[i64]) -> Matrix {
    Matrix::from_fn(rows, cols, |i, j| Rational::from_integer(values[i * cols + j])).unwrap()
}

/// Games of at most `max_n x max_m` with integer payoffs in `lo..=hi`.
pub fn game(max_n: usize, max_m: usize, lo: i64, hi: i64) -> impl Strategy<Value = BimatrixGame> {
    (1..=max_n, 1..=max_m).prop_flat_map(move |(n, m)| {
        (
            proptest::collection::vec(lo..=hi, n * m),
            proptest::collection::vec(lo..=hi, n * m),
        )
            .prop_map(move |(a, b)| BimatrixGame::new(matrix(n, m, &a), matrix(n, m, &b)).unwrap())
    })
}

/// `game` padded with copies of existing strategies made strictly worse for
/// their owner, inserted at arbitrary positions.
pub fn with_dominated(max_n: usize, max_m: usize) -> impl Strategy<Value = BimatrixGame> {
    (game(max_n, max_m, 0, 50), proptest::collection::vec((any::<bool>(), any::<u16>(), any::<u16>(), 1i64..=3), 0..4)).prop_map(
        |(g, inserts)| {
            let mut a: Vec<Vec<Rational>> = (0..g.rows()).map(|i| g.a().row(i).to_vec()).collect();
            let mut b: Vec<Vec<Rational>> = (0..g.rows()).map(|i| g.b().row(i).to_vec()).collect();
            for (row, src, pos, slack) in inserts {
                let slack = Rational::from_integer(slack);
                if row {
                    let s = src as usize % a.len();
                    let p = pos as usize % (a.len() + 1);
                    let new_a: Vec<Rational> = a[s].iter().map(|v| v - &slack).collect();
                    let new_b = b[s].clone();
                    a.insert(p, new_a);
                    b.insert(p, new_b);
                } else {
                    let width = a[0].len();
                    let s = src as usize % width;
                    let p = pos as usize % (width + 1);
                    for (ra, rb) in a.iter_mut().zip(b.iter_mut()) {
                        let (va, vb) = (ra[s].clone(), &rb[s] - &slack);
                        ra.insert(p, va);
                        rb.insert(p, vb);
                    }
                }
            }
            BimatrixGame::new(Matrix::from_rows(a).unwrap(), Matrix::from_rows(b).unwrap()).unwrap()
        },
    )
}

/// Multiset equality for values without an ordering.
pub fn same_multiset<T: PartialEq>(left: &[T], right: &[T]) -> bool {
    if left.len() != right.len() {
        return false;
    }
    let mut used = vec![false; right.len()];
    left.iter().all(|l| {
        match (0..right.len()).find(|&i| !used[i] && right[i] == *l) {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}
