mod common;

use bimatrix_core::compose::{product, sum, ProductLayout};
use bimatrix_core::decompose::{detect_product, detect_sum, eliminate_dominated, eliminate_dominated_with_order, ScanOrder};
use bimatrix_core::{BimatrixGame, Player, Rational};
use common::{game, with_dominated};
use proptest::prelude::*;

fn constant_difference(x: &bimatrix_core::Matrix, y: &bimatrix_core::Matrix) -> Option<Rational> {
    let d = x.get(0, 0) - y.get(0, 0);
    x.entries().iter().zip(y.entries()).all(|(p, q)| p - q == d).then_some(d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sum_round_trip(g1 in game(6, 6, 0, 50), g2 in game(6, 6, 0, 50), extra in 0i64..5) {
        let k = Rational::from_integer(51 + extra);
        let s = sum(&g1, &g2, &k).unwrap();
        let d = detect_sum(&s).expect("a sum is detected");
        prop_assert_eq!(&d.left, &g1);
        prop_assert_eq!(&d.right, &g2);
        prop_assert_eq!(d.layout.k, k);
        prop_assert_eq!((d.layout.n1, d.layout.m1), (g1.rows(), g1.cols()));
        prop_assert!(detect_product(&s).is_none());
        prop_assert!(eliminate_dominated(&s).1.is_empty());
    }

    #[test]
    fn product_round_trip(g1 in game(6, 6, 0, 50), g2 in game(6, 6, 0, 50)) {
        let p = product(&g1, &g2);
        let trivial = |g: &BimatrixGame| g.rows() == 1 && g.cols() == 1;
        match detect_product(&p) {
            None => prop_assert!(trivial(&g1) || trivial(&g2)),
            Some(d) => {
                prop_assert_eq!(product(&d.left, &d.right), p.clone());
                prop_assert!(d.right.a().get(0, 0).is_zero() && d.right.b().get(0, 0).is_zero());
                if ProductLayout::of(&g1, &g2) == d.layout {
                    for (f, g, sign) in [(&d.left, &g1, 1), (&d.right, &g2, -1)] {
                        let da = constant_difference(f.a(), g.a()).expect("factors differ by a constant");
                        let db = constant_difference(f.b(), g.b()).expect("factors differ by a constant");
                        let expect_a = g2.a().get(0, 0) * &Rational::from_integer(sign);
                        let expect_b = g2.b().get(0, 0) * &Rational::from_integer(sign);
                        prop_assert_eq!(da, expect_a);
                        prop_assert_eq!(db, expect_b);
                    }
                }
                prop_assert!(detect_sum(&p).is_none());
            }
        }
    }

    #[test]
    fn never_both_a_sum_and_a_product(g in game(6, 6, -3, 3)) {
        prop_assert!(!(detect_sum(&g).is_some() && detect_product(&g).is_some()));
    }

    #[test]
    fn elimination_commutes_with_products(g1 in with_dominated(3, 3), g2 in with_dominated(3, 3)) {
        let layout = ProductLayout::of(&g1, &g2);
        let (r1, rec1) = eliminate_dominated(&g1);
        let (r2, rec2) = eliminate_dominated(&g2);
        let (reduced, record) = eliminate_dominated(&product(&g1, &g2));
        prop_assert_eq!(reduced, product(&r1, &r2));

        let mut rows: Vec<usize> = rec1.surviving_rows.iter()
            .flat_map(|&i1| rec2.surviving_rows.iter().map(move |&i2| layout.row(i1, i2)))
            .collect();
        rows.sort_unstable();
        let mut cols: Vec<usize> = rec1.surviving_cols.iter()
            .flat_map(|&j1| rec2.surviving_cols.iter().map(move |&j2| layout.col(j1, j2)))
            .collect();
        cols.sort_unstable();
        prop_assert_eq!(&record.surviving_rows, &rows);
        prop_assert_eq!(&record.surviving_cols, &cols);
    }

    #[test]
    fn elimination_order_does_not_matter(
        g in with_dominated(5, 5),
        row_keys in proptest::collection::vec(any::<u32>(), 16),
        col_keys in proptest::collection::vec(any::<u32>(), 16),
        columns_first in any::<bool>(),
    ) {
        let permutation = |len: usize, keys: &[u32]| {
            let mut p: Vec<usize> = (0..len).collect();
            p.sort_by_key(|&i| (keys[i % keys.len()], i));
            p
        };
        let order = ScanOrder {
            first: if columns_first { Player::Two } else { Player::One },
            row_priority: permutation(g.rows(), &row_keys),
            col_priority: permutation(g.cols(), &col_keys),
        };
        let (standard, rec) = eliminate_dominated(&g);
        let (shuffled, rec_shuffled) = eliminate_dominated_with_order(&g, &order).unwrap();
        prop_assert_eq!(standard, shuffled);
        prop_assert_eq!(&rec.surviving_rows, &rec_shuffled.surviving_rows);
        prop_assert_eq!(&rec.surviving_cols, &rec_shuffled.surviving_cols);
        prop_assert_eq!(rec.reinsert(&eliminate_dominated(&g).0).unwrap(), g.clone());
        prop_assert_eq!(rec_shuffled.apply(&g).unwrap(), eliminate_dominated(&g).0);
    }
}

#[test]
fn sum_rejects_a_small_constant() {
    let g = BimatrixGame::from_integers(&[&[0, 5]], &[&[0, 0]]).unwrap();
    let err = sum(&g, &g, &Rational::from_integer(5)).unwrap_err();
    assert!(err.to_string().contains("A[1,2]"), "{err}");
}
