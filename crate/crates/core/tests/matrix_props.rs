use hbfact::matrix::{
    max_abs_diff, read_json, read_matrix_market, write_json, write_matrix_market,
};
use hbfact::{Rational, SparseMatrix};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=7).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

/// Matrices with roughly a third of entries nonzero.
fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = SparseMatrix> {
    proptest::collection::vec(proptest::option::weighted(0.35, rational()), rows * cols).prop_map(
        move |cells| {
            let triplets = cells
                .into_iter()
                .enumerate()
                .filter_map(|(idx, v)| v.map(|v| (idx / cols, idx % cols, v)));
            SparseMatrix::from_triplets(rows, cols, triplets).unwrap()
        },
    )
}

fn dense(m: &SparseMatrix) -> Vec<Vec<Rational>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.value(i, j)).collect())
        .collect()
}

fn dense_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn shapes() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..=20, 1usize..=20, 1usize..=20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matmul_matches_dense_oracle(
        (a, b) in shapes().prop_flat_map(|(r, k, c)| (matrix(r, k), matrix(k, c)))
    ) {
        let product = a.matmul(&b).unwrap();
        prop_assert_eq!(dense(&product), dense_mul(&dense(&a), &dense(&b)));
        prop_assert!(product.iter().all(|(_, _, v)| !v.is_zero()));
    }

    #[test]
    fn transpose_reverses_products(
        (a, b) in shapes().prop_flat_map(|(r, k, c)| (matrix(r, k), matrix(k, c)))
    ) {
        let lhs = a.matmul(&b).unwrap().transpose();
        let rhs = b.transpose().matmul(&a.transpose()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn add_then_sub_is_identity(
        (a, b) in (1usize..=12, 1usize..=12).prop_flat_map(|(r, c)| (matrix(r, c), matrix(r, c)))
    ) {
        let back = a.add(&b).unwrap().sub(&b).unwrap();
        prop_assert!(max_abs_diff(&back, &a).unwrap().is_zero());
        prop_assert_eq!(back, a);
    }

    #[test]
    fn rational_arithmetic_is_exact(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!((&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        if !b.is_zero() {
            prop_assert_eq!((&a / &b) * &b, a);
        }
    }

    #[test]
    fn degree_bounded_by_nnz(a in (1usize..=15, 1usize..=15).prop_flat_map(|(r, c)| matrix(r, c))) {
        prop_assert!(a.d_max() <= a.nnz());
        prop_assert_eq!(a.row_counts().iter().sum::<usize>(), a.nnz());
        prop_assert_eq!(a.col_counts().iter().sum::<usize>(), a.nnz());
    }

    #[test]
    fn json_round_trip_is_lossless(a in (1usize..=10, 1usize..=10).prop_flat_map(|(r, c)| matrix(r, c))) {
        let mut buf = Vec::new();
        write_json(&a, &mut buf).unwrap();
        prop_assert_eq!(read_json(buf.as_slice()).unwrap(), a);
    }

    #[test]
    fn market_round_trip_keeps_printed_precision(
        a in (1usize..=10, 1usize..=10).prop_flat_map(|(r, c)| matrix(r, c))
    ) {
        let mut buf = Vec::new();
        write_matrix_market(&a, &mut buf).unwrap();
        let back = read_matrix_market(buf.as_slice()).unwrap();
        prop_assert_eq!((back.rows, back.cols), a.shape());
        prop_assert_eq!(back.entries.len(), a.nnz());
        let dense = a.to_dense_f64();
        for (i, j, v) in back.entries {
            prop_assert!((v - dense[i][j]).abs() <= 1e-15 * dense[i][j].abs().max(1.0));
        }
    }
}
