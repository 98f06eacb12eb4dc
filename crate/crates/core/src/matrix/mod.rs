//! Exact sparse matrices over arbitrary-precision rationals, plus the
//! structural checks used to verify factorizations of `J`.

mod io;
mod sparse;
mod structure;

pub use io::{
    read_json, read_matrix_market, write_json, write_matrix_market, MarketMatrix, MatrixJson,
};
pub use sparse::{max_abs_diff, Builder, SparseMatrix};
pub use structure::{extract_hb_sequence, is_hierarchically_banded, HbSequence};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::partition::Partition;

pub type Rational = num_rational::BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn ratio_u(num: usize, den: usize) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `J = (1/n) 11^T`.
pub fn ones_j(n: usize) -> SparseMatrix {
    let v = ratio_u(1, n);
    let mut b = Builder::new(n, n);
    for i in 0..n {
        for j in 0..n {
            b.set(i, j, v.clone());
        }
    }
    b.build()
}

/// `J_0 = J_1 ⊕ ... ⊕ J_tau` for the clusters of `partition`.
pub fn block_diag_j(partition: &Partition) -> SparseMatrix {
    let n = partition.n();
    let mut b = Builder::new(n, n);
    for (k, &size) in partition.parts().iter().enumerate() {
        let off = partition.offset(k);
        let v = ratio_u(1, size);
        for i in 0..size {
            for j in 0..size {
                b.set(off + i, off + j, v.clone());
            }
        }
    }
    b.build()
}

/// `J_0 A J_0` by two sparse products.
pub fn sandwich_by_matmul(a: &SparseMatrix, partition: &Partition) -> Result<SparseMatrix> {
    let j0 = block_diag_j(partition);
    j0.matmul(a)?.matmul(&j0)
}

/// Per-cluster-pair sums `S[a][b]` of the entries of `a`.
fn block_sums(a: &SparseMatrix, partition: &Partition) -> Result<Vec<Vec<Rational>>> {
    let n = partition.n();
    if a.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            op: "block_sums",
            left: a.shape(),
            right: (n, n),
        });
    }
    let mut cluster = Vec::with_capacity(n);
    for (k, &size) in partition.parts().iter().enumerate() {
        cluster.extend(std::iter::repeat_n(k, size));
    }
    let tau = partition.tau();
    let mut sums = vec![vec![Rational::zero(); tau]; tau];
    for (i, j, v) in a.iter() {
        sums[cluster[i]][cluster[j]] += v;
    }
    Ok(sums)
}

/// `J_0 A J_0` assembled from cluster block sums. Every block of the result
/// is constant: `S[a][b] / (n_a n_b)`.
pub fn sandwich(a: &SparseMatrix, partition: &Partition) -> Result<SparseMatrix> {
    let sums = block_sums(a, partition)?;
    let n = partition.n();
    let mut b = Builder::new(n, n);
    for (ka, row) in sums.iter().enumerate() {
        for (kb, s) in row.iter().enumerate() {
            let v = s / ratio_u(partition.part(ka) * partition.part(kb), 1);
            for i in 0..partition.part(ka) {
                for j in 0..partition.part(kb) {
                    b.set(
                        partition.offset(ka) + i,
                        partition.offset(kb) + j,
                        v.clone(),
                    );
                }
            }
        }
    }
    Ok(b.build())
}

/// `max |J_0 A J_0 - J|` where `J = (1/n) 11^T` and `n = partition.n()`.
///
/// Zero iff `a` is an exact factor. Runs in `O(nnz(a) + tau^2)`.
pub fn factor_residual(a: &SparseMatrix, partition: &Partition) -> Result<Rational> {
    let sums = block_sums(a, partition)?;
    let target = ratio_u(1, partition.n());
    let mut worst = Rational::zero();
    for (ka, row) in sums.iter().enumerate() {
        for (kb, s) in row.iter().enumerate() {
            let v = s / ratio_u(partition.part(ka) * partition.part(kb), 1);
            let d = (v - &target).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(worst)
}
