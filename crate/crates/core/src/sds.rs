//! Sequential doubly stochastic (SDS) factorization.
//!
//! The DSHB scaled sequence is split into per-level "one-peer" factors
//! `T^(k)`: each keeps the leading diagonal and coupling band of `Ã^(k)` and
//! replaces the trailing block by `(m_k/m_{k-1}) I`. Padding with identities
//! gives `T̂^(k) = I_{n_1} ⊕ ... ⊕ I_{n_{k-1}} ⊕ T^(k)`, and
//!
//! ```text
//! A_L = T̂^(1) T̂^(2) ... T̂^(tau)      A_R = T̂^(tau) ... T̂^(1) = A_L^T
//! ```
//!
//! both satisfy `J_0 A J_0 = J`.

use crate::dshb::{dshb_factorize, DshbFactorization};
use crate::error::{Error, Result};
use crate::matrix::{ratio_u, Builder, SparseMatrix};
use crate::partition::Partition;

#[derive(Debug, Clone)]
pub struct SdsFactorization {
    /// `T^(1)..T^(tau)`, `T^(k)` of order `m_{k-1}`.
    pub t_factors: Vec<SparseMatrix>,
    /// `T̂^(1)..T̂^(tau)`, each of order `n`.
    pub hat_factors: Vec<SparseMatrix>,
    pub a_left: SparseMatrix,
    pub a_right: SparseMatrix,
    pub partition: Partition,
}

fn t_from_scaled(dshb: &DshbFactorization, k: usize) -> SparseMatrix {
    let p = &dshb.partition;
    let scaled = &dshb.scaled_sequence[k];
    if k + 1 == p.tau() {
        return scaled.clone();
    }
    let nk = p.part(k);
    let prev = p.m(k);
    let next = p.m(k + 1);
    let mut b = Builder::new(prev, prev);
    b.add_block(0, 0, &scaled.block(0, nk, 0, prev));
    b.add_block(nk, 0, &scaled.block(nk, prev, 0, nk));
    let shrink = ratio_u(next, prev);
    for i in 0..next {
        b.set(nk + i, nk + i, shrink.clone());
    }
    b.build()
}

/// `T^(level)` for `1 <= level <= tau`.
pub fn t_factor(partition: &Partition, level: usize) -> Result<SparseMatrix> {
    let tau = partition.tau();
    if level == 0 || level > tau {
        return Err(Error::LevelOutOfRange { level, tau });
    }
    Ok(t_from_scaled(&dshb_factorize(partition), level - 1))
}

fn augment(partition: &Partition, k: usize, t: &SparseMatrix) -> SparseMatrix {
    let pad = partition.offset(k);
    if pad == 0 {
        return t.clone();
    }
    SparseMatrix::identity(pad).direct_sum(t)
}

/// Left-to-right product of `factors`.
fn product<'a>(n: usize, factors: impl Iterator<Item = &'a SparseMatrix>) -> SparseMatrix {
    factors.fold(SparseMatrix::identity(n), |acc, f| {
        acc.matmul(f).expect("factors share order n")
    })
}

pub fn sds_factorize(partition: &Partition) -> SdsFactorization {
    let dshb = dshb_factorize(partition);
    let n = partition.n();
    let t_factors: Vec<_> = (0..partition.tau())
        .map(|k| t_from_scaled(&dshb, k))
        .collect();
    let hat_factors: Vec<_> = t_factors
        .iter()
        .enumerate()
        .map(|(k, t)| augment(partition, k, t))
        .collect();
    let a_left = product(n, hat_factors.iter());
    let a_right = product(n, hat_factors.iter().rev());
    SdsFactorization {
        t_factors,
        hat_factors,
        a_left,
        a_right,
        partition: partition.clone(),
    }
}

/// `V^(tau) = I`, `V^(k) = T^(k) (I_{n_k} ⊕ V^(k+1))`; returns `V^(1)..V^(tau)`.
///
/// Built from the nested form rather than the padded products, so
/// `V^(1) = A_L` is an independent check.
pub fn v_recursion(partition: &Partition) -> Vec<SparseMatrix> {
    let dshb = dshb_factorize(partition);
    let tau = partition.tau();
    let mut vs = vec![SparseMatrix::identity(partition.part(tau - 1))];
    for k in (0..tau - 1).rev() {
        let t = t_from_scaled(&dshb, k);
        let inner =
            SparseMatrix::identity(partition.part(k)).direct_sum(vs.last().expect("nonempty"));
        vs.push(t.matmul(&inner).expect("orders agree"));
    }
    vs.reverse();
    vs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{block_diag_j, factor_residual, ones_j, ratio, sandwich_by_matmul};
    use num_traits::Zero;

    fn p(parts: &[usize]) -> Partition {
        Partition::from_parts(parts).unwrap()
    }

    fn three_by_three() -> SparseMatrix {
        SparseMatrix::from_triplets(
            3,
            3,
            vec![
                (0, 0, ratio(1, 3)),
                (0, 2, ratio(2, 3)),
                (1, 1, ratio(1, 1)),
                (2, 0, ratio(2, 3)),
                (2, 2, ratio(1, 3)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn t_factors_two_one() {
        assert_eq!(t_factor(&p(&[2, 1]), 1).unwrap(), three_by_three());
        assert_eq!(t_factor(&p(&[2, 1]), 2).unwrap(), SparseMatrix::identity(1));
    }

    #[test]
    fn t_factor_middle_level() {
        let t = t_factor(&p(&[3, 2, 1]), 2).unwrap();
        assert_eq!(t, three_by_three());
        assert!(t.is_doubly_stochastic());
    }

    #[test]
    fn t_factor_level_range() {
        let part = p(&[3, 2, 1]);
        assert!(matches!(
            t_factor(&part, 0),
            Err(Error::LevelOutOfRange { level: 0, tau: 3 })
        ));
        assert!(t_factor(&part, 4).is_err());
    }

    #[test]
    fn two_one_left_factor() {
        let f = sds_factorize(&p(&[2, 1]));
        assert_eq!(f.a_left, f.t_factors[0]);
        assert_eq!(f.hat_factors[1], SparseMatrix::identity(3));
    }

    #[test]
    fn binary_fifteen_counts() {
        let part = p(&[8, 4, 2, 1]);
        let f = sds_factorize(&part);
        assert_eq!(f.a_left.nnz(), 49);
        assert_eq!(f.a_right.nnz(), 49);
        assert_eq!(f.a_left.d_max(), 4);
        assert_eq!(f.a_right.d_max(), 8);
        assert_eq!(f.a_right, f.a_left.transpose());
        assert_eq!(sandwich_by_matmul(&f.a_left, &part).unwrap(), ones_j(15));
        assert_eq!(sandwich_by_matmul(&f.a_right, &part).unwrap(), ones_j(15));
        let t_nnz: Vec<_> = f.t_factors.iter().map(SparseMatrix::nnz).collect();
        assert_eq!(t_nnz, vec![8 + 21, 4 + 9, 2 + 3, 1]);
    }

    #[test]
    fn left_and_right_differ_beyond_two_levels() {
        let f = sds_factorize(&p(&[3, 2, 1]));
        assert_ne!(f.a_left, f.a_right);
        assert!(f.a_left.is_doubly_stochastic());
        assert!(f.a_right.is_doubly_stochastic());
    }

    #[test]
    fn v_recursion_matches_left_factor() {
        let part = p(&[3, 2, 1]);
        let vs = v_recursion(&part);
        assert_eq!(vs.len(), 3);
        assert_eq!(vs[0], sds_factorize(&part).a_left);
        for (k, v) in vs.iter().enumerate() {
            assert!(v.is_doubly_stochastic());
            let tail = part.tail(k);
            let jbar = block_diag_j(&tail);
            let s = jbar.matmul(v).unwrap().matmul(&jbar).unwrap();
            assert_eq!(s, ones_j(tail.n()), "level {k}");
        }
        let two = v_recursion(&p(&[2, 1]));
        assert_eq!(two[0], t_factor(&p(&[2, 1]), 1).unwrap());
    }

    #[test]
    fn deeper_partitions_are_exact() {
        for parts in [&[16, 8, 4, 2, 1][..], &[9, 3, 1], &[5, 3, 1]] {
            let part = p(parts);
            let f = sds_factorize(&part);
            assert!(factor_residual(&f.a_left, &part).unwrap().is_zero());
            assert!(factor_residual(&f.a_right, &part).unwrap().is_zero());
        }
    }
}
