//! Doubly stochastic hierarchically banded (DSHB) factor of `J`.
//!
//! The recursion runs on the scaled sequence `Ã^(k) = (n / m_{k-1}) A^(k)`,
//! each member of which is itself doubly stochastic:
//!
//! ```text
//! Ã^(k) = [ diag(m_k/m_{k-1} (m_k times), 1 (n_k - m_k times))  (n_k/m_{k-1}) [I; 0] ]
//!         [ (n_k/m_{k-1}) [I 0]                                  (m_k/m_{k-1}) Ã^(k+1) ]
//! ```
//!
//! with `Ã^(tau) = I`.

use crate::error::{Error, Result};
use crate::matrix::{ratio_u, Builder, HbSequence, Rational, SparseMatrix};
use crate::partition::Partition;

#[derive(Debug, Clone)]
pub struct DshbFactorization {
    pub a: SparseMatrix,
    /// `A^(1)..A^(tau)`.
    pub sequence: HbSequence,
    /// `Ã^(1)..Ã^(tau)`.
    pub scaled_sequence: Vec<SparseMatrix>,
    pub partition: Partition,
}

impl DshbFactorization {
    /// `n / m_{k-1}` for each level, the factor taking `A^(k)` to `Ã^(k)`.
    pub fn scaling_factors(&self) -> Vec<Rational> {
        let p = &self.partition;
        (0..p.tau()).map(|k| ratio_u(p.n(), p.m(k))).collect()
    }

    /// The often quoted count `sum_k k n_k`. It undercounts: the constructed
    /// factor has `sum_k (2k - 1) n_k` nonzeros.
    pub fn quoted_nnz_formula(&self) -> usize {
        self.partition
            .parts()
            .iter()
            .enumerate()
            .map(|(k, nk)| (k + 1) * nk)
            .sum()
    }

    pub fn counted_nnz_formula(&self) -> usize {
        self.partition
            .parts()
            .iter()
            .enumerate()
            .map(|(k, nk)| (2 * k + 1) * nk)
            .sum()
    }
}

/// Level `k` of the scaled sequence from the level below.
fn scaled_level(partition: &Partition, k: usize, below: &SparseMatrix) -> SparseMatrix {
    let nk = partition.part(k);
    let prev = partition.m(k);
    let next = partition.m(k + 1);
    let mut b = Builder::new(prev, prev);
    let shrink = ratio_u(next, prev);
    let couple = ratio_u(nk, prev);
    for i in 0..nk {
        let v = if i < next {
            shrink.clone()
        } else {
            ratio_u(1, 1)
        };
        b.set(i, i, v);
    }
    for i in 0..next {
        b.set_sym(i, nk + i, couple.clone());
    }
    b.add_block(nk, nk, &below.scale(&shrink));
    b.build()
}

pub fn dshb_factorize(partition: &Partition) -> DshbFactorization {
    let tau = partition.tau();
    let n = partition.n();
    let mut scaled = vec![SparseMatrix::identity(partition.part(tau - 1))];
    for k in (0..tau - 1).rev() {
        let level = scaled_level(partition, k, scaled.last().expect("nonempty"));
        scaled.push(level);
    }
    scaled.reverse();
    let levels = scaled
        .iter()
        .enumerate()
        .map(|(k, m)| m.scale(&ratio_u(partition.m(k), n)))
        .collect::<Vec<_>>();
    DshbFactorization {
        a: scaled[0].clone(),
        sequence: HbSequence::from_levels(levels, partition),
        scaled_sequence: scaled,
        partition: partition.clone(),
    }
}

/// Closed form for `n = n1 + n2`: coupling weight `n1/n` on the first `n2`
/// members of each cluster, `n2/n` on their diagonals.
pub fn dshb_two_block(n1: usize, n2: usize) -> Result<DshbFactorization> {
    if n2 == 0 || n1 < n2 {
        return Err(Error::TwoBlockOrder { n1, n2 });
    }
    let partition = Partition::from_parts(&[n1, n2])?;
    Ok(dshb_factorize(&partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{
        factor_residual, is_hierarchically_banded, ones_j, ratio, sandwich_by_matmul,
    };
    use num_traits::{One, Signed, Zero};

    #[test]
    fn two_one_closed_form() {
        let f = dshb_two_block(2, 1).unwrap();
        let expected = SparseMatrix::from_triplets(
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
        .unwrap();
        assert_eq!(f.a, expected);
        assert!(f.a.is_doubly_stochastic());
        let p = Partition::from_parts(&[2, 1]).unwrap();
        assert_eq!(sandwich_by_matmul(&f.a, &p).unwrap(), ones_j(3));
    }

    #[test]
    fn one_one_is_ones_matrix() {
        assert_eq!(dshb_two_block(1, 1).unwrap().a, ones_j(2));
    }

    #[test]
    fn three_two_sums() {
        let f = dshb_two_block(3, 2).unwrap();
        assert!(f.a.row_sums().iter().all(One::is_one));
        assert!(f.a.col_sums().iter().all(One::is_one));
        // bottom-right block is (n2/n) I of order n2
        assert_eq!(f.a.value(3, 3), ratio(2, 5));
        assert_eq!(f.a.value(4, 4), ratio(2, 5));
        assert_eq!(f.a.value(2, 2), ratio(1, 1));
        assert_eq!(f.a.value(0, 3), ratio(3, 5));
    }

    #[test]
    fn rejects_wrong_order() {
        assert!(dshb_two_block(2, 3).is_err());
    }

    #[test]
    fn single_cluster_gives_identity() {
        let p = Partition::from_parts(&[5]).unwrap();
        assert_eq!(dshb_factorize(&p).a, SparseMatrix::identity(5));
    }

    #[test]
    fn binary_fifteen() {
        let p = Partition::from_parts(&[8, 4, 2, 1]).unwrap();
        let f = dshb_factorize(&p);
        assert!(f.a.is_doubly_stochastic());
        assert_eq!(f.a.d_max(), 4);
        assert_eq!(sandwich_by_matmul(&f.a, &p).unwrap(), ones_j(15));
        assert!(is_hierarchically_banded(&f.a, &p));
        assert_eq!(f.a.nnz(), 37);
        assert_eq!(f.counted_nnz_formula(), 37);
        assert_eq!(f.quoted_nnz_formula(), 8 + 8 + 6 + 4);
    }

    #[test]
    fn three_two_one_scaled_sequence() {
        let p = Partition::from_parts(&[3, 2, 1]).unwrap();
        let f = dshb_factorize(&p);
        assert_eq!(f.scaled_sequence.len(), 3);
        for t in &f.scaled_sequence {
            assert!(t.is_doubly_stochastic());
        }
        assert_eq!(f.scaled_sequence[2], SparseMatrix::identity(1));
        assert_eq!(f.sequence.level(2), &SparseMatrix::diagonal([ratio(1, 6)]));
        // trailing block of Ã^(k) is (m_k / m_{k-1}) Ã^(k+1)
        for k in 0..2 {
            let t = &f.scaled_sequence[k];
            let tail = t.trailing(p.part(k));
            let expect = f.scaled_sequence[k + 1].scale(&ratio_u(p.m(k + 1), p.m(k)));
            assert_eq!(tail, expect);
            assert_eq!(f.sequence.level(k).scale(&f.scaling_factors()[k]), *t);
        }
    }

    #[test]
    fn entries_lie_in_unit_interval() {
        let p = Partition::from_parts(&[16, 8, 4, 2, 1]).unwrap();
        let f = dshb_factorize(&p);
        assert!(f
            .a
            .iter()
            .all(|(_, _, v)| !v.is_negative() && *v <= Rational::one()));
        assert!(factor_residual(&f.a, &p).unwrap().is_zero());
    }

    #[test]
    fn global_entries_match_direct_formula() {
        // band weight n_k/n, diagonal m_k/n on coupled rows, m_{k-1}/n otherwise
        let p = Partition::from_parts(&[9, 3, 1]).unwrap();
        let f = dshb_factorize(&p);
        let n = p.n();
        for k in 0..p.tau() {
            let o = p.offset(k);
            for i in 0..p.part(k) {
                let d = if i < p.m(k + 1) { p.m(k + 1) } else { p.m(k) };
                assert_eq!(f.a.value(o + i, o + i), ratio_u(d, n));
                if i < p.m(k + 1) {
                    assert_eq!(f.a.value(o + i, o + p.part(k) + i), ratio_u(p.part(k), n));
                }
            }
        }
    }
}
