use super::SparseMatrix;
use crate::error::Result;
use crate::partition::Partition;

/// The chain `A^(1) ⊃ A^(2) ⊃ ... ⊃ A^(tau)` of trailing principal
/// submatrices of a hierarchically banded matrix. `A^(k)` has order `m_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HbSequence {
    matrices: Vec<SparseMatrix>,
    partition: Partition,
}

impl HbSequence {
    /// Slices the trailing submatrices of `a` without checking structure.
    pub(crate) fn from_trailing(a: &SparseMatrix, partition: &Partition) -> Self {
        let matrices = (0..partition.tau())
            .map(|k| a.trailing(partition.offset(k)))
            .collect();
        HbSequence {
            matrices,
            partition: partition.clone(),
        }
    }

    pub(crate) fn from_levels(matrices: Vec<SparseMatrix>, partition: &Partition) -> Self {
        debug_assert_eq!(matrices.len(), partition.tau());
        HbSequence {
            matrices,
            partition: partition.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn matrices(&self) -> &[SparseMatrix] {
        &self.matrices
    }

    /// `A^(k)` for the zero-based level `k`.
    pub fn level(&self, k: usize) -> &SparseMatrix {
        &self.matrices[k]
    }

    /// `(A11, A12, A22)` of level `k < tau - 1`, with `A11` of order `n_k`.
    pub fn blocks(&self, k: usize) -> (SparseMatrix, SparseMatrix, SparseMatrix) {
        let a = &self.matrices[k];
        let nk = self.partition.part(k);
        let m = a.rows();
        (
            a.block(0, nk, 0, nk),
            a.block(0, nk, nk, m),
            a.block(nk, m, nk, m),
        )
    }

    /// Rebuilds `A^(k)` as `[[A11, A12], [A12^T, A^(k+1)]]`.
    pub fn reassemble(&self, k: usize) -> Result<SparseMatrix> {
        if k + 1 == self.matrices.len() {
            return Ok(self.matrices[k].clone());
        }
        let (a11, a12, _) = self.blocks(k);
        SparseMatrix::from_blocks(&a11, &a12, &a12.transpose(), &self.matrices[k + 1])
    }
}

/// Symmetric, and every stored entry `(i, j)` with `i <= j` is either on the
/// diagonal or on the coupling band `j = i + n_L` of the cluster `L` holding
/// row `i`. The last cluster carries no band.
pub fn is_hierarchically_banded(a: &SparseMatrix, partition: &Partition) -> bool {
    let n = partition.n();
    if a.shape() != (n, n) || !a.is_symmetric() {
        return false;
    }
    let tau = partition.tau();
    let mut cluster = Vec::with_capacity(n);
    for (k, &size) in partition.parts().iter().enumerate() {
        cluster.extend(std::iter::repeat_n(k, size));
    }
    a.iter().filter(|&(i, j, _)| i <= j).all(|(i, j, _)| {
        let level = cluster[i];
        j == i || (level + 1 < tau && j == i + partition.part(level))
    })
}

pub fn extract_hb_sequence(a: &SparseMatrix, partition: &Partition) -> Option<HbSequence> {
    is_hierarchically_banded(a, partition).then(|| HbSequence::from_trailing(a, partition))
}
