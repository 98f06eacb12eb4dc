//! Reduced hierarchically banded (RHB) factor of `J`.
//!
//! Each level `k` keeps a single non-unit diagonal entry `alpha_k` in its
//! leading cluster and a single coupling entry to the first member of every
//! later cluster:
//!
//! ```text
//! alpha_k       = n_k^2 / n - n_k + 1
//! beta^(k)_j    = n_k n_j / n            (j > k)
//! ```
//!
//! Both use the global order `n` at every level: block `(a, b)` of
//! `J_0 A J_0` equals `(1^T A_ab 1) / (n_a n_b)`, which must be `1/n`.

use crate::error::{Error, Result};
use crate::matrix::{ratio_u, Builder, HbSequence, Rational, SparseMatrix};
use crate::partition::Partition;

#[derive(Debug, Clone)]
pub struct RhbFactorization {
    pub a: SparseMatrix,
    pub sequence: HbSequence,
    pub partition: Partition,
    /// `alpha_1..alpha_tau`.
    pub alphas: Vec<Rational>,
    /// `betas[k]` lists `beta^(k)_j` for `j = k+1..tau` (zero-based `k`).
    pub betas: Vec<Vec<Rational>>,
}

fn alpha(nk: usize, n: usize) -> Rational {
    ratio_u(nk * nk, n) - ratio_u(nk, 1) + ratio_u(1, 1)
}

/// Runs the level recursion from the last cluster up, assembling
/// `A^(k) = [[diag(alpha_k, 1, ..., 1), B_k], [B_k^T, A^(k+1)]]`.
pub fn rhb_factorize(partition: &Partition) -> RhbFactorization {
    let n = partition.n();
    let tau = partition.tau();
    let alphas: Vec<Rational> = partition.parts().iter().map(|&nk| alpha(nk, n)).collect();
    let betas: Vec<Vec<Rational>> = (0..tau)
        .map(|k| {
            (k + 1..tau)
                .map(|j| ratio_u(partition.part(k) * partition.part(j), n))
                .collect()
        })
        .collect();

    let last = partition.part(tau - 1);
    let mut levels = vec![SparseMatrix::diagonal(unit_diag(&alphas[tau - 1], last))];
    for k in (0..tau - 1).rev() {
        let nk = partition.part(k);
        let m = partition.m(k);
        let below = levels.last().expect("at least one level");
        let mut b = Builder::new(m, m);
        for (i, v) in unit_diag(&alphas[k], nk).into_iter().enumerate() {
            b.set(i, i, v);
        }
        // first member of each later cluster j sits at local offset
        // offset(j) - offset(k+1) inside the trailing block
        let base = partition.offset(k + 1);
        for (l, beta) in betas[k].iter().enumerate() {
            let r = partition.offset(k + 1 + l) - base;
            b.set_sym(r, nk + r, beta.clone());
        }
        b.add_block(nk, nk, below);
        levels.push(b.build());
    }
    levels.reverse();

    let a = levels[0].clone();
    RhbFactorization {
        a,
        sequence: HbSequence::from_levels(levels, partition),
        partition: partition.clone(),
        alphas,
        betas,
    }
}

fn unit_diag(first: &Rational, len: usize) -> Vec<Rational> {
    let mut d = vec![ratio_u(1, 1); len];
    d[0] = first.clone();
    d
}

/// Closed form for `n = n1 + n2`.
pub fn rhb_two_block(n1: usize, n2: usize) -> Result<RhbFactorization> {
    if n2 == 0 || n1 < n2 {
        return Err(Error::TwoBlockOrder { n1, n2 });
    }
    let partition = Partition::from_parts(&[n1, n2])?;
    Ok(rhb_factorize(&partition))
}
