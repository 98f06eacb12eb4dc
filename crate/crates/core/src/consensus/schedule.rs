use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{factor_matrix, Method};
use crate::matrix::{block_diag_j, ratio_u, Builder, SparseMatrix};
use crate::partition::Partition;
use crate::sds::sds_factorize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Phase1,
    Phase2,
    Phase3,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Phase1 => "phase1",
            Phase::Phase2 => "phase2",
            Phase::Phase3 => "phase3",
        })
    }
}

/// How each cluster averages internally (phases 1 and 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntraMethod {
    /// One round applying `J_0` directly.
    Dense,
    /// `log2(n_k)` rounds of `(I + P^(2^i)) / 2`; needs power-of-two clusters.
    OnePeerExp,
}

impl FromStr for IntraMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.replace('_', "-").as_str() {
            "dense" => Ok(IntraMethod::Dense),
            "one-peer-exp" => Ok(IntraMethod::OnePeerExp),
            other => Err(format!("unknown intra-cluster method {other:?}")),
        }
    }
}

impl fmt::Display for IntraMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntraMethod::Dense => "dense",
            IntraMethod::OnePeerExp => "one-peer-exp",
        })
    }
}

/// What phase 2 applies between the two intra-cluster phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase2 {
    Single(Method),
    /// The non-identity `T̂` factors one per round, `T̂^(tau-1)` first, so
    /// the accumulated product is `A_L`.
    TFactors,
    /// `T̂^(1)` first; the accumulated product is `A_R`.
    TFactorsReversed,
}

impl Phase2 {
    pub const ALL: [Phase2; 6] = [
        Phase2::Single(Method::Rhb),
        Phase2::Single(Method::Dshb),
        Phase2::Single(Method::SdsLeft),
        Phase2::Single(Method::SdsRight),
        Phase2::TFactors,
        Phase2::TFactorsReversed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Phase2::Single(m) => m.name(),
            Phase2::TFactors => "t-factors",
            Phase2::TFactorsReversed => "t-factors-reversed",
        }
    }
}

impl FromStr for Phase2 {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.replace('_', "-").as_str() {
            "t-factors" | "t-sequence" => Ok(Phase2::TFactors),
            "t-factors-reversed" => Ok(Phase2::TFactorsReversed),
            other => other.parse::<Method>().map(Phase2::Single),
        }
    }
}

impl fmt::Display for Phase2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub matrix: SparseMatrix,
    pub phase: Phase,
    pub label: String,
}

/// Ordered mixing rounds; applying `X <- W X` round by round multiplies the
/// state by `W_q ... W_1`.
#[derive(Debug, Clone)]
pub struct MixingSchedule {
    pub rounds: Vec<Round>,
    pub partition: Partition,
}

impl MixingSchedule {
    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn phase_len(&self, phase: Phase) -> usize {
        self.rounds.iter().filter(|r| r.phase == phase).count()
    }

    /// `W_q ... W_2 W_1` in exact arithmetic.
    pub fn product(&self) -> SparseMatrix {
        self.rounds
            .iter()
            .fold(SparseMatrix::identity(self.n()), |acc, r| {
                r.matrix.matmul(&acc).expect("rounds have order n")
            })
    }
}

/// `(I + P^shift) / 2` for the cyclic shift `P` of order `size`.
fn half_shift(size: usize, shift: usize) -> SparseMatrix {
    let half = ratio_u(1, 2);
    let mut b = Builder::new(size, size);
    for i in 0..size {
        b.add(i, i, half.clone());
        b.add(i, (i + shift) % size, half.clone());
    }
    b.build()
}

/// Phase-1 rounds; their product is `J_0`.
pub fn intra_cluster_schedule(
    partition: &Partition,
    method: IntraMethod,
) -> Result<Vec<SparseMatrix>> {
    match method {
        IntraMethod::Dense => Ok(vec![block_diag_j(partition)]),
        IntraMethod::OnePeerExp => {
            let mut logs = Vec::with_capacity(partition.tau());
            for (k, &size) in partition.parts().iter().enumerate() {
                if !size.is_power_of_two() {
                    return Err(Error::NotPowerOfTwo { k: k + 1, size });
                }
                logs.push(size.trailing_zeros() as usize);
            }
            let rounds = logs.iter().copied().max().unwrap_or(0);
            Ok((0..rounds)
                .map(|i| {
                    partition
                        .parts()
                        .iter()
                        .zip(&logs)
                        .map(|(&size, &log)| {
                            if i < log {
                                half_shift(size, 1 << i)
                            } else {
                                SparseMatrix::identity(size)
                            }
                        })
                        .reduce(|acc, m| acc.direct_sum(&m))
                        .expect("at least one cluster")
                })
                .collect())
        }
    }
}

pub fn build_schedule(
    partition: &Partition,
    phase2: Phase2,
    intra: IntraMethod,
) -> Result<MixingSchedule> {
    let intra_rounds = intra_cluster_schedule(partition, intra)?;
    let mut rounds = Vec::new();
    for (i, m) in intra_rounds.iter().enumerate() {
        rounds.push(Round {
            matrix: m.clone(),
            phase: Phase::Phase1,
            label: format!("intra-{intra}-{}", i + 1),
        });
    }
    match phase2 {
        Phase2::Single(method) => rounds.push(Round {
            matrix: factor_matrix(partition, method),
            phase: Phase::Phase2,
            label: method.name().to_string(),
        }),
        Phase2::TFactors | Phase2::TFactorsReversed => {
            let sds = sds_factorize(partition);
            // T̂^(tau) is the identity and is skipped
            let mut levels: Vec<usize> = (0..partition.tau().saturating_sub(1)).collect();
            if phase2 == Phase2::TFactors {
                levels.reverse();
            }
            for k in levels {
                rounds.push(Round {
                    matrix: sds.hat_factors[k].clone(),
                    phase: Phase::Phase2,
                    label: format!("t-hat-{}", k + 1),
                });
            }
        }
    }
    for (i, m) in intra_rounds.into_iter().enumerate() {
        rounds.push(Round {
            matrix: m,
            phase: Phase::Phase3,
            label: format!("intra-{intra}-{}", i + 1),
        });
    }
    Ok(MixingSchedule {
        rounds,
        partition: partition.clone(),
    })
}
