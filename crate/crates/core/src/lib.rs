//! Sparse factorizations `J = J_0 A J_0` of the scaled all-ones matrix
//! `J = (1/n) 11^T`, where `J_0` averages inside the clusters of a dominant
//! partition of `n`, together with the finite-time consensus schedules they
//! induce.
//!
//! All factor entries are exact rationals. Floating point only appears in
//! the consensus simulator and in Matrix Market export.

pub mod cli;
pub mod consensus;
pub mod dshb;
pub mod error;
pub mod factor;
pub mod matrix;
pub mod partition;
pub mod rhb;
pub mod sds;

pub use dshb::{dshb_factorize, dshb_two_block, DshbFactorization};
pub use error::{Error, PartitionError, Result};
pub use factor::{factor_matrix, FactorMetadata, Method};
pub use matrix::{Rational, SparseMatrix};
pub use partition::Partition;
pub use rhb::{rhb_factorize, rhb_two_block, RhbFactorization};
pub use sds::{sds_factorize, t_factor, v_recursion, SdsFactorization};
