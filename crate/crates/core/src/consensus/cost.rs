use std::fmt::Write as _;

use serde::Serialize;

use super::schedule::Phase2;
use crate::dshb::dshb_factorize;
use crate::factor::Method;
use crate::partition::Partition;
use crate::rhb::rhb_factorize;
use crate::sds::sds_factorize;

/// Directly counted cost of one phase-2 choice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostRow {
    pub method: String,
    /// Total over phase-2 rounds.
    pub nnz: usize,
    pub nnz_per_round: Vec<usize>,
    /// Largest over phase-2 rounds.
    pub d_max: usize,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub partition: String,
    pub rows: Vec<CostRow>,
    pub notes: Vec<String>,
}

fn single(method: &str, a: &crate::matrix::SparseMatrix) -> CostRow {
    CostRow {
        method: method.to_string(),
        nnz: a.nnz(),
        nnz_per_round: vec![a.nnz()],
        d_max: a.d_max(),
        rounds: 1,
    }
}

/// One row per phase-2 choice: RHB, DSHB, `A_L`, `A_R`, then the `T̂`
/// factors applied one per round.
pub fn cost_report(partition: &Partition) -> CostReport {
    let rhb = rhb_factorize(partition);
    let dshb = dshb_factorize(partition);
    let sds = sds_factorize(partition);
    let tau = partition.tau();
    let hats = &sds.hat_factors[..tau - 1];
    // application order: T̂^(tau-1) first
    let per_round: Vec<usize> = hats.iter().rev().map(|h| h.nnz()).collect();
    let rows = vec![
        single(Method::Rhb.name(), &rhb.a),
        single(Method::Dshb.name(), &dshb.a),
        single(Method::SdsLeft.name(), &sds.a_left),
        single(Method::SdsRight.name(), &sds.a_right),
        CostRow {
            method: Phase2::TFactors.name().to_string(),
            nnz: per_round.iter().sum(),
            nnz_per_round: per_round,
            d_max: hats.iter().map(|h| h.d_max()).max().unwrap_or(0),
            rounds: hats.len(),
        },
    ];
    let notes = vec![format!(
        "dshb nnz counted {} (sum (2k-1) n_k = {}); the quoted sum k n_k = {} undercounts",
        dshb.a.nnz(),
        dshb.counted_nnz_formula(),
        dshb.quoted_nnz_formula()
    )];
    CostReport {
        partition: partition.to_string(),
        rows,
        notes,
    }
}

impl CostReport {
    pub fn row(&self, method: &str) -> Option<&CostRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "partition: {}", self.partition);
        let _ = writeln!(
            out,
            "{:<12} {:>8} {:>6} {:>8}  nnz/round",
            "method", "nnz", "d_max", "rounds"
        );
        for r in &self.rows {
            let per: Vec<String> = r.nnz_per_round.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(
                out,
                "{:<12} {:>8} {:>6} {:>8}  {}",
                r.method,
                r.nnz,
                r.d_max,
                r.rounds,
                per.join(",")
            );
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,nnz,d_max,rounds,nnz_per_round\n");
        for r in &self.rows {
            let per: Vec<String> = r.nnz_per_round.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.method,
                r.nnz,
                r.d_max,
                r.rounds,
                per.join(";")
            );
        }
        out
    }
}
