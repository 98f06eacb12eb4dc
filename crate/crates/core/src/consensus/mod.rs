//! Three-phase mixing schedules built from the factorizations, and a
//! floating point simulator for the averaging iteration `X <- W X`.
//!
//! Phase 1 averages inside clusters (product `J_0`), phase 2 applies the
//! inter-cluster factor `A`, phase 3 repeats phase 1. The exact product of
//! all rounds is `J`, so every agent holds the global average after the last
//! round.

mod cost;
mod schedule;
mod simulate;

pub use cost::{cost_report, CostReport, CostRow};
pub use schedule::{
    build_schedule, intra_cluster_schedule, IntraMethod, MixingSchedule, Phase, Phase2, Round,
};
pub use simulate::{
    random_state, simulate, simulate_seeded, ConsensusTrace, RoundCost, DEFAULT_TOLERANCE,
};

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{write_json, write_matrix_market};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleManifest {
    pub partition: String,
    pub n: usize,
    pub phase2: String,
    pub intra: String,
    pub rounds: Vec<ManifestRound>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRound {
    pub file: String,
    pub json: String,
    pub phase: Phase,
    pub label: String,
}

/// Writes each round as `NNN_<label>.mtx` plus an exact `.json` twin, and
/// `manifest.json` listing them in application order.
pub fn export_schedule(
    schedule: &MixingSchedule,
    phase2: Phase2,
    intra: IntraMethod,
    dir: &Path,
) -> Result<ScheduleManifest> {
    fs::create_dir_all(dir)?;
    let mut rounds = Vec::with_capacity(schedule.len());
    for (i, round) in schedule.rounds.iter().enumerate() {
        let stem = format!("{:03}_{}_{}", i + 1, round.phase, round.label);
        let file = format!("{stem}.mtx");
        let json = format!("{stem}.json");
        write_matrix_market(
            &round.matrix,
            BufWriter::new(File::create(dir.join(&file))?),
        )?;
        write_json(
            &round.matrix,
            BufWriter::new(File::create(dir.join(&json))?),
        )?;
        rounds.push(ManifestRound {
            file,
            json,
            phase: round.phase,
            label: round.label.clone(),
        });
    }
    let manifest = ScheduleManifest {
        partition: schedule.partition.to_string(),
        n: schedule.n(),
        phase2: phase2.to_string(),
        intra: intra.to_string(),
        rounds,
    };
    serde_json::to_writer_pretty(File::create(dir.join("manifest.json"))?, &manifest)?;
    Ok(manifest)
}
