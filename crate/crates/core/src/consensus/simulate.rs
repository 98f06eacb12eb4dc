use std::io::Write;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::schedule::{MixingSchedule, Phase};
use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundCost {
    pub nnz: usize,
    pub d_max: usize,
}

/// States and deviations from the true average; index 0 is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusTrace {
    pub states: Vec<Array2<f64>>,
    pub errors: Vec<f64>,
    /// One per round (not per state).
    pub round_costs: Vec<RoundCost>,
    pub phases: Vec<Phase>,
    pub labels: Vec<String>,
    pub average: Vec<f64>,
    pub tolerance: f64,
    pub seed: Option<u64>,
}

impl ConsensusTrace {
    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("initial state recorded")
    }

    pub fn converged(&self) -> bool {
        self.final_error() <= self.tolerance
    }

    /// First round after which the deviation is within tolerance.
    pub fn rounds_to_consensus(&self) -> Option<usize> {
        self.errors.iter().position(|&e| e <= self.tolerance)
    }

    /// Columns: round, phase, label, max_error, nnz, d_max. Round 0 is the
    /// initial state and reports zero cost.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "round,phase,label,max_error,nnz,d_max")?;
        writeln!(w, "0,initial,initial,{:e},0,0", self.errors[0])?;
        for (r, cost) in self.round_costs.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{:e},{},{}",
                r + 1,
                self.phases[r],
                self.labels[r],
                self.errors[r + 1],
                cost.nnz,
                cost.d_max
            )?;
        }
        Ok(())
    }
}

/// Seeded uniform `[-1, 1]` start state with `n` rows and `d` columns.
pub fn random_state(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((n, d), |_| rng.gen_range(-1.0..=1.0))
}

fn column_means(x: &Array2<f64>) -> Vec<f64> {
    let n = x.nrows() as f64;
    x.columns().into_iter().map(|c| c.sum() / n).collect()
}

fn max_deviation(x: &Array2<f64>, average: &[f64]) -> f64 {
    x.indexed_iter()
        .map(|((_, j), v)| (v - average[j]).abs())
        .fold(0.0, f64::max)
}

/// Applies `X <- W X` for every round in order, in double precision.
pub fn simulate(
    schedule: &MixingSchedule,
    x0: &Array2<f64>,
    tolerance: f64,
) -> Result<ConsensusTrace> {
    let n = schedule.n();
    if x0.nrows() != n {
        return Err(Error::Dimension(format!(
            "initial state has {} rows, schedule has order {n}",
            x0.nrows()
        )));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Dimension(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let average = column_means(x0);
    let mut states = vec![x0.clone()];
    let mut errors = vec![max_deviation(x0, &average)];
    let mut round_costs = Vec::with_capacity(schedule.len());
    for round in &schedule.rounds {
        let w = round.matrix.to_f64_rows();
        let x = states.last().expect("nonempty");
        let mut next = Array2::<f64>::zeros(x.raw_dim());
        for (i, row) in w.iter().enumerate() {
            let mut out = next.row_mut(i);
            // fixed column order within each dot product
            for &(j, v) in row {
                out.scaled_add(v, &x.row(j));
            }
        }
        errors.push(max_deviation(&next, &average));
        states.push(next);
        round_costs.push(RoundCost {
            nnz: round.matrix.nnz(),
            d_max: round.matrix.d_max(),
        });
    }
    Ok(ConsensusTrace {
        states,
        errors,
        round_costs,
        phases: schedule.rounds.iter().map(|r| r.phase).collect(),
        labels: schedule.rounds.iter().map(|r| r.label.clone()).collect(),
        average,
        tolerance,
        seed: None,
    })
}

/// [`simulate`] from [`random_state`], recording the seed.
pub fn simulate_seeded(
    schedule: &MixingSchedule,
    dim: usize,
    seed: u64,
    tolerance: f64,
) -> Result<ConsensusTrace> {
    if dim == 0 {
        return Err(Error::Dimension(
            "state dimension must be at least 1".into(),
        ));
    }
    let x0 = random_state(schedule.n(), dim, seed);
    let mut trace = simulate(schedule, &x0, tolerance)?;
    trace.seed = Some(seed);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consensus::{build_schedule, IntraMethod, Phase2};
    use crate::factor::Method;
    use crate::partition::Partition;

    fn schedule(parts: &[usize], phase2: Phase2, intra: IntraMethod) -> MixingSchedule {
        build_schedule(&Partition::from_parts(parts).unwrap(), phase2, intra).unwrap()
    }

    #[test]
    fn basis_vector_averages_to_one_over_n() {
        let s = schedule(&[3, 2, 1], Phase2::Single(Method::Rhb), IntraMethod::Dense);
        let mut x0 = Array2::zeros((6, 1));
        x0[[0, 0]] = 1.0;
        let t = simulate(&s, &x0, DEFAULT_TOLERANCE).unwrap();
        let last = t.states.last().unwrap();
        assert!(last.iter().all(|v| (v - 1.0 / 6.0).abs() <= 1e-10));
        assert!(t.converged());
        assert_eq!(t.errors.len(), s.len() + 1);
    }

    #[test]
    fn consensus_is_a_fixed_point() {
        let s = schedule(&[4, 2, 1], Phase2::TFactors, IntraMethod::OnePeerExp);
        let x0 = Array2::from_shape_fn((7, 3), |(_, j)| j as f64 - 0.5);
        let t = simulate(&s, &x0, DEFAULT_TOLERANCE).unwrap();
        for st in &t.states {
            for ((_, j), v) in st.indexed_iter() {
                assert!((v - x0[[0, j]]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn random_start_reaches_average_only_at_the_end() {
        let s = schedule(
            &[8, 4, 2, 1],
            Phase2::Single(Method::Dshb),
            IntraMethod::OnePeerExp,
        );
        let t = simulate_seeded(&s, 4, 11, DEFAULT_TOLERANCE).unwrap();
        assert!(t.final_error() <= 1e-10);
        assert!(t.errors[1] > 1e-3);
        assert_eq!(t.rounds_to_consensus(), Some(s.len()));
    }

    #[test]
    fn seeded_runs_are_identical() {
        let s = schedule(&[8, 4, 2, 1], Phase2::TFactors, IntraMethod::Dense);
        let a = simulate_seeded(&s, 3, 5, DEFAULT_TOLERANCE).unwrap();
        let b = simulate_seeded(&s, 3, 5, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(a, b);
        let bits =
            |t: &ConsensusTrace| -> Vec<u64> { t.errors.iter().map(|e| e.to_bits()).collect() };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn rejects_wrong_row_count() {
        let s = schedule(&[2, 1], Phase2::Single(Method::Dshb), IntraMethod::Dense);
        assert!(simulate(&s, &Array2::zeros((4, 1)), 1e-10).is_err());
        assert!(simulate(&s, &Array2::zeros((3, 1)), 0.0).is_err());
        assert!(simulate_seeded(&s, 0, 1, 1e-10).is_err());
    }

    #[test]
    fn csv_has_one_line_per_state() {
        let s = schedule(&[2, 1], Phase2::Single(Method::Dshb), IntraMethod::Dense);
        let t = simulate_seeded(&s, 2, 3, DEFAULT_TOLERANCE).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 1 + s.len());
        assert_eq!(lines[0], "round,phase,label,max_error,nnz,d_max");
        assert!(lines[2].starts_with("1,phase1,intra-dense-1,"));
        assert!(lines[3].ends_with(",5,2"));
    }
}
