//! The `hbfact` command line.
//!
//! Exit codes: 0 success, 1 other failure, 2 bad flags, 3 invalid partition,
//! 4 I/O failure, 5 verification failure.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::consensus::{
    build_schedule, cost_report, export_schedule, simulate_seeded, IntraMethod, Phase2,
    DEFAULT_TOLERANCE,
};
use crate::error::{Error, PartitionError};
use crate::factor::FactorMetadata;
use crate::matrix::{factor_residual, read_json, write_json, write_matrix_market, SparseMatrix};
use crate::partition::Partition;
use crate::sds::sds_factorize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARTITION: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

pub const OUT_DIR_ENV: &str = "HBFACT_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "hbfact",
    version,
    about = "Sparse factors of the averaging matrix J"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a validated partition.
    Partition(PartitionArgs),
    /// Write a factor (or the T-factor sequence) with a metadata sidecar.
    Factorize(FactorizeArgs),
    /// Check J0 A J0 = J exactly.
    Verify(VerifyArgs),
    /// Print the phase-2 cost table.
    Stats(StatsArgs),
    /// Write every round of the three-phase mixing schedule.
    Schedule(ScheduleArgs),
    /// Run the consensus iteration and write its trace.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PartitionArgs {
    /// Order n; use with --base.
    #[arg(long, requires = "base")]
    pub n: Option<usize>,
    /// Base p for the digit-expansion partition of n.
    #[arg(long, requires = "n", conflicts_with = "parts")]
    pub base: Option<usize>,
    /// Explicit parts, e.g. 8,4,2,1 (or n=15;parts=8,4,2,1).
    #[arg(long, conflicts_with = "n")]
    pub parts: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Mtx,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    #[command(flatten)]
    pub partition: PartitionArgs,
    /// rhb | dshb | sds-left | sds-right | t-factors
    #[arg(long)]
    pub method: Phase2,
    /// mtx also writes the exact JSON twin.
    #[arg(long, value_enum, default_value = "json")]
    pub format: FileFormat,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub partition: PartitionArgs,
    #[arg(long, default_value = "dshb")]
    pub method: Phase2,
    /// JSON factor to check instead of a freshly built one. Without partition
    /// flags the partition is read from the `.meta.json` sidecar.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub partition: PartitionArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[command(flatten)]
    pub partition: PartitionArgs,
    #[arg(long, default_value = "dshb")]
    pub method: Phase2,
    /// dense | one-peer-exp
    #[arg(long, default_value = "dense")]
    pub intra: IntraMethod,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub partition: PartitionArgs,
    #[arg(long, default_value = "dshb")]
    pub method: Phase2,
    #[arg(long, default_value = "dense")]
    pub intra: IntraMethod,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Columns of the state matrix.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Partition(PartitionError),
    Io(String),
    Verify,
    Other(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Partition(_) => EXIT_PARTITION,
            Failure::Io(_) => EXIT_IO,
            Failure::Verify => EXIT_VERIFY,
            Failure::Other(_) => EXIT_OTHER,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Partition(p) => Failure::Partition(p),
            Error::Io(io) => Failure::Io(io.to_string()),
            Error::NotPowerOfTwo { .. } => Failure::Usage(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

impl PartitionArgs {
    fn given(&self) -> bool {
        self.n.is_some() || self.base.is_some() || self.parts.is_some()
    }

    fn resolve(&self) -> CliResult<Partition> {
        match (self.n, self.base, &self.parts) {
            (Some(n), Some(p), None) => Ok(Partition::from_base(n, p).map_err(Failure::Partition)?),
            (None, None, Some(text)) => Ok(text.parse().map_err(Failure::Partition)?),
            _ => Err(Failure::Usage(
                "give either --n with --base, or --parts".into(),
            )),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Verify) => EXIT_VERIFY,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) => format!("usage error: {m}"),
                Failure::Partition(p) => format!("invalid partition: {p}"),
                Failure::Io(m) => format!("i/o error: {m}"),
                Failure::Other(m) => format!("error: {m}"),
                Failure::Verify => unreachable!(),
            };
            let _ = writeln!(err, "{msg}");
            f.code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Partition(a) => cmd_partition(&a, out),
        Command::Factorize(a) => cmd_factorize(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Stats(a) => cmd_stats(&a, out),
        Command::Schedule(a) => cmd_schedule(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out),
    }
}

fn cmd_partition(a: &PartitionArgs, out: &mut dyn Write) -> CliResult<()> {
    let p = a.resolve()?;
    writeln!(out, "{p}")?;
    writeln!(out, "tau={}", p.tau())?;
    let m: Vec<String> = (1..=p.tau()).map(|k| p.m(k).to_string()).collect();
    writeln!(out, "m={}", m.join(","))?;
    Ok(())
}

/// Factor matrices for `method`: one matrix, or the non-identity `T̂`
/// factors in application order.
fn factors_for(p: &Partition, method: Phase2) -> Vec<(String, SparseMatrix)> {
    match method {
        Phase2::Single(m) => vec![(m.name().to_string(), crate::factor::factor_matrix(p, m))],
        Phase2::TFactors | Phase2::TFactorsReversed => {
            let sds = sds_factorize(p);
            let mut levels: Vec<usize> = (0..p.tau().saturating_sub(1)).collect();
            if method == Phase2::TFactors {
                levels.reverse();
            }
            levels
                .into_iter()
                .map(|k| (format!("t-hat-{}", k + 1), sds.hat_factors[k].clone()))
                .collect()
        }
    }
}

/// `W_q ... W_1` for factors listed in application order.
fn applied_product(n: usize, factors: &[(String, SparseMatrix)]) -> SparseMatrix {
    factors
        .iter()
        .fold(SparseMatrix::identity(n), |acc, (_, f)| {
            f.matmul(&acc).expect("factors have order n")
        })
}

fn write_file(
    path: &Path,
    f: impl FnOnce(BufWriter<File>) -> crate::error::Result<()>,
) -> CliResult<()> {
    let file = File::create(path).map_err(io_at(path))?;
    f(BufWriter::new(file)).map_err(|e| match e {
        Error::Io(io) => Failure::Io(format!("{}: {io}", path.display())),
        other => Failure::from(other),
    })
}

fn cmd_factorize(a: &FactorizeArgs, out: &mut dyn Write) -> CliResult<()> {
    let p = a.partition.resolve()?;
    fs::create_dir_all(&a.out).map_err(io_at(&a.out))?;
    let (factors, mut meta) = match a.method {
        Phase2::Single(m) => {
            let (mat, meta) = FactorMetadata::describe(&p, m);
            (vec![(m.name().to_string(), mat)], meta)
        }
        other => {
            let factors = factors_for(&p, other);
            let product = applied_product(p.n(), &factors);
            let mut meta = FactorMetadata::for_matrix(other.name(), &p, &product);
            meta.d_max = factors.iter().map(|(_, f)| f.d_max()).max().unwrap_or(0);
            meta.nnz = factors.iter().map(|(_, f)| f.nnz()).sum();
            meta.notes.push(format!(
                "{} rounds; nnz and d_max are over rounds; files are in application order",
                factors.len()
            ));
            (factors, meta)
        }
    };
    for (name, mat) in &factors {
        let json = format!("{name}.json");
        write_file(&a.out.join(&json), |w| write_json(mat, w))?;
        meta.files.push(json);
        if a.format == FileFormat::Mtx {
            let mtx = format!("{name}.mtx");
            write_file(&a.out.join(&mtx), |w| write_matrix_market(mat, w))?;
            meta.files.push(mtx);
        }
    }
    let meta_name = format!("{}.meta.json", a.method.name());
    let meta_path = a.out.join(&meta_name);
    write_file(&meta_path, |w| Ok(serde_json::to_writer_pretty(w, &meta)?))?;
    for f in &meta.files {
        writeln!(out, "wrote {}", a.out.join(f).display())?;
    }
    writeln!(out, "wrote {}", meta_path.display())?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    status: &'static str,
    method: String,
    partition: String,
    n: usize,
    /// Exact `max |J0 A J0 - J|`.
    residual: String,
    nnz: usize,
    d_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
}

/// Partition recorded in `<stem>.meta.json` next to a factor file, or in a
/// metadata file given directly.
fn sidecar_partition(input: &Path) -> CliResult<Partition> {
    let candidates = [input.with_extension("meta.json"), input.to_path_buf()];
    for path in candidates.iter().filter(|c| c.exists()) {
        let text = fs::read_to_string(path).map_err(io_at(path))?;
        if let Ok(meta) = serde_json::from_str::<FactorMetadata>(&text) {
            return meta.partition.parse().map_err(Failure::Partition);
        }
    }
    Err(Failure::Usage(format!(
        "no partition flags and no metadata sidecar for {}",
        input.display()
    )))
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let (p, method, matrix, input) = match &a.input {
        Some(path) => {
            let p = if a.partition.given() {
                a.partition.resolve()?
            } else {
                sidecar_partition(path)?
            };
            let file = File::open(path).map_err(io_at(path))?;
            let m = read_json(BufReader::new(file)).map_err(|e| match e {
                Error::Io(io) => Failure::Io(format!("{}: {io}", path.display())),
                other => Failure::Other(format!("{}: {other}", path.display())),
            })?;
            (p, "input".to_string(), m, Some(path.display().to_string()))
        }
        None => {
            let p = a.partition.resolve()?;
            let factors = factors_for(&p, a.method);
            let m = applied_product(p.n(), &factors);
            (p, a.method.name().to_string(), m, None)
        }
    };
    let n = p.n();
    let residual = if matrix.shape() == (n, n) {
        Some(factor_residual(&matrix, &p)?)
    } else {
        None
    };
    let pass = residual
        .as_ref()
        .is_some_and(|r| *r == num_traits::Zero::zero());
    let report = VerifyReport {
        status: if pass { "PASS" } else { "FAIL" },
        method,
        partition: p.to_string(),
        n,
        residual: residual.map_or_else(|| "shape mismatch".to_string(), |r| r.to_string()),
        nnz: matrix.nnz(),
        d_max: matrix.d_max(),
        input,
    };
    match a.format {
        ReportFormat::Text => writeln!(
            out,
            "{} method={} partition={} residual={} nnz={} d_max={}",
            report.status,
            report.method,
            report.partition,
            report.residual,
            report.nnz,
            report.d_max
        )?,
        ReportFormat::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| Failure::Other(e.to_string()))?
        )?,
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn cmd_stats(a: &StatsArgs, out: &mut dyn Write) -> CliResult<()> {
    let p = a.partition.resolve()?;
    let report = cost_report(&p);
    match a.format {
        ReportFormat::Text => write!(out, "{}", report.to_table())?,
        ReportFormat::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| Failure::Other(e.to_string()))?
        )?,
    }
    Ok(())
}

fn cmd_schedule(a: &ScheduleArgs, out: &mut dyn Write) -> CliResult<()> {
    let p = a.partition.resolve()?;
    let schedule = build_schedule(&p, a.method, a.intra)?;
    let manifest = export_schedule(&schedule, a.method, a.intra, &a.out)?;
    for (phase, count) in [
        (
            "phase1",
            schedule.phase_len(crate::consensus::Phase::Phase1),
        ),
        (
            "phase2",
            schedule.phase_len(crate::consensus::Phase::Phase2),
        ),
        (
            "phase3",
            schedule.phase_len(crate::consensus::Phase::Phase3),
        ),
    ] {
        writeln!(out, "{phase}: {count} rounds")?;
    }
    writeln!(
        out,
        "wrote {} rounds and {}",
        manifest.rounds.len(),
        a.out.join("manifest.json").display()
    )?;
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.tolerance.is_nan() || a.tolerance <= 0.0 {
        return Err(Failure::Usage(format!(
            "--tolerance must be positive, got {}",
            a.tolerance
        )));
    }
    if a.dim == 0 {
        return Err(Failure::Usage("--dim must be at least 1".into()));
    }
    let p = a.partition.resolve()?;
    let schedule = build_schedule(&p, a.method, a.intra)?;
    let trace = simulate_seeded(&schedule, a.dim, a.seed, a.tolerance)?;
    fs::create_dir_all(&a.out).map_err(io_at(&a.out))?;
    let path = a.out.join("trace.csv");
    write_file(&path, |w| trace.write_csv(w))?;
    match trace.rounds_to_consensus() {
        Some(r) => writeln!(out, "rounds-to-consensus: {r} of {}", schedule.len())?,
        None => writeln!(
            out,
            "rounds-to-consensus: not reached in {} rounds",
            schedule.len()
        )?,
    }
    writeln!(out, "final-error: {:e}", trace.final_error())?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}
