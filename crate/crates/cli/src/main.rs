//! `blockpythag` command-line interface.
//!
//! Exit codes: 0 success, 1 usage, I/O, schema or hypothesis error, 2 the
//! partition admits no constructive certificate, 3 a theorem-backed check
//! failed.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockpythag::functional::{cor_concave, cor_four2, power_average, th_convex, thompson_sum};
use blockpythag::inequalities::{
    check_bhatia_kittaneh, check_compression_drop, check_cor_sing_sweep, check_interlacing, check_trace_triangle,
    compress_hyperplane, InequalityReport,
};
use blockpythag::io::{self as bio, IoError};
use blockpythag::pythagoras::{decompose, decompose4};
use blockpythag::random::{random_matrix, rng};
use blockpythag::search::{necessary_condition_scan, run_manifest_with, ScanConfig};
use blockpythag::{tol, ComplexMatrix, Error, PartitionedMatrix, ScalarFunction};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Incompatible(String),
    #[error("{0}")]
    CheckFailed(String),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Incompatible(_) | Failure::Core(Error::Incompatible) => 2,
            Failure::CheckFailed(_) | Failure::Core(Error::Postcondition { .. } | Error::SearchFailure { .. }) => 3,
            _ => 1,
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

#[derive(Parser)]
#[command(name = "blockpythag", version, about = "Isometry certificates for |A|^2 = sum U_k |A_k|^2 U_k^* and the inequalities it implies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a decomposition certificate.
    Decompose(DecomposeArgs),
    /// Check the singular value, Schatten and trace inequalities; one JSON report per line.
    Verify(VerifyArgs),
    /// Compress a square matrix onto the hyperplane orthogonal to h.
    Compress(CompressArgs),
    /// Functional-calculus certificate.
    Functional(FunctionalArgs),
    /// Run a witness-search manifest; one JSON result per line.
    Search(SearchArgs),
    /// Random scan of the singular value inequality on a partition shape.
    Scan(ScanArgs),
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    /// Allow the four-block route for partitions that are not compatible.
    #[arg(long)]
    four: bool,
    /// Certificate file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Residual bound relative to 1 + ||A||_F^2.
    #[arg(long, default_value_t = tol::DECOMPOSITION)]
    tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Sing,
    Schatten,
    Trace,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    /// Matrix file; a seeded random matrix on the partition shape when absent.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    partition: PathBuf,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Single exponent instead of the default sweep.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest multi-index entry in the singular value sweep.
    #[arg(long, default_value_t = 3)]
    max_entry: usize,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Unit vector as a one-column (or one-row) matrix file.
    #[arg(long)]
    h: PathBuf,
    /// Use the sharper constant valid for normal matrices.
    #[arg(long)]
    normal: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "function")]
struct FunctionChoice {
    /// Monotone convex psi with psi(0) = 0, e.g. `pow:p=3`.
    #[arg(long)]
    psi: Option<String>,
    /// Monotone concave phi, e.g. `pow:q=0.5` or `affine:a=1,b=1`.
    #[arg(long)]
    phi: Option<String>,
    /// Power average with exponent p.
    #[arg(long)]
    p: Option<f64>,
    /// Sum of block absolute values against |A|.
    #[arg(long)]
    thompson: bool,
}

#[derive(Args)]
struct FunctionalArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    #[command(flatten)]
    function: FunctionChoice,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Append result lines to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    partition: PathBuf,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    max_entry: usize,
}

fn load(matrix: &Path, partition: &Path) -> Outcome<PartitionedMatrix> {
    let m = bio::read_matrix(matrix)?;
    let p = bio::read_partition(partition)?;
    Ok(PartitionedMatrix::new(m, p)?)
}

fn emit_pretty<T: Serialize>(value: &T, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => bio::write_json(path, value)?,
        None => {
            let text = bio::to_json_pretty(value)?;
            writeln!(io::stdout().lock(), "{text}")?;
        }
    }
    Ok(())
}

fn emit_reports(reports: &[InequalityReport]) -> Outcome {
    let mut out = io::stdout().lock();
    for r in reports {
        bio::write_json_line(&mut out, r)?;
    }
    let failed: Vec<&str> = reports.iter().filter(|r| r.hypothesis && !r.pass).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::CheckFailed(format!("theorem-backed check failed: {}", failed.join(", "))))
    }
}

fn cmd_decompose(a: &DecomposeArgs) -> Outcome {
    let pm = load(&a.matrix, &a.partition)?;
    let cert = if pm.partition().compatibility().is_compatible() {
        decompose(&pm)?
    } else if pm.len() == 4 && a.four {
        decompose4(&pm)?
    } else if pm.len() == 4 {
        return Err(Failure::Incompatible(
            "partition is neither row nor column compatible; rerun with --four for the four-block route".into(),
        ));
    } else {
        return Err(Failure::Incompatible(format!(
            "partition with {} blocks is neither row nor column compatible and has no constructive certificate; \
             use `blockpythag search --manifest FILE` for numerical evidence",
            pm.len()
        )));
    };
    let bound = a.tol * (1.0 + pm.matrix().frobenius_sq());
    emit_pretty(&cert, a.out.as_deref())?;
    eprintln!("route {}: residual {:.3e} (bound {:.3e})", cert.route, cert.residual, bound);
    if cert.residual > bound {
        return Err(Failure::CheckFailed(format!("residual {:.3e} exceeds {:.3e}", cert.residual, bound)));
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let p = bio::read_partition(&a.partition)?;
    let m = match &a.matrix {
        Some(path) => bio::read_matrix(path)?,
        None => random_matrix(&mut rng(a.seed), p.host_rows(), p.host_cols()),
    };
    let pm = PartitionedMatrix::new(m, p)?;
    let mut reports = Vec::new();
    if matches!(a.suite, Suite::Sing | Suite::All) {
        reports.push(check_cor_sing_sweep(&pm, a.max_entry)?);
    }
    if matches!(a.suite, Suite::Schatten | Suite::All) {
        let qs = a.q.map_or_else(|| vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0], |q| vec![q]);
        for q in qs {
            reports.push(check_bhatia_kittaneh(&pm, q)?);
        }
    }
    if matches!(a.suite, Suite::Trace | Suite::All) {
        let ps = a.q.map_or_else(|| vec![1.0, 1.5, 2.0, 3.0], |q| vec![q]);
        for p in ps {
            reports.push(check_trace_triangle(&pm, p)?);
        }
    }
    emit_reports(&reports)
}

fn cmd_compress(a: &CompressArgs) -> Outcome {
    let m = bio::read_matrix(&a.matrix)?;
    let hm: ComplexMatrix = bio::read_matrix(&a.h)?;
    let h = match hm.shape() {
        (_, 1) => hm.col(0),
        (1, _) => hm.adjoint().col(0).iter().map(|z| z.conj()).collect(),
        s => return Err(Failure::Usage(format!("h must be a single row or column, got {}x{}", s.0, s.1))),
    };
    let c = compress_hyperplane(&m, &h)?;
    bio::write_json_line(&mut io::stdout().lock(), &c)?;
    emit_reports(&[check_interlacing(&m, &h, a.normal)?, check_compression_drop(&m, &h)?])
}

fn cmd_functional(a: &FunctionalArgs) -> Outcome {
    let pm = load(&a.matrix, &a.partition)?;
    let f = &a.function;
    let cert = if let Some(spec) = &f.psi {
        th_convex(&pm, &spec.parse::<ScalarFunction>()?)?
    } else if let Some(spec) = &f.phi {
        cor_concave(&pm, &spec.parse::<ScalarFunction>()?)?
    } else if let Some(p) = f.p {
        if pm.len() == 4 {
            cor_four2(&pm, p)?
        } else {
            power_average(&pm, p)?
        }
    } else {
        thompson_sum(&pm)?
    };
    emit_pretty(&cert, a.out.as_deref())?;
    eprintln!("{} {}: margin {:.3e}", cert.name, cert.route, cert.loewner_margin);
    Ok(())
}

fn cmd_search(a: &SearchArgs) -> Outcome {
    let manifest = bio::read_manifest(&a.manifest)?;
    let mut sink: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|source| IoError::File {
                    path: path.display().to_string(),
                    source,
                })?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let total = manifest.seeds.len();
    let mut written = 0;
    let mut failed = None;
    run_manifest_with(&manifest, |line| {
        written += 1;
        eprintln!(
            "[{written}/{total}] seed {}: residual {:.3e} after {} iterations ({})",
            line.seed, line.result.best_residual, line.result.total_iterations, line.result.status
        );
        if failed.is_none() {
            failed = bio::write_json_line(&mut sink, line).err();
        }
    })?;
    match failed {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn cmd_scan(a: &ScanArgs) -> Outcome {
    let p = bio::read_partition(&a.partition)?;
    let cfg = ScanConfig {
        trials: a.trials,
        seed: a.seed,
        max_entry: a.max_entry,
    };
    let rep = necessary_condition_scan(&p, &cfg)?;
    for c in rep.candidates.iter().filter(|c| c.confirmed) {
        eprintln!("COUNTEREXAMPLE CANDIDATE: trial {} index {:?} margin {:.3e}", c.trial, c.multi_index, c.raw_margin);
    }
    emit_pretty(&rep, None)
}

fn configure_threads() -> Outcome {
    let Ok(v) = std::env::var("BLOCKPYTHAG_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("BLOCKPYTHAG_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: &Cli) -> Outcome {
    configure_threads()?;
    match &cli.command {
        Command::Decompose(a) => cmd_decompose(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Compress(a) => cmd_compress(a),
        Command::Functional(a) => cmd_functional(a),
        Command::Search(a) => cmd_search(a),
        Command::Scan(a) => cmd_scan(a),
    }
}

fn main() -> ExitCode {
    // clap's usage errors exit with 2, which is reserved here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
