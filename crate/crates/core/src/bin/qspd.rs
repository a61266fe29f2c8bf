//! Batch front end: sampling, fitting, geometry queries and ψ′ tabulation.
//!
//! Failures print one line `qspd: error[<code>]: <message>` on stderr and
//! exit with 2 (usage), 3 (input format), 4 (numeric/domain) or
//! 5 (non-convergence).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qspd::gaussian::{estimate_psi_table, eta_grid, sample_gaussian, GaussianParams, MHConfig};
use qspd::inference::{barycenter, fit_mle, BarycenterConfig};
use qspd::io::{self, FitReport, IoError};
use qspd::manifold::{distance, geodesic, SpdQMatrix};
use qspd::{Error, HermQMatrix, QMatrix};

#[derive(Parser)]
#[command(name = "qspd", version, about = "Geometry and Gaussian statistics on positive-definite quaternion matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples from a Riemannian Gaussian distribution
    Sample(SampleArgs),
    /// Fit barycentre and dispersion by maximum likelihood
    Fit(FitArgs),
    /// Print the Riemannian distance between two matrices
    Distance { a: PathBuf, b: PathBuf },
    /// Point at parameter t on the geodesic from A to B
    Geodesic {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample Riemannian barycentre
    Barycenter {
        #[arg(long)]
        samples: PathBuf,
        #[command(flatten)]
        descent: DescentArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tabulate psi'(eta) by Monte Carlo
    TabulatePsi(TabulateArgs),
    /// Validate a matrix file and report its eigenvalues
    Check { file: PathBuf },
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long, default_value_t = 5000)]
    burn_in: usize,
    #[arg(long, default_value_t = 10)]
    thinning: usize,
    /// Initial proposal step (default sigma/sqrt(n))
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args)]
struct DescentArgs {
    #[arg(long, default_value_t = 1e-9)]
    grad_tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
}

impl DescentArgs {
    fn config(&self) -> BarycenterConfig {
        BarycenterConfig { max_iters: self.max_iters, grad_tol: self.grad_tol, step: 1.0 }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    barycentre: Option<PathBuf>,
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    psi_table: PathBuf,
    #[command(flatten)]
    descent: DescentArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TabulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    eta_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    eta_max: f64,
    #[arg(long)]
    points: usize,
    #[arg(long)]
    samples_per_eta: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Format(String),
    Numeric(String),
    NonConvergence(String),
}

impl Failure {
    fn code(&self) -> (&'static str, u8) {
        match self {
            Failure::Usage(_) => ("usage", 2),
            Failure::Format(_) => ("input-format", 3),
            Failure::Numeric(_) => ("numeric", 4),
            Failure::NonConvergence(_) => ("non-convergence", 5),
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Format(m) | Failure::Numeric(m) | Failure::NonConvergence(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => {
                Failure::NonConvergence(format!("{e}; raise --grad-tol or --max-iters"))
            }
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            Error::DimensionMismatch { .. } => Failure::Format(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match &e {
            // well-formed but outside the manifold
            IoError::Invalid { source: Error::NotPositiveDefinite { .. }, .. } => Failure::Numeric(e.to_string()),
            _ => Failure::Format(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn emit<T: Serialize + ?Sized>(value: &T, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => io::write_json(path, value).map_err(Failure::from),
        None => {
            println!("{}", io::to_json(value));
            Ok(())
        }
    }
}

fn chain_config(chain: &ChainArgs, seed: u64) -> CliResult<MHConfig> {
    let cfg = MHConfig { step: chain.step, burn_in: chain.burn_in, thinning: chain.thinning, seed, adapt: true };
    cfg.validate()?;
    Ok(cfg)
}

fn positive(name: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be positive, got {x}")))
    }
}

fn at_least_one(name: &str, x: usize) -> CliResult<()> {
    if x >= 1 {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be at least 1")))
    }
}

fn run_sample(args: &SampleArgs) -> CliResult<()> {
    at_least_one("n", args.n)?;
    at_least_one("count", args.count)?;
    positive("sigma", args.sigma)?;
    let cfg = chain_config(&args.chain, args.seed)?;
    let barycentre = match &args.barycentre {
        Some(path) => io::read_spd(path)?,
        None => SpdQMatrix::identity(args.n),
    };
    if barycentre.dim() != args.n {
        return Err(Failure::Format(format!(
            "barycentre has dimension {}, --n is {}",
            barycentre.dim(),
            args.n
        )));
    }
    let params = GaussianParams::new(barycentre, args.sigma)?;
    let samples = sample_gaussian(&params, args.count, &cfg, &mut cfg.rng())?;
    emit(&samples, args.output.as_deref())
}

fn run_fit(args: &FitArgs) -> CliResult<()> {
    let cfg = args.descent.config();
    cfg.validate()?;
    let samples = io::read_samples(&args.samples)?;
    let table = io::read_psi_table(&args.psi_table)?;
    if samples.is_empty() {
        return Err(Failure::Format("sample file is empty".into()));
    }
    let fit = fit_mle(&samples, &table, &cfg)?;
    emit(&FitReport::from(&fit), args.output.as_deref())
}

fn read_pair(a: &Path, b: &Path) -> CliResult<(SpdQMatrix, SpdQMatrix)> {
    let (a, b) = (io::read_spd(a)?, io::read_spd(b)?);
    if a.dim() != b.dim() {
        return Err(Failure::Format(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    Ok((a, b))
}

fn run_tabulate(args: &TabulateArgs) -> CliResult<()> {
    at_least_one("n", args.n)?;
    at_least_one("samples-per-eta", args.samples_per_eta)?;
    at_least_one("workers", args.workers)?;
    let cfg = chain_config(&args.chain, args.seed)?;
    let etas = eta_grid(args.eta_min, args.eta_max, args.points)?;
    let table = estimate_psi_table(args.n, &etas, args.samples_per_eta, &cfg, args.workers)?;
    emit(&table, args.output.as_deref())
}

#[derive(Serialize)]
struct CheckReport {
    n: usize,
    hermitian: bool,
    hermitian_deviation: f64,
    positive_definite: bool,
    eigenvalues: Option<Vec<f64>>,
    reason: Option<String>,
}

fn run_check(file: &Path) -> CliResult<()> {
    let m: QMatrix = io::read_qmatrix(file)?;
    let deviation = m.hermitian_deviation();
    let mut report = CheckReport {
        n: m.dim(),
        hermitian: false,
        hermitian_deviation: deviation,
        positive_definite: false,
        eigenvalues: None,
        reason: None,
    };
    match HermQMatrix::new(m) {
        Err(e) => report.reason = Some(e.to_string()),
        Ok(h) => {
            report.hermitian = true;
            let eig = h.eig()?;
            report.eigenvalues = Some(eig.eigenvalues.clone());
            match SpdQMatrix::new(h) {
                Ok(_) => report.positive_definite = true,
                Err(e) => report.reason = Some(e.to_string()),
            }
        }
    }
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    if report.positive_definite {
        Ok(())
    } else {
        Err(Failure::Numeric(report.reason.unwrap_or_default()))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sample(args) => run_sample(&args),
        Command::Fit(args) => run_fit(&args),
        Command::Distance { a, b } => {
            let (a, b) = read_pair(&a, &b)?;
            println!("{:?}", distance(&a, &b)?);
            Ok(())
        }
        Command::Geodesic { a, b, t, output } => {
            if !t.is_finite() {
                return Err(usage("--t must be finite"));
            }
            let (a, b) = read_pair(&a, &b)?;
            emit(&geodesic(&a, &b, t)?, output.as_deref())
        }
        Command::Barycenter { samples, descent, output } => {
            let cfg = descent.config();
            cfg.validate()?;
            let samples = io::read_samples(&samples)?;
            if samples.is_empty() {
                return Err(Failure::Format("sample file is empty".into()));
            }
            emit(&barycenter(&samples, &cfg)?.point, output.as_deref())
        }
        Command::TabulatePsi(args) => run_tabulate(&args),
        Command::Check { file } => run_check(&file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            eprintln!("qspd: error[usage]: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, status) = f.code();
            eprintln!("qspd: error[{code}]: {}", f.message().replace('\n', " "));
            ExitCode::from(status)
        }
    }
}
