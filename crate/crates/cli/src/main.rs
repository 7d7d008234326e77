use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use specfn_core::linalg::read_matrix;
use specfn_core::linalg::random::seeded;
use specfn_core::numrange::{
    c_numerical_radius, c_range_region, classify_condition, k_numerical_radius, q_numerical_radius, q_profile,
    q_range_region, CWeight, QParam,
};
use specfn_core::pseudospec::{pseudo_region, pseudo_spectral_radius, Epsilon};
use specfn_core::region::Region;
use specfn_core::suites::{run_suite, RunConfig, SUITES};
use specfn_core::{CMatrix, Error};

/// Samples used when drawing `W_q(C)` and `W_C(A)`.
const RANGE_SAMPLES: usize = 4000;

#[derive(Parser)]
#[command(name = "specfn", version, about = "Spectral functionals, generalized numerical ranges and their preservers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one functional or draw one region.
    Compute(ComputeArgs),
    /// Run a verification suite and write its JSON report.
    Verify(VerifyArgs),
    /// Sample the q-profile of C and report which condition it satisfies.
    ClassifyC {
        #[arg(long = "C", value_name = "FILE")]
        c: PathBuf,
        /// Number of q values in [0, 1], at least 21.
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    /// Pseudo-spectral radius r_eps(A).
    Psr,
    /// q-numerical radius w_q(C) of the --C matrix.
    Wq,
    /// C-numerical radius w_C(A).
    Wc,
    /// k-numerical radius w_k(A).
    Wk,
    /// Pseudospectrum or range region, written as CSV and SVG.
    Region,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionKind {
    /// sigma_eps(A) from --matrix and --eps.
    Pseudo,
    /// W_q(C) from --C and --q.
    Q,
    /// W_C(A) from --matrix and --C.
    C,
}

#[derive(clap::Args)]
struct ComputeArgs {
    quantity: Quantity,
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
    #[arg(long = "C", value_name = "FILE")]
    c: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = RegionKind::Pseudo)]
    kind: RegionKind,
    /// Grid resolution for regions.
    #[arg(long, default_value_t = 128)]
    grid: usize,
    /// Directory for region.csv and region.svg.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    suite: String,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Comma-separated dimensions, e.g. 3,4,5.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    /// Override a named tolerance, e.g. `--tol tolerance=1e-8`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,
    /// Directory for <suite>.json; the report also goes to stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value: f64 = value.parse().map_err(|e| format!("{value:?}: {e}"))?;
    Ok((name.to_string(), value))
}

fn required<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidParameter(format!("{flag} is required")))
}

fn matrix_arg(path: &Option<PathBuf>, flag: &str) -> Result<CMatrix, Error> {
    let p = path
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter(format!("{flag} is required")))?;
    read_matrix(p)
}

fn write_region(region: &Region, dir: &Path) -> Result<serde_json::Value, Error> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join("region.csv");
    let svg = dir.join("region.svg");
    std::fs::write(&csv, region.to_csv())?;
    std::fs::write(&svg, region.to_svg())?;
    Ok(json!({
        "csv": csv,
        "svg": svg,
        "points": region.points.len(),
        "boundary_vertices": region.boundary_vertices().len(),
    }))
}

fn compute(args: &ComputeArgs) -> Result<serde_json::Value, Error> {
    let mut rng = seeded(args.seed);
    let value = match args.quantity {
        Quantity::Psr => {
            let a = matrix_arg(&args.matrix, "--matrix")?;
            pseudo_spectral_radius(&a, Epsilon::new(required(args.eps, "--eps")?)?)
        }
        Quantity::Wq => {
            let c = matrix_arg(&args.c, "--C")?;
            q_numerical_radius(&c, QParam::new(required(args.q, "--q")?)?, &mut rng)
        }
        Quantity::Wc => {
            let a = matrix_arg(&args.matrix, "--matrix")?;
            let c = CWeight::new(matrix_arg(&args.c, "--C")?);
            let r = c_numerical_radius(&a, &c, &mut rng)?;
            return Ok(json!({ "value": r.value, "exact": r.exact }));
        }
        Quantity::Wk => {
            let a = matrix_arg(&args.matrix, "--matrix")?;
            k_numerical_radius(&a, required(args.k, "--k")?)?
        }
        Quantity::Region => {
            let out = args
                .out
                .as_deref()
                .ok_or_else(|| Error::InvalidParameter("--out is required for regions".into()))?;
            let region = match args.kind {
                RegionKind::Pseudo => {
                    let a = matrix_arg(&args.matrix, "--matrix")?;
                    pseudo_region(&a, Epsilon::new(required(args.eps, "--eps")?)?, args.grid)?
                }
                RegionKind::Q => {
                    let c = matrix_arg(&args.c, "--C")?;
                    let q = QParam::new(required(args.q, "--q")?)?;
                    q_range_region(&c, q, RANGE_SAMPLES, args.grid, &mut rng)?
                }
                RegionKind::C => {
                    let a = matrix_arg(&args.matrix, "--matrix")?;
                    let c = matrix_arg(&args.c, "--C")?;
                    c_range_region(&a, &c, RANGE_SAMPLES, &mut rng)?
                }
            };
            return write_region(&region, out);
        }
    };
    Ok(json!({ "value": value }))
}

fn verify(args: VerifyArgs) -> Result<bool, Error> {
    let cfg = RunConfig {
        dims: args.dims,
        trials: args.trials,
        n: args.n,
        grid: args.grid,
        out_dir: args.out,
        tolerances: args.tolerances.into_iter().collect(),
        ..RunConfig::new(args.seed)
    };
    let result = run_suite(&args.suite, &cfg)?;
    emit(&result.report.to_json());
    eprintln!(
        "{}: {} (max_violation {:.3e}, tolerance {:e}, {:.1}s)",
        result.suite,
        if result.pass { "PASS" } else { "FAIL" },
        result.max_violation,
        result.report.tolerance,
        result.runtime
    );
    Ok(result.pass)
}

fn classify(path: &Path, grid: usize, seed: u64) -> Result<serde_json::Value, Error> {
    let c = read_matrix(path)?;
    let profile = q_profile(&c, grid, &mut seeded(seed))?;
    Ok(json!({
        "condition": classify_condition(&profile).label(),
        "profile": profile,
    }))
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn exit_for(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        Error::Backend(_) => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("SPECFN_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let printed = match cli.command {
        Command::Compute(args) => compute(&args),
        Command::ClassifyC { c, grid, seed } => classify(&c, grid, seed),
        Command::Verify(args) => {
            return match verify(args) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => exit_for(&e),
            }
        }
    };
    match printed {
        Ok(v) => {
            emit(&serde_json::to_string_pretty(&v).expect("json output"));
            ExitCode::SUCCESS
        }
        Err(e) => exit_for(&e),
    }
}
