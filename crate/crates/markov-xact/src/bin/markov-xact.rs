//! Command-line front end: spectral gaps, identity verification, transition
//! estimation, bound evaluation, and Monte Carlo sweeps.
//!
//! Exit codes: 0 success, 1 validation failure, 2 verification failure.
//! Failures print one machine-readable line `ERROR <code>: <message>` on
//! standard error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use markov_xact::bounds;
use markov_xact::error::Error;
use markov_xact::estimate::{mle_estimate, sce_estimate, Method};
use markov_xact::experiment::{
    run_mse_experiment, run_ratio_experiment, write_mse_csv, write_ratio_csv, SkippedCell,
};
use markov_xact::gaps::gap_report;
use markov_xact::io as fileio;
use markov_xact::markov::{Distribution, RowStochasticMatrix};
use markov_xact::path_space::verify_spectral_identities;
use markov_xact::sampling::{simulate_chain, MatrixOracle, RandomSource};

#[derive(Parser)]
#[command(
    name = "markov-xact",
    version,
    about = "Spectral gaps, path-space identity verification, transition estimation, \
             deviation bounds, and Monte Carlo experiments for finite Markov chains"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute all spectral gaps of a chain; prints a JSON report
    Gaps {
        /// Matrix file: first line d, then d rows of d numbers
        matrix: PathBuf,
        /// Largest power scanned for the pseudo spectral gap
        #[arg(long, default_value_t = 32)]
        kmax: usize,
        /// Write the report here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the spectral and law identities tying a chain to its pair chains
    Verify {
        matrix: PathBuf,
        /// Tolerance for the spectral comparisons
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the joint transition mass mu(u)p(u,v)
    Estimate(EstimateArgs),
    /// Evaluate a deviation bound (with --t) or an MSE bound (without --t)
    Bound(BoundArgs),
    /// Run a seeded Monte Carlo sweep from a JSON config; writes CSV
    Experiment {
        /// JSON config: d_values, eta_values, n_values, trials, base_seed,
        /// methods, and optionally matrix_source, initial, matrices_per_cell
        #[arg(long)]
        config: PathBuf,
        /// Emit per-cell MSE(MLE)/MSE(SCE) ratios instead of MSE records
        #[arg(long)]
        ratio: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EstimateArgs {
    /// mle or sce
    #[arg(long)]
    method: String,
    /// Recorded trajectory file (MLE only): first token d, then state indices
    #[arg(long)]
    path: Option<PathBuf>,
    /// Transition matrix file; the chain is simulated internally
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Number of samples to draw (required with --matrix)
    #[arg(long)]
    n: Option<usize>,
    /// RNG seed for internal simulation
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial law: "stationary" (default), "point-mass:S", or a
    /// distribution file path
    #[arg(long, default_value = "stationary")]
    initial: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// mle | sce | scalar | matrix
    #[arg(long)]
    method: String,
    /// Sample count
    #[arg(long)]
    n: u64,
    /// Deviation level; selects the tail bound (omit for the MSE bound)
    #[arg(long)]
    t: Option<f64>,
    /// The relevant gap: iterated-Poincare gap for mle/scalar, spectral gap
    /// for sce, absolute gap for matrix
    #[arg(long)]
    gap: f64,
    /// Variance proxy; for --method mle this is the pair mass mu(u)p(u,v)
    #[arg(long)]
    sigma2: Option<f64>,
    /// Sup bound on the observable (scalar/matrix forms)
    #[arg(long = "M")]
    m_range: Option<f64>,
    /// State count (sce/matrix forms)
    #[arg(long)]
    d: Option<usize>,
    /// Density ratio sup of initial law over stationary law
    #[arg(long = "nu-ratio", default_value_t = 1.0)]
    nu_ratio: f64,
    /// Use the reversible-chain form of the MLE MSE bound, reading --gap as
    /// the spectral gap
    #[arg(long, default_value_t = false)]
    reversible: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: String,
    message: String,
    exit: i32,
}

impl Failure {
    fn invalid(code: &str, message: impl Into<String>) -> Self {
        Failure {
            code: code.into(),
            message: message.into(),
            exit: 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NotSquare { .. } => "not_square",
            Error::NegativeEntry { .. } => "negative_entry",
            Error::RowSumViolation { .. } => "row_sum_violation",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotIrreducible => "not_irreducible",
            Error::NotReversible { .. } => "not_reversible",
            Error::ZeroStationaryMass { .. } => "zero_stationary_mass",
            Error::GapUnreachable { .. } => "gap_unreachable",
            Error::PathTooShort { .. } => "path_too_short",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::NotAProbability { .. } => "not_a_probability",
            Error::InvalidInput(_) => "invalid_input",
            Error::InvariantViolation(_) => "invariant_violation",
            Error::Io(_) => "io_error",
            Error::Parse(_) => "parse_error",
            Error::Json(_) => "parse_error",
        };
        let exit = match &e {
            Error::InvariantViolation(_) => 2,
            _ => 1,
        };
        Failure {
            code: code.into(),
            message: e.to_string(),
            exit,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {}
        Err(f) => {
            eprintln!("ERROR {}: {}", f.code, f.message);
            std::process::exit(f.exit);
        }
    }
}

/// Writes `content` to `--out` when given, standard output otherwise.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| Failure::from(Error::Io(e))),
        None => {
            print!("{content}");
            std::io::stdout()
                .flush()
                .map_err(|e| Failure::from(Error::Io(e)))
        }
    }
}

fn warn_skipped(skipped: &[SkippedCell]) {
    for s in skipped {
        eprintln!(
            "WARN skipped cell d={} eta={}: {}",
            s.d, s.eta_target, s.reason
        );
    }
}

fn read_initial(
    choice: &str,
    p: &RowStochasticMatrix,
) -> Result<Distribution, Failure> {
    if choice == "stationary" {
        return Ok(p.stationary_distribution()?);
    }
    if let Some(state) = choice.strip_prefix("point-mass:") {
        let s: usize = state.parse().map_err(|_| {
            Failure::invalid(
                "invalid_input",
                format!("point-mass state must be an integer, got {state:?}"),
            )
        })?;
        return Ok(Distribution::point_mass(p.dim(), s)?);
    }
    let nu = fileio::read_distribution_file(Path::new(choice))?;
    if nu.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            context: "initial-law file",
            expected: p.dim(),
            got: nu.dim(),
        }
        .into());
    }
    Ok(nu)
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Gaps { matrix, kmax, out } => {
            let p = fileio::read_matrix_file(&matrix)?;
            let report = gap_report(&p, kmax)?;
            let json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
            emit(&out, &format!("{json}\n"))
        }
        Cmd::Verify { matrix, tol, out } => {
            if !(tol > 0.0) {
                return Err(Failure::invalid("invalid_input", "--tol must be positive"));
            }
            let p = fileio::read_matrix_file(&matrix)?;
            let report = verify_spectral_identities(&p, tol)?;
            let mut text = String::new();
            for c in &report.checks {
                text.push_str(&format!(
                    "{} {} error={:.3e} tol={:.1e}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.error,
                    c.tol
                ));
            }
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            text.push_str(&format!(
                "{}: {} checks, {} failed (dim={}, reversible={})\n",
                if failed == 0 { "OK" } else { "FAILED" },
                report.checks.len(),
                failed,
                report.dim,
                report.reversible
            ));
            emit(&out, &text)?;
            if failed > 0 {
                return Err(Failure {
                    code: "verification_failed".into(),
                    message: format!("{failed} identity checks failed"),
                    exit: 2,
                });
            }
            Ok(())
        }
        Cmd::Estimate(args) => run_estimate(args),
        Cmd::Bound(args) => run_bound(args),
        Cmd::Experiment { config, ratio, out } => {
            let cfg = fileio::load_config(&config).map_err(|e| match &e {
                Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => Failure {
                    code: "config_not_found".into(),
                    message: format!("{}: {io}", config.display()),
                    exit: 1,
                },
                _ => Failure::from(e),
            })?;
            let mut buf = Vec::new();
            if ratio {
                let outcome = run_ratio_experiment(&cfg)?;
                warn_skipped(&outcome.skipped);
                write_ratio_csv(&mut buf, &outcome.records)?;
            } else {
                let outcome = run_mse_experiment(&cfg)?;
                warn_skipped(&outcome.skipped);
                write_mse_csv(&mut buf, &outcome.records)?;
            }
            let text = String::from_utf8(buf)
                .map_err(|e| Failure::invalid("invalid_input", e.to_string()))?;
            emit(&out, &text)
        }
    }
}

fn run_estimate(args: EstimateArgs) -> Result<(), Failure> {
    let method: Method = args.method.parse()?;
    let est = match (method, &args.path, &args.matrix) {
        (Method::Mle, Some(path_file), None) => {
            let path = fileio::read_path_file(path_file)?;
            mle_estimate(&path)?
        }
        (Method::Mle, None, Some(matrix_file)) => {
            let p = fileio::read_matrix_file(matrix_file)?;
            let n = args.n.ok_or_else(|| {
                Failure::invalid("invalid_input", "--matrix needs --n (sample count)")
            })?;
            let nu = read_initial(&args.initial, &p)?;
            let oracle = MatrixOracle::new(p);
            let path = simulate_chain(&oracle, &nu, n, RandomSource::new(args.seed, 0))?;
            mle_estimate(&path)?
        }
        (Method::Sce, None, Some(matrix_file)) => {
            let p = fileio::read_matrix_file(matrix_file)?;
            let n = args.n.ok_or_else(|| {
                Failure::invalid("invalid_input", "--matrix needs --n (sample count)")
            })?;
            let nu = read_initial(&args.initial, &p)?;
            let oracle = MatrixOracle::new(p);
            sce_estimate(&oracle, &nu, n, RandomSource::new(args.seed, 0))?
        }
        (Method::Sce, Some(_), _) => {
            return Err(Failure::invalid(
                "invalid_input",
                "sce estimation runs its own pair walk and cannot use --path; \
                 pass --matrix and --n",
            ));
        }
        (Method::Mle, Some(_), Some(_)) => {
            return Err(Failure::invalid(
                "invalid_input",
                "pass either --path or --matrix, not both",
            ));
        }
        (_, None, None) => {
            return Err(Failure::invalid(
                "invalid_input",
                "estimate needs an input: --path (mle) or --matrix with --n",
            ));
        }
    };
    // External paths carry no seed; the header records seed=0 for them.
    let header_seed = if args.path.is_some() { 0 } else { args.seed };
    let mut buf = Vec::new();
    fileio::write_estimate(&mut buf, &est, header_seed)?;
    let text =
        String::from_utf8(buf).map_err(|e| Failure::invalid("invalid_input", e.to_string()))?;
    emit(&args.out, &text)
}

fn run_bound(args: BoundArgs) -> Result<(), Failure> {
    let need = |opt: Option<f64>, flag: &str, method: &str| {
        opt.ok_or_else(|| {
            Failure::invalid(
                "invalid_input",
                format!("--method {method} needs {flag}"),
            )
        })
    };
    let need_d = |opt: Option<usize>, method: &str| {
        opt.ok_or_else(|| {
            Failure::invalid("invalid_input", format!("--method {method} needs --d"))
        })
    };

    enum Eval {
        Tail(bounds::BoundValue),
        Mse(f64),
    }

    let eval = match (args.method.as_str(), args.t) {
        ("mle", Some(t)) => {
            let mu2 = need(args.sigma2, "--sigma2 (the pair mass mu(u)p(u,v))", "mle")?;
            Eval::Tail(bounds::mle_tail_bound(
                args.n,
                args.gap,
                mu2,
                t,
                args.nu_ratio,
            )?)
        }
        ("mle", None) => {
            let eta = if args.reversible { Some(args.gap) } else { None };
            Eval::Mse(bounds::mle_mse_bound(
                args.n,
                args.gap,
                None,
                eta,
                args.nu_ratio,
            )?)
        }
        ("sce", Some(t)) => {
            let d = need_d(args.d, "sce")?;
            Eval::Tail(bounds::sce_tail_bound(args.n, args.gap, d, t, args.nu_ratio)?)
        }
        ("sce", None) => Eval::Mse(bounds::sce_mse_bound(args.n, args.gap, args.nu_ratio)?),
        ("scalar", Some(t)) => {
            let sigma2 = need(args.sigma2, "--sigma2", "scalar")?;
            let m = need(args.m_range, "--M", "scalar")?;
            Eval::Tail(bounds::scalar_bernstein_bound(
                args.n,
                args.gap,
                sigma2,
                m,
                t,
                args.nu_ratio,
            )?)
        }
        ("matrix", Some(t)) => {
            let sigma2 = need(args.sigma2, "--sigma2", "matrix")?;
            let m = need(args.m_range, "--M", "matrix")?;
            let d = need_d(args.d, "matrix")?;
            Eval::Tail(bounds::matrix_bernstein_bound(
                args.n,
                args.gap,
                sigma2,
                m,
                d,
                t,
                args.nu_ratio,
            )?)
        }
        ("scalar" | "matrix", None) => {
            return Err(Failure::invalid(
                "invalid_input",
                "the generic Bernstein forms are tail bounds and need --t",
            ));
        }
        (other, _) => {
            return Err(Failure::invalid(
                "invalid_input",
                format!("unknown bound method {other:?}; use mle, sce, scalar, or matrix"),
            ));
        }
    };

    let value = match eval {
        Eval::Tail(b) => {
            if b.vacuous {
                eprintln!("WARN vacuous bound: the relevant gap is zero, so the bound is 1");
            }
            b.value
        }
        Eval::Mse(v) => v,
    };
    emit(&args.out, &format!("{value:.5e}\n"))
}
