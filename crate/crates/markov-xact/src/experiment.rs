//! Seeded, parallel Monte Carlo sweeps measuring estimator error against
//! the theoretical MSE bounds, with CSV emission.
//!
//! Determinism contract: every record is a pure function of the config.
//! Each trial owns a `RandomSource` whose stream id is assigned by a fixed
//! global enumeration (trial k of base matrix m uses stream `m·trials + k`),
//! so results are identical no matter how a thread pool schedules the work.
//! Base-matrix draws use a reserved stream range starting at 2^48, far above
//! any trial index, so matrix randomness never collides with trial
//! randomness and every (n, method) cell of one (d, η) block sees the same
//! base matrices.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{frobenius_error, mle_estimate, sce_estimate, Method, TransitionEstimate};
use crate::io as fileio;
use crate::markov::{Distribution, RowStochasticMatrix};
use crate::sampling::{adjust_gap, random_reversible, simulate_chain, MatrixOracle, RandomSource};

/// First stream id reserved for base-matrix draws.
pub const MATRIX_STREAM_BASE: u64 = 1 << 48;

/// Environment variable overriding the worker-thread count (0 = automatic).
pub const THREADS_ENV_VAR: &str = "MARKOV_XACT_THREADS";

/// Where base transition matrices come from.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MatrixSource {
    /// The literal string `"random-reversible"`.
    Named(String),
    /// `{"file": "<path>"}`: a fixed reversible matrix in the text format.
    File { file: PathBuf },
}

impl Default for MatrixSource {
    fn default() -> Self {
        MatrixSource::Named("random-reversible".into())
    }
}

/// The initial law ν of each trial's chain.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum InitialLaw {
    /// The literal string `"stationary"` (ν = μ, so ‖ν/μ‖_∞ = 1).
    Named(String),
    /// `{"point_mass": s}`: all mass on state s.
    PointMass { point_mass: usize },
    /// `{"file": "<path>"}`: a distribution in the text format.
    File { file: PathBuf },
}

impl Default for InitialLaw {
    fn default() -> Self {
        InitialLaw::Named("stationary".into())
    }
}

fn default_matrices_per_cell() -> usize {
    1
}

/// Grid description for a Monte Carlo sweep. JSON keys match the field
/// names exactly.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d_values: Vec<usize>,
    pub eta_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub matrix_source: MatrixSource,
    #[serde(default)]
    pub initial: InitialLaw,
    /// Independent base matrices averaged into each (d, η) cell.
    #[serde(default = "default_matrices_per_cell")]
    pub matrices_per_cell: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d_values.is_empty() || self.eta_values.is_empty() || self.n_values.is_empty() {
            return Err(Error::InvalidInput(
                "d_values, eta_values, and n_values must all be nonempty".into(),
            ));
        }
        if let Some(&d) = self.d_values.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidInput(format!(
                "state counts must be at least 2, got {d}"
            )));
        }
        if let Some(&eta) = self
            .eta_values
            .iter()
            .find(|&&eta| !(eta > 0.0 && eta < 1.0))
        {
            return Err(Error::InvalidInput(format!(
                "target gaps must lie in (0,1), got {eta}"
            )));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 1) {
            return Err(Error::InvalidInput(format!(
                "sample counts must be at least 1, got {n}"
            )));
        }
        if self.trials < 1 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.matrices_per_cell < 1 {
            return Err(Error::InvalidInput(
                "matrices_per_cell must be at least 1".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidInput("methods must be nonempty".into()));
        }
        if self.methods.len() > 2 || (self.methods.len() == 2 && self.methods[0] == self.methods[1])
        {
            return Err(Error::InvalidInput("methods must not repeat".into()));
        }
        if let MatrixSource::Named(name) = &self.matrix_source {
            if name != "random-reversible" {
                return Err(Error::InvalidInput(format!(
                    "unknown matrix_source {name:?}; use \"random-reversible\" or {{\"file\": …}}"
                )));
            }
        }
        if let InitialLaw::Named(name) = &self.initial {
            if name != "stationary" {
                return Err(Error::InvalidInput(format!(
                    "unknown initial {name:?}; use \"stationary\", {{\"point_mass\": s}}, or {{\"file\": …}}"
                )));
            }
        }
        Ok(())
    }
}

/// One (method, d, η, n) cell of a sweep.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MseRecord {
    pub method: Method,
    pub d: usize,
    pub eta_target: f64,
    pub n: usize,
    /// Number of squared-error samples averaged (trials × matrices_per_cell).
    pub trials: usize,
    /// Mean squared Frobenius error ‖joint − D_μP‖_F².
    pub mse: f64,
    pub mse_stderr: f64,
    /// Matching theoretical MSE bound at the configured ‖ν/μ‖_∞.
    pub bound: f64,
    pub seed: u64,
}

/// A (d, η) cell abandoned because the gap adjustment failed.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SkippedCell {
    pub d: usize,
    pub eta_target: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseOutcome {
    pub records: Vec<MseRecord>,
    pub skipped: Vec<SkippedCell>,
}

/// MLE/SCE error ratio for one (d, η, n) cell.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RatioRecord {
    pub d: usize,
    pub eta_target: f64,
    pub n: usize,
    pub trials: usize,
    /// MSE(MLE) / MSE(SCE).
    pub ratio: f64,
    /// First-order error propagation of the two cell standard errors.
    pub ratio_stderr: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioOutcome {
    pub records: Vec<RatioRecord>,
    pub skipped: Vec<SkippedCell>,
}

fn build_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV_VAR) {
        let workers: usize = raw.trim().parse().map_err(|_| {
            Error::InvalidInput(format!(
                "{THREADS_ENV_VAR} must be a nonnegative integer, got {raw:?}"
            ))
        })?;
        if workers > 0 {
            builder = builder.num_threads(workers);
        }
    }
    builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool construction failed: {e}")))
}

fn materialize_initial(
    initial: &InitialLaw,
    d: usize,
    mu: &Distribution,
    cached_file: &Option<Distribution>,
) -> Result<Distribution> {
    match initial {
        InitialLaw::Named(_) => Ok(mu.clone()),
        InitialLaw::PointMass { point_mass } => Distribution::point_mass(d, *point_mass),
        InitialLaw::File { .. } => {
            let nu = cached_file
                .as_ref()
                .expect("file-backed initial law loaded during validation")
                .clone();
            if nu.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: "initial-law file",
                    expected: d,
                    got: nu.dim(),
                });
            }
            Ok(nu)
        }
    }
}

struct CellBase {
    p: RowStochasticMatrix,
    mu: Distribution,
}

/// Runs the full (d, η, n, method) grid. Records appear in grid order:
/// d-major, then η, then n, then methods in config order.
pub fn run_mse_experiment(config: &ExperimentConfig) -> Result<MseOutcome> {
    config.validate()?;
    let pool = build_pool()?;

    let file_matrix = match &config.matrix_source {
        MatrixSource::File { file } => Some(fileio::read_matrix_file(file)?),
        MatrixSource::Named(_) => None,
    };
    let file_initial = match &config.initial {
        InitialLaw::File { file } => Some(fileio::read_distribution_file(file)?),
        _ => None,
    };

    let n_eta = config.eta_values.len();
    let per_cell = config.matrices_per_cell;
    let mut records = Vec::new();
    let mut skipped = Vec::new();

    for (d_idx, &d) in config.d_values.iter().enumerate() {
        for (eta_idx, &eta_target) in config.eta_values.iter().enumerate() {
            let mut bases = Vec::with_capacity(per_cell);
            let mut skip_reason = None;
            for m in 0..per_cell {
                let (base_p, base_mu) = match &file_matrix {
                    Some(p) => {
                        if p.dim() != d {
                            return Err(Error::DimensionMismatch {
                                context: "matrix_source file",
                                expected: d,
                                got: p.dim(),
                            });
                        }
                        (p.clone(), p.stationary_distribution()?)
                    }
                    None => {
                        let stream = MATRIX_STREAM_BASE
                            + ((d_idx * n_eta + eta_idx) * per_cell + m) as u64;
                        random_reversible(d, RandomSource::new(config.base_seed, stream))?
                    }
                };
                match adjust_gap(&base_p, &base_mu, eta_target) {
                    Ok(p) => bases.push(CellBase { p, mu: base_mu }),
                    Err(Error::GapUnreachable { reason, .. }) => {
                        skip_reason = Some(reason);
                        break;
                    }
                    Err(other) => return Err(other),
                }
            }
            if let Some(reason) = skip_reason {
                skipped.push(SkippedCell {
                    d,
                    eta_target,
                    reason,
                });
                continue;
            }

            let initials: Vec<Distribution> = bases
                .iter()
                .map(|b| materialize_initial(&config.initial, d, &b.mu, &file_initial))
                .collect::<Result<_>>()?;
            let nu_ratio = initials[0].sup_ratio(&bases[0].mu)?;
            let oracles: Vec<MatrixOracle> =
                bases.iter().map(|b| MatrixOracle::new(b.p.clone())).collect();

            for &n in &config.n_values {
                for &method in &config.methods {
                    let total = per_cell * config.trials;
                    let sq_errors: Vec<f64> = pool.install(|| {
                        (0..total)
                            .into_par_iter()
                            .map(|j| -> Result<f64> {
                                let m = j / config.trials;
                                let source = RandomSource::new(config.base_seed, j as u64);
                                let est: TransitionEstimate = match method {
                                    Method::Mle => {
                                        let path =
                                            simulate_chain(&oracles[m], &initials[m], n, source)?;
                                        mle_estimate(&path)?
                                    }
                                    Method::Sce => {
                                        sce_estimate(&oracles[m], &initials[m], n, source)?
                                    }
                                };
                                let err =
                                    frobenius_error(&est.joint, &bases[m].p, &bases[m].mu)?;
                                Ok(err * err)
                            })
                            .collect::<Result<Vec<f64>>>()
                    })?;

                    let count = sq_errors.len();
                    let mean = sq_errors.iter().sum::<f64>() / count as f64;
                    let stderr = if count > 1 {
                        let ss = sq_errors
                            .iter()
                            .map(|&x| (x - mean) * (x - mean))
                            .sum::<f64>();
                        (ss / (count as f64 - 1.0)).sqrt() / (count as f64).sqrt()
                    } else {
                        0.0
                    };
                    let bound = match method {
                        Method::Mle => crate::bounds::mle_mse_bound(
                            n as u64,
                            eta_target,
                            None,
                            Some(eta_target),
                            nu_ratio,
                        )?,
                        Method::Sce => {
                            crate::bounds::sce_mse_bound(n as u64, eta_target, nu_ratio)?
                        }
                    };
                    records.push(MseRecord {
                        method,
                        d,
                        eta_target,
                        n,
                        trials: count,
                        mse: mean,
                        mse_stderr: stderr,
                        bound,
                        seed: config.base_seed,
                    });
                }
            }
        }
    }
    Ok(MseOutcome { records, skipped })
}

/// Runs the grid with both estimators and reduces each (d, η, n) cell to
/// the ratio MSE(MLE)/MSE(SCE).
pub fn run_ratio_experiment(config: &ExperimentConfig) -> Result<RatioOutcome> {
    if !(config.methods.contains(&Method::Mle) && config.methods.contains(&Method::Sce)) {
        return Err(Error::InvalidInput(
            "ratio experiment needs both methods enabled".into(),
        ));
    }
    let mse = run_mse_experiment(config)?;
    let mut records = Vec::new();
    let mut iter = mse.records.iter();
    while let Some(first) = iter.next() {
        let second = iter.next().ok_or_else(|| {
            Error::InvariantViolation("ratio experiment produced an odd record count".into())
        })?;
        let (rm, rs) = match (first.method, second.method) {
            (Method::Mle, Method::Sce) => (first, second),
            (Method::Sce, Method::Mle) => (second, first),
            _ => {
                return Err(Error::InvariantViolation(
                    "ratio experiment records not paired by method".into(),
                ))
            }
        };
        if rm.mse <= 0.0 || rs.mse <= 0.0 {
            return Err(Error::InvariantViolation(format!(
                "degenerate zero MSE in cell d={}, eta={}, n={}",
                rm.d, rm.eta_target, rm.n
            )));
        }
        let ratio = rm.mse / rs.mse;
        let rel = ((rm.mse_stderr / rm.mse).powi(2) + (rs.mse_stderr / rs.mse).powi(2)).sqrt();
        records.push(RatioRecord {
            d: rm.d,
            eta_target: rm.eta_target,
            n: rm.n,
            trials: rm.trials,
            ratio,
            ratio_stderr: ratio * rel,
            seed: rm.seed,
        });
    }
    Ok(RatioOutcome {
        records,
        skipped: mse.skipped,
    })
}

/// 12-significant-digit scientific notation used in all CSV output.
pub fn format_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Writes the stable CSV schema `method,d,eta,n,trials,mse,mse_stderr,bound,seed`
/// with LF line endings.
pub fn write_mse_csv<W: Write>(mut w: W, records: &[MseRecord]) -> Result<()> {
    w.write_all(b"method,d,eta,n,trials,mse,mse_stderr,bound,seed\n")?;
    for r in records {
        let line = format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.method,
            r.d,
            format_sig12(r.eta_target),
            r.n,
            r.trials,
            format_sig12(r.mse),
            format_sig12(r.mse_stderr),
            format_sig12(r.bound),
            r.seed
        );
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Writes ratio records as CSV: `d,eta,n,trials,ratio,ratio_stderr,seed`.
pub fn write_ratio_csv<W: Write>(mut w: W, records: &[RatioRecord]) -> Result<()> {
    w.write_all(b"d,eta,n,trials,ratio,ratio_stderr,seed\n")?;
    for r in records {
        let line = format!(
            "{},{},{},{},{},{},{}\n",
            r.d,
            format_sig12(r.eta_target),
            r.n,
            r.trials,
            format_sig12(r.ratio),
            format_sig12(r.ratio_stderr),
            r.seed
        );
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Coefficient of determination of the least-squares line through
/// (xs, ys); used to quantify how linear 1/MSE is in n.
pub fn linear_r2(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput(
            "linear_r2 needs two equal-length samples of size >= 2".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InvalidInput(
            "linear_r2 needs nonconstant samples".into(),
        ));
    }
    Ok((sxy * sxy) / (sxx * syy))
}
