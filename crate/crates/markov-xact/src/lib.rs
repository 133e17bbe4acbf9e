//! Spectral-gap analysis and reversibility-preserving transition estimation
//! for finite Markov chains.
//!
//! The crate covers four connected capabilities:
//!
//! * **Chain analysis** ([`markov`], [`gaps`]): row-stochastic matrices with
//!   validated construction, stationary distributions solved to 1e-10
//!   residuals, reversibility checks, and five spectral-gap notions — the
//!   classical gap η (reversible chains), the iterated-Poincaré gap η_p
//!   (positive for every irreducible chain), the absolute gap η_a, the
//!   symmetric gap η_s, and the pseudo gap η_ps — plus [`gaps::gap_report`],
//!   which computes all of them and enforces the ordering relations that
//!   must hold between them.
//! * **Length-2 path spaces** ([`path_space`]): the ordered pair kernel P₂,
//!   its reversible folded counterpart P̃₂ on unordered pairs, their
//!   stationary and initial laws, collapse/extend factorizations, and
//!   [`path_space::verify_spectral_identities`], a self-checking suite
//!   relating pair-chain gaps and spectra to the base chain.
//! * **Estimation** ([`sampling`], [`estimate`]): seeded chain simulation
//!   with reproducible stream-indexed randomness, the trajectory-based MLE
//!   of the joint transition mass μ(u)p(u,v), and the symmetric counting
//!   estimator (SCE), an oracle-driven pair walk whose estimate is exactly
//!   symmetric — hence exactly reversible — by construction.
//! * **Bounds and experiments** ([`bounds`], [`experiment`]): closed-form
//!   Bernstein-type tail bounds and MSE bounds for both estimators, their
//!   generic scalar/matrix forms, and a deterministic parallel Monte Carlo
//!   harness that measures empirical MSE against the bounds and writes CSV.
//!
//! # Runnable examples
//!
//! Each major capability has a self-contained example under `examples/`:
//!
//! * `gap_report` — all five gaps for a worked 3-state chain.
//! * `adjust_gap` — retargeting a chain's spectral gap by lazy/teleport mixing.
//! * `lazy_cycle_scaling` — how η_p and η_s scale on lazy cycles.
//! * `path_space_identities` — pair kernels, factorizations, and the
//!   identity-verification report.
//! * `estimate_mle` — estimating from a simulated trajectory.
//! * `estimate_sce` — the symmetric pair walk and its exact detailed balance.
//! * `tail_bounds` — evaluating and comparing the deviation bounds.
//! * `mse_experiment` — a desk-scale sweep reproducing the 1/MSE-linear-in-n
//!   behavior, written as CSV.
//!
//! Run one with `cargo run --release --example gap_report`.
//!
//! The `markov-xact` binary exposes the same surface as subcommands
//! (`gaps`, `verify`, `estimate`, `bound`, `experiment`); see the README.

pub mod bounds;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod gaps;
pub mod io;
mod linalg;
pub mod markov;
pub mod path_space;
pub mod sampling;

pub use bounds::{
    matrix_bernstein_bound, mle_mse_bound, mle_tail_bound, scalar_bernstein_bound, sce_mse_bound,
    sce_tail_bound, BoundInputs, BoundValue,
};
pub use error::{Error, Result};
pub use estimate::{frobenius_error, mle_estimate, sce_estimate, Method, TransitionEstimate};
pub use experiment::{
    run_mse_experiment, run_ratio_experiment, ExperimentConfig, MseOutcome, MseRecord,
    RatioOutcome, RatioRecord,
};
pub use gaps::{
    absolute_gap, gap_report, ip_gap, pseudo_gap, spectral_gap, symmetric_gap, GapReport,
    PseudoGap,
};
pub use markov::{whiten, Distribution, RowStochasticMatrix};
pub use path_space::{
    factor_path_kernel, factor_sym_kernel, pair_initial, pair_stationary, path_kernel,
    sym_pair_initial, sym_pair_stationary, sym_path_kernel, verify_spectral_identities,
    IdentityCheck, IdentityReport,
};
pub use sampling::{
    adjust_gap, lazy_cycle, random_reversible, simulate_chain, ChainPath, MatrixOracle,
    RandomSource, TransitionOracle,
};
