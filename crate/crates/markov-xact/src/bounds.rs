//! Non-asymptotic deviation and MSE bounds for the two estimators.
//!
//! The tail bounds are Bernstein-type: a general scalar form driven by the
//! ip gap of the sampled chain, and a general matrix form driven by the
//! absolute gap. The estimator-specific bounds are exact specializations:
//!
//! * entrywise MLE tail = scalar form at gap η_p/(1+η_p), variance proxy
//!   μ(u)p(u,v), range M = 1;
//! * operator-norm SCE tail = matrix form at gap η/2, σ² = M = 2 (the folded
//!   pair chain mixes at half the base rate, and folded indicators have
//!   range and variance 2).
//!
//! All tail bounds are probabilities and are clamped to [0, 1]. A zero gap
//! makes a tail bound vacuous: the value is 1 and the `vacuous` flag is set,
//! instead of failing, so parameter sweeps keep going. π-derived constants
//! are computed from `std::f64::consts::PI`, never hard-coded decimals.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A tail-bound evaluation: a probability plus a flag marking the zero-gap
/// (information-free) case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub value: f64,
    pub vacuous: bool,
}

impl BoundValue {
    fn clamped(raw: f64) -> Self {
        Self {
            value: raw.min(1.0),
            vacuous: false,
        }
    }

    fn vacuous() -> Self {
        Self {
            value: 1.0,
            vacuous: true,
        }
    }
}

/// Aggregate of every input any bound evaluator can need; the CLI populates
/// one of these from flags and dispatches.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs {
    pub n: u64,
    pub t: f64,
    /// The relevant gap: ip gap for the scalar/MLE forms, spectral gap for
    /// the SCE form, absolute gap for the matrix form.
    pub eta: f64,
    pub sigma2: f64,
    pub m_range: f64,
    pub d: usize,
    pub nu_ratio: f64,
    /// Pair mass μ(u)p(u,v) for the entrywise MLE bound.
    pub mu2_uv: f64,
}

fn check_common(n: u64, nu_ratio: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidInput("bounds need n >= 1".into()));
    }
    if !(nu_ratio >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "nu_ratio must be >= 1, got {nu_ratio}"
        )));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!(
            "deviation level t must be positive, got {t}"
        )));
    }
    Ok(())
}

fn check_gap(eta: f64, what: &str) -> Result<()> {
    if !(0.0..=2.0).contains(&eta) {
        return Err(Error::InvalidInput(format!(
            "{what} must lie in [0,2], got {eta}"
        )));
    }
    Ok(())
}

/// General scalar Bernstein tail for additive functionals observed through
/// a chain with ip gap `eta_p`, variance proxy `sigma2`, range `m_range`:
/// P{|mean − target| ≥ t} ≤ 2·nu_ratio·exp(−n·η_p·t² / (4M·√((2+6η_p)²σ² + t²))).
pub fn scalar_bernstein_bound(
    n: u64,
    eta_p: f64,
    sigma2: f64,
    m_range: f64,
    t: f64,
    nu_ratio: f64,
) -> Result<BoundValue> {
    check_common(n, nu_ratio)?;
    check_t(t)?;
    check_gap(eta_p, "ip gap")?;
    if !(sigma2 >= 0.0) || !(m_range > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need sigma2 >= 0 and M > 0, got sigma2={sigma2}, M={m_range}"
        )));
    }
    if eta_p == 0.0 {
        return Ok(BoundValue::vacuous());
    }
    let g = eta_p;
    let denom = 4.0 * m_range * ((2.0 + 6.0 * g).powi(2) * sigma2 + t * t).sqrt();
    let raw = 2.0 * nu_ratio * (-(n as f64 * g * t * t) / denom).exp();
    Ok(BoundValue::clamped(raw))
}

/// Entrywise MLE tail: P{|r_n(u,v) − μ(u)p(u,v)| ≥ t}. `eta_p` is the ip gap
/// of the sampled chain; the effective gap of the pair chain is
/// γ = η_p/(1+η_p) and the variance proxy is the pair mass itself.
pub fn mle_tail_bound(
    n: u64,
    eta_p: f64,
    mu2_uv: f64,
    t: f64,
    nu_ratio: f64,
) -> Result<BoundValue> {
    check_common(n, nu_ratio)?;
    check_t(t)?;
    check_gap(eta_p, "ip gap")?;
    if !(0.0..=1.0).contains(&mu2_uv) {
        return Err(Error::InvalidInput(format!(
            "pair mass must lie in [0,1], got {mu2_uv}"
        )));
    }
    if eta_p == 0.0 {
        return Ok(BoundValue::vacuous());
    }
    let g = eta_p / (1.0 + eta_p);
    let denom = 4.0 * 1.0 * ((2.0 + 6.0 * g).powi(2) * mu2_uv + t * t).sqrt();
    let raw = 2.0 * nu_ratio * (-(n as f64 * g * t * t) / denom).exp();
    Ok(BoundValue::clamped(raw))
}

/// General matrix Bernstein tail for sums of matrix observables with
/// operator-norm range `m_range` and variance proxy `sigma2`, observed
/// through a chain with absolute gap `eta_a`:
/// P{‖mean − target‖ ≥ t} ≤ 2·nu_ratio·d^{2−π/4}·
///   exp(−n·η_a·t² / (32π⁻²(2−η_a)σ² + 256π⁻³Mt)).
pub fn matrix_bernstein_bound(
    n: u64,
    eta_a: f64,
    sigma2: f64,
    m_range: f64,
    d: usize,
    t: f64,
    nu_ratio: f64,
) -> Result<BoundValue> {
    check_common(n, nu_ratio)?;
    check_t(t)?;
    check_gap(eta_a, "absolute gap")?;
    if d < 1 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    if !(sigma2 >= 0.0) || !(m_range > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need sigma2 >= 0 and M > 0, got sigma2={sigma2}, M={m_range}"
        )));
    }
    if eta_a == 0.0 {
        return Ok(BoundValue::vacuous());
    }
    let denom = 32.0 / (PI * PI) * (2.0 - eta_a) * sigma2 + 256.0 / (PI * PI * PI) * m_range * t;
    let dims = (d as f64).powf(2.0 - PI / 4.0);
    let raw = 2.0 * nu_ratio * dims * (-(n as f64 * eta_a * t * t) / denom).exp();
    Ok(BoundValue::clamped(raw))
}

/// Operator-norm SCE tail: P{‖H_n − D_μP‖ ≥ t} for a reversible chain with
/// spectral gap `eta`.
pub fn sce_tail_bound(n: u64, eta: f64, d: usize, t: f64, nu_ratio: f64) -> Result<BoundValue> {
    check_common(n, nu_ratio)?;
    check_t(t)?;
    check_gap(eta, "spectral gap")?;
    if d < 1 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    if eta == 0.0 {
        return Ok(BoundValue::vacuous());
    }
    let denom = 128.0 / (PI * PI) * (2.0 - eta / 2.0) + 1024.0 / (PI * PI * PI) * t;
    let dims = (d as f64).powf(2.0 - PI / 4.0);
    let raw = 2.0 * nu_ratio * dims * (-(n as f64 * eta * t * t) / denom).exp();
    Ok(BoundValue::clamped(raw))
}

/// MSE bound for the MLE joint estimate: nu_ratio times the smallest
/// applicable of (4+η_p)/(nη_p), (2+η_a)/(nη_a) when η_a > 0, and
/// (2+η)/(nη) when the chain is reversible with spectral gap η.
pub fn mle_mse_bound(
    n: u64,
    eta_p: f64,
    eta_a: Option<f64>,
    eta: Option<f64>,
    nu_ratio: f64,
) -> Result<f64> {
    check_common(n, nu_ratio)?;
    if !(eta_p > 0.0 && eta_p <= 2.0) {
        return Err(Error::InvalidInput(format!(
            "ip gap must lie in (0,2], got {eta_p}"
        )));
    }
    let nf = n as f64;
    let mut best = (4.0 + eta_p) / (nf * eta_p);
    if let Some(a) = eta_a {
        check_gap(a, "absolute gap")?;
        if a > 0.0 {
            best = best.min((2.0 + a) / (nf * a));
        }
    }
    if let Some(e) = eta {
        if !(e > 0.0 && e <= 2.0) {
            return Err(Error::InvalidInput(format!(
                "spectral gap must lie in (0,2], got {e}"
            )));
        }
        best = best.min((2.0 + e) / (nf * e));
    }
    Ok(nu_ratio * best)
}

/// MSE bound for the SCE joint estimate of a reversible chain with spectral
/// gap `eta`: nu_ratio·(4−η)/(nη).
pub fn sce_mse_bound(n: u64, eta: f64, nu_ratio: f64) -> Result<f64> {
    check_common(n, nu_ratio)?;
    if !(eta > 0.0 && eta <= 2.0) {
        return Err(Error::InvalidInput(format!(
            "spectral gap must lie in (0,2], got {eta}"
        )));
    }
    Ok(nu_ratio * (4.0 - eta) / (n as f64 * eta))
}
