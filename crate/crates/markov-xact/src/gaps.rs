//! Five spectral-gap functionals of an irreducible chain, all expressed in
//! the μ-weighted geometry.
//!
//! For a chain P with stationary law μ, write Π = 1μᵀ for the rank-one
//! projector onto constants and ‖·‖ for the L_{2,μ} operator norm.
//!
//! * spectral gap η = 1 − λ₂ of the whitened chain; reversible chains only.
//! * interval-projection gap η_p = min ‖(I−P)h‖_μ/‖h‖_μ over mean-zero h.
//! * absolute gap η_a = 1 − ‖P − Π‖; in [0, 1] for every chain.
//! * symmetric gap η_s = 1 − λ₂ of the whitened additive symmetrization.
//! * pseudo gap η_ps = max_{k ≤ k_max} (1 − ‖P^k − Π‖²)/k.
//!
//! These obey η_p ≥ η_s ≥ η_a and η_p ≥ η_ps/2; for reversible chains
//! η = η_p = η_s, and irreducibility alone forces η_p ≥ η_s > 0 even for
//! periodic chains (where η_a = 0).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::markov::{whiten, Distribution, RowStochasticMatrix, DEFAULT_REVERSIBILITY_TOL};

/// Tolerance used by `spectral_gap` when checking its reversibility
/// precondition.
pub const SPECTRAL_GAP_REVERSIBILITY_TOL: f64 = 1e-9;

/// Tolerance below which the pseudo-gap term sequence counts as all-zero.
pub const PSEUDO_GAP_ZERO_TOL: f64 = 1e-12;

/// Slack allowed when cross-checking the gap-ordering relations inside
/// `gap_report`.
pub const GAP_ORDERING_TOL: f64 = 1e-9;

/// Default truncation depth for the pseudo gap.
pub const DEFAULT_PSEUDO_GAP_KMAX: usize = 32;

fn check_dims(p: &RowStochasticMatrix, mu: &Distribution) -> Result<()> {
    if p.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            context: "gap computation",
            expected: p.dim(),
            got: mu.dim(),
        });
    }
    if p.dim() < 2 {
        return Err(Error::InvalidInput(
            "gap functionals need at least two states".into(),
        ));
    }
    Ok(())
}

fn sqrt_mu_unit(mu: &Distribution) -> nalgebra::DVector<f64> {
    let v = nalgebra::DVector::from_iterator(mu.dim(), (0..mu.dim()).map(|u| mu.mass(u).sqrt()));
    // ‖√μ‖₂ = 1 up to rounding; normalize so the reflector is exact.
    let n = v.norm();
    v / n
}

fn rank_one_stationary(mu: &Distribution) -> nalgebra::DMatrix<f64> {
    let d = mu.dim();
    nalgebra::DMatrix::from_fn(d, d, |_, v| mu.mass(v))
}

/// Classical spectral gap 1 − λ₂ of a reversible chain. The whitened chain is
/// symmetric; λ₂ is its second-largest eigenvalue.
pub fn spectral_gap(p: &RowStochasticMatrix, mu: &Distribution) -> Result<f64> {
    check_dims(p, mu)?;
    reversibility_guard(p, mu, SPECTRAL_GAP_REVERSIBILITY_TOL)?;
    let w = whiten(p.as_matrix(), mu)?;
    let ev = linalg::symmetric_eigenvalues(&w);
    Ok(1.0 - ev[1])
}

fn reversibility_guard(p: &RowStochasticMatrix, mu: &Distribution, tol: f64) -> Result<()> {
    let res = p.detailed_balance_residual(mu);
    if res > tol {
        let d = p.dim();
        let mut at = (0, 1);
        let mut worst = 0.0;
        for u in 0..d {
            for v in (u + 1)..d {
                let r = (mu.mass(u) * p.entry(u, v) - mu.mass(v) * p.entry(v, u)).abs();
                if r > worst {
                    worst = r;
                    at = (u, v);
                }
            }
        }
        return Err(Error::NotReversible {
            u: at.0,
            v: at.1,
            residual: worst,
            tol,
        });
    }
    Ok(())
}

/// Interval-projection gap: the smallest singular value of the whitened
/// I − P compressed to the orthogonal complement of √μ. Strictly positive
/// for every irreducible chain, periodic or not.
pub fn ip_gap(p: &RowStochasticMatrix, mu: &Distribution) -> Result<f64> {
    check_dims(p, mu)?;
    let d = p.dim();
    let mut i_minus_p = -p.as_matrix().clone();
    for u in 0..d {
        i_minus_p[(u, u)] += 1.0;
    }
    let w = whiten(&i_minus_p, mu)?;
    let projected = linalg::project_complement(&w, &sqrt_mu_unit(mu));
    Ok(linalg::smallest_singular_value(&projected))
}

/// Absolute gap 1 − ‖P − Π‖. The norm is at most 1 for every chain, so the
/// result lies in [0, 1]; it vanishes exactly on periodic chains.
pub fn absolute_gap(p: &RowStochasticMatrix, mu: &Distribution) -> Result<f64> {
    check_dims(p, mu)?;
    let centered = p.as_matrix() - rank_one_stationary(mu);
    let w = whiten(&centered, mu)?;
    let sigma = linalg::largest_singular_value(&w);
    Ok((1.0 - sigma).max(0.0))
}

/// Symmetric gap 1 − λ₂((W + Wᵀ)/2) with W the whitened chain; equals the
/// spectral gap of the additive reversibilization.
pub fn symmetric_gap(p: &RowStochasticMatrix, mu: &Distribution) -> Result<f64> {
    check_dims(p, mu)?;
    let w = whiten(p.as_matrix(), mu)?;
    let ev = linalg::symmetric_eigenvalues(&w);
    Ok(1.0 - ev[1])
}

/// Result of the truncated pseudo-gap maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PseudoGap {
    pub value: f64,
    pub argmax_k: usize,
    /// True when the running maximum is still attained at k_max, signaling
    /// that the untruncated supremum may lie beyond the truncation.
    pub truncated: bool,
}

/// Pseudo gap max_{1 ≤ k ≤ k_max} (1 − ‖P^k − Π‖²)/k. An all-zero term
/// sequence (every power still at norm 1, e.g. periodic chains) reports
/// value 0 at k = 1, untruncated, by convention.
pub fn pseudo_gap(p: &RowStochasticMatrix, mu: &Distribution, k_max: usize) -> Result<PseudoGap> {
    check_dims(p, mu)?;
    if k_max == 0 {
        return Err(Error::InvalidInput("pseudo gap needs k_max >= 1".into()));
    }
    let pi = rank_one_stationary(mu);
    let d = p.dim();
    let mut power = nalgebra::DMatrix::<f64>::identity(d, d);
    let mut best = f64::NEG_INFINITY;
    let mut best_k = 1;
    for k in 1..=k_max {
        power = &power * p.as_matrix();
        let w = whiten(&(&power - &pi), mu)?;
        let sigma = linalg::largest_singular_value(&w);
        let term = (1.0 - sigma * sigma) / k as f64;
        if term > best {
            best = term;
            best_k = k;
        }
    }
    if best <= PSEUDO_GAP_ZERO_TOL {
        return Ok(PseudoGap {
            value: 0.0,
            argmax_k: 1,
            truncated: false,
        });
    }
    Ok(PseudoGap {
        value: best,
        argmax_k: best_k,
        truncated: best_k == k_max,
    })
}

/// All five gaps of one chain, plus the flags needed to interpret them.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    /// Spectral gap; present only when the chain is reversible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    pub eta_p: f64,
    pub eta_a: f64,
    pub eta_s: f64,
    pub eta_ps: f64,
    pub eta_ps_argmax_k: usize,
    pub eta_ps_truncated: bool,
    pub reversible: bool,
    pub irreducible: bool,
}

/// Computes every gap of an irreducible chain and cross-checks the ordering
/// relations before returning.
pub fn gap_report(p: &RowStochasticMatrix, k_max: usize) -> Result<GapReport> {
    if !p.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let mu = p.stationary_distribution()?;
    let reversible = p.is_reversible(&mu, DEFAULT_REVERSIBILITY_TOL);
    let eta = if reversible {
        Some(spectral_gap(p, &mu)?)
    } else {
        None
    };
    let eta_p = ip_gap(p, &mu)?;
    let eta_a = absolute_gap(p, &mu)?;
    let eta_s = symmetric_gap(p, &mu)?;
    let ps = pseudo_gap(p, &mu, k_max)?;
    let report = GapReport {
        eta,
        eta_p,
        eta_a,
        eta_s,
        eta_ps: ps.value,
        eta_ps_argmax_k: ps.argmax_k,
        eta_ps_truncated: ps.truncated,
        reversible,
        irreducible: true,
    };
    enforce_orderings(&report)?;
    Ok(report)
}

fn enforce_orderings(r: &GapReport) -> Result<()> {
    let t = GAP_ORDERING_TOL;
    let fail = |msg: String| Err(Error::InvariantViolation(msg));
    if r.eta_p < r.eta_s - t {
        return fail(format!("eta_p {} < eta_s {}", r.eta_p, r.eta_s));
    }
    if r.eta_s < r.eta_a - t {
        return fail(format!("eta_s {} < eta_a {}", r.eta_s, r.eta_a));
    }
    if r.eta_p < r.eta_ps / 2.0 - t {
        return fail(format!("eta_p {} < eta_ps/2 {}", r.eta_p, r.eta_ps / 2.0));
    }
    if !(r.eta_a >= 0.0 && r.eta_a <= 1.0) {
        return fail(format!("eta_a {} outside [0,1]", r.eta_a));
    }
    if r.irreducible && !(r.eta_p > 0.0 && r.eta_s > 0.0) {
        return fail(format!(
            "irreducible chain with eta_p {} or eta_s {} not positive",
            r.eta_p, r.eta_s
        ));
    }
    if let Some(eta) = r.eta {
        if (eta - r.eta_p).abs() > t || (eta - r.eta_s).abs() > t {
            return fail(format!(
                "reversible chain with eta {} eta_p {} eta_s {}",
                eta, r.eta_p, r.eta_s
            ));
        }
    }
    Ok(())
}
