//! Reproducible sampling: seeded streams, transition oracles, chain
//! simulation, and the matrix ensembles used by the error-scaling
//! experiments.
//!
//! Randomness is ChaCha8 keyed by (seed, stream). Distinct streams with the
//! same seed are independent by the cipher's design, so parallel workers can
//! each own a stream without coordination and results never depend on
//! scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaps;
use crate::linalg;
use crate::markov::{whiten, Distribution, RowStochasticMatrix};

/// A (seed, stream) pair identifying one reproducible random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Draws an index from a finite distribution by inverse CDF: one uniform in
/// [0,1), intervals [c_{i-1}, c_i) closed on the left, the last closed at 1.
pub fn draw_index(weights: &Distribution, rng: &mut dyn RngCore) -> usize {
    let r: f64 = (&mut *rng).gen::<f64>();
    let d = weights.dim();
    let mut acc = 0.0;
    for i in 0..d {
        acc += weights.mass(i);
        if r < acc {
            return i;
        }
    }
    d - 1
}

/// Single-step access to a chain's transition law: the only interface the
/// estimators get. One call consumes exactly one uniform draw.
pub trait TransitionOracle {
    fn dim(&self) -> usize;
    fn step(&self, u: usize, rng: &mut dyn RngCore) -> usize;
}

/// Oracle backed by an explicit transition matrix (inverse-CDF row scan).
#[derive(Debug, Clone)]
pub struct MatrixOracle {
    p: RowStochasticMatrix,
}

impl MatrixOracle {
    pub fn new(p: RowStochasticMatrix) -> Self {
        Self { p }
    }

    pub fn matrix(&self) -> &RowStochasticMatrix {
        &self.p
    }
}

impl TransitionOracle for MatrixOracle {
    fn dim(&self) -> usize {
        self.p.dim()
    }

    fn step(&self, u: usize, rng: &mut dyn RngCore) -> usize {
        let r: f64 = (&mut *rng).gen::<f64>();
        let d = self.p.dim();
        let mut acc = 0.0;
        for v in 0..d {
            acc += self.p.entry(u, v);
            if r < acc {
                return v;
            }
        }
        d - 1
    }
}

/// Where a recorded trajectory came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathProvenance {
    Simulated {
        source: RandomSource,
        initial: String,
    },
    External,
}

/// A recorded trajectory w₀, …, w_n (n transitions, n+1 states).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainPath {
    pub dim: usize,
    pub states: Vec<usize>,
    pub provenance: PathProvenance,
}

impl ChainPath {
    pub fn external(dim: usize, states: Vec<usize>) -> Result<Self> {
        for &s in &states {
            if s >= dim {
                return Err(Error::IndexOutOfRange { index: s, dim });
            }
        }
        Ok(Self {
            dim,
            states,
            provenance: PathProvenance::External,
        })
    }

    /// Number of transitions.
    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }
}

/// Simulates n transitions from initial law ν; consumes exactly n+1 uniform
/// draws (one for the initial state, one per step).
pub fn simulate_chain(
    oracle: &dyn TransitionOracle,
    nu: &Distribution,
    n: usize,
    source: RandomSource,
) -> Result<ChainPath> {
    if nu.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            context: "simulate_chain initial law",
            expected: oracle.dim(),
            got: nu.dim(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidInput("simulate_chain needs n >= 1".into()));
    }
    let mut rng = source.rng();
    let mut states = Vec::with_capacity(n + 1);
    let mut u = draw_index(nu, &mut rng);
    states.push(u);
    for _ in 0..n {
        u = oracle.step(u, &mut rng);
        states.push(u);
    }
    Ok(ChainPath {
        dim: oracle.dim(),
        states,
        provenance: PathProvenance::Simulated {
            source,
            initial: "explicit".into(),
        },
    })
}

/// Random reversible chain: symmetric iid U(0,1) edge weights w(u,v), rows
/// normalized. Returns the chain and its stationary law μ(u) ∝ Σ_v w(u,v),
/// which satisfies detailed balance exactly.
pub fn random_reversible(d: usize, source: RandomSource) -> Result<(RowStochasticMatrix, Distribution)> {
    if d < 2 {
        return Err(Error::InvalidInput(
            "random_reversible needs at least two states".into(),
        ));
    }
    let mut rng = source.rng();
    let mut w = vec![vec![0.0f64; d]; d];
    for u in 0..d {
        for v in u..d {
            let x: f64 = rng.gen::<f64>();
            w[u][v] = x;
            w[v][u] = x;
        }
    }
    let row_sums: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|u| (0..d).map(|v| w[u][v] / row_sums[u]).collect())
        .collect();
    let p = RowStochasticMatrix::new(rows)?;
    let mu = Distribution::from_weights(row_sums)?;
    Ok((p, mu))
}

/// Rescales a reversible chain so its spectral gap is exactly `eta_target`,
/// preserving μ and reversibility. Shrinking the gap mixes toward the
/// identity; widening it mixes toward the rank-one stationary kernel 1μᵀ
/// (possible only when λ₂ > 0).
pub fn adjust_gap(
    p: &RowStochasticMatrix,
    mu: &Distribution,
    eta_target: f64,
) -> Result<RowStochasticMatrix> {
    if !(eta_target > 0.0 && eta_target < 1.0) {
        return Err(Error::InvalidInput(format!(
            "target gap must lie in (0,1), got {eta_target}"
        )));
    }
    if !p.is_reversible(mu, gaps::SPECTRAL_GAP_REVERSIBILITY_TOL) {
        return Err(Error::NotReversible {
            u: 0,
            v: 0,
            residual: p.detailed_balance_residual(mu),
            tol: gaps::SPECTRAL_GAP_REVERSIBILITY_TOL,
        });
    }
    let w = whiten(p.as_matrix(), mu)?;
    let lambda2 = linalg::symmetric_eigenvalues(&w)[1];
    let d = p.dim();
    let mixed = if eta_target <= 1.0 - lambda2 {
        let c = eta_target / (1.0 - lambda2);
        let mut m = p.as_matrix() * c;
        for u in 0..d {
            m[(u, u)] += 1.0 - c;
        }
        m
    } else {
        if lambda2 <= 0.0 {
            return Err(Error::GapUnreachable {
                target: eta_target,
                reason: format!(
                    "second eigenvalue {lambda2} is not positive; cannot widen the gap"
                ),
            });
        }
        let c = (1.0 - eta_target) / lambda2;
        let mut m = p.as_matrix() * c;
        for u in 0..d {
            for v in 0..d {
                m[(u, v)] += (1.0 - c) * mu.mass(v);
            }
        }
        m
    };
    for u in 0..d {
        for v in 0..d {
            if mixed[(u, v)] < 0.0 {
                return Err(Error::GapUnreachable {
                    target: eta_target,
                    reason: format!("mixing produced negative entry at ({u}, {v})"),
                });
            }
        }
    }
    let adjusted = RowStochasticMatrix::from_matrix(mixed)?;
    let achieved = gaps::spectral_gap(&adjusted, mu)?;
    if (achieved - eta_target).abs() > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "adjusted gap {achieved} misses target {eta_target}"
        )));
    }
    Ok(adjusted)
}

/// Lazy directed cycle on n states: stay with probability 1/2, advance with
/// probability 1/2. Irreducible, aperiodic, non-reversible; uniform
/// stationary law. Its ip gap scales like 1/n while the symmetric and
/// absolute gaps scale like 1/n².
pub fn lazy_cycle(n: usize) -> Result<RowStochasticMatrix> {
    if n < 2 {
        return Err(Error::InvalidInput("lazy cycle needs at least 2 states".into()));
    }
    let mut rows = vec![vec![0.0; n]; n];
    for u in 0..n {
        rows[u][u] = 0.5;
        rows[u][(u + 1) % n] = 0.5;
    }
    RowStochasticMatrix::new(rows)
}
