//! Transition-mass estimators driven by single-step oracle access.
//!
//! Both estimators target the joint transition mass D_μP, i.e. the matrix
//! μ(u)p(u,v), not P itself; dividing the estimated joint mass by its row
//! sums recovers a transition matrix estimate.
//!
//! * Natural counting (MLE): run one trajectory of n transitions and count
//!   ordered pairs, weight 1/n each.
//! * Symmetric counting (SCE): walk on unordered pairs — at each step flip a
//!   fair coin to decide which endpoint to refresh through the oracle — and
//!   count each visited pair into both ordered slots, weight 1/(2n). The
//!   accumulated joint matrix is symmetric by construction, so the recovered
//!   transition estimate satisfies detailed balance with respect to its own
//!   row sums exactly: the identity μ̂(u)p̂(u,v) = ĥ(u,v) = ĥ(v,u) =
//!   μ̂(v)p̂(v,u) holds at the level of the underlying integer counts.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::{Distribution, RowStochasticMatrix};
use crate::sampling::{draw_index, ChainPath, RandomSource, TransitionOracle};

/// Which estimator produced a `TransitionEstimate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MLE")]
    Mle,
    #[serde(rename = "SCE")]
    Sce,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Mle => "MLE",
            Method::Sce => "SCE",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mle" => Ok(Method::Mle),
            "sce" => Ok(Method::Sce),
            other => Err(Error::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

/// Output of an estimator run.
#[derive(Debug, Clone)]
pub struct TransitionEstimate {
    pub method: Method,
    /// Number of samples n (transitions for MLE, pair-walk steps for SCE).
    pub n: usize,
    /// Estimated joint transition mass; entries sum to 1.
    pub joint: DMatrix<f64>,
    /// Row sums of `joint`: the estimated stationary law.
    pub mu_hat: Distribution,
    /// Row-normalized `joint`; unvisited rows fall back to the uniform row.
    pub p_hat: RowStochasticMatrix,
    /// visited[u] is false when state u never occurred as a row of a counted
    /// pair; its `p_hat` row is the uniform fallback.
    pub visited: Vec<bool>,
}

/// Indicator observable of the ordered pair (u,v): the matrix unit E_uv.
pub fn pair_indicator(d: usize, u: usize, v: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    m[(u, v)] = 1.0;
    m
}

/// Indicator observable of the unordered pair {u,v}: (E_uv + E_vu)/2 off the
/// diagonal, E_uu on it.
pub fn sym_pair_indicator(d: usize, u: usize, v: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    if u == v {
        m[(u, u)] = 1.0;
    } else {
        m[(u, v)] = 0.5;
        m[(v, u)] = 0.5;
    }
    m
}

fn finish(method: Method, n: usize, counts: Vec<u64>, d: usize, denom: f64) -> TransitionEstimate {
    let joint = DMatrix::from_fn(d, d, |u, v| counts[u * d + v] as f64 / denom);
    let row_counts: Vec<u64> = (0..d)
        .map(|u| (0..d).map(|v| counts[u * d + v]).sum())
        .collect();
    let visited: Vec<bool> = row_counts.iter().map(|&c| c > 0).collect();
    let mu_hat = Distribution::from_weights(row_counts.iter().map(|&c| c as f64).collect())
        .expect("at least one pair was counted");
    let mut p_rows = DMatrix::zeros(d, d);
    for u in 0..d {
        if row_counts[u] == 0 {
            for v in 0..d {
                p_rows[(u, v)] = 1.0 / d as f64;
            }
        } else {
            for v in 0..d {
                p_rows[(u, v)] = counts[u * d + v] as f64 / row_counts[u] as f64;
            }
        }
    }
    // Keep the exact count ratios c(u,v)/r(u): renormalizing by the float
    // row sum would break the estimators' exact rational identities.
    let p_hat = RowStochasticMatrix::from_matrix_unnormalized(p_rows)
        .expect("count ratios form valid rows");
    TransitionEstimate {
        method,
        n,
        joint,
        mu_hat,
        p_hat,
        visited,
    }
}

/// Natural-counting estimator: ordered-pair frequencies along a trajectory.
pub fn mle_estimate(path: &ChainPath) -> Result<TransitionEstimate> {
    let n = path.steps();
    if n < 1 {
        return Err(Error::PathTooShort {
            len: path.states.len(),
            min: 2,
        });
    }
    let d = path.dim;
    let mut counts = vec![0u64; d * d];
    for w in path.states.windows(2) {
        let (u, v) = (w[0], w[1]);
        if u >= d || v >= d {
            return Err(Error::IndexOutOfRange {
                index: u.max(v),
                dim: d,
            });
        }
        counts[u * d + v] += 1;
    }
    Ok(finish(Method::Mle, n, counts, d, n as f64))
}

/// One step of the symmetric pair walk: flip a fair coin, refresh one
/// endpoint through the oracle. Returns the next ordered pair and the
/// emitted unordered pair in canonical (min, max) form. Consumes exactly two
/// uniform draws.
pub fn sce_step(
    current: (usize, usize),
    oracle: &dyn TransitionOracle,
    rng: &mut dyn rand::RngCore,
) -> ((usize, usize), (usize, usize)) {
    let (mut u, mut v) = current;
    let r: f64 = rand::Rng::gen::<f64>(&mut &mut *rng);
    if r <= 0.5 {
        u = oracle.step(v, rng);
    } else {
        v = oracle.step(u, rng);
    }
    ((u, v), (u.min(v), u.max(v)))
}

/// Symmetric-counting estimator: n steps of the pair walk started from
/// u ~ ν, v ~ p(u,·). Consumes exactly 2n uniform draws (one of them the
/// initial-state draw). The returned joint matrix is exactly symmetric.
pub fn sce_estimate(
    oracle: &dyn TransitionOracle,
    nu: &Distribution,
    n: usize,
    source: RandomSource,
) -> Result<TransitionEstimate> {
    let d = oracle.dim();
    if nu.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "sce_estimate initial law",
            expected: d,
            got: nu.dim(),
        });
    }
    if n < 1 {
        return Err(Error::InvalidInput("sce_estimate needs n >= 1".into()));
    }
    let mut rng = source.rng();
    let mut counts = vec![0u64; d * d];
    let record = |u: usize, v: usize, counts: &mut Vec<u64>| {
        counts[u * d + v] += 1;
        counts[v * d + u] += 1;
    };
    let mut u = draw_index(nu, &mut rng);
    let mut v = oracle.step(u, &mut rng);
    record(u, v, &mut counts);
    for _ in 1..n {
        let (next, _) = sce_step((u, v), oracle, &mut rng);
        u = next.0;
        v = next.1;
        record(u, v, &mut counts);
    }
    Ok(finish(Method::Sce, n, counts, d, 2.0 * n as f64))
}

/// Frobenius distance between an estimated joint mass and the true joint
/// transition mass μ(u)p(u,v).
pub fn frobenius_error(
    joint: &DMatrix<f64>,
    p: &RowStochasticMatrix,
    mu: &Distribution,
) -> Result<f64> {
    let d = p.dim();
    if joint.nrows() != d || joint.ncols() != d || mu.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "frobenius_error",
            expected: d,
            got: joint.nrows().max(mu.dim()),
        });
    }
    let mut s = 0.0;
    for u in 0..d {
        for v in 0..d {
            let diff = joint[(u, v)] - mu.mass(u) * p.entry(u, v);
            s += diff * diff;
        }
    }
    Ok(s.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_reversible, simulate_chain, MatrixOracle};
    use approx::assert_abs_diff_eq;
    use rand::rngs::mock::StepRng;

    struct TwoCycle;
    impl TransitionOracle for TwoCycle {
        fn dim(&self) -> usize {
            2
        }
        fn step(&self, u: usize, _rng: &mut dyn rand::RngCore) -> usize {
            1 - u
        }
    }

    struct AlwaysOne;
    impl TransitionOracle for AlwaysOne {
        fn dim(&self) -> usize {
            2
        }
        fn step(&self, _u: usize, _rng: &mut dyn rand::RngCore) -> usize {
            1
        }
    }

    fn asymmetric_two_state() -> (RowStochasticMatrix, Distribution) {
        let p = RowStochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.7, 0.3]]).unwrap();
        let mu = p.stationary_distribution().unwrap();
        (p, mu)
    }

    #[test]
    fn indicator_expectation_recovers_joint_mass() {
        // Σ over pairs of μ₂(u,v)·E_uv, materialized literally, equals D_μP.
        let (p, mu) = asymmetric_two_state();
        let mu2 = crate::path_space::pair_stationary(&p, &mu).unwrap();
        let ix = crate::path_space::PairIndexer::new(2);
        let mut acc = DMatrix::zeros(2, 2);
        for u in 0..2 {
            for v in 0..2 {
                acc += pair_indicator(2, u, v) * mu2.mass(ix.flat(u, v));
            }
        }
        let expect = [[7.0 / 24.0, 7.0 / 24.0], [7.0 / 24.0, 3.0 / 24.0]];
        for u in 0..2 {
            for v in 0..2 {
                assert_abs_diff_eq!(acc[(u, v)], expect[u][v], epsilon = 1e-12);
            }
        }
        // folded version, using detailed balance of this (reversible) chain
        let tmu2 = crate::path_space::sym_pair_stationary(&p, &mu).unwrap();
        let sx = crate::path_space::SymPairIndexer::new(2);
        let mut facc = DMatrix::zeros(2, 2);
        for i in 0..sx.len() {
            let (a, b) = sx.unflat(i);
            facc += sym_pair_indicator(2, a, b) * tmu2.mass(i);
        }
        for u in 0..2 {
            for v in 0..2 {
                assert_abs_diff_eq!(facc[(u, v)], expect[u][v], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mle_alternating_path() {
        let path = ChainPath::external(2, vec![0, 1, 0, 1, 0]).unwrap();
        let est = mle_estimate(&path).unwrap();
        assert_eq!(est.n, 4);
        assert_abs_diff_eq!(est.joint[(0, 1)], 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(est.joint[(1, 0)], 0.5, epsilon = 0.0);
        assert_eq!(est.joint[(0, 0)], 0.0);
        assert_abs_diff_eq!(est.mu_hat.mass(0), 0.5, epsilon = 0.0);
        assert_eq!(est.p_hat.entry(0, 1), 1.0);
        assert_eq!(est.p_hat.entry(1, 0), 1.0);
        assert_eq!(est.visited, vec![true, true]);
    }

    #[test]
    fn mle_unvisited_row_falls_back_to_uniform() {
        let path = ChainPath::external(2, vec![0, 0, 0]).unwrap();
        let est = mle_estimate(&path).unwrap();
        assert_eq!(est.joint[(0, 0)], 1.0);
        assert_eq!(est.visited, vec![true, false]);
        assert_abs_diff_eq!(est.p_hat.entry(1, 0), 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(est.p_hat.entry(1, 1), 0.5, epsilon = 0.0);
    }

    #[test]
    fn mle_rejects_short_paths() {
        let path = ChainPath::external(2, vec![1]).unwrap();
        assert!(matches!(
            mle_estimate(&path),
            Err(Error::PathTooShort { .. })
        ));
    }

    #[test]
    fn sce_single_step_two_cycle() {
        // ν = δ₀, deterministic 2-cycle: the only counted pair is {0,1}.
        let nu = Distribution::point_mass(2, 0).unwrap();
        let est = sce_estimate(&TwoCycle, &nu, 1, RandomSource::new(0, 0)).unwrap();
        assert_abs_diff_eq!(est.joint[(0, 1)], 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(est.joint[(1, 0)], 0.5, epsilon = 0.0);
        assert_eq!(est.joint[(0, 0)], 0.0);
        assert_eq!(est.joint[(1, 1)], 0.0);
    }

    #[test]
    fn sce_step_branches_on_the_coin() {
        // r = 0.3 refreshes the first endpoint, r = 0.8 the second.
        let mut low = StepRng::new((0.3f64 * (1u64 << 53) as f64) as u64 * (1 << 11), 0);
        let (next, emitted) = sce_step((0, 0), &AlwaysOne, &mut low);
        assert_eq!(next, (1, 0));
        assert_eq!(emitted, (0, 1));
        let mut high = StepRng::new((0.8f64 * (1u64 << 53) as f64) as u64 * (1 << 11), 0);
        let (next, emitted) = sce_step((0, 0), &AlwaysOne, &mut high);
        assert_eq!(next, (0, 1));
        assert_eq!(emitted, (0, 1));
    }

    #[test]
    fn sce_consumes_exactly_2n_draws() {
        let (p, mu) = random_reversible(4, RandomSource::new(2, 0)).unwrap();
        let oracle = MatrixOracle::new(p);
        let mut rng = crate::sampling::testutil::CountingRng::new(RandomSource::new(3, 0).rng());
        let n = 37usize;
        let mut u = draw_index(&mu, &mut rng);
        let mut v = oracle.step(u, &mut rng);
        for _ in 1..n {
            let (next, _) = sce_step((u, v), &oracle, &mut rng);
            u = next.0;
            v = next.1;
        }
        assert_eq!(rng.draws, 2 * n as u64);
    }

    #[test]
    fn sce_joint_is_bitwise_symmetric_and_detailed_balanced() {
        let (p, mu) = random_reversible(6, RandomSource::new(14, 0)).unwrap();
        let oracle = MatrixOracle::new(p);
        for trial in 0..20u64 {
            let est = sce_estimate(&oracle, &mu, 500, RandomSource::new(77, trial)).unwrap();
            let d = 6;
            let mut total = 0.0;
            for u in 0..d {
                for v in 0..d {
                    assert_eq!(est.joint[(u, v)].to_bits(), est.joint[(v, u)].to_bits());
                    total += est.joint[(u, v)];
                }
            }
            assert!((total - 1.0).abs() <= 1e-12);
            // recover integer counts and check the exact rational identity
            let denom = 2.0 * est.n as f64;
            for u in 0..d {
                for v in 0..d {
                    let c_uv = (est.joint[(u, v)] * denom).round() as u64;
                    let c_vu = (est.joint[(v, u)] * denom).round() as u64;
                    assert_eq!(c_uv, c_vu);
                }
            }
        }
    }

    #[test]
    fn estimates_are_unbiased_at_stationarity() {
        // Monte Carlo mean of the joint estimate vs μ(u)p(u,v), both methods.
        let (p, mu) = random_reversible(4, RandomSource::new(21, 0)).unwrap();
        let oracle = MatrixOracle::new(p.clone());
        let d = 4;
        let (runs, n) = (3000usize, 40usize);
        for method in [Method::Mle, Method::Sce] {
            let mut sum: DMatrix<f64> = DMatrix::zeros(d, d);
            let mut sumsq: DMatrix<f64> = DMatrix::zeros(d, d);
            for k in 0..runs {
                let source = RandomSource::new(1000 + k as u64, 0);
                let est = match method {
                    Method::Mle => {
                        let path = simulate_chain(&oracle, &mu, n, source).unwrap();
                        mle_estimate(&path).unwrap()
                    }
                    Method::Sce => sce_estimate(&oracle, &mu, n, source).unwrap(),
                };
                for u in 0..d {
                    for v in 0..d {
                        sum[(u, v)] += est.joint[(u, v)];
                        sumsq[(u, v)] += est.joint[(u, v)] * est.joint[(u, v)];
                    }
                }
            }
            for u in 0..d {
                for v in 0..d {
                    let mean = sum[(u, v)] / runs as f64;
                    let var = (sumsq[(u, v)] / runs as f64 - mean * mean).max(0.0);
                    let se = (var / runs as f64).sqrt();
                    let target = mu.mass(u) * p.entry(u, v);
                    assert!(
                        (mean - target).abs() <= 5.0 * se + 1e-12,
                        "{method} entry ({u},{v}): mean {mean} target {target} se {se}"
                    );
                }
            }
        }
    }

    #[test]
    fn error_shrinks_from_n_1e4_to_n_1e6() {
        let (p, mu) = random_reversible(5, RandomSource::new(8, 0)).unwrap();
        let oracle = MatrixOracle::new(p.clone());
        for seed in 0..10u64 {
            for method in [Method::Mle, Method::Sce] {
                let err = |n: usize| -> f64 {
                    let source = RandomSource::new(500 + seed, 0);
                    let est = match method {
                        Method::Mle => {
                            let path = simulate_chain(&oracle, &mu, n, source).unwrap();
                            mle_estimate(&path).unwrap()
                        }
                        Method::Sce => sce_estimate(&oracle, &mu, n, source).unwrap(),
                    };
                    frobenius_error(&est.joint, &p, &mu).unwrap()
                };
                assert!(
                    err(1_000_000) <= err(10_000),
                    "seed {seed} {method}: error grew from n=1e4 to n=1e6"
                );
            }
        }
    }

    #[test]
    fn frobenius_error_fixture_and_invariance() {
        let (p, mu) = asymmetric_two_state();
        let joint = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        assert_abs_diff_eq!(
            frobenius_error(&joint, &p, &mu).unwrap(),
            0.433_012_701_892_219_3,
            epsilon = 1e-12
        );
        // exact zero at the truth
        let truth = DMatrix::from_fn(2, 2, |u, v| mu.mass(u) * p.entry(u, v));
        assert_eq!(frobenius_error(&truth, &p, &mu).unwrap(), 0.0);
        // relabeling invariance: swap the two states everywhere
        let p_swap = RowStochasticMatrix::new(vec![vec![0.3, 0.7], vec![0.5, 0.5]]).unwrap();
        let mu_swap = Distribution::new(vec![mu.mass(1), mu.mass(0)]).unwrap();
        let joint_swap = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        assert_abs_diff_eq!(
            frobenius_error(&joint, &p, &mu).unwrap(),
            frobenius_error(&joint_swap, &p_swap, &mu_swap).unwrap(),
            epsilon = 1e-15
        );
    }
}
