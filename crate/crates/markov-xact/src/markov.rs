//! Core finite-Markov-chain objects: row-stochastic matrices, probability
//! vectors, and the μ-weighted L₂ geometry they induce.
//!
//! Everything downstream (gap computations, path-space kernels, estimation
//! error analysis) works in L_{2,μ}: the inner product ⟨h, g⟩_μ = Σ_u
//! μ(u)h(u)g(u) for a stationary law μ. Operator norms in that geometry are
//! computed by whitening: A ↦ D_μ^{1/2} A D_μ^{-1/2}, which is an isometry
//! onto plain Euclidean space and turns reversibility into symmetry.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Row sums may deviate from 1 by at most this much before validation fails;
/// rows within the band are renormalized exactly.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Detailed-balance residual allowed by `is_reversible` callers that take the
/// module default.
pub const DEFAULT_REVERSIBILITY_TOL: f64 = 1e-10;

/// Residual guaranteed by `stationary_distribution` (sup norm of μᵀP − μᵀ).
pub const STATIONARY_RESIDUAL_TOL: f64 = 1e-10;

/// A validated row-stochastic matrix: square, entrywise nonnegative, every
/// row summing to 1 (renormalized on construction, then exact to 1e-12).
#[derive(Debug, Clone, PartialEq)]
pub struct RowStochasticMatrix {
    dim: usize,
    entries: DMatrix<f64>,
}

impl RowStochasticMatrix {
    /// Validates and normalizes a row-major nested representation.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::NotSquare {
                    rows: d,
                    row: i,
                    cols: r.len(),
                });
            }
        }
        let m = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        Self::from_matrix(m)
    }

    /// Validates and normalizes a dense matrix.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        let (r, c) = m.shape();
        if r == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        if r != c {
            return Err(Error::NotSquare {
                rows: r,
                row: 0,
                cols: c,
            });
        }
        let mut m = m;
        for i in 0..r {
            let mut sum = 0.0;
            for j in 0..c {
                let x = m[(i, j)];
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: x,
                    });
                }
                sum += x;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowSumViolation {
                    row: i,
                    sum,
                    tol: ROW_SUM_TOL,
                });
            }
            for j in 0..c {
                m[(i, j)] /= sum;
            }
        }
        Ok(Self { dim: r, entries: m })
    }

    /// Validates like [`from_matrix`](Self::from_matrix) but keeps the
    /// entries bit-for-bit (no row renormalization). For rows that are exact
    /// ratios of integer counts, renormalizing by the floating-point row sum
    /// would destroy the rational identities the estimators guarantee, so
    /// they construct through this path.
    pub(crate) fn from_matrix_unnormalized(m: DMatrix<f64>) -> Result<Self> {
        let (r, c) = m.shape();
        if r == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        if r != c {
            return Err(Error::NotSquare {
                rows: r,
                row: 0,
                cols: c,
            });
        }
        for i in 0..r {
            let mut sum = 0.0;
            for j in 0..c {
                let x = m[(i, j)];
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: x,
                    });
                }
                sum += x;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowSumViolation {
                    row: i,
                    sum,
                    tol: ROW_SUM_TOL,
                });
            }
        }
        Ok(Self { dim: r, entries: m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, u: usize, v: usize) -> f64 {
        self.entries[(u, v)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// k-th matrix power (k ≥ 0; k = 0 is the identity).
    pub fn power(&self, k: usize) -> DMatrix<f64> {
        let mut acc = DMatrix::identity(self.dim, self.dim);
        for _ in 0..k {
            acc = &acc * &self.entries;
        }
        acc
    }

    /// Strong connectivity of the support digraph (edge u→v iff p(u,v) > 0).
    pub fn is_irreducible(&self) -> bool {
        let d = self.dim;
        let reach = |transpose: bool| -> usize {
            let mut seen = vec![false; d];
            let mut stack = vec![0usize];
            seen[0] = true;
            let mut count = 1;
            while let Some(u) = stack.pop() {
                for v in 0..d {
                    let w = if transpose {
                        self.entries[(v, u)]
                    } else {
                        self.entries[(u, v)]
                    };
                    if w > 0.0 && !seen[v] {
                        seen[v] = true;
                        count += 1;
                        stack.push(v);
                    }
                }
            }
            count
        };
        reach(false) == d && reach(true) == d
    }

    /// Unique stationary distribution of an irreducible chain, via the
    /// least-squares solve of (I − Pᵀ)μ = 0 with Σμ(u) = 1 appended.
    /// The result satisfies ‖μᵀP − μᵀ‖_∞ ≤ 1e-10.
    pub fn stationary_distribution(&self) -> Result<Distribution> {
        if !self.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        let d = self.dim;
        let mut a = DMatrix::zeros(d + 1, d);
        for i in 0..d {
            for j in 0..d {
                a[(i, j)] = if i == j { 1.0 } else { 0.0 } - self.entries[(j, i)];
            }
        }
        for j in 0..d {
            a[(d, j)] = 1.0;
        }
        let mut b = DVector::zeros(d + 1);
        b[d] = 1.0;
        let svd = a.clone().svd(true, true);
        let mut x = svd
            .solve(&b, 0.0)
            .map_err(|e| Error::InvariantViolation(format!("stationary solve failed: {e}")))?;
        // One pass of iterative refinement tightens the residual for
        // ill-conditioned (tiny-gap) chains.
        let r = &b - &a * &x;
        if let Ok(dx) = svd.solve(&r, 0.0) {
            x += dx;
        }
        let mut w = vec![0.0; d];
        for i in 0..d {
            let xi = x[i];
            if xi < -1e-9 {
                return Err(Error::InvariantViolation(format!(
                    "stationary solve produced negative mass {xi} at state {i}"
                )));
            }
            w[i] = xi.max(0.0);
        }
        let mu = Distribution::from_weights(w)?;
        let res = stationary_residual(self, &mu);
        if res > STATIONARY_RESIDUAL_TOL {
            return Err(Error::InvariantViolation(format!(
                "stationary residual {res} exceeds {STATIONARY_RESIDUAL_TOL}"
            )));
        }
        Ok(mu)
    }

    /// Detailed balance check: max_{u,v} |μ(u)p(u,v) − μ(v)p(v,u)| ≤ tol.
    pub fn is_reversible(&self, mu: &Distribution, tol: f64) -> bool {
        self.detailed_balance_residual(mu) <= tol
    }

    pub fn detailed_balance_residual(&self, mu: &Distribution) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for u in 0..d {
            for v in (u + 1)..d {
                let r = (mu.mass(u) * self.entries[(u, v)] - mu.mass(v) * self.entries[(v, u)])
                    .abs();
                worst = worst.max(r);
            }
        }
        worst
    }
}

/// sup-norm of μᵀP − μᵀ.
pub fn stationary_residual(p: &RowStochasticMatrix, mu: &Distribution) -> f64 {
    let d = p.dim();
    let mut worst = 0.0f64;
    for v in 0..d {
        let mut s = 0.0;
        for u in 0..d {
            s += mu.mass(u) * p.entry(u, v);
        }
        worst = worst.max((s - mu.mass(v)).abs());
    }
    worst
}

/// A validated probability vector: nonnegative, total mass 1 (renormalized on
/// construction when within 1e-9).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    masses: DVector<f64>,
}

impl Distribution {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::NotAProbability {
                reason: "empty vector".into(),
            });
        }
        let mut sum = 0.0;
        for (i, &x) in masses.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::NotAProbability {
                    reason: format!("entry {x} at index {i}"),
                });
            }
            sum += x;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::NotAProbability {
                reason: format!("total mass {sum}"),
            });
        }
        let v = DVector::from_iterator(masses.len(), masses.iter().map(|&x| x / sum));
        Ok(Self { masses: v })
    }

    /// Normalizes arbitrary nonnegative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::NotAProbability {
                reason: format!("weights sum to {sum}"),
            });
        }
        let masses: Vec<f64> = weights.iter().map(|&w| w / sum).collect();
        for (i, &x) in masses.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::NotAProbability {
                    reason: format!("entry {x} at index {i}"),
                });
            }
        }
        Ok(Self {
            masses: DVector::from_vec(masses),
        })
    }

    pub fn uniform(d: usize) -> Self {
        Self {
            masses: DVector::from_element(d, 1.0 / d as f64),
        }
    }

    pub fn point_mass(d: usize, state: usize) -> Result<Self> {
        if state >= d {
            return Err(Error::IndexOutOfRange {
                index: state,
                dim: d,
            });
        }
        let mut v = DVector::zeros(d);
        v[state] = 1.0;
        Ok(Self { masses: v })
    }

    pub fn dim(&self) -> usize {
        self.masses.len()
    }

    pub fn mass(&self, u: usize) -> f64 {
        self.masses[u]
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.masses
    }

    /// True when every state carries strictly positive mass.
    pub fn is_positive(&self) -> bool {
        self.masses.iter().all(|&x| x > 0.0)
    }

    /// sup_u ν(u)/μ(u) where `self` plays ν. Infinite when ν charges a state
    /// of zero μ-mass.
    pub fn sup_ratio(&self, mu: &Distribution) -> Result<f64> {
        if self.dim() != mu.dim() {
            return Err(Error::DimensionMismatch {
                context: "sup_ratio distributions",
                expected: mu.dim(),
                got: self.dim(),
            });
        }
        let mut worst = 0.0f64;
        for u in 0..self.dim() {
            let n = self.mass(u);
            if n == 0.0 {
                continue;
            }
            let m = mu.mass(u);
            if m == 0.0 {
                return Ok(f64::INFINITY);
            }
            worst = worst.max(n / m);
        }
        Ok(worst)
    }
}

/// A real-valued function on the state space, for L_{2,μ} computations.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFunction {
    values: DVector<f64>,
}

impl WeightedFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values: DVector::from_vec(values),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, u: usize) -> f64 {
        self.values[u]
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.values
    }
}

/// ⟨h, g⟩_μ = Σ_u μ(u) h(u) g(u).
pub fn weighted_inner(h: &WeightedFunction, g: &WeightedFunction, mu: &Distribution) -> Result<f64> {
    if h.dim() != mu.dim() || g.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            context: "weighted inner product",
            expected: mu.dim(),
            got: h.dim().max(g.dim()),
        });
    }
    let mut s = 0.0;
    for u in 0..mu.dim() {
        s += mu.mass(u) * h.value(u) * g.value(u);
    }
    Ok(s)
}

/// ‖h‖_μ = √⟨h, h⟩_μ.
pub fn weighted_norm(h: &WeightedFunction, mu: &Distribution) -> Result<f64> {
    weighted_inner(h, h, mu).map(f64::sqrt)
}

/// Whitening conjugation D_μ^{1/2} A D_μ^{-1/2}; entry (u,v) becomes
/// √μ(u)·a(u,v)/√μ(v). Requires strictly positive μ.
pub fn whiten(a: &DMatrix<f64>, mu: &Distribution) -> Result<DMatrix<f64>> {
    let d = mu.dim();
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::DimensionMismatch {
            context: "whitening",
            expected: d,
            got: a.nrows(),
        });
    }
    for u in 0..d {
        if mu.mass(u) <= 0.0 {
            return Err(Error::ZeroStationaryMass { state: u });
        }
    }
    let sqrt: Vec<f64> = (0..d).map(|u| mu.mass(u).sqrt()).collect();
    let mut w = a.clone();
    for u in 0..d {
        for v in 0..d {
            w[(u, v)] *= sqrt[u] / sqrt[v];
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_state() -> RowStochasticMatrix {
        RowStochasticMatrix::new(vec![vec![0.7, 0.3], vec![0.2, 0.8]]).unwrap()
    }

    #[test]
    fn validates_and_renormalizes_within_band() {
        let p = RowStochasticMatrix::new(vec![
            vec![0.5, 0.5 + 4e-10],
            vec![0.25, 0.75],
        ])
        .unwrap();
        let s0: f64 = (0..2).map(|j| p.entry(0, j)).sum();
        assert!((s0 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            RowStochasticMatrix::new(vec![vec![0.5, 0.6], vec![0.5, 0.5]]),
            Err(Error::RowSumViolation { .. })
        ));
        assert!(matches!(
            RowStochasticMatrix::new(vec![vec![1.5, -0.5], vec![0.5, 0.5]]),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(matches!(
            RowStochasticMatrix::new(vec![vec![1.0], vec![1.0]]),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn irreducibility_on_cycles_and_absorbing() {
        let cycle = RowStochasticMatrix::new(vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(cycle.is_irreducible());
        let absorbing = RowStochasticMatrix::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(!absorbing.is_irreducible());
    }

    #[test]
    fn stationary_two_state() {
        let mu = two_state().stationary_distribution().unwrap();
        assert_abs_diff_eq!(mu.mass(0), 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(mu.mass(1), 0.6, epsilon = 1e-12);
    }

    #[test]
    fn stationary_residual_on_random_chains() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..100 {
            let d = 2 + (trial % 29);
            let rows: Vec<Vec<f64>> = (0..d)
                .map(|_| {
                    let mut r: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() + 1e-3).collect();
                    let s: f64 = r.iter().sum();
                    r.iter_mut().for_each(|x| *x /= s);
                    r
                })
                .collect();
            let p = RowStochasticMatrix::new(rows).unwrap();
            let mu = p.stationary_distribution().unwrap();
            assert!(stationary_residual(&p, &mu) <= 1e-10);
            assert!(mu.is_positive());
        }
    }

    #[test]
    fn stationary_errors_on_reducible() {
        let absorbing = RowStochasticMatrix::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            absorbing.stationary_distribution(),
            Err(Error::NotIrreducible)
        ));
    }

    #[test]
    fn reversibility_two_state_and_cycle() {
        let p = two_state();
        let mu = p.stationary_distribution().unwrap();
        assert!(p.is_reversible(&mu, DEFAULT_REVERSIBILITY_TOL));
        let cycle = RowStochasticMatrix::new(vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let mu3 = Distribution::uniform(3);
        assert!(!cycle.is_reversible(&mu3, DEFAULT_REVERSIBILITY_TOL));
    }

    #[test]
    fn whiten_two_state_symmetric() {
        let p = two_state();
        let mu = p.stationary_distribution().unwrap();
        let w = whiten(p.as_matrix(), &mu).unwrap();
        // sqrt(0.4)*0.3/sqrt(0.6) = 0.3*sqrt(2/3)
        assert_abs_diff_eq!(w[(0, 1)], 0.244_948_974_278_317_8, epsilon = 1e-12);
        assert_abs_diff_eq!(w[(1, 0)], 0.244_948_974_278_317_8, epsilon = 1e-12);
        assert_abs_diff_eq!(w[(0, 0)], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(w[(1, 1)], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn whiten_requires_positive_mass() {
        let p = two_state();
        let mu = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            whiten(p.as_matrix(), &mu),
            Err(Error::ZeroStationaryMass { state: 1 })
        ));
    }

    #[test]
    fn sup_ratio_examples() {
        let mu = Distribution::new(vec![0.4, 0.6]).unwrap();
        let nu = Distribution::uniform(2);
        assert_abs_diff_eq!(nu.sup_ratio(&mu).unwrap(), 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(mu.sup_ratio(&mu).unwrap(), 1.0, epsilon = 1e-15);
        let point = Distribution::point_mass(2, 0).unwrap();
        assert_abs_diff_eq!(point.sup_ratio(&mu).unwrap(), 2.5, epsilon = 1e-12);
    }

    #[test]
    fn weighted_geometry() {
        let mu = Distribution::new(vec![0.4, 0.6]).unwrap();
        let h = WeightedFunction::new(vec![1.0, -1.0]);
        assert_abs_diff_eq!(weighted_inner(&h, &h, &mu).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(weighted_norm(&h, &mu).unwrap(), 1.0, epsilon = 1e-15);
        let g = WeightedFunction::new(vec![1.0, 1.0]);
        // mean-zero h against constants: 0.4 - 0.6 = -0.2
        assert_abs_diff_eq!(weighted_inner(&h, &g, &mu).unwrap(), -0.2, epsilon = 1e-15);
    }
}
