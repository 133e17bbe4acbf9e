//! Randomized invariants over the public surface: gap orderings, kernel
//! factorizations, estimator algebra, and invariance under relabeling.
//! Each property states something that must hold for *every* valid input,
//! with proptest exploring the input space.

use markov_xact::{
    absolute_gap, adjust_gap, factor_path_kernel, factor_sym_kernel, gap_report, ip_gap,
    mle_estimate, path_kernel, pseudo_gap, random_reversible, sce_estimate, simulate_chain,
    spectral_gap, symmetric_gap, sym_path_kernel, Distribution, MatrixOracle, RandomSource,
    RowStochasticMatrix,
};
use proptest::prelude::*;

/// Strictly positive rows normalized to sum 1: always irreducible and
/// aperiodic, generically non-reversible.
fn positive_chain(max_d: usize) -> impl Strategy<Value = RowStochasticMatrix> {
    (2..=max_d).prop_flat_map(|d| {
        proptest::collection::vec(proptest::collection::vec(0.01f64..1.0, d), d).prop_map(
            |rows| {
                let rows: Vec<Vec<f64>> = rows
                    .into_iter()
                    .map(|mut r| {
                        let total: f64 = r.iter().sum();
                        r.iter_mut().for_each(|x| *x /= total);
                        r
                    })
                    .collect();
                RowStochasticMatrix::new(rows).expect("normalized rows are stochastic")
            },
        )
    })
}

fn reversible_chain(max_d: usize) -> impl Strategy<Value = (RowStochasticMatrix, Distribution)> {
    (2..=max_d, any::<u64>()).prop_map(|(d, seed)| {
        random_reversible(d, RandomSource::new(seed, 0)).expect("generator yields valid chains")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The four always-defined gaps obey eta_p >= eta_s >= eta_a and
    /// eta_p >= eta_ps / 2 on every irreducible chain.
    #[test]
    fn gap_orderings_hold(p in positive_chain(8)) {
        let mu = p.stationary_distribution().unwrap();
        let eta_p = ip_gap(&p, &mu).unwrap();
        let eta_s = symmetric_gap(&p, &mu).unwrap();
        let eta_a = absolute_gap(&p, &mu).unwrap();
        let eta_ps = pseudo_gap(&p, &mu, 16).unwrap().value;
        prop_assert!(eta_p >= eta_s - 1e-9, "eta_p {eta_p} < eta_s {eta_s}");
        prop_assert!(eta_s >= eta_a - 1e-9, "eta_s {eta_s} < eta_a {eta_a}");
        prop_assert!(eta_p >= eta_ps / 2.0 - 1e-9, "eta_p {eta_p} < eta_ps/2 {}", eta_ps / 2.0);
    }

    /// For reversible chains the classical gap exists and agrees with both
    /// eta_p and eta_s.
    #[test]
    fn reversible_gaps_coincide((p, mu) in reversible_chain(8)) {
        let eta = spectral_gap(&p, &mu).unwrap();
        let eta_p = ip_gap(&p, &mu).unwrap();
        let eta_s = symmetric_gap(&p, &mu).unwrap();
        prop_assert!((eta - eta_p).abs() <= 1e-9, "eta {eta} != eta_p {eta_p}");
        prop_assert!((eta - eta_s).abs() <= 1e-9, "eta {eta} != eta_s {eta_s}");
    }

    /// Truncating the pseudo-gap search at k = 1 reduces it to a function
    /// of the absolute gap: (1 - sigma^2) = eta_a (2 - eta_a).
    #[test]
    fn pseudo_gap_at_k1_matches_absolute_gap(p in positive_chain(8)) {
        let mu = p.stationary_distribution().unwrap();
        let eta_a = absolute_gap(&p, &mu).unwrap();
        let ps = pseudo_gap(&p, &mu, 1).unwrap();
        prop_assert!(
            (ps.value - eta_a * (2.0 - eta_a)).abs() <= 1e-9,
            "pseudo gap at k=1 is {} but eta_a(2-eta_a) = {}",
            ps.value,
            eta_a * (2.0 - eta_a)
        );
    }

    /// The pair kernel and its folded counterpart factor through the base
    /// chain: S T = P2, T S = P, and in the folded picture S T = folded
    /// kernel, T S = (P + I)/2.
    #[test]
    fn factorizations_reproduce_kernels(p in positive_chain(7)) {
        let d = p.dim();
        let p2 = path_kernel(&p);
        let (s, t) = factor_path_kernel(&p);
        prop_assert!(((&s * &t) - p2.as_matrix()).amax() <= 1e-12);
        prop_assert!(((&t * &s) - p.as_matrix()).amax() <= 1e-12);

        let tp2 = sym_path_kernel(&p);
        let (s2, t2) = factor_sym_kernel(&p);
        let mut half_lazy = p.as_matrix() * 0.5;
        for u in 0..d {
            half_lazy[(u, u)] += 0.5;
        }
        prop_assert!(((&s2 * &t2) - tp2.as_matrix()).amax() <= 1e-12);
        prop_assert!(((&t2 * &s2) - half_lazy).amax() <= 1e-12);
    }

    /// Relabeling the states permutes rows and columns but cannot change
    /// any spectral quantity.
    #[test]
    fn gaps_invariant_under_relabeling(p in positive_chain(7), seed in any::<u64>()) {
        let d = p.dim();
        let mut perm: Vec<usize> = (0..d).collect();
        // Fisher-Yates with a seeded stream keeps the case reproducible.
        let mut rng = RandomSource::new(seed, 0).rng();
        for i in (1..d).rev() {
            let j = (rand::Rng::gen::<u64>(&mut rng) % (i as u64 + 1)) as usize;
            perm.swap(i, j);
        }
        let relabeled = RowStochasticMatrix::new(
            (0..d)
                .map(|i| (0..d).map(|j| p.entry(perm[i], perm[j])).collect())
                .collect(),
        )
        .unwrap();
        let a = gap_report(&p, 16).unwrap();
        let b = gap_report(&relabeled, 16).unwrap();
        prop_assert!((a.eta_p - b.eta_p).abs() <= 1e-9);
        prop_assert!((a.eta_a - b.eta_a).abs() <= 1e-9);
        prop_assert!((a.eta_s - b.eta_s).abs() <= 1e-9);
        prop_assert!((a.eta_ps - b.eta_ps).abs() <= 1e-9);
    }

    /// Gap adjustment hits its target exactly (up to eigensolver noise) and
    /// preserves the stationary law.
    #[test]
    fn adjust_gap_hits_target((p, mu) in reversible_chain(8), target in 0.01f64..0.99) {
        let adjusted = adjust_gap(&p, &mu, target).unwrap();
        let eta = spectral_gap(&adjusted, &mu).unwrap();
        prop_assert!((eta - target).abs() <= 1e-9, "achieved {eta}, wanted {target}");
        let mu2 = adjusted.stationary_distribution().unwrap();
        for u in 0..p.dim() {
            prop_assert!((mu2.mass(u) - mu.mass(u)).abs() <= 1e-9);
        }
    }

    /// The trajectory estimator's output is always a probability mass on
    /// pairs whose row sums match its stationary estimate.
    #[test]
    fn mle_estimate_is_coherent(p in positive_chain(6), seed in any::<u64>(), n in 1usize..400) {
        let mu = p.stationary_distribution().unwrap();
        let oracle = MatrixOracle::new(p);
        let path = simulate_chain(&oracle, &mu, n, RandomSource::new(seed, 0)).unwrap();
        let est = mle_estimate(&path).unwrap();
        let total: f64 = est.joint.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let d = est.joint.nrows();
        for u in 0..d {
            let row_sum: f64 = (0..d).map(|v| est.joint[(u, v)]).sum();
            prop_assert!((est.mu_hat.mass(u) - row_sum).abs() <= 1e-12);
        }
    }

    /// The pair-walk estimator is bitwise symmetric for every chain, seed,
    /// and run length.
    #[test]
    fn sce_estimate_is_bitwise_symmetric(p in positive_chain(6), seed in any::<u64>(), n in 1usize..400) {
        let mu = p.stationary_distribution().unwrap();
        let oracle = MatrixOracle::new(p);
        let est = sce_estimate(&oracle, &mu, n, RandomSource::new(seed, 0)).unwrap();
        let d = est.joint.nrows();
        for u in 0..d {
            for v in 0..d {
                prop_assert!(est.joint[(u, v)].to_bits() == est.joint[(v, u)].to_bits());
            }
        }
        let total: f64 = est.joint.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }
}
