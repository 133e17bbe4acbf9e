//! Maximum-likelihood estimation of the joint transition mass mu(u)p(u,v)
//! from one simulated trajectory: counts of consecutive ordered pairs
//! divided by the number of transitions. Prints the estimate next to the
//! truth, the Frobenius error, and the matching mean-squared-error bound.
//!
//! Run with `cargo run --release --example estimate_mle`.

use markov_xact::{
    frobenius_error, gap_report, mle_estimate, mle_mse_bound, random_reversible, simulate_chain,
    MatrixOracle, RandomSource,
};

fn main() -> markov_xact::Result<()> {
    let d = 4;
    let (p, mu) = random_reversible(d, RandomSource::new(7, 0))?;
    let report = gap_report(&p, 32)?;

    let n = 20_000;
    let oracle = MatrixOracle::new(p.clone());
    let path = simulate_chain(&oracle, &mu, n, RandomSource::new(7, 1))?;
    let estimate = mle_estimate(&path)?;

    println!("chain: d = {d}, eta = {:.6}, n = {n} transitions", report.eta.unwrap());
    println!();
    println!("estimated joint (row u, column v):");
    for u in 0..d {
        let row: Vec<String> = (0..d)
            .map(|v| format!("{:.5}", estimate.joint[(u, v)]))
            .collect();
        println!("  {}", row.join("  "));
    }
    println!();
    println!("true joint mu(u)p(u,v):");
    for u in 0..d {
        let row: Vec<String> = (0..d)
            .map(|v| format!("{:.5}", mu.mass(u) * p.entry(u, v)))
            .collect();
        println!("  {}", row.join("  "));
    }
    println!();

    let err = frobenius_error(&estimate.joint, &p, &mu)?;
    let bound = mle_mse_bound(n as u64, report.eta_p, Some(report.eta_a), report.eta, 1.0)?;
    println!("squared Frobenius error = {:.6e}", err * err);
    println!("MSE bound               = {:.6e}", bound);
    println!();
    println!(
        "the estimate also carries mu_hat (row sums) and p_hat (normalized rows); \
visited = {:?}",
        estimate.visited
    );
    Ok(())
}
