//! Spectral-gap scaling on lazy cycles. The lazy random walk on an n-cycle
//! (stay with probability 1/2, step to either neighbour with probability
//! 1/4 each) slows down as the cycle grows, and the two one-step gaps decay
//! at different rates: the symmetrized gap eta_s shrinks like 1/n^2 while
//! the iterated-Poincare gap eta_p shrinks like 1/n. Doubling n should
//! therefore halve eta_p but quarter eta_s.
//!
//! Run with `cargo run --release --example lazy_cycle_scaling`.

use markov_xact::{gap_report, lazy_cycle};

fn main() -> markov_xact::Result<()> {
    let sizes = [8usize, 16, 32, 64];
    let mut eta_p = Vec::new();
    let mut eta_s = Vec::new();

    println!("{:>4}  {:>18}  {:>18}", "n", "eta_p", "eta_s");
    for &n in &sizes {
        let p = lazy_cycle(n)?;
        let report = gap_report(&p, 32)?;
        println!("{n:>4}  {:>18.12}  {:>18.12}", report.eta_p, report.eta_s);
        eta_p.push(report.eta_p);
        eta_s.push(report.eta_s);
    }

    println!();
    println!("{:>9}  {:>18}  {:>18}", "n -> 2n", "eta_p ratio", "eta_s ratio");
    for i in 0..sizes.len() - 1 {
        println!(
            "{:>3} -> {:<3}  {:>18.6}  {:>18.6}",
            sizes[i],
            sizes[i + 1],
            eta_p[i] / eta_p[i + 1],
            eta_s[i] / eta_s[i + 1],
        );
    }
    println!();
    println!("eta_p ratios approach 2 (1/n decay); eta_s ratios approach 4 (1/n^2 decay)");
    Ok(())
}
