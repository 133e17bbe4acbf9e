//! Length-2 path spaces: the ordered pair kernel P2 on d^2 states, its
//! reversible folded counterpart on d(d+1)/2 unordered pairs, and the
//! collapse/extend factorizations linking them back to the base chain.
//! Finishes with the full self-check report that relates pair-chain gaps
//! and spectra to the base chain.
//!
//! Run with `cargo run --release --example path_space_identities`.

use markov_xact::{
    factor_path_kernel, factor_sym_kernel, path_kernel, sym_path_kernel,
    verify_spectral_identities, RowStochasticMatrix,
};

fn main() -> markov_xact::Result<()> {
    let p = RowStochasticMatrix::new(vec![
        vec![0.5, 0.3, 0.2],
        vec![0.3, 0.4, 0.3],
        vec![0.2, 0.3, 0.5],
    ])?;
    let d = p.dim();

    let p2 = path_kernel(&p);
    let tp2 = sym_path_kernel(&p);
    println!("base chain:            d = {d}");
    println!("ordered pair kernel:   {} states (d^2)", p2.dim());
    println!("folded pair kernel:    {} states (d(d+1)/2)", tp2.dim());
    println!();

    // The pair kernel factors through the base chain: S maps pairs down to
    // their endpoint, T lifts a state to its outgoing pair distribution.
    // Composing one way reproduces P2, the other way reproduces P.
    let (s, t) = factor_path_kernel(&p);
    let st = (&s * &t) - p2.as_matrix();
    let ts = (&t * &s) - p.as_matrix();
    println!("ordered factorization:  |S*T - P2|_max = {:.3e}", st.amax());
    println!("                        |T*S - P |_max = {:.3e}", ts.amax());

    // The folded kernel factors through the half-lazy chain (P + I)/2.
    let (s_sym, t_sym) = factor_sym_kernel(&p);
    let mut half_lazy = p.as_matrix() * 0.5;
    for u in 0..d {
        half_lazy[(u, u)] += 0.5;
    }
    let st_sym = (&s_sym * &t_sym) - tp2.as_matrix();
    let ts_sym = (&t_sym * &s_sym) - half_lazy;
    println!("folded factorization:   |S*T - P2~|_max      = {:.3e}", st_sym.amax());
    println!("                        |T*S - (P+I)/2|_max  = {:.3e}", ts_sym.amax());
    println!();

    let report = verify_spectral_identities(&p, 1e-8)?;
    println!(
        "identity report: dim = {}, reversible = {}",
        report.dim, report.reversible
    );
    for check in &report.checks {
        println!(
            "  {}  error = {:.3e}  (tol {:.1e})  {}",
            if check.pass { "PASS" } else { "FAIL" },
            check.error,
            check.tol,
            check.name,
        );
    }
    println!();
    println!("all checks passed: {}", report.all_pass());
    Ok(())
}
