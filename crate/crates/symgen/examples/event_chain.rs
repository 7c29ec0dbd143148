//! Event chains: walk the word from a fresh start point, ask whether
//! the trajectory comes back, and repeat on untouched points. Each
//! conditional hit rate stays below l/(n - il), so the chance that all
//! floor(n/2l) chains close is exponentially small.

use symgen::estimate::run_event_chain_experiment;
use symgen::words::UnimodalWord;

fn main() -> symgen::Result<()> {
    let n = 40;
    let word = UnimodalWord::parse("x", "y")?;
    let k = word.chain_capacity(n);
    let report = run_event_chain_experiment(n, &word, k, 200_000, 11, 1)?;

    println!(
        "word u=x v=y (ell=2) at degree {n}: {k} chain steps, {} trials",
        report.full_chain.trials
    );
    println!(
        "  {:>4} {:>12} {:>8} {:>10} {:>10}",
        "step", "conditioning", "held", "p_hat", "bound"
    );
    for s in &report.steps {
        println!(
            "  {:>4} {:>12} {:>8} {:>10.6} {:>10.6}",
            s.index, s.conditioning_trials, s.held, s.p_hat, s.bound
        );
    }
    println!(
        "  all {k} held: {} of {} (product bound {:.3e})",
        report.full_chain.successes, report.full_chain.trials, report.product_bound
    );
    if let Some(sat) = report.satisfaction {
        println!("  closed form at full capacity: (2l/n)^k = {sat:.3e}");
    }
    Ok(())
}
