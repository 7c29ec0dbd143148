//! The identity bound for two-sided words w = u v^-1 with u, v positive
//! and distinct: Prob(w(x,y) = 1) never beats (2l/n)^floor(n/2l) where
//! l = len(u) + len(v). Estimate a few words, then confirm one exactly
//! at a degree small enough to enumerate.

use symgen::estimate::estimate_word_identity;
use symgen::exact::exact_unimodal_identity_probability;
use symgen::words::UnimodalWord;

fn main() -> symgen::Result<()> {
    let n = 12;
    println!("degree {n}, 50000 trials per word");
    for (u, v) in [("x", "y"), ("xx", "y"), ("xy", "yx"), ("xxy", "yxx")] {
        let word = UnimodalWord::parse(u, v)?;
        let report = estimate_word_identity(&word, n, 50_000, 7, 1)?;
        println!(
            "  u={u:<4} v={v:<4} ell={}: p_hat = {:.6}  bound = {:.6}  violation = {}",
            report.ell, report.estimate.p_hat, report.bound, report.violation
        );
    }

    let word = UnimodalWord::parse("xy", "y")?;
    let exact = exact_unimodal_identity_probability(&word, 5)?;
    println!(
        "exact at n=5: u=xy v=y gives {} = {} against bound {}",
        exact.probability.fraction_string(),
        exact.probability.decimal_string(),
        exact.bound
    );
    Ok(())
}
