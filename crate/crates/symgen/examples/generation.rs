//! How often do two uniform random permutations generate the
//! alternating group or more? Estimate it at a few degrees and set the
//! result against the truncated series 1 - 1/n - 1/n^2 - 4/n^3 - ...

use symgen::analysis::Verdict;
use symgen::estimate::{estimate_generation, series_value};

fn main() -> symgen::Result<()> {
    let seed = 0xD1CE;
    let trials = 10_000;
    for n in [10usize, 30, 100] {
        let report = estimate_generation(n, trials, seed, 1)?;
        let series = series_value(n, 5)?;
        let e = &report.estimate;
        println!(
            "n = {n:>3}: p_hat = {:.5}  CI95 = [{:.5}, {:.5}]  ({} trials)",
            e.p_hat, e.ci_low, e.ci_high, e.trials
        );
        println!(
            "        series through 1/n^5 = {series:.5}, deviation = {:+.5}",
            e.p_hat - series
        );
        for v in Verdict::ALL {
            let count = report.histogram.count(v);
            if count > 0 {
                println!("        {:>22}: {count}", v.as_str());
            }
        }
    }
    Ok(())
}
