//! Exhaustive ground truth: classify every pair in S_n x S_n at tiny
//! degree and report the exact generation probability as a fraction.

use symgen::analysis::Verdict;
use symgen::exact::exact_generation_probability;

fn main() -> symgen::Result<()> {
    for n in 2..=5 {
        let report = exact_generation_probability(n, false, 2)?;
        println!(
            "n = {n}: p(contains alternating) = {} = {}",
            report.probability.fraction_string(),
            report.probability.decimal_string()
        );
        for v in Verdict::ALL {
            let count = report.histogram.count(v);
            if count > 0 {
                println!("  {:>22}: {count:>6} of {}", v.as_str(), report.histogram.total());
            }
        }
    }
    Ok(())
}
