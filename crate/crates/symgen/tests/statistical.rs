//! Distributional checks beyond the acceptance gate: sampler
//! uniformity, analytic event probabilities, bound monotonicity, and
//! the full exhaustive fixture at the largest default degree.

use std::collections::HashMap;

use symgen::analysis::Verdict;
use symgen::estimate::{
    chi_square_critical, chi_square_statistic, conditional_step_bound, estimate_word_identity,
    satisfaction_bound, series_value, trial_rng, Z_999,
};
use symgen::exact::{all_permutations, exact_generation_probability};
use symgen::perm::Permutation;
use symgen::query::{run_event_chain, Exposure};
use symgen::words::{Letter, UnimodalWord};

#[test]
fn uniform_sampler_passes_chi_square_on_s4() {
    let perms = all_permutations(4).unwrap();
    let rank: HashMap<Permutation, usize> = perms.iter().cloned().zip(0..perms.len()).collect();
    let samples = 240_000u64;
    let mut counts = vec![0u64; 24];
    let mut rng = trial_rng(0x54, 0);
    for _ in 0..samples {
        counts[rank[&Permutation::uniform_random(4, &mut rng)]] += 1;
    }
    let expected = vec![samples as f64 / 24.0; 24];
    let stat = chi_square_statistic(&counts, &expected);
    let critical = chi_square_critical(23, 0.001);
    assert!(stat < critical, "chi2 {stat:.2} >= critical {critical:.2}");
}

#[test]
fn free_query_draws_uniformly() {
    let n = 10;
    let samples = 100_000u64;
    let mut counts = vec![0u64; n];
    for t in 0..samples {
        let mut exposure = Exposure::with_rng(n, trial_rng(0xF5, t)).unwrap();
        let result = exposure.query(Letter::X, 0).unwrap();
        counts[result.value] += 1;
    }
    let expected = vec![samples as f64 / n as f64; n];
    let stat = chi_square_statistic(&counts, &expected);
    let critical = chi_square_critical(n - 1, 0.001);
    assert!(stat < critical, "chi2 {stat:.2} >= critical {critical:.2}");
}

#[test]
fn first_chain_event_has_probability_one_over_n() {
    // u=x, v=y walks x then y^-1; the trajectory closes iff x and y
    // agree at the start, which is exactly a 1/n event.
    let n = 50;
    let word = UnimodalWord::parse("x", "y").unwrap();
    let trials = 200_000u64;
    let mut held = 0u64;
    for t in 0..trials {
        let run = run_event_chain(n, &word, 1, symgen::estimate::trial_seed(0xE1, t)).unwrap();
        if run.steps[0].event_held {
            held += 1;
        }
    }
    let (lo, hi) = symgen::estimate::wilson_interval(held, trials, Z_999);
    let truth = 1.0 / n as f64;
    assert!(
        lo <= truth && truth <= hi,
        "observed {held}/{trials}, 99.9% interval [{lo}, {hi}] misses {truth}"
    );
}

#[test]
fn bounds_move_the_right_way() {
    let grid = [5usize, 10, 20, 50, 100];
    for window in grid.windows(2) {
        let (small, large) = (window[0], window[1]);
        assert!(
            satisfaction_bound(2, large) < satisfaction_bound(2, small),
            "identity bound must shrink with degree"
        );
        assert!(
            series_value(large, 5).unwrap() > series_value(small, 5).unwrap(),
            "generation series must grow with degree"
        );
    }
    for i in 1..10 {
        assert!(
            conditional_step_bound(2, 100, i + 1) > conditional_step_bound(2, 100, i),
            "later chain steps have weaker bounds"
        );
    }
}

#[test]
fn single_letter_identity_event_is_factorial_rare() {
    // u=xx, v=x reduces to the single letter x; the identity event is
    // one pair in n!.
    let word = UnimodalWord::parse("xx", "x").unwrap();
    let report = estimate_word_identity(&word, 10, 100_000, 0x1F, 1).unwrap();
    assert_eq!(report.estimate.successes, 0, "1/3628800 at 10^5 trials");
    let (_, hi) = report.estimate.wilson(Z_999);
    assert!(
        hi > 1.0 / 3_628_800.0,
        "interval [0, {hi}] must stay consistent with the true value"
    );
    assert!(!report.violation);
}

#[test]
fn small_degree_estimates_bracket_known_fractions() {
    let word = UnimodalWord::parse("x", "y").unwrap();
    let report = estimate_word_identity(&word, 3, 150_000, 0x3A, 1).unwrap();
    let truth = 1.0 / 6.0;
    let (lo, hi) = report.estimate.wilson(Z_999);
    assert!(lo <= truth && truth <= hi, "[{lo}, {hi}] misses 1/6");
}

#[test]
fn exhaustive_fixture_at_degree_six() {
    let report = exact_generation_probability(6, false, 1).unwrap();
    assert_eq!(report.probability.fraction_string(), "53/90");
    assert_eq!(report.probability.decimal_string(), "0.588888888889");
    assert_eq!(report.histogram.count(Verdict::Intransitive), 104_760);
    assert_eq!(report.histogram.count(Verdict::TransitiveImprimitive), 53_640);
    assert_eq!(report.histogram.count(Verdict::PrimitiveProper), 54_720);
    assert_eq!(report.histogram.count(Verdict::Alternating), 76_320);
    assert_eq!(report.histogram.count(Verdict::Symmetric), 228_960);
    assert_eq!(report.histogram.total(), 518_400);
}
