//! Monte Carlo experiments and the closed-form quantities they are
//! measured against: the generation probability and its truncated
//! series, the word-identity bound, per-step chain bounds, and the
//! order-growth collision bound.
//!
//! Every experiment derives an independent rng per trial from (master
//! seed, trial index), so results are identical for every worker count,
//! not merely statistically indistinguishable.

use crate::analysis::{classify, group_order, VerdictHistogram};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::query::run_event_chain_with_rng;
use crate::words::{UnimodalWord, WordEvaluator};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::HashSet;
use std::time::Instant;

/// Constant term and numerators of the truncated expansion
/// 1 - 1/n - 1/n^2 - 4/n^3 - 23/n^4 - 171/n^5 for the probability that
/// a uniform pair generates at least the alternating group.
pub const SERIES_COEFFICIENTS: [u32; 6] = [1, 1, 1, 4, 23, 171];

/// Coefficients past 1/n^5 would need machinery far beyond this crate.
pub const MAX_SERIES_ORDER: usize = 5;

/// Two-sided 95% and 99.9% normal quantiles, pinned; a unit test checks
/// them against the distribution library to full precision.
pub const Z_95: f64 = 1.9599639845400538;
pub const Z_999: f64 = 3.2905267314919255;

/// Per-trial evaluation budget for the order-growth experiment, in
/// (word count) x (degree) image entries.
pub const ORDER_GROWTH_BUDGET: u64 = 1 << 23;

/// Truncated series value 1 - sum_{j=1..k} a_j / n^j.
pub fn series_value(n: usize, k: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "series is defined for degree at least 2".into(),
        ));
    }
    if k > MAX_SERIES_ORDER {
        return Err(Error::InvalidParameter(format!(
            "series coefficients are known only through order {MAX_SERIES_ORDER}, got {k}"
        )));
    }
    let n = n as f64;
    let mut value = f64::from(SERIES_COEFFICIENTS[0]);
    for (j, &a) in SERIES_COEFFICIENTS.iter().enumerate().skip(1).take(k) {
        value -= f64::from(a) / n.powi(j as i32);
    }
    Ok(value)
}

/// (2l/n)^floor(n/2l): upper bound on the probability that a two-sided
/// positive word with combined half length `ell` evaluates to the
/// identity at a uniform pair. Returns 1 (vacuous) when 2l > n.
pub fn satisfaction_bound(ell: usize, n: usize) -> f64 {
    assert!(ell >= 1 && n >= 1);
    let exponent = n / (2 * ell);
    ((2 * ell) as f64 / n as f64).powi(exponent as i32)
}

/// 4^r (4r/n)^floor(n/4r): union bound on the probability that any two
/// distinct positive words of length below r collide at a uniform pair.
/// May exceed 1, in which case it is vacuous.
pub fn collision_union_bound(r: usize, n: usize) -> f64 {
    assert!(r >= 1 && n >= 1);
    let exponent = n / (4 * r);
    4f64.powi(r as i32) * ((4 * r) as f64 / n as f64).powi(exponent as i32)
}

/// l/(n - i*l): bound on the conditional probability that the i-th
/// trajectory (1-based) returns to its start given that all earlier ones
/// did. Infinite when i*l reaches n; chain lengths are capped well below
/// that.
pub fn conditional_step_bound(ell: usize, n: usize, i: usize) -> f64 {
    assert!(ell >= 1 && i >= 1);
    if i * ell >= n {
        return f64::INFINITY;
    }
    ell as f64 / (n - i * ell) as f64
}

/// Default word-length exponent for the order-growth experiment:
/// max(1, floor(0.5 * sqrt(n ln n))).
pub fn default_order_growth_r(n: usize) -> usize {
    let n = n as f64;
    let r = (0.5 * (n * n.ln()).sqrt()).floor();
    (r as usize).max(1)
}

/// Wilson score interval, clamped to [0, 1].
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials >= 1 && successes <= trials);
    let t = trials as f64;
    let p = successes as f64 / t;
    let zz = z * z;
    let denom = 1.0 + zz / t;
    let center = p + zz / (2.0 * t);
    let radius = z * (p * (1.0 - p) / t + zz / (4.0 * t * t)).sqrt();
    (
        ((center - radius) / denom).max(0.0),
        ((center + radius) / denom).min(1.0),
    )
}

/// Chi-square statistic of observed counts against expected counts.
pub fn chi_square_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Critical value of the chi-square distribution with `df` degrees of
/// freedom at significance `alpha`.
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    ChiSquared::new(df as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha)
}

/// A binomial estimate with its 95% Wilson interval. The wall time is
/// informational only and never serialized, so machine outputs are
/// byte-identical across reruns.
#[derive(Debug, Clone, Serialize)]
pub struct Estimate {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time: Option<f64>,
}

impl Estimate {
    pub fn from_counts(trials: u64, successes: u64, seed: u64) -> Self {
        assert!(trials >= 1 && successes <= trials);
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_95);
        Self {
            trials,
            successes,
            p_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            seed,
            wall_time: None,
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }

    /// Wilson interval at another confidence level.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.successes, self.trials, z)
    }
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one trial's private rng stream. Trials are decoupled from
/// worker scheduling, so any worker count reproduces the same results.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let z = master ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    mix64(mix64(z).wrapping_add(0x9E37_79B9_7F4A_7C15))
}

pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, trial))
}

/// Runs `trials` independent trial closures and merges their
/// accumulators. `workers <= 1` is a plain sequential loop; larger
/// counts use a dedicated thread pool. Accumulator merging must be
/// commutative, which all count-based accumulators here are.
pub(crate) fn run_trials<A, I, S, M>(
    trials: u64,
    workers: usize,
    init: I,
    step: S,
    merge: M,
) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    S: Fn(&mut A, u64) -> Result<()> + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "trial count must be at least 1".into(),
        ));
    }
    if workers <= 1 {
        let mut acc = init();
        for t in 0..trials {
            step(&mut acc, t)?;
        }
        return Ok(acc);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))?;
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .try_fold(&init, |mut acc, t| step(&mut acc, t).map(|()| acc))
            .try_reduce(&init, |a, b| Ok(merge(a, b)))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationReport {
    pub degree: usize,
    /// Event: the pair generates a group containing the alternating group.
    pub estimate: Estimate,
    pub histogram: VerdictHistogram,
}

/// Samples uniform pairs and classifies what they generate.
pub fn estimate_generation(
    n: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<GenerationReport> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "degree must be at least 1".into(),
        ));
    }
    let start = Instant::now();
    #[derive(Default)]
    struct Acc {
        successes: u64,
        histogram: VerdictHistogram,
    }
    let acc = run_trials(
        trials,
        workers,
        Acc::default,
        |acc, t| {
            let mut rng = trial_rng(seed, t);
            let x = Permutation::uniform_random(n, &mut rng);
            let y = Permutation::uniform_random(n, &mut rng);
            let c = classify(&x, &y)?;
            acc.histogram.record(c.verdict);
            if c.contains_alternating() {
                acc.successes += 1;
            }
            Ok(())
        },
        |mut a, b| {
            a.successes += b.successes;
            a.histogram.merge(&b.histogram);
            a
        },
    )?;
    let mut estimate = Estimate::from_counts(trials, acc.successes, seed);
    estimate.wall_time = Some(start.elapsed().as_secs_f64());
    Ok(GenerationReport {
        degree: n,
        estimate,
        histogram: acc.histogram,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WordIdentityReport {
    pub degree: usize,
    pub u: String,
    pub v: String,
    pub ell: usize,
    /// Event: the word evaluates to the identity at a uniform pair.
    pub estimate: Estimate,
    pub bound: f64,
    /// The Wilson lower bound exceeds the closed-form bound; this would
    /// contradict the bound, not merely fluctuate around it.
    pub violation: bool,
}

/// Measures how often `u v^-1` evaluates to the identity.
pub fn estimate_word_identity(
    word: &UnimodalWord,
    n: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<WordIdentityReport> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "degree must be at least 1".into(),
        ));
    }
    let start = Instant::now();
    let reduced = word.reduced().clone();
    let successes = run_trials(
        trials,
        workers,
        || 0u64,
        |acc, t| {
            let mut rng = trial_rng(seed, t);
            let x = Permutation::uniform_random(n, &mut rng);
            let y = Permutation::uniform_random(n, &mut rng);
            let eval = WordEvaluator::new(x, y)?;
            if eval.fixes_all(&reduced) {
                *acc += 1;
            }
            Ok(())
        },
        |a, b| a + b,
    )?;
    let mut estimate = Estimate::from_counts(trials, successes, seed);
    estimate.wall_time = Some(start.elapsed().as_secs_f64());
    let bound = satisfaction_bound(word.ell(), n);
    let violation = estimate.ci_low > bound;
    Ok(WordIdentityReport {
        degree: n,
        u: word.u().to_string(),
        v: word.v().to_string(),
        ell: word.ell(),
        estimate,
        bound,
        violation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderGrowthReport {
    pub degree: usize,
    pub r: usize,
    /// 2^r - 1 positive words of length below r, empty word included.
    pub word_count: u64,
    /// Event: two distinct words evaluated equal.
    pub collision_estimate: Estimate,
    pub bound: f64,
    /// Collision-free trials re-checked with a stabilizer chain; each
    /// confirms order >= 2^r - 1 independently of the distinct-element
    /// witness.
    pub certified_checked: u64,
    pub certified_confirmed: u64,
}

/// Evaluates every positive word of length below `r` at fresh uniform
/// pairs and watches for collisions among the resulting permutations.
/// A collision-free trial certifies order at least 2^r - 1 outright;
/// the first `certify_sample` trial indices additionally re-verify that
/// bound with an exact order computation.
pub fn order_growth_experiment(
    n: usize,
    r: usize,
    trials: u64,
    seed: u64,
    workers: usize,
    certify_sample: u64,
) -> Result<OrderGrowthReport> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidParameter(
            "degree and word length exponent must be at least 1".into(),
        ));
    }
    if r >= 32 {
        return Err(Error::Capacity(format!(
            "2^{r} - 1 word evaluations per trial is far beyond the budget"
        )));
    }
    let word_count = (1u64 << r) - 1;
    if word_count.saturating_mul(n as u64) > ORDER_GROWTH_BUDGET {
        return Err(Error::Capacity(format!(
            "2^{} - 1 = {} evaluations of degree {} exceed the {}-entry budget",
            r, word_count, n, ORDER_GROWTH_BUDGET
        )));
    }
    let start = Instant::now();
    let threshold = (BigUint::from(1u32) << r) - BigUint::from(1u32);
    #[derive(Default)]
    struct Acc {
        collisions: u64,
        checked: u64,
        confirmed: u64,
    }
    let acc = run_trials(
        trials,
        workers,
        Acc::default,
        |acc, t| {
            let mut rng = trial_rng(seed, t);
            let x = Permutation::uniform_random(n, &mut rng);
            let y = Permutation::uniform_random(n, &mut rng);
            let mut seen = HashSet::with_capacity(word_count as usize);
            let mut level = vec![Permutation::identity(n)];
            seen.insert(level[0].clone());
            let mut collision = false;
            'grow: for _ in 1..r {
                let mut next = Vec::with_capacity(level.len() * 2);
                for e in &level {
                    for gen in [&x, &y] {
                        let w = e.compose(gen).expect("same degree");
                        if !seen.insert(w.clone()) {
                            collision = true;
                            break 'grow;
                        }
                        next.push(w);
                    }
                }
                level = next;
            }
            if collision {
                acc.collisions += 1;
            } else if t < certify_sample {
                acc.checked += 1;
                if group_order(&[x, y])? >= threshold {
                    acc.confirmed += 1;
                }
            }
            Ok(())
        },
        |mut a, b| {
            a.collisions += b.collisions;
            a.checked += b.checked;
            a.confirmed += b.confirmed;
            a
        },
    )?;
    let mut collision_estimate = Estimate::from_counts(trials, acc.collisions, seed);
    collision_estimate.wall_time = Some(start.elapsed().as_secs_f64());
    Ok(OrderGrowthReport {
        degree: n,
        r,
        word_count,
        collision_estimate,
        bound: collision_union_bound(r, n),
        certified_checked: acc.checked,
        certified_confirmed: acc.confirmed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainStepEstimate {
    /// 1-based step index.
    pub index: usize,
    /// Chains that reached this step, i.e. all earlier events held.
    pub conditioning_trials: u64,
    pub held: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// l/(n - i*l).
    pub bound: f64,
}

impl ChainStepEstimate {
    pub fn conditional_stderr(&self) -> f64 {
        if self.conditioning_trials == 0 {
            return 0.0;
        }
        (self.p_hat * (1.0 - self.p_hat) / self.conditioning_trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainExperimentReport {
    pub degree: usize,
    pub u: String,
    pub v: String,
    pub ell: usize,
    pub k: usize,
    pub steps: Vec<ChainStepEstimate>,
    /// Event: all k steps held in one chain.
    pub full_chain: Estimate,
    /// prod_{i=1..k} l/(n - i*l).
    pub product_bound: f64,
    /// (2l/n)^floor(n/2l); comparable to the full chain only when k is
    /// the full capacity floor(n/2l), so absent otherwise.
    pub satisfaction: Option<f64>,
}

impl ChainExperimentReport {
    /// Steps with enough conditioning data whose estimate exceeds the
    /// closed-form bound by more than three standard errors.
    pub fn violating_steps(&self, min_conditioning: u64) -> Vec<usize> {
        self.steps
            .iter()
            .filter(|s| {
                s.conditioning_trials >= min_conditioning
                    && s.p_hat > s.bound + 3.0 * s.conditional_stderr()
            })
            .map(|s| s.index)
            .collect()
    }
}

/// Runs many event chains and tabulates per-step conditional hit rates.
/// Every chain asserts the free-choice necessity of its events; a single
/// violation anywhere aborts the experiment with an error.
pub fn run_event_chain_experiment(
    n: usize,
    word: &UnimodalWord,
    k: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<ChainExperimentReport> {
    let capacity = word.chain_capacity(n);
    if k == 0 || k > capacity {
        return Err(Error::InvalidParameter(format!(
            "chain length must be between 1 and floor(n / 2ell) = {capacity}"
        )));
    }
    let start = Instant::now();
    struct Acc {
        reached: Vec<u64>,
        held: Vec<u64>,
        full: u64,
    }
    let init = || Acc {
        reached: vec![0; k],
        held: vec![0; k],
        full: 0,
    };
    let acc = run_trials(
        trials,
        workers,
        init,
        |acc, t| {
            let run = run_event_chain_with_rng(n, word, k, trial_rng(seed, t))?;
            for (i, step) in run.steps.iter().enumerate() {
                acc.reached[i] += 1;
                if step.event_held {
                    acc.held[i] += 1;
                }
            }
            if run.all_held() {
                acc.full += 1;
            }
            Ok(())
        },
        |mut a, b| {
            for i in 0..k {
                a.reached[i] += b.reached[i];
                a.held[i] += b.held[i];
            }
            a.full += b.full;
            a
        },
    )?;
    let steps = (0..k)
        .map(|i| {
            let (reached, held) = (acc.reached[i], acc.held[i]);
            let (p_hat, ci_low, ci_high) = if reached == 0 {
                (0.0, 0.0, 1.0)
            } else {
                let (lo, hi) = wilson_interval(held, reached, Z_95);
                (held as f64 / reached as f64, lo, hi)
            };
            ChainStepEstimate {
                index: i + 1,
                conditioning_trials: reached,
                held,
                p_hat,
                ci_low,
                ci_high,
                bound: conditional_step_bound(word.ell(), n, i + 1),
            }
        })
        .collect();
    let mut full_chain = Estimate::from_counts(trials, acc.full, seed);
    full_chain.wall_time = Some(start.elapsed().as_secs_f64());
    let product_bound = (1..=k)
        .map(|i| conditional_step_bound(word.ell(), n, i))
        .product();
    Ok(ChainExperimentReport {
        degree: n,
        u: word.u().to_string(),
        v: word.v().to_string(),
        ell: word.ell(),
        k,
        steps,
        full_chain,
        product_bound,
        satisfaction: (k == capacity).then(|| satisfaction_bound(word.ell(), n)),
    })
}

/// Small-scale chain runs kept whole, for trajectory export.
pub fn trace_event_chains(
    n: usize,
    word: &UnimodalWord,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<crate::query::ChainRun>> {
    (0..trials)
        .map(|t| run_event_chain_with_rng(n, word, k, trial_rng(seed, t)))
        .collect()
}
