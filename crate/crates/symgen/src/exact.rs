//! Exhaustive ground truth at small degree: exact probabilities by full
//! enumeration of S_n x S_n, and breadth-first closures that double-check
//! the stabilizer chain. Estimators are validated against these, never
//! the other way around.

use crate::analysis::{classify, VerdictHistogram};
use crate::error::{Error, Result};
use crate::estimate::{run_trials, satisfaction_bound};
use crate::perm::Permutation;
use crate::words::{UnimodalWord, Word, WordEvaluator};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::{HashSet, VecDeque};

/// 8! = 40320 permutations is where full enumeration stops being cheap.
pub const MAX_ENUMERATION_DEGREE: usize = 8;

/// An exact rational probability. Stored as counted, reported in lowest
/// terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactProbability {
    successes: BigUint,
    total: BigUint,
}

impl ExactProbability {
    pub fn new(successes: BigUint, total: BigUint) -> Self {
        assert!(!total.is_zero() && successes <= total);
        Self { successes, total }
    }

    pub fn from_counts(successes: u64, total: u64) -> Self {
        Self::new(BigUint::from(successes), BigUint::from(total))
    }

    pub fn numerator(&self) -> BigUint {
        &self.successes / self.successes.gcd(&self.total)
    }

    pub fn denominator(&self) -> BigUint {
        &self.total / self.successes.gcd(&self.total)
    }

    /// "p/q" in lowest terms.
    pub fn fraction_string(&self) -> String {
        format!("{}/{}", self.numerator(), self.denominator())
    }

    /// Decimal expansion rounded half-up to 12 digits.
    pub fn decimal_string(&self) -> String {
        let scale = BigUint::from(10u32).pow(12);
        let scaled = (&self.successes * &scale * 2u32 + &self.total) / (&self.total * 2u32);
        let int_part = &scaled / &scale;
        let frac_part = &scaled % &scale;
        format!("{}.{:0>12}", int_part, frac_part.to_string())
    }

    pub fn to_f64(&self) -> f64 {
        self.successes.to_f64().expect("counts fit in f64")
            / self.total.to_f64().expect("counts fit in f64")
    }

    /// Raw counts before reduction; enumeration totals fit in u64.
    pub fn success_count(&self) -> u64 {
        self.successes.to_u64().expect("enumeration counts fit in u64")
    }

    pub fn total_count(&self) -> u64 {
        self.total.to_u64().expect("enumeration counts fit in u64")
    }
}

impl std::fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.fraction_string())
    }
}

impl Serialize for ExactProbability {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ExactProbability", 2)?;
        s.serialize_field("fraction", &self.fraction_string())?;
        s.serialize_field("decimal", &self.decimal_string())?;
        s.end()
    }
}

/// All of S_n in lexicographic order of image lists.
pub fn all_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n == 0 || n > MAX_ENUMERATION_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: n,
            max: MAX_ENUMERATION_DEGREE,
            context: "full enumeration of the symmetric group".into(),
        });
    }
    fn extend(images: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        let n = used.len();
        if images.len() == n {
            out.push(Permutation::new(images.clone()).expect("bijection by construction"));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                images.push(v);
                extend(images, used, out);
                images.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::with_capacity((1..=n).product());
    extend(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactGenerationReport {
    pub degree: usize,
    /// Fraction of pairs generating a group that contains the
    /// alternating group.
    pub probability: ExactProbability,
    pub histogram: VerdictHistogram,
}

/// Classifies every pair in S_n x S_n. Degree 7 means 25.4 million
/// classifications, so it sits behind an explicit opt-in.
pub fn exact_generation_probability(
    n: usize,
    allow_large: bool,
    workers: usize,
) -> Result<ExactGenerationReport> {
    let max = if allow_large { 7 } else { 6 };
    if n < 2 || n > max {
        return Err(Error::InvalidParameter(format!(
            "exact generation enumeration covers degrees 2 through 6 \
             (7 with the large opt-in); got {n}"
        )));
    }
    let perms = all_permutations(n)?;
    let histogram = run_trials(
        perms.len() as u64,
        workers,
        VerdictHistogram::default,
        |hist, t| {
            let x = &perms[t as usize];
            for y in &perms {
                hist.record(classify(x, y)?.verdict);
            }
            Ok(())
        },
        |mut a, b| {
            a.merge(&b);
            a
        },
    )?;
    let total = (perms.len() * perms.len()) as u64;
    debug_assert_eq!(histogram.total(), total);
    Ok(ExactGenerationReport {
        degree: n,
        probability: ExactProbability::from_counts(histogram.at_least_alternating(), total),
        histogram,
    })
}

/// 5! squared is 14400 pairs; beyond that the word sweep stops being
/// instant.
pub const MAX_WORD_ENUMERATION_DEGREE: usize = 5;

/// Exact probability that `word` evaluates to the identity at a uniform
/// pair, by enumerating all of S_n x S_n.
pub fn exact_word_identity_probability(word: &Word, n: usize) -> Result<ExactProbability> {
    if n == 0 || n > MAX_WORD_ENUMERATION_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: n,
            max: MAX_WORD_ENUMERATION_DEGREE,
            context: "exact word identity enumeration".into(),
        });
    }
    let perms = all_permutations(n)?;
    let mut successes = 0u64;
    for x in &perms {
        for y in &perms {
            let eval = WordEvaluator::new(x.clone(), y.clone())?;
            if eval.fixes_all(word) {
                successes += 1;
            }
        }
    }
    Ok(ExactProbability::from_counts(
        successes,
        (perms.len() * perms.len()) as u64,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactWordReport {
    pub degree: usize,
    pub u: String,
    pub v: String,
    pub ell: usize,
    pub probability: ExactProbability,
    pub bound: f64,
}

/// Exact identity probability of a two-sided word, checked against the
/// closed-form bound by exact rational comparison. A bound violation
/// here is a genuine counterexample and surfaces as an error.
pub fn exact_unimodal_identity_probability(
    word: &UnimodalWord,
    n: usize,
) -> Result<ExactWordReport> {
    let probability = exact_word_identity_probability(word.reduced(), n)?;
    let ell = word.ell();
    let bound = satisfaction_bound(ell, n);
    // p <= (2l/n)^e  <=>  successes * n^e <= total * (2l)^e, exactly.
    let e = (n / (2 * ell)) as u32;
    let lhs = probability.numerator() * BigUint::from(n).pow(e);
    let rhs = probability.denominator() * BigUint::from(2 * ell).pow(e);
    if lhs > rhs {
        return Err(Error::BoundViolation(format!(
            "exact identity probability {} of ({}, {}) at degree {} exceeds the bound {}",
            probability.fraction_string(),
            word.u(),
            word.v(),
            n,
            bound
        )));
    }
    Ok(ExactWordReport {
        degree: n,
        u: word.u().to_string(),
        v: word.v().to_string(),
        ell,
        probability,
        bound,
    })
}

/// Breadth-first closure of the generators: every element of the
/// generated group, in deterministic discovery order.
pub fn exhaustive_elements(degree: usize, gens: &[Permutation]) -> Result<Vec<Permutation>> {
    if degree == 0 || degree > MAX_ENUMERATION_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree,
            max: MAX_ENUMERATION_DEGREE,
            context: "breadth-first group closure".into(),
        });
    }
    for g in gens {
        if g.degree() != degree {
            return Err(Error::DegreeMismatch {
                left: degree,
                right: g.degree(),
            });
        }
    }
    let identity = Permutation::identity(degree);
    let mut seen = HashSet::from([identity.clone()]);
    let mut order_found = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    while let Some(cur) = queue.pop_front() {
        for g in gens {
            let next = cur.compose(g)?;
            if seen.insert(next.clone()) {
                order_found.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(order_found)
}

/// Group order by brute-force closure; the independent check for the
/// stabilizer chain.
pub fn exhaustive_order(degree: usize, gens: &[Permutation]) -> Result<BigUint> {
    Ok(BigUint::from(exhaustive_elements(degree, gens)?.len()))
}
