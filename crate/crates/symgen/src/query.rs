//! Lazy exposure of a uniform pair of permutations.
//!
//! Instead of sampling `x` and `y` up front, an [`Exposure`] answers
//! point queries against two partially defined permutations, drawing a
//! value uniformly from the still-consistent choices whenever the answer
//! is not yet determined. Walking a word through the exposure reveals
//! only the entries the walk touches, and [`Exposure::finalize`] extends
//! the partial maps to a pair that is exactly uniform no matter which
//! queries were made first.

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::words::{Letter, UnimodalWord, Word};
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One side of the exposure: an injective partial map with its inverse,
/// plus swap-remove pools so free choices sample the complement of the
/// known range (or domain) in constant time.
#[derive(Debug, Clone)]
pub struct PartialPermutation {
    forward: Vec<Option<usize>>,
    backward: Vec<Option<usize>>,
    unused_sources: Vec<usize>,
    source_pos: Vec<usize>,
    unused_targets: Vec<usize>,
    target_pos: Vec<usize>,
}

impl PartialPermutation {
    fn new(degree: usize) -> Self {
        Self {
            forward: vec![None; degree],
            backward: vec![None; degree],
            unused_sources: (0..degree).collect(),
            source_pos: (0..degree).collect(),
            unused_targets: (0..degree).collect(),
            target_pos: (0..degree).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.forward.len()
    }

    pub fn known_pairs(&self) -> usize {
        self.degree() - self.unused_sources.len()
    }

    pub fn forward(&self, point: usize) -> Option<usize> {
        self.forward[point]
    }

    pub fn backward(&self, point: usize) -> Option<usize> {
        self.backward[point]
    }

    /// True iff `point` occurs in a recorded pair, on either side.
    pub fn knows_point(&self, point: usize) -> bool {
        self.forward[point].is_some() || self.backward[point].is_some()
    }

    fn record(&mut self, source: usize, target: usize) {
        debug_assert!(self.forward[source].is_none(), "source already mapped");
        debug_assert!(self.backward[target].is_none(), "target already hit");
        self.forward[source] = Some(target);
        self.backward[target] = Some(source);
        Self::pool_remove(&mut self.unused_sources, &mut self.source_pos, source);
        Self::pool_remove(&mut self.unused_targets, &mut self.target_pos, target);
    }

    fn pool_remove(pool: &mut Vec<usize>, pos: &mut [usize], value: usize) {
        let at = pos[value];
        debug_assert_eq!(pool[at], value);
        pool.swap_remove(at);
        if let Some(&moved) = pool.get(at) {
            pos[moved] = at;
        }
    }

    fn sample_unused_target<R: RngExt>(&self, rng: &mut R) -> usize {
        self.unused_targets[rng.random_range(0..self.unused_targets.len())]
    }

    fn sample_unused_source<R: RngExt>(&self, rng: &mut R) -> usize {
        self.unused_sources[rng.random_range(0..self.unused_sources.len())]
    }

    /// Extends the partial map to a full permutation by matching the
    /// unknown domain to a uniformly shuffled unknown range. Both lists
    /// are sorted first so the outcome depends only on the rng stream and
    /// on *which* pairs are known, not on the order they were recorded.
    fn complete<R: RngExt>(mut self, rng: &mut R) -> Permutation {
        let mut sources = self.unused_sources.clone();
        sources.sort_unstable();
        let mut targets = self.unused_targets.clone();
        targets.sort_unstable();
        targets.shuffle(rng);
        for (&s, &t) in sources.iter().zip(targets.iter()) {
            self.forward[s] = Some(t);
        }
        let images = self.forward.into_iter().map(|o| o.unwrap()).collect();
        Permutation::new(images).expect("completion of an injective partial map")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceKind {
    Forced,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryResult {
    pub value: usize,
    pub kind: ChoiceKind,
    /// For a free choice: the drawn value was already in the known domain
    /// of one of the four partial maps at the instant before recording.
    /// Always false for forced choices.
    pub coincidence: bool,
}

#[derive(Debug, Clone)]
pub struct TrajectoryStep {
    pub letter: Letter,
    pub from: usize,
    pub result: QueryResult,
}

#[derive(Debug, Clone)]
pub struct TrajectoryLog {
    pub start: usize,
    pub steps: Vec<TrajectoryStep>,
}

impl TrajectoryLog {
    pub fn end(&self) -> usize {
        self.steps.last().map_or(self.start, |s| s.result.value)
    }

    /// Every point the walk touched, start included, in first-visit order.
    pub fn visited_points(&self) -> Vec<usize> {
        let mut out = vec![self.start];
        for step in &self.steps {
            if !out.contains(&step.result.value) {
                out.push(step.result.value);
            }
        }
        out
    }
}

/// A pair of partially exposed permutations sharing one rng stream.
///
/// Queries after finalization are impossible by construction:
/// [`Exposure::finalize`] consumes the exposure.
pub struct Exposure {
    n: usize,
    x: PartialPermutation,
    y: PartialPermutation,
    rng: ChaCha8Rng,
    queries: u64,
}

impl Exposure {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        Self::with_rng(n, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_rng(n: usize, rng: ChaCha8Rng) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "degree must be at least 1".into(),
            ));
        }
        Ok(Self {
            n,
            x: PartialPermutation::new(n),
            y: PartialPermutation::new(n),
            rng,
            queries: 0,
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn known_pairs(&self) -> usize {
        self.x.known_pairs() + self.y.known_pairs()
    }

    pub fn x_partial(&self) -> &PartialPermutation {
        &self.x
    }

    pub fn y_partial(&self) -> &PartialPermutation {
        &self.y
    }

    /// Answers "where does `omega` go under this letter". A forced choice
    /// replays a recorded pair; a free choice draws uniformly from the
    /// complement of the known range (domain, for inverse letters) of the
    /// queried map, so no free choice can break injectivity.
    pub fn query(&mut self, letter: Letter, omega: usize) -> Result<QueryResult> {
        if omega >= self.n {
            return Err(Error::InvalidParameter(format!(
                "point {} out of range for degree {}",
                omega + 1,
                self.n
            )));
        }
        self.queries += 1;
        let (pp, other) = match letter {
            Letter::X | Letter::XInv => (&mut self.x, &self.y),
            Letter::Y | Letter::YInv => (&mut self.y, &self.x),
        };
        let positive = letter.is_positive();
        let known = if positive {
            pp.forward[omega]
        } else {
            pp.backward[omega]
        };
        if let Some(value) = known {
            return Ok(QueryResult {
                value,
                kind: ChoiceKind::Forced,
                coincidence: false,
            });
        }
        let value = if positive {
            pp.sample_unused_target(&mut self.rng)
        } else {
            pp.sample_unused_source(&mut self.rng)
        };
        let coincidence = pp.knows_point(value) || other.knows_point(value);
        if positive {
            pp.record(omega, value);
        } else {
            pp.record(value, omega);
        }
        debug_assert!(self.known_pairs() <= 2 * self.n);
        Ok(QueryResult {
            value,
            kind: ChoiceKind::Free,
            coincidence,
        })
    }

    /// Issues one query per letter, each from the previous result. The
    /// word need not be reduced; an unreduced pair simply produces a
    /// forced backtrack.
    pub fn walk_trajectory(&mut self, word: &Word, start: usize) -> Result<TrajectoryLog> {
        if word.is_empty() {
            return Err(Error::InvalidWord(
                "cannot walk the empty word; there is nothing to query".into(),
            ));
        }
        let mut steps = Vec::with_capacity(word.len());
        let mut at = start;
        for &letter in word.letters() {
            let result = self.query(letter, at)?;
            steps.push(TrajectoryStep {
                letter,
                from: at,
                result,
            });
            at = result.value;
        }
        Ok(TrajectoryLog { start, steps })
    }

    /// Completes both partial maps uniformly at random (`x` first, then
    /// `y`). The result is exactly uniform on pairs of degree-`n`
    /// permutations regardless of which queries were answered before.
    pub fn finalize(self) -> (Permutation, Permutation) {
        let Self { x, y, mut rng, .. } = self;
        let x = x.complete(&mut rng);
        let y = y.complete(&mut rng);
        (x, y)
    }
}

/// Outcome of one trajectory inside an event chain.
#[derive(Debug, Clone)]
pub struct ChainStep {
    pub start: usize,
    /// The walk returned to its start point.
    pub event_held: bool,
    /// Some free choice in this trajectory returned the start point.
    pub free_hit_on_start: bool,
    pub trajectory: TrajectoryLog,
}

/// One run of the nested-event iteration: trajectories of the same word
/// from fresh start points, stopping at the first one that misses.
#[derive(Debug, Clone)]
pub struct ChainRun {
    pub degree: usize,
    pub requested: usize,
    pub steps: Vec<ChainStep>,
}

impl ChainRun {
    /// Number of trajectories actually walked; the chain stops after the
    /// first step whose event fails.
    pub fn completed(&self) -> usize {
        self.steps.len()
    }

    pub fn all_held(&self) -> bool {
        self.steps.len() == self.requested && self.steps.iter().all(|s| s.event_held)
    }
}

/// Walks up to `k` trajectories of `word` in one exposure, each from the
/// smallest point untouched by every earlier trajectory, recording for
/// each whether it returned to its start.
///
/// Checked on every step: a trajectory cannot return to its start unless
/// some free choice inside it produced exactly that start point. A
/// violation is reported as an error, never repaired.
pub fn run_event_chain(n: usize, word: &UnimodalWord, k: usize, seed: u64) -> Result<ChainRun> {
    run_event_chain_with_rng(n, word, k, ChaCha8Rng::seed_from_u64(seed))
}

pub fn run_event_chain_with_rng(
    n: usize,
    word: &UnimodalWord,
    k: usize,
    rng: ChaCha8Rng,
) -> Result<ChainRun> {
    let capacity = word.chain_capacity(n);
    if k == 0 {
        return Err(Error::InvalidParameter(
            "chain length must be at least 1".into(),
        ));
    }
    if k > capacity {
        return Err(Error::InvalidParameter(format!(
            "chain length {} exceeds floor(n / 2ell) = {} for n = {} and ell = {}",
            k,
            capacity,
            n,
            word.ell()
        )));
    }
    let mut exposure = Exposure::with_rng(n, rng)?;
    let mut visited = vec![false; n];
    let mut next_fresh = 0;
    let mut steps = Vec::with_capacity(k);
    for i in 0..k {
        while next_fresh < n && visited[next_fresh] {
            next_fresh += 1;
        }
        if next_fresh >= n {
            return Err(Error::InvariantViolation(format!(
                "no fresh start point before trajectory {} of {}; \
                 the capacity precondition should make this impossible",
                i + 1,
                k
            )));
        }
        let start = next_fresh;
        let trajectory = exposure.walk_trajectory(word.reduced(), start)?;
        visited[start] = true;
        for step in &trajectory.steps {
            visited[step.result.value] = true;
        }
        let event_held = trajectory.end() == start;
        let free_hit_on_start = trajectory
            .steps
            .iter()
            .any(|s| s.result.kind == ChoiceKind::Free && s.result.value == start);
        if event_held && !free_hit_on_start {
            return Err(Error::InvariantViolation(format!(
                "trajectory {} returned to its start {} without any free \
                 choice producing that point (word {}, degree {})",
                i + 1,
                start + 1,
                word.reduced(),
                n
            )));
        }
        steps.push(ChainStep {
            start,
            event_held,
            free_hit_on_start,
            trajectory,
        });
        if !event_held {
            break;
        }
    }
    Ok(ChainRun {
        degree: n,
        requested: k,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::WordEvaluator;

    fn word(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    #[test]
    fn fresh_exposure_knows_nothing() {
        let e = Exposure::new(10, 1).unwrap();
        assert_eq!(e.known_pairs(), 0);
        assert_eq!(e.queries(), 0);
        assert!(Exposure::new(0, 1).is_err());
    }

    #[test]
    fn repeat_query_is_forced_with_the_same_value() {
        let mut e = Exposure::new(8, 3).unwrap();
        let first = e.query(Letter::X, 2).unwrap();
        assert_eq!(first.kind, ChoiceKind::Free);
        let second = e.query(Letter::X, 2).unwrap();
        assert_eq!(second.kind, ChoiceKind::Forced);
        assert_eq!(second.value, first.value);
        assert!(!second.coincidence);
        assert_eq!(e.known_pairs(), 1);
    }

    #[test]
    fn inverse_query_replays_the_recorded_pair() {
        let mut e = Exposure::new(8, 4).unwrap();
        let t = e.query(Letter::Y, 5).unwrap().value;
        let back = e.query(Letter::YInv, t).unwrap();
        assert_eq!(back.kind, ChoiceKind::Forced);
        assert_eq!(back.value, 5);
    }

    #[test]
    fn degree_one_first_query_is_free_without_coincidence() {
        let mut e = Exposure::new(1, 9).unwrap();
        let r = e.query(Letter::X, 0).unwrap();
        assert_eq!(r.value, 0);
        assert_eq!(r.kind, ChoiceKind::Free);
        assert!(!r.coincidence);
        let r2 = e.query(Letter::XInv, 0).unwrap();
        assert_eq!(r2.kind, ChoiceKind::Forced);
    }

    #[test]
    fn query_rejects_out_of_range_points() {
        let mut e = Exposure::new(5, 0).unwrap();
        assert!(e.query(Letter::X, 5).is_err());
    }

    #[test]
    fn same_seed_same_answers() {
        let mut a = Exposure::new(30, 77).unwrap();
        let mut b = Exposure::new(30, 77).unwrap();
        for (letter, point) in [
            (Letter::X, 3),
            (Letter::YInv, 10),
            (Letter::Y, 3),
            (Letter::XInv, 3),
        ] {
            assert_eq!(
                a.query(letter, point).unwrap(),
                b.query(letter, point).unwrap()
            );
        }
        let (ax, ay) = a.finalize();
        let (bx, by) = b.finalize();
        assert_eq!(ax, bx);
        assert_eq!(ay, by);
    }

    #[test]
    fn unreduced_walk_backtracks_by_forced_choice() {
        let mut e = Exposure::new(12, 5).unwrap();
        let log = e.walk_trajectory(&word("xX"), 7).unwrap();
        assert_eq!(log.steps.len(), 2);
        assert_eq!(log.steps[0].result.kind, ChoiceKind::Free);
        assert_eq!(log.steps[1].result.kind, ChoiceKind::Forced);
        assert_eq!(log.end(), 7);
    }

    #[test]
    fn walk_of_the_empty_word_is_rejected() {
        let mut e = Exposure::new(4, 5).unwrap();
        assert!(e.walk_trajectory(&Word::empty(), 0).is_err());
    }

    #[test]
    fn walk_chains_queries_from_the_previous_point() {
        let mut e = Exposure::new(20, 11).unwrap();
        let log = e.walk_trajectory(&word("xyXY"), 0).unwrap();
        assert_eq!(log.steps.len(), 4);
        let mut at = 0;
        for step in &log.steps {
            assert_eq!(step.from, at);
            at = step.result.value;
        }
        assert_eq!(log.end(), at);
        assert!(log.visited_points().contains(&0));
    }

    #[test]
    fn finalize_respects_every_recorded_pair() {
        let mut e = Exposure::new(9, 42).unwrap();
        let mut x_pairs = Vec::new();
        let mut y_pairs = Vec::new();
        for p in [0, 3, 5] {
            x_pairs.push((p, e.query(Letter::X, p).unwrap().value));
            y_pairs.push((p, e.query(Letter::Y, p).unwrap().value));
        }
        let (x, y) = e.finalize();
        for (s, t) in x_pairs {
            assert_eq!(x.apply(s), t);
        }
        for (s, t) in y_pairs {
            assert_eq!(y.apply(s), t);
        }
    }

    #[test]
    fn full_exposure_makes_finalize_a_conversion() {
        let mut e = Exposure::new(6, 13).unwrap();
        let mut expected_x = Vec::new();
        let mut expected_y = Vec::new();
        for p in 0..6 {
            expected_x.push(e.query(Letter::X, p).unwrap().value);
            expected_y.push(e.query(Letter::Y, p).unwrap().value);
        }
        assert_eq!(e.known_pairs(), 12);
        let (x, y) = e.finalize();
        assert_eq!(x.images(), &expected_x[..]);
        assert_eq!(y.images(), &expected_y[..]);
    }

    #[test]
    fn free_choices_never_break_injectivity() {
        for seed in 0..50 {
            let mut e = Exposure::new(15, seed).unwrap();
            for p in 0..15 {
                e.query(Letter::X, p).unwrap();
                e.query(Letter::YInv, p).unwrap();
            }
            let (x, y) = e.finalize();
            assert_eq!(x.degree(), 15);
            assert_eq!(y.degree(), 15);
        }
    }

    #[test]
    fn trajectory_end_matches_finalized_evaluation() {
        for seed in 0..40 {
            let mut e = Exposure::new(10, seed).unwrap();
            let w = word("xxYy");
            let log = e.walk_trajectory(&w, 2).unwrap();
            let (x, y) = e.finalize();
            let eval = WordEvaluator::new(x, y).unwrap();
            assert_eq!(eval.word_image(&w, 2), log.end());
        }
    }

    #[test]
    fn chain_validates_its_length() {
        let w = UnimodalWord::parse("x", "y").unwrap();
        assert!(run_event_chain(10, &w, 0, 1).is_err());
        assert!(run_event_chain(10, &w, 3, 1).is_err());
        assert!(run_event_chain(10, &w, 2, 1).is_ok());
    }

    #[test]
    fn chain_starts_are_fresh_and_smallest_available() {
        let w = UnimodalWord::parse("x", "y").unwrap();
        for seed in 0..200 {
            let run = run_event_chain(40, &w, 10, seed).unwrap();
            assert!(run.completed() >= 1);
            assert_eq!(run.steps[0].start, 0);
            let mut visited: Vec<usize> = Vec::new();
            for step in &run.steps {
                assert!(!visited.contains(&step.start), "start point reused");
                let fresh_min = (0..40).find(|p| !visited.contains(p)).unwrap();
                assert_eq!(step.start, fresh_min);
                visited.extend(step.trajectory.visited_points());
            }
        }
    }

    #[test]
    fn chain_stops_at_the_first_miss() {
        let w = UnimodalWord::parse("x", "y").unwrap();
        for seed in 0..200 {
            let run = run_event_chain(24, &w, 6, seed).unwrap();
            for step in &run.steps[..run.completed() - 1] {
                assert!(step.event_held);
            }
            assert_eq!(
                run.all_held(),
                run.completed() == 6 && run.steps[5].event_held
            );
        }
    }

    #[test]
    fn chains_run_clean_across_words_and_seeds() {
        for (u, v) in [("x", "y"), ("xx", "y"), ("xy", "yx"), ("x", "1"), ("1", "xy")] {
            let w = UnimodalWord::parse(u, v).unwrap();
            for seed in 0..300 {
                let k = w.chain_capacity(16);
                run_event_chain(16, &w, k, seed)
                    .unwrap_or_else(|e| panic!("u={u} v={v} seed={seed}: {e}"));
            }
        }
    }
}
