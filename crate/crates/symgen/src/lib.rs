//! Random generation of the symmetric group, studied experimentally.
//!
//! Two permutations of n points drawn uniformly at random almost always
//! generate the whole symmetric or alternating group, and the failure
//! probability admits sharp closed forms. This crate holds the machinery
//! to measure that and its supporting cast empirically, and to check
//! every measurement against an exact value or a proved bound:
//!
//! - [`perm`]: permutations with composition, cycle structure, parity,
//!   uniform sampling, and both text formats (one-line images and cycle
//!   notation).
//! - [`words`]: words in two free generators, reduction, evaluation, and
//!   the two-sided positive words whose identity probability the bound
//!   machinery controls.
//! - [`query`]: the lazy-exposure model. A pair of permutations is
//!   revealed one image at a time while a word walks across unknown
//!   territory; unforced choices stay uniform, and the finished exposure
//!   finalizes into an exactly uniform pair. Event chains over fresh
//!   start points live here too.
//! - [`analysis`]: what a pair generates. Orbits, block systems, a
//!   deterministic Schreier-Sims stabilizer chain for exact orders, and
//!   a five-way classification of the generated group.
//! - [`estimate`]: Monte Carlo experiments with Wilson intervals, pinned
//!   closed-form bounds, and per-trial seed derivation that makes every
//!   worker count reproduce the same counts.
//! - [`exact`]: exhaustive enumeration at small degree, the ground truth
//!   the estimators are validated against.
//! - [`report`]: CSV, JSON, and JSONL renderings that are byte-identical
//!   across reruns of the same configuration.
//!
//! The `examples/` directory is the guided tour; each example runs one
//! capability end to end. A thin `symgen` binary wraps the experiments
//! for scripted use.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod perm;
pub mod query;
pub mod report;
pub mod words;

pub use analysis::{
    classify, classify_with_order, group_order, is_transitive, orbits, primitivity,
    BlockSystem, GroupClassification, Primitivity, StabilizerChain, Verdict, VerdictHistogram,
};
pub use error::{Error, Result};
pub use estimate::{
    collision_union_bound, conditional_step_bound, estimate_generation, estimate_word_identity,
    order_growth_experiment, run_event_chain_experiment, satisfaction_bound, series_value,
    wilson_interval, ChainExperimentReport, Estimate, GenerationReport, OrderGrowthReport,
    WordIdentityReport, SERIES_COEFFICIENTS,
};
pub use exact::{
    exact_generation_probability, exact_unimodal_identity_probability,
    exact_word_identity_probability, exhaustive_elements, exhaustive_order, all_permutations,
    ExactGenerationReport, ExactProbability, ExactWordReport,
};
pub use perm::{CycleType, Permutation};
pub use query::{ChainRun, ChoiceKind, Exposure, QueryResult, TrajectoryLog};
pub use words::{Letter, UnimodalWord, Word, WordEvaluator};
