//! Exact-rational stability checkers for random matchings.
//!
//! A random matching assigns each agent–object pair a probability. This crate decides
//! ex-ante, robust ex-post, ex-post, fractional and claimwise stability (plus the
//! Aharoni–Fleiner and stochastic-dominance variants) for strict, weak-order and
//! generalized markets, and returns witnesses or certificate decompositions.

pub mod audit;
pub mod concepts;
pub mod decomposition;
pub mod deterministic;
pub mod error;
pub mod instance;
pub mod matching;
pub mod rational;
pub mod transform;

pub use audit::{corpus, run_audit, AuditConfig, AuditReport, CorpusCase};
pub use concepts::{
    check_af_fractional, check_all, check_claimwise, check_concept, check_ex_ante, check_ex_post, check_fractional,
    check_fractional_dual, check_robust_ex_post, check_sd_stability, sd_dominates, Concept, SdRelation, SdStrength,
    Verdict, VerdictRecord,
};
pub use decomposition::{bvn_decompose, Decomposition, FeasibilitySystem, Part};
pub use deterministic::{Witness, WitnessKind};
pub use error::{Error, Result};
pub use instance::{Comparison, Entity, Instance, ModelTier, Side, WeakOrder};
pub use matching::{DeterministicMatching, RandomMatching, SlackVector, DEFAULT_CAP};
pub use rational::Rat;
pub use transform::{
    respects_individual_rationality, respects_non_wastefulness, restrict_back, to_associated_instance,
    to_associated_matching, AssociationMap,
};
