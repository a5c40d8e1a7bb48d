//! Symbolic iteration of the perturbation equation into heat (`H`), drift
//! (`W`) and remainder (`Z`) buckets, and their numerical evaluation.

pub mod evaluate;
pub mod expand;
pub mod term;
pub mod verify;

pub use evaluate::{evaluate_term, Bindings, Evaluator};
pub use expand::{
    classify, expand, expand_with_limit, Bucket, BucketValues, DecompositionResult,
    DEFAULT_TERM_LIMIT, MAX_N,
};
pub use term::{Leaf, TermExpr, TermStore, Tree, TreeId};
pub use verify::{perturbation_bindings, verify_decomposition, DecompositionReport, TermNorm};
