//! Dataset generation.

mod datasets;
mod instances;
mod manifest;
mod pool;
mod stratified;

use std::path::PathBuf;

use thiserror::Error;

pub use datasets::{
    build_exploration, build_hard, build_pool, exploration_train_keys, hard_candidates, substream, Dataset,
    DatasetKind, DatasetSplit, GenConfig, HardFilter, Replacement, SplitName, SplitRegex, SplitSizes, Stream,
};
pub use instances::{
    allocate_lengths, draw_class, sample_instances, ClassCounter, ClassPlan, Instance, InstanceSource,
};
pub use manifest::{
    read_instances, read_train_keys, write_dataset, write_instances, Fixed4, Manifest, SplitStats, GENERATOR,
};
pub use pool::{enumerate_languages, LanguagePool, PoolEntry};
pub use stratified::{bin_quotas, stratified_sample};

use crate::automata::AutomataError;

#[derive(Debug, Error)]
pub enum GenError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("pool holds {available} eligible languages but {requested} were requested")]
    InsufficientPool { requested: usize, available: usize },
    #[error("only {available} strings exist but {requested} were requested")]
    DegenerateLanguage { available: u64, requested: usize },
    #[error("execution-state filtering supports at most 128 DFA states, got {states}")]
    TooManyStates { states: usize },
    #[error("output directory {0} already exists and is not empty")]
    OutputExists(PathBuf),
    #[error("malformed manifest: {0}")]
    BadManifest(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
