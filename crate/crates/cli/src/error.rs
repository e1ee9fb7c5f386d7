use std::path::PathBuf;

use regset::alphabet::AlphabetError;
use regset::automata::AutomataError;
use regset::evalkit::EvalError;
use regset::genset::GenError;
use regset::regex::SyntaxError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("{regex:?}: {source}")]
    Syntax { regex: String, source: SyntaxError },
    #[error("{text:?}: {source}")]
    Alphabet { text: String, source: AlphabetError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    error: &'a str,
    message: String,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Gen(e) => match e {
                GenError::Automata(_) => "budget_exceeded",
                GenError::InsufficientPool { .. } => "insufficient_pool",
                GenError::DegenerateLanguage { .. } => "degenerate_language",
                GenError::TooManyStates { .. } => "too_many_states",
                GenError::OutputExists(_) => "output_exists",
                GenError::BadManifest(_) => "bad_manifest",
                GenError::Io { .. } => "io",
                GenError::Json(_) => "json",
            },
            CliError::Eval(e) => match e {
                EvalError::MissingGold { .. } => "missing_gold",
                EvalError::ConflictingPrediction { .. } => "conflicting_prediction",
                EvalError::MissingPredictions { .. } => "missing_predictions",
                EvalError::EmptySplit => "empty_split",
                EvalError::BadThreshold(_) => "bad_threshold",
                EvalError::Syntax { .. } => "syntax",
                EvalError::ForeignString(_) => "foreign_string",
                EvalError::Automata(_) => "budget_exceeded",
                EvalError::Io { .. } => "io",
                EvalError::Json { .. } => "json",
            },
            CliError::Automata(_) => "budget_exceeded",
            CliError::Syntax { .. } => "syntax",
            CliError::Alphabet { .. } => "alphabet",
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorObject {
            error: self.kind(),
            message: self.to_string(),
        })
        .unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.kind()))
    }
}

pub fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
