//! Expression-level scoring of prediction files.
//!
//! Every expression weighs the same regardless of how many strings it has:
//! accuracy is averaged per expression first, then across expressions.

mod baselines;
mod slices;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

pub use baselines::{baseline_majority, baseline_random};
pub use slices::{slice_report, AttributeCache, EsPoint, SliceRow, Slices, UNSEEN_BUCKETS};

use crate::alphabet::Alphabet;
use crate::automata::AutomataError;
use crate::genset::{Fixed4, Instance};
use crate::regex::SyntaxError;

/// Thresholds reported by default.
pub const DEFAULT_K: [u32; 3] = [80, 90, 100];

/// ES groups with fewer instances than this are left out of the curve.
pub const ES_MIN_GROUP: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Prediction {
    pub regex: String,
    pub string: String,
    pub pred: bool,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction for ({regex:?}, {string:?}) has no gold instance")]
    MissingGold { regex: String, string: String },
    #[error("conflicting predictions for ({regex:?}, {string:?})")]
    ConflictingPrediction { regex: String, string: String },
    #[error("{count} gold instances have no prediction")]
    MissingPredictions { count: usize },
    #[error("gold split is empty")]
    EmptySplit,
    #[error("threshold {0} is outside 0..=100")]
    BadThreshold(u32),
    #[error("gold regex {regex:?}: {source}")]
    Syntax { regex: String, source: SyntaxError },
    #[error("gold string {0:?} uses letters outside the alphabet")]
    ForeignString(String),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
}

/// Correct and total predictions for one expression.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
}

impl Tally {
    pub fn add(&mut self, correct: bool) {
        self.correct += correct as usize;
        self.total += 1;
    }

    /// Fraction correct, in `[0, 1]`.
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    /// Accuracy of at least `k` percent, compared exactly.
    pub fn at_least(&self, k: u32) -> bool {
        self.correct * 100 >= k as usize * self.total
    }
}

/// Outcome of matching predictions against gold, before aggregation.
#[derive(Debug, Clone)]
pub struct Scores {
    /// Per-gold-instance correctness, aligned with the gold sequence.
    pub correct: Vec<bool>,
    pub per_regex: BTreeMap<String, Tally>,
    /// Gold instances without a prediction (scored as wrong).
    pub missing: usize,
    pub missing_regexes: Vec<String>,
}

/// Matches predictions to gold instances by `(regex, string)`.
///
/// Gold may list a pair more than once; each occurrence is scored. A pair
/// may be predicted more than once only with the same answer. With
/// `strict`, missing predictions are an error; otherwise they count as
/// wrong and are logged.
pub fn score(gold: &[Instance], preds: &[Prediction], strict: bool) -> Result<Scores, EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptySplit);
    }
    let gold_pairs: HashMap<(&str, &str), ()> = gold
        .iter()
        .map(|g| ((g.regex.as_str(), g.string.as_str()), ()))
        .collect();
    let mut answers: HashMap<(&str, &str), bool> = HashMap::with_capacity(preds.len());
    for p in preds {
        let pair = (p.regex.as_str(), p.string.as_str());
        if !gold_pairs.contains_key(&pair) {
            return Err(EvalError::MissingGold {
                regex: p.regex.clone(),
                string: p.string.clone(),
            });
        }
        if let Some(prev) = answers.insert(pair, p.pred) {
            if prev != p.pred {
                return Err(EvalError::ConflictingPrediction {
                    regex: p.regex.clone(),
                    string: p.string.clone(),
                });
            }
        }
    }

    let mut correct = Vec::with_capacity(gold.len());
    let mut per_regex: BTreeMap<String, Tally> = BTreeMap::new();
    let mut missing_by_regex: BTreeMap<&str, usize> = BTreeMap::new();
    for g in gold {
        let ok = match answers.get(&(g.regex.as_str(), g.string.as_str())) {
            Some(&pred) => pred == g.label,
            None => {
                *missing_by_regex.entry(&g.regex).or_default() += 1;
                false
            }
        };
        correct.push(ok);
        per_regex.entry(g.regex.clone()).or_default().add(ok);
    }
    let missing = missing_by_regex.values().sum();
    if missing > 0 {
        if strict {
            return Err(EvalError::MissingPredictions { count: missing });
        }
        log::warn!(
            "{missing} gold instances have no prediction and count as wrong; affected regexes: {}",
            missing_by_regex.keys().copied().collect::<Vec<_>>().join(" ")
        );
    }
    Ok(Scores {
        correct,
        per_regex,
        missing,
        missing_regexes: missing_by_regex.into_keys().map(str::to_string).collect(),
    })
}

/// Accuracy of one expression's predictions, in `[0, 1]`.
pub fn regex_accuracy(tally: &Tally) -> f64 {
    tally.accuracy()
}

/// Percentage of expressions with accuracy of at least `k` percent.
pub fn perf_at_k<'a>(tallies: impl IntoIterator<Item = &'a Tally>, k: u32) -> Result<f64, EvalError> {
    if k > 100 {
        return Err(EvalError::BadThreshold(k));
    }
    let (mut hit, mut n) = (0usize, 0usize);
    for t in tallies {
        hit += t.at_least(k) as usize;
        n += 1;
    }
    if n == 0 {
        return Err(EvalError::EmptySplit);
    }
    Ok(100.0 * hit as f64 / n as f64)
}

/// Unweighted mean of per-expression accuracy, as a percentage.
pub fn mean_regex_accuracy<'a>(tallies: impl IntoIterator<Item = &'a Tally>) -> Result<f64, EvalError> {
    let (mut sum, mut n) = (0.0, 0usize);
    for t in tallies {
        sum += t.accuracy();
        n += 1;
    }
    if n == 0 {
        return Err(EvalError::EmptySplit);
    }
    Ok(100.0 * sum / n as f64)
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub alphabet: Alphabet,
    pub strict: bool,
    /// Thresholds for `perf_at`, on top of [`DEFAULT_K`].
    pub extra_k: Vec<u32>,
    /// Train instances for the unseen-sub-expression slices.
    pub train: Option<Vec<Instance>>,
    pub slices: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            alphabet: Alphabet::binary(),
            strict: false,
            extra_k: Vec::new(),
            train: None,
            slices: true,
        }
    }
}

fn fixed<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    Fixed4(*value).serialize(serializer)
}

fn fixed_map<K: Serialize + Ord, S: Serializer>(map: &BTreeMap<K, f64>, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_map(map.iter().map(|(k, v)| (k, Fixed4(*v))))
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub regexes: usize,
    pub instances: usize,
    pub missing: usize,
    #[serde(serialize_with = "fixed")]
    pub mean_regex_accuracy: f64,
    #[serde(serialize_with = "fixed")]
    pub instance_accuracy: f64,
    #[serde(serialize_with = "fixed_map")]
    pub perf_at: BTreeMap<u32, f64>,
    #[serde(serialize_with = "fixed_map")]
    pub per_regex: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slices: Option<Slices>,
}

impl EvalReport {
    pub fn perf(&self, k: u32) -> Option<f64> {
        self.perf_at.get(&k).copied()
    }
}

pub fn evaluate(gold: &[Instance], preds: &[Prediction], options: &EvalOptions) -> Result<EvalReport, EvalError> {
    let scores = score(gold, preds, options.strict)?;
    let mut perf_at = BTreeMap::new();
    for &k in DEFAULT_K.iter().chain(&options.extra_k) {
        perf_at.insert(k, perf_at_k(scores.per_regex.values(), k)?);
    }
    let slices = if options.slices {
        let mut cache = AttributeCache::new(options.alphabet.clone());
        Some(slice_report(gold, &scores, &mut cache, options.train.as_deref())?)
    } else {
        None
    };
    Ok(EvalReport {
        regexes: scores.per_regex.len(),
        instances: gold.len(),
        missing: scores.missing,
        mean_regex_accuracy: mean_regex_accuracy(scores.per_regex.values())?,
        instance_accuracy: 100.0 * scores.correct.iter().filter(|&&c| c).count() as f64 / gold.len() as f64,
        perf_at,
        per_regex: scores
            .per_regex
            .iter()
            .map(|(r, t)| (r.clone(), 100.0 * t.accuracy()))
            .collect(),
        slices,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EvalError + '_ {
    move |source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a JSON Lines file, skipping blank lines.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, EvalError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|source| EvalError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        out.push(value);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), EvalError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut out, item).map_err(|source| EvalError::Json {
            path: path.to_path_buf(),
            line: 0,
            source,
        })?;
        out.write_all(b"\n").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn pct(value: f64) -> String {
    format!("{value:.4}")
}

/// Writes `summary.csv` plus one CSV per slice table into `dir`.
pub fn write_report_csvs(report: &EvalReport, split: &str, dir: &Path) -> Result<Vec<PathBuf>, EvalError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let mut summary = String::from("split,regexes,instances,acc");
    for k in report.perf_at.keys() {
        summary.push_str(&format!(",perf_at_{k}"));
    }
    summary.push('\n');
    summary.push_str(&format!(
        "{split},{},{},{}",
        report.regexes,
        report.instances,
        pct(report.mean_regex_accuracy)
    ));
    for v in report.perf_at.values() {
        summary.push_str(&format!(",{}", pct(*v)));
    }
    summary.push('\n');
    written.push(write_text(dir, "summary.csv", &summary)?);

    if let Some(slices) = &report.slices {
        for (name, rows) in slices.tables() {
            written.push(write_text(dir, &format!("{name}.csv"), &slices::rows_csv(rows))?);
        }
        written.push(write_text(dir, "es_curve.csv", &slices::es_csv(&slices.es_curve))?);
    }
    Ok(written)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, EvalError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}
