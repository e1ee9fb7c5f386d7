//! Exploration and Hard dataset construction.

use std::collections::{BTreeMap, HashSet};
use std::ops::Range;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::instances::{ClassPlan, Instance, InstanceSource};
use super::pool::{enumerate_languages, LanguagePool};
use super::stratified::stratified_sample;
use super::GenError;
use crate::alphabet::Alphabet;
use crate::attributes::{attribute_with_dfa, execution_states, language_size, RegexAttributes};
use crate::automata::{count_by_length, is_starfree, CanonicalKey, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitSizes {
    pub train_regexes: usize,
    pub train_instances_per_regex: usize,
    pub validation_regexes: usize,
    pub test_regexes: usize,
    /// Upper bound on strings per test expression.
    pub test_cap: usize,
}

impl Default for SplitSizes {
    fn default() -> Self {
        SplitSizes {
            train_regexes: 1000,
            train_instances_per_regex: 20,
            validation_regexes: 200,
            test_regexes: 500,
            test_cap: 1000,
        }
    }
}

/// Thresholds for the Hard dataset. Both bounds are exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HardFilter {
    pub min_size: u64,
    pub min_es: usize,
}

impl Default for HardFilter {
    fn default() -> Self {
        HardFilter {
            min_size: 64,
            min_es: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub alphabet: Alphabet,
    pub max_ops: usize,
    pub max_len: usize,
    pub limits: Limits,
    pub sizes: SplitSizes,
    pub hard: HardFilter,
}

impl GenConfig {
    pub fn new(seed: u64) -> Self {
        GenConfig {
            seed,
            alphabet: Alphabet::binary(),
            max_ops: 6,
            max_len: 15,
            limits: Limits::default(),
            sizes: SplitSizes::default(),
            hard: HardFilter::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Validation,
    Test,
}

impl SplitName {
    pub const ALL: [SplitName; 3] = [SplitName::Train, SplitName::Validation, SplitName::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::Train => "train",
            SplitName::Validation => "validation",
            SplitName::Test => "test",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.jsonl", self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Exploration,
    Hard,
}

impl DatasetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetKind::Exploration => "exploration",
            DatasetKind::Hard => "hard",
        }
    }
}

/// One expression of a split with its attributes and instance statistics.
#[derive(Debug, Clone)]
pub struct SplitRegex {
    pub attributes: RegexAttributes,
    pub range: Range<usize>,
    pub positives: usize,
    pub negatives: usize,
    pub es_sum: usize,
    pub length_sum: usize,
}

impl SplitRegex {
    pub fn regex(&self) -> String {
        self.attributes.regex.to_string()
    }

    pub fn instances(&self) -> usize {
        self.range.len()
    }
}

#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub name: SplitName,
    pub instances: Vec<Instance>,
    pub regexes: Vec<SplitRegex>,
    pub regex_index: BTreeMap<String, Range<usize>>,
}

impl DatasetSplit {
    fn new(name: SplitName) -> Self {
        DatasetSplit {
            name,
            instances: Vec::new(),
            regexes: Vec::new(),
            regex_index: BTreeMap::new(),
        }
    }

    pub fn instances_of(&self, regex: &str) -> &[Instance] {
        self.regex_index.get(regex).map_or(&[], |r| &self.instances[r.clone()])
    }

    pub fn keys(&self) -> impl Iterator<Item = &CanonicalKey> {
        self.regexes.iter().map(|r| &r.attributes.canonical)
    }

    fn push(&mut self, attributes: RegexAttributes, instances: Vec<Instance>, alphabet: &Alphabet) {
        let start = self.instances.len();
        let mut entry = SplitRegex {
            attributes,
            range: start..start,
            positives: 0,
            negatives: 0,
            es_sum: 0,
            length_sum: 0,
        };
        for inst in &instances {
            let word = alphabet.encode(&inst.string).expect("sampled strings use the alphabet");
            entry.es_sum += execution_states(&entry.attributes.dfa, &word);
            entry.length_sum += word.len();
            if inst.label {
                entry.positives += 1;
            } else {
                entry.negatives += 1;
            }
        }
        self.instances.extend(instances);
        entry.range = start..self.instances.len();
        self.regex_index.insert(entry.regex(), entry.range.clone());
        self.regexes.push(entry);
    }
}

/// A drawn expression that could not fill its quota, and what took its place.
#[derive(Debug, Clone, Serialize)]
pub struct Replacement {
    pub split: SplitName,
    pub regex: String,
    pub canonical: CanonicalKey,
    pub reason: String,
    pub replaced_by: String,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub kind: DatasetKind,
    pub config: GenConfig,
    pub pool_levels: Vec<usize>,
    pub excluded_languages: usize,
    pub splits: Vec<DatasetSplit>,
    pub replacements: Vec<Replacement>,
}

impl Dataset {
    pub fn split(&self, name: SplitName) -> &DatasetSplit {
        self.splits
            .iter()
            .find(|s| s.name == name)
            .expect("every dataset has all three splits")
    }
}

/// Independent generator for one named purpose. Every stream derives from
/// the same seed, so adding draws to one purpose never shifts another.
pub fn substream(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Pool = 0,
    ExplorationTrain = 1,
    ExplorationValidation = 2,
    ExplorationTest = 3,
    HardTrain = 11,
    HardValidation = 12,
    HardTest = 13,
}

impl Stream {
    fn for_split(kind: DatasetKind, split: SplitName) -> Stream {
        match (kind, split) {
            (DatasetKind::Exploration, SplitName::Train) => Stream::ExplorationTrain,
            (DatasetKind::Exploration, SplitName::Validation) => Stream::ExplorationValidation,
            (DatasetKind::Exploration, SplitName::Test) => Stream::ExplorationTest,
            (DatasetKind::Hard, SplitName::Train) => Stream::HardTrain,
            (DatasetKind::Hard, SplitName::Validation) => Stream::HardValidation,
            (DatasetKind::Hard, SplitName::Test) => Stream::HardTest,
        }
    }
}

/// The language pool both datasets draw from. It depends only on the seed,
/// alphabet and operator budget.
pub fn build_pool(config: &GenConfig) -> Result<LanguagePool, GenError> {
    let mut rng = substream(config.seed, Stream::Pool);
    enumerate_languages(config.max_ops, &config.alphabet, config.limits, &mut rng)
}

/// Pool ids grouped by operator count, keeping those `keep` accepts.
fn bins_where(pool: &LanguagePool, keep: impl Fn(usize) -> bool + Sync) -> Vec<Vec<usize>> {
    (0..=pool.max_ops())
        .map(|d| pool.level(d).par_iter().copied().filter(|&id| keep(id)).collect())
        .collect()
}

fn remove_used(bins: &[Vec<usize>], used: &HashSet<usize>) -> Vec<Vec<usize>> {
    bins.iter()
        .map(|b| b.iter().copied().filter(|id| !used.contains(id)).collect())
        .collect()
}

/// Per-split quota rule applied to (positive, negative) counts.
fn plan_for(split: SplitName, sizes: &SplitSizes, positives: u64, negatives: u64) -> Option<ClassPlan> {
    match split {
        SplitName::Train => {
            ClassPlan::as_balanced_as_possible(positives, negatives, sizes.train_instances_per_regex).ok()
        }
        SplitName::Validation => (positives > 0 && negatives > 0).then_some(ClassPlan {
            positives: 1,
            negatives: 1,
        }),
        SplitName::Test => {
            (positives > 0 && negatives > 0).then(|| ClassPlan::balanced(positives, negatives, sizes.test_cap))
        }
    }
}

struct SplitJob<'a> {
    kind: DatasetKind,
    name: SplitName,
    n: usize,
    es_floor: usize,
    bins: &'a [Vec<usize>],
}

/// Draws `job.n` expressions by stratified sampling, then samples strings
/// for each in draw order. An expression whose strings cannot meet the
/// split's quota is swapped for an unused one from the same operator bin
/// (any bin once that is empty), and the swap is recorded.
fn fill_split(
    config: &GenConfig,
    pool: &LanguagePool,
    job: SplitJob<'_>,
    used: &mut HashSet<usize>,
    replacements: &mut Vec<Replacement>,
) -> Result<DatasetSplit, GenError> {
    let mut rng = substream(config.seed, Stream::for_split(job.kind, job.name));
    let picks = stratified_sample(job.bins, job.n, &mut rng)?;
    used.extend(picks.iter().copied());
    let mut spare = remove_used(job.bins, used);
    let bin_of = |id: usize| pool.entry(id).min_ops;

    let mut split = DatasetSplit::new(job.name);
    for pick in picks {
        let mut id = pick;
        loop {
            let entry = pool.entry(id);
            let regex = entry.representative.to_string();
            let complement = entry.dfa.complement();
            let mut source = InstanceSource::new(&entry.dfa, &complement, job.es_floor, config.max_len)?;
            let (p, n) = source.totals();
            if let Some(plan) = plan_for(job.name, &config.sizes, p, n) {
                let instances = source.draw(&regex, &config.alphabet, plan, &mut rng);
                let attrs = attribute_with_dfa(&entry.representative, entry.dfa.clone(), config.limits)?;
                split.push(attrs, instances, &config.alphabet);
                break;
            }
            let next = draw_spare(&mut spare, bin_of(id), &mut rng).ok_or(GenError::InsufficientPool {
                requested: job.n,
                available: split.regexes.len(),
            })?;
            used.insert(next);
            replacements.push(Replacement {
                split: job.name,
                regex,
                canonical: entry.key.clone(),
                reason: format!("{p} positive and {n} negative strings qualify"),
                replaced_by: pool.entry(next).representative.to_string(),
            });
            id = next;
        }
    }
    Ok(split)
}

fn draw_spare<R: Rng + ?Sized>(spare: &mut [Vec<usize>], bin: usize, rng: &mut R) -> Option<usize> {
    let bin = if spare[bin].is_empty() {
        let open: Vec<usize> = (0..spare.len()).filter(|&d| !spare[d].is_empty()).collect();
        *open.get(rng.gen_range(0..open.len().max(1)))?
    } else {
        bin
    };
    let slot = rng.gen_range(0..spare[bin].len());
    Some(spare[bin].swap_remove(slot))
}

/// Ids of languages with at least one member and one non-member of length
/// at most `max_len`.
fn two_sided(pool: &LanguagePool, max_len: usize) -> Vec<bool> {
    pool.entries()
        .par_iter()
        .map(|e| {
            let p = count_by_length(&e.dfa, max_len).total();
            let n = count_by_length(&e.dfa.complement(), max_len).total();
            p > 0 && n > 0
        })
        .collect()
}

/// Canonical keys of the Exploration train expressions for `config`,
/// without sampling any strings.
pub fn exploration_train_keys(config: &GenConfig, pool: &LanguagePool) -> Result<HashSet<CanonicalKey>, GenError> {
    let mut rng = substream(config.seed, Stream::ExplorationTrain);
    let bins = bins_where(pool, |_| true);
    let picks = stratified_sample(&bins, config.sizes.train_regexes, &mut rng)?;
    Ok(picks.into_iter().map(|id| pool.entry(id).key.clone()).collect())
}

pub fn build_exploration(config: &GenConfig, pool: &LanguagePool) -> Result<Dataset, GenError> {
    let kind = DatasetKind::Exploration;
    let sizes = config.sizes;
    let mut used = HashSet::new();
    let mut replacements = Vec::new();

    let all = bins_where(pool, |_| true);
    let train = fill_split(
        config,
        pool,
        SplitJob {
            kind,
            name: SplitName::Train,
            n: sizes.train_regexes,
            es_floor: 0,
            bins: &all,
        },
        &mut used,
        &mut replacements,
    )?;

    let sided = two_sided(pool, config.max_len);
    let eligible = bins_where(pool, |id| sided[id]);
    let bins = remove_used(&eligible, &used);
    let validation = fill_split(
        config,
        pool,
        SplitJob {
            kind,
            name: SplitName::Validation,
            n: sizes.validation_regexes,
            es_floor: 0,
            bins: &bins,
        },
        &mut used,
        &mut replacements,
    )?;
    let bins = remove_used(&eligible, &used);
    let test = fill_split(
        config,
        pool,
        SplitJob {
            kind,
            name: SplitName::Test,
            n: sizes.test_regexes,
            es_floor: 0,
            bins: &bins,
        },
        &mut used,
        &mut replacements,
    )?;

    Ok(Dataset {
        kind,
        config: config.clone(),
        pool_levels: pool.level_sizes(),
        excluded_languages: 0,
        splits: vec![train, validation, test],
        replacements,
    })
}

/// Languages passing the Hard filter at the language level: not star-free,
/// more than `min_size` members, and enough minimal-DFA states that a walk
/// can visit more than `min_es` of them.
pub fn hard_candidates(
    config: &GenConfig,
    pool: &LanguagePool,
    excluded: &HashSet<CanonicalKey>,
) -> Result<Vec<Vec<usize>>, GenError> {
    let filter = config.hard;
    let verdicts: Vec<Result<bool, GenError>> = pool
        .entries()
        .par_iter()
        .map(|e| {
            if excluded.contains(&e.key)
                || e.dfa.state_count() <= filter.min_es
                || language_size(&e.dfa) <= filter.min_size
            {
                return Ok(false);
            }
            Ok(!is_starfree(&e.dfa, config.limits.max_monoid_size)?)
        })
        .collect();
    let verdicts: Vec<bool> = verdicts.into_iter().collect::<Result<_, _>>()?;
    Ok(bins_where(pool, |id| verdicts[id]))
}

/// Hard splits: sizes follow Exploration, languages come from
/// [`hard_candidates`], and every string visits more than `min_es` states.
pub fn build_hard(
    config: &GenConfig,
    pool: &LanguagePool,
    excluded: &HashSet<CanonicalKey>,
) -> Result<Dataset, GenError> {
    let kind = DatasetKind::Hard;
    let sizes = config.sizes;
    let es_floor = config.hard.min_es;
    let candidates = hard_candidates(config, pool, excluded)?;
    let excluded_languages = pool.entries().iter().filter(|e| excluded.contains(&e.key)).count();
    let mut used = HashSet::new();
    let mut replacements = Vec::new();

    let mut splits = Vec::new();
    for (name, n) in [
        (SplitName::Train, sizes.train_regexes),
        (SplitName::Validation, sizes.validation_regexes),
        (SplitName::Test, sizes.test_regexes),
    ] {
        let bins = remove_used(&candidates, &used);
        splits.push(fill_split(
            config,
            pool,
            SplitJob {
                kind,
                name,
                n,
                es_floor,
                bins: &bins,
            },
            &mut used,
            &mut replacements,
        )?);
    }

    Ok(Dataset {
        kind,
        config: config.clone(),
        pool_levels: pool.level_sizes(),
        excluded_languages,
        splits,
        replacements,
    })
}
