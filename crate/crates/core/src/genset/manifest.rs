//! Split files and the manifest describing them.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use super::datasets::{Dataset, DatasetKind, DatasetSplit, HardFilter, Replacement, SplitName, SplitSizes};
use super::instances::Instance;
use super::GenError;
use crate::alphabet::Alphabet;
use crate::attributes::SIZE_MAX_LEN;
use crate::automata::CanonicalKey;

pub const GENERATOR: &str = concat!("regset ", env!("CARGO_PKG_VERSION"));

/// A float written with exactly four decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed4(pub f64);

impl Serialize for Fixed4 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format!("{:.4}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub generator: &'static str,
    pub dataset: DatasetKind,
    pub seed: u64,
    pub alphabet: Alphabet,
    pub epsilon_atoms: bool,
    pub max_ops: usize,
    pub max_len: usize,
    pub size_max_len: usize,
    pub max_dfa_states: usize,
    pub max_monoid_size: usize,
    pub pool_levels: Vec<usize>,
    pub split_sizes: SplitSizes,
    pub filter: FilterRecord,
    pub splits: Vec<SplitRecord>,
    pub replacements: Vec<Replacement>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterRecord {
    pub description: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<HardFilter>,
    pub excluded_languages: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitRecord {
    pub name: SplitName,
    pub file: String,
    pub regexes: usize,
    pub instances: usize,
    pub positives: usize,
    pub negatives: usize,
    pub starfree_fraction: Fixed4,
    pub mean_compositions: Fixed4,
    pub median_size: Fixed4,
    pub mean_es: Fixed4,
    pub mean_length: Fixed4,
    pub entries: Vec<EntryRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryRecord {
    pub regex: String,
    pub canonical: CanonicalKey,
    pub starfree: bool,
    pub size: u64,
    pub compositions: usize,
    pub dfa_states: usize,
    pub instances: usize,
    pub positives: usize,
    pub negatives: usize,
}

/// Attribute statistics of one split: star-free share, mean composition and
/// median size over expressions; mean execution states and length over
/// instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitStats {
    pub starfree_fraction: f64,
    pub mean_compositions: f64,
    pub median_size: f64,
    pub mean_es: f64,
    pub mean_length: f64,
}

impl SplitStats {
    pub fn of(split: &DatasetSplit) -> SplitStats {
        let n = split.regexes.len().max(1) as f64;
        let m = split.instances.len().max(1) as f64;
        let mut sizes: Vec<u64> = split.regexes.iter().map(|r| r.attributes.size).collect();
        sizes.sort_unstable();
        let median_size = match sizes.len() {
            0 => 0.0,
            k if k % 2 == 1 => sizes[k / 2] as f64,
            k => (sizes[k / 2 - 1] + sizes[k / 2]) as f64 / 2.0,
        };
        SplitStats {
            starfree_fraction: split.regexes.iter().filter(|r| r.attributes.starfree).count() as f64 / n,
            mean_compositions: split.regexes.iter().map(|r| r.attributes.compositions).sum::<usize>() as f64 / n,
            median_size,
            mean_es: split.regexes.iter().map(|r| r.es_sum).sum::<usize>() as f64 / m,
            mean_length: split.regexes.iter().map(|r| r.length_sum).sum::<usize>() as f64 / m,
        }
    }
}

impl Manifest {
    pub fn of(ds: &Dataset) -> Manifest {
        let config = &ds.config;
        let (description, thresholds) = match ds.kind {
            DatasetKind::Exploration => ("all enumerated languages", None),
            DatasetKind::Hard => (
                "not star-free; size above min_size; every string visits more than min_es states; \
                 language absent from the exploration train split",
                Some(config.hard),
            ),
        };
        Manifest {
            generator: GENERATOR,
            dataset: ds.kind,
            seed: config.seed,
            alphabet: config.alphabet.clone(),
            epsilon_atoms: true,
            max_ops: config.max_ops,
            max_len: config.max_len,
            size_max_len: SIZE_MAX_LEN,
            max_dfa_states: config.limits.max_dfa_states,
            max_monoid_size: config.limits.max_monoid_size,
            pool_levels: ds.pool_levels.clone(),
            split_sizes: config.sizes,
            filter: FilterRecord {
                description,
                thresholds,
                excluded_languages: ds.excluded_languages,
            },
            splits: ds.splits.iter().map(split_record).collect(),
            replacements: ds.replacements.clone(),
        }
    }
}

fn split_record(split: &DatasetSplit) -> SplitRecord {
    let stats = SplitStats::of(split);
    SplitRecord {
        name: split.name,
        file: split.name.file_name(),
        regexes: split.regexes.len(),
        instances: split.instances.len(),
        positives: split.regexes.iter().map(|r| r.positives).sum(),
        negatives: split.regexes.iter().map(|r| r.negatives).sum(),
        starfree_fraction: Fixed4(stats.starfree_fraction),
        mean_compositions: Fixed4(stats.mean_compositions),
        median_size: Fixed4(stats.median_size),
        mean_es: Fixed4(stats.mean_es),
        mean_length: Fixed4(stats.mean_length),
        entries: split
            .regexes
            .iter()
            .map(|r| EntryRecord {
                regex: r.regex(),
                canonical: r.attributes.canonical.clone(),
                starfree: r.attributes.starfree,
                size: r.attributes.size,
                compositions: r.attributes.compositions,
                dfa_states: r.attributes.dfa_states,
                instances: r.instances(),
                positives: r.positives,
                negatives: r.negatives,
            })
            .collect(),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> GenError + '_ {
    move |source| GenError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One JSON object per line, LF-terminated.
pub fn write_instances(path: &Path, instances: &[Instance]) -> Result<(), GenError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    for inst in instances {
        serde_json::to_writer(&mut out, inst)?;
        out.write_all(b"\n").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn read_instances(path: &Path) -> Result<Vec<Instance>, GenError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(io_err(path))?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Writes the three split files and then `manifest.json` into a staging
/// directory next to `out`, and renames it into place. Nothing is left
/// behind on failure.
pub fn write_dataset(ds: &Dataset, out: &Path) -> Result<(), GenError> {
    if out.exists() {
        let empty = fs::read_dir(out).map_err(io_err(out))?.next().is_none();
        if !empty {
            return Err(GenError::OutputExists(out.to_path_buf()));
        }
        fs::remove_dir(out).map_err(io_err(out))?;
    }
    let staging = staging_dir(out);
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(io_err(&staging))?;
    }
    fs::create_dir_all(&staging).map_err(io_err(&staging))?;
    let result = write_files(ds, &staging).and_then(|()| fs::rename(&staging, out).map_err(io_err(out)));
    if result.is_err() {
        let _ = fs::remove_dir_all(&staging);
    }
    result
}

fn staging_dir(out: &Path) -> PathBuf {
    let name = out
        .file_name()
        .map_or_else(|| "dataset".into(), |n| n.to_string_lossy().into_owned());
    out.with_file_name(format!(".{name}.partial"))
}

fn write_files(ds: &Dataset, dir: &Path) -> Result<(), GenError> {
    for split in &ds.splits {
        write_instances(&dir.join(split.name.file_name()), &split.instances)?;
    }
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&Manifest::of(ds))?;
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))
}

/// Canonical keys listed for the train split in a dataset directory's
/// manifest.
pub fn read_train_keys(dir: &Path) -> Result<HashSet<CanonicalKey>, GenError> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let manifest: serde_json::Value = serde_json::from_str(&text)?;
    let bad = |what: &str| GenError::BadManifest(format!("{}: {what}", path.display()));
    let train = manifest["splits"]
        .as_array()
        .and_then(|splits| splits.iter().find(|s| s["name"] == "train"))
        .ok_or_else(|| bad("no train split"))?;
    train["entries"]
        .as_array()
        .ok_or_else(|| bad("train split has no entries"))?
        .iter()
        .map(|e| {
            let hex = e["canonical"]
                .as_str()
                .ok_or_else(|| bad("entry without canonical key"))?;
            CanonicalKey::from_hex(hex).map_err(|err| bad(&err.to_string()))
        })
        .collect()
}
