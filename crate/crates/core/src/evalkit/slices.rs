//! Accuracy broken down by hardness attribute.

use std::collections::{BTreeMap, HashMap};

use serde::{Serialize, Serializer};

use super::{pct, perf_at_k, EvalError, Scores, Tally, DEFAULT_K, ES_MIN_GROUP};
use crate::alphabet::Alphabet;
use crate::attributes::{attribute_regex, covered_subexpressions, execution_states, unseen_against, RegexAttributes};
use crate::automata::Limits;
use crate::genset::{Fixed4, Instance};
use crate::regex::{parse_with, Regex};

/// Composition counts examined separately in the unseen-sub-expression
/// table.
pub const UNSEEN_BUCKETS: [usize; 3] = [4, 5, 6];

/// Parsed expressions and their attributes, computed once per expression.
pub struct AttributeCache {
    alphabet: Alphabet,
    limits: Limits,
    entries: HashMap<String, RegexAttributes>,
}

impl AttributeCache {
    pub fn new(alphabet: Alphabet) -> Self {
        AttributeCache {
            alphabet,
            limits: Limits::default(),
            entries: HashMap::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn get(&mut self, regex: &str) -> Result<&RegexAttributes, EvalError> {
        if !self.entries.contains_key(regex) {
            let parsed = parse_with(regex, &self.alphabet).map_err(|source| EvalError::Syntax {
                regex: regex.to_string(),
                source,
            })?;
            let attrs = attribute_regex(&parsed, &self.alphabet, self.limits)?;
            self.entries.insert(regex.to_string(), attrs);
        }
        Ok(&self.entries[regex])
    }

    pub fn execution_states(&mut self, regex: &str, string: &str) -> Result<usize, EvalError> {
        let word = self
            .alphabet
            .encode(string)
            .map_err(|_| EvalError::ForeignString(string.to_string()))?;
        Ok(execution_states(&self.get(regex)?.dfa, &word))
    }
}

fn fixed<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    Fixed4(*value).serialize(serializer)
}

fn fixed_map<S: Serializer>(map: &BTreeMap<u32, f64>, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_map(map.iter().map(|(k, v)| (k, Fixed4(*v))))
}

/// Scores of the expressions falling in one group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceRow {
    pub group: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bucket: Option<String>,
    pub regexes: usize,
    pub instances: usize,
    #[serde(serialize_with = "fixed")]
    pub accuracy: f64,
    #[serde(serialize_with = "fixed_map")]
    pub perf_at: BTreeMap<u32, f64>,
}

/// Instance accuracy among instances with one execution-state count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EsPoint {
    pub es: usize,
    pub instances: usize,
    #[serde(serialize_with = "fixed")]
    pub accuracy: f64,
    #[serde(serialize_with = "fixed")]
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slices {
    pub starfree: Vec<SliceRow>,
    pub size: Vec<SliceRow>,
    pub composition: Vec<SliceRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unseen: Option<Vec<SliceRow>>,
    pub unseen_buckets: Vec<usize>,
    pub es_min_group: usize,
    /// Instances in ES groups below `es_min_group`, left out of the curve.
    pub es_suppressed: usize,
    pub es_curve: Vec<EsPoint>,
}

impl Slices {
    pub fn tables(&self) -> Vec<(&'static str, &[SliceRow])> {
        let mut out: Vec<(&'static str, &[SliceRow])> = vec![
            ("starfree", &self.starfree),
            ("size", &self.size),
            ("composition", &self.composition),
        ];
        if let Some(unseen) = &self.unseen {
            out.push(("unseen", unseen));
        }
        out
    }
}

fn row<'a>(
    group: &str,
    bucket: Option<String>,
    tallies: impl Iterator<Item = &'a Tally> + Clone,
) -> Result<Option<SliceRow>, EvalError> {
    let (regexes, instances) = tallies.clone().fold((0, 0), |(r, i), t| (r + 1, i + t.total));
    if regexes == 0 {
        return Ok(None);
    }
    let mut perf_at = BTreeMap::new();
    for k in DEFAULT_K {
        perf_at.insert(k, perf_at_k(tallies.clone(), k)?);
    }
    Ok(Some(SliceRow {
        group: group.to_string(),
        bucket,
        regexes,
        instances,
        accuracy: super::mean_regex_accuracy(tallies)?,
        perf_at,
    }))
}

/// Two-way split of expressions by a predicate; empty groups are omitted.
fn split_by(
    scores: &Scores,
    labels: (&str, &str),
    mut first: impl FnMut(&str) -> Result<bool, EvalError>,
) -> Result<Vec<SliceRow>, EvalError> {
    let mut yes = Vec::new();
    let mut no = Vec::new();
    for (regex, tally) in &scores.per_regex {
        if first(regex)? {
            yes.push(tally);
        } else {
            no.push(tally);
        }
    }
    Ok([
        row(labels.0, None, yes.iter().copied())?,
        row(labels.1, None, no.iter().copied())?,
    ]
    .into_iter()
    .flatten()
    .collect())
}

/// Star-free, size, composition and unseen-sub-expression tables plus the
/// execution-state curve. `train` enables the unseen table.
pub fn slice_report(
    gold: &[Instance],
    scores: &Scores,
    cache: &mut AttributeCache,
    train: Option<&[Instance]>,
) -> Result<Slices, EvalError> {
    let starfree = split_by(scores, ("starfree", "non-starfree"), |r| Ok(cache.get(r)?.starfree))?;
    let size = split_by(scores, ("<=64", ">64"), |r| Ok(cache.get(r)?.size <= 64))?;
    let composition = split_by(scores, ("<=5", ">=6"), |r| Ok(cache.get(r)?.compositions <= 5))?;

    let unseen = match train {
        Some(train) => Some(unseen_rows(scores, cache, train)?),
        None => None,
    };

    let mut by_es: BTreeMap<usize, Tally> = BTreeMap::new();
    for (g, &ok) in gold.iter().zip(&scores.correct) {
        by_es
            .entry(cache.execution_states(&g.regex, &g.string)?)
            .or_default()
            .add(ok);
    }
    let mut es_suppressed = 0;
    let mut es_curve = Vec::new();
    for (es, t) in by_es {
        if t.total < ES_MIN_GROUP {
            es_suppressed += t.total;
            continue;
        }
        let p = t.accuracy();
        es_curve.push(EsPoint {
            es,
            instances: t.total,
            accuracy: 100.0 * p,
            std_error: 100.0 * (p * (1.0 - p) / t.total as f64).sqrt(),
        });
    }

    Ok(Slices {
        starfree,
        size,
        composition,
        unseen,
        unseen_buckets: UNSEEN_BUCKETS.to_vec(),
        es_min_group: ES_MIN_GROUP,
        es_suppressed,
        es_curve,
    })
}

fn unseen_rows(scores: &Scores, cache: &mut AttributeCache, train: &[Instance]) -> Result<Vec<SliceRow>, EvalError> {
    let mut train_regexes: Vec<&str> = train.iter().map(|i| i.regex.as_str()).collect();
    train_regexes.sort_unstable();
    train_regexes.dedup();
    let parsed: Vec<Regex> = train_regexes
        .iter()
        .map(|r| {
            parse_with(r, cache.alphabet()).map_err(|source| EvalError::Syntax {
                regex: r.to_string(),
                source,
            })
        })
        .collect::<Result<_, _>>()?;
    let covered = covered_subexpressions(&parsed);

    // (has unseen, compositions, tally)
    let mut tagged = Vec::new();
    for (regex, tally) in &scores.per_regex {
        let attrs = cache.get(regex)?;
        let has_unseen = !unseen_against(&attrs.regex, &covered).is_empty();
        tagged.push((has_unseen, attrs.compositions, tally));
    }

    let mut rows = Vec::new();
    let buckets = std::iter::once(None).chain(UNSEEN_BUCKETS.iter().map(|&c| Some(c)));
    for bucket in buckets {
        for (label, has) in [("none", false), ("some", true)] {
            let members = tagged
                .iter()
                .filter(|(h, c, _)| *h == has && bucket.is_none_or(|b| b == *c))
                .map(|(_, _, t)| *t);
            let name = bucket.map_or_else(|| "all".to_string(), |b| b.to_string());
            rows.extend(row(label, Some(name), members)?);
        }
    }
    Ok(rows)
}

pub(super) fn rows_csv(rows: &[SliceRow]) -> String {
    let bucketed = rows.iter().any(|r| r.bucket.is_some());
    let mut out = String::from(if bucketed { "compositions,unseen," } else { "group," });
    out.push_str("regexes,instances,acc");
    for k in DEFAULT_K {
        out.push_str(&format!(",perf_at_{k}"));
    }
    out.push('\n');
    for r in rows {
        if bucketed {
            out.push_str(&format!("{},", r.bucket.as_deref().unwrap_or("all")));
        }
        out.push_str(&format!(
            "{},{},{},{}",
            r.group,
            r.regexes,
            r.instances,
            pct(r.accuracy)
        ));
        for v in r.perf_at.values() {
            out.push_str(&format!(",{}", pct(*v)));
        }
        out.push('\n');
    }
    out
}

pub(super) fn es_csv(points: &[EsPoint]) -> String {
    let mut out = String::from("es,instances,acc,std_error\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.es,
            p.instances,
            pct(p.accuracy),
            pct(p.std_error)
        ));
    }
    out
}
