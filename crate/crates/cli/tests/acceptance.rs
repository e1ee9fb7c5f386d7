//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p regset-cli --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regset::automata::{count_by_length, is_starfree, minimal_dfa, Dfa, Nfa, StateId};
use regset::evalkit::{evaluate, EvalOptions, Prediction};
use regset::genset::{build_pool, read_instances, GenConfig, Instance};
use regset::regex::oracle_match;
use regset::{parse, Alphabet, Regex};
use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

const SEED: &str = "7";

type Check = Result<Vec<String>, Vec<String>>;

/// Collects sub-check outcomes for one criterion.
#[derive(Default)]
struct Outcome {
    notes: Vec<String>,
    failed: bool,
}

impl Outcome {
    fn check(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        self.notes.push(format!("{} {note}", if ok { "ok  " } else { "FAIL" }));
        self.failed |= !ok;
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(format!("     {}", note.into()));
    }

    fn within(&mut self, started: Instant, limit: Duration) {
        let took = started.elapsed();
        self.check(
            took < limit,
            format!("runtime {:.2}s < {}s", took.as_secs_f64(), limit.as_secs()),
        );
    }

    fn done(self) -> Check {
        if self.failed {
            Err(self.notes)
        } else {
            Ok(self.notes)
        }
    }
}

fn ab() -> Alphabet {
    Alphabet::binary()
}

fn re(text: &str) -> Regex {
    parse(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn dfa_of(regex: &Regex) -> Dfa {
    minimal_dfa(regex, &ab()).unwrap()
}

/// Distinct DFA states visited from the start state while reading `word`.
fn visited(dfa: &Dfa, word: &[u8]) -> usize {
    let mut q = dfa.start();
    let mut seen = BTreeSet::from([q]);
    for &s in word {
        q = dfa.next(q, s);
        seen.insert(q);
    }
    seen.len()
}

/// States from which some accepting state is reachable.
fn live_states(dfa: &Dfa) -> usize {
    let n = dfa.state_count();
    let mut live: Vec<bool> = (0..n).map(|q| dfa.is_accepting(q as StateId)).collect();
    loop {
        let mut grew = false;
        for q in 0..n {
            if !live[q] && (0..dfa.alphabet_len() as u8).any(|s| live[dfa.next(q as StateId, s) as usize]) {
                live[q] = true;
                grew = true;
            }
        }
        if !grew {
            return live.iter().filter(|&&l| l).count();
        }
    }
}

fn regset(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_regset"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    } else {
        Err(format!("regset {args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn criterion_1() -> Check {
    let started = Instant::now();
    let mut out = Outcome::default();
    let membership = [
        ("a*b", "aaa", false),
        ("a*b", "aab", true),
        ("(ab)*", "aab", false),
        ("(ab)*", "abab", true),
        ("(ab)*", "aabab", false),
        ("(a*b)*", "aabab", true),
        ("(a*b)*", "aba", false),
        ("(a*b)*", "aab", true),
        ("a*", "aab", false),
        ("a*", "aaa", true),
    ];
    let mixed = [
        ("aba|b*", "aba", true),
        ("(b|a)*", "abbaba", true),
        ("bab|b", "ab", false),
    ];
    for (name, rows) in [("single-letter examples", &membership[..]), ("mixed examples", &mixed[..])] {
        let mut right = 0;
        for &(text, string, label) in rows {
            let regex = re(text);
            let word = ab().encode(string).unwrap();
            if oracle_match(&regex, string) == label && dfa_of(&regex).accepts(&word) == label {
                right += 1;
            } else {
                out.note(format!("{text} / {string}: expected {label}"));
            }
        }
        out.check(
            right == rows.len(),
            format!("{name}: {right}/{} rows via oracle and DFA", rows.len()),
        );
    }
    out.within(started, Duration::from_secs(1));
    out.done()
}

fn small_pool(max_ops: usize) -> regset::genset::LanguagePool {
    build_pool(&GenConfig {
        max_ops,
        ..GenConfig::new(0)
    })
    .unwrap()
}

fn criterion_2() -> Check {
    let started = Instant::now();
    let mut out = Outcome::default();
    let pool = small_pool(4);
    let words: Vec<(Vec<u8>, String)> = ab().words_up_to(8).map(|w| (w.clone(), ab().decode(&w))).collect();
    let mut mismatches = 0;
    for entry in pool.entries() {
        let fresh = dfa_of(&entry.representative);
        for (word, text) in &words {
            let want = oracle_match(&entry.representative, text);
            if fresh.accepts(word) != want || entry.dfa.accepts(word) != want {
                mismatches += 1;
            }
        }
    }
    out.check(
        mismatches == 0,
        format!(
            "{} languages x {} strings, {mismatches} mismatches",
            pool.len(),
            words.len()
        ),
    );
    out.within(started, Duration::from_secs(300));
    out.done()
}

fn criterion_3() -> Check {
    let started = Instant::now();
    let mut out = Outcome::default();
    out.check(is_starfree(&dfa_of(&re("a*")), 1_000_000).unwrap(), "a* is star-free");
    out.check(
        !is_starfree(&dfa_of(&re("(aa)*")), 1_000_000).unwrap(),
        "(aa)* is not star-free",
    );
    let hard = [
        "b|(a|(a|b)b)*",
        "aa(a(a|b))*|a",
        "(b(b|ab))*a*",
        "(a|bbb)*b|a",
        "(b(a*aa|b))*",
        "((b|(a|b)a)b)*|a",
        "b((b|a)a)*a",
        "b|(b(a|b))*",
    ];
    let words: Vec<Vec<u8>> = ab().words_up_to(15).collect();
    for text in hard {
        let dfa = dfa_of(&re(text));
        let starfree = is_starfree(&dfa, 1_000_000).unwrap();
        let size = ab().words_up_to(14).filter(|w| dfa.accepts(w)).count();
        let (mut pos, mut neg) = (0, 0);
        for w in words.iter().filter(|w| visited(&dfa, w) > 4) {
            if dfa.accepts(w) {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        out.check(
            !starfree && size > 64 && pos >= 10 && neg >= 10,
            format!("{text}: starfree={starfree} size={size} es>4 strings: {pos} positive, {neg} negative"),
        );
        let live = live_states(&dfa);
        if live <= 4 {
            out.note(format!(
                "{text}: only {live} minimal-DFA states can reach acceptance, so every member has ES <= {live}"
            ));
        }
    }
    out.within(started, Duration::from_secs(10));
    out.done()
}

fn criterion_4() -> Check {
    let mut out = Outcome::default();
    let universal = count_by_length(&dfa_of(&re("(a|b)*")), 14).total();
    let a_star = count_by_length(&dfa_of(&re("a*")), 14).total();
    out.check(universal == (1 << 15) - 1, format!("size((a|b)*) = {universal}"));
    out.check(a_star == 15, format!("size(a*) = {a_star}"));
    let pool = small_pool(4);
    let mut bad = 0;
    for entry in pool.entries() {
        let nfa = Nfa::thompson(&entry.representative, &ab()).unwrap();
        let mut brute = vec![0u64; 11];
        for w in ab().words_up_to(10) {
            if nfa.accepts(&w) {
                brute[w.len()] += 1;
            }
        }
        if count_by_length(&entry.dfa, 10).per_length != brute {
            bad += 1;
            out.note(format!("{}: counts differ", entry.representative));
        }
    }
    out.check(
        bad == 0,
        format!(
            "{} languages, per-length counts at L <= 10 match enumeration",
            pool.len()
        ),
    );
    out.done()
}

/// Statistics of a split computed from its JSON Lines file alone.
struct FileStats {
    regexes: usize,
    starfree_fraction: f64,
    mean_compositions: f64,
    median_size: f64,
    min_size: u64,
    mean_es: f64,
    min_es: usize,
    mean_length: f64,
}

fn file_stats(file: &Path) -> FileStats {
    let instances = read_instances(file).unwrap();
    let mut by_regex: BTreeMap<&str, Vec<&Instance>> = BTreeMap::new();
    for inst in &instances {
        by_regex.entry(&inst.regex).or_default().push(inst);
    }
    let (mut starfree, mut comps, mut sizes, mut es_sum, mut min_es, mut len_sum) =
        (0, 0, Vec::new(), 0, usize::MAX, 0);
    for (text, insts) in &by_regex {
        let regex = re(text);
        let dfa = dfa_of(&regex);
        starfree += is_starfree(&dfa, 1_000_000).unwrap() as usize;
        comps += regex.operator_count();
        sizes.push(ab().words_up_to(14).filter(|w| dfa.accepts(w)).count() as u64);
        for inst in insts {
            let es = visited(&dfa, &ab().encode(&inst.string).unwrap());
            es_sum += es;
            min_es = min_es.min(es);
            len_sum += inst.string.chars().count();
        }
    }
    sizes.sort_unstable();
    let k = sizes.len();
    let median_size = if k % 2 == 1 {
        sizes[k / 2] as f64
    } else {
        (sizes[k / 2 - 1] + sizes[k / 2]) as f64 / 2.0
    };
    let (n, m) = (k as f64, instances.len() as f64);
    FileStats {
        regexes: k,
        starfree_fraction: starfree as f64 / n,
        mean_compositions: comps as f64 / n,
        median_size,
        min_size: sizes[0],
        mean_es: es_sum as f64 / m,
        min_es,
        mean_length: len_sum as f64 / m,
    }
}

fn criterion_5(exploration: &Path) -> Check {
    let mut out = Outcome::default();
    let s = file_stats(&exploration.join("train.jsonl"));
    out.note(format!("{} train regexes", s.regexes));
    out.check(
        (s.starfree_fraction - 0.861).abs() <= 0.05,
        format!("starfree {:.4} in 0.861 +/- 0.05", s.starfree_fraction),
    );
    out.check(
        (s.mean_compositions - 4.9).abs() <= 0.5,
        format!("mean compositions {:.4} in 4.9 +/- 0.5", s.mean_compositions),
    );
    out.check(
        (s.mean_es - 3.4).abs() <= 0.7,
        format!("mean ES {:.4} in 3.4 +/- 0.7", s.mean_es),
    );
    out.check(
        (s.mean_length - 7.6).abs() <= 1.5,
        format!("mean length {:.4} in 7.6 +/- 1.5", s.mean_length),
    );
    out.check(
        (2.0..=32.0).contains(&s.median_size),
        format!("median size {} in [2, 32]", s.median_size),
    );
    out.done()
}

fn criterion_6(hard: &Path) -> Check {
    let mut out = Outcome::default();
    let s = file_stats(&hard.join("train.jsonl"));
    out.note(format!("{} train regexes", s.regexes));
    out.check(
        s.starfree_fraction == 0.0,
        format!("starfree {:.4} == 0", s.starfree_fraction),
    );
    out.check(s.min_size > 64, format!("min size {} > 64", s.min_size));
    out.check(s.min_es > 4, format!("min ES {} > 4", s.min_es));
    out.check(
        s.mean_compositions >= 5.5,
        format!("mean compositions {:.4} >= 5.5", s.mean_compositions),
    );
    out.check(
        (s.mean_length - 10.5).abs() <= 2.0,
        format!("mean length {:.4} in 10.5 +/- 2.0", s.mean_length),
    );
    out.done()
}

fn digests(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        let digest = Sha256::digest(fs::read(&p).unwrap());
        out.insert(
            p.file_name().unwrap().to_string_lossy().into_owned(),
            format!("{digest:x}"),
        );
    }
    out
}

struct Generated {
    _tmp: TempDir,
    exploration: [PathBuf; 2],
    hard: [PathBuf; 2],
}

fn generate() -> Result<Generated, String> {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let exploration = [tmp.path().join("exploration-1"), tmp.path().join("exploration-2")];
    let hard = [tmp.path().join("hard-1"), tmp.path().join("hard-2")];
    for (ex, h) in exploration.iter().zip(&hard) {
        regset(&["gen-exploration", "--seed", SEED, "--out", path(ex)])?;
        regset(&["gen-hard", "--seed", SEED, "--exploration", path(ex), "--out", path(h)])?;
    }
    Ok(Generated {
        _tmp: tmp,
        exploration,
        hard,
    })
}

fn criterion_7(gen: &Generated) -> Check {
    let mut out = Outcome::default();
    for (name, [a, b]) in [("exploration", &gen.exploration), ("hard", &gen.hard)] {
        let (da, db) = (digests(a), digests(b));
        out.check(
            da == db && da.len() == 4,
            format!("{name}: {} files, sha256 identical across runs", da.len()),
        );
    }
    out.done()
}

fn report(gold: &Path, preds: &Path) -> Result<Value, String> {
    serde_json::from_str(&regset(&["eval", "--gold", path(gold), "--preds", path(preds)])?).map_err(|e| e.to_string())
}

fn write_preds(file: &Path, preds: &[Prediction]) {
    let text: String = preds.iter().map(|p| serde_json::to_string(p).unwrap() + "\n").collect();
    fs::write(file, text).unwrap();
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn criterion_8(exploration: &Path) -> Check {
    let mut out = Outcome::default();
    let tmp = TempDir::new().unwrap();
    let gold_file = exploration.join("test.jsonl");
    let gold = read_instances(&gold_file).unwrap();

    let perfect = tmp.path().join("perfect.jsonl");
    let exact: Vec<Prediction> = gold
        .iter()
        .map(|g| Prediction {
            regex: g.regex.clone(),
            string: g.string.clone(),
            pred: g.label,
        })
        .collect();
    write_preds(&perfect, &exact);
    let r = report(&gold_file, &perfect).map_err(|e| vec![e])?;
    let perf: Vec<f64> = ["80", "90", "100"].iter().map(|k| num(&r["perf_at"][k])).collect();
    out.check(
        num(&r["mean_regex_accuracy"]) == 100.0 && perf == [100.0; 3],
        format!(
            "perfect predictions: acc {} perf@80/90/100 {perf:?}",
            r["mean_regex_accuracy"]
        ),
    );

    let random = tmp.path().join("random.jsonl");
    regset(&[
        "baseline",
        "--gold",
        path(&gold_file),
        "--kind",
        "random",
        "--seed",
        SEED,
        "--out",
        path(&random),
    ])
    .map_err(|e| vec![e])?;
    let r = report(&gold_file, &random).map_err(|e| vec![e])?;
    let (acc, p90) = (num(&r["mean_regex_accuracy"]), num(&r["perf_at"]["90"]));
    out.check((acc - 50.0).abs() <= 2.0, format!("random: acc {acc:.4} in 50 +/- 2"));
    out.check(p90 <= 1.0, format!("random: perf@90 {p90:.4} <= 1"));
    let small = {
        let mut per: BTreeMap<&str, usize> = BTreeMap::new();
        for g in &gold {
            *per.entry(&g.regex).or_default() += 1;
        }
        per.values().filter(|&&n| n < 10).count()
    };
    out.note(format!(
        "{small} of {} test regexes have fewer than 10 strings",
        gold.iter().map(|g| &g.regex).collect::<BTreeSet<_>>().len()
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let options = EvalOptions {
        slices: false,
        extra_k: (0..=100).collect(),
        ..EvalOptions::default()
    };
    let mut violations = 0;
    for _ in 0..100 {
        let bias: f64 = rng.gen();
        let preds: Vec<Prediction> = gold
            .iter()
            .map(|g| Prediction {
                regex: g.regex.clone(),
                string: g.string.clone(),
                pred: g.label ^ rng.gen_bool(bias),
            })
            .collect();
        let r = evaluate(&gold, &preds, &options).unwrap();
        let series: Vec<f64> = (0..=100).map(|k| r.perf_at[&k]).collect();
        violations += series.windows(2).filter(|w| w[1] > w[0]).count();
        violations += series.iter().filter(|p| !(0.0..=100.0).contains(*p)).count();
    }
    out.check(
        violations == 0,
        format!("100 random prediction files: perf@k non-increasing in k ({violations} violations)"),
    );
    out.done()
}

fn criterion_9(exploration: &Path) -> Check {
    let mut out = Outcome::default();
    let tmp = TempDir::new().unwrap();
    let train = read_instances(&exploration.join("train.jsonl")).unwrap();
    let mut per: BTreeMap<&str, Vec<&Instance>> = BTreeMap::new();
    for inst in &train {
        per.entry(&inst.regex).or_default().push(inst);
    }
    let (mut gold, mut preds) = (Vec::new(), Vec::new());
    for insts in per.values().filter(|v| v.len() >= 10) {
        for (i, g) in insts.iter().take(10).enumerate() {
            gold.push((*g).clone());
            preds.push(Prediction {
                regex: g.regex.clone(),
                string: g.string.clone(),
                pred: g.label != (i == 0),
            });
        }
    }
    let (gold_file, pred_file) = (tmp.path().join("gold.jsonl"), tmp.path().join("preds.jsonl"));
    regset::genset::write_instances(&gold_file, &gold).unwrap();
    write_preds(&pred_file, &preds);
    let r = report(&gold_file, &pred_file).map_err(|e| vec![e])?;
    let (p90, p100) = (num(&r["perf_at"]["90"]), num(&r["perf_at"]["100"]));
    out.check(
        p90 == 100.0 && p100 == 0.0,
        format!(
            "{} regexes at 9/10 correct: perf@90 {p90} perf@100 {p100}",
            gold.len() / 10
        ),
    );
    out.note("model rows need external model training and are not reproduced");
    out.done()
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut emit = |n: usize, title: &str, check: Check| {
        let (status, notes) = match check {
            Ok(notes) => ("PASS", notes),
            Err(notes) => {
                failed += 1;
                ("FAIL", notes)
            }
        };
        println!("criterion {n} {title:<34} {status}");
        for note in notes {
            println!("    {note}");
        }
    };
    emit(1, "fixture correctness", criterion_1());
    emit(2, "oracle equivalence", criterion_2());
    emit(3, "star-freeness", criterion_3());
    emit(4, "counting", criterion_4());
    match generate() {
        Ok(gen) => {
            emit(5, "exploration train statistics", criterion_5(&gen.exploration[0]));
            emit(6, "hard train constraints", criterion_6(&gen.hard[0]));
            emit(7, "determinism", criterion_7(&gen));
            emit(8, "metrics", criterion_8(&gen.exploration[0]));
            emit(9, "constructed predictor", criterion_9(&gen.exploration[0]));
        }
        Err(e) => {
            for (n, title) in [
                (5, "exploration train statistics"),
                (6, "hard train constraints"),
                (7, "determinism"),
                (8, "metrics"),
                (9, "constructed predictor"),
            ] {
                emit(n, title, Err(vec![e.clone()]));
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
