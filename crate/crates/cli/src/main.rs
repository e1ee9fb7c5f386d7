mod error;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regset::attributes::{attribute_instance, attribute_regex, RegexAttributes};
use regset::automata::{CanonicalKey, Limits};
use regset::evalkit::{self, EvalOptions, Prediction};
use regset::genset::{self, GenConfig, Instance, LanguagePool, SplitSizes, Stream};
use regset::regex::parse_with;
use regset::{Alphabet, Regex};
use serde::{Deserialize, Serialize};

use error::{io_err, CliError};

#[derive(Parser)]
#[command(
    name = "regset",
    version,
    about = "Regular-expression instruction datasets and RegEx-level evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate distinct languages and print a pool summary.
    Enumerate(EnumerateArgs),
    /// Print the stratified expression sample used for the Exploration train split.
    Sample(SampleArgs),
    /// Write the Exploration train/validation/test splits and manifest.
    GenExploration(GenArgs),
    /// Write the Hard train/validation/test splits and manifest.
    GenHard(GenHardArgs),
    /// Annotate a split with expression and instance attributes.
    Attrs(AttrsArgs),
    /// Label (regex, string) pairs.
    Match(MatchArgs),
    /// Score a prediction file and print the report as JSON.
    Eval(EvalArgs),
    /// Score a prediction file and write summary and slice CSVs.
    Report(ReportArgs),
    /// Write baseline predictions for a gold split.
    Baseline(BaselineArgs),
    /// Convert a split to other formats.
    Export(ExportArgs),
}

#[derive(Args, Clone)]
struct PoolArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    max_ops: usize,
    #[arg(long, default_value = "ab")]
    alphabet: Alphabet,
}

impl PoolArgs {
    fn config(&self) -> GenConfig {
        GenConfig {
            alphabet: self.alphabet.clone(),
            max_ops: self.max_ops,
            ..GenConfig::new(self.seed)
        }
    }
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    pool: PoolArgs,
    /// Also list every language, one JSON object per line.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    pool: PoolArgs,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GenArgs {
    #[command(flatten)]
    pool: PoolArgs,
    #[arg(long, default_value_t = 15)]
    max_len: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    train_regexes: usize,
    #[arg(long, default_value_t = 20)]
    train_instances: usize,
    #[arg(long, default_value_t = 200)]
    validation_regexes: usize,
    #[arg(long, default_value_t = 500)]
    test_regexes: usize,
    #[arg(long, default_value_t = 1000)]
    test_cap: usize,
}

impl GenArgs {
    fn config(&self) -> GenConfig {
        GenConfig {
            max_len: self.max_len,
            sizes: SplitSizes {
                train_regexes: self.train_regexes,
                train_instances_per_regex: self.train_instances,
                validation_regexes: self.validation_regexes,
                test_regexes: self.test_regexes,
                test_cap: self.test_cap,
            },
            ..self.pool.config()
        }
    }
}

#[derive(Args)]
struct GenHardArgs {
    #[command(flatten)]
    gen: GenArgs,
    /// Exploration directory whose train languages are excluded. Without
    /// it, the Exploration train selection for the same seed is recomputed.
    #[arg(long)]
    exploration: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    min_size: u64,
    #[arg(long, default_value_t = 4)]
    min_es: usize,
}

#[derive(Args)]
struct AttrsArgs {
    #[arg(long)]
    gold: PathBuf,
    /// One line per expression instead of one per instance.
    #[arg(long)]
    regex_only: bool,
    #[arg(long, default_value = "ab")]
    alphabet: Alphabet,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatchArgs {
    /// Expression followed by strings to test.
    #[arg(required_unless_present = "file")]
    regex: Option<String>,
    strings: Vec<String>,
    /// JSON Lines file of {"regex", "string"} objects.
    #[arg(long, conflicts_with = "regex")]
    file: Option<PathBuf>,
    #[arg(long, default_value = "ab")]
    alphabet: Alphabet,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    preds: PathBuf,
    /// Extra perf@k thresholds beyond 80, 90 and 100.
    #[arg(long)]
    k: Vec<u32>,
    /// Fail if any gold instance lacks a prediction.
    #[arg(long)]
    strict: bool,
    /// Train split, for the unseen-sub-expression slices.
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long, default_value = "ab")]
    alphabet: Alphabet,
}

impl ScoreArgs {
    fn evaluate(&self) -> Result<evalkit::EvalReport, CliError> {
        let gold: Vec<Instance> = evalkit::read_jsonl(&self.gold)?;
        let preds: Vec<Prediction> = evalkit::read_jsonl(&self.preds)?;
        let train = self.train.as_deref().map(evalkit::read_jsonl).transpose()?;
        let options = EvalOptions {
            alphabet: self.alphabet.clone(),
            strict: self.strict,
            extra_k: self.k.clone(),
            train,
            slices: true,
        };
        Ok(evalkit::evaluate(&gold, &preds, &options)?)
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    score: ScoreArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    score: ScoreArgs,
    /// Directory for the CSV files.
    #[arg(long)]
    out: PathBuf,
    /// Name written in the summary's split column.
    #[arg(long, default_value = "test")]
    split: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    Random,
    Majority,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, value_enum)]
    kind: BaselineKind,
    /// Required for the random baseline.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    gold: PathBuf,
    /// Emit {"input": "<regex> <string>", "target": "True"|"False"} lines.
    #[arg(long, required = true)]
    model_input: bool,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Enumerate(args) => enumerate(args),
        Command::Sample(args) => sample(args),
        Command::GenExploration(args) => gen_exploration(args),
        Command::GenHard(args) => gen_hard(args),
        Command::Attrs(args) => attrs(args),
        Command::Match(args) => match_pairs(args),
        Command::Eval(args) => {
            let report = args.score.evaluate()?;
            let mut text = serde_json::to_string_pretty(&report).map_err(json_err)?;
            text.push('\n');
            emit(args.out.as_deref(), text.as_bytes())
        }
        Command::Report(args) => {
            let report = args.score.evaluate()?;
            for path in evalkit::write_report_csvs(&report, &args.split, &args.out)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Baseline(args) => baseline(args),
        Command::Export(args) => export(args),
    }
}

fn json_err(err: serde_json::Error) -> CliError {
    CliError::Gen(err.into())
}

/// Writes to `out` through a temporary file, or to stdout.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|()| stdout.flush())
                .map_err(io_err("<stdout>"))
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .map_or_else(|| "out".into(), |n| n.to_string_lossy().into_owned());
    let tmp = path.with_file_name(format!(".{name}.partial"));
    let result = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err(path))
}

fn jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> Result<Vec<u8>, CliError> {
    let mut out = BufWriter::new(Vec::new());
    for item in items {
        serde_json::to_writer(&mut out, &item).map_err(json_err)?;
        out.write_all(b"\n").map_err(io_err("<buffer>"))?;
    }
    out.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_regex(text: &str, alphabet: &Alphabet) -> Result<Regex, CliError> {
    parse_with(text, alphabet).map_err(|source| CliError::Syntax {
        regex: text.to_string(),
        source,
    })
}

fn encode(text: &str, alphabet: &Alphabet) -> Result<Vec<u8>, CliError> {
    alphabet.encode(text).map_err(|source| CliError::Alphabet {
        text: text.to_string(),
        source,
    })
}

fn build_pool(config: &GenConfig) -> Result<LanguagePool, CliError> {
    log::info!("enumerating languages with at most {} operators", config.max_ops);
    Ok(genset::build_pool(config)?)
}

#[derive(Serialize)]
struct PoolSummary {
    seed: u64,
    alphabet: Alphabet,
    max_ops: usize,
    languages: usize,
    levels: Vec<usize>,
}

#[derive(Serialize)]
struct PoolLine<'a> {
    min_ops: usize,
    representative: String,
    canonical: &'a CanonicalKey,
    rep_count_seen: u64,
}

fn enumerate(args: EnumerateArgs) -> Result<(), CliError> {
    let config = args.pool.config();
    let pool = build_pool(&config)?;
    let summary = PoolSummary {
        seed: config.seed,
        alphabet: config.alphabet.clone(),
        max_ops: config.max_ops,
        languages: pool.len(),
        levels: pool.level_sizes(),
    };
    let mut bytes = serde_json::to_vec(&summary).map_err(json_err)?;
    bytes.push(b'\n');
    if args.list {
        bytes.extend(jsonl(pool.entries().iter().map(|e| PoolLine {
            min_ops: e.min_ops,
            representative: e.representative.to_string(),
            canonical: &e.key,
            rep_count_seen: e.rep_count_seen,
        }))?);
    }
    emit(args.out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct SampleLine<'a> {
    regex: String,
    compositions: usize,
    canonical: &'a CanonicalKey,
}

fn sample(args: SampleArgs) -> Result<(), CliError> {
    let config = args.pool.config();
    let pool = build_pool(&config)?;
    let bins: Vec<Vec<usize>> = (0..=config.max_ops).map(|d| pool.level(d).to_vec()).collect();
    let mut rng = genset::substream(config.seed, Stream::ExplorationTrain);
    let picks = genset::stratified_sample(&bins, args.n, &mut rng)?;
    let lines = picks.iter().map(|&id| {
        let e = pool.entry(id);
        SampleLine {
            regex: e.representative.to_string(),
            compositions: e.min_ops,
            canonical: &e.key,
        }
    });
    emit(args.out.as_deref(), &jsonl(lines)?)
}

fn ensure_free(out: &Path) -> Result<(), CliError> {
    let taken = match std::fs::read_dir(out) {
        Ok(mut entries) => entries.next().is_some(),
        Err(_) => false,
    };
    if taken {
        return Err(genset::GenError::OutputExists(out.to_path_buf()).into());
    }
    Ok(())
}

fn gen_exploration(args: GenArgs) -> Result<(), CliError> {
    ensure_free(&args.out)?;
    let config = args.config();
    let pool = build_pool(&config)?;
    let ds = genset::build_exploration(&config, &pool)?;
    genset::write_dataset(&ds, &args.out)?;
    println!("{}", args.out.display());
    Ok(())
}

fn gen_hard(args: GenHardArgs) -> Result<(), CliError> {
    ensure_free(&args.gen.out)?;
    let mut config = args.gen.config();
    config.hard = genset::HardFilter {
        min_size: args.min_size,
        min_es: args.min_es,
    };
    let pool = build_pool(&config)?;
    let excluded = match &args.exploration {
        Some(dir) => genset::read_train_keys(dir)?,
        None => genset::exploration_train_keys(&config, &pool)?,
    };
    let ds = genset::build_hard(&config, &pool, &excluded)?;
    if !ds.replacements.is_empty() {
        log::info!("{} drawn expressions were replaced", ds.replacements.len());
    }
    genset::write_dataset(&ds, &args.gen.out)?;
    println!("{}", args.gen.out.display());
    Ok(())
}

#[derive(Serialize)]
struct AttrLine<'a> {
    #[serde(flatten)]
    regex: &'a RegexAttributes,
    #[serde(skip_serializing_if = "Option::is_none")]
    string: Option<&'a str>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    instance: Option<regset::attributes::InstanceAttributes>,
}

fn attrs(args: AttrsArgs) -> Result<(), CliError> {
    let gold: Vec<Instance> = evalkit::read_jsonl(&args.gold)?;
    let mut cache: std::collections::HashMap<String, RegexAttributes> = std::collections::HashMap::new();
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for g in &gold {
        if !cache.contains_key(&g.regex) {
            let parsed = parse_regex(&g.regex, &args.alphabet)?;
            cache.insert(
                g.regex.clone(),
                attribute_regex(&parsed, &args.alphabet, Limits::default())?,
            );
        }
        let attrs = &cache[&g.regex];
        let line = if args.regex_only {
            if !seen.insert(g.regex.as_str()) {
                continue;
            }
            AttrLine {
                regex: attrs,
                string: None,
                instance: None,
            }
        } else {
            let word = encode(&g.string, &args.alphabet)?;
            let instance = attribute_instance(attrs, &word, &args.alphabet)?;
            AttrLine {
                regex: attrs,
                string: Some(&g.string),
                instance: Some(instance),
            }
        };
        serde_json::to_writer(&mut out, &line).map_err(json_err)?;
        out.push(b'\n');
    }
    emit(args.out.as_deref(), &out)
}

#[derive(Deserialize)]
struct Pair {
    regex: String,
    string: String,
}

fn match_pairs(args: MatchArgs) -> Result<(), CliError> {
    let alphabet = &args.alphabet;
    if let Some(path) = &args.file {
        let pairs: Vec<Pair> = evalkit::read_jsonl(path)?;
        let mut labelled = Vec::with_capacity(pairs.len());
        for p in pairs {
            let dfa = regset::automata::minimal_dfa(&parse_regex(&p.regex, alphabet)?, alphabet)?;
            let label = dfa.accepts(&encode(&p.string, alphabet)?);
            labelled.push(Instance {
                regex: p.regex,
                string: p.string,
                label,
            });
        }
        return emit(None, &jsonl(&labelled)?);
    }
    let regex = args.regex.expect("clap requires a regex without --file");
    let dfa = regset::automata::minimal_dfa(&parse_regex(&regex, alphabet)?, alphabet)?;
    let mut out = String::new();
    for s in &args.strings {
        out.push_str(if dfa.accepts(&encode(s, alphabet)?) {
            "true\n"
        } else {
            "false\n"
        });
    }
    emit(None, out.as_bytes())
}

fn baseline(args: BaselineArgs) -> Result<(), CliError> {
    let gold: Vec<Instance> = evalkit::read_jsonl(&args.gold)?;
    let preds = match args.kind {
        BaselineKind::Random => {
            let seed = args
                .seed
                .ok_or_else(|| CliError::Usage("the random baseline needs --seed".into()))?;
            evalkit::baseline_random(&gold, &mut ChaCha8Rng::seed_from_u64(seed))
        }
        BaselineKind::Majority => evalkit::baseline_majority(&gold),
    };
    write_atomic(&args.out, &jsonl(&preds)?)
}

#[derive(Serialize)]
struct ModelInput {
    input: String,
    target: &'static str,
}

fn export(args: ExportArgs) -> Result<(), CliError> {
    debug_assert!(args.model_input);
    let gold: Vec<Instance> = evalkit::read_jsonl(&args.gold)?;
    let lines = gold.iter().map(|g| ModelInput {
        input: format!("{} {}", g.regex, g.string),
        target: if g.label { "True" } else { "False" },
    });
    write_atomic(&args.out, &jsonl(lines)?)
}
