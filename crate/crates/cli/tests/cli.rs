use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn regset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regset"))
        .args(args)
        .output()
        .expect("spawn regset")
}

fn ok(args: &[&str]) -> String {
    let out = regset(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn error_kind(args: &[&str]) -> String {
    let out = regset(args);
    assert!(!out.status.success(), "{args:?} should fail");
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON error");
    err["error"].as_str().unwrap().to_string()
}

fn lines(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn small_exploration(dir: &Path) -> String {
    let out = dir.join("ex");
    let out_s = out.to_str().unwrap().to_string();
    ok(&[
        "gen-exploration",
        "--seed",
        "3",
        "--max-ops",
        "3",
        "--train-regexes",
        "20",
        "--validation-regexes",
        "5",
        "--test-regexes",
        "10",
        "--out",
        &out_s,
    ]);
    out_s
}

#[test]
fn match_prints_one_label_per_string() {
    assert_eq!(ok(&["match", "a*b", "aab", "aba", ""]), "true\nfalse\nfalse\n");
    assert_eq!(ok(&["match", "~", ""]), "true\n");
}

#[test]
fn syntax_errors_are_reported_as_json() {
    assert_eq!(error_kind(&["match", "(ab", "a"]), "syntax");
    assert_eq!(error_kind(&["match", "a*", "abc"]), "alphabet");
}

#[test]
fn enumerate_summarises_the_pool() {
    let summary: Value = serde_json::from_str(&ok(&["enumerate", "--seed", "1", "--max-ops", "1"])).unwrap();
    assert_eq!(summary["levels"][0], 3);
    let levels: u64 = summary["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .sum();
    assert_eq!(summary["languages"].as_u64().unwrap(), levels);
}

#[test]
fn generated_files_have_the_documented_shape() {
    let tmp = TempDir::new().unwrap();
    let ex = small_exploration(tmp.path());
    let dir = Path::new(&ex);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["dataset"], "exploration");
    for (split, file) in [
        ("train", "train.jsonl"),
        ("validation", "validation.jsonl"),
        ("test", "test.jsonl"),
    ] {
        let rows = lines(&dir.join(file));
        let record = manifest["splits"]
            .as_array()
            .unwrap()
            .iter()
            .find(|s| s["name"] == split)
            .unwrap();
        assert_eq!(record["instances"].as_u64().unwrap() as usize, rows.len(), "{split}");
        for line in fs::read_to_string(dir.join(file)).unwrap().lines() {
            let (r, s, l) = (
                line.find("\"regex\"").unwrap(),
                line.find("\"string\"").unwrap(),
                line.find("\"label\"").unwrap(),
            );
            assert!(r < s && s < l, "{line}");
        }
    }
    let train = lines(&dir.join("train.jsonl"));
    assert_eq!(train.len(), 20 * 20);
    let text = fs::read_to_string(dir.join("manifest.json")).unwrap();
    assert!(text.contains("\"starfree_fraction\": ") && text.ends_with('\n'));
}

#[test]
fn labels_agree_with_match() {
    let tmp = TempDir::new().unwrap();
    let ex = small_exploration(tmp.path());
    let test = Path::new(&ex).join("test.jsonl");
    let labels: Vec<String> = lines(&test).iter().map(|r| r["label"].to_string()).collect();
    let matched = ok(&["match", "--file", test.to_str().unwrap()]);
    let matched: Vec<String> = matched
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["label"].to_string())
        .collect();
    assert_eq!(labels, matched);
}

#[test]
fn refuses_to_overwrite_a_dataset() {
    let tmp = TempDir::new().unwrap();
    let ex = small_exploration(tmp.path());
    let kind = error_kind(&["gen-exploration", "--seed", "3", "--max-ops", "3", "--out", &ex]);
    assert_eq!(kind, "output_exists");
}

#[test]
fn hard_split_excludes_exploration_train_languages() {
    let tmp = TempDir::new().unwrap();
    let ex = tmp.path().join("ex");
    let hard = tmp.path().join("hard");
    let sizes = [
        "--max-ops",
        "5",
        "--train-regexes",
        "30",
        "--validation-regexes",
        "5",
        "--test-regexes",
        "10",
    ];
    let mut args = vec!["gen-exploration", "--seed", "2", "--out", ex.to_str().unwrap()];
    args.extend(sizes);
    ok(&args);
    let mut args = vec![
        "gen-hard",
        "--seed",
        "2",
        "--exploration",
        ex.to_str().unwrap(),
        "--out",
        hard.to_str().unwrap(),
    ];
    args.extend(sizes);
    ok(&args);

    let keys = |dir: &Path| -> Vec<String> {
        let m: Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
        m["splits"][0]["entries"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["canonical"].as_str().unwrap().into())
            .collect()
    };
    let ex_train = keys(&ex);
    let m: Value = serde_json::from_str(&fs::read_to_string(hard.join("manifest.json")).unwrap()).unwrap();
    for split in m["splits"].as_array().unwrap() {
        for e in split["entries"].as_array().unwrap() {
            assert_eq!(e["starfree"], false);
            assert!(e["size"].as_u64().unwrap() > 64);
            assert!(!ex_train.contains(&e["canonical"].as_str().unwrap().to_string()));
        }
    }
    let attrs = ok(&["attrs", "--gold", hard.join("train.jsonl").to_str().unwrap()]);
    for line in attrs.lines() {
        let row: Value = serde_json::from_str(line).unwrap();
        assert!(row["es"].as_u64().unwrap() > 4, "{row}");
    }
}

#[test]
fn evaluation_round_trip() {
    let tmp = TempDir::new().unwrap();
    let ex = small_exploration(tmp.path());
    let gold = Path::new(&ex).join("test.jsonl");
    let gold_s = gold.to_str().unwrap();

    let perfect = tmp.path().join("perfect.jsonl");
    let preds: String = lines(&gold)
        .iter()
        .map(|r| {
            format!(
                "{{\"regex\":{},\"string\":{},\"pred\":{}}}\n",
                r["regex"], r["string"], r["label"]
            )
        })
        .collect();
    fs::write(&perfect, preds).unwrap();
    let report: Value = serde_json::from_str(&ok(&[
        "eval",
        "--gold",
        gold_s,
        "--preds",
        perfect.to_str().unwrap(),
        "--k",
        "50",
    ]))
    .unwrap();
    assert_eq!(report["mean_regex_accuracy"], 100.0);
    for k in ["50", "80", "90", "100"] {
        assert_eq!(report["perf_at"][k], 100.0, "perf@{k}");
    }

    let majority = tmp.path().join("majority.jsonl");
    ok(&[
        "baseline",
        "--gold",
        gold_s,
        "--kind",
        "majority",
        "--out",
        majority.to_str().unwrap(),
    ]);
    assert_eq!(lines(&majority).len(), lines(&gold).len());
    let csv = tmp.path().join("csv");
    ok(&[
        "report",
        "--gold",
        gold_s,
        "--preds",
        majority.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    let summary = fs::read_to_string(csv.join("summary.csv")).unwrap();
    assert!(summary.starts_with("split,regexes,instances,acc,perf_at_80,perf_at_90,perf_at_100\ntest,10,"));

    let partial = tmp.path().join("partial.jsonl");
    fs::write(&partial, fs::read_to_string(&perfect).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(
        error_kind(&[
            "eval",
            "--gold",
            gold_s,
            "--preds",
            partial.to_str().unwrap(),
            "--strict"
        ]),
        "missing_predictions"
    );
    assert_eq!(
        error_kind(&["baseline", "--gold", gold_s, "--kind", "random", "--out", "x.jsonl"]),
        "usage"
    );
}

#[test]
fn export_writes_model_inputs() {
    let tmp = TempDir::new().unwrap();
    let ex = small_exploration(tmp.path());
    let gold = Path::new(&ex).join("validation.jsonl");
    let out = tmp.path().join("model.jsonl");
    ok(&[
        "export",
        "--gold",
        gold.to_str().unwrap(),
        "--model-input",
        "--out",
        out.to_str().unwrap(),
    ]);
    for (g, m) in lines(&gold).iter().zip(lines(&out)) {
        let input = format!("{} {}", g["regex"].as_str().unwrap(), g["string"].as_str().unwrap());
        assert_eq!(m["input"].as_str().unwrap(), input);
        assert_eq!(m["target"], if g["label"] == true { "True" } else { "False" });
    }
}
