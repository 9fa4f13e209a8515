//! End-to-end tests of the `costboost` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_costboost"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Comedy-shaped survey: per-scale counts (2, 20, 77, 220, 571) plus two
/// deterministic predictor columns.
fn comedy_csv() -> String {
    let counts = [2usize, 20, 77, 220, 571];
    let mut text = String::from("Comedy,Outdoors,Shopping\n");
    let mut row = 0usize;
    for (scale, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let a = (row * 7) % 5 + 1;
            let b = (row * 3 + scale) % 5 + 1;
            text.push_str(&format!("{},{},{}\n", scale + 1, a, b));
            row += 1;
        }
    }
    text
}

fn write_comedy(dir: &Path) -> PathBuf {
    let path = dir.join("survey.csv");
    std::fs::write(&path, comedy_csv()).unwrap();
    path
}

fn csv_value(path: &Path, key: &str) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    for line in text.lines().skip(1) {
        let (k, v) = line.split_once(',').unwrap();
        if k == key {
            return v.to_string();
        }
    }
    panic!("key {key} not in {}", path.display());
}

#[test]
fn profile_reports_table2_comedy_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_comedy(dir.path());
    let out = run(&[
        "profile",
        "--input",
        input.to_str().unwrap(),
        "--target",
        "Comedy",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let profile = dir.path().join("profile_comedy.csv");
    assert_eq!(csv_value(&profile, "dislike_count"), "99");
    assert_eq!(csv_value(&profile, "favor_count"), "791");
    let ratio: f64 = csv_value(&profile, "ratio").parse().unwrap();
    assert!((ratio - 8.0).abs() < 0.15, "ratio {ratio}");
    assert!(dir.path().join("profile.config.txt").exists());
}

#[test]
fn train_is_byte_identical_for_the_same_seed() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_comedy(dir.path());
    let model_a = dir.path().join("a.model");
    let model_b = dir.path().join("b.model");
    for (model, seed) in [(&model_a, "7"), (&model_b, "7")] {
        let out = run(&[
            "train",
            "--input",
            input.to_str().unwrap(),
            "--target",
            "Comedy",
            "--algorithm",
            "adaboost",
            "--cost",
            "0,5,1,0",
            "--rounds",
            "25",
            "--seed",
            seed,
            "--model-out",
            model.to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert_success(&out);
    }
    let a = std::fs::read(&model_a).unwrap();
    let b = std::fs::read(&model_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    // The resolved config records the seed even though it was explicit.
    let config = std::fs::read_to_string(dir.path().join("train.config.txt")).unwrap();
    assert!(config.contains("seed = 7"));
    assert!(config.contains("algorithm = adaboost-m1"));
}

#[test]
fn cost_sweep_emits_grid_of_confusion_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_comedy(dir.path());
    let out = run(&[
        "cost-sweep",
        "--input",
        input.to_str().unwrap(),
        "--target",
        "Comedy",
        "--algorithms",
        "adaboost,gentleboost",
        "--costs",
        "0,1,1,0;0,2,1,0;0,5,1,0",
        "--rounds",
        "5",
        "--folds",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let confusions: Vec<PathBuf> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            p.file_name()
                .unwrap()
                .to_string_lossy()
                .starts_with("confusion_")
        })
        .collect();
    assert_eq!(confusions.len(), 6, "{confusions:?}");
    let summary = std::fs::read_to_string(dir.path().join("cost_sweep.csv")).unwrap();
    assert!(summary.starts_with("dataset,algorithm,cost_tag,metric,value"));
    // 2 algorithms × 3 costs × 4 confusion cells.
    assert_eq!(summary.lines().count(), 1 + 24);
}

#[test]
fn predict_round_trips_the_training_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_comedy(dir.path());
    let model = dir.path().join("bag.model");
    assert_success(&run(&[
        "train",
        "--input",
        input.to_str().unwrap(),
        "--target",
        "Comedy",
        "--algorithm",
        "bagging",
        "--trees",
        "10",
        "--seed",
        "3",
        "--model-out",
        model.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]));
    let output = dir.path().join("predictions.csv");
    assert_success(&run(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&output).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "Comedy,Outdoors,Shopping,predicted_label,score");
    assert_eq!(lines.count(), 890);
    assert!(text.contains(",favor,") || text.contains(",dislike,"));
}

#[test]
fn predict_rejects_missing_model_features() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_comedy(dir.path());
    let model = dir.path().join("bag.model");
    assert_success(&run(&[
        "train",
        "--input",
        input.to_str().unwrap(),
        "--target",
        "Comedy",
        "--algorithm",
        "bagging",
        "--trees",
        "5",
        "--model-out",
        model.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]));
    // Same rows without the Shopping column.
    let narrow = dir.path().join("narrow.csv");
    let narrowed: String = comedy_csv()
        .lines()
        .map(|l| {
            let mut parts = l.split(',');
            let a = parts.next().unwrap();
            let b = parts.next().unwrap();
            format!("{a},{b}\n")
        })
        .collect();
    std::fs::write(&narrow, narrowed).unwrap();
    let output = dir.path().join("preds.csv");
    let out = run(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--input",
        narrow.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Shopping"), "stderr: {stderr}");
    assert!(!output.exists());
}

#[test]
fn predict_handles_header_only_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_comedy(dir.path());
    let model = dir.path().join("bag.model");
    assert_success(&run(&[
        "train",
        "--input",
        input.to_str().unwrap(),
        "--target",
        "Comedy",
        "--algorithm",
        "bagging",
        "--trees",
        "5",
        "--model-out",
        model.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]));
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "Comedy,Outdoors,Shopping\n").unwrap();
    let output = dir.path().join("empty_preds.csv");
    let out = run(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--input",
        empty.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let text = std::fs::read_to_string(&output).unwrap();
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn usage_errors_exit_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_comedy(dir.path());
    let out = run(&[
        "train",
        "--input",
        input.to_str().unwrap(),
        "--target",
        "Comedy",
        "--algorithm",
        "adaboost",
        "--cost",
        "0,5,1", // three entries
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("train.config.txt").exists());
    assert!(!dir.path().join("model.txt").exists());

    let bad_alg = run(&[
        "train",
        "--input",
        input.to_str().unwrap(),
        "--target",
        "Comedy",
        "--algorithm",
        "quantum",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(bad_alg.status.code(), Some(2));

    // Unknown flags are also usage errors (clap's own exit code).
    let unknown = run(&["train", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn missing_input_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "profile",
        "--input",
        dir.path().join("nope.csv").to_str().unwrap(),
        "--target",
        "Comedy",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn synth_then_profile_pipeline_matches_requested_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let synth_out = dir.path().join("synth.csv");
    assert_success(&run(&[
        "synth",
        "--n",
        "890",
        "--favor-fraction",
        "0.888764",
        "--features",
        "4",
        "--informative",
        "0,1",
        "--seed",
        "9",
        "--out",
        synth_out.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&synth_out).unwrap();
    assert!(text.starts_with("# costboost-dataset v1"));
    assert_success(&run(&[
        "profile",
        "--input",
        synth_out.to_str().unwrap(),
        "--target",
        "target",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]));
    let favor: usize = csv_value(&dir.path().join("profile_target.csv"), "favor_count")
        .parse()
        .unwrap();
    assert_eq!(favor, 791);
}

#[test]
fn out_dir_env_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_comedy(dir.path());
    let out_dir = dir.path().join("reports");
    let out = bin()
        .args([
            "profile",
            "--input",
            input.to_str().unwrap(),
            "--target",
            "Comedy",
        ])
        .env("COSTBOOST_OUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert_success(&out);
    assert!(out_dir.join("profile_comedy.csv").exists());
}

#[test]
fn compare_writes_csv_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_comedy(dir.path());
    let out = run(&[
        "compare",
        "--input",
        input.to_str().unwrap(),
        "--target",
        "Comedy",
        "--algorithms",
        "adaboost,majority",
        "--rounds",
        "5",
        "--folds",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let csv = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
    assert!(csv.contains("error_out_sample"));
    let table = std::fs::read_to_string(dir.path().join("compare.txt")).unwrap();
    assert!(table.contains("adaboost-m1"));
    // The same table went to stdout.
    assert!(String::from_utf8_lossy(&out.stdout).contains("error_in_sample"));
}

#[test]
fn reports_regenerate_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_comedy(dir.path());
    let run_once = |out_dir: &Path| {
        assert_success(&run(&[
            "metrics",
            "--input",
            input.to_str().unwrap(),
            "--target",
            "Comedy",
            "--algorithm",
            "gentleboost",
            "--rounds",
            "6",
            "--folds",
            "3",
            "--seed",
            "11",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]));
        std::fs::read(out_dir.join("metrics_comedy.csv")).unwrap()
    };
    let a = run_once(&dir.path().join("run_a"));
    let b = run_once(&dir.path().join("run_b"));
    assert_eq!(a, b);
}
