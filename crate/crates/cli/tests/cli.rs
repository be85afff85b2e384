//! End-to-end checks of the command-line surface: exit codes, dataset
//! construction, config replay, and export shapes.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use dualkge_core::graph::split_train_test;

use common::{synthetic_kgs, write_kg};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dualkge"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn assert_code(output: &Output, expected: i32) {
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert_eq!(output.status.code(), Some(expected), "stderr: {stderr}");
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new(seed: u64) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let data = synthetic_kgs(16, 4, 4, 40, 20, seed);
        let (train, test) = split_train_test(&data.pos, 0.2, seed).unwrap();
        write_kg(&train, &dir.path().join("train_pos.tsv"));
        write_kg(&test, &dir.path().join("test_pos.tsv"));
        write_kg(&data.neg, &dir.path().join("train_neg.tsv"));
        Fixture { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_str().unwrap().to_string()
    }
}

fn quick_train(fx: &Fixture, out: &str, extra: &[&str]) {
    let mut args = vec![
        "train",
        "--pos",
        &fx.path("train_pos.tsv"),
        "--neg",
        &fx.path("train_neg.tsv"),
        "--out-dir",
        &fx.path(out),
        "--dim",
        "4",
        "--epochs",
        "6",
        "--cl-phase",
        "4",
        "--batches",
        "2",
        "--seed",
        "11",
    ]
    .into_iter()
    .map(str::to_string)
    .collect::<Vec<_>>();
    args.extend(extra.iter().map(|s| s.to_string()));
    let output = binary().args(&args).output().unwrap();
    assert_code(&output, 0);
}

#[test]
fn missing_required_flag_exits_one() {
    let output = run(&["train", "--pos", "x.tsv"]);
    assert_code(&output, 1); // no --out-dir
}

#[test]
fn unreadable_input_exits_two() {
    let fx = Fixture::new(1);
    let output = run(&[
        "train",
        "--pos",
        "/nonexistent.tsv",
        "--neg",
        &fx.path("train_neg.tsv"),
        "--out-dir",
        &fx.path("out"),
    ]);
    assert_code(&output, 2);
}

#[test]
fn malformed_triple_file_exits_two_with_line() {
    let fx = Fixture::new(2);
    std::fs::write(fx.dir.path().join("bad.tsv"), "a\tr\tb\nwrong line\n").unwrap();
    let output = run(&[
        "train",
        "--pos",
        &fx.path("bad.tsv"),
        "--neg",
        &fx.path("train_neg.tsv"),
        "--out-dir",
        &fx.path("out"),
    ]);
    assert_code(&output, 2);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("bad.tsv:2"), "stderr: {stderr}");
}

#[test]
fn invalid_config_exits_one() {
    let fx = Fixture::new(3);
    let output = run(&[
        "train",
        "--pos",
        &fx.path("train_pos.tsv"),
        "--neg",
        &fx.path("train_neg.tsv"),
        "--out-dir",
        &fx.path("out"),
        "--lr",
        "0",
    ]);
    assert_code(&output, 1);
}

#[test]
fn build_dataset_with_empty_negatives_warns_and_succeeds() {
    let fx = Fixture::new(4);
    std::fs::write(fx.dir.path().join("empty_neg.tsv"), "# nothing here\n").unwrap();
    let output = run(&[
        "build-dataset",
        "--pos",
        &fx.path("train_pos.tsv"),
        "--neg",
        &fx.path("empty_neg.tsv"),
        "--out-dir",
        &fx.path("ds"),
        "--test-fraction",
        "0.2",
    ]);
    assert_code(&output, 0);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("warning"), "stderr: {stderr}");
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("train_pos=0"), "stdout: {stdout}");
    assert_eq!(std::fs::read_to_string(fx.dir.path().join("ds/train_pos.tsv")).unwrap(), "");
}

#[test]
fn build_dataset_is_byte_deterministic() {
    let fx = Fixture::new(5);
    for out in ["ds1", "ds2"] {
        let output = run(&[
            "build-dataset",
            "--pos",
            &fx.path("train_pos.tsv"),
            "--neg",
            &fx.path("train_neg.tsv"),
            "--out-dir",
            &fx.path(out),
            "--test-fraction",
            "0.3",
            "--seed",
            "12",
        ]);
        assert_code(&output, 0);
        // the summary line carries the three counts
        let stdout = String::from_utf8_lossy(&output.stdout);
        let line = stdout.lines().next().unwrap_or("");
        assert!(
            line.starts_with("train_pos=")
                && line.contains(" train_neg=")
                && line.contains(" test_pos="),
            "unexpected summary {line:?}"
        );
    }
    for name in ["train_pos.tsv", "test_pos.tsv", "train_neg.tsv"] {
        let a = std::fs::read(fx.dir.path().join("ds1").join(name)).unwrap();
        let b = std::fs::read(fx.dir.path().join("ds2").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn build_dataset_rejects_bad_fraction() {
    let fx = Fixture::new(6);
    let output = run(&[
        "build-dataset",
        "--pos",
        &fx.path("train_pos.tsv"),
        "--neg",
        &fx.path("train_neg.tsv"),
        "--out-dir",
        &fx.path("ds"),
        "--test-fraction",
        "1.5",
    ]);
    assert_code(&output, 1);
}

/// Rebuild the flag list a resolved config describes.
fn flags_from_config(config: &serde_json::Value) -> Vec<String> {
    let mut args: Vec<String> = Vec::new();
    let s = |v: &serde_json::Value| v.as_str().unwrap().to_string();
    args.extend(["--mode".into(), s(&config["mode"])]);
    match config["kind"].as_str().unwrap() {
        "transe_l1" => args.extend(["--kind".into(), "transe".into(), "--transe-norm".into(), "1".into()]),
        "transe_l2" => args.extend(["--kind".into(), "transe".into(), "--transe-norm".into(), "2".into()]),
        "distmult" => args.extend(["--kind".into(), "distmult".into()]),
        "complex" => args.extend(["--kind".into(), "complex".into()]),
        "complex_noconj" => {
            args.extend(["--kind".into(), "complex".into(), "--complex-no-conj".into()])
        }
        other => panic!("unexpected kind {other}"),
    }
    for (flag, key) in [
        ("--dim", "dim"),
        ("--epochs", "epochs"),
        ("--batches", "n_batches"),
        ("--cl-phase", "cl_phase"),
        ("--seed", "seed"),
        ("--contrastive-every", "contrastive_every"),
        ("--threads", "threads"),
    ] {
        args.extend([flag.into(), config[key].as_u64().unwrap().to_string()]);
    }
    for (flag, key) in [("--lr", "learning_rate"), ("--margin", "margin"), ("--reg-lambda", "reg_lambda")]
    {
        args.extend([flag.into(), config[key].as_f64().unwrap().to_string()]);
    }
    args.extend(["--optimizer".into(), s(&config["optimizer"])]);
    args.extend(["--pool-size".into(), s(&config["pool_size"])]);
    if config["normalize_entities"].as_bool().unwrap() {
        args.push("--normalize-entities".into());
    }
    args.extend(["--pos".into(), s(&config["pos"]), "--neg".into(), s(&config["neg"])]);
    args
}

#[test]
fn resolved_config_replays_to_identical_outputs() {
    let fx = Fixture::new(7);
    quick_train(&fx, "orig", &["--kind", "complex"]);
    let config: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(fx.dir.path().join("orig/config.json")).unwrap(),
    )
    .unwrap();

    let mut args: Vec<String> = vec!["train".into()];
    args.extend(flags_from_config(&config));
    args.extend(["--out-dir".into(), fx.path("replay")]);
    let output = binary().args(&args).output().unwrap();
    assert_code(&output, 0);

    for name in ["checkpoint.json", "loss.csv", "config.json"] {
        let a = std::fs::read(fx.dir.path().join("orig").join(name)).unwrap();
        let b = std::fs::read(fx.dir.path().join("replay").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs after replaying the resolved config");
    }
}

#[test]
fn export_row_counts_and_roundtrip() {
    let fx = Fixture::new(8);
    quick_train(&fx, "run", &[]);
    let checkpoint = fx.path("run/checkpoint.json");

    // pos export carries entities then relations; concat entities only
    let pos_out = fx.path("emb_pos.tsv");
    assert_code(&run(&["export", "--checkpoint", &checkpoint, "--out", &pos_out, "--which", "pos"]), 0);
    let concat_out = fx.path("emb_concat.tsv");
    assert_code(
        &run(&["export", "--checkpoint", &checkpoint, "--out", &concat_out, "--which", "concat"]),
        0,
    );

    let pos_table = dualkge::formats::read_embeddings_tsv(Path::new(&pos_out)).unwrap();
    let concat_table = dualkge::formats::read_embeddings_tsv(Path::new(&concat_out)).unwrap();
    let ckpt = dualkge::checkpoint::Checkpoint::load(Path::new(&checkpoint)).unwrap();
    let n_e = ckpt.entity_labels.len();
    let n_r = ckpt.relation_labels.len();
    assert_eq!(pos_table.rows.len(), n_e + n_r);
    assert_eq!(concat_table.rows.len(), n_e);
    let width = pos_table.rows[0].1.len();
    assert_eq!(concat_table.rows[0].1.len(), 2 * width);

    // re-import equals the checkpointed vectors bitwise
    let dualkge::checkpoint::TrainedState::Dual(state) = &ckpt.state else {
        panic!("expected dual checkpoint");
    };
    for (i, (label, values)) in pos_table.rows.iter().take(n_e).enumerate() {
        assert_eq!(label, &ckpt.entity_labels[i]);
        let expected = state.pos_model.entity_row(i);
        assert_eq!(values.len(), expected.len());
        for (a, b) in values.iter().zip(expected) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn baseline_checkpoint_rejects_concat_repr() {
    let fx = Fixture::new(9);
    quick_train(&fx, "base", &["--mode", "baseline-pos"]);
    let output = run(&[
        "eval",
        "--checkpoint",
        &fx.path("base/checkpoint.json"),
        "--task",
        "lp",
        "--train",
        &fx.path("train_pos.tsv"),
        "--test",
        &fx.path("test_pos.tsv"),
        "--repr",
        "concat",
    ]);
    assert_code(&output, 1);
}

#[test]
fn eval_requires_task_inputs() {
    let fx = Fixture::new(10);
    quick_train(&fx, "run", &[]);
    let checkpoint = fx.path("run/checkpoint.json");
    // sem without --type-map is a usage error
    let output = run(&[
        "eval",
        "--checkpoint",
        &checkpoint,
        "--task",
        "sem",
        "--train",
        &fx.path("train_pos.tsv"),
        "--test",
        &fx.path("test_pos.tsv"),
    ]);
    assert_code(&output, 1);
    // tc without --pairs likewise
    let output = run(&["eval", "--checkpoint", &checkpoint, "--task", "tc"]);
    assert_code(&output, 1);
}

#[test]
fn baseline_neg_trains_from_the_negative_graph_alone() {
    let fx = Fixture::new(11);
    let output = run(&[
        "train",
        "--neg",
        &fx.path("train_neg.tsv"),
        "--mode",
        "baseline-neg",
        "--out-dir",
        &fx.path("bn"),
        "--dim",
        "4",
        "--epochs",
        "3",
        "--batches",
        "2",
    ]);
    assert_code(&output, 0);
    let ckpt =
        dualkge::checkpoint::Checkpoint::load(&fx.dir.path().join("bn/checkpoint.json")).unwrap();
    assert!(matches!(ckpt.state, dualkge::checkpoint::TrainedState::Baseline(_)));
    assert_eq!(
        std::fs::read_to_string(fx.dir.path().join("bn/loss.csv")).unwrap().lines().next(),
        Some("epoch,loss")
    );
}

#[test]
fn sweep_is_byte_deterministic() {
    let fx = Fixture::new(13);
    for out in ["s1.csv", "s2.csv"] {
        let output = run(&[
            "sweep",
            "--pos",
            &fx.path("train_pos.tsv"),
            "--neg",
            &fx.path("train_neg.tsv"),
            "--test",
            &fx.path("test_pos.tsv"),
            "--epochs",
            "6",
            "--cl-phases",
            "2,4",
            "--dims",
            "3,4",
            "--batches",
            "2",
            "--seed",
            "21",
            "--out",
            &fx.path(out),
        ]);
        assert_code(&output, 0);
    }
    let a = std::fs::read(fx.dir.path().join("s1.csv")).unwrap();
    let b = std::fs::read(fx.dir.path().join("s2.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn cluster_eval_writes_normalized_comparison_csv() {
    let fx = Fixture::new(14);
    quick_train(&fx, "dual", &[]);
    quick_train(&fx, "base", &["--mode", "baseline-pos"]);
    std::fs::write(
        fx.dir.path().join("types.tsv"),
        "e0\ta\ne1\ta\ne2\ta\ne3\ta\ne4\tb\ne5\tb\ne6\tb\ne7\tb\ne8\tc\ne9\tc\ne10\tc\ne11\tc\n",
    )
    .unwrap();

    // first produce a baseline cluster report, then normalize against it
    let base_report = fx.path("base_cluster.json");
    assert_code(
        &run(&[
            "eval",
            "--checkpoint",
            &fx.path("base/checkpoint.json"),
            "--task",
            "cluster",
            "--type-map",
            &fx.path("types.tsv"),
            "--out",
            &base_report,
        ]),
        0,
    );
    let table = fx.path("normalized.csv");
    let compare = format!("baseline-pos={base_report}");
    assert_code(
        &run(&[
            "eval",
            "--checkpoint",
            &fx.path("dual/checkpoint.json"),
            "--task",
            "cluster",
            "--type-map",
            &fx.path("types.tsv"),
            "--repr",
            "concat",
            "--label",
            "ours-concat",
            "--compare",
            &compare,
            "--normalized-csv",
            &table,
            "--out",
            &fx.path("dual_cluster.json"),
        ]),
        0,
    );
    let csv = std::fs::read_to_string(&table).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "label,metric,value");
    assert_eq!(lines.len(), 1 + 2 * 3); // two rows, three metrics each
    assert!(lines.iter().any(|l| l.starts_with("ours-concat,calinski_harabasz,")));
    assert!(lines.iter().any(|l| l.starts_with("baseline-pos,davies_bouldin_inverted,")));
    // every normalized value parses and lies in [0, 1]
    for line in &lines[1..] {
        let value: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&value));
    }
}

#[test]
fn sem_tc_and_cluster_reports_have_documented_keys() {
    let fx = Fixture::new(15);
    quick_train(&fx, "run", &[]);
    let checkpoint = fx.path("run/checkpoint.json");
    std::fs::write(
        fx.dir.path().join("types.tsv"),
        (0..16).map(|i| format!("e{i}\tg{}\n", i % 2)).collect::<String>(),
    )
    .unwrap();
    std::fs::write(
        fx.dir.path().join("pairs.tsv"),
        (0..12)
            .map(|i| format!("e{}\te{}\t{}\n", i, (i + 3) % 16, i % 2))
            .collect::<String>(),
    )
    .unwrap();

    let sem_out = fx.path("sem.json");
    assert_code(
        &run(&[
            "eval",
            "--checkpoint",
            &checkpoint,
            "--task",
            "sem",
            "--train",
            &fx.path("train_pos.tsv"),
            "--test",
            &fx.path("test_pos.tsv"),
            "--type-map",
            &fx.path("types.tsv"),
            "--ks",
            "1",
            "--out",
            &sem_out,
        ]),
        0,
    );
    let sem: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sem_out).unwrap()).unwrap();
    assert_eq!(sem["task"], "sem");
    for key in ["n_scored_head", "n_scored_tail", "pool_truncated"] {
        assert!(sem.get(key).is_some(), "missing {key}");
    }
    for side in ["head", "tail", "avg"] {
        assert!(sem["sem"]["1"][side].is_number());
    }

    let tc_out = fx.path("tc.json");
    assert_code(
        &run(&[
            "eval",
            "--checkpoint",
            &checkpoint,
            "--task",
            "tc",
            "--pairs",
            &fx.path("pairs.tsv"),
            "--repr",
            "concat",
            "--trees",
            "10",
            "--folds",
            "3",
            "--out",
            &tc_out,
        ]),
        0,
    );
    let tc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&tc_out).unwrap()).unwrap();
    assert_eq!(tc["task"], "tc");
    assert_eq!(tc["folds"].as_array().unwrap().len(), 3);
    for key in ["precision", "recall", "weighted_f1", "auc"] {
        assert!(tc["median"].get(key).is_some(), "missing median {key}");
    }

    let cluster_out = fx.path("cluster.json");
    assert_code(
        &run(&[
            "eval",
            "--checkpoint",
            &checkpoint,
            "--task",
            "cluster",
            "--type-map",
            &fx.path("types.tsv"),
            "--out",
            &cluster_out,
        ]),
        0,
    );
    let cluster: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cluster_out).unwrap()).unwrap();
    assert_eq!(cluster["task"], "cluster");
    for key in ["calinski_harabasz", "davies_bouldin", "silhouette", "n_points", "n_types"] {
        assert!(cluster.get(key).is_some(), "missing {key}");
    }
    assert_eq!(cluster["schema_version"], 1);
}

#[test]
fn lp_report_has_documented_keys() {
    let fx = Fixture::new(12);
    quick_train(&fx, "run", &[]);
    let report_path = fx.path("report.json");
    let output = run(&[
        "eval",
        "--checkpoint",
        &fx.path("run/checkpoint.json"),
        "--task",
        "lp",
        "--train",
        &fx.path("train_pos.tsv"),
        "--test",
        &fx.path("test_pos.tsv"),
        "--ks",
        "1,10",
        "--out",
        &report_path,
    ]);
    assert_code(&output, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["task"], "lp");
    for key in ["mrr_head", "mrr_tail", "mrr_avg", "n_test"] {
        assert!(report.get(key).is_some(), "missing key {key}");
    }
    for k in ["1", "10"] {
        for side in ["head", "tail", "avg"] {
            assert!(report["hits"][k][side].is_number());
        }
    }
}
