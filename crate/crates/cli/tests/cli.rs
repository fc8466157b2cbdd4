//! Behavioral checks of the command-line surface: the stdout contract,
//! exit codes, config-file precedence, and thread-count invariance.

use std::path::Path;
use std::process::{Command, Output};

use linkcast::models::write_scores;
use linkcast::task::{write_task_file, TaskInstance, TaskSpec};

fn linkcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkcast"))
        .args(args)
        .output()
        .expect("failed to launch binary")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A tiny hand-made task + score file: positives score {0.9, 0.3}, the
/// lone negative scores 0.8, so exactly half the positive/negative pairs
/// rank correctly and the AUC is 0.5.
fn write_fixture(dir: &Path) -> (String, String) {
    let task = TaskInstance {
        spec: TaskSpec {
            t0_day: 10,
            t1_day: 20,
            degree_cutoff: None,
            min_multiplicity: 1,
            num_samples: None,
            seed: 0,
        },
        pairs: vec![(0, 1), (0, 2), (1, 2)],
        labels: vec![1, 0, 1],
    };
    let task_path = dir.join("task.tsv");
    let scores_path = dir.join("scores.csv");
    write_task_file(&task, &task_path).unwrap();
    write_scores(&scores_path, &task.pairs, &[0.9, 0.8, 0.3]).unwrap();
    (
        task_path.display().to_string(),
        scores_path.display().to_string(),
    )
}

#[test]
fn eval_prints_bare_auc_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let (task, scores) = write_fixture(dir.path());
    let out = linkcast(&["eval", "--scores", &scores, "--task", &task]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "0.5\n");
}

#[test]
fn eval_writes_roc_curve_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let (task, scores) = write_fixture(dir.path());
    let roc = dir.path().join("roc.csv").display().to_string();
    let out = linkcast(&["eval", "--scores", &scores, "--task", &task, "--roc-out", &roc]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(&roc).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "fpr,tpr");
    assert_eq!(*lines.last().unwrap(), "1,1");
    assert!(dir.path().join("roc.csv.manifest.json").exists());
}

#[test]
fn unknown_flag_exits_2() {
    let out = linkcast(&["generate", "--bogus-flag", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("t.tsv").display().to_string();
    let out = linkcast(&[
        "task",
        "--graph",
        "/nonexistent/graph.tsv",
        "--t0",
        "10",
        "--t1",
        "20",
        "--out",
        &out_path,
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr_of(&out));
    assert!(stderr_of(&out).starts_with("error[3] "), "{}", stderr_of(&out));
}

#[test]
fn malformed_input_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bad.tsv");
    std::fs::write(&graph, "num_nodes=5\n0\tnot-a-node\t3\n").unwrap();
    let out_path = dir.path().join("t.tsv").display().to_string();
    let out = linkcast(&[
        "task",
        "--graph",
        &graph.display().to_string(),
        "--t0",
        "1",
        "--t1",
        "2",
        "--out",
        &out_path,
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr_of(&out));
    assert!(stderr_of(&out).starts_with("error[4] "), "{}", stderr_of(&out));
}

#[test]
fn invalid_configuration_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("g.tsv").display().to_string();
    let out = linkcast(&["generate", "--nodes", "1", "--m", "2", "--out", &out_path]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr_of(&out));
    assert!(stderr_of(&out).starts_with("error[5] "), "{}", stderr_of(&out));
}

#[test]
fn insufficient_data_exits_6() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.tsv").display().to_string();
    let out = linkcast(&["generate", "--nodes", "20", "--m", "1", "--out", &graph]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let task = dir.path().join("t.tsv").display().to_string();
    let out = linkcast(&[
        "task", "--graph", &graph, "--t0", "10", "--t1", "18", "--samples", "1000000",
        "--out", &task,
    ]);
    assert_eq!(out.status.code(), Some(6), "{}", stderr_of(&out));
    assert!(stderr_of(&out).starts_with("error[6] "), "{}", stderr_of(&out));
}

#[test]
fn config_file_supplies_flags_and_explicit_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# generator settings\nnodes=50\nm=3\nseed=9\n").unwrap();
    let cfg = cfg.display().to_string();

    // Config alone: all three keys take effect.
    let from_cfg = dir.path().join("from_cfg.tsv");
    let out = linkcast(&[
        "generate", "--config", &cfg, "--out", &from_cfg.display().to_string(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let header = std::fs::read_to_string(&from_cfg).unwrap();
    assert!(header.starts_with("num_nodes=50\n"), "{header:.40}");

    // Explicit --nodes overrides the config; m and seed still come from it.
    let overridden = dir.path().join("overridden.tsv");
    let out = linkcast(&[
        "generate", "--config", &cfg, "--nodes", "60",
        "--out", &overridden.display().to_string(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let direct = dir.path().join("direct.tsv");
    let out = linkcast(&[
        "generate", "--nodes", "60", "--m", "3", "--seed", "9",
        "--out", &direct.display().to_string(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert_eq!(
        std::fs::read(&overridden).unwrap(),
        std::fs::read(&direct).unwrap(),
        "config + override should equal the all-explicit invocation"
    );
}

#[test]
fn boolean_config_key_becomes_bare_flag() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.tsv").display().to_string();
    assert!(linkcast(&["generate", "--nodes", "80", "--m", "2", "--out", &graph])
        .status
        .success());
    let task = dir.path().join("t.tsv").display().to_string();
    assert!(linkcast(&[
        "task", "--graph", &graph, "--t0", "60", "--t1", "77", "--balanced", "40",
        "--out", &task,
    ])
    .status
    .success());

    let cfg = dir.path().join("feat.cfg");
    std::fs::write(&cfg, "yeo-johnson=true\nsnapshots=0,20,40\n").unwrap();
    let via_cfg = dir.path().join("via_cfg.csv").display().to_string();
    let out = linkcast(&[
        "features", "--config", &cfg.display().to_string(),
        "--graph", &graph, "--task", &task, "--set", "pairsim", "--out", &via_cfg,
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let via_flag = dir.path().join("via_flag.csv").display().to_string();
    let out = linkcast(&[
        "features", "--graph", &graph, "--task", &task, "--set", "pairsim",
        "--yeo-johnson", "--snapshots", "0,20,40", "--out", &via_flag,
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert_eq!(
        std::fs::read(via_cfg).unwrap(),
        std::fs::read(via_flag).unwrap()
    );
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.tsv").display().to_string();
    assert!(linkcast(&["generate", "--nodes", "150", "--m", "2", "--intra", "1", "--out", &graph])
        .status
        .success());
    let task = dir.path().join("t.tsv").display().to_string();
    assert!(linkcast(&[
        "task", "--graph", &graph, "--t0", "100", "--t1", "147", "--balanced", "60",
        "--out", &task,
    ])
    .status
    .success());

    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("f{threads}.csv")).display().to_string();
        let out = linkcast(&[
            "features", "--graph", &graph, "--task", &task, "--set", "extended",
            "--snapshots", "0,30,60", "--threads", threads, "--out", &path,
        ]);
        assert!(out.status.success(), "{}", stderr_of(&out));
        outputs.push(std::fs::read(path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "--threads changed the bytes of the output");
}

#[test]
fn help_documents_exit_codes() {
    let out = linkcast(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Exit codes:"), "{text}");
    assert!(text.contains("error[<code>] <message>"), "{text}");
    for code in ["0 ", "2 ", "3 ", "4 ", "5 ", "6 ", "7 "] {
        assert!(text.contains(&format!("\n  {code}")), "missing exit code {code}");
    }
}

#[test]
fn version_flag_reports_tool_version() {
    let out = linkcast(&["--version"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("linkcast "), "{text}");
}
