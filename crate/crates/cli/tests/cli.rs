use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermal-track"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(!out.status.success(), "{args:?} should fail");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "diagnostic not one line: {err}");
    err
}

fn small_corpus(dir: &Path) {
    ok(
        dir,
        &["synth", "--corpus", "--per-class", "12", "--test-per-class", "6", "--seed", "4", "-o", "data"],
    );
}

const TRAIN_FILES: [&str; 6] = [
    "--frames",
    "data/frames.csv",
    "--labels",
    "data/labels.csv",
    "--background",
    "data/background.csv",
];

fn train_args<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["train"];
    v.extend_from_slice(&TRAIN_FILES);
    v.extend_from_slice(extra);
    v
}

#[test]
fn corpus_files_and_sizes() {
    let t = TempDir::new().unwrap();
    let msg = ok(t.path(), &["synth", "--corpus", "--per-class", "150", "--seed", "7", "-o", "data"]);
    assert!(msg.contains("600 training scenes"), "{msg}");
    let frames = fs::read_to_string(t.path().join("data/frames.csv")).unwrap();
    let labels = fs::read_to_string(t.path().join("data/labels.csv")).unwrap();
    assert_eq!(frames.lines().count(), 600);
    assert_eq!(labels.lines().count(), 600);
    assert!(frames.lines().all(|l| l.split(',').count() == 64));
    assert!(t.path().join("data/background.csv").is_file());
    assert!(!t.path().join("data/test_frames.csv").exists());
}

#[test]
fn synth_is_byte_identical_across_runs() {
    let t = TempDir::new().unwrap();
    for dir in ["a", "b"] {
        ok(t.path(), &["synth", "--corpus", "--per-class", "5", "--seed", "9", "-o", dir]);
        ok(t.path(), &["synth", "--walk", "right_to_left", "--seed", "9", "-o", &format!("{dir}/w.csv")]);
    }
    for f in ["frames.csv", "labels.csv", "background.csv", "w.csv", "w.truth.csv", "w.background.csv"] {
        assert_eq!(
            fs::read(t.path().join("a").join(f)).unwrap(),
            fs::read(t.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn default_walk_is_ten_frames() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--walk", "left_to_right", "--speed", "2.5", "-o", "w.csv"]);
    let frames = fs::read_to_string(t.path().join("w.csv")).unwrap();
    assert_eq!(frames.lines().count(), 10);
    let truth = fs::read_to_string(t.path().join("w.truth.csv")).unwrap();
    assert_eq!(truth, "#direction,speed_mps\nleft_to_right,2.5\n");
}

#[test]
fn static_scene_has_no_direction() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--static", "15", "--person", "3,3,14", "-o", "s.csv"]);
    let out = ok(t.path(), &["motion", "--frames", "s.csv", "--background", "s.background.csv"]);
    assert!(out.starts_with("direction none\n"), "{out}");
    assert!(out.contains("speed_mps -"));
}

#[test]
fn down_to_up_walk_detected() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--walk", "down_to_up", "--bg-std", "0", "-o", "w.csv"]);
    let out = ok(t.path(), &["motion", "--frames", "w.csv", "--background", "w.background.csv"]);
    assert!(out.starts_with("direction down_to_up\n"), "{out}");
}

#[test]
fn delay_dump_is_zero_at_reference() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--walk", "down_to_up", "--bg-std", "0", "-o", "w.csv"]);
    ok(
        t.path(),
        &["motion", "--frames", "w.csv", "--background", "w.background.csv", "--dump-delay", "1,4", "-o", "d.csv"],
    );
    let d = fs::read_to_string(t.path().join("d.csv")).unwrap();
    let rows: Vec<Vec<i32>> = d
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[1][4], 0);
    // bottom cells are reached first, so they lead the reference
    assert!(rows[4][4] < 0, "{d}");
}

#[test]
fn motion_needs_two_frames() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--static", "1", "-o", "one.csv"]);
    let err = fails(t.path(), &["motion", "--frames", "one.csv", "--background", "one.background.csv"]);
    assert!(err.contains("at least 2 frames"), "{err}");
}

#[test]
fn four_people_render_as_four_label_glyphs() {
    let t = TempDir::new().unwrap();
    ok(
        t.path(),
        &[
            "synth", "--static", "1", "--bg-std", "0", "--person", "1,1,12", "--person", "1,6,12",
            "--person", "6,1,12", "--person", "6,6,12", "-o", "four.csv",
        ],
    );
    let out = ok(
        t.path(),
        &["render", "--frames", "four.csv", "--background", "four.background.csv", "--mode", "labels"],
    );
    let mut glyphs: Vec<char> = out.chars().filter(|c| !matches!(c, '.' | '\n')).collect();
    glyphs.sort_unstable();
    glyphs.dedup();
    assert_eq!(glyphs, vec!['1', '2', '3', '4'], "{out}");
}

#[test]
fn render_is_deterministic_and_checks_index() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--background-frames", "3", "-o", "bg.csv"]);
    for out in ["a.pgm", "b.pgm"] {
        ok(t.path(), &["render", "--frames", "bg.csv", "--index", "2", "--format", "pgm", "-o", out]);
    }
    let a = fs::read(t.path().join("a.pgm")).unwrap();
    assert!(a.starts_with(b"P5\n64 64\n255\n"));
    assert_eq!(a, fs::read(t.path().join("b.pgm")).unwrap());
    let err = fails(t.path(), &["render", "--frames", "bg.csv", "--index", "3"]);
    assert!(err.contains("out of range"), "{err}");
}

#[test]
fn flat_background_renders_uniformly() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--background-frames", "1", "--bg-std", "0", "-o", "bg.csv"]);
    let out = ok(t.path(), &["render", "--frames", "bg.csv"]);
    assert_eq!(out.lines().count(), 8);
    assert!(out.lines().all(|l| l == out.lines().next().unwrap()));
}

#[test]
fn background_command_builds_model() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["synth", "--background-frames", "50", "--seed", "2", "-o", "bg.csv"]);
    let msg = ok(t.path(), &["background", "--frames", "bg.csv", "-o", "model.csv"]);
    assert!(msg.contains("from 50 frames"), "{msg}");
    let model = fs::read_to_string(t.path().join("model.csv")).unwrap();
    assert!(model.starts_with("#n_frames=50\n#mean\n"));
}

#[test]
fn fixed_parameters_are_stored_verbatim() {
    let t = TempDir::new().unwrap();
    small_corpus(t.path());
    let msg = ok(t.path(), &train_args(&["--C", "21", "--gamma", "0.0078", "-o", "m.txt"]));
    assert!(msg.contains("no cross-validation"));
    let model = fs::read_to_string(t.path().join("m.txt")).unwrap();
    assert!(model.starts_with("thermal-track-svm v1\n"));
    assert!(model.lines().any(|l| l == "C 21"));
    assert!(model.lines().any(|l| l == "gamma 0.0078"));
}

#[test]
fn cross_validation_reports_every_fold() {
    let t = TempDir::new().unwrap();
    small_corpus(t.path());
    let msg = ok(
        t.path(),
        &train_args(&["--folds", "10", "--c-grid", "1,8", "--gamma-grid", "0.1,1", "-o", "m.txt"]),
    );
    let folds = msg.lines().find(|l| l.starts_with("fold accuracies")).unwrap();
    assert_eq!(folds.split_whitespace().count(), 2 + 10, "{msg}");
}

#[test]
fn train_and_evaluate_are_reproducible() {
    let t = TempDir::new().unwrap();
    small_corpus(t.path());
    let eval = |model: &str, report: &str| {
        ok(
            t.path(),
            &[
                "evaluate", "--model", model, "--frames", "data/test_frames.csv", "--labels",
                "data/test_labels.csv", "--background", "data/background.csv", "--report", report,
            ],
        )
    };
    for (m, r) in [("m1.txt", "r1.txt"), ("m2.txt", "r2.txt")] {
        ok(t.path(), &train_args(&["--c-grid", "1,4", "--gamma-grid", "0.25", "--folds", "3", "-o", m]));
        eval(m, r);
    }
    let read = |f: &str| fs::read(t.path().join(f)).unwrap();
    assert_eq!(read("m1.txt"), read("m2.txt"));
    assert_eq!(read("r1.txt"), read("r2.txt"));

    // confusion rows add up to the 6 test scenes of each class
    let report = String::from_utf8(read("r1.txt")).unwrap();
    let matrix: Vec<usize> = report
        .lines()
        .skip_while(|l| *l != "[confusion]")
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse::<usize>().unwrap()).sum())
        .collect();
    assert_eq!(matrix, vec![6, 6, 6, 6]);
}

#[test]
fn predict_prints_one_label_per_frame() {
    let t = TempDir::new().unwrap();
    small_corpus(t.path());
    ok(t.path(), &train_args(&["--C", "4", "--gamma", "0.5", "-o", "m.txt"]));
    let out = ok(
        t.path(),
        &["predict", "--model", "m.txt", "--frames", "data/test_frames.csv", "--background", "data/background.csv"],
    );
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 24);
    for (i, l) in lines.iter().enumerate() {
        let (idx, label) = l.split_once(',').unwrap();
        assert_eq!(idx, i.to_string());
        assert!(["1", "2", "3", "4"].contains(&label));
    }
}

#[test]
fn model_version_mismatch_is_reported() {
    let t = TempDir::new().unwrap();
    small_corpus(t.path());
    ok(t.path(), &train_args(&["--C", "4", "--gamma", "0.5", "-o", "m.txt"]));
    let model = fs::read_to_string(t.path().join("m.txt")).unwrap();
    fs::write(t.path().join("old.txt"), model.replacen("v1", "v0", 1)).unwrap();
    let err = fails(
        t.path(),
        &[
            "evaluate", "--model", "old.txt", "--frames", "data/test_frames.csv", "--labels",
            "data/test_labels.csv", "--background", "data/background.csv",
        ],
    );
    assert!(err.contains("thermal-track-svm v1"), "{err}");
}

#[test]
fn single_class_training_is_rejected() {
    let t = TempDir::new().unwrap();
    small_corpus(t.path());
    let labels: String = (0..48).map(|i| format!("{i},2\n")).collect();
    fs::write(t.path().join("data/labels.csv"), labels).unwrap();
    let err = fails(t.path(), &train_args(&["--C", "1", "--gamma", "1", "-o", "m.txt"]));
    assert!(err.contains("single class"), "{err}");
    assert!(!t.path().join("m.txt").exists());
}

#[test]
fn corrupt_input_leaves_no_output() {
    let t = TempDir::new().unwrap();
    small_corpus(t.path());
    let mut frames = fs::read_to_string(t.path().join("data/frames.csv")).unwrap();
    frames.push_str("1,2,3\n");
    fs::write(t.path().join("data/frames.csv"), frames).unwrap();
    let err = fails(t.path(), &train_args(&["-o", "m.txt"]));
    assert!(err.contains("line 49"), "{err}");
    assert!(!t.path().join("m.txt").exists());
    let leftovers: Vec<_> = fs::read_dir(t.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers, vec!["data"]);
}

#[test]
fn bad_paths_and_flags_fail_cleanly() {
    let t = TempDir::new().unwrap();
    let err = fails(t.path(), &["synth", "--walk", "left_to_right", "-o", "missing/w.csv"]);
    assert!(err.contains("does not exist"), "{err}");
    assert!(!t.path().join("missing").exists());

    let out = run(t.path(), &["synth", "--walk", "sideways", "-o", "w.csv"]);
    assert!(!out.status.success());
    let out = run(t.path(), &["train", "--C", "1", "-o", "m.txt"]);
    assert!(!out.status.success());
}
