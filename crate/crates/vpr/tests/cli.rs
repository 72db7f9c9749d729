use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn vpr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpr"))
        .current_dir(dir)
        .env_remove("VPR_ASSET_DIR")
        .args(args)
        .output()
        .expect("run vpr")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth(dir: &Path, name: &str, seed: u64) -> PathBuf {
    let out = vpr(
        dir,
        &[
            "synth",
            "--seed",
            &seed.to_string(),
            "--n",
            "40",
            "-o",
            name,
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir.join(name)
}

fn mined(dir: &TempDir) -> PathBuf {
    synth(dir.path(), "a.jsonl", 1);
    let out = vpr(dir.path(), &["mine", "a.jsonl", "-o", "model.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir.path().join("model.json")
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let log = synth(dir.path(), "a.jsonl", 3);
    assert_eq!(code(&vpr(dir.path(), &["validate", "a.jsonl"])), 0);

    let text = std::fs::read_to_string(&log).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[1] = "{\"ts\": oops";
    std::fs::write(dir.path().join("bad.jsonl"), lines.join("\n")).unwrap();
    let out = vpr(dir.path(), &["validate", "bad.jsonl"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    assert_eq!(code(&vpr(dir.path(), &["validate", "missing.jsonl"])), 2);
}

#[test]
fn mine_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "a.jsonl", 1);
    synth(dir.path(), "b.jsonl", 2);
    let args = [
        "mine",
        "a.jsonl",
        "b.jsonl",
        "--min-support",
        "2",
        "-o",
        "m1.json",
    ];
    assert_eq!(code(&vpr(dir.path(), &args)), 0);
    let mut again = args;
    again[6] = "m2.json";
    assert_eq!(code(&vpr(dir.path(), &again)), 0);
    let m1 = std::fs::read(dir.path().join("m1.json")).unwrap();
    assert_eq!(m1, std::fs::read(dir.path().join("m2.json")).unwrap());
    let doc: serde_json::Value = serde_json::from_slice(&m1).unwrap();
    assert!(!doc["steps"].as_array().unwrap().is_empty());
    assert!(!doc["patterns"].as_array().unwrap().is_empty());

    assert_eq!(code(&vpr(dir.path(), &["mine", "-o", "m3.json"])), 2);
}

#[test]
fn render_formats() {
    let dir = tempfile::tempdir().unwrap();
    mined(&dir);
    assert_eq!(
        code(&vpr(
            dir.path(),
            &["render", "model.json", "--format", "p1", "-o", "p1.html"]
        )),
        0
    );
    let p1 = std::fs::read_to_string(dir.path().join("p1.html")).unwrap();
    assert!(!p1.contains("<img"));
    assert!(p1.contains("<li class=\"vpr-step"));

    assert_eq!(
        code(&vpr(
            dir.path(),
            &["render", "model.json", "--format", "p4", "-o", "p4.html"]
        )),
        0
    );
    let p4 = std::fs::read_to_string(dir.path().join("p4.html")).unwrap();
    assert!(p4.contains("<figure class=\"vpr-panel"));
    assert!(p4.contains("<div class=\"vpr-context\""));
    assert!(p4.contains("src=\"data:image/svg+xml;base64,"));

    assert_eq!(
        code(&vpr(
            dir.path(),
            &[
                "render",
                "model.json",
                "--format",
                "p4",
                "--static",
                "-o",
                "p4.svg"
            ]
        )),
        0
    );
    assert!(std::fs::read_to_string(dir.path().join("p4.svg"))
        .unwrap()
        .starts_with("<svg"));

    assert_eq!(
        code(&vpr(
            dir.path(),
            &["render", "model.json", "--format", "p9", "-o", "x.html"]
        )),
        2
    );
}

#[test]
fn render_lists_unresolved_assets() {
    let dir = tempfile::tempdir().unwrap();
    mined(&dir);
    let shots: Vec<_> = std::fs::read_dir(dir.path().join("assets"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    std::fs::remove_file(&shots[0]).unwrap();
    let out = vpr(
        dir.path(),
        &["render", "model.json", "--format", "p3", "-o", "p3.html"],
    );
    assert_eq!(code(&out), 1);
    let name = shots[0].file_name().unwrap().to_string_lossy().into_owned();
    assert!(stderr(&out).contains(&name), "{}", stderr(&out));
    assert!(!dir.path().join("p3.html").exists());
    // Formats without context never touch the assets.
    assert_eq!(
        code(&vpr(
            dir.path(),
            &["render", "model.json", "--format", "p2", "-o", "p2.html"]
        )),
        0
    );
}

fn study(dir: &Path, prototypes: &[&str]) {
    let mut answers = String::from("question_id,correct_answer,task,part\n");
    for task in [1, 2] {
        for q in 0..6 {
            writeln!(
                answers,
                "t{task}q{q},a,{task},{}",
                if q < 3 { "A" } else { "B" }
            )
            .unwrap();
        }
    }
    let mut responses =
        String::from("participant_id,prototype,task,part,question_id,answer,time_sec\n");
    let mut likert = String::from("participant_id,prototype,question_id,rating\n");
    for (g, proto) in prototypes.iter().enumerate() {
        for i in 0..4 {
            let pid = format!("{proto}-{i}");
            for task in [1, 2] {
                for q in 0..6 {
                    let answer = if q % 3 < (i + g) % 3 { "b" } else { "a" };
                    let time = 35 + 3 * q + 2 * i + g;
                    writeln!(
                        responses,
                        "{pid},{proto},{task},{},t{task}q{q},{answer},{time}",
                        if q < 3 { "A" } else { "B" }
                    )
                    .unwrap();
                }
            }
            writeln!(likert, "{pid},{proto},Q1,{}", 2 + (i + g) % 4).unwrap();
        }
    }
    std::fs::write(dir.join("responses.csv"), responses).unwrap();
    std::fs::write(dir.join("answers.csv"), answers).unwrap();
    std::fs::write(dir.join("likert.csv"), likert).unwrap();
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out/report.json")).unwrap()).unwrap()
}

#[test]
fn analyze_pair_counts() {
    for (protos, pairs, m) in [
        (&["P1", "P2"][..], 1, 1),
        (&["P1", "P2", "P3", "P4"][..], 6, 6),
    ] {
        let dir = tempfile::tempdir().unwrap();
        study(dir.path(), protos);
        let out = vpr(
            dir.path(),
            &[
                "analyze",
                "responses.csv",
                "answers.csv",
                "--likert",
                "likert.csv",
                "-o",
                "out",
            ],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert!(String::from_utf8_lossy(&out.stdout).contains("Corrected p"));
        assert!(dir.path().join("out/report.txt").is_file());
        let r = report(dir.path());
        let families = r["families"].as_array().unwrap();
        assert_eq!(families.len(), 8);
        for f in families {
            assert_eq!(f["rows"].as_array().unwrap().len(), pairs);
            assert_eq!(f["m"], m);
        }
        assert!(!r["likert"].as_array().unwrap().is_empty());
    }
}

#[test]
fn analyze_names_missing_column() {
    let dir = tempfile::tempdir().unwrap();
    study(dir.path(), &["P1", "P2"]);
    let text = std::fs::read_to_string(dir.path().join("answers.csv")).unwrap();
    std::fs::write(
        dir.path().join("answers.csv"),
        text.replace("correct_answer", "solution"),
    )
    .unwrap();
    let out = vpr(
        dir.path(),
        &["analyze", "responses.csv", "answers.csv", "-o", "out"],
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("correct_answer"), "{}", stderr(&out));
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = std::fs::read(synth(dir.path(), "a.jsonl", 9)).unwrap();
    let b = std::fs::read(synth(dir.path(), "b.jsonl", 9)).unwrap();
    assert_eq!(a, b);
    let out = vpr(
        dir.path(),
        &["synth", "--seed", "1", "--profile", "nope", "-o", "c.jsonl"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    mined(&dir);
    std::fs::write(dir.path().join("vpr.config.json"), r#"{"format":"p1"}"#).unwrap();
    assert_eq!(
        code(&vpr(
            dir.path(),
            &["render", "model.json", "-o", "cfg.html"]
        )),
        0
    );
    assert!(std::fs::read_to_string(dir.path().join("cfg.html"))
        .unwrap()
        .contains("data-vpr-format=\"p1\""));
    assert_eq!(
        code(&vpr(
            dir.path(),
            &["render", "model.json", "--format", "p2", "-o", "flag.html"]
        )),
        0
    );
    assert!(std::fs::read_to_string(dir.path().join("flag.html"))
        .unwrap()
        .contains("data-vpr-format=\"p2\""));

    std::fs::write(dir.path().join("other.json"), r#"{"format":"p3"}"#).unwrap();
    assert_eq!(
        code(&vpr(
            dir.path(),
            &[
                "--config",
                "other.json",
                "render",
                "model.json",
                "-o",
                "explicit.html"
            ]
        )),
        0
    );
    assert!(std::fs::read_to_string(dir.path().join("explicit.html"))
        .unwrap()
        .contains("data-vpr-format=\"p3\""));

    std::fs::write(dir.path().join("vpr.config.json"), r#"{"colour":"red"}"#).unwrap();
    assert_eq!(
        code(&vpr(dir.path(), &["render", "model.json", "-o", "x.html"])),
        2
    );
}

#[test]
fn asset_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    mined(&dir);
    std::fs::rename(dir.path().join("assets"), dir.path().join("shots")).unwrap();
    let args = ["render", "model.json", "--format", "p4", "-o", "p4.html"];
    assert_eq!(code(&vpr(dir.path(), &args)), 1);
    let out = Command::new(env!("CARGO_BIN_EXE_vpr"))
        .current_dir(dir.path())
        .env("VPR_ASSET_DIR", dir.path().join("shots"))
        .args(args)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn help_documents_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = vpr(dir.path(), &["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Exit codes"));
    for sub in ["validate", "mine", "render", "analyze", "synth"] {
        assert!(text.contains(sub));
    }
}
