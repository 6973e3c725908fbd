use std::path::Path;
use std::process::{Command, Output};

fn cvmbqc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvmbqc")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn every_subcommand_passes_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["spectrum", "cluster-check", "delayed-check", "gate", "compose", "cz", "pipeline"] {
        let out = cvmbqc(&[sub, "--out", "out"], dir.path());
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{sub}: {stdout}{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout.lines().all(|l| l.starts_with("PASS ")), "{sub}: {stdout}");
        assert!(dir.path().join("out").join(format!("{sub}_verdicts.csv")).exists());
    }
    assert!(dir.path().join("out/pipeline_events.jsonl").exists());
    assert!(dir.path().join("out/spectrum.csv").exists());
}

#[test]
fn json_format_writes_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = cvmbqc(&["cz", "--format", "json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("o/cz.json")).unwrap();
    let record: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(record["kind"], "cz");
    assert_eq!(record["details"]["matrix"][3][0], 1.0);
}

#[test]
fn failed_verdict_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[cluster-check]\ny_vars = [0.25]\n");
    let out = cvmbqc(&["cluster-check", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL "));
}

#[test]
fn configuration_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("[gate]\nbogus = 1\n", "gate"),
        ("[gate]\ntheta_in = 0.5\ntheta_1 = 0.5\n", "gate"),
        ("[pipeline]\ntransmissivity = 0.9\n", "pipeline"),
        ("[compose]\ntarget = [[2.0, 0.0], [0.0, 1.0]]\n", "compose"),
        ("not toml at all [", "spectrum"),
    ];
    for (text, sub) in cases {
        let config = write_config(dir.path(), text);
        let out = cvmbqc(&[sub, "--config", &config], dir.path());
        assert_eq!(out.status.code(), Some(2), "{text}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = cvmbqc(&["gate", "--config", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = cvmbqc(&["no-such-command"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sampling_without_seed_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[gate]\nsample = true\n");
    let out = cvmbqc(&["gate", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[gate]\nsample = true\n");
    for (out_dir, seed) in [("a", "17"), ("b", "17"), ("c", "18")] {
        for format in ["csv", "json"] {
            let out = cvmbqc(&["gate", "--config", &config, "--seed", seed, "--format", format, "--out", out_dir], dir.path());
            assert_eq!(out.status.code(), Some(0));
        }
    }
    let read = |d: &str, f: &str| std::fs::read(dir.path().join(d).join(f)).unwrap();
    for file in ["gate.json", "gate_verdicts.csv"] {
        assert_eq!(read("a", file), read("b", file), "{file}");
    }
    assert_ne!(read("a", "gate.json"), read("c", "gate.json"));
}
