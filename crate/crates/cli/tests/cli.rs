//! End-to-end runs of the `fano-forge` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fano-forge"));
    c.env_remove("FANO_FORGE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dimension_one_has_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c1.jsonl");
    let o = run(&["classify", "--dim", "1", "--mode", "canonical", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text, "{\"dim\":1,\"mode\":\"canonical\",\"weights\":[1,1],\"torsion\":[],\"class\":\"terminal\"}\n");
}

#[test]
fn classify_verify_fine_stats_in_dimension_three() {
    let dir = tempfile::tempdir().unwrap();
    let recs = dir.path().join("c3.jsonl");
    let o = run(&["classify", "--dim", "3", "--mode", "canonical", "--with-simplex", "--out", s(&recs)]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&recs).unwrap().lines().count(), 225);

    let o = run(&["verify", "--in", s(&recs)]);
    assert!(o.status.success());
    let report = String::from_utf8(o.stdout).unwrap();
    assert_eq!(report.lines().filter(|l| l.starts_with("pass ")).count(), 225);
    assert_eq!(report.lines().last(), Some("225 records, 225 passed, 0 failed"));

    let fine = dir.path().join("c3f.jsonl");
    assert!(run(&["fine", "--in", s(&recs), "--out", s(&fine)]).status.success());
    assert!(run(&["verify", "--in", s(&fine)]).status.success());

    let o = run(&["stats", "--in", s(&fine), "--by", "fine_dim"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    let total: u64 = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(csv.lines().next(), Some("fine_dim,count"));
    assert_eq!(total, 225);

    // reflexive simplices (no torsion, weights dividing their sum) have F = {0}
    for line in fs::read_to_string(&fine).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let w: Vec<u64> = v["weights"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        let h: u64 = w.iter().sum();
        if v["torsion"].as_array().unwrap().is_empty() && w.iter().all(|x| h % x == 0) {
            assert_eq!(v["fine"]["dim"], 0, "{line}");
            assert_eq!(v["fine"]["vertices"], serde_json::json!([["0", "0", "0"]]));
        }
    }
}

#[test]
fn verify_reports_tampered_record() {
    let dir = tempfile::tempdir().unwrap();
    let recs = dir.path().join("c2.jsonl");
    assert!(run(&["classify", "--dim", "2", "--mode", "canonical", "--out", s(&recs)]).status.success());
    let text = fs::read_to_string(&recs).unwrap();
    let tampered = text.replacen("\"eta\":[0,1,2]", "\"eta\":[0,1,1]", 1);
    assert_ne!(tampered, text);
    fs::write(&recs, tampered).unwrap();
    let o = run(&["verify", "--in", s(&recs)]);
    assert_eq!(o.status.code(), Some(2));
    let report = String::from_utf8(o.stdout).unwrap();
    assert!(report.lines().any(|l| l.starts_with("FAIL 1:")), "{report}");
}

#[test]
fn empty_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let o = run(&["verify", "--in", s(&empty)]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "0 records, 0 passed, 0 failed\n");
    for (by, header) in [("fine_dim", "fine_dim,count\n"), ("fine_key", "fine_dim,distinct_keys,records\n")] {
        let o = run(&["stats", "--in", s(&empty), "--by", by]);
        assert!(o.status.success());
        assert_eq!(String::from_utf8(o.stdout).unwrap(), header);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.jsonl");
    assert_eq!(run(&["verify", "--in", s(&missing)]).status.code(), Some(4));
    let garbage = dir.path().join("garbage.jsonl");
    fs::write(&garbage, "{not json\n").unwrap();
    assert_eq!(run(&["verify", "--in", s(&garbage)]).status.code(), Some(4));
    let out = dir.path().join("x.jsonl");
    assert_eq!(run(&["classify", "--dim", "5", "--mode", "terminal", "--out", s(&out)]).status.code(), Some(3));
    assert_eq!(run(&["classify", "--dim", "2", "--mode", "sideways", "--out", s(&out)]).status.code(), Some(1));
    // stats needs Fine blocks
    assert!(run(&["classify", "--dim", "2", "--mode", "canonical", "--out", s(&out)]).status.success());
    assert_eq!(run(&["stats", "--in", s(&out), "--by", "fine_dim"]).status.code(), Some(4));
    assert!(run(&["stats", "--in", s(&out), "--by", "weights"]).status.success());
}

#[test]
fn output_does_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "4", "16"] {
        let recs = dir.path().join(format!("c3-{jobs}.jsonl"));
        let fine = dir.path().join(format!("c3f-{jobs}.jsonl"));
        assert!(run(&["--jobs", jobs, "classify", "--dim", "3", "--mode", "canonical", "--out", s(&recs)]).status.success());
        assert!(run(&["--jobs", jobs, "fine", "--in", s(&recs), "--out", s(&fine)]).status.success());
        outputs.push((fs::read(&recs).unwrap(), fs::read(&fine).unwrap()));
    }
    let recs = dir.path().join("c3-env.jsonl");
    let o = bin()
        .env("FANO_FORGE_THREADS", "2")
        .args(["classify", "--dim", "3", "--mode", "canonical", "--out", s(&recs)])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(fs::read(&recs).unwrap(), outputs[0].0);
    assert!(outputs.iter().all(|o| *o == outputs[0]));
}

#[test]
fn weights_file_restricts_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    fs::write(&w, "# two surfaces\n1 1 1\n3 2 1\n").unwrap();
    let out = dir.path().join("c.jsonl");
    assert!(run(&["classify", "--dim", "2", "--mode", "canonical", "--weights-file", s(&w), "--out", s(&out)]).status.success());
    let lines: Vec<String> = fs::read_to_string(&out).unwrap().lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[2].contains("\"weights\":[1,2,3]"));
}

#[test]
fn checkpoint_resumes_after_interruption() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.jsonl");
    assert!(run(&["classify", "--dim", "3", "--mode", "canonical", "--out", s(&full)]).status.success());
    let expected = fs::read_to_string(&full).unwrap();

    let out = dir.path().join("out.jsonl");
    let journal = dir.path().join("journal");
    let args = ["classify", "--dim", "3", "--mode", "canonical", "--checkpoint", s(&journal), "--out", s(&out)];
    assert!(run(&args).status.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), expected);

    // simulate a crash: keep half the journal and a torn record at the end of the data
    let j = fs::read_to_string(&journal).unwrap();
    let kept: Vec<&str> = j.lines().take(j.lines().count() / 2).collect();
    fs::write(&journal, format!("{}\n12 3", kept.join("\n"))).unwrap();
    let mut data = fs::read_to_string(&out).unwrap();
    data.truncate(data.len() * 2 / 3 + 7);
    fs::write(&out, data).unwrap();

    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap(), expected);
    assert_eq!(fs::read_to_string(&journal).unwrap().lines().count(), j.lines().count());

    // a finished run resumes to a no-op
    let o = run(&args);
    assert!(String::from_utf8_lossy(&o.stderr).contains("(0 new)"));
    assert_eq!(fs::read_to_string(&out).unwrap(), expected);
}
