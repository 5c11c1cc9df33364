use std::path::Path;
use std::process::{Command, Output};

fn mcbsim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcbsim"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn gen_to_stdout_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = mcbsim(
        dir.path(),
        &["gen", "--n", "50", "--p", "0.2", "--seed", "9"],
    );
    let b = mcbsim(
        dir.path(),
        &["gen", "--n", "50", "--p", "0.2", "--seed", "9"],
    );
    let c = mcbsim(
        dir.path(),
        &["gen", "--n", "50", "--p", "0.2", "--seed", "10"],
    );
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let g = mcbsim::io::parse_edge_list(std::str::from_utf8(&a.stdout).unwrap()).unwrap();
    assert_eq!(g.node_count(), 50);
}

#[test]
fn pipeline_files_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for args in [
        &["gen", "--n", "80", "--seed", "3", "--out", "g.txt"][..],
        &[
            "cobra", "--graph", "g.txt", "--seed", "3", "--out", "a.json",
        ],
        &[
            "treepack",
            "--graph",
            "g.txt",
            "--assignment",
            "a.json",
            "--out",
            "p.json",
        ],
        &[
            "broadcast",
            "--graph",
            "g.txt",
            "--packing",
            "p.json",
            "--k",
            "25",
            "--out",
            "t.csv",
        ],
    ] {
        let out = mcbsim(d, args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let trace = std::fs::read_to_string(d.join("t.csv")).unwrap();
    assert!(trace.starts_with("round,edge_u,edge_v,tree_id,message_id\n"));
}

#[test]
fn hardness_subcommands_report_oracles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sqrtk = stdout_json(&mcbsim(
        d,
        &["hardness", "sqrtk", "--k", "16", "--out", "s.txt"],
    ));
    assert!(sqrtk["diameter"].as_u64().unwrap() <= 3);
    assert!(sqrtk["v1_saturation_rounds"].as_u64().unwrap() >= 4);
    let sat = stdout_json(&mcbsim(
        d,
        &[
            "hardness", "saturate", "--graph", "s.txt", "--sink", "1", "--k", "16",
        ],
    ));
    assert_eq!(sat["min_rounds"], sqrtk["v1_saturation_rounds"]);

    std::fs::write(
        d.join("sets.json"),
        r#"{"ground_set_size": 3, "family": [[0, 1], [1, 2], [0, 2]]}"#,
    )
    .unwrap();
    let reduce = stdout_json(&mcbsim(
        d,
        &["hardness", "reduce", "--sets", "sets.json", "--n1", "1"],
    ));
    assert_eq!(reduce["saturable_in_4_rounds"], false);
    assert_eq!(reduce["brute_force_splittable"], false);
}

#[test]
fn errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let missing = mcbsim(d, &["spectral", "--graph", "nope.txt"]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error:"));

    std::fs::write(
        d.join("bad.json"),
        r#"{"ns": [50], "seeds": [1], "colour": 3}"#,
    )
    .unwrap();
    let bad = mcbsim(d, &["experiment", "--config", "bad.json"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("colour"));

    let sqrtk = mcbsim(d, &["hardness", "sqrtk", "--k", "10"]);
    assert!(!sqrtk.status.success());
}

#[test]
fn experiment_smoke_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("cfg.json"), r#"{"ns": [50], "seeds": [1]}"#).unwrap();
    let out = mcbsim(d, &["experiment", "--config", "cfg.json"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let status = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "status")
        .unwrap();
    assert_eq!(&rows[0][status], "ok");
}
