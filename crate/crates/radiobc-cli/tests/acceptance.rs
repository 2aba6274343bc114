//! CLI acceptance: byte-level determinism (criterion 11), file round-trips,
//! metric consistency and exit codes, all through the real binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_radiobc"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("radiobc-test-{}-{name}", std::process::id()));
    p
}

/// Criterion 11: two runs of any bench spec with the same seed produce
/// byte-identical output.
#[test]
fn criterion_11_bench_determinism() {
    let out1 = tmp("bench1.csv");
    let out2 = tmp("bench2.csv");
    let args = |out: &PathBuf| {
        vec![
            "bench".into(),
            "--n".into(),
            "16,32".into(),
            "--d".into(),
            "2,4".into(),
            "--delta".into(),
            "2,3".into(),
            "--protocol".into(),
            "broad-a,broad-b,round-robin".into(),
            "--reps".into(),
            "2".into(),
            "--seed".into(),
            "1234".into(),
            "--out".into(),
            out.to_string_lossy().into_owned(),
        ]
    };
    let a1: Vec<String> = args(&out1);
    let a2: Vec<String> = args(&out2);
    run_ok(&a1.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    run_ok(&a2.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert!(!b1.is_empty());
    assert_eq!(b1, b2, "same spec must produce byte-identical output");

    // json flavor too
    let out3 = tmp("bench3.json");
    let out4 = tmp("bench4.json");
    for out in [&out3, &out4] {
        run_ok(&[
            "bench",
            "--n",
            "16",
            "--d",
            "2",
            "--protocol",
            "broad-a",
            "--reps",
            "2",
            "--seed",
            "7",
            "--format",
            "json",
            "--out",
            &out.to_string_lossy(),
        ]);
    }
    assert_eq!(
        std::fs::read(&out3).unwrap(),
        std::fs::read(&out4).unwrap()
    );
    for p in [out1, out2, out3, out4] {
        let _ = std::fs::remove_file(p);
    }
    println!("criterion 11 bench determinism: PASS");
}

#[test]
fn generated_family_files_reload_identically() {
    let path = tmp("fam.setfam");
    run_ok(&[
        "gen-family",
        "--kind",
        "strong",
        "--n",
        "64",
        "--k",
        "3",
        "--out",
        &path.to_string_lossy(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    let fam = radiobc::io::parse_setfam(&text).unwrap();
    assert_eq!(fam.len(), 49);
    assert_eq!(radiobc::io::format_setfam(&fam), text);
    let _ = std::fs::remove_file(path);
}

#[test]
fn simulate_rows_match_recomputed_metrics() {
    let out = run_ok(&[
        "simulate",
        "--graph",
        "guv:2,3",
        "--n",
        "6",
        "--r",
        "2",
        "--protocol",
        "multi-bb",
        "--delta",
        "2",
        "--seed",
        "4",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(2).expect("version, header, row");
    let fields: Vec<&str> = row.split(',').collect();
    // n,d,delta,c,r
    assert_eq!(fields[0], "6");
    let g = radiobc::gen::guv_graph(6, 2, 3).unwrap();
    let inst = radiobc::radiosim::BroadcastInstance::new(
        g,
        &[(1, 2)],
        radiobc::radiosim::ChannelMode::Bounded,
    )
    .unwrap();
    let m = inst.metrics();
    assert_eq!(fields[1], m.d.to_string());
    assert_eq!(fields[2], m.delta.to_string());
    assert_eq!(fields[3], m.congestion.to_string());
    assert_eq!(fields[4], m.r.to_string());
    // wall_ms column exists but stays empty in files
    assert_eq!(fields.len(), 11);
    assert_eq!(fields[10], "");
}

#[test]
fn adversary_files_validate_and_roundtrip() {
    let path = tmp("adv.txt");
    let out = run_ok(&[
        "adversary",
        "--protocol",
        "round-robin",
        "--n",
        "32",
        "--d",
        "4",
        "--out",
        &path.to_string_lossy(),
    ]);
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.starts_with("validation=pass"), "{report}");
    let text = std::fs::read_to_string(&path).unwrap();
    let adv = radiobc::io::parse_advgraph(&text).unwrap();
    assert_eq!(radiobc::io::format_advgraph(&adv), text);
    assert!(adv.total_window() >= 8);
    let _ = std::fs::remove_file(path);
}

#[test]
fn exit_codes_follow_the_contract() {
    // configuration error: unknown protocol
    let out = bin()
        .args(["simulate", "--graph", "path", "--n", "4", "--protocol", "nope"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // configuration error: zero adversary budget
    let out = bin()
        .args([
            "adversary",
            "--protocol",
            "round-robin",
            "--n",
            "16",
            "--d",
            "2",
            "--budget",
            "0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // pairing error: multi-bb with a family that only claims selectivity
    let fam_path = tmp("weak.setfam");
    run_ok(&[
        "gen-family",
        "--kind",
        "selective",
        "--n",
        "16",
        "--k",
        "3",
        "--out",
        &fam_path.to_string_lossy(),
    ]);
    let out = bin()
        .args([
            "simulate",
            "--graph",
            "rand",
            "--n",
            "16",
            "--delta",
            "2",
            "--protocol",
            "multi-bb",
            "--family",
            &fam_path.to_string_lossy(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(fam_path);

    // horizon exceeded: a graph the protocol cannot finish in one slot
    let out = bin()
        .args([
            "simulate",
            "--graph",
            "path",
            "--n",
            "8",
            "--protocol",
            "round-robin",
            "--horizon",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_dir_env_var_resolves_relative_paths() {
    let dir = tmp("outdir");
    std::fs::create_dir_all(&dir).unwrap();
    let out = bin()
        .env("RADIOBC_OUT_DIR", &dir)
        .args([
            "gen-family",
            "--kind",
            "rdiff",
            "--n",
            "4",
            "--r",
            "2",
            "--out",
            "seqs.txt",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let written = dir.join("seqs.txt");
    assert!(written.exists(), "file lands under RADIOBC_OUT_DIR");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn export_schedule_is_loadable() {
    let path = tmp("sched.setfam");
    run_ok(&[
        "export-schedule",
        "--protocol",
        "round-robin",
        "--n",
        "8",
        "--slots",
        "16",
        "--out",
        &path.to_string_lossy(),
    ]);
    let fam = radiobc::io::parse_setfam(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(fam.len(), 16);
    for (t, set) in fam.sets().iter().enumerate() {
        assert_eq!(set.to_vec(), vec![(t % 8) + 1]);
    }
    let _ = std::fs::remove_file(path);
}
