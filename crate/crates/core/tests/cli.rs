use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bpps::io::SolutionRecord;
use bpps::{parse_instance, val_bpps, ProofStatus};

fn bpps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpps"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = bpps(args);
    assert!(
        out.status.success(),
        "bpps {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_solve_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("inst.txt");
    ok(&["gen", "--n", "9", "--d", "4", "--seed", "3", "--out", path(&inst_path)]);
    let inst = parse_instance(&fs::read_to_string(&inst_path).unwrap()).unwrap();
    assert_eq!((inst.num_items(), inst.num_scenarios()), (9, 4));

    let mut values = Vec::new();
    for algo in ["ffd", "ff-approx", "vns", "bp", "enum"] {
        let rec_path = dir.path().join(format!("{algo}.json"));
        let csv = ok(&[
            "solve",
            path(&inst_path),
            "--algo",
            algo,
            "--cmax",
            "50",
            "--out",
            path(&rec_path),
        ]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(bpps::bench::CSV_HEADER));
        assert!(lines.next().unwrap().contains(&format!(",{algo},")));
        let record = SolutionRecord::from_json(&fs::read_to_string(&rec_path).unwrap()).unwrap();
        assert_eq!(val_bpps(&inst, &record.solution()).unwrap(), record.val_bpps);
        values.push((algo, record.val_bpps, record.status));
    }
    let opt = values.iter().find(|v| v.0 == "enum").unwrap().1;
    assert_eq!(values.iter().find(|v| v.0 == "bp").unwrap(), &("bp", opt, ProofStatus::Optimal));
    assert!(values.iter().all(|v| v.1 >= opt));
}

#[test]
fn warm_flag_runs_vns_then_bp() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("inst.txt");
    ok(&["gen", "--n", "12", "--d", "6", "--out", path(&inst_path)]);
    let out = ok(&["solve", path(&inst_path), "--algo", "bp", "--warm", "vns", "--cmax", "30"]);
    assert!(out.contains(",vns+bp,"));
    let json = &out[out.find('{').unwrap()..];
    let record = SolutionRecord::from_json(json).unwrap();
    assert_eq!(record.algorithm, "vns+bp");
    assert!(!bpps(&["solve", path(&inst_path), "--algo", "ffd", "--warm", "vns"]).status.success());
}

#[test]
fn bounds_and_worst_case_family() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t3.txt");
    ok(&["gen-theorem3", "--d", "10", "--out", path(&p)]);
    let inst = parse_instance(&fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(inst.num_items(), 4);
    assert_eq!(inst.num_scenarios(), 10);
    let out = ok(&["bounds", path(&p)]);
    assert!(out.contains("lb_continuous 2"));
    assert!(out.contains("lb_root 2"));
    assert!(!bpps(&["gen-theorem3", "--d", "0"]).status.success());
}

#[test]
fn suite_round_trip_and_diffable_bench() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite");
    ok(&["gen", "--suite", "--seed", "5", "--out", path(&suite)]);
    assert_eq!(fs::read_dir(&suite).unwrap().count(), 120);

    // a suite directory holding only the n=10 files
    let small = dir.path().join("small");
    fs::create_dir(&small).unwrap();
    for e in fs::read_dir(&suite).unwrap() {
        let e = e.unwrap();
        let name = e.file_name().into_string().unwrap();
        if name.starts_with("bpps_n10_") && (name.ends_with("_s0.txt") || name.ends_with("_s1.txt")) {
            fs::copy(e.path(), small.join(&name)).unwrap();
        }
    }
    let args = ["bench", "--suite", path(&small), "--algo", "ffd,bp", "--no-time"];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 6 * 2);
    assert!(a.lines().skip(1).all(|l| l.contains(",,")));

    let regenerated = ok(&["bench", "--n", "10", "--replicates", "2", "--seed", "5", "--algo", "ffd,bp", "--no-time"]);
    let sorted = |s: &str| {
        let mut v: Vec<String> = s.lines().map(String::from).collect();
        v.sort();
        v
    };
    assert_eq!(sorted(&a), sorted(&regenerated));
}

#[test]
fn reports_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    fs::write(&p, "2 1 100\n50 1 1\n").unwrap();
    let out = bpps(&["solve", path(&p)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert!(!bpps(&["solve", path(&dir.path().join("missing.txt"))]).status.success());
    assert!(!bpps(&["solve", path(&p), "--algo", "simplex"]).status.success());
    assert!(!bpps(&["gen", "--n", "5", "--d", "0"]).status.success());
}
