use std::fs;
use std::process::Command as Process;

use clap::Parser;
use schmidt_cli::{
    run, run_from_args, run_with_cache, Cache, RunConfig, EXIT_FALSIFIED, EXIT_OK, EXIT_USAGE,
};

fn args(line: &str) -> Vec<String> {
    std::iter::once("schmidt")
        .chain(line.split_whitespace())
        .map(String::from)
        .collect()
}

fn config(line: &str) -> RunConfig {
    RunConfig::try_parse_from(args(line)).unwrap()
}

fn json(out: &[u8]) -> serde_json::Value {
    serde_json::from_slice(out).unwrap()
}

#[test]
fn verify_grid_example() {
    let out = run_from_args(args(
        "verify --family C-2.1.1 --k 6 --i 6 --format json --jobs 2",
    ));
    assert_eq!(out.exit, EXIT_OK);
    let doc = json(&out.stdout);
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 49);
    assert!(reports.iter().all(|r| r["status"] == "proved"));
    assert_eq!(doc["summary"]["proved"], 49);
}

#[test]
fn schmidt_csv_example() {
    let out = run_from_args(args("schmidt --r 2 --nmax 3 --format csv"));
    assert_eq!(out.exit, EXIT_OK);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "k,value\n0,1\n1,2\n2,10\n3,56\n"
    );
}

#[test]
fn coeffs_json_example() {
    let out = run_from_args(args("coeffs --family Q-3.1.1 --k 1 --r 2 --format json"));
    assert_eq!(out.exit, EXIT_OK);
    let doc = json(&out.stdout);
    assert_eq!(
        doc["entries"]["1"],
        serde_json::json!({"offset": -1, "coeffs": ["1", "1"]})
    );
    assert_eq!(doc["provenance"], "recursive");

    let direct = json(
        &run_from_args(args(
            "coeffs --family Q-3.1.1 --k 1 --r 2 --direct --format json",
        ))
        .stdout,
    );
    assert_eq!(direct["entries"], doc["entries"]);
    assert_eq!(direct["provenance"], "direct-oracle");

    let csv = run_from_args(args("coeffs --family Q-3.1.1 --k 1 --r 2 --format csv"));
    assert_eq!(
        String::from_utf8(csv.stdout).unwrap(),
        "j,value\n1,-1:1;0:1\n2,0:1;1:2;2:1\n"
    );
}

#[test]
fn usage_errors_exit_two() {
    for line in [
        "verify --family X-9 --k 1 --i 1",
        "verify --family C-2.1.2:c=-1 --k 1 --i 1",
        "verify --family C-2.2 --k -1 --i 1",
        "verify --family C-2.2 --k 1",
        "verify --family D:d=2 --k 1 --i 1",
        "qverify --family C-2.2 --k 1 --i 1",
        "discover --family Q-3.2 --k 1 --i 1",
        "guess --d 2 --along k --length 10",
        "schmidt --r 2 --nmax 3 --jobs 0",
        "schmidt --r 0 --nmax 3",
        "frobnicate",
    ] {
        let out = run_from_args(args(line));
        assert_eq!(out.exit, EXIT_USAGE, "{line}");
        assert!(!out.stderr.is_empty(), "{line}");
        assert!(out.stdout.is_empty(), "{line}");
    }
    assert_eq!(run_from_args(args("--help")).exit, EXIT_OK);
}

#[test]
fn perturbation_exits_one() {
    let out = run_from_args(args(
        "verify --family C-2.2 --k 4 --i 4 --perturb 1,2,1 --format json",
    ));
    assert_eq!(out.exit, EXIT_FALSIFIED);
    let doc = json(&out.stdout);
    let bad: Vec<_> = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["status"] == "falsified")
        .collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0]["params"], serde_json::json!({"k": 1, "i": 1}));
    assert!(bad[0]["counterexample"]["at"]["n"].is_i64());
}

#[test]
fn discover_and_guess() {
    let out = run_from_args(args("discover --d 2 --k 1 --i 1 --format json"));
    assert_eq!(out.exit, EXIT_OK);
    let doc = json(&out.stdout);
    let cell = doc["cells"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(
        cell["values"],
        serde_json::json!({"0": "-2", "1": "-3", "2": "2"})
    );
    assert!(doc.get("agrees_with_closed_form").is_none());

    let out = run_from_args(args("discover --family C-2.3 --k 3 --i 3 --format json"));
    assert_eq!(json(&out.stdout)["agrees_with_closed_form"], true);

    let out = run_from_args(args(
        "guess --terms 1,2,6,20,70,252,924,3432,12870,48620,184756,705432 --format json",
    ));
    let doc = json(&out.stdout);
    assert_eq!(doc["outcome"], "found");
    assert_eq!(
        doc["candidate"]["coefficients"],
        serde_json::json!([["-2", "-4"], ["1", "1"]])
    );

    let out = run_from_args(args(
        "guess --d 1 --along k --j-offset 1 --i 1 --length 20 --format json",
    ));
    assert_eq!(out.exit, EXIT_OK);
    assert_eq!(json(&out.stdout)["candidate"]["order"], 1);

    let a = run_from_args(args("guess --random-length 30 --seed 5 --format json"));
    let b = run_from_args(args("guess --random-length 30 --seed 5 --format json"));
    let c = run_from_args(args("guess --random-length 30 --seed 6 --format json"));
    assert_eq!(a, b);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(json(&a.stdout)["outcome"], "not-found");
}

#[test]
fn scan_resumes_from_cell_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let line = format!(
        "scan --d 3 --kmax 10 --format json --cache-dir {}",
        dir.path().display()
    );
    let cfg = config(&line);

    let first = Cache::open(dir.path());
    let out1 = run_with_cache(&cfg, &first);
    assert_eq!(out1.exit, EXIT_OK);
    let written = first.cell_writes();
    assert!(written >= 121);
    assert_eq!(first.cell_hits(), 0);

    // Drop the whole-result entry to force a rerun that must read every cell back.
    fs::remove_dir_all(dir.path().join("results")).unwrap();
    let second = Cache::open(dir.path());
    let out2 = run_with_cache(&cfg, &second);
    assert_eq!(second.cell_hits(), written);
    assert_eq!(second.cell_writes(), 0);
    assert_eq!(out1, out2);

    // With the result entry present nothing is recomputed at all.
    let third = Cache::open(dir.path());
    assert_eq!(run_with_cache(&cfg, &third), out1);
    assert_eq!(third.cell_hits(), 0);
}

#[test]
fn corrupted_entry_is_recomputed_and_replaced() {
    let dir = tempfile::tempdir().unwrap();
    let line = format!(
        "schmidt --r 3 --nmax 8 --format json --cache-dir {}",
        dir.path().display()
    );
    let fresh = run(&config(&line));
    let entries: Vec<_> = fs::read_dir(dir.path().join("results"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(entries.len(), 1);
    let original = fs::read(&entries[0]).unwrap();

    let tampered = String::from_utf8(original.clone())
        .unwrap()
        .replace("\\\"r\\\": 3", "\\\"r\\\": 4");
    assert_ne!(tampered.as_bytes(), &original[..]);
    fs::write(&entries[0], tampered).unwrap();
    assert_eq!(run(&config(&line)), fresh);
    assert_eq!(fs::read(&entries[0]).unwrap(), original);

    fs::write(&entries[0], b"\x00garbage").unwrap();
    assert_eq!(run(&config(&line)), fresh);
    assert_eq!(fs::read(&entries[0]).unwrap(), original);
}

#[test]
fn cache_never_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [
        "qverify --family Q-3.3 --k 3 --i 3 --format json",
        "coeffs --family C-2.1.2:c=1 --k 3 --r 3 --format csv",
        "scan --d 2 --kmax 4 --rmax 2 --format plain",
    ] {
        let uncached = run(&config(&format!("{cmd} --no-cache")));
        let cold = run(&config(&format!(
            "{cmd} --cache-dir {}",
            dir.path().display()
        )));
        let warm = run(&config(&format!(
            "{cmd} --cache-dir {} --jobs 3",
            dir.path().display()
        )));
        assert_eq!(uncached, cold, "{cmd}");
        assert_eq!(cold, warm, "{cmd}");
    }
}

#[test]
fn equivalent_family_spellings_share_a_cache_entry() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display();
    run(&config(&format!(
        "verify --family C-2.1.2:c=2 --k 2 --i 2 --cache-dir {d}"
    )));
    run(&config(&format!(
        "verify --family C-2.1.2(c=2) --k 2 --i 2 --cache-dir {d}"
    )));
    assert_eq!(fs::read_dir(dir.path().join("results")).unwrap().count(), 1);
}

#[test]
fn unwritable_cache_dir_warns_and_proceeds() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"").unwrap();
    let out = run(&config(&format!(
        "schmidt --r 2 --nmax 3 --format csv --cache-dir {}",
        blocker.join("cache").display()
    )));
    assert_eq!(out.exit, EXIT_OK);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "k,value\n0,1\n1,2\n2,10\n3,56\n"
    );
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("warning: cache directory"));
}

#[test]
fn binary_reads_cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Process::new(env!("CARGO_BIN_EXE_schmidt"))
        .args(["schmidt", "--r", "2", "--nmax", "4"])
        .env("SCHMIDT_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("c^(2)_0 = 1\n"));
    assert_eq!(fs::read_dir(dir.path().join("results")).unwrap().count(), 1);

    let out = Process::new(env!("CARGO_BIN_EXE_schmidt"))
        .args(["verify", "--family", "nope", "--k", "1", "--i", "1"])
        .env_remove("SCHMIDT_CACHE_DIR")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown family"));
}
