//! The command-line front end: exit codes, output formats, reruns.

use std::process::{Command, Output};

fn hksflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hksflow")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const HEADER: &str = "benchmark,dataflow,bandwidth_gbps,modops_mult,evk_mode,onchip_mb,runtime_ms,idle_frac,dram_mb,ai";

#[test]
fn verify_passes_and_reports_each_check() {
    let o = hksflow(&["verify", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.lines().last().unwrap().contains("PASS"));
    assert!(!s.contains("FAIL"));
}

#[test]
fn corrupted_key_fails_verification_with_location() {
    let o = hksflow(&["verify", "--trials", "1", "--corrupt-evk", "1:3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("digit 1 tower 3"), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["traffic", "--bw", "fast"][..],
        &["traffic", "--benchmark", "nope"],
        &["sweep", "--modops", "3"],
        &["traffic", "--dataflow", "xy"],
        &["export-graph"],
        &["verify", "--log-n", "17"],
        &["frobnicate"],
        &["sweep", "--jobs", "0"],
    ] {
        assert_eq!(hksflow(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn traffic_csv_has_the_fixed_header() {
    let o = hksflow(&["traffic", "--benchmark", "ARK"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next().unwrap(), HEADER);
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.starts_with("ARK,") && r.split(',').count() == 10));
    assert!(rows[0].contains(",streamed,32,"), "{}", rows[0]);
}

#[test]
fn sweep_writes_every_point_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let out_s = out.to_str().unwrap();
    let args = ["sweep", "--benchmark", "DPRIVE", "--bw", "8,12.8", "--modops", "1,2", "--out", out_s, "--plot"];
    assert_eq!(hksflow(&args).status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    assert_eq!(hksflow(&args).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), first);
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2 * 2);
    assert!(dir.path().join("sweep_DPRIVE.svg").exists());
    // thread count does not change results
    let one = hksflow(&["sweep", "--benchmark", "DPRIVE", "--bw", "8,12.8", "--modops", "1,2", "--jobs", "1"]);
    assert_eq!(stdout(&one), text);
}

#[test]
fn config_file_replaces_the_registry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("b.json");
    std::fs::write(&cfg, r#"{"name": "tiny", "logN": 12, "k_l": 8, "k_p": 2, "dnum": 2}"#).unwrap();
    let o = hksflow(&["traffic", "--config", cfg.to_str().unwrap(), "--dataflow", "oc"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 2);
    assert!(s.lines().nth(1).unwrap().starts_with("tiny,oc,"));

    std::fs::write(&cfg, r#"{"name": "bad", "logN": 12, "k_l": 8, "k_p": 2}"#).unwrap();
    assert_eq!(hksflow(&["traffic", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn export_graph_lines_have_the_documented_shape() {
    let o = hksflow(&["export-graph", "--benchmark", "ARK", "--dataflow", "dc"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut n = 0;
    for line in s.lines().filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = line.split(' ').collect();
        assert_eq!(f.len(), 7, "{line}");
        assert_eq!(f[0], "task");
        assert_eq!(f[1].parse::<usize>().unwrap(), n);
        assert!(matches!(f[2], "Load" | "Store" | "Compute"));
        assert_eq!(f[3] == "-", f[2] != "Compute");
        f[4].parse::<u64>().unwrap();
        f[5].parse::<u64>().unwrap();
        let deps = f[6].strip_prefix("deps=").unwrap();
        assert!(deps.is_empty() || deps.split(',').all(|d| d.parse::<usize>().unwrap() < n));
        n += 1;
    }
    assert!(n > 100);
    let parsed = hksflow::graph::parse_graph(&s).unwrap();
    assert_eq!(parsed.len(), n);
}

#[test]
fn ocbase_reports_the_sram_ratio() {
    let o = hksflow(&["ocbase", "--benchmark", "DPRIVE"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("12.25"), "{s}");
    assert!(s.lines().any(|l| l.starts_with("DPRIVE,")));
}
