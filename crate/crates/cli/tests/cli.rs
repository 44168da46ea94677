use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sqhex_core::io::{parse_curve_csv, parse_density_csv};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn sqhex(args: &[&str], cfg: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqhex"))
        .args(args)
        .arg("--config")
        .arg(cfg)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn partition_function_lines() {
    let o = sqhex(&["partition-function", "--oracle"], &config("three_row.toml"));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Z = 60, oracle agrees"), "{}", stdout(&o));
    let o = sqhex(&["partition-function", "--oracle"], &config("three_row_vanishing.toml"));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Z = 0, no matchings"));
    let o = sqhex(&["partition-function"], &config("single_white_row.toml"));
    assert_eq!(stdout(&o).trim(), "Z = 1");
}

#[test]
fn sampling_is_byte_identical_under_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, seed: &str| {
        let out = dir.path().join(sub);
        let o = sqhex(
            &["sample", "--samples", "300", "--seed", seed, "--out", out.to_str().unwrap()],
            &config("three_row_weighted.toml"),
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        ["samples.txt", "measures.csv", "frequencies.csv"].map(|f| std::fs::read(out.join(f)).unwrap())
    };
    let a = run("a", "11");
    assert_eq!(a, run("b", "11"));
    assert_ne!(a[0], run("c", "12")[0]);
}

#[test]
fn usage_and_config_errors_exit_two() {
    let cfg = config("three_row.toml");
    assert_eq!(sqhex(&["sample", "--samples", "0"], &cfg).status.code(), Some(2));
    assert_eq!(sqhex(&["verify", "--suite", "unknown"], &cfg).status.code(), Some(2));
    assert_eq!(sqhex(&["density-map", "--grid", "10"], &cfg).status.code(), Some(2));
    assert_eq!(sqhex(&["partition-function"], &fixture("missing.toml")).status.code(), Some(2));
    assert_eq!(sqhex(&["partition-function"], &fixture("bad_key.toml")).status.code(), Some(2));
    // boundary needs [profile]
    assert_eq!(sqhex(&["boundary"], &cfg).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let o = sqhex(&["sample", "--out", dir.path().to_str().unwrap()], &config("three_row_vanishing.toml"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn boundary_csv_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = sqhex(&["boundary", "--format", "both", "--out", out], &config("two_segments.toml"));
    assert_eq!(o.status.code(), Some(0));
    let samples = parse_curve_csv(&std::fs::read_to_string(dir.path().join("boundary.csv")).unwrap()).unwrap();
    assert!(samples.len() > 100);
    assert!(samples.iter().all(|s| s.residual < 1e-8));
    assert!(std::fs::read_to_string(dir.path().join("boundary.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn components_give_one_file_per_class() {
    let dir = tempfile::tempdir().unwrap();
    let o = sqhex(&["boundary", "--components", "--out", dir.path().to_str().unwrap()], &config("two_classes.toml"));
    assert_eq!(o.status.code(), Some(0));
    for i in 1..=2 {
        let text = std::fs::read_to_string(dir.path().join(format!("component_{i}.csv"))).unwrap();
        assert!(!parse_curve_csv(&text).unwrap().is_empty());
    }
    assert!(!dir.path().join("component_3.csv").exists());
}

#[test]
fn density_map_has_the_requested_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = sqhex(&["density-map", "--grid", "12x5", "--out", dir.path().to_str().unwrap()], &config("two_segments.toml"));
    assert_eq!(o.status.code(), Some(0));
    let cells = parse_density_csv(&std::fs::read_to_string(dir.path().join("density.csv")).unwrap()).unwrap();
    assert_eq!(cells.len(), 60);
    assert!(cells.iter().all(|c| (0.0..=1.0).contains(&c.density)));
}

#[test]
fn shipped_configs_verify() {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(config(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    entries.sort();
    assert!(entries.len() >= 6);
    for cfg in entries {
        let o = sqhex(&["verify"], &cfg);
        assert_eq!(o.status.code(), Some(0), "{}:\n{}", cfg.display(), stdout(&o));
    }
}

#[test]
fn overlapping_components_fail_verification() {
    let o = sqhex(&["verify", "--suite", "components"], &fixture("overlap.toml"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("component overlap"), "{}", stdout(&o));
    // and a suite that does not apply is a usage error
    assert_eq!(sqhex(&["verify", "--suite", "oracle"], &fixture("overlap.toml")).status.code(), Some(2));
}
