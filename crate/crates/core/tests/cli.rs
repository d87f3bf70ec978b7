//! Command-line driver: exit codes, outputs and the shipped configs.

use std::path::{Path, PathBuf};

use esdg::cli::config::RunConfig;
use esdg::cli::main_with_args;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("esdg")
        .chain(args.iter().copied())
        .map(String::from);
    let code = main_with_args(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn shipped_configs_parse() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "cfg") {
            let cfg =
                RunConfig::load(Some(&p), &[]).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            let (code, _) = run(&["mesh-info", "-c", p.to_str().unwrap()]);
            assert_eq!(code, 0, "{}", p.display());
            assert_eq!(RunConfig::parse_str(&cfg.echo()).unwrap(), cfg);
            n += 1;
        }
    }
    assert!(n >= 5);
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, text) = run(&[
        "run",
        "--case",
        "cavity",
        "--N",
        "1",
        "--K1D",
        "2",
        "--t_final",
        "0.02",
        "--snapshot_times",
        "0.01",
        "--output_dir",
        out,
    ]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("e_wall"));
    let echo = std::fs::read_to_string(dir.path().join("config.echo")).unwrap();
    let cfg = RunConfig::parse_str(&echo).unwrap();
    assert_eq!((cfg.n, cfg.k1d, cfg.t_final), (1, 2, 0.02));
    let csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with(esdg::timeloop::CSV_HEADER));
    assert!(csv.lines().count() > 2);
    assert!(dir.path().join("snapshot_0000.vtk").exists());
    assert!(dir.path().join("snapshot_0001.vtk").exists());
}

#[test]
fn identity_violation_exits_3() {
    // penalties on make r strictly negative, so the equality check trips
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&[
        "run",
        "--case",
        "cavity",
        "--N",
        "1",
        "--K1D",
        "2",
        "--t_final",
        "0.05",
        "--identity_check",
        "equality",
        "--output_dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(run(&["run", "--case", "nowhere"]).0, 2);
    assert_eq!(run(&["run", "--case", "cavity", "--N", "two"]).0, 2);
    assert_eq!(run(&["run", "-c", "/nonexistent.cfg"]).0, 2);
    assert_eq!(run(&["converge", "--case", "cavity"]).0, 2);
    assert_eq!(run(&["mesh-info", "--mesh", "/nonexistent.trimesh"]).0, 2);
}

#[test]
fn converge_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run(&[
        "converge",
        "--degrees",
        "1",
        "--k1d",
        "1,2",
        "--t_final",
        "0.01",
        "--output_dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(text.starts_with("K1D,N=1,rate_N=1\n"));
    assert_eq!(text.lines().count(), 3);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap(),
        text
    );
}
