//! End-to-end tests of the `mqs` binary: CSV contract, determinism, exit
//! codes, and the documented interface of each subcommand.

use std::path::PathBuf;
use std::process::{Command, Output};

fn mqs() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mqs"))
}

fn run(args: &[&str]) -> Output {
    mqs().args(args).output().expect("binary runs")
}

fn temp_path(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("mqs-cli-test-{}-{name}", std::process::id()));
    path
}

#[test]
fn sweep_reproduces_the_one_lost_photon_visibility() {
    // alpha = 4, R in {0, 1/16}: D drops from 1.0 to 0.096.
    let out_path = temp_path("cat.csv");
    let output = run(&[
        "sweep",
        "--family",
        "coherent_mqs",
        "--alpha",
        "4",
        "--r-grid",
        "0,0.0625",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    let d0: f64 = rows[0][9].parse().unwrap();
    let d1: f64 = rows[1][9].parse().unwrap();
    assert!((d0 - 1.0).abs() < 1e-3, "lossless visibility {d0}");
    assert!((d1 - 0.096).abs() < 1e-3, "one-photon-lost visibility {d1}");
    let x1: f64 = rows[1][7].parse().unwrap();
    assert!((x1 - 1.0).abs() < 1e-12, "x column should be R|alpha|^2 = 1");
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let path_a = temp_path("det-a.csv");
    let path_b = temp_path("det-b.csv");
    let args = |out: &str| {
        vec![
            "sweep".to_string(),
            "--family".into(),
            "qiopa_equatorial".into(),
            "--g".into(),
            "0.4".into(),
            "--r-grid".into(),
            "0,0.35,0.8".into(),
            "--n-max".into(),
            "16".into(),
            "--tail-tol".into(),
            "1e-5".into(),
            "--threads".into(),
            "2".into(),
            "--output".into(),
            out.into(),
        ]
    };
    let run_a = mqs().args(args(path_a.to_str().unwrap())).output().unwrap();
    let run_b = mqs().args(args(path_b.to_str().unwrap())).output().unwrap();
    assert!(run_a.status.success() && run_b.status.success());
    let bytes_a = std::fs::read(&path_a).unwrap();
    let bytes_b = std::fs::read(&path_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "identical config must give identical bytes");
    std::fs::remove_file(&path_a).ok();
    std::fs::remove_file(&path_b).ok();
}

#[test]
fn grid_refinement_preserves_shared_rows() {
    let coarse = temp_path("coarse.csv");
    let fine = temp_path("fine.csv");
    for (grid, path) in [("0,0.5", &coarse), ("0,0.25,0.5", &fine)] {
        let output = run(&[
            "sweep",
            "--family",
            "qiopa_hv",
            "--g",
            "0.4",
            "--r-grid",
            grid,
            "--n-max",
            "16",
            "--tail-tol",
            "1e-5",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    let read_rows = |p: &PathBuf| -> Vec<String> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .skip(1)
            .map(String::from)
            .collect()
    };
    let coarse_rows = read_rows(&coarse);
    let fine_rows = read_rows(&fine);
    assert!(fine_rows.contains(&coarse_rows[0]));
    assert!(fine_rows.contains(&coarse_rows[1]));
    std::fs::remove_file(&coarse).ok();
    std::fs::remove_file(&fine).ok();
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let cfg_path = temp_path("sweep.conf");
    let out_path = temp_path("fromfile.csv");
    std::fs::write(
        &cfg_path,
        format!(
            "# sweep description\nfamily = noon\nphotons = 2\nr_grid = 0,0.5\noutput = {}\n",
            out_path.display()
        ),
    )
    .unwrap();
    // Override photon number from the command line, keep the rest.
    let output = run(&[
        "sweep",
        "--config",
        cfg_path.to_str().unwrap(),
        "--photons",
        "3",
    ]);
    assert!(output.status.success(), "{output:?}");
    let text = std::fs::read_to_string(&out_path).unwrap();
    let first_row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first_row[0], "noon");
    assert_eq!(first_row[4], "3", "flag must override the file value");
    std::fs::remove_file(&cfg_path).ok();
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn bad_configuration_exits_with_code_two() {
    let output = run(&["sweep", "--family", "thermal"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unknown family"), "diagnostic on stderr: {stderr}");

    let output = run(&["sweep", "--family", "noon", "--r-grid", "0.9,0.1"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn failed_grid_points_are_reported_and_skipped() {
    // n_max = 10 cannot hold an alpha = 4 cat; every row fails but the sweep
    // still terminates cleanly with an empty table.
    let out_path = temp_path("failing.csv");
    let output = run(&[
        "sweep",
        "--family",
        "coherent_mqs",
        "--alpha",
        "4",
        "--r-grid",
        "0,0.5",
        "--n-max",
        "10",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "row-level failures are not fatal");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("failed"), "rows must be reported: {stderr}");
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 1, "header only");
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn validate_subset_passes_and_reports_lines() {
    let output = run(&[
        "validate",
        "--checks",
        "kraus_completeness,noon_scaling_laws,channel_semigroup",
    ]);
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("PASS kraus_completeness"));
    assert!(stdout.contains("PASS noon_scaling_laws"));
    assert!(stdout.contains("PASS channel_semigroup"));
    assert!(stdout.contains("3 checks, 0 failed"));
}

#[test]
fn info_prints_amplifier_numbers() {
    let output = run(&["info", "--family", "qiopa_equatorial", "--g", "1.5"]);
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("mean photon number"));
    // <n> = 4 cosh^2(1.5) - 3 = 19.135...
    assert!(stdout.contains("19.135"), "{stdout}");
    assert!(stdout.contains("slope-limit"));
}
