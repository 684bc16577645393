//! End-to-end checks of the binary: exit codes, artifact shape, and
//! byte-level determinism of written files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starwalk"))
        .args(args)
        .output()
        .expect("binary launches")
}

/// Unique temp path per test; tests run in parallel in one process.
fn scratch(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("starwalk-cli-{}-{name}", std::process::id()));
    path
}

fn read_json(path: &PathBuf) -> serde_json::Value {
    let bytes = std::fs::read(path).expect("artifact exists");
    serde_json::from_slice(&bytes).expect("artifact is valid JSON")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn version_flag_prints_tool_version() {
    let output = run(&["--version"]);
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).starts_with("starwalk "));
}

#[test]
fn simulate_writes_a_full_dump() {
    let out = scratch("simulate-two.json");
    let output = run(&[
        "simulate",
        "--stars",
        "2",
        "--prongs",
        "10",
        "--steps",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let doc = read_json(&out);
    assert!(doc["metadata"]["tool"]
        .as_str()
        .unwrap()
        .starts_with("starwalk "));
    assert_eq!(doc["metadata"]["command"], "simulate");
    assert!(doc["metadata"]["tolerances"].is_object());
    let report = &doc["report"];
    assert_eq!(report["family"], "two_star");
    assert_eq!(report["edge_probabilities"].as_array().unwrap().len(), 20);
    assert_eq!(report["amplitudes"].as_array().unwrap().len(), 40);
    assert!((report["total_probability"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(report["grouped"].is_null());
    std::fs::remove_file(&out).ok();
}

#[test]
fn simulate_three_star_reports_grouped_weights() {
    let out = scratch("simulate-three.json");
    let output = run(&[
        "simulate",
        "--stars",
        "3",
        "--prongs",
        "10",
        "--shared",
        "3",
        "--steps",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let report = &read_json(&out)["report"];
    assert_eq!(report["family"], "three_star");
    assert_eq!(report["edge_probabilities"].as_array().unwrap().len(), 30);
    assert_eq!(report["amplitudes"].as_array().unwrap().len(), 60);
    for key in ["psi2", "psi3", "psi4"] {
        let weight = report["grouped"][key].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&weight));
    }
    std::fs::remove_file(&out).ok();
}

#[test]
fn experiment_reports_the_two_star_optimum() {
    let out = scratch("experiment-two.json");
    let output = run(&[
        "experiment",
        "--stars",
        "2",
        "--prongs",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let report = &read_json(&out)["report"];
    assert_eq!(report["predicted_step"], 10);
    assert_eq!(report["observed_step"], 10);
    assert!(report["max_path_probability"].as_f64().unwrap() > 0.99);
    let series = report["series"].as_array().unwrap();
    assert_eq!(series.len(), 11);
    for (i, record) in series.iter().enumerate() {
        assert_eq!(record["step"], 2 * i as u64);
    }
    std::fs::remove_file(&out).ok();
}

#[test]
fn spectrum_agrees_across_routes() {
    let out = scratch("spectrum.json");
    let output = run(&[
        "spectrum",
        "--prongs",
        "200",
        "--shared",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let report = &read_json(&out)["report"];
    assert_eq!(report["parameters"]["family"], "three_star");
    assert!(report["route_agreement"].as_f64().unwrap() < 1e-9);
    assert!(report["char_poly_deviation"].as_f64().unwrap() < 1e-9);
    let modes = report["modes"].as_array().unwrap();
    assert_eq!(modes.len(), 5);
    assert_eq!(modes[0]["branch"], "minus_one");
    assert_eq!(modes[0]["phase_sign"], 0);
    let gamma = report["gamma"].as_array().unwrap();
    let root = 32.0f64.sqrt();
    assert!((gamma[0].as_f64().unwrap() - (8.0 + root)).abs() < 1e-9);
    assert!((gamma[1].as_f64().unwrap() - (8.0 - root)).abs() < 1e-9);
    std::fs::remove_file(&out).ok();
}

#[test]
fn ratio_curve_writes_csv_rows() {
    let out = scratch("ratio.csv");
    let output = run(&[
        "ratio-curve",
        "--prongs",
        "200",
        "--shared-range",
        "2:4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# starwalk "));
    assert!(text.contains("\nm,r_plus,p_psi2,p_psi3,p_psi4\n"));
    // 4 metadata lines, 1 header, 3 data rows.
    assert_eq!(text.lines().count(), 8);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("4,"));
    std::fs::remove_file(&out).ok();
}

#[test]
fn sweep_sorts_cells_and_inlines_cell_errors() {
    let out = scratch("sweep.csv");
    let output = run(&[
        "sweep",
        "--stars",
        "3",
        "--prongs-list",
        "40,6",
        "--shared-list",
        "5,2",
        "--jobs",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(
        lines[4],
        "stars,prongs,shared,transmission,predicted_step,observed_step,\
         max_path_probability,path_probability_at_predicted,p_plus,r_plus,error"
    );
    // Cells come back sorted by (prongs, shared) regardless of input order.
    assert!(lines[5].starts_with("3,6,2,"));
    assert!(lines[6].starts_with("3,6,5,"));
    assert!(lines[7].starts_with("3,40,2,"));
    assert!(lines[8].starts_with("3,40,5,"));
    // (6,5) violates the sharing bound; its row carries the message in the
    // error column and nothing else.
    assert!(lines[6].starts_with("3,6,5,,,,,,,,"));
    assert!(lines[6].len() > "3,6,5,,,,,,,,".len());
    // Successful rows end with an empty error column.
    assert!(lines[5].ends_with(','));
    for line in &lines[5..] {
        assert_eq!(line.matches(',').count(), 10);
    }
    std::fs::remove_file(&out).ok();
}

#[test]
fn sweep_bytes_do_not_depend_on_thread_count() {
    let serial = scratch("sweep-serial.csv");
    let parallel = scratch("sweep-parallel.csv");
    for (path, jobs) in [(&serial, "1"), (&parallel, "4")] {
        let output = run(&[
            "sweep",
            "--stars",
            "3",
            "--prongs-list",
            "30,40",
            "--shared-list",
            "2,3",
            "--jobs",
            jobs,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    }
    let a = std::fs::read(&serial).unwrap();
    let b = std::fs::read(&parallel).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    std::fs::remove_file(&serial).ok();
    std::fs::remove_file(&parallel).ok();
}

#[test]
fn invalid_parameters_exit_two_and_write_nothing() {
    let out = scratch("rejected.json");
    let output = run(&[
        "simulate",
        "--stars",
        "2",
        "--prongs",
        "3",
        "--steps",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("error:"));
    assert!(!out.exists());
}

#[test]
fn two_star_rejects_a_sharing_parameter() {
    let out = scratch("rejected-shared.json");
    let output = run(&[
        "simulate",
        "--stars",
        "2",
        "--prongs",
        "10",
        "--shared",
        "3",
        "--steps",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn three_star_requires_a_sharing_parameter() {
    let out = scratch("rejected-unshared.json");
    let output = run(&[
        "experiment",
        "--stars",
        "3",
        "--prongs",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unsupported_star_count_exits_two() {
    let out = scratch("rejected-stars.json");
    let output = run(&[
        "simulate",
        "--stars",
        "4",
        "--prongs",
        "10",
        "--steps",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unknown_flags_exit_two() {
    let output = run(&["simulate", "--bogus"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_one() {
    let output = run(&[
        "simulate",
        "--stars",
        "2",
        "--prongs",
        "10",
        "--steps",
        "1",
        "--out",
        "/starwalk-no-such-dir/dump.json",
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn degenerate_scaling_grid_exits_three() {
    let out = scratch("rejected-scaling.json");
    let output = run(&[
        "scaling",
        "--stars",
        "2",
        "--prongs-list",
        "100,100,100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr_of(&output).contains("error:"));
}
