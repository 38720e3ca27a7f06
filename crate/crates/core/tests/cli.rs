//! End-to-end tests of the sgsim binary: outputs, determinism, exit codes.

use assert_cmd::Command;
use predicates::prelude::*;
use serde_json::Value;

fn sgsim() -> Command {
    Command::cargo_bin("sgsim").unwrap()
}

fn stdout_of(cmd: &mut Command) -> String {
    let output = cmd.output().unwrap();
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn pdf_initial_hump_is_symmetric() {
    let text = stdout_of(sgsim().args(["pdf", "--time", "0", "--grid-points", "401"]));
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["z", "pdf_total", "pdf_up", "pdf_down"]);
    assert_eq!(rows.len(), 401);

    let peak = rows
        .iter()
        .max_by(|a, b| a[1].total_cmp(&b[1]))
        .unwrap();
    assert!(peak[0].abs() < 0.1, "peak at z={}", peak[0]);
    for row in &rows {
        // Coincident branches split the density evenly.
        assert!((row[2] - row[3]).abs() < 1e-15);
        let mirrored = rows
            .iter()
            .min_by(|a, b| {
                (a[0] + row[0]).abs().total_cmp(&(b[0] + row[0]).abs())
            })
            .unwrap();
        assert!((mirrored[1] - row[1]).abs() < 1e-9);
    }
}

#[test]
fn pdf_late_time_spots_sit_at_centers() {
    let text = stdout_of(sgsim().args([
        "pdf",
        "--time",
        "3",
        "--z-min=-10",
        "--z-max=10",
        "--grid-points",
        "2001",
    ]));
    let (_, rows) = parse_csv(&text);
    let step = rows[1][0] - rows[0][0];
    let up_peak = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    let down_peak = rows.iter().max_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    assert!((up_peak[0] + 4.5).abs() <= step, "up spot at {}", up_peak[0]);
    assert!(
        (down_peak[0] - 4.5).abs() <= step,
        "down spot at {}",
        down_peak[0]
    );
}

#[test]
fn pdf_rejects_degenerate_grid() {
    sgsim()
        .args(["pdf", "--time", "1", "--grid-points", "1"])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("grid-points"));
}

#[test]
fn measure_spin_z_reports_half() {
    let text = stdout_of(sgsim().args([
        "measure",
        "--setting",
        "spin_z",
        "--time",
        "1",
        "-n",
        "10000",
        "--seed",
        "4",
    ]));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["all_within_5_sigma"], Value::Bool(true));
    for outcome in v["outcomes"].as_array().unwrap() {
        assert_eq!(outcome["analytic_probability"].as_f64().unwrap(), 0.5);
    }
}

#[test]
fn measure_spin_x_certain_at_t0() {
    let text = stdout_of(sgsim().args([
        "measure",
        "--setting",
        "spin_x",
        "--time",
        "0",
        "-n",
        "5000",
    ]));
    let v: Value = serde_json::from_str(&text).unwrap();
    let outcomes = v["outcomes"].as_array().unwrap();
    assert_eq!(outcomes[0]["analytic_probability"].as_f64().unwrap(), 1.0);
    assert_eq!(outcomes[0]["count"].as_u64().unwrap(), 5000);
    assert_eq!(outcomes[1]["analytic_probability"].as_f64().unwrap(), 0.0);
    assert_eq!(v["all_within_5_sigma"], Value::Bool(true));
}

#[test]
fn measure_is_deterministic_under_a_seed() {
    let args = [
        "measure", "--setting", "momentum_z", "--time", "2", "-n", "3000", "--seed", "11",
    ];
    let a = stdout_of(sgsim().args(args));
    let b = stdout_of(sgsim().args(args));
    assert_eq!(a, b);
}

#[test]
fn boxes_report_fields() {
    let text = stdout_of(sgsim().arg("boxes"));
    let v: Value = serde_json::from_str(&text).unwrap();

    let dev = v["nonsignaling"]["path_marginal_deviation"].as_f64().unwrap();
    assert!(dev < 1e-12);

    let assemblages = v["assemblages"].as_array().unwrap();
    let position = assemblages
        .iter()
        .find(|a| a["setting"] == "position_z")
        .unwrap();
    for member in position["members"].as_array().unwrap() {
        assert!((member["probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }

    let expected = 3.0f64.sqrt() / 2.0;
    let pos_vs_x = v["distinguishability"]
        .as_array()
        .unwrap()
        .iter()
        .find(|d| {
            let s = d["settings"].as_array().unwrap();
            s[0] == "position_z" && s[1] == "spin_x"
        })
        .unwrap();
    let got = pos_vs_x["max_min_trace_distance"].as_f64().unwrap();
    assert!((got - expected).abs() < 1e-9, "trace distance {got}");
}

#[test]
fn protocol_writes_identical_files_for_equal_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("records.csv");
    let mut contents = Vec::new();
    for _ in 0..2 {
        let text = String::from_utf8(
            sgsim()
                .args([
                    "protocol", "--n", "5000", "--time", "1", "--settings", "spin_z", "--seed",
                    "21", "--out",
                ])
                .arg(&out)
                .output()
                .unwrap()
                .stdout,
        )
        .unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["all_within_5_sigma"], Value::Bool(true));
        contents.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(contents[0], contents[1]);

    let text = std::str::from_utf8(&contents[0]).unwrap();
    assert!(text.starts_with(
        "atom_index,setting,alice_detected,alice_value,bob_form,bob_spin,bob_location,seq_control,seq_result\n"
    ));
    assert_eq!(text.lines().count(), 5001);
}

#[test]
fn protocol_respects_out_dir_env() {
    let dir = tempfile::tempdir().unwrap();
    sgsim()
        .env("SGSIM_OUT_DIR", dir.path())
        .args([
            "protocol", "--n", "50", "--time", "1", "--settings", "spin_z", "--seed", "3",
        ])
        .assert()
        .success();
    assert!(dir.path().join("records.csv").exists());
}

#[test]
fn protocol_rejects_zero_atoms_and_bad_models() {
    sgsim()
        .args(["protocol", "--n", "0", "--time", "1"])
        .assert()
        .code(2);
    sgsim()
        .args([
            "protocol",
            "--n",
            "10",
            "--time",
            "1",
            "--settings",
            "momentum_z",
            "--model",
            "boxes",
        ])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("momentum"));
}

#[test]
fn params_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strong.params");
    std::fs::write(&path, "# doubled gradient\nmu_c = 2.0\nb = 1.0\n").unwrap();
    let text = stdout_of(
        sgsim()
            .arg("--params")
            .arg(&path)
            .args([
                "pdf",
                "--time",
                "3",
                "--z-min=-15",
                "--z-max=15",
                "--grid-points",
                "3001",
            ]),
    );
    let (_, rows) = parse_csv(&text);
    let step = rows[1][0] - rows[0][0];
    // Center magnitude doubles: t^2 mu_c b / 2m = 9.
    let down_peak = rows.iter().max_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    assert!((down_peak[0] - 9.0).abs() <= step, "spot at {}", down_peak[0]);
}

#[test]
fn degenerate_params_rejected_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.params");
    std::fs::write(&path, "sigma0 = 0\n").unwrap();
    sgsim()
        .arg("--params")
        .arg(&path)
        .args(["validate"])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("sigma0"));

    let unknown = dir.path().join("unknown.params");
    std::fs::write(&unknown, "not_a_field = 1\n").unwrap();
    sgsim()
        .arg("--params")
        .arg(&unknown)
        .args(["validate"])
        .assert()
        .code(2);
}

#[test]
fn validate_reports_and_passes() {
    let text = stdout_of(sgsim().arg("validate"));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["hard_failures"].as_u64(), Some(0));
    let checks = v["checks"].as_array().unwrap();
    // The residual diagnostic is present regardless of pass/fail.
    assert!(checks
        .iter()
        .any(|c| c["name"] == "residual_defaults_t1" && c["kind"] == "informational"));
    for check in checks {
        if check["kind"] == "hard" {
            assert_eq!(check["passed"], Value::Bool(true), "{check}");
        }
    }
}
