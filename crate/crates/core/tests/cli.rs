use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sbstoch::cli::CoefficientsReport;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sbstoch"));
    cmd.env_remove("SBSTOCH_OUT");
    cmd
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(sub: &str, scenario: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg(sub).arg(scenario).arg("--out").arg(out).args(extra).output().unwrap()
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.toml");
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const MINIMAL: &str = "[system]\nepsilon = 0.0\ndelta = 1.0\n\n[bath]\nfamily = \"ohmic\"\nalpha = 0.1\nomega_c = 10.0\n";

#[test]
fn ohmic_reference_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("coeffs", &scenario("ohmic_reference.toml"), dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("coefficients.json")).unwrap();
    let report = CoefficientsReport::validate_json(&text).unwrap();
    assert!((report.gamma - 0.284_25).abs() < 2e-5);
    assert_eq!(report.regime, "DampedOscillation");
    assert!((report.scenario.run.t_max.unwrap() - 20.0 / report.gamma).abs() < 1e-12);
    assert!(report.coth_ratio.is_none());
}

#[test]
fn regime_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("regime", &scenario("ohmic_reference.toml"), dir.path(), &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "DampedOscillation");
    assert!(dir.path().join("regime.json").exists());
}

#[test]
fn pure_oscillation_has_constant_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("run", &scenario("off_resonance_box.toml"), dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = CoefficientsReport::validate_json(&fs::read_to_string(dir.path().join("coefficients.json")).unwrap())
        .unwrap();
    assert_eq!(report.regime, "PureOscillation");
    let csv = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, ["t", "re_p", "im_p", "abs_p", "re_trU", "im_trU", "re_trC"]);
    let mut rows = 0;
    for line in lines {
        let abs_p: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((abs_p - 1.0).abs() < 1e-9);
        rows += 1;
    }
    assert_eq!(rows, 1001);
    assert!(dir.path().join("plot.gp").exists());
    assert!(dir.path().join("correlator.csv").exists());
}

#[test]
fn thermal_report_has_coth_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("coeffs", &scenario("thermal_ohmic.toml"), dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = CoefficientsReport::validate_json(&fs::read_to_string(dir.path().join("coefficients.json")).unwrap())
        .unwrap();
    assert!((report.coth_ratio.unwrap() - 1.0 / 1.0f64.tanh()).abs() < 1e-10);
    assert!(report.phi_extrapolated);
}

#[test]
fn solve_damping_box_and_ohmic() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("solve-damping", &scenario("damping_condition_box.toml"), dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("damping.json")).unwrap()).unwrap();
    assert!((v["alpha"].as_f64().unwrap() - std::f64::consts::LOG2_E).abs() < 1e-9);
    assert!(v["residual"].as_f64().unwrap() < 1e-8);

    let dir = tempfile::tempdir().unwrap();
    let o = run("solve-damping", &scenario("ohmic_reference.toml"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NoSolution: σ_unit ≤ 0"), "{}", stderr(&o));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn validation_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), &MINIMAL.replace("delta = 1.0", "delta = -1.0"));
    let o = run("coeffs", &p, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ValidationError(delta)"), "{}", stderr(&o));

    let p = write_scenario(dir.path(), &format!("{MINIMAL}gama = 0.3\n"));
    let o = run("coeffs", &p, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gama"), "{}", stderr(&o));

    let p = write_scenario(dir.path(), "[system]\ndelta = 1.0\n[bath\n");
    let o = run("coeffs", &p, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(":3:"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn numerical_failure_exits_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), &format!("{MINIMAL}beta = 2.0\n").replace("epsilon = 0.0", "epsilon = 0.3"));
    let out = dir.path().join("out");
    let o = run("run", &p, &out, &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn minimal_scenario_defaults_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), MINIMAL);
    let o = run("coeffs", &p, &dir.path().join("out"), &[]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("out/coefficients.json")).unwrap();
    let report = CoefficientsReport::validate_json(&text).unwrap();
    assert_eq!(report.scenario.run.n_points, Some(401));
    assert!(report.beta.is_none());
    assert_eq!(report.scenario.quadrature.rel_tol, Some(1e-10));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .arg("evolve")
        .arg(scenario("ohmic_reference.toml"))
        .env("SBSTOCH_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("series.csv").exists());
}

#[test]
fn json_format() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("evolve", &scenario("biased_table.toml"), dir.path(), &["--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("series.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 201);
    assert!(v[0]["re_p"].is_number());
    assert!(!dir.path().join("plot.gp").exists());
}

#[test]
fn oracle_subcommand_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(
        dir.path(),
        &format!("{MINIMAL}\n[oracle]\nmodes = 3\nfock_truncation = 1\nlambda_list = [0.5, 0.4]\nn_points = 5\n"),
    );
    let out = dir.path().join("out");
    let o = run("oracle", &p, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let run_csv = fs::read_to_string(out.join("oracle/lambda_0.5.csv")).unwrap();
    assert!(run_csv.starts_with("t_limit,t_physical,re_sigma_z,p_limit,abs_error\n"));
    assert_eq!(run_csv.lines().count(), 6);
    assert!(out.join("oracle/lambda_0.4.csv").exists());
    let conv = fs::read_to_string(out.join("oracle/convergence.csv")).unwrap();
    assert_eq!(conv.lines().count(), 3);
}

#[test]
fn runs_are_byte_identical() {
    for name in ["ohmic_reference.toml", "thermal_ohmic.toml", "biased_table.toml", "resonant_box.toml"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert!(run("run", &scenario(name), a.path(), &[]).status.success());
        assert!(run("run", &scenario(name), b.path(), &[]).status.success());
        for entry in fs::read_dir(a.path()).unwrap() {
            let entry = entry.unwrap();
            let other = b.path().join(entry.file_name());
            assert_eq!(fs::read(entry.path()).unwrap(), fs::read(other).unwrap(), "{name}: {:?}", entry.file_name());
        }
    }
}

#[test]
fn help_exits_zero_and_bad_flag_exits_one() {
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(bin().arg("coeffs").arg("--bogus").output().unwrap().status.code(), Some(1));
}
