use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use fracscreen_cli::{Cli, RunConfig};
use serde_json::Value;
use tempfile::TempDir;

fn fracscreen(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracscreen"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env_remove("FRACSCREEN_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok_summary(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("summary json on stdout")
}

fn error_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("error json on stderr")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const EXAMPLE_D: &str = r#"{
  "name": "example_d",
  "ambient_dim": 2,
  "maps": [
    {"rho": 0.25, "translation": [0.0, 0.0]},
    {"rho": 0.25, "translation": [0.0, 0.25]},
    {"rho": 0.25, "translation": [0.0, 0.5]},
    {"rho": 0.25, "translation": [0.0, 0.75]},
    {"rho": 0.25, "translation": [0.5, 0.0]},
    {"rho": 0.25, "translation": [0.5, 0.25]},
    {"rho": 0.25, "translation": [0.5, 0.5]},
    {"rho": 0.25, "translation": [0.5, 0.75]},
    {"rho": 0.5, "translation": [0.5, 0.0]},
    {"rho": 0.5, "translation": [0.5, 0.5]}
  ]
}"#;

const GASKET: &str = r#"{
  "name": "gasket",
  "ambient_dim": 2,
  "maps": [
    {"rho": 0.5, "rotation_deg": 0.0, "translation": [0.0, 0.0]},
    {"rho": 0.5, "rotation_deg": 0.0, "translation": [0.5, 0.0]},
    {"rho": 0.5, "rotation_deg": 0.0, "translation": [0.25, 0.4330127018922193]}
  ]
}"#;

#[test]
fn square_mesh_csv_sums_to_one() {
    let dir = TempDir::new().unwrap();
    let s = ok_summary(&fracscreen(dir.path(), &["attractor", "mesh", "--h", "0.1"]));
    assert_eq!(s["command"], "attractor mesh");
    let csv = std::fs::read_to_string(dir.path().join("mesh.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "index;diameter;measure;barycenter_0;barycenter_1");
    let mut total = 0.0;
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(';').collect();
        assert_eq!(fields.len(), 5);
        let diam: f64 = fields[1].parse().unwrap();
        assert!(diam <= 0.1 && diam > 0.05);
        total += fields[2].parse::<f64>().unwrap();
        rows += 1;
    }
    assert_eq!(rows, s["result"]["cells"].as_u64().unwrap());
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn example_d_parses_as_n_attractor() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "d.json", EXAMPLE_D);
    let s = ok_summary(&fracscreen(dir.path(), &["attractor", "info", "--ifs", &file]));
    let r = &s["result"];
    assert_eq!(r["n_attractor"], true);
    assert!((r["similarity_dimension"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn bad_ratio_names_the_field() {
    let dir = TempDir::new().unwrap();
    let file = write(
        dir.path(),
        "bad.json",
        r#"{"name": "bad", "ambient_dim": 2, "maps": [
            {"rho": 0.5, "translation": [0, 0]},
            {"rho": 1.2, "translation": [0.5, 0]}]}"#,
    );
    let out = fracscreen(dir.path(), &["attractor", "info", "--ifs", &file]);
    assert_eq!(out.status.code(), Some(2));
    let e = error_of(&out);
    assert_eq!(e["error"]["kind"], "validation");
    assert!(e["error"]["field"].as_str().unwrap().contains("maps[1].rho"), "{e}");
}

#[test]
fn unknown_keys_in_ifs_are_rejected() {
    let dir = TempDir::new().unwrap();
    let file = write(
        dir.path(),
        "extra.json",
        r#"{"name": "x", "ambient_dim": 1, "colour": "red", "maps": [{"rho": 0.5, "translation": [0]}]}"#,
    );
    let out = fracscreen(dir.path(), &["attractor", "info", "--ifs", &file]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_of(&out)["error"]["message"].as_str().unwrap().contains("colour"));
}

#[test]
fn solver_requires_an_n_attractor() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "gasket.json", GASKET);
    let out = fracscreen(dir.path(), &["bem", "solve", "--ifs", &file, "--level", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_of(&out)["error"]["message"].as_str().unwrap().contains("n-attractor"));
}

#[test]
fn randomized_probes_need_a_seed() {
    let dir = TempDir::new().unwrap();
    let out = fracscreen(dir.path(), &["geom", "porosity"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn seeded_outputs_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["geom", "porosity", "--pixel", "0.0078125", "--trials", "40", "--seed", "7"];
    let sa = fracscreen(a.path(), &args);
    let sb = fracscreen(b.path(), &args);
    ok_summary(&sa);
    assert_eq!(sa.stdout, sb.stdout);
    for f in ["porosity.json", "summary.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn floats_are_printed_with_seventeen_digits() {
    let dir = TempDir::new().unwrap();
    let out = fracscreen(dir.path(), &["attractor", "info", "--attractor", "koch_snowflake"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"similarity_dimension\"")).unwrap();
    let number = line.split(": ").nth(1).unwrap().trim_end_matches(',');
    let mantissa = number.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17, "{number}");
}

#[test]
fn replay_reproduces_a_run() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    ok_summary(&fracscreen(a.path(), &["approx", "project", "--level", "3", "--function", "sine-bump"]));
    let summary = a.path().join("summary.json").display().to_string();
    let s = ok_summary(&fracscreen(b.path(), &["replay", &summary]));
    assert_eq!(s["command"], "approx project");
    for f in ["projection.csv", "projection.json", "summary.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn replay_rejects_unknown_keys() {
    let dir = TempDir::new().unwrap();
    let file = write(
        dir.path(),
        "cfg.json",
        r#"{"attractor": {"info": {"source": {"attractor": "unit_square", "ifs": null}, "verbose": true}}}"#,
    );
    let out = fracscreen(dir.path(), &["replay", &file]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_of(&out)["error"]["message"].as_str().unwrap().contains("verbose"));
}

#[test]
fn run_configs_round_trip() {
    let cases: &[&[&str]] = &[
        &["attractor", "render", "--attractor", "gamma_1d", "--pixel", "0.01"],
        &["geom", "dt", "--t", "0.5", "--radii", "0.5,0.25", "--seed", "3"],
        &["geom", "aikawa", "--s", "1.5", "--seed", "4", "--centers", "8"],
        &["approx", "converge", "--h-list", "0.5,0.25,0.125", "--s1", "-1", "--s2", "0.5"],
        &["bem", "converge", "--levels", "0,1,2,3", "--k", "2.5", "--theta", "30"],
        &["bem", "field", "--h", "0.3", "--grid", "2,3,4", "--box", "-1,1,-1,1,0.5,1", "--rule", "fixed"],
    ];
    for args in cases {
        let cli = Cli::try_parse_from(std::iter::once("fracscreen").chain(args.iter().copied())).unwrap();
        let text = serde_json::to_string(&cli.command).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cli.command, "{text}");
    }
}

#[test]
fn snowflake_box_dimension() {
    let dir = TempDir::new().unwrap();
    let s = ok_summary(&fracscreen(dir.path(), &["geom", "dim", "--attractor", "koch_snowflake"]));
    let slope = s["result"]["slope"].as_f64().unwrap();
    assert!((slope - 4f64.ln() / 3f64.ln()).abs() < 0.05, "{slope}");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("dimension.json")).unwrap()).unwrap();
    assert_eq!(report["probe"], "boundary_box_dimension");
}

#[test]
fn bem_solve_and_field() {
    let dir = TempDir::new().unwrap();
    let s = ok_summary(&fracscreen(dir.path(), &["bem", "solve", "--level", "2", "--k", "5"]));
    assert!(s["result"]["residual"].as_f64().unwrap() < 1e-10);
    let sol: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("solution.json")).unwrap()).unwrap();
    assert_eq!(sol["coefficients"].as_array().unwrap().len(), 16);
    assert!(sol["quadrature_error_max"].as_f64().is_some());

    ok_summary(&fracscreen(dir.path(), &["bem", "field", "--level", "2", "--grid", "3,2,2"]));
    let csv = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "x,y,z,re_u,im_u,abs_u");
    assert_eq!(csv.lines().count(), 1 + 12);

    let out = fracscreen(dir.path(), &["bem", "field", "--level", "1", "--grid", "2,2,3", "--box", "0,1,0,1,-1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_of(&out)["error"]["message"].as_str().unwrap().contains("screen plane"));
}

#[test]
fn bem_converge_reports_rates() {
    let dir = TempDir::new().unwrap();
    let s = ok_summary(&fracscreen(dir.path(), &["bem", "converge", "--levels", "0,1,2,3", "--k", "2"]));
    let r = &s["result"];
    assert_eq!(r["reference_cells"], 1024);
    assert!(r["energy_slope"].as_f64().unwrap() > 0.2);
    let csv = std::fs::read_to_string(dir.path().join("bem_study.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn output_dir_from_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fracscreen"))
        .args(["attractor", "info", "--attractor", "unit_interval"])
        .env("FRACSCREEN_OUT_DIR", dir.path())
        .output()
        .unwrap();
    ok_summary(&out);
    assert!(dir.path().join("attractor_info.json").exists());
}

#[test]
fn thread_cap_keeps_results() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let one = fracscreen(a.path(), &["--threads", "1", "bem", "solve", "--level", "2"]);
    ok_summary(&one);
    ok_summary(&fracscreen(b.path(), &["bem", "solve", "--level", "2"]));
    assert_eq!(
        std::fs::read(a.path().join("solution.json")).unwrap(),
        std::fs::read(b.path().join("solution.json")).unwrap()
    );
}
