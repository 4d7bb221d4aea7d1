use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_scmodes"));
    c.env_remove("SCMODES_OUT_DIR");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().find(|l| l.contains("\"error\"")).expect("error line on stderr");
    serde_json::from_str(line).unwrap()
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn invalid_input_exits_with_two_and_json_error() {
    let d = tmp();
    let o = run(&["modes", "--h", "-1"], &d.path().join("x.csv"));
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "invalid_input");
    assert_eq!(e["exit_code"], 2);

    let o = bin().args(["portrait", "--bogus"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "invalid_input");

    // SVG only for phase-plane commands
    let o = run(&["deficiency", "--format", "svg"], &d.path().join("x.svg"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let d = tmp();
    let (a, b) = (d.path().join("a.csv"), d.path().join("b.csv"));
    let args = ["portrait", "--h", "0.1", "--c0", "-0.02,0.01"];
    assert!(run(&args, &a).status.success());
    assert!(run(&args, &b).status.success());
    // the header records the output path, so compare from the table on
    let body = |p: &PathBuf| {
        let s = std::fs::read_to_string(p).unwrap();
        s.lines().filter(|l| !l.starts_with("# run-config")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(body(&a), body(&b));
}

#[test]
fn svg_is_drawn_from_the_csv() {
    let d = tmp();
    let (csv, svg) = (d.path().join("p.csv"), d.path().join("p.svg"));
    let args = ["portrait", "--h", "0.1", "--c0", "0.01", "--mirror"];
    assert!(run(&args, &csv).status.success());
    let mut with_svg = args.to_vec();
    with_svg.extend(["--format", "svg"]);
    let o = run(&with_svg, &svg);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let expected = scmodes::cli::svg_from_csv(&text).unwrap();
    assert_eq!(std::fs::read_to_string(&svg).unwrap(), expected);
    assert!(expected.starts_with("<svg"));
}

#[test]
fn config_file_and_flag_override() {
    let d = tmp();
    let cfg = d.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "deficiency", "h": 0.1, "n": 3, "m_max": 40}"#).unwrap();
    let out = d.path().join("def.json");
    let o = bin()
        .args(["deficiency", "--config"])
        .arg(&cfg)
        .args(["--m-max", "60", "--format", "json", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), out.to_str().unwrap());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["parameters"]["n"], 3);
    assert_eq!(v["config"]["parameters"]["m-max"], 60);

    std::fs::write(&cfg, r#"{"command": "portrait"}"#).unwrap();
    let o = bin().args(["deficiency", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn default_output_goes_to_the_env_directory() {
    let d = tmp();
    let o = bin().env("SCMODES_OUT_DIR", d.path()).args(["ellcurve", "--h", "0.1"]).output().unwrap();
    assert!(o.status.success());
    let path = d.path().join("ellcurve.csv");
    assert!(path.exists());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), path.to_str().unwrap());
}

#[test]
fn truncated_propagation_through_the_cli() {
    let d = tmp();
    let out = d.path().join("p.csv");
    let t = std::f64::consts::PI / 0.2f64.sqrt();
    let o = run(&["propagate", "--gen", "t4-truncated", "--h", "0.1", "--t", &t.to_string()], &out);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let row = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|s| s.to_string()).collect::<Vec<_>>())
        .max_by(|a, b| {
            let m = |r: &Vec<String>| r[2].parse::<f64>().unwrap().hypot(r[3].parse::<f64>().unwrap());
            m(a).total_cmp(&m(b))
        })
        .unwrap();
    assert_eq!((row[0].as_str(), row[1].as_str()), ("1", "0"));
    assert!((row[3].parse::<f64>().unwrap() + 1.0).abs() < 1e-10);
}

#[test]
fn modes_json_round_trips_into_propagate() {
    let d = tmp();
    let wf = d.path().join("mode.json");
    let o = run(&["modes", "--h", "1", "--m", "1", "--n", "0", "--grid-points", "64", "--format", "json"], &wf);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let parsed = scmodes::fields::GridWavefunction::from_json(&std::fs::read_to_string(&wf).unwrap()).unwrap();
    assert_eq!(parsed.grid().dims(), 2);

    let out = d.path().join("g.json");
    let o = bin()
        .args(["propagate", "--gen", "gyrator", "--h", "1", "--t", "0.4", "--format", "json", "--input"])
        .arg(&wf)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    // mismatched h is refused
    let o = bin()
        .args(["propagate", "--gen", "gyrator", "--h", "0.5", "--t", "0.4", "--input"])
        .arg(&wf)
        .arg("--out")
        .arg(d.path().join("bad.csv"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
