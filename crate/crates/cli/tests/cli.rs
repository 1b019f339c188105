use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cagecalc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cagecalc"))
        .arg("--quiet")
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("run cagecalc")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(2).map(|l| l.split(',').map(String::from).collect()).collect()
}

const SMALL_SWEEP: &str = r#"
[cage]
curve = "circle"
m = 12
delta = 0.05

[source]
z0 = [2.0, 0.0]

[sweep]
variable = "k"
start = 1.0
stop = 1.0001
count = 2
models = ["discrete", "thin", "resonance"]

[output]
name = "small"
"#;

#[test]
fn unknown_key_exits_2_with_line() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "bad.toml", "[cage]\ncurve = \"circle\"\nm = 10\ndelta = 0.1\nwires = 3\n");
    let out = cagecalc(d.path(), &["sweep", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5") && err.contains("wires"), "{err}");
}

#[test]
fn missing_sweep_section_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "c.toml", "[cage]\ncurve = \"circle\"\nm = 10\ndelta = 0.1\n");
    assert_eq!(cagecalc(d.path(), &["sweep", &cfg]).status.code(), Some(2));
}

#[test]
fn two_sample_sweep_has_hash_header_and_close_rows() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "s.toml", SMALL_SWEEP);
    let out = cagecalc(d.path(), &["sweep", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(d.path().join("small.csv")).unwrap();
    let summary = json(&d.path().join("small.json"));
    let first = csv.lines().next().unwrap();
    assert_eq!(first, format!("# config-hash={}", summary["config_hash"].as_str().unwrap()));
    assert_eq!(first.len(), "# config-hash=".len() + 64);
    let header = csv.lines().nth(1).unwrap();
    assert_eq!(
        header,
        "k,discrete.p0.abs,discrete.flag,thin.p0.abs,thin.flag,resonance.p0.abs,resonance.flag"
    );

    let r = rows(&csv);
    assert_eq!(r.len(), 2);
    for col in [1, 3, 5] {
        let a: f64 = r[0][col].parse().unwrap();
        let b: f64 = r[1][col].parse().unwrap();
        assert!(a.is_finite() && a > 0.0);
        assert!((a - b).abs() < 1e-3 * a, "column {col}: {a} vs {b}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "s.toml", SMALL_SWEEP);
    assert!(cagecalc(d.path(), &["sweep", &cfg]).status.success());
    let first = fs::read(d.path().join("small.csv")).unwrap();
    let e = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cagecalc"))
        .args(["--quiet", "--threads", "1", "--out"])
        .arg(e.path())
        .args(["sweep", &cfg])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(first, fs::read(e.path().join("small.csv")).unwrap());
}

#[test]
fn empty_cage_grid_is_the_free_field() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(
        d.path(),
        "g.toml",
        r#"
[cage]
curve = "circle"
m = 0
delta = 0.1

[source]
z0 = [2.0, 0.0]
k = 1.5

[grid]
x = [-1.0, 1.0]
y = [-1.0, 1.0]
nx = 5
ny = 5

[output]
name = "free"
"#,
    );
    let out = cagecalc(d.path(), &["grid", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&d.path().join("free.json"));
    let csv = fs::read_to_string(d.path().join("free.csv")).unwrap();
    assert!(csv.starts_with("# config-hash="));
    // The centre sample of a 5×5 grid on [-1, 1]² is the origin.
    let free = s["free_field_origin_abs"].as_f64().unwrap();
    let header: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let (ix, iy) = (header.iter().position(|h| *h == "x").unwrap(), header.iter().position(|h| *h == "y").unwrap());
    let (ire, iim) = (header.iter().position(|h| *h == "re").unwrap(), header.iter().position(|h| *h == "im").unwrap());
    let centre = csv
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .find(|v| v[ix].abs() < 1e-12 && v[iy].abs() < 1e-12)
        .unwrap();
    let abs = centre[ire].hypot(centre[iim]);
    assert!((abs - free).abs() < 1e-12 * free, "{abs} vs {free}");
}

#[test]
fn resonance_report_records_provenance() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(
        d.path(),
        "r.toml",
        r#"
[cage]
curve = "circle"
m = 30
delta = 0.1

[source]
z0 = [2.0, 0.0]

[resonance]
mode = [0, 1]

[output]
name = "res"
"#,
    );
    let out = cagecalc(d.path(), &["resonance", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&d.path().join("res.json"));
    let r = &v["report"];
    let k_peak = r["k_peak"].as_f64().unwrap();
    assert!((k_peak - 2.3764).abs() < 1e-3, "{k_peak}");
    assert!(r["fwhm"].as_f64().unwrap() > 0.0);
    assert_eq!(r["provenance"]["tau_plus"], "computed");
}

#[test]
fn neumann_report_has_a_shift() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(
        d.path(),
        "n.toml",
        r#"
[cage]
curve = "circle"
m = 40
delta = 0.1

[resonance]
mode = [0, 1]
bc = "neumann"

[output]
name = "neu"
"#,
    );
    let out = cagecalc(d.path(), &["resonance", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&d.path().join("neu.json"));
    assert_eq!(v["kind"], "neumann");
    assert!(v["lambda"].as_f64().unwrap() > 0.0);
    let text = v["report"].to_string();
    assert!(text.contains("shift"), "{text}");
}

#[test]
fn cell_command_prints_constants() {
    let d = tempfile::tempdir().unwrap();
    let out = cagecalc(d.path(), &["cell", "segment-free-check", "0.1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = cagecalc(d.path(), &["cell", "perpendicular", "0.25"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let sigma = v["constants"]["sigma_plus"].as_f64().unwrap();
    assert!((sigma - (-0.02233365979875236)).abs() < 1e-9, "{sigma}");
    assert!(d.path().join("cell_perpendicular_0.25.json").exists());
}

#[test]
fn coarse_k_sweep_peaks_near_the_first_zero() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(
        d.path(),
        "k.toml",
        r#"
[cage]
curve = "circle"
m = 30
delta = 0.1

[source]
z0 = [2.0, 0.0]

[sweep]
variable = "k"
start = 2.2
stop = 2.6
count = 41
models = ["discrete"]

[output]
name = "ks"
"#,
    );
    let out = cagecalc(d.path(), &["sweep", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&d.path().join("ks.json"));
    let k = v["peaks"]["discrete.p0.abs"]["argmax"].as_f64().unwrap();
    assert!((k - 2.38).abs() < 0.02, "{k}");
}
