use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cayley"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cayley-cli-test-{}-{name}", std::process::id()));
    fs::create_dir_all(&d).unwrap();
    d
}

fn write(dir: &Path, file: &str, text: &str) -> PathBuf {
    let p = dir.join(file);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn repeated_runs_write_identical_json() {
    let d = scratch("repro");
    let s = write(&d, "fermat.cubic", "T0^3 + T1^3 + T2^3 + T3^3\n");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = d.join(format!("run{run}"));
        let st = bin()
            .args(["count", "--B", "4,8", "--format", "csv", "--threads", "2"])
            .arg("--surface")
            .arg(&s)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
        assert!(out.join("count.csv").exists());
        outputs.push(fs::read(out.join("count.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let v: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(v["results"][0]["rows"][0]["count"], 69);
    assert_eq!(v["results"][0]["rows"][1]["count"], 285);
}

#[test]
fn missing_input_is_a_configuration_error() {
    let st = bin().arg("classify").output().unwrap();
    assert_eq!(st.status.code(), Some(3));
    let st = bin().args(["count", "--B", "x"]).output().unwrap();
    assert_eq!(st.status.code(), Some(3));
}

#[test]
fn budget_exhaustion_exits_with_two() {
    let d = scratch("budget");
    let s = write(&d, "fermat.cubic", "T0^3 + T1^3 + T2^3 + T3^3\n");
    let st = bin().args(["count", "--B", "50", "--budget", "100"]).arg("--surface").arg(&s).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn curve_count_and_cayley_form() {
    let d = scratch("curve");
    let c = write(&d, "conic.txt", "# unit circle\nform = x0^2 + x1^2 - x2^2\n");
    let out = bin().args(["count", "--B", "5", "--format", "csv"]).arg("--curve").arg(&c).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("B,count,seconds\n5,12,"), "{text}");

    let c = write(&d, "plane.txt", "plane = x3\nform = x0^2 + x1^2 - x2^2\n");
    let out = bin().arg("cayley").arg("--curve").arg(&c).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["degree"], 2);
}

#[test]
fn curve_file_parsing() {
    let c = cayley_cli::parse_curve("form = x0*x1 - x2^2").unwrap();
    assert!(c.plane.is_none());
    assert!(cayley_cli::parse_curve("plane = x0").is_err());
    assert!(cayley_cli::parse_curve("shape = x0").is_err());
    assert!(cayley_cli::parse_curve("form = x0*x3").is_err());
}
