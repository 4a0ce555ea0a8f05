use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn ergocap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergocap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn capacity(args: &[&str]) -> f64 {
    let mut all = vec!["capacity"];
    all.extend_from_slice(args);
    json(&ergocap(&all))["capacity"].as_f64().unwrap()
}

struct Row {
    snr_db: f64,
    scheme: String,
    capacity: f64,
}

fn rows(csv: &str) -> Vec<Row> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("snr_db,scheme,capacity,z_t,d_max"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 5, "{l}");
            Row {
                snr_db: f[0].parse().unwrap(),
                scheme: f[1].to_string(),
                capacity: f[2].parse().unwrap(),
            }
        })
        .collect()
}

#[test]
fn ci_capacity_in_bits_and_nats() {
    let bits = capacity(&["--dist", "gamma:N=2", "--scheme", "ci", "--snr-db", "0"]);
    assert!((bits - 1.0).abs() < 1e-12);
    let nats = capacity(&[
        "--dist",
        "gamma:N=2",
        "--scheme",
        "ci",
        "--snr-db",
        "0",
        "--units",
        "nats",
    ]);
    assert!((nats - std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn oa_beats_awgn_at_low_snr() {
    let base = ["--dist", "miso:N=2,K=2", "--snr-db", "-30"];
    let oa = capacity(&[&base[..], &["--scheme", "oa"]].concat());
    let awgn = capacity(&[&base[..], &["--scheme", "awgn"]].concat());
    assert!(oa > awgn, "{oa} vs {awgn}");
}

#[test]
fn threshold_in_snr_units() {
    let z = capacity(&["--dist", "gamma:N=2", "--scheme", "tci:1", "--snr-db", "10"]);
    let g = capacity(&[
        "--dist",
        "gamma:N=2",
        "--scheme",
        "tci",
        "--zt",
        "10",
        "--zt-units",
        "gamma",
        "--snr-db",
        "10",
    ]);
    assert!((z - g).abs() < 1e-12);
}

#[test]
fn capacity_record_fields() {
    let v = json(&ergocap(&[
        "capacity",
        "--dist",
        "miso:N=2,K=2",
        "--scheme",
        "oa",
        "--snr-db",
        "10",
    ]));
    assert_eq!(v["scheme"], "oa");
    assert!(v["z_t"].as_f64().unwrap() > 0.0);
    assert!(v["residual"].as_f64().unwrap().abs() <= 1e-8);
    let v = json(&ergocap(&[
        "capacity",
        "--dist",
        "gamma:N=2",
        "--scheme",
        "ctci:0",
        "--snr-db",
        "0",
    ]));
    assert_eq!(v["d_max"], "inf");
}

#[test]
fn malformed_input_exits_with_two() {
    for args in [
        &["capacity", "--dist", "nakagami:m=2", "--scheme", "oa", "--snr-db", "0"][..],
        &["capacity", "--dist", "gamma:N=2", "--scheme", "xx", "--snr-db", "0"],
        &["capacity", "--dist", "gamma:N=2", "--scheme", "tci", "--snr-db", "0"],
        &["sweep", "--dist", "gamma:N=2", "--schemes", "", "--snr-db", "0"],
        &["sweep", "--dist", "gamma:N=2", "--schemes", "oa", "--snr-db", "10:0:1"],
        &["mc", "--dist", "gamma:N=2", "--scheme", "awgn", "--snr-db", "0"],
        &["capacity", "--dist", "gamma:N=2"],
    ] {
        let out = ergocap(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn sweep_high_snr_ordering() {
    let out = ergocap(&[
        "sweep",
        "--dist",
        "miso:N=2,K=2",
        "--schemes",
        "awgn,oa,ra,ci",
        "--snr-db",
        "-10:40:1",
    ]);
    assert!(out.status.success());
    let rows = rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 51 * 4);
    assert_eq!(rows[0].scheme, "awgn");
    assert_eq!(rows[3].scheme, "ci");
    assert_eq!(rows[4].snr_db, -9.0);
    let at40: Vec<&Row> = rows.iter().filter(|r| r.snr_db == 40.0).collect();
    let c = |s: &str| at40.iter().find(|r| r.scheme == s).unwrap().capacity;
    assert!(c("awgn") > c("oa") && c("oa") >= c("ra") && c("ra") > c("ci"));
    assert!(c("oa") - c("ra") < 0.02);
}

#[test]
fn truncated_inversion_crosses_ci() {
    let out = ergocap(&[
        "sweep",
        "--dist",
        "miso:N=2,K=2",
        "--schemes",
        "ci,tci:1",
        "--snr-db",
        "-10:30:40",
    ]);
    let rows = rows(&String::from_utf8(out.stdout).unwrap());
    assert!(rows[1].capacity > rows[0].capacity);
    assert!(rows[3].capacity < rows[2].capacity);
}

#[test]
fn sweep_file_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = ergocap(&[
            "sweep",
            "--dist",
            "maxexp:K=4",
            "--schemes",
            "oa,tci:opt,ctci:0.5",
            "--snr-db",
            "0:20:5",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(json(&out)["rows"] == 15);
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn bits_are_nats_over_log_two_as_formatted() {
    let out = ergocap(&["sweep", "--dist", "gamma:N=3", "--schemes", "ra,oa", "--snr-db", "5"]);
    let rows = rows(&String::from_utf8(out.stdout).unwrap());
    for r in rows {
        let nats = capacity(&[
            "--dist",
            "gamma:N=3",
            "--scheme",
            &r.scheme,
            "--snr-db",
            "5",
            "--units",
            "nats",
        ]);
        assert_eq!(
            format!("{:.6}", r.capacity),
            format!("{:.6}", nats / std::f64::consts::LN_2)
        );
    }
}

#[test]
fn unwritable_output_fails() {
    let out = ergocap(&[
        "sweep",
        "--dist",
        "gamma:N=2",
        "--schemes",
        "ra",
        "--snr-db",
        "0",
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert!(!out.status.success());
}

#[test]
fn gap_reports() {
    let v = json(&ergocap(&["gaps", "--dist", "miso:N=2,K=2"]));
    assert!((v["gaps"]["gap_oa_ci"].as_f64().unwrap() - 0.24928).abs() < 5e-4);
    assert!((v["gaps"]["gap_awgn_ci"].as_f64().unwrap() - 0.45943).abs() < 5e-4);
    let v = json(&ergocap(&["gaps", "--dist", "gamma:N=2"]));
    assert!((v["gaps"]["gap_awgn_ci"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["closed_form"]["gap_awgn_ci"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = json(&ergocap(&["gaps", "--dist", "gamma:N=1"]));
    assert_eq!(v["gaps"]["gap_oa_ci"], "inf");
    let v = json(&ergocap(&["gaps", "--dist", "frechet:alpha=2,K=4", "--units", "nats"]));
    assert!((v["closed_form"]["gap_awgn_ci"].as_f64().unwrap() - (std::f64::consts::PI / 2.0).ln()).abs() < 1e-12);
    let v = json(&ergocap(&["gaps", "--dist", "maxexp:K=8"]));
    assert_eq!(v["closed_form"]["approximate"], true);
}

#[test]
fn verify_fast_passes_for_miso() {
    let v = json(&ergocap(&["verify", "--dist", "miso:N=2,K=2"]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["level"], "fast");
}

#[test]
fn verify_full_on_tabulated_exponential() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "z,pdf").unwrap();
    for i in 0..=3000 {
        let z = f64::from(i) * 0.01;
        writeln!(file, "{z},{}", (-z).exp()).unwrap();
    }
    let dist = format!("tab:path={}", file.path().display());
    let v = json(&ergocap(&["verify", "--dist", &dist, "--level", "full"]));
    assert_eq!(v["pass"], true, "{v}");
    let mc = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "monte_carlo")
        .unwrap();
    assert_eq!(mc["pass"], true);
}

#[test]
fn corrupt_tabulated_file_exits_with_two() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "z,pdf\n0,1\n1,abc").unwrap();
    let dist = format!("tab:path={}", file.path().display());
    let out = ergocap(&["verify", "--dist", &dist]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = [
        "mc",
        "--dist",
        "miso:N=2,K=2",
        "--scheme",
        "oa",
        "--snr-db",
        "10",
        "--samples",
        "100000",
    ];
    let a = ergocap(&args);
    let b = ergocap(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let gap = (v["estimate"].as_f64().unwrap() - v["quadrature"].as_f64().unwrap()).abs();
    assert!(gap <= 3.0 * v["std_error"].as_f64().unwrap());
}
