use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sepnet_core::displacement::CurveKind;
use sepnet_core::io::{read_curves, read_map, read_pairs, read_table, write_curves, write_map};
use sepnet_core::net::NetWindow;
use serde_json::Value;

fn sepnet(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepnet"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&read(dir, "report.json")).unwrap()
}

#[test]
fn lattice_window_has_expected_count() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sepnet(&["generate", "--net", "lattice", "--dim", "2", "--radius", "50"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let w = NetWindow::from_json(&read(tmp.path(), "net.json")).unwrap();
    assert_eq!(w.len(), 7845);
    let (_, rows) = read_table(&read(tmp.path(), "counts.csv")).unwrap();
    assert_eq!(rows.last().unwrap(), &vec![50.0, 7845.0]);
    let cert: Value = serde_json::from_str(&read(tmp.path(), "certificate.json")).unwrap();
    assert_eq!(cert["separation"], 1.0);
}

#[test]
fn outputs_are_deterministic() {
    let runs: &[(&[&str], &[&str])] = &[
        (&["displacement", "--net", "radial"], &["curves.csv", "matching.csv", "curves.svg"]),
        (&["generate", "--net", "patched", "--sides", "2,3"], &["net.json", "layout.json", "patch_counts.csv"]),
        (&["density", "--net", "halfspace", "--radius", "60"], &["density.csv", "discrepancy.csv"]),
        (&["generate", "--net", "radial"], &["map.csv", "schedule.csv", "slopes.csv", "profile.json"]),
    ];
    for (args, files) in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert!(sepnet(args, a.path()).status.success(), "{args:?}");
        assert!(sepnet(args, b.path()).status.success(), "{args:?}");
        for f in *files {
            assert_eq!(
                fs::read(a.path().join(f)).unwrap(),
                fs::read(b.path().join(f)).unwrap(),
                "{args:?} {f}"
            );
        }
    }
}

#[test]
fn csv_outputs_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(sepnet(&["displacement", "--net", "radial"], tmp.path()).status.success());
    let text = read(tmp.path(), "curves.csv");
    let curves = read_curves(&text).unwrap();
    let kinds: Vec<CurveKind> = curves.iter().map(|c| c.kind).collect();
    assert_eq!(
        kinds,
        [
            CurveKind::ExactOfMap,
            CurveKind::CountingLowerBound,
            CurveKind::BottleneckOptimal,
            CurveKind::AnalyticUpperBound
        ]
    );
    assert_eq!(write_curves(&curves.iter().collect::<Vec<_>>()).unwrap(), text);

    let gen = tempfile::tempdir().unwrap();
    assert!(sepnet(&["generate", "--net", "onedim"], gen.path()).status.success());
    let text = read(gen.path(), "map.csv");
    let f = read_map(&text, 1368.5).unwrap();
    assert_eq!(f.image(&[1368.5]), Some(&[195.5][..]));
    assert_eq!(write_map(&f).unwrap(), text);
}

#[test]
fn identity_bijection_has_zero_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sepnet(&["displacement", "--net", "identity", "--radius", "12"], tmp.path());
    assert!(out.status.success());
    let curves = read_curves(&read(tmp.path(), "curves.csv")).unwrap();
    assert!(curves[0].samples.iter().all(|s| s.1 == 0.0));
}

#[test]
fn sparse_lattice_density() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sepnet(&["density", "--net", "lattice", "--dim", "1", "--scale", "2", "--no-plots"], tmp.path());
    assert!(out.status.success());
    let alpha = read_pairs(&read(tmp.path(), "density.csv")).unwrap();
    assert!((alpha.last().unwrap().1 - 0.5).abs() < 0.01);
    assert!(!tmp.path().join("density.svg").exists());
}

#[test]
fn verify_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = sepnet(&["verify", "--suite", "3,4", "--seed", "7"], tmp.path());
    assert_eq!(ok.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.contains("[PASS]  3"), "{stdout}");
    let c3: Value = serde_json::from_str(&read(tmp.path(), "criterion_3.json")).unwrap();
    assert_eq!(c3["pass"], true);

    let bad = tempfile::tempdir().unwrap();
    let out = sepnet(&["verify", "--corrupt-slope", "2,272,100"], bad.path());
    assert_eq!(out.status.code(), Some(1));
    let r = report(bad.path());
    assert_eq!(r["pass"], false);
    assert!(r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["pass"] == false && c["name"].as_str().unwrap().contains("c_2")));

    let err = sepnet(&["generate", "--net", "torus"], bad.path());
    assert_eq!(err.status.code(), Some(2));
    let err = sepnet(&["verify", "--suite", "11"], bad.path());
    assert_eq!(err.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"net": "lattice", "dim": 3, "radius": 10.0}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sepnet"))
        .args(["generate", "--config"])
        .arg(&cfg)
        .args(["--radius", "5", "--out"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let r = report(&tmp.path().join("out"));
    assert_eq!(r["config"]["radius"], 5.0);
    assert_eq!(r["config"]["dim"], 3);
    assert_eq!(r["details"]["points"], 515);

    fs::write(&cfg, r#"{"radius": 10.0, "colour": "red"}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sepnet"))
        .args(["generate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn onedim_and_halfspace_examples() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(sepnet(&["displacement", "--net", "onedim"], tmp.path()).status.success());
    let (_, rows) = read_table(&read(tmp.path(), "blowup.csv")).unwrap();
    assert!(rows.iter().all(|r| r[2] >= r[3]));

    let h = tempfile::tempdir().unwrap();
    let out = sepnet(&["density", "--net", "halfspace", "--c", "1.5", "--radius", "500", "--no-plots"], h.path());
    assert!(out.status.success());
    let alpha = read_pairs(&read(h.path(), "density.csv")).unwrap();
    assert!((alpha.last().unwrap().1 - 1.0).abs() <= 0.05);
    let disc = read_pairs(&read(h.path(), "discrepancy.csv")).unwrap();
    // a half-density surplus on the largest dyadic box inside {x₁ ≥ 0}
    assert!(disc.iter().all(|d| d.1 > 0.24), "{disc:?}");
    assert!(disc[2..].iter().all(|d| (d.1 - 0.25).abs() < 0.01), "{disc:?}");
}
