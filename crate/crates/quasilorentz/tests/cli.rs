use std::path::Path;
use std::process::{Command, Output};

use quasilorentz::experiment::{CompareSummary, RunManifest, RunSummary};
use quasilorentz::io::read_json;
use quasilorentz_core::pointsets::enumerate_points;
use quasilorentz_core::ScattererField;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasilorentz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<(f64, f64, u64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("T,survival,count_ge"));
    lines
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].parse().unwrap(), c[1].parse().unwrap(), c[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn points_fibonacci_first_four() {
    let o = bin(&["points", "--field", "fibonacci", "--from", "0", "--to", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let vals: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    let expect = [0.0, 0.5257311121191336, 1.3763819204711736, 1.9021130325903073];
    assert_eq!(vals.len(), 4);
    for (v, e) in vals.iter().zip(expect) {
        assert!((v - e).abs() < 1e-14, "{v} vs {e}");
    }
}

#[test]
fn points_periodic_unit_spacing() {
    let o = bin(&["points", "--field", "periodic", "--spacing", "1", "--from", "0", "--to", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n1\n2\n");
}

#[test]
fn points_chain_pass_through() {
    let o = bin(&["points", "--field", "chain", "--slope", "2.5", "--from", "0", "--to", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let expect = enumerate_points(&ScattererField::chain(2.5).unwrap(), 0.0, 5.0).unwrap();
    let text: String = expect.iter().map(|x| format!("{}\n", quasilorentz::io::format_sig(*x))).collect();
    assert_eq!(stdout(&o), text);
    let vals: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn points_to_file_and_limits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.txt");
    let o = bin(&["points", "--field", "strip", "--window", "corner", "--from", "-3", "--to", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 8);
    let o = bin(&["points", "--from", "0", "--to", "1e12"]);
    assert_eq!(o.status.code(), Some(3));
    let o = bin(&["points", "--from", "2", "--to", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["points", "--field", "chain", "--slope", "1", "--from", "0", "--to", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_writes_curve_and_summary_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = bin(&[
            "simulate", "--field", "fibonacci", "--epsilon", "1e-3", "--n", "1000000", "--seed", "7",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        out
    };
    let a = run("a");
    let b = run("b");
    let csv_a = std::fs::read(a.join("fibonacci_eps0.001.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.join("fibonacci_eps0.001.csv")).unwrap());

    let rows = csv_rows(&a.join("fibonacci_eps0.001.csv"));
    assert_eq!(rows.len(), 64);
    assert!(rows.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].2 <= w[0].2));
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));

    let text = std::fs::read_to_string(a.join("summary.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["field", "epsilon", "n", "seed", "censored"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    for key in ["model", "param", "prefactor", "range", "rms_residual"] {
        assert!(json["fit"].get(key).is_some(), "fit.{key}");
    }
    let s: RunSummary = read_json(&a.join("summary.json")).unwrap();
    assert_eq!((s.field.as_str(), s.n, s.seed), ("fibonacci", 1_000_000, 7));

    let m: RunManifest = read_json(&a.join("manifest.json")).unwrap();
    let curves = m.load_curves().unwrap();
    assert_eq!(curves.len(), 1);
    assert_eq!(curves[0].counts_ge, rows.iter().map(|r| r.2).collect::<Vec<_>>());
}

#[test]
fn invalid_parameters_exit_2_with_name() {
    let o = bin(&["simulate", "--epsilon", "0", "--n", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("epsilon"), "{}", stderr(&o));
    let o = bin(&["compare", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--n"), "{}", stderr(&o));
    let o = bin(&["simulate", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["simulate", "--threads", "0", "--n", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["simulate", "--field", "strip", "--n", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["compare", "--epsilon", "abc"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_3_without_leftovers() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = bin(&["simulate", "--epsilon", "0.01", "--n", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("blocker")]);
}

#[test]
fn compare_with_two_epsilons_reports_sup_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let o = bin(&[
        "compare", "--epsilons", "1e-3,1e-4", "--field", "fibonacci", "--n", "3000", "--seed", "5",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("sup distance fibonacci"));
    let s: CompareSummary = read_json(&out.join("summary.json")).unwrap();
    assert_eq!(s.runs.len(), 2);
    assert_eq!(s.sup_distances.len(), 1);
    assert_eq!(s.sup_distances[0].t_min, 0.5);
    let m: RunManifest = read_json(&out.join("manifest.json")).unwrap();
    assert_eq!(m.emitted_files.len(), 2);
    let curves = m.load_curves().unwrap();
    assert_eq!(curves[0].thresholds, curves[1].thresholds);
}

#[test]
fn compare_three_fields_at_matched_density() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let o = bin(&["compare", "--epsilon", "0.01", "--n", "5000", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m: RunManifest = read_json(&out.join("manifest.json")).unwrap();
    let tags: Vec<&str> = m.fields.iter().map(|f| f.field.as_str()).collect();
    assert_eq!(tags, ["fibonacci", "periodic", "poisson"]);
    for f in &m.fields {
        assert!((f.density - 1.3763819204711736).abs() < 1e-12);
    }
    for f in &m.emitted_files {
        assert!(f.path.exists());
    }
    let s: CompareSummary = read_json(&out.join("summary.json")).unwrap();
    let models: Vec<&str> = s.runs.iter().map(|r| r.fit.as_ref().unwrap().model.name()).collect();
    assert_eq!(models, ["power_law", "power_law", "exponential"]);
}
