use std::path::Path;
use std::process::{Command, Output};

fn quenched(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quenched")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn gen_writes_points_and_manifest_that_rechecks() {
    let dir = tempfile::tempdir().unwrap();
    let o = quenched(&["gen", "--lambda", "1", "--side", "12", "--boundary", "torus", "--seed", "4", "-o", "pts.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("pts.csv").exists());
    assert!(dir.path().join("pts.csv.manifest.json").exists());

    let o = quenched(&["report", "--check", "pts.csv.manifest.json"], dir.path());
    assert_eq!(code(&o), 0);

    let manifest = dir.path().join("pts.csv.manifest.json");
    let text = std::fs::read_to_string(&manifest).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let hash = v["files"][0]["sha256"].as_str().unwrap().to_owned();
    std::fs::write(&manifest, text.replace(&hash, &"0".repeat(64))).unwrap();
    let o = quenched(&["report", "--check", "pts.csv.manifest.json"], dir.path());
    assert_eq!(code(&o), 3);
}

#[test]
fn graph_thin_and_chain_run_on_a_point_file() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&quenched(&["gen", "--lambda", "2", "--side", "8", "-o", "p.csv"], dir.path())), 0);
    let o = quenched(&["graph", "--points", "p.csv", "--rstar", "1", "-o", "e.csv", "--alpha", "1"], dir.path());
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["a_gamma"].as_f64().unwrap() > 0.0);
    let edges = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap().lines().filter(|l| !l.starts_with('#')).count();

    assert_eq!(code(&quenched(&["thin", "--points", "p.csv", "--rstar", "1", "--q", "0.5", "-o", "t.csv"], dir.path())), 0);
    assert!(edges("t.csv") <= edges("e.csv"));
    assert!(edges("e.csv") > 0);

    let o = quenched(
        &["chain", "--points", "p.csv", "--rstar", "1", "--beta", "0.4", "--s", "-1", "--sweeps", "300", "--burn-in", "100", "-o", "c.csv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(summary["m_mean"].as_f64().unwrap() <= 0.0);
    assert_eq!(std::fs::read_to_string(dir.path().join("c.csv")).unwrap().lines().count(), 201);
}

#[test]
fn sweep_writes_layout_and_honours_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("pd.toml"),
        "kind = \"phase-diagram\"\nside = 8.0\nmean_degree = [6.0]\nbeta = [0.5]\nlambda_star = 1.44\nsweeps = 200\nburn_in = 50\nseed = 1\n",
    )
    .unwrap();
    let o = quenched(&["sweep", "pd.toml", "--outdir", "out", "--threads", "1"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["manifest.json", "sweeps/phase_diagram.csv", "phase_diagram.json", "points/lambda0_rep0.csv"] {
        assert!(dir.path().join("out").join(f).exists(), "{f} missing");
    }
    assert_eq!(code(&quenched(&["sweep", "pd.toml", "--outdir", "out2", "--seed", "2"], dir.path())), 0);
    let seed = |d: &str| {
        let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join(d).join("manifest.json")).unwrap()).unwrap();
        v["config"]["seed"].as_u64().unwrap()
    };
    assert_eq!((seed("out"), seed("out2")), (1, 2));
    assert_eq!(code(&quenched(&["report", "--check", "out"], dir.path())), 0);
}

#[test]
fn wells_prints_a_passing_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = quenched(&["wells", "--measure", "uniform:1"], dir.path());
    assert_eq!(code(&o), 0);
    let c: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(c["all_nonnegative"], true);
    assert!((c["a"].as_f64().unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = quenched(&["gen", "--bogus"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(code(&quenched(&["--help"], dir.path())), 0);

    std::fs::write(dir.path().join("bad.toml"), "kind = \"phase-diagram\"\nnot_a_key = 3\n").unwrap();
    assert_eq!(code(&quenched(&["sweep", "bad.toml", "--outdir", "o"], dir.path())), 1);
    std::fs::write(dir.path().join("kind.toml"), "kind = \"nonsense\"\n").unwrap();
    assert_eq!(code(&quenched(&["sweep", "kind.toml", "--outdir", "o"], dir.path())), 1);
    assert_eq!(code(&quenched(&["percolate", "--estimate", "q-star", "--sizes", "8,16"], dir.path())), 1);

    assert_eq!(code(&quenched(&["graph", "--points", "missing.csv", "--rstar", "1", "-o", "e.csv"], dir.path())), 2);
}
