use std::path::Path;
use std::process::{Command, Output};

fn mqfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mqfi")).args(args).output().expect("binary runs")
}

fn run_ising(out: &Path, workers: &str) -> Output {
    mqfi(&[
        "run", "--model", "projective-ising", "--L", "16", "--pz", "0.3", "--trajectories", "12", "--seed", "9",
        "--metrics", "qfi,tmi,entropy", "--workers", workers, "--out", out.to_str().unwrap(),
    ])
}

#[test]
fn run_writes_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ising.jsonl");
    let res = run_ising(&out, "1");
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 12);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["schema_version", "model", "L", "p_z", "p_xx", "p_u", "depth", "boundary", "master_seed", "trajectory_index", "f_q", "i3", "s_half", "wall_ms"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert_eq!(first["p_xx"], 0.7);
    assert!(dir.path().join("ising.jsonl.summary.json").exists());
}

#[test]
fn canonical_output_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    assert!(run_ising(&a, "1").status.success());
    assert!(run_ising(&b, "3").status.success());
    let ca = mqfi(&["canonical", "--input", a.to_str().unwrap()]);
    let cb = mqfi(&["canonical", "--input", b.to_str().unwrap()]);
    assert!(ca.status.success());
    assert!(!ca.stdout.is_empty());
    assert_eq!(ca.stdout, cb.stdout);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    let res = mqfi(&[
        "run", "--model", "structured-clifford", "--L", "8", "--pz", "0.6", "--pu", "0.6", "--trajectories", "1",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    let res = mqfi(&["run", "--model", "no-such-model", "--L", "8", "--trajectories", "1", "--out", "x"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn capacity_errors_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    let res = mqfi(&[
        "run", "--model", "unstructured-haar", "--L", "40", "--pz", "0.1", "--trajectories", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(4), "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn analysis_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("single.jsonl");
    assert!(run_ising(&out, "1").status.success());
    let res = mqfi(&["collapse", "--input", out.to_str().unwrap(), "--observable", "tmi"]);
    assert_eq!(res.status.code(), Some(3));
    let res = mqfi(&["fit-power", "--input", out.to_str().unwrap(), "--form", "pure"]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn anneal_reads_a_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    // two sites, GHZ correlations: ⟨ZZ⟩ = 1, ⟨XX⟩ = 1, ⟨YY⟩ = −1
    let mut connected = vec![0.0; 36];
    for i in 0..6 {
        connected[i * 6 + i] = 1.0;
    }
    for (a, v) in [(0usize, 1.0), (1, -1.0), (2, 1.0)] {
        connected[a * 6 + 3 + a] = v;
        connected[(3 + a) * 6 + a] = v;
    }
    let tensor = serde_json::json!({ "L": 2, "one_point": vec![0.0; 6], "connected": connected });
    std::fs::write(&path, tensor.to_string()).unwrap();
    let res = mqfi(&["anneal", "--correlations", path.to_str().unwrap(), "--seed", "4", "--iters-per-rung", "300"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!((v["fisher"].as_f64().unwrap() - 4.0).abs() < 1e-3);
}

#[test]
fn sweep_then_collapse_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let config = dir.path().join("sweep.toml");
    std::fs::write(
        &config,
        format!(
            "model = \"projective-ising\"\nL = [8, 16, 32, 96]\np_z = [0.3, 0.4, 0.5, 0.6, 0.7]\ntrajectories = 8\nseed = 2\nmetrics = \"qfi,tmi\"\nout = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let res = mqfi(&["sweep", "--config", config.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let res = mqfi(&["collapse", "--input", out.to_str().unwrap(), "--observable", "tmi", "--pc-min", "0.3", "--pc-max", "0.7"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    let p_c = v["collapse"]["p_c"].as_f64().unwrap();
    assert!((0.3..=0.7).contains(&p_c));

    let single = dir.path().join("single");
    std::fs::create_dir_all(&single).unwrap();
    for entry in std::fs::read_dir(&out).unwrap() {
        let path = entry.unwrap().path();
        if path.to_str().unwrap().ends_with("_pz0.5_pu0_pxx0.5.jsonl") {
            std::fs::copy(&path, single.join(path.file_name().unwrap())).unwrap();
        }
    }
    let res = mqfi(&["fit-power", "--input", single.to_str().unwrap(), "--observable", "fq", "--form", "pure"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!(v["exponent"].as_f64().unwrap().is_finite());
}
