use std::path::Path;
use std::process::{Command, Output};

use bsmlab::io::{load_matrix, save_matrix};
use bsmlab::sweep::read_sweep_csv;
use bsmlab::{RowNormalizedMatrix, SquareMatrix};
use serde_json::Value;

fn bsmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsmlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_tree_writes_normalized_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t4.csv");
    let res = bsmlab(&["construct", "--kind", "tree", "--n", "4", "--out", path_str(&out)]);
    assert_eq!(res.status.code(), Some(0), "{}", stderr(&res));
    let m = load_matrix(&out).unwrap();
    assert_eq!(m.n(), 4);
    for r in m.rows() {
        let norm: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-15);
        let nonzero = r.iter().filter(|v| v.abs() > 0.0).count();
        assert_eq!(nonzero, 3);
    }
    assert_eq!(json(&res)["seed"], 0);
}

#[test]
fn construct_known_optimal_out_of_range_is_domain_error() {
    let res = bsmlab(&["construct", "--kind", "known-optimal", "--n", "7"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("supported n: 1..5"), "{}", stderr(&res));
}

#[test]
fn construct_oah_reports_order() {
    let res = bsmlab(&["construct", "--kind", "oah", "--n", "5"]);
    assert_eq!(res.status.code(), Some(0));
    let v = json(&res);
    assert_eq!(v["m"], 8);
    assert_eq!(v["flatness_warning"], false);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 5);
}

#[test]
fn beta_identity_exact() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("id.csv");
    save_matrix(&SquareMatrix::identity(4), &p).unwrap();
    let res = bsmlab(&["beta", "--matrix", path_str(&p)]);
    assert_eq!(res.status.code(), Some(0));
    let v = json(&res);
    assert_eq!(v["value"], 1.0);
    assert_eq!(v["stderr"], 0.0);
    assert_eq!(v["method"], "exact");
}

#[test]
fn beta_known_optimal_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("k3.csv");
    bsmlab(&[
        "construct",
        "--kind",
        "known-optimal",
        "--n",
        "3",
        "--out",
        path_str(&p),
    ]);
    let v = json(&bsmlab(&["beta", "--matrix", path_str(&p)]));
    let expect = (2f64.sqrt() + 3f64.sqrt()) / 2.0;
    assert!((v["value"].as_f64().unwrap() - expect).abs() < 1e-12);
}

#[test]
fn beta_too_large_suggests_monte_carlo() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("id30.csv");
    save_matrix(&SquareMatrix::identity(30), &p).unwrap();
    let res = bsmlab(&["beta", "--matrix", path_str(&p), "--method", "exact"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("monte-carlo"));

    let res = bsmlab(&[
        "beta",
        "--matrix",
        path_str(&p),
        "--method",
        "monte-carlo",
        "--samples",
        "1000",
    ]);
    assert_eq!(res.status.code(), Some(0));
    let v = json(&res);
    assert_eq!(v["value"], 1.0);
    assert_eq!(v["seed"], 0);
    assert_eq!(v["method"], "monte_carlo");
}

#[test]
fn io_and_parse_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    assert_eq!(bsmlab(&["beta", "--matrix", path_str(&missing)]).status.code(), Some(1));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "2\n1,0\n0,abc\n").unwrap();
    let res = bsmlab(&["beta", "--matrix", path_str(&bad)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(stderr(&res).contains("line 3"), "{}", stderr(&res));
}

#[test]
fn zero_row_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("z.csv");
    std::fs::write(&p, "2\n1,0\n0,0\n").unwrap();
    assert_eq!(bsmlab(&["beta", "--matrix", path_str(&p)]).status.code(), Some(2));
}

#[test]
fn analyze_reports_and_warns_on_ties() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("id.csv");
    save_matrix(&SquareMatrix::identity(4), &p).unwrap();
    let res = bsmlab(&["analyze", "--matrix", path_str(&p)]);
    assert_eq!(res.status.code(), Some(0));
    assert!(stderr(&res).contains("ties detected: 16"), "{}", stderr(&res));

    let t = dir.path().join("t4.csv");
    bsmlab(&["construct", "--kind", "tree", "--n", "4", "--out", path_str(&t)]);
    let res = bsmlab(&["analyze", "--matrix", path_str(&t)]);
    let v = json(&res);
    assert!(!stderr(&res).contains("ties"));
    let beta = v["beta"].as_f64().unwrap();
    assert!((beta - 3f64.sqrt()).abs() < 1e-12);
    assert!((v["bound_cs"].as_f64().unwrap() - beta).abs() < 1e-12);
    for key in [
        "w1",
        "alphas",
        "bound_level1",
        "bound_jensen",
        "centroid_alignment",
        "volume_deviation",
        "identity_residual",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["sizes"], serde_json::json!([2, 2, 2, 2]));

    let k = dir.path().join("k3.csv");
    bsmlab(&[
        "construct",
        "--kind",
        "known-optimal",
        "--n",
        "3",
        "--out",
        path_str(&k),
    ]);
    assert_eq!(
        json(&bsmlab(&["analyze", "--matrix", path_str(&k)]))["sizes"],
        serde_json::json!([1, 1, 2])
    );
}

#[test]
fn sweep_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec![
            "sweep",
            "--kind",
            "oah,random-sign",
            "--n",
            "8,12,16",
            "--seed",
            "42",
            "--out",
        ]
        .into_iter()
        .map(String::from)
        .chain([out.to_str().unwrap().to_string()])
        .collect::<Vec<_>>()
    };
    let run = |out: &Path| {
        let args = args(out);
        bsmlab(&args.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(run(&a).status.code(), Some(0));
    assert_eq!(run(&b).status.code(), Some(0));
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let rows = read_sweep_csv(bytes.as_slice()).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.method == "exact" && r.beta > 0.0 && r.seed == 42));
    assert!(rows.iter().all(|r| r.beta_expansion.is_some()));
}

#[test]
fn sweep_empty_and_tree() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e.csv");
    assert_eq!(
        bsmlab(&["sweep", "--kind", "oah", "--out", path_str(&p)]).status.code(),
        Some(0)
    );
    assert_eq!(
        std::fs::read_to_string(&p).unwrap(),
        "construction,n,method,beta,stderr,samples,seed,beta_expansion,jensen_upper\n"
    );

    let t = dir.path().join("t.csv");
    assert_eq!(
        bsmlab(&["sweep", "--kind", "tree", "--n", "4", "--out", path_str(&t)])
            .status
            .code(),
        Some(0)
    );
    let rows = read_sweep_csv(std::fs::File::open(&t).unwrap()).unwrap();
    assert!((rows[0].beta - 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn sweep_guard_failure_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.csv");
    let res = bsmlab(&["sweep", "--kind", "identity", "--n", "4,27", "--out", path_str(&p)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!p.exists());
}

#[test]
fn gaussian_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q16.csv");
    bsmlab(&["construct", "--kind", "oah", "--n", "16", "--out", path_str(&q)]);
    let v = json(&bsmlab(&["gaussian", "--matrix", path_str(&q), "--samples", "2000"]));
    assert!(v["covariance"]["max_offdiag"].as_f64().unwrap() <= 1e-10);

    let id = dir.path().join("id.csv");
    save_matrix(RowNormalizedMatrix::identity(6).as_matrix(), &id).unwrap();
    let v = json(&bsmlab(&["gaussian", "--matrix", path_str(&id), "--samples", "2000"]));
    assert_eq!(v["covariance"]["chatterjee_bound"], 0.0);

    let r = dir.path().join("r64.csv");
    bsmlab(&[
        "construct",
        "--kind",
        "random-sign",
        "--n",
        "64",
        "--seed",
        "7",
        "--out",
        path_str(&r),
    ]);
    let v = json(&bsmlab(&[
        "gaussian",
        "--matrix",
        path_str(&r),
        "--samples",
        "2000",
        "--seed",
        "7",
    ]));
    assert!(v["covariance"]["max_offdiag"].as_f64().unwrap() <= 0.81);
    assert!(v["gaussian_max"]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn json_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.csv");
    bsmlab(&[
        "construct",
        "--kind",
        "random-sign",
        "--n",
        "20",
        "--seed",
        "3",
        "--out",
        path_str(&r),
    ]);
    let one = dir.path().join("1.json");
    let two = dir.path().join("2.json");
    for out in [&one, &two] {
        let res = bsmlab(&[
            "beta",
            "--matrix",
            path_str(&r),
            "--method",
            "monte-carlo",
            "--samples",
            "20000",
            "--seed",
            "9",
            "--out",
            path_str(out),
        ]);
        assert_eq!(res.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&two).unwrap());
}

#[test]
fn curves_csv() {
    let res = bsmlab(&["curves", "--n", "8,16"]);
    assert_eq!(res.status.code(), Some(0));
    let text = String::from_utf8(res.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,beta_expansion,jensen_upper,subcube_rate,gaussian_max,abstract_lower")
    );
    assert_eq!(lines.count(), 2);
    assert_eq!(bsmlab(&["curves", "--n", "2"]).status.code(), Some(2));
}
