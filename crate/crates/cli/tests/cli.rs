use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bottleneck"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn real_distances(v: &Value) -> Vec<f64> {
    let mut d: Vec<f64> = v["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["is_real"].as_bool().unwrap())
        .map(|p| p["distance"].as_f64().unwrap())
        .collect();
    d.sort_by(f64::total_cmp);
    d
}

#[test]
fn ellipse_has_two_real_bottlenecks() {
    let e = data("ellipse.sys");
    let e = e.to_str().unwrap();
    let v = json(&run(&[
        "bottlenecks",
        "--x",
        e,
        "--y",
        e,
        "--symmetric",
        "--seed",
        "7",
    ]));
    let d = real_distances(&v);
    assert_eq!(d.len(), 2);
    assert!(
        (d[0] - 2.0).abs() < 1e-8 && (d[1] - 4.0).abs() < 1e-8,
        "{d:?}"
    );
    assert_eq!(v["config_echo"]["seed"], 7);
    assert_eq!(v["config"]["seed"], 7);
    for key in ["gamma", "p0", "square_seed_x", "locus_seed_x", "tracker"] {
        assert!(
            !v["config"][key].is_null(),
            "{key} missing from the effective config"
        );
    }
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let x = data("quadric_x.sys");
    let y = data("quadric_y.sys");
    std::fs::write(
        &cfg,
        format!(
            "seed = 42\n[systems]\nx = {:?}\ny = {:?}\n",
            x.to_str().unwrap(),
            y.to_str().unwrap()
        ),
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = run(&["bottlenecks", "--config", cfg]);
    let b = run(&["bottlenecks", "--config", cfg]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["counts"]["pairs"], 24);
    assert!(v.get("timings").is_none());
    let t = json(&run(&["bottlenecks", "--config", cfg, "--timings"]));
    assert!(t["timings"].is_object());
}

#[test]
fn bench_row_for_quadrics() {
    let o = run(&["bench", "--family", "quadric-surfaces", "--n", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("36 | 24"), "{text}");
    assert!(text.contains("2·6+36"), "{text}");
}

#[test]
fn bench_count_only() {
    let o = run(&[
        "bench",
        "--family",
        "rational-normal-curves",
        "--n",
        "7",
        "--count-only",
    ]);
    assert_eq!(stdout(&o).trim(), "200704");
}

#[test]
fn bench_rejects_wrong_dimension() {
    let o = run(&["bench", "--family", "quadric-surfaces", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn two_oval_sample_has_two_components() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("cloud.csv");
    let o = run(&[
        "sample",
        "--system",
        data("two_ovals.sys").to_str().unwrap(),
        "--box",
        "-2.5,2.5;-2.5,2.5",
        "--spacing",
        "0.05",
        "--output",
        cloud.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let labelled = dir.path().join("labelled.csv");
    let o = run(&[
        "components",
        "--cloud",
        cloud.to_str().unwrap(),
        "--r",
        "0.4",
        "--labels-out",
        labelled.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), "2\n");
    let text = std::fs::read_to_string(&labelled).unwrap();
    assert!(text.starts_with("x1,x2,label\n"));
}

#[test]
fn solve_direct_matches_on_the_ellipse() {
    let v = json(&run(&[
        "solve-direct",
        "--x",
        data("ellipse.sys").to_str().unwrap(),
        "--symmetric",
    ]));
    assert_eq!(real_distances(&v).len(), 2);
    assert_eq!(v["paths"], 16);
}

#[test]
fn normal_locus_of_the_ellipse() {
    let v = json(&run(&[
        "normal-locus",
        "--system",
        data("ellipse.sys").to_str().unwrap(),
        "--seed",
        "3",
    ]));
    assert_eq!(v["edd"], 4);
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
}

#[test]
fn plot_of_the_ellipse() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot");
    let o = run(&[
        "bottlenecks",
        "--x",
        data("ellipse.sys").to_str().unwrap(),
        "--symmetric",
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let svg = std::fs::read_to_string(plot.join("plot.svg")).unwrap();
    assert_eq!(svg.matches("class=\"bottleneck\"").count(), 2);
    let segments = std::fs::read_to_string(plot.join("segments.csv")).unwrap();
    assert_eq!(segments.lines().count(), 3);
}

#[test]
fn plot_subcommand_reads_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = run(&[
        "bottlenecks",
        "--x",
        data("ellipse.sys").to_str().unwrap(),
        "--symmetric",
        "-o",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let out = dir.path().join("out");
    let o = run(&[
        "plot",
        "--report",
        report.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(out.join("plot.svg").exists());
}

#[test]
fn empty_plot_is_a_notice() {
    let dir = tempfile::tempdir().unwrap();
    let iso = dir.path().join("iso.sys");
    std::fs::write(&iso, "vars: x, y;\ndim: 1;\nx^2 + y^2;\n").unwrap();
    let plot = dir.path().join("plot");
    let o = run(&[
        "bottlenecks",
        "--x",
        iso.to_str().unwrap(),
        "--symmetric",
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("nothing to plot"));
    assert!(!plot.exists());
}

#[test]
fn strict_escalates_zero_edd() {
    let dir = tempfile::tempdir().unwrap();
    let iso = dir.path().join("iso.sys");
    // Two isotropic lines: no point has a normal through a general base point.
    std::fs::write(&iso, "vars: x, y;\ndim: 1;\nx^2 + y^2;\n").unwrap();
    let iso = iso.to_str().unwrap();
    assert_eq!(
        run(&["normal-locus", "--system", iso]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["normal-locus", "--system", iso, "--strict"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn validation_errors_exit_2() {
    let e = data("ellipse.sys");
    let e = e.to_str().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sys");
    std::fs::write(&bad, "vars: x, y;\ndim: 1;\nx^2 + * y;\n").unwrap();
    let bad_cfg = dir.path().join("bad.toml");
    std::fs::write(&bad_cfg, "sede = 1\n").unwrap();
    let wrong = dir.path().join("m.csv");
    std::fs::write(&wrong, "1,0,0\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["bottlenecks", "--x", e, "--symmetric", "--no-such-flag"],
        vec!["bottlenecks", "--x", "/nonexistent/x.sys", "--symmetric"],
        vec!["bottlenecks", "--x", bad.to_str().unwrap(), "--symmetric"],
        vec!["bottlenecks", "--x", e, "--symmetric", "--gamma", "0.6,0.7"],
        vec!["bottlenecks", "--x", e, "--symmetric", "--tol-final", "-1"],
        vec![
            "bottlenecks",
            "--x",
            e,
            "--symmetric",
            "--project",
            wrong.to_str().unwrap(),
        ],
        vec!["bottlenecks", "--x", e],
        vec![
            "bottlenecks",
            "--config",
            bad_cfg.to_str().unwrap(),
            "--x",
            e,
            "--symmetric",
        ],
        vec!["components", "--cloud", e, "--r", "0.4"],
        vec![
            "sample",
            "--system",
            e,
            "--box",
            "1,-1;0,1",
            "--spacing",
            "0.1",
        ],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn overrides_reach_the_report() {
    let e = data("ellipse.sys");
    let dir = tempfile::tempdir().unwrap();
    let p0 = dir.path().join("p0.csv");
    std::fs::write(&p0, "0.3,0.1\n-0.2,0.4\n").unwrap();
    let v = json(&run(&[
        "bottlenecks",
        "--x",
        e.to_str().unwrap(),
        "--symmetric",
        "--gamma",
        "0.6,0.8",
        "--p0",
        p0.to_str().unwrap(),
        "--tol-real",
        "1e-7",
        "--max-steps",
        "5000",
        "--threads",
        "2",
    ]));
    assert_eq!(v["config"]["gamma"], serde_json::json!([0.6, 0.8]));
    assert_eq!(v["config"]["p0"][1], serde_json::json!([-0.2, 0.4]));
    assert_eq!(v["config"]["real_tol"], 1e-7);
    assert_eq!(v["config"]["tracker"]["max_steps"], 5000);
    assert_eq!(real_distances(&v).len(), 2);
}

#[test]
fn projection_with_identity_changes_nothing() {
    let e = data("ellipse.sys");
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.csv");
    std::fs::write(&m, "1,0\n0,1\n").unwrap();
    let v = json(&run(&[
        "bottlenecks",
        "--x",
        e.to_str().unwrap(),
        "--symmetric",
        "--project",
        m.to_str().unwrap(),
    ]));
    let d = real_distances(&v);
    assert_eq!(d.len(), 2);
    assert!((d[0] - 2.0).abs() < 1e-8);
}
