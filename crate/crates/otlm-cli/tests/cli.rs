//! Black-box tests of the binary: exit codes, file formats, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_otlm"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("otlm-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn write_fit_config(dir: &Path, extra_solver: &str) -> PathBuf {
    let config = format!(
        r#"{{
  "schema_version": 1,
  "dictionary": "dictionary.csv",
  "target": "target.csv",
  "cost": {{"kind": "abs_grid", "rho": 0.01}},
  "solver": {{"epsilon": 0.001, "lambda": 1.0, "datafit": "tv"{extra_solver}}}
}}"#
    );
    let path = dir.join("run.json");
    std::fs::write(&path, config).unwrap();
    path
}

#[test]
fn missing_dictionary_is_exit_one_with_path() {
    let dir = scratch("missing");
    let config = write_fit_config(&dir, "");
    let out = run(bin().args(["fit", "--config"]).arg(&config));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("dictionary.csv"),
        "stderr must name the missing path: {stderr}"
    );
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = scratch("gen-det");
    for sub in ["a", "b"] {
        let out = run(bin()
            .args([
                "gen", "scaling", "--n", "500", "--m", "50", "--seed", "7", "--out",
            ])
            .arg(dir.join(sub)));
        assert!(out.status.success());
    }
    for file in ["dictionary.csv", "target.csv", "grid.csv", "truth.json"] {
        let a = std::fs::read(dir.join("a").join(file)).unwrap();
        let b = std::fs::read(dir.join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical seeds");
    }
    let other = run(bin()
        .args([
            "gen", "scaling", "--n", "500", "--m", "50", "--seed", "8", "--out",
        ])
        .arg(dir.join("c")));
    assert!(other.status.success());
    let a = std::fs::read(dir.join("a/target.csv")).unwrap();
    let c = std::fs::read(dir.join("c/target.csv")).unwrap();
    assert_ne!(a, c, "different seeds must differ");
}

#[test]
fn gen_demo_columns_sum_to_one_and_truth_regenerates() {
    let dir = scratch("gen-demo");
    let out = run(bin()
        .args(["gen", "demo", "--seed", "4", "--out"])
        .arg(&dir));
    assert!(out.status.success());

    let text = std::fs::read_to_string(dir.join("dictionary.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 4, "grid plus three atoms");
    let mut sums = [0.0f64; 3];
    for line in lines {
        for (k, field) in line.split(',').skip(1).enumerate() {
            sums[k] += field.parse::<f64>().unwrap();
        }
    }
    for s in sums {
        assert!((s - 1.0).abs() < 1e-9, "column sums {sums:?}");
    }

    // truth.json amplitudes rebuild the target from the stated components
    let truth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("truth.json")).unwrap()).unwrap();
    let comps = truth["components"].as_array().unwrap();
    let weights: Vec<f64> = truth["true_weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let target_text = std::fs::read_to_string(dir.join("target.csv")).unwrap();
    let rows: Vec<(f64, f64)> = target_text
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    let grid: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mut rebuilt = vec![0.0; grid.len()];
    for (comp, w) in comps.iter().zip(&weights) {
        let (mu, sigma, gamma) = (
            comp["mu"].as_f64().unwrap(),
            comp["sigma"].as_f64().unwrap(),
            comp["gamma"].as_f64().unwrap(),
        );
        assert_eq!(comp["amplitude"].as_f64().unwrap(), *w);
        let profile: Vec<f64> = grid
            .iter()
            .map(|&x| otlm_core::skew_gaussian_pdf(x, mu, sigma, gamma))
            .collect();
        let mass: f64 = profile.iter().sum();
        for (r, p) in rebuilt.iter_mut().zip(&profile) {
            *r += w * p / mass;
        }
    }
    for ((_, y), r) in rows.iter().zip(&rebuilt) {
        assert!(
            (y - r).abs() <= 1e-12 * y.max(1e-12),
            "target rebuild: {y} vs {r}"
        );
    }
}

#[test]
fn fit_demo_config_converges_with_three_weights() {
    let dir = scratch("fit-demo");
    let gen = run(bin()
        .args(["gen", "demo", "--seed", "0", "--out"])
        .arg(&dir));
    assert!(gen.status.success());
    let config = write_fit_config(
        &dir,
        r#", "max_iters": 150000, "tol": 5e-7, "check_every": 25"#,
    );
    let out = run(bin()
        .args(["fit", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .args(["--emit-plan", "3"]));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["converged"], serde_json::Value::Bool(true));
    assert_eq!(report["weights"].as_array().unwrap().len(), 3);
    assert_eq!(report["atoms"].as_array().unwrap().len(), 3);
    assert!(
        report["final_residuals"]["source_residual"]
            .as_f64()
            .unwrap()
            <= 1e-6
    );
    // top-3 per row
    let plan = report["plan_topk"].as_array().unwrap();
    assert!(plan.len() <= 3 * 200);
    assert!(!plan.is_empty());

    // weights CSV parses back
    let weights_text = std::fs::read_to_string(dir.join("out/weights.csv")).unwrap();
    assert_eq!(weights_text.lines().count(), 4);
}

#[test]
fn unconverged_fit_exits_two_but_writes_report() {
    let dir = scratch("fit-short");
    let gen = run(bin()
        .args(["gen", "demo", "--seed", "0", "--out"])
        .arg(&dir));
    assert!(gen.status.success());
    let config = write_fit_config(&dir, r#", "max_iters": 3, "tol": 1e-12"#);
    let out = run(bin()
        .args(["fit", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out")));
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["converged"], serde_json::Value::Bool(false));
    assert_eq!(report["iters_used"], serde_json::json!(3));
}

#[test]
fn emptied_kernel_is_exit_one_with_epsilon_diagnostic() {
    let dir = scratch("fit-infeasible");
    let gen = run(bin()
        .args(["gen", "demo", "--seed", "0", "--out"])
        .arg(&dir));
    assert!(gen.status.success());
    // custom cost whose row 1 carries only order-one costs: a tiny epsilon
    // drops everything stored there and empties the kernel row
    let mut entries = vec![
        "[0, 0, 0.0]".to_string(),
        "[0, 1, 5.0]".to_string(),
        "[1, 0, 5.0]".to_string(),
    ];
    for i in 2..200 {
        entries.push(format!("[{i}, {i}, 0.0]"));
    }
    let config = format!(
        r#"{{
  "schema_version": 1,
  "dictionary": "dictionary.csv",
  "target": "target.csv",
  "cost": {{"kind": "custom", "entries": [{}]}},
  "solver": {{"epsilon": 1e-9, "lambda": 1.0, "datafit": "tv"}}
}}"#,
        entries.join(", ")
    );
    let config_path = dir.join("run.json");
    std::fs::write(&config_path, config).unwrap();
    let out = run(bin().args(["fit", "--config"]).arg(&config_path));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("epsilon") && stderr.contains("too small"),
        "diagnostic should blame epsilon: {stderr}"
    );
}

#[test]
fn prox_command_prints_closed_form_and_oracle() {
    let out = run(bin().args(["prox", "--datafit", "equality", "--s", "1.5", "--y", "2.5"]));
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("2.5000000000000000e0"), "{stdout}");

    let out = run(bin().args([
        "prox",
        "--datafit",
        "poisson",
        "--s",
        "3.0",
        "--y",
        "3.0",
        "--lambda",
        "2.0",
        "--epsilon",
        "0.5",
    ]));
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    // s = y is the fixed point
    assert!(stdout.contains("3.0000000000000000e0"), "{stdout}");

    let out = run(bin().args(["prox", "--datafit", "bogus", "--s", "1", "--y", "1"]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_csv_has_one_row_per_size_and_honest_nnz() {
    let dir = scratch("bench");
    let csv_path = dir.join("bench.csv");
    let out = run(bin()
        .args([
            "bench",
            "--sizes",
            "200,400",
            "--repeats",
            "2",
            "--iters",
            "20",
            "--out",
        ])
        .arg(&csv_path));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,M,nnz_K,iters,time_ms_median,time_ms_p90");
    assert_eq!(lines.len(), 3);

    // nnz column matches the kernel builder's accounting
    let fields: Vec<&str> = lines[1].split(',').collect();
    let n: usize = fields[0].parse().unwrap();
    let nnz: usize = fields[2].parse().unwrap();
    let spec = otlm_core::SynthSpec::new(n, n / 10, 0);
    let p = otlm_core::gen_scaling_problem(&spec).unwrap();
    let cost = otlm_core::build_cost(&otlm_core::CostSpec {
        kind: otlm_core::CostKind::AbsGrid {
            rho: 0.01,
            dx_max: 10.0,
        },
        grid: p.grid,
        mask: None,
    })
    .unwrap();
    let kernel = otlm_core::build_kernel(&cost, 0.001).unwrap();
    assert_eq!(kernel.nnz(), nnz);

    // descending sizes rejected
    let bad = run(bin()
        .args(["bench", "--sizes", "400,200", "--repeats", "1", "--out"])
        .arg(dir.join("bad.csv")));
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn demo_command_reports_advantage() {
    let out = run(bin().args(["demo", "--seed", "2"]));
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("l2 distance to truth"), "{stdout}");
}

#[test]
fn relative_quadratic_cost_with_mask_from_atom() {
    let dir = scratch("mask");
    // tiny hand-written problem on a positive grid (the relative cost
    // divides by the coordinate)
    let dict_csv = "x,atom_0,atom_1\n\
1.0,0.9,0.0\n2.0,0.8,0.1\n3.0,0.1,0.2\n4.0,0.0,0.9\n5.0,0.0,0.7\n";
    let target_csv = "x,y\n1.0,0.8\n2.0,0.7\n3.0,0.4\n4.0,0.8\n5.0,0.6\n";
    std::fs::write(dir.join("dictionary.csv"), dict_csv).unwrap();
    std::fs::write(dir.join("target.csv"), target_csv).unwrap();
    let config = r#"{
  "schema_version": 1,
  "dictionary": "dictionary.csv",
  "target": "target.csv",
  "cost": {
    "kind": "relative_quadratic", "rho": 0.5, "dx_max": 4.0,
    "mask": {"profile_atom": 0, "threshold": 0.5}
  },
  "solver": {"epsilon": 0.5, "lambda": 2.0, "datafit": "kl", "max_iters": 20000, "tol": 1e-9}
}"#;
    let config_path = dir.join("run.json");
    std::fs::write(&config_path, config).unwrap();
    let out = run(bin()
        .args(["fit", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(dir.join("out")));
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/report.json")).unwrap())
            .unwrap();
    // atom 0's profile is above threshold on rows 0-1 only; the mask cuts
    // transport between that run and everything else, shrinking the kernel
    let nnz = report["nnz_kernel"].as_u64().unwrap();
    assert!(
        nnz < 21,
        "mask should remove cross-run entries, nnz = {nnz}"
    );
    assert_eq!(report["converged"], serde_json::Value::Bool(true));
}
