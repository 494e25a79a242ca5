use flowcorr::correlation::{rho_se_anisotropic, rho_se_isotropic};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_flowcorr");

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn assert_schema(schema: &str, instance: &Value) {
    let text = std::fs::read_to_string(schema_dir().join(schema)).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(instance)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{errors:?}");
}

struct Run {
    dir: tempfile::TempDir,
}

impl Run {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn exec(&self, args: &[&str], env: &[(&str, &str)]) -> Output {
        let mut cmd = Command::new(BIN);
        cmd.args(args).env_remove("FLOWCORR_THREADS");
        for (k, v) in env {
            cmd.env(k, v);
        }
        cmd.output().unwrap()
    }

    /// Runs `command` with `config` and returns the standard output.
    fn ok(&self, command: &str, config: &str, extra: &[&str]) -> String {
        let cfg = self.write("config.json", config);
        let mut args = vec![command, "--config", cfg.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = self.exec(&args, &[]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    fn code(&self, args: &[&str], env: &[(&str, &str)]) -> (i32, String) {
        let out = self.exec(args, env);
        (
            out.status.code().unwrap(),
            String::from_utf8_lossy(&out.stderr).into_owned(),
        )
    }
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

const SE_RHO: &str = r#"{"command": "rho", "kernel": {"family": "squared_exponential", "l": 2.0},
    "traits": {"law": {"family": "gaussian", "sigma_x": 1.0}}, "dim": 3,
    "methods": ["model", "chi2_quadrature", "monte_carlo"], "replicates": 20000}"#;

#[test]
fn rho_reports_every_method() {
    let run = Run::new();
    let (header, rows) = csv_rows(&run.ok("rho", SE_RHO, &[]));
    assert_eq!(
        header,
        ["method", "r", "r2", "nu", "T", "rho", "sigma2", "error", "status"]
    );
    assert_eq!(rows.len(), 3);
    let want = rho_se_isotropic(0.5, 3).unwrap().rho;
    let rho = column(&header, "rho");
    for row in &rows[..2] {
        assert!(
            (row[rho].parse::<f64>().unwrap() - want).abs() < 1e-9,
            "{row:?}"
        );
    }
    let mc: f64 = rows[2][rho].parse().unwrap();
    let se: f64 = rows[2][column(&header, "error")].parse().unwrap();
    assert!((mc - want).abs() < 4.0 * se);
    let json: Value = serde_json::from_str(&run.ok("rho", SE_RHO, &["--format", "json"])).unwrap();
    assert_schema("rho_table.schema.json", &json);
}

#[test]
fn sweep_reproduces_isotropic_closed_form() {
    let run = Run::new();
    let cfg = r#"{"command": "sweep", "family": "squared_exponential",
        "r": {"logspace": {"start": -4, "stop": 2, "num": 25}}, "dim": [5],
        "methods": ["closed_form"]}"#;
    let (header, rows) = csv_rows(&run.ok("sweep", cfg, &[]));
    assert_eq!(rows.len(), 25);
    let (r, rho) = (column(&header, "r"), column(&header, "rho"));
    for row in &rows {
        let x: f64 = row[r].parse().unwrap();
        let want = rho_se_isotropic(x, 5).unwrap().rho;
        assert_eq!(row[rho].parse::<f64>().unwrap(), want);
    }
}

#[test]
fn sweep_reproduces_anisotropic_heat_map() {
    let run = Run::new();
    let cfg = r#"{"command": "sweep", "family": "squared_exponential",
        "r": [0.1, 1.0, 10.0], "r2": {"linspace": {"start": 0.5, "stop": 2.0, "num": 4}}, "dim": [2],
        "methods": ["closed_form", "quadrature"]}"#;
    let (header, rows) = csv_rows(&run.ok("sweep", cfg, &[]));
    assert_eq!(rows.len(), 3 * 4 * 2);
    let (r, r2, rho) = (
        column(&header, "r"),
        column(&header, "r2"),
        column(&header, "rho"),
    );
    for row in &rows {
        let a: f64 = row[r].parse().unwrap();
        let b: f64 = row[r2].parse().unwrap();
        let want = rho_se_anisotropic(&[a, b]).unwrap().rho;
        assert!(
            (row[rho].parse::<f64>().unwrap() - want).abs() < 1e-9,
            "{row:?}"
        );
    }
}

#[test]
fn matern_route_comparison_table() {
    let run = Run::new();
    let cfg = r#"{"command": "sweep", "family": "matern", "r": [0.1, 1.0, 10.0],
        "nu": [0.5, 1.5, 2.5, 3.5], "dim": [3],
        "methods": ["quadrature", "lower_bound", "pade", "monte_carlo"], "replicates": 2000}"#;
    let text = run.ok("sweep", cfg, &["--format", "json"]);
    let json: Value = serde_json::from_str(&text).unwrap();
    assert_schema("rho_table.schema.json", &json);
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 3 * 4 * 4);
    for row in rows {
        let rho = row["rho"].as_f64();
        let status = row["status"].as_str().unwrap();
        assert!(
            status == "ok" || status.starts_with("not_applicable"),
            "{row}"
        );
        if let Some(rho) = rho {
            assert!(rho > -0.05 && rho < 0.55, "{row}");
        }
    }
}

#[test]
fn mc_table_matches_schema() {
    let run = Run::new();
    let cfg = r#"{"command": "mc", "kernel": {"family": "matern", "l": 1.0, "shape": 1.5},
        "traits": {"law": {"family": "gaussian", "sigma_x": 1.0}}, "dim": 2, "replicates": 5000,
        "modulation": "sign_flip"}"#;
    let json: Value = serde_json::from_str(&run.ok("mc", cfg, &["--format", "json"])).unwrap();
    assert_schema("mc_table.schema.json", &json);
    for row in json.as_array().unwrap() {
        assert!(row["z"].as_f64().unwrap() < 4.0, "{row}");
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_caps() {
    let run = Run::new();
    let cfg = run.write(
        "sweep.json",
        r#"{"command": "sweep", "family": "squared_exponential", "r": [0.3, 1.0, 3.0], "dim": [2, 3],
        "methods": ["closed_form", "monte_carlo"], "replicates": 1000, "seed": 5}"#,
    );
    let args = ["sweep", "--config", cfg.to_str().unwrap()];
    let one = run.exec(&args, &[("FLOWCORR_THREADS", "1")]);
    let four = run.exec(&args, &[("FLOWCORR_THREADS", "4")]);
    let default = run.exec(&args, &[]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, default.stdout);
    let mut reseeded = args.to_vec();
    reseeded.extend(["--seed", "6"]);
    assert_ne!(run.exec(&reseeded, &[]).stdout, one.stdout);
}

#[test]
fn out_flag_writes_file() {
    let run = Run::new();
    let out = run.path("nested/rho.csv");
    let stdout = run.ok("rho", SE_RHO, &["--out", out.to_str().unwrap()]);
    assert!(stdout.is_empty());
    assert!(std::fs::read_to_string(out)
        .unwrap()
        .starts_with("method,r,r2,nu,T,"));
}

#[test]
fn hhd_triangle_and_gradient_files() {
    let run = Run::new();
    let tri = run.write("tri.txt", "0 1 1\n1 2 1\n2 0 1\n");
    let out = run.exec(&["hhd", "--input", tri.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["edge_src", "edge_dst", "f", "f_t", "f_c"]);
    assert!(rows
        .iter()
        .all(|r| r[3].parse::<f64>().unwrap().abs() < 1e-12));

    // s = (3, 1, 0, 2)
    let grad = run.write("grad.txt", "0 1 2\n1 2 1\n0 2 3\n2 3 -2\n1 3 -1\n");
    let out = run.exec(
        &["hhd", "--input", grad.to_str().unwrap(), "--format", "json"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema("hhd_decomposition.schema.json", &json);
    for e in json["edges"].as_array().unwrap() {
        assert!(e["f_c"].as_f64().unwrap().abs() < 1e-12, "{e}");
    }
    let potential: Vec<f64> = json["potential"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (p, want) in potential.iter().zip([1.5, -0.5, -1.5, 0.5]) {
        assert!((p - want).abs() < 1e-12);
    }
}

#[test]
fn hhd_sampled_flow_and_ensemble() {
    let run = Run::new();
    let sampled = r#"{"command": "hhd", "graph": {"model": "erdos_renyi", "vertices": 12, "p": 0.4},
        "kernel": {"family": "squared_exponential", "l": 1.0},
        "traits": {"law": {"family": "gaussian", "sigma_x": 1.0}}, "dim": 2, "seed": 3}"#;
    let json: Value = serde_json::from_str(&run.ok("hhd", sampled, &["--format", "json"])).unwrap();
    assert_schema("hhd_decomposition.schema.json", &json);
    assert_eq!(json["vertices"], 12);

    let ensemble = r#"{"command": "hhd", "graph": {"model": "complete", "vertices": 8},
        "kernel": {"family": "squared_exponential", "l": 1.0},
        "traits": {"law": {"family": "gaussian", "sigma_x": 1.0}}, "dim": 2, "replicates": 320}"#;
    let json: Value =
        serde_json::from_str(&run.ok("hhd", ensemble, &["--format", "json"])).unwrap();
    assert_schema("hhd_ensemble.schema.json", &json);
    for q in ["transitive", "cyclic", "total"] {
        let z = (json[format!("mean_{q}")].as_f64().unwrap()
            - json[format!("predicted_{q}")].as_f64().unwrap())
        .abs()
            / json[format!("stderr_{q}")].as_f64().unwrap();
        assert!(z < 4.0, "{q}: z = {z}");
    }
    let (header, rows) = csv_rows(&run.ok("hhd", ensemble, &[]));
    assert_eq!(header, ["quantity", "empirical", "stderr", "predicted"]);
    assert_eq!(rows.len(), 3);
}

#[test]
fn paths_write_one_file_per_order_and_level() {
    let run = Run::new();
    let dir = run.path("paths");
    let cfg = r#"{"command": "paths", "nu": [0.7, 1.0, 1.3], "l": 1.0,
        "zoom": {"centre": 0.0, "width": 9.0, "points": 60, "levels": 3}, "seed": 4}"#;
    run.ok(
        "paths",
        cfg,
        &["--out", dir.to_str().unwrap(), "--format", "json"],
    );
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 9, "{names:?}");
    for name in &names {
        let json: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap();
        assert_schema("path.schema.json", &json);
        assert_eq!(json["x"].as_array().unwrap().len(), 60);
    }
    let first = std::fs::read(dir.join(&names[0])).unwrap();
    let again = run.path("again");
    run.ok(
        "paths",
        cfg,
        &["--out", again.to_str().unwrap(), "--format", "json"],
    );
    assert_eq!(std::fs::read(again.join(&names[0])).unwrap(), first);
}

#[test]
fn single_point_path_is_one_draw() {
    let run = Run::new();
    let dir = run.path("one");
    let cfg = r#"{"command": "paths", "nu": [1.5], "zoom": {"centre": 0.5, "width": 1.0, "points": 1, "levels": 1}}"#;
    run.ok("paths", cfg, &["--out", dir.to_str().unwrap()]);
    let files: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert_eq!(files.len(), 1);
    let (header, rows) =
        csv_rows(&std::fs::read_to_string(files[0].as_ref().unwrap().path()).unwrap());
    assert_eq!(header, ["x", "value"]);
    assert_eq!(rows.len(), 1);
    assert!(rows[0][1].parse::<f64>().unwrap().is_finite());
}

#[test]
fn config_errors_exit_with_2() {
    let run = Run::new();
    let good = run.write("good.json", SE_RHO);
    let good = good.to_str().unwrap();
    let unknown = run.write(
        "unknown.json",
        r#"{"command": "rho", "kernel": {"family": "squared_exponential", "l": 1.0},
        "traits": {"law": {"family": "gaussian", "sigma_x": 1.0}}, "dim": 2, "colour": "red"}"#,
    );
    let bad_kernel = run.write(
        "bad.json",
        r#"{"command": "rho", "kernel": {"family": "squared_exponential", "l": -1.0},
        "traits": {"law": {"family": "gaussian", "sigma_x": 1.0}}, "dim": 2}"#,
    );
    let bad_edges = run.write("edges.txt", "0 1 1.0\n1 2\n");
    type Case<'a> = (Vec<&'a str>, Vec<(&'a str, &'a str)>);
    let cases: Vec<Case<'_>> = vec![
        (vec!["rho"], vec![]),
        (vec!["rho", "--config", "/nonexistent/config.json"], vec![]),
        (vec!["rho", "--config", unknown.to_str().unwrap()], vec![]),
        (
            vec!["rho", "--config", bad_kernel.to_str().unwrap()],
            vec![],
        ),
        (vec!["sweep", "--config", good], vec![]),
        (vec!["rho", "--config", good, "--format", "xml"], vec![]),
        (
            vec!["rho", "--config", good],
            vec![("FLOWCORR_THREADS", "0")],
        ),
        (
            vec!["rho", "--config", good],
            vec![("FLOWCORR_THREADS", "many")],
        ),
        (vec!["hhd", "--input", bad_edges.to_str().unwrap()], vec![]),
    ];
    for (args, env) in cases {
        let (code, stderr) = run.code(&args, &env);
        assert_eq!(code, 2, "{args:?} {env:?}: {stderr}");
    }
    let (_, stderr) = run.code(&["hhd", "--input", bad_edges.to_str().unwrap()], &[]);
    let diag: Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(diag["exit_code"], 2);
    assert_eq!(diag["kind"], "config");
    assert!(
        diag["message"].as_str().unwrap().contains("line 2"),
        "{diag}"
    );
}

#[test]
fn numeric_failure_exits_with_3() {
    let run = Run::new();
    let edges = run.write("huge.txt", "0 1 1e308\n0 2 1e308\n1 2 0\n");
    let (code, stderr) = run.code(&["hhd", "--input", edges.to_str().unwrap()], &[]);
    assert_eq!(code, 3, "{stderr}");
    let diag: Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(diag["kind"], "numeric");
}

#[test]
fn help_exits_cleanly() {
    let run = Run::new();
    assert_eq!(run.code(&["--help"], &[]).0, 0);
    assert_eq!(run.code(&["bogus"], &[]).0, 2);
}
