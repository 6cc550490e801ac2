use std::path::Path;
use std::process::{Command, Output};

use designforge::construct::BuildReport;
use designforge::formats::{
    design_from_json, design_to_json, quadrature_from_json, quadrature_to_json,
};
use serde_json::Value;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_designforge"))
        .current_dir(dir)
        .env_remove("DESIGNFORGE_CACHE")
        .env("HOME", dir)
        .env_remove("XDG_CACHE_HOME")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn s2_degree_one_builds_four_points_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "build",
            "-n",
            "2",
            "-t",
            "1",
            "-o",
            "d.json",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let design = read_json(&dir.path().join("d.json"));
    assert_eq!(design["count"], 4);
    assert_eq!(design["ambient_dim"], 3);
    let report = read_json(&dir.path().join("r.json"));
    assert_eq!(report["passed"], true);
    assert_eq!(report["cardinality"], 4);

    let pass = run_in(dir.path(), &["verify", "d.json", "-t", "1"]);
    assert_eq!(pass.status.code(), Some(0), "{}", stdout(&pass));
    // Four points meet the degree-2 lower bound but are not a 2-design.
    let fail = run_in(
        dir.path(),
        &["verify", "d.json", "-t", "2", "--method", "both"],
    );
    assert_eq!(fail.status.code(), Some(1), "{}", stdout(&fail));
    let reports: Value = serde_json::from_str(&stdout(&fail)).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 2);
    assert!(reports
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["passed"] == false));
}

#[test]
fn builds_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = run_in(
            dir.path(),
            &[
                "--no-cache",
                "--hex",
                "build",
                "-n",
                "3",
                "-t",
                "3",
                "-o",
                "d.json",
                "--report",
                "r.json",
            ],
        );
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["d.json", "r.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
}

#[test]
fn cached_and_fresh_builds_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache = cache.to_str().unwrap();
    let args = |out: &'static str| {
        vec![
            "--cache-dir",
            cache,
            "build",
            "-n",
            "4",
            "-t",
            "3",
            "-o",
            out,
            "--report",
            "r.json",
        ]
    };
    assert_eq!(
        run_in(dir.path(), &args("first.json")).status.code(),
        Some(0)
    );
    let entries = std::fs::read_dir(cache).unwrap().count();
    assert_eq!(entries, 2, "one rule per weight");
    assert_eq!(
        run_in(dir.path(), &args("second.json")).status.code(),
        Some(0)
    );
    assert_eq!(
        std::fs::read(dir.path().join("first.json")).unwrap(),
        std::fs::read(dir.path().join("second.json")).unwrap()
    );
}

#[test]
fn cache_dir_flag_overrides_environment() {
    let dir = tempfile::tempdir().unwrap();
    let env_cache = dir.path().join("env");
    let flag_cache = dir.path().join("flag");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_designforge"));
    cmd.current_dir(dir.path())
        .env("DESIGNFORGE_CACHE", &env_cache);
    let o = cmd
        .args([
            "quadrature",
            "--m",
            "2",
            "--n",
            "2",
            "-t",
            "3",
            "-o",
            "q.json",
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(env_cache.is_dir());

    let mut cmd = Command::new(env!("CARGO_BIN_EXE_designforge"));
    cmd.current_dir(dir.path())
        .env("DESIGNFORGE_CACHE", &env_cache);
    let o = cmd
        .args([
            "--cache-dir",
            flag_cache.to_str().unwrap(),
            "quadrature",
            "--m",
            "2",
            "--n",
            "1",
            "-t",
            "2",
            "-o",
            "q.json",
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(&flag_cache).unwrap().count(), 1);
    assert_eq!(std::fs::read_dir(&env_cache).unwrap().count(), 1);
}

#[test]
fn quadrature_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "quadrature",
            "--m",
            "2",
            "--n",
            "2",
            "-t",
            "3",
            "-o",
            "q.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("K=2"));
    let q = read_json(&dir.path().join("q.json"));
    assert_eq!(q["K"], 2);
    assert_eq!(q["certified"], true);
    let node: f64 = q["nodes"][1].as_str().unwrap().parse().unwrap();
    assert!((node - 1.0 / 3f64.sqrt()).abs() <= 1e-12);

    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "quadrature",
            "--m",
            "2",
            "--n",
            "1",
            "-t",
            "1",
            "-o",
            "q.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let node: f64 = read_json(&dir.path().join("q.json"))["nodes"][0]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!((node + 1.0 / 3.0).abs() <= 1e-12);

    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "quadrature",
            "--m",
            "3",
            "--n",
            "2",
            "-t",
            "0",
            "-o",
            "q.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(&dir.path().join("q.json"))["K"], 1);
}

#[test]
fn unreachable_quadrature_writes_best_effort_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "--max-k",
            "2",
            "quadrature",
            "--m",
            "2",
            "--n",
            "1",
            "-t",
            "6",
            "-o",
            "q.json",
        ],
    );
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let q = read_json(&dir.path().join("q.json"));
    assert_eq!(q["certified"], false);
}

#[test]
fn failing_build_reports_offending_node() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "--tol-design",
            "1e-30",
            "build",
            "-n",
            "3",
            "-t",
            "2",
            "-o",
            "d.json",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("build failed at root"),
        "{}",
        stdout(&o)
    );
    assert_eq!(read_json(&dir.path().join("r.json"))["passed"], false);
    assert!(!dir.path().join("d.json").exists());
}

#[test]
fn circle_and_s3_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "build",
            "-n",
            "1",
            "-t",
            "5",
            "-o",
            "hex.json",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(&dir.path().join("hex.json"))["count"], 6);

    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "build",
            "-n",
            "3",
            "-t",
            "2",
            "-o",
            "s3.json",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let report = read_json(&dir.path().join("r.json"));
    let k = report["root"]["product"]["K"].as_u64().unwrap();
    assert_eq!(report["cardinality"].as_u64().unwrap(), 9 * k);
}

#[test]
fn csv_designs_round_trip_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "--format",
            "csv",
            "build",
            "-n",
            "2",
            "-t",
            "4",
            "-o",
            "d.csv",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = run_in(dir.path(), &["verify", "d.csv", "-t", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run_in(dir.path(), &["verify", "d.csv"]);
    assert_eq!(o.status.code(), Some(2), "CSV needs an explicit degree");
    assert!(stderr(&o).contains("degree"), "{}", stderr(&o));
}

#[test]
fn malformed_inputs_are_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.json"), "").unwrap();
    let o = run_in(dir.path(), &["verify", "empty.json", "-t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty.json"), "{}", stderr(&o));

    std::fs::write(dir.path().join("bad.csv"), "1,0,0\n0,x,0\n").unwrap();
    let o = run_in(dir.path(), &["verify", "bad.csv", "-t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = run_in(dir.path(), &["build", "-n", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "--format",
            "json",
            "bounds",
            "-n",
            "3",
            "--t-max",
            "4",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let rows: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows[3]["t"], 4);
    assert_eq!(rows[3]["lower_bound"], "14");
    assert_eq!(rows[3]["a_n"], 4);

    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "--format",
            "json",
            "bounds",
            "-n",
            "1",
            "--t-max",
            "3",
        ],
    );
    let rows: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let bounds: Vec<&str> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["lower_bound"].as_str().unwrap())
        .collect();
    assert_eq!(bounds, ["2", "3", "4"]);

    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "--format",
            "json",
            "bounds",
            "-n",
            "2",
            "--t-max",
            "0",
        ],
    );
    let rows: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert_eq!(rows[0]["lower_bound"], "1");

    let o = run_in(
        dir.path(),
        &["--no-cache", "bounds", "-n", "2", "--t-max", "3", "--build"],
    );
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("t^a_n"), "{text}");
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn plan_override_changes_split() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("plan.json"), r#"{"splits": {"4": [1, 3]}}"#).unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "--plan",
            "plan.json",
            "build",
            "-n",
            "3",
            "-t",
            "2",
            "-o",
            "d.json",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = read_json(&dir.path().join("r.json"));
    assert_eq!(report["root"]["product"]["m"], 1);
    assert_eq!(report["root"]["product"]["n"], 3);
}

#[test]
fn serialized_files_are_fixed_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "--hex",
            "build",
            "-n",
            "2",
            "-t",
            "3",
            "-o",
            "d.json",
            "--report",
            "r.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("d.json")).unwrap();
    let design = design_from_json(&text, "d.json").unwrap();
    assert_eq!(design_to_json(&design, true), text);

    let report = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    let parsed: BuildReport = serde_json::from_str(&report).unwrap();
    assert_eq!(
        serde_json::to_string_pretty(&parsed).unwrap() + "\n",
        report
    );

    let o = run_in(
        dir.path(),
        &[
            "--no-cache",
            "--hex",
            "quadrature",
            "--m",
            "2",
            "--n",
            "3",
            "-t",
            "4",
            "-o",
            "q.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("q.json")).unwrap();
    let q = quadrature_from_json(&text, "q.json").unwrap();
    assert_eq!(quadrature_to_json(&q, true), text);
}
