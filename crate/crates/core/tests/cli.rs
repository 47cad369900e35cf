use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use pathfn::flow::PiecewiseQuadratic;

fn spec(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name).display().to_string()
}

fn pathfn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathfn"))
        .args(args)
        .env_remove("PATHFN_JOBS")
        .output()
        .expect("spawn pathfn")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad report: {e}\n{}", stdout(o)))
}

fn without_timing(o: &Output) -> String {
    let mut v = report(o);
    v.as_object_mut().unwrap().remove("elapsed_ms");
    serde_json::to_string_pretty(&v).unwrap()
}

fn triplet(v: &Value) -> (u64, u64, String) {
    (v["n"].as_u64().unwrap(), v["k"].as_u64().unwrap(), v["y"].as_str().unwrap().to_string())
}

#[test]
fn eval_exact_point() {
    let o = pathfn(&["eval", "--func", &spec("takagi2.json"), "--points", "1/4", "--mode", "exact"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.last().unwrap(), "1/4,1/2");
}

#[test]
fn eval_grid_row_count() {
    let o = pathfn(&["eval", "--func", &spec("takagi2.json"), "--grid", "4", "--mode", "exact"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<String> = stdout(&o).lines().filter(|l| !l.starts_with('x')).map(str::to_string).collect();
    assert_eq!(rows.len(), 17);
    assert_eq!(rows[0], "0,0");
    assert_eq!(rows[8], "1/2,1/2");
    assert_eq!(rows[16], "1,0");
}

#[test]
fn eval_float_has_error_column() {
    let o = pathfn(&["eval", "--func", &spec("weier_eta.json"), "--points", "0.5,1/3", "--mode", "float"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,value,error_bound");
    for l in lines {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols.len(), 3);
        let err: f64 = cols[2].parse().unwrap();
        assert!((0.0..1e-6).contains(&err));
    }
}

#[test]
fn eval_exact_unsupported() {
    let o = pathfn(&["eval", "--func", &spec("weier_eta.json"), "--points", "0.5", "--mode", "exact"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn membership_takagi_passes_with_zero_margin() {
    let o = pathfn(&["membership", "--func", &spec("takagi2.json"), "--c", "2", "--r", "2", "--nmax", "8", "--ydepth", "6"]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    assert_eq!(v["schema"], "pathfn/1");
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["results"]["worst_margin"], "0");
}

#[test]
fn membership_theta_series_fails_from_n4() {
    let o = pathfn(&["membership", "--func", &spec("u_theta2.json"), "--c", "1/10", "--r", "2", "--nmax", "5", "--ydepth", "1"]);
    assert_eq!(code(&o), 1);
    let v = report(&o);
    assert_eq!(v["verdict"], "fail");
    assert_eq!(triplet(&v["results"]["first_violation"]), (4, 0, "1/2".to_string()));
    assert_eq!(triplet(&v["results"]["worst_triplet"]), (5, 0, "1/2".to_string()));
}

#[test]
fn membership_distance_fails() {
    let o = pathfn(&["membership", "--func", &spec("dist.json"), "--c", "1", "--r", "2", "--nmax", "1", "--ydepth", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn membership_rejects_nonpositive_c() {
    let o = pathfn(&["membership", "--func", &spec("takagi2.json"), "--c", "0", "--nmax", "2"]);
    assert_eq!(code(&o), 2);
    let o = pathfn(&["membership", "--func", &spec("takagi2.json"), "--c", "abc", "--nmax", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn cap_is_enforced() {
    let o = pathfn(&["--cap", "100", "membership", "--func", &spec("takagi2.json"), "--c", "2", "--nmax", "8", "--ydepth", "6"]);
    assert_eq!(code(&o), 2);
    let msg = String::from_utf8_lossy(&o.stderr).to_lowercase();
    assert!(msg.contains("cap") || msg.contains("limit"), "{msg}");
}

#[test]
fn identity_holds_for_distance_and_psi0() {
    let o = pathfn(&["identity", "--psi", &spec("dist.json"), "--r", "2", "--nmax", "6", "--ydepth", "3"]);
    assert_eq!(code(&o), 0);
    let o = pathfn(&["identity", "--psi", &spec("psi0.json"), "--r", "3", "--nmax", "4", "--ydepth", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["verdict"], "pass");
}

#[test]
fn flow_with_crosscheck() {
    let o = pathfn(&["flow", "--func", &spec("takagi2.json"), "--c", "2", "--t", "1/4", "--crosscheck", "6"]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    assert_eq!(v["results"]["pieces"], 2);
    assert_eq!(v["results"]["crosscheck"]["mismatches"], 0);
    let pq = PiecewiseQuadratic::from_json(&v["results"]["envelope"]).unwrap();
    assert_eq!(pq.pieces.len(), 2);
}

#[test]
fn flow_default_depth() {
    let o = pathfn(&["flow", "--func", &spec("takagi2.json"), "--c", "2", "--t", "1/8"]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    assert_eq!(v["results"]["n"], 1);
    assert_eq!(v["results"]["vertices"], 3);
}

#[test]
fn flow_depth_below_hypothesis() {
    let o = pathfn(&["flow", "--func", &spec("takagi2.json"), "--c", "2", "--t", "1/8", "--n", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn flow_artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let env_path = dir.path().join("env.json");
    let csv_path = dir.path().join("env.csv");
    let o = pathfn(&[
        "flow",
        "--func",
        &spec("takagi2.json"),
        "--c",
        "2",
        "--t",
        "1/16",
        "--envelope",
        env_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
        "--samples",
        "32",
    ]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    let text = std::fs::read_to_string(&env_path).unwrap();
    let pq = PiecewiseQuadratic::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(pq.to_json(), v["results"]["envelope"]);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x,value");
    let rows: Vec<(pathfn::Rational, pathfn::Rational)> = lines
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (pathfn::arith::parse_rational(x).unwrap(), pathfn::arith::parse_rational(y).unwrap())
        })
        .collect();
    assert!(rows.len() >= 32);
    for (x, y) in rows {
        assert_eq!(pq.eval(&x).unwrap().as_exact().unwrap(), &y);
    }
}

#[test]
fn probe_tables() {
    let o = pathfn(&["probe", "--func", &spec("takagi2.json"), "--x", "1/3", "--N", "12"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,k,y,delta_plus,delta_minus,gap");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 13);
    for r in &rows {
        let gap = pathfn::arith::parse_rational(&r[5]).unwrap();
        assert!(gap <= pathfn::arith::int(-2));
    }

    let o = pathfn(&["probe", "--func", &spec("dist.json"), "--x", "1/4", "--N", "5"]);
    assert_eq!(code(&o), 0);
    for l in stdout(&o).lines().skip(1) {
        let cols: Vec<&str> = l.split(',').collect();
        if cols[0] != "0" {
            assert_eq!(cols[5], "0", "{l}");
        }
    }

    let o = pathfn(&["probe", "--func", &spec("takagi2.json"), "--x", "0", "--N", "10", "--y", "1/2"]);
    assert_eq!(code(&o), 0);
    for l in stdout(&o).lines().skip(1) {
        let gap = pathfn::arith::parse_rational(l.rsplit(',').next().unwrap()).unwrap();
        assert!(gap <= pathfn::arith::int(-2), "{l}");
    }
}

#[test]
fn bounds_examples() {
    let o = pathfn(&["bounds", "--psi", &spec("dist.json"), "--m", "1", "--alpha", "0", "--r", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["results"]["implied_c"], "2");
    let o = pathfn(&["bounds", "--psi", &spec("psi0.json"), "--m", "1", "--alpha", "2", "--r", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["results"]["implied_c"], "1");
    let o = pathfn(&["bounds", "--psi", &spec("theta2.json"), "--m", "1", "--alpha", "2", "--r", "2"]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["verdict"], "fail");
}

#[test]
fn reports_are_deterministic() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["membership", "--func", "takagi3.json", "--c", "3/2", "--r", "3", "--nmax", "4", "--ydepth", "3"],
        vec!["flow", "--func", "u_psi0.json", "--c", "1", "--t", "1/32", "--crosscheck", "7"],
        vec!["bounds", "--psi", "psi0.json", "--m", "1", "--alpha", "2", "--r", "2"],
    ];
    for run in runs {
        let args: Vec<String> = run.iter().map(|a| if a.ends_with(".json") { spec(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = pathfn(&args);
        let b = pathfn(&args);
        let mut with_jobs = vec!["--jobs", "3"];
        with_jobs.extend(args.iter());
        let c = pathfn(&with_jobs);
        assert_eq!(code(&a), code(&b));
        assert_eq!(without_timing(&a), without_timing(&b), "{run:?}");
        let mut rc = report(&c);
        rc.as_object_mut().unwrap().remove("elapsed_ms");
        let mut ra = report(&a);
        ra.as_object_mut().unwrap().remove("elapsed_ms");
        assert_eq!(ra["results"], rc["results"], "{run:?}");
    }
}

#[test]
fn jobs_env_fallback() {
    let args = ["membership", "--func", &spec("takagi2.json"), "--c", "2", "--nmax", "5", "--ydepth", "4"];
    let with_env = Command::new(env!("CARGO_BIN_EXE_pathfn")).args(args).env("PATHFN_JOBS", "2").output().unwrap();
    assert_eq!(code(&with_env), 0);
    let plain = pathfn(&args);
    assert_eq!(report(&with_env)["results"], report(&plain)["results"]);
    let bad = Command::new(env!("CARGO_BIN_EXE_pathfn")).args(args).env("PATHFN_JOBS", "zero").output().unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&pathfn(&[])), 2);
    assert_eq!(code(&pathfn(&["frobnicate"])), 2);
    assert_eq!(code(&pathfn(&["eval", "--func", "/nonexistent/spec.json", "--points", "0"])), 2);
    assert_eq!(code(&pathfn(&["eval", "--func", &spec("takagi2.json")])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"takagi","r":1}"#).unwrap();
    let o = pathfn(&["eval", "--func", bad.to_str().unwrap(), "--points", "0"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("$.r"));
}
