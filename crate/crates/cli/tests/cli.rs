use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rtsbst_cli::{
    parse_input_spec, EXIT_INVALID, EXIT_NFF, EXIT_PARSE, EXIT_RUNTIME, EXIT_TC, EXIT_USAGE,
};
use serde_json::Value;

fn rtsbst(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtsbst"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = rtsbst(dir.path(), &["check", "sc.rt"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    fs::write(
        dir.path().join("noinit.rt"),
        "table N\ninputs a\nreq 1\n  pre -\n  post a > prev(a)\n",
    )
    .unwrap();
    let o = rtsbst(dir.path(), &["check", "noinit.rt"]);
    assert_eq!(code(&o), EXIT_INVALID);
    assert!(stdout(&o).contains("MissingInitialValue"), "{}", stdout(&o));

    fs::write(
        dir.path().join("broken.rt"),
        "table B\ninputs a\nreq 1\n  post a > (1\n",
    )
    .unwrap();
    let o = rtsbst(dir.path(), &["check", "broken.rt"]);
    assert_eq!(code(&o), EXIT_PARSE);
    assert!(stdout(&o).starts_with("broken.rt:4:"), "{}", stdout(&o));

    let o = rtsbst(dir.path(), &["check", "missing.rt"]);
    assert_eq!(code(&o), EXIT_RUNTIME);
}

fn write_sc_trace(path: &Path, violate_req2: bool) {
    let mut csv = String::from("t,F_s,T_s,P_s\n");
    for k in 0..=350 {
        let t = k as f64 * 0.1;
        let p = if violate_req2 && t >= 31.0 {
            87.6
        } else {
            87.25
        };
        csv.push_str(&format!("{t},3,80,{p}\n"));
    }
    fs::write(path, csv).unwrap();
}

#[test]
fn monitor_reports_fitness_and_writes_degrees() {
    let dir = tempfile::tempdir().unwrap();
    write_sc_trace(&dir.path().join("bad.csv"), true);
    let o = rtsbst(
        dir.path(),
        &["monitor", "sc.rt", "bad.csv", "--degrees", "deg.csv"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let fitness: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("fitness: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((fitness + 0.1).abs() < 1e-9, "{out}");
    assert!(out.contains("violated: [2]"), "{out}");

    let degrees = fs::read_to_string(dir.path().join("deg.csv")).unwrap();
    let mut lines = degrees.lines();
    assert_eq!(lines.next(), Some("t,ff_1,ff_2,ff_3,ff_total_running"));
    assert_eq!(lines.count(), 351);

    write_sc_trace(&dir.path().join("good.csv"), false);
    let o = rtsbst(dir.path(), &["monitor", "sc.rt", "good.csv"]);
    assert!(stdout(&o).contains("fitness: 0.25"), "{}", stdout(&o));
    assert!(dir.path().join("degree_trace.csv").exists());
}

#[test]
fn monitor_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.rt"), "table E\ninputs a\n").unwrap();
    fs::write(dir.path().join("a.csv"), "t,a\n0,1\n0.5,2\n1,3\n").unwrap();
    let o = rtsbst(dir.path(), &["monitor", "empty.rt", "a.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "fitness: inf");

    fs::write(
        dir.path().join("short.csv"),
        "t,F_s,T_s\n0,1,80\n0.1,1,80\n",
    )
    .unwrap();
    let o = rtsbst(dir.path(), &["monitor", "sc.rt", "short.csv"]);
    assert_eq!(code(&o), EXIT_RUNTIME);
    assert!(stderr(&o).contains("P_s"), "{}", stderr(&o));
}

#[test]
fn falsify_verdicts_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = rtsbst(
        dir.path(),
        &[
            "falsify",
            "--model",
            "omm-v1",
            "--table",
            "omm-rt0.rt",
            "--algo",
            "ur",
            "--budget",
            "1500",
            "--seed",
            "1",
            "--out",
            "tc",
        ],
    );
    assert_eq!(code(&o), EXIT_TC, "{}{}", stdout(&o), stderr(&o));
    let result: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("tc/result.json")).unwrap())
            .unwrap();
    assert_eq!(result["verdict"], "TC");
    assert_eq!(result["seed"], 1);
    assert_eq!(result["config"]["budget"], 1500);
    assert_eq!(result["config"]["algorithm"], "uniform-random");
    assert_eq!(result["parameters"].as_array().unwrap().len(), 6);
    let history = result["history"].as_array().unwrap();
    assert_eq!(history.len() as u64, result["iterations"].as_u64().unwrap());
    assert!(history.last().unwrap().as_f64().unwrap() < 0.0);
    assert!(result["violated_requirements"]
        .as_array()
        .unwrap()
        .contains(&Value::from(2)));
    for f in ["best_trace.csv", "best_degrees.csv"] {
        assert!(dir.path().join("tc").join(f).exists(), "{f}");
    }

    let o = rtsbst(
        dir.path(),
        &[
            "falsify",
            "--model",
            "omm-v3",
            "--table",
            "omm-rt1.rt",
            "--algo",
            "sa",
            "--budget",
            "200",
            "--out",
            "nff",
        ],
    );
    assert_eq!(code(&o), EXIT_NFF, "{}", stderr(&o));
    let result: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("nff/result.json")).unwrap())
            .unwrap();
    assert_eq!(result["verdict"], "NFF");
    assert_eq!(result["iterations"], 200);
    assert_eq!(result["config"]["sa"]["cooling"], 0.97);
}

#[test]
fn falsify_repeated_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = rtsbst(
        dir.path(),
        &[
            "falsify",
            "--model",
            "omm-v2",
            "--table",
            "omm-rt2.rt",
            "--runs",
            "3",
            "--seed",
            "10",
            "--budget",
            "1500",
            "--input",
            "u1:-100:100:2",
            "--out",
            "runs",
        ],
    );
    assert_eq!(code(&o), EXIT_TC, "{}", stderr(&o));
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("runs/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["runs"], 3);
    for (i, seed) in [(1, 10), (2, 11), (3, 12)] {
        let r: Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join(format!("runs/result-{i}.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(r["seed"], seed);
        assert_eq!(r["config"]["inputs"][0]["discontinuities"], 2);
        assert_eq!(r["parameters"].as_array().unwrap().len(), 8);
    }
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["falsify", "--model", "omm-v1", "--table", "omm-rt0.rt"];
    for extra in [
        &["--budget", "0"][..],
        &["--input", "u9:0:1"],
        &["--input", "u1:zero:1"],
        &["--algo", "ga"],
        &["--cooling", "1.5"],
    ] {
        let args: Vec<&str> = base.iter().chain(extra).copied().collect();
        let o = rtsbst(dir.path(), &args);
        assert_eq!(code(&o), EXIT_USAGE, "{extra:?}: {}", stderr(&o));
    }
    let o = rtsbst(
        dir.path(),
        &["falsify", "--model", "nope", "--table", "sc.rt"],
    );
    assert_eq!(code(&o), EXIT_USAGE);
    let o = rtsbst(
        dir.path(),
        &["falsify", "--model", "omm-v0", "--table", "sc.rt"],
    );
    assert_eq!(code(&o), EXIT_RUNTIME, "{}", stderr(&o));
    assert_eq!(code(&rtsbst(dir.path(), &["--help"])), 0);
}

#[test]
fn input_spec_parsing() {
    let s = parse_input_spec("F_s:0:10").unwrap();
    assert_eq!(
        (s.name.as_str(), s.lo, s.hi, s.discontinuities),
        ("F_s", 0.0, 10.0, 1)
    );
    let s = parse_input_spec("u1:-5:5:3").unwrap();
    assert_eq!((s.lo, s.discontinuities), (-5.0, 3));
    for bad in ["u1", "u1:0", ":0:1", "u1:0:1:x", "u1:0:1:2:3"] {
        assert!(parse_input_spec(bad).is_err(), "{bad}");
    }
}
