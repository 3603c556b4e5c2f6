use std::path::Path;
use std::process::Command;

use l2boost::io::{load_csv, write_columns, ColumnRoleMap};
use l2boost::report::{SimulationRecord, TreatRecord, GRID_HEADER};
use l2boost::run;
use l2boost_core::numerics::stream_rng;
use l2boost_core::simlab::{generate, DgpSpec};
use l2boost_core::{double_select, DSConfig, DesignMatrix};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("l2boost").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_dataset(path: &Path, spec: &DgpSpec, seed: u64) -> Vec<String> {
    let data = generate(spec, &mut stream_rng(seed, 0)).unwrap();
    let xnames: Vec<String> = (1..=data.x.ncols()).map(|j| format!("x{j}")).collect();
    let mut names = vec!["y", "d"];
    names.extend(xnames.iter().map(String::as_str));
    let mut cols: Vec<&[f64]> = vec![&data.y, &data.d];
    cols.extend(data.x.columns());
    write_columns(path, &names, &cols).unwrap();
    xnames
}

#[test]
fn file_round_trip_reproduces_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sim.csv");
    let spec = DgpSpec::ControlsSparse {
        n: 200,
        p: 40,
        s: 5,
        alpha0: 0.5,
    };
    let xnames = write_dataset(&path, &spec, 31);
    let data = generate(&spec, &mut stream_rng(31, 0)).unwrap();
    let direct = double_select(
        &data.y,
        &data.d,
        &DesignMatrix::new(data.x.clone()).unwrap(),
        &DSConfig::default(),
    )
    .unwrap();

    let roles = ColumnRoleMap {
        outcome: "y".into(),
        treatment: Some("d".into()),
        controls: xnames,
        ..ColumnRoleMap::default()
    };
    let loaded = load_csv(&path, &roles, None).unwrap();
    assert_eq!(loaded.y, data.y);
    assert_eq!(loaded.controls, data.x);
    let reloaded = double_select(
        &loaded.y,
        &loaded.d,
        &DesignMatrix::new(loaded.controls).unwrap(),
        &DSConfig::default(),
    )
    .unwrap();
    assert!((reloaded.alpha_hat - direct.alpha_hat).abs() < 1e-12);
    assert_eq!(reloaded.controls, direct.controls);
}

#[test]
fn treat_command_matches_library_and_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sim.csv");
    let json = dir.path().join("treat.json");
    let spec = DgpSpec::ControlsSparse {
        n: 150,
        p: 30,
        s: 4,
        alpha0: 0.5,
    };
    let xnames = write_dataset(&path, &spec, 5);
    let (code, out, err) = invoke(&[
        "treat",
        "--data",
        path.to_str().unwrap(),
        "--outcome",
        "y",
        "--treatment",
        "d",
        "--output",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");

    let roles = ColumnRoleMap {
        outcome: "y".into(),
        treatment: Some("d".into()),
        controls: xnames.clone(),
        ..ColumnRoleMap::default()
    };
    let loaded = load_csv(&path, &roles, None).unwrap();
    let r = double_select(
        &loaded.y,
        &loaded.d,
        &DesignMatrix::new(loaded.controls).unwrap(),
        &DSConfig::default(),
    )
    .unwrap();

    let record: TreatRecord = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(record.inference.estimate.to_bits(), r.alpha_hat.to_bits());
    assert_eq!(record.inference.se.to_bits(), r.se.to_bits());
    assert_eq!(record.inference.p_value.to_bits(), r.p_value.to_bits());
    let expect: Vec<String> = r.set_d.iter().map(|&j| xnames[j].clone()).collect();
    assert_eq!(record.selected_treatment, expect);

    // printed numbers parse back to the same values
    let printed: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("estimate"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert_eq!(printed.to_bits(), r.alpha_hat.to_bits());
}

#[test]
fn treat_recovers_demo_effect() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("demo.csv");
    let spec = DgpSpec::NaiveDemo {
        n: 500,
        alpha: 0.5,
        beta: 0.2,
        rho_dx: 0.8,
    };
    let data = generate(&spec, &mut stream_rng(17, 0)).unwrap();
    write_columns(&path, &["y", "d", "x"], &[&data.y, &data.d, data.x.col(0)]).unwrap();
    let json = dir.path().join("r.json");
    let (code, _, err) = invoke(&[
        "treat",
        "--data",
        path.to_str().unwrap(),
        "--outcome",
        "y",
        "--treatment",
        "d",
        "--output",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let r: TreatRecord = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!((r.inference.estimate - 0.5).abs() < 3.0 * r.inference.se);
}

#[test]
fn simulate_single_replication_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let dump = dir.path().join("est.csv");
    let (code, out, err) = invoke(&[
        "simulate",
        "--table",
        "controls-sparse",
        "--n",
        "100",
        "--p",
        "20",
        "--s",
        "3",
        "--reps",
        "1",
        "--estimator",
        "post-BA,oBA",
        "--output",
        grid.to_str().unwrap(),
        "--dump-estimates",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("post-BA") && out.contains("oBA"));
    let text = std::fs::read_to_string(&grid).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), GRID_HEADER.join(","));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..4], &["100", "20", "3", "post-BA"]);
    assert_eq!(row[7], "1");
    assert_eq!(text.lines().count(), 3);
    assert_eq!(std::fs::read_to_string(&dump).unwrap().lines().count(), 3);
}

#[test]
fn simulate_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("sim.json");
    let (code, _, err) = invoke(&[
        "simulate",
        "--table",
        "naive-demo",
        "--n",
        "80",
        "--reps",
        "25",
        "--estimator",
        "post-BA,naive",
        "--output",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&json).unwrap();
    let records: Vec<SimulationRecord> = serde_json::from_str(&text).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[1].estimator, "naive");
    assert_eq!(serde_json::to_string_pretty(&records).unwrap() + "\n", text);
}

#[test]
fn boost_and_expand_commands() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    let spec = DgpSpec::ControlsSparse {
        n: 120,
        p: 10,
        s: 2,
        alpha0: 0.5,
    };
    write_dataset(&path, &spec, 3);
    let (code, out, err) = invoke(&[
        "--variant",
        "orthogonal",
        "boost",
        "--data",
        path.to_str().unwrap(),
        "--outcome",
        "d",
        "--columns",
        "x1,x2,x3,x4",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("oBA"));
    assert!(out.contains("coef       x1") || out.contains("coef       x2"));

    let design = dir.path().join("design.csv");
    let (code, out, err) = invoke(&[
        "expand",
        "--data",
        path.to_str().unwrap(),
        "--columns",
        "x1,x2,x3",
        "--write-design",
        design.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("kept       6"), "{out}");
    let header = std::fs::read_to_string(&design).unwrap();
    assert_eq!(header.lines().next().unwrap(), "x1,x2,x3,x1:x2,x1:x3,x2:x3");
}

#[test]
fn error_lines_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "y,d,x1\n1,2,3\n2,1,oops\n").unwrap();
    let p = path.to_str().unwrap();

    let (code, _, err) = invoke(&["treat", "--data", p, "--outcome", "y", "--treatment", "d"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: data: non_numeric:"), "{err}");
    assert_eq!(err.lines().count(), 1);

    let (code, _, err) = invoke(&["treat", "--data", p, "--outcome", "y", "--treatment", "zz"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: data: unknown_column:"), "{err}");

    let (code, _, err) = invoke(&["treat", "--outcome", "y"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: usage:"), "{err}");

    // d is a copy of x1: identification fails at estimation time
    std::fs::write(&path, "y,d,x1\n1,1,1\n2,2,2\n4,3,3\n3,4,4\n5,5,5\n").unwrap();
    let (code, _, err) = invoke(&[
        "treat", "--data", p, "--outcome", "y", "--treatment", "d", "--amend", "x1",
    ]);
    assert_eq!(code, 3, "{err}");
    assert!(err.starts_with("error: estimation: "), "{err}");
}

#[test]
fn binary_exit_status() {
    let exe = env!("CARGO_BIN_EXE_l2boost");
    let ok = Command::new(exe)
        .args(["simulate", "--table", "naive-demo", "--n", "50", "--reps", "1"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let usage = Command::new(exe).args(["simulate", "--reps", "x"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
    let data = Command::new(exe)
        .args(["simulate", "--table", "controls-sparse", "--n", "10", "--p", "5", "--s", "9", "--reps", "1"])
        .output()
        .unwrap();
    assert_eq!(data.status.code(), Some(2));
    let line = String::from_utf8(data.stderr).unwrap();
    assert!(line.starts_with("error: data: infeasible_spec:"), "{line}");
}
