use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_slowfast-sim"));
    c.env_remove("SLOWFAST_SIM_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "vanderpol", "--out", path(dir.path()), "--outputs", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    assert!(csv.starts_with("t,x1,x2\n"));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn animate_lorenz_writes_a_gif() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "animate", "lorenz", "--out", path(dir.path()), "--outputs", "gif", "--t-final", "5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let bytes = fs::read(dir.path().join("animation.gif")).unwrap();
    let mut dec = gif::DecodeOptions::new().read_info(&bytes[..]).unwrap();
    let mut frames = 0;
    while dec.read_next_frame().unwrap().is_some() {
        frames += 1;
    }
    assert!(frames > 1 && frames <= 200);
}

#[test]
fn analyze_lorenz_lists_three_equilibria() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "lorenz", "--out", path(dir.path()), "--analysis", "equilibria"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let eq = report["equilibria"]["equilibria"].as_array().unwrap();
    assert_eq!(eq.len(), 3);
    let s = 72f64.sqrt();
    let xs: Vec<Vec<f64>> = eq
        .iter()
        .map(|e| e["x"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect())
        .collect();
    let want = [[-s, -s, 27.0], [0.0, 0.0, 0.0], [s, s, 27.0]];
    for (x, w) in xs.iter().zip(want) {
        for (a, b) in x.iter().zip(w) {
            assert!((a - b).abs() < 1e-8);
        }
    }
    assert_eq!(eq[1]["classification"], "saddle");
    assert!(report.get("segments").is_none());
}

#[test]
fn analyze_vanderpol_reports_period_and_segments() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "vanderpol", "--out", path(dir.path()), "--t-final", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["period"]["converged"], true);
    let p = report["period"]["period"].as_f64().unwrap();
    assert!((p - 2.4289).abs() < 1e-3);
    assert!(report["segments"]["fast_segments"].as_u64().unwrap() > 10);
}

#[test]
fn print_config_reflects_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# chua tweaks\nsystem = chua\nparam.mu = 4\nparam.epsilon = 0.04\n").unwrap();
    let o = run(&["simulate", "chua", "--config", path(&conf), "--param", "mu=3", "--print-config"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("param.mu = 3.0\n"), "{text}");
    assert!(text.contains("param.epsilon = 0.04\n"));
    assert!(text.contains("integrator.t_final = 100.0\n"));
    // Deterministic.
    assert_eq!(text, stdout(&run(&["simulate", "chua", "--config", path(&conf), "--param", "mu=3", "--print-config"])));
}

#[test]
fn preset_values_match_the_tables() {
    let v = stdout(&run(&["simulate", "vanderpol", "--print-config"]));
    assert!(v.contains("param.epsilon = 0.05\n"));
    assert!(v.contains("projection = plane2d:0,1\n"));
    let l = stdout(&run(&["simulate", "lorenz", "--print-config"]));
    assert!(l.contains("param.sigma = 10.0\nparam.r = 28.0\nparam.beta = 2.6666666666666665\n"));
    assert!(l.contains("projection = ortho3d:"));
    assert!(l.contains("ic = 0.0,1.0,0.0\n"));
}

#[test]
fn env_var_sets_default_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let o = bin()
        .args(["simulate", "vanderpol", "--t-final", "1"])
        .env("SLOWFAST_SIM_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(target.join("timeseries.csv").is_file());
    assert!(target.join("report.json").is_file());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "animate".to_string(),
            "vanderpol".into(),
            "--outputs".into(),
            "csv,ndjson,gif,frames,report".into(),
            "--every".into(),
            "100".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(bin().args(args(path(&a))).output().unwrap().status.code(), Some(0));
    assert_eq!(bin().args(args(path(&b))).output().unwrap().status.code(), Some(0));
    for name in ["timeseries.csv", "states.ndjson", "animation.gif", "report.json", "frames/frame_000001.ppm"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let ndjson = fs::read_to_string(a.join("states.ndjson")).unwrap();
    let first: serde_json::Value = serde_json::from_str(ndjson.lines().next().unwrap()).unwrap();
    assert_eq!(first["t"], 0.0);
    assert_eq!(first["x"], serde_json::json!([2.0, 0.0]));
    assert!(first["speed"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_errors_exit_two_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    fs::write(&conf, "system = lorenz\n").unwrap();
    let cases: [(&[&str], &str); 6] = [
        (&["simulate", "duffing"], "system"),
        (&["simulate", "lorenz", "--t-final", "ten"], "integrator.t_final"),
        (&["simulate", "lorenz", "--param", "epsilon=1"], "param.epsilon"),
        (&["simulate", "vanderpol", "--ic", "1,2,3"], "ic"),
        (&["simulate", "vanderpol", "--config", path(&conf)], "system"),
        (&["simulate", "vanderpol", "--set", "window.w=auto"], "window.w"),
    ];
    for (args, key) in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(key), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "lorenz", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_and_io_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "simulate", "vanderpol", "--out", path(dir.path()), "--set", "integrator.max_steps=5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("step budget"), "{}", stderr(&o));

    let o = run(&["simulate", "lorenz", "--out", path(dir.path()), "--ic=-1e200,1e200,1e200"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("t = "), "{}", stderr(&o));

    let file = dir.path().join("occupied");
    fs::write(&file, "x").unwrap();
    let o = run(&["simulate", "vanderpol", "--t-final", "1", "--out", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn trail_limits_the_drawn_history() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "animate", "vanderpol", "--outputs", "frames", "--trail", "20", "--every", "500",
        "--out", path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let frames = fs::read_dir(dir.path().join("frames")).unwrap().count();
    assert!(frames >= 2);
}
