use std::path::Path;
use std::process::{Command, Output};

fn heat_smc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heat-smc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn eigen_prints_one_csv_line() {
    let o = heat_smc(&["eigen", "--c0", "0.5", "--branch", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let fields: Vec<f64> = text.trim().split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(text.lines().count(), 1);
    assert_eq!(fields.len(), 4);
    assert!((fields[0] - 3.292310).abs() < 1e-6);
    assert!((fields[1] + 10.839305).abs() < 1e-6);
    assert!(fields[3] < 1e-12);
}

#[test]
fn eigen_rejects_bad_c0() {
    let o = heat_smc(&["eigen", "--c0", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_gains_exit_codes() {
    let ok = heat_smc(&["validate-gains"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    assert_eq!(text.lines().next().unwrap(), "law,condition,lhs,rhs,margin,pass");
    assert_eq!(text.lines().count(), 4);

    let bad = heat_smc(&["validate-gains", "--set", "gains.alpha=2.0"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).lines().any(|l| l.starts_with("st,alpha") && l.ends_with(",false")));
}

#[test]
fn simulate_writes_files_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "horizon = 0.5\ngains.k = 3.0\n").unwrap();
    let out = dir.path().join("smc");
    let o = heat_smc(&[
        "simulate-smc",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--nx",
        "21",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(header(&out.join("trajectory.csv")), "t,sigma,u,aux,norm_z");
    assert_eq!(header(&out.join("field.csv")), "t,x,z");
    assert!(header(&out.join("metrics.csv")).starts_with("t_reach,reach_bound"));
    let rows = std::fs::read_to_string(out.join("trajectory.csv")).unwrap().lines().count();
    assert_eq!(rows, 5001 + 1);

    let st = dir.path().join("st");
    let o =
        heat_smc(&["simulate-st", "--horizon", "0.2", "--set", "snapshot_stride=0", "--out-dir", st.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(st.join("trajectory.csv").exists());
    assert!(!st.join("field.csv").exists());
}

#[test]
fn simulate_refuses_invalid_gains() {
    let dir = tempfile::tempdir().unwrap();
    let o = heat_smc(&["simulate-smc", "--set", "gains.k=2.0", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("trajectory.csv").exists());
}

#[test]
fn reduced_ode_csv_columns() {
    let o = heat_smc(&["reduced-ode", "--law", "smc", "--set", "reduced.dt=1e-3", "--horizon", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "t,sigma,selection");
    assert_eq!(text.lines().count(), 102);

    let dir = tempfile::tempdir().unwrap();
    let o = heat_smc(&[
        "reduced-ode",
        "--law",
        "st",
        "--set",
        "reduced.dt=1e-3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(header(&dir.path().join("reduced_st.csv")), "t,sigma,w,selection");
}

#[test]
fn sweep_table_and_exit_code() {
    let o = heat_smc(&["sweep", "--horizon", "0.2", "--grid", "gains.k=2.5,3.0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("gains.k,status,"));
    assert_eq!(text.lines().count(), 3);

    let o = heat_smc(&["sweep", "--horizon", "0.2", "--grid", "gains.k=1.0,2.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("gains_invalid"));
}

#[test]
fn unknown_config_key_is_an_error() {
    let o = heat_smc(&["validate-gains", "--set", "gains.kappa=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa"));
}
