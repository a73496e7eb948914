use std::fs;
use std::process::{Command, Output};

use gasgeom::curvature::CurvatureReport;
use gasgeom::verify::VerifyReport;

fn gasgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gasgeom")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn eval_at_rest_gives_diagonal_metric() {
    let o = gasgeom(&["eval", "--mass", "1", "--radius", "1", "--beta", "1", "--omega", "0,0,0", "--chart", "beta-omega"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: CurvatureReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep.index_order, ["beta", "omega_x", "omega_y", "omega_z"]);
    let g = rep.g.to_matrix().unwrap();
    let diag = [1.5, 0.4, 0.4, 0.4];
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { diag[i] } else { 0.0 };
            assert!((g[(i, j)] - want).abs() < 1e-12, "g[{i}{j}] = {}", g[(i, j)]);
        }
    }
}

#[test]
fn eval_in_beta_m_chart_has_no_cross_block() {
    let o = gasgeom(&["eval", "--chart", "beta-M", "--omega", "0.3,-1,2", "--beta", "0.7"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["chart"], "beta-M");
    let comps = &v["g"]["components"];
    for a in 1..4 {
        assert!(comps[0][a].as_f64().unwrap().abs() < 1e-9);
        assert!(comps[a][0].as_f64().unwrap().abs() < 1e-9);
    }
}

#[test]
fn malformed_omega_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = gasgeom(&["eval", "--omega", "0,0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
    assert_eq!(code(&gasgeom(&["eval", "--chart", "polar"])), 2);
    assert_eq!(code(&gasgeom(&["eval", "--beta", "-1"])), 2);
    assert_eq!(code(&gasgeom(&["eval", "--order", "9"])), 2);
    assert_eq!(code(&gasgeom(&["frobnicate"])), 2);
}

#[test]
fn eval_json_round_trips_byte_for_byte() {
    let o = gasgeom(&["eval", "--omega", "0.2,1.1,-0.5", "--chart", "u-omega"]);
    assert_eq!(code(&o), 0);
    let rep: CurvatureReport = serde_json::from_slice(&o.stdout).unwrap();
    let mut again = serde_json::to_vec_pretty(&rep).unwrap();
    again.push(b'\n');
    assert_eq!(again, o.stdout);
}

#[test]
fn eval_order_adds_derivatives_and_csv_lists_components() {
    let o = gasgeom(&["eval", "--omega", "0,0,1", "--order", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let d = v["derivatives"].as_array().unwrap();
    assert_eq!(d.len(), 3);
    assert_eq!(d[2]["order"], 3);
    let o = gasgeom(&["eval", "--omega", "0,0,1", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tensor,chart,index,value"));
    assert!(text.contains("\ng,beta-omega,0-0,"));
    assert!(text.contains("\nriem,beta-omega,3-3-3-3,"));
}

#[test]
fn same_config_and_seed_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["eval", "--omega", "0.5,0.5,1", "--seed", "11"],
        &["sweep", "--theta-grid", "1,100,1e4"],
        &["verify", "--only", "partition"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let paths: Vec<_> = (0..2).map(|k| dir.path().join(format!("{i}-{k}.out"))).collect();
        for p in &paths {
            let mut a = args.to_vec();
            a.extend(["--out", p.to_str().unwrap()]);
            assert_eq!(code(&gasgeom(&a)), 0);
        }
        assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap(), "{args:?}");
    }
}

#[test]
fn default_sweep_reaches_the_rigid_body_limits() {
    let o = gasgeom(&["sweep"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,theta,value,limit,rel_error,monotone,status"));
    let last_row = |q: &str| -> Vec<String> {
        text.lines().rfind(|l| l.starts_with(&format!("{q},"))).unwrap().split(',').map(String::from).collect()
    };
    let sectional = last_row("sectional");
    assert_eq!(sectional[1].parse::<f64>().unwrap(), 1e5);
    assert!((sectional[3].parse::<f64>().unwrap() + 1.0 / 12.0).abs() < 1e-15);
    assert_eq!(last_row("inertia")[3].parse::<f64>().unwrap(), 1.0);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",ok")));
}

#[test]
fn empty_or_unordered_grid_is_a_usage_error() {
    assert_eq!(code(&gasgeom(&["sweep", "--theta-grid", ""])), 2);
    assert_eq!(code(&gasgeom(&["sweep", "--theta-grid", "100,10"])), 2);
}

#[test]
fn sweep_json_lists_every_quantity() {
    let o = gasgeom(&["sweep", "--theta-grid", "1e2:1e4:3", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|s| s["quantity"].as_str().unwrap()).collect();
    for q in ["cumulant_2", "inertia", "norm_du", "norm_domega", "heat_capacity", "sectional", "kn_deviation"] {
        assert!(names.contains(&q), "{q}");
    }
}

#[test]
fn verify_passes_and_filters_by_module() {
    let o = gasgeom(&["verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: VerifyReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.criteria.len(), 14);
    let summary = String::from_utf8(o.stderr).unwrap();
    assert_eq!(summary.lines().filter(|l| l.starts_with("PASS")).count(), 14);

    let o = gasgeom(&["verify", "--only", "rigidbody"]);
    let rep: VerifyReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep.criteria.iter().map(|c| c.id).collect::<Vec<_>>(), [1, 2]);
    assert_eq!(code(&gasgeom(&["verify", "--only", "nowhere"])), 2);
    assert_eq!(code(&gasgeom(&["verify", "--tolerance-scale", "0"])), 2);
}

#[test]
fn tightened_tolerances_report_failures_with_exit_one() {
    let o = gasgeom(&["verify", "--tolerance-scale", "1e-6"]);
    assert_eq!(code(&o), 1);
    let rep: VerifyReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!rep.passed);
    assert!(String::from_utf8(o.stderr).unwrap().contains("failing criteria"));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# test config\nbeta = 2\nomega = 0,0,1\nchart = flat\n").unwrap();
    let c = cfg.to_str().unwrap();
    let rep: CurvatureReport = serde_json::from_slice(&gasgeom(&["eval", "--config", c]).stdout).unwrap();
    assert_eq!((rep.beta, rep.omega, rep.chart.label()), (2.0, [0.0, 0.0, 1.0], "flat"));
    let rep: CurvatureReport = serde_json::from_slice(&gasgeom(&["eval", "--config", c, "--beta", "0.5"]).stdout).unwrap();
    assert_eq!((rep.beta, rep.omega), (0.5, [0.0, 0.0, 1.0]));
    let rep: CurvatureReport = serde_json::from_slice(&gasgeom(&["eval"]).stdout).unwrap();
    assert_eq!((rep.beta, rep.chart.label()), (1.0, "beta-omega"));

    fs::write(&cfg, "temperature = 3\n").unwrap();
    assert_eq!(code(&gasgeom(&["eval", "--config", c])), 2);
    fs::write(&cfg, "omega = 1,2\n").unwrap();
    assert_eq!(code(&gasgeom(&["eval", "--config", c])), 2);
}
