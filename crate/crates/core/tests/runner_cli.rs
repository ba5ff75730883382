//! Artifact bundles, sweeps and the command-line contract.

use std::process::Command;

use qd_entangle::params::PhysicalParams;
use qd_entangle::runner::{run_single, run_sweep, sweep_csv, Artifact, RunOptions, SweepAxis, SweepSpec};

fn quick() -> PhysicalParams {
    PhysicalParams { window_first: 20.0, window_second: 20.0, ..Default::default() }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qd-entangle"))
}

#[test]
fn identical_configs_give_identical_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let p = quick();
    let opts = RunOptions::default();
    let (a, _) = run_single(&p, &Artifact::ALL, &dir.path().join("a"), &opts).unwrap();
    let (b, _) = run_single(&p, &Artifact::ALL, &dir.path().join("b"), &opts).unwrap();
    assert_eq!(a.file_name(), b.file_name());
    for name in ["tpdm.json", "rates.csv", "trajectory.csv", "stark.csv", "ettocf.csv", "config.echo"] {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    let echo = std::fs::read_to_string(a.join("config.echo")).unwrap();
    assert!(PhysicalParams::from_config_str(&echo).unwrap().approx_eq(&p, 1e-12));
}

#[test]
fn sweep_rows_keep_their_order() {
    let spec = SweepSpec {
        axis: SweepAxis::Temperature,
        values: vec![20.0, 4.0, 12.0],
        base: quick(),
        outputs: vec![Artifact::Concurrence],
    };
    let rows = run_sweep(&spec, 3, &RunOptions::default()).unwrap();
    let order: Vec<f64> = rows.iter().map(|r| r.axis_value).collect();
    assert_eq!(order, spec.values);
    assert!(rows.iter().all(|r| r.error.is_none()));
    assert!(rows[1].b_avg > rows[2].b_avg && rows[2].b_avg > rows[0].b_avg);
    let csv = sweep_csv(spec.axis, &rows);
    assert!(csv.starts_with("axis_value,concurrence,qber,b_avg,validity"));
    assert_eq!(csv.lines().count(), 4);

    let bad = SweepSpec { values: vec![4.0, -1.0], ..spec };
    assert!(run_sweep(&bad, 2, &RunOptions::default()).is_err());
}

#[test]
fn invalid_config_exits_with_two_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", "--g_ueV", "-4", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists());

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "g_ueV = 30.0\nwho_knows = 1\n").unwrap();
    let o = bin().args(["validate", "-c"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn cli_flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "temperature_K = 4.0\n").unwrap();
    let out = dir.path().join("out");
    let o = bin()
        .args(["rates", "-c"])
        .arg(&cfg)
        .args(["--temperature_K=20", "--set", "g_ueV=50", "-o"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bundle = std::fs::read_dir(&out).unwrap().next().unwrap().unwrap().path();
    let echo = std::fs::read_to_string(bundle.join("config.echo")).unwrap();
    let p = PhysicalParams::from_config_str(&echo).unwrap();
    assert_eq!(p.temperature, 20.0);
    assert!((qd_entangle::params::ps_inv_to_uev(p.g) - 50.0).abs() < 1e-9);
    let curve = std::fs::read_to_string(bundle.join("rate_curve.csv")).unwrap();
    assert!(curve.starts_with("delta_meV,gamma_plus_ueV,gamma_minus_ueV,gamma_tp_ueV,temperature_K"));
}

#[test]
fn run_verb_prints_a_summary_and_sweep_reads_workers_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = bin()
        .args(["run", "--Tpprime_ps", "20", "--outputs", "tpdm,stark", "-o"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let line = String::from_utf8_lossy(&o.stdout);
    assert!(line.contains("C = ") && line.contains("q = ") && line.contains("<B> = ") && line.contains("validity"));

    let o = bin()
        .env("QD_ENTANGLE_WORKERS", "2")
        .args(["sweep", "--axis", "g", "--values", "30,70", "--Tpprime_ps", "20", "-o"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("2 points, 0 failed"));
}
