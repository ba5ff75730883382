//! QBER against temperature for two exciton detection windows, next to
//! the 11% threshold of the BBM92 protocol.
//!
//!     cargo run --release --example qber_vs_temperature

use qd_entangle::params::PhysicalParams;
use qd_entangle::runner::{run_sweep, workers_from_env, Artifact, RunOptions, SweepAxis, SweepSpec};

const THRESHOLD: f64 = 0.11;

fn main() -> qd_entangle::Result<()> {
    let temps = vec![4.0, 8.0, 12.0, 16.0, 20.0];
    for window in [200.0, 50.0] {
        let base = PhysicalParams { window_first: window, window_second: window, ..Default::default() };
        let spec = SweepSpec {
            axis: SweepAxis::Temperature,
            values: temps.clone(),
            base,
            outputs: vec![Artifact::Qber],
        };
        let rows = run_sweep(&spec, workers_from_env(), &RunOptions::default())?;
        println!("T_p' = {window} ps");
        for r in rows {
            let flag = if r.qber > THRESHOLD { "above threshold" } else { "" };
            println!("  {:>5} K   q = {:.4}  C = {:.4}  {flag}", r.axis_value, r.qber, r.concurrence);
        }
    }
    Ok(())
}
