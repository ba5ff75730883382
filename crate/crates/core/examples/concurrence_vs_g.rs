//! Concurrence against cavity coupling at a few temperatures, run as
//! parallel sweeps.
//!
//!     cargo run --release --example concurrence_vs_g

use qd_entangle::params::PhysicalParams;
use qd_entangle::runner::{run_sweep, workers_from_env, Artifact, RunOptions, SweepAxis, SweepSpec};

fn main() -> qd_entangle::Result<()> {
    let g_values = vec![30.0, 50.0, 70.0];
    let temps = [4.0, 20.0];
    print!("g (ueV)");
    for t in temps {
        print!("   C({t} K)");
    }
    println!();
    let mut columns = Vec::new();
    for temperature in temps {
        let spec = SweepSpec {
            axis: SweepAxis::G,
            values: g_values.clone(),
            base: PhysicalParams { temperature, ..Default::default() },
            outputs: vec![Artifact::Concurrence],
        };
        columns.push(run_sweep(&spec, workers_from_env(), &RunOptions::default())?);
    }
    for (i, g) in g_values.iter().enumerate() {
        print!("{g:>7}");
        for col in &columns {
            print!("   {:>7.4}", col[i].concurrence);
        }
        println!();
    }
    Ok(())
}
