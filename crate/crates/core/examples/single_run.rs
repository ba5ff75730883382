//! One full simulation at the default parameters (4 K, g = 70 ueV),
//! with the artifacts written to a temporary directory.
//!
//!     cargo run --release --example single_run

use qd_entangle::params::PhysicalParams;
use qd_entangle::runner::{run_single, Artifact, RunOptions};

fn main() -> qd_entangle::Result<()> {
    let p = PhysicalParams::default();
    let out = std::env::temp_dir().join("qd-entangle-example");
    let (dir, sim) = run_single(&p, &Artifact::ALL, &out, &RunOptions::default())?;
    println!("{}", sim.summary_line());
    println!(
        "trace drift {:.1e}, min eigenvalue {:.2e}, {:.1} s",
        sim.trajectory.diagnostics.trace_drift,
        sim.trajectory.diagnostics.min_eigenvalue,
        sim.runtime_s
    );
    for entry in std::fs::read_dir(&dir)? {
        println!("  {}", entry?.path().display());
    }
    Ok(())
}
