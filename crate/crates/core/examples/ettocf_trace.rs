//! Equal-time third-order correlation of the H mode during and after the
//! pulse. Needs three photons per mode, so n_max = 3.
//!
//!     cargo run --release --example ettocf_trace

use qd_entangle::params::PhysicalParams;
use qd_entangle::runner::{simulate, RunOptions};

fn main() -> qd_entangle::Result<()> {
    let mut peaks = Vec::new();
    for temperature in [4.0, 20.0] {
        let p = PhysicalParams { temperature, n_max: 3, window_first: 50.0, window_second: 50.0, ..Default::default() };
        let sim = simulate(&p, &RunOptions::default())?;
        println!("T = {temperature} K");
        for &(t, v) in sim.ettocf.iter().filter(|(t, _)| (t % 5.0).abs() < 1e-9 && *t <= 60.0) {
            println!("  t = {t:>5.1} ps   <a+^3 a^3> = {v:.3e}");
        }
        peaks.push((temperature, sim.ettocf_peak_during_pulse()));
    }
    for (t, v) in peaks {
        println!("peak during the pulse at {t} K: {v:.3e}");
    }
    Ok(())
}
