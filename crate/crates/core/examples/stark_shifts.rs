//! Cavity-induced ac-Stark shifts of the two exciton levels against g.
//!
//!     cargo run --release --example stark_shifts

use qd_entangle::params::{uev_to_ps_inv, PhysicalParams};
use qd_entangle::runner::{simulate, RunOptions};

fn main() -> qd_entangle::Result<()> {
    println!("g (ueV)   n_H peak   D_HH (ueV)  D_VV (ueV)  |D_HH - D_VV| (ueV)");
    for g in [30.0, 50.0, 70.0] {
        let p = PhysicalParams { g: uev_to_ps_inv(g), ..Default::default() };
        let sim = simulate(&p, &RunOptions::default())?;
        let layout = qd_entangle::ops::HilbertLayout::new(p.n_max);
        let n_h = sim
            .trajectory
            .states
            .iter()
            .map(|s| s.mean_photons(layout, qd_entangle::ops::Polarization::H))
            .fold(0.0, f64::max);
        let s = sim.stark;
        println!(
            "{g:>7}   {n_h:>8.4}   {:>10.4}  {:>10.4}  {:>10.4}",
            s.delta_hh * 1e3,
            s.delta_vv * 1e3,
            s.splitting * 1e3
        );
    }
    Ok(())
}
