//! Phonon-mediated cavity rates against detuning at 4 K and 20 K.
//!
//!     cargo run --release --example rate_curves

use qd_entangle::params::{mev_to_ps_inv, ps_inv_to_uev, PhysicalParams};
use qd_entangle::phonon::{rate_curve, PhononKernel};

fn main() -> qd_entangle::Result<()> {
    let detunings = [0.25, 0.5, 1.0, 1.1, 1.5, 2.0];
    for temperature in [4.0, 20.0] {
        let p = PhysicalParams { temperature, ..Default::default() };
        let kernel = PhononKernel::build(&p)?;
        println!("T = {temperature} K, <B> = {:.4}", kernel.b_avg);
        println!("  delta (meV)   G+ (ueV)    G- (ueV)    G+/G-");
        for r in rate_curve(&kernel.correlation, p.g, &detunings) {
            println!(
                "  {:>8.2}   {:>9.4}   {:>9.4}   {:>7.2}",
                r.delta_mev,
                ps_inv_to_uev(r.gamma_plus),
                ps_inv_to_uev(r.gamma_minus),
                r.gamma_plus / r.gamma_minus
            );
        }
        let boltzmann = (mev_to_ps_inv(1.1) / qd_entangle::params::thermal_frequency(temperature)).exp();
        println!("  detailed balance at 1.1 meV: {boltzmann:.2}\n");
    }
    Ok(())
}
