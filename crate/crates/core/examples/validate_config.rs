//! Config parsing, overrides and the polaron validity check, without any
//! dynamics.
//!
//!     cargo run --release --example validate_config

use qd_entangle::params::{ConfigFile, PhysicalParams};
use qd_entangle::phonon::PhononKernel;

fn main() -> qd_entangle::Result<()> {
    let text = "temperature_K = 20.0\ng_ueV = 50.0\nTpprime_ps = 50.0\n";
    let mut cfg = ConfigFile::parse(text)?;
    cfg.set("omega_H0_meV", "0.5")?;
    let p = cfg.to_params()?;
    println!("{}", p.to_config_string());

    for temperature in [4.0, 20.0] {
        for omega in [0.3, 0.8] {
            let mut c = cfg.clone();
            c.temperature_K = Some(temperature);
            c.omega_H0_meV = Some(omega);
            let p = c.to_params()?;
            let kernel = PhononKernel::build(&p)?;
            let v = p.check_polaron_validity(kernel.b_avg)?;
            println!(
                "T = {temperature:>4} K  Omega_H0 = {omega} meV  value = {:.4}  {}",
                v.value,
                if v.pass { "ok" } else { "outside the weak-coupling regime" }
            );
        }
    }

    for bad in ["g_ueV = -1.0", "detuning_meV = 0.001\ndelta_fss_ueV = 20.0", "n_max = 0", "colour = 3"] {
        match PhysicalParams::from_config_str(bad) {
            Ok(_) => println!("accepted: {bad:?}"),
            Err(e) => println!("rejected: {e}"),
        }
    }
    Ok(())
}
