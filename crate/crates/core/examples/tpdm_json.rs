//! Two-photon density matrix at 4 K and 20 K, printed and serialized the
//! way `run --outputs tpdm` writes it.
//!
//!     cargo run --release --example tpdm_json

use qd_entangle::correlations::{TpdmJson, TwoPhotonDM, BASIS_LABELS};
use qd_entangle::params::PhysicalParams;
use qd_entangle::runner::{simulate, tpdm_json, RunOptions};

fn main() -> qd_entangle::Result<()> {
    for temperature in [4.0, 20.0] {
        let p = PhysicalParams { temperature, ..Default::default() };
        let sim = simulate(&p, &RunOptions::default())?;
        println!("T = {temperature} K, |gamma| = {:.4}", sim.tpdm.gamma().norm());
        println!("       {}", BASIS_LABELS.map(|l| format!("{l:>16}")).join(""));
        for (i, label) in BASIS_LABELS.iter().enumerate() {
            let row: String = (0..4)
                .map(|j| {
                    let z = sim.tpdm.matrix[(i, j)];
                    format!("{:>8.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            println!("  {label}   {row}");
        }
        let text = tpdm_json(&sim.tpdm);
        let back = TwoPhotonDM::from_json(&serde_json::from_str::<TpdmJson>(&text)?)?;
        assert_eq!(back.matrix, sim.tpdm.matrix);
    }
    Ok(())
}
