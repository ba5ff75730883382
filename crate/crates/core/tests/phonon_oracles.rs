//! Phonon kernel against fixed-order quadrature oracles.

mod common;

use approx::assert_relative_eq;
use common::PhiOracle;
use qd_entangle::params::{mev_to_ps_inv, thermal_frequency, PhysicalParams};
use qd_entangle::phonon::{compute_phi, Branch, Part, PhononKernel, SpectralDensity};

fn at(temperature: f64) -> PhysicalParams {
    PhysicalParams { temperature, ..Default::default() }
}

#[test]
fn phi_zero_matches_oracle_and_decays() {
    for t in [4.0, 20.0] {
        let p = at(t);
        let sd = SpectralDensity::from_params(&p);
        let oracle = PhiOracle::new(&p);
        let phi0 = compute_phi(&sd, t, 0.0).unwrap();
        assert!(phi0.re > 0.0);
        assert!(phi0.im.abs() < 1e-12);
        assert_relative_eq!(phi0.re, oracle.phi(0.0).re, max_relative = 1e-7);
        let phi10 = compute_phi(&sd, t, 10.0).unwrap();
        assert!(phi10.norm() < 0.01 * phi0.norm());
        for tau in [0.3, 1.0, 2.5] {
            let (a, b) = (compute_phi(&sd, t, tau).unwrap(), oracle.phi(tau));
            assert!((a - b).norm() < 1e-8 * phi0.norm(), "tau = {tau}: {a} vs {b}");
            // φ(−τ) = φ(τ)*
            assert!((oracle.phi(-tau) - b.conj()).norm() < 1e-12);
        }
    }
}

#[test]
fn franck_condon_against_oracle() {
    let mut last = 1.0;
    for t in [4.0, 8.0, 16.0, 20.0] {
        let p = at(t);
        let k = PhononKernel::build(&p).unwrap();
        assert_relative_eq!(k.b_avg, PhiOracle::new(&p).b_avg(), max_relative = 1e-8);
        assert!(k.b_avg < last && k.b_avg > 0.0);
        last = k.b_avg;
    }
}

#[test]
fn detailed_balance_against_two_sided_spectrum() {
    for t in [4.0, 20.0] {
        let p = at(t);
        let kernel = PhononKernel::build(&p).unwrap();
        let oracle = PhiOracle::new(&p);
        let beta = 1.0 / thermal_frequency(t);
        for d_mev in [0.5, 1.1, 2.0] {
            let d = mev_to_ps_inv(d_mev);
            let boltzmann = (beta * d).exp();
            let lib = kernel.correlation.halfline_rate(d, Branch::Plus, Part::Re)
                / kernel.correlation.halfline_rate(-d, Branch::Plus, Part::Re);
            let emit = oracle.two_sided_spectrum(d, 20.0);
            let absorb = oracle.two_sided_spectrum(-d, 20.0);
            let ora = emit.re / absorb.re;
            assert!((lib / boltzmann - 1.0).abs() < 0.01, "T={t} D={d_mev}: {lib} vs {boltzmann}");
            assert!((ora / boltzmann - 1.0).abs() < 0.01, "oracle T={t} D={d_mev}: {ora} vs {boltzmann}");
            // The half-line real part is half the two-sided transform.
            assert_relative_eq!(
                2.0 * kernel.correlation.halfline_rate(d, Branch::Plus, Part::Re),
                emit.re,
                max_relative = 1e-4
            );
        }
    }
}

#[test]
fn absorption_grows_with_temperature() {
    let d = mev_to_ps_inv(1.1);
    let cold = PhononKernel::build(&at(4.0)).unwrap();
    let hot = PhononKernel::build(&at(20.0)).unwrap();
    assert!(
        hot.correlation.halfline_rate(-d, Branch::Plus, Part::Re)
            > cold.correlation.halfline_rate(-d, Branch::Plus, Part::Re)
    );
    assert!(hot.rates.gamma_minus_h > cold.rates.gamma_minus_h);
}

#[test]
fn two_photon_kernel_is_smaller_than_one_photon() {
    let k = PhononKernel::build(&at(4.0)).unwrap();
    assert!(k.rates.gamma_tp_h.abs() < k.rates.gamma_plus_h.abs());
    assert!(k.rates.gamma_tp_v.abs() < k.rates.gamma_plus_v.abs());
}

#[test]
fn degenerate_splitting_gives_equal_polarization_rates() {
    let p = PhysicalParams { delta_fss: 0.0, ..Default::default() };
    let r = PhononKernel::build(&p).unwrap().rates;
    assert_eq!(r.gamma_plus_h, r.gamma_plus_v);
    assert_eq!(r.gamma_minus_h, r.gamma_minus_v);
    assert_eq!(r.delta_plus_h, r.delta_plus_v);
}

#[test]
fn rabi_table_against_direct_quadrature() {
    let p = at(4.0);
    let k = PhononKernel::build(&p).unwrap();
    let w = k.b_avg * p.omega_h0;
    let (tr, ti) = k.rabi.lookup(w).unwrap();
    let (dr, di) = k.correlation.rabi_kernels(w);
    assert_relative_eq!(tr, dr, max_relative = 1e-4);
    assert_relative_eq!(ti, di, max_relative = 1e-4);
    let (or, oi) = PhiOracle::new(&p).rabi_kernels(w, 20.0);
    assert_relative_eq!(dr, or, max_relative = 1e-6);
    assert_relative_eq!(di, oi, max_relative = 1e-6);
    assert!(k.rabi.lookup(1.3 * w).is_err());
}

#[test]
fn pulse_to_cavity_scaling_is_exact() {
    let p = at(4.0);
    let r = PhononKernel::build(&p).unwrap().rates;
    for frac in [0.1, 0.5, 1.0] {
        let w = frac * p.omega_h0;
        let expect = (w / (2.0 * p.g)).powi(2);
        assert_relative_eq!(r.gamma_plus_omega(w) / r.gamma_plus_h, expect, max_relative = 1e-14);
        assert_relative_eq!(r.gamma_minus_omega(w) / r.gamma_minus_h, expect, max_relative = 1e-14);
    }
}
