//! Master-equation invariants and closed-form dynamics.

mod common;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use qd_entangle::dynamics::{checkpoint_times, evolve, propagate_from, DensityState};
use qd_entangle::model::{Model, ModelConfig};
use qd_entangle::ode::Tolerance;
use qd_entangle::ops::{DotState, HilbertLayout, Polarization};
use qd_entangle::params::{mev_to_ps_inv, uev_to_ps_inv, PhysicalParams};
use qd_entangle::phonon::PhononKernel;

fn full_model(temperature: f64) -> Model {
    let p = PhysicalParams { temperature, ..Default::default() };
    Model::from_params(&p).unwrap().0
}

#[test]
fn rhs_is_traceless_and_hermitian_on_random_states() {
    let mut rng = common::rng(7);
    for temperature in [4.0, 20.0] {
        let m = full_model(temperature);
        let t_peak = m.params.t_0;
        for _ in 0..20 {
            let rho = common::random_density(m.dim(), &mut rng);
            for t in [t_peak, t_peak - 5.0, m.params.t_gate + 10.0] {
                let d = m.rhs(&rho, t);
                assert!(d.trace().norm() < 1e-10, "T={temperature} t={t}: {}", d.trace());
                let herm = (&d - d.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(herm < 1e-10);
            }
        }
    }
}

#[test]
fn vacuum_rabi_oscillation_matches_closed_form() {
    let g = uev_to_ps_inv(100.0);
    let delta = mev_to_ps_inv(0.05);
    let p = PhysicalParams { g, detuning: delta, ..common::bare_params() };
    let (m, _) = Model::from_params(&p).unwrap();
    let layout = HilbertLayout::new(p.n_max);
    let rho0 = DensityState::basis(layout, DotState::H, 0, 0, 0.0);
    let times: Vec<f64> = (0..=40).map(|k| k as f64).collect();
    let traj = evolve(&m, &rho0, &times, Tolerance { rel: 1e-10, abs: 1e-12 }).unwrap();
    let big = (4.0 * g * g + delta * delta).sqrt();
    for s in &traj.states {
        let expect = 1.0 - 4.0 * g * g / (big * big) * (0.5 * big * s.time).sin().powi(2);
        let got = s.population(layout, DotState::H);
        assert!((got - expect).abs() < 1e-8, "t = {}: {got} vs {expect}", s.time);
        let photon = s.mean_photons(layout, Polarization::H);
        assert!((got + photon - 1.0).abs() < 1e-8);
    }
}

#[test]
fn exciton_radiative_decay() {
    let p = PhysicalParams { gamma_e: uev_to_ps_inv(50.0), ..common::bare_params() };
    let (m, _) = Model::from_params(&p).unwrap();
    let layout = HilbertLayout::new(p.n_max);
    let rho0 = DensityState::basis(layout, DotState::V, 0, 0, 0.0);
    let traj = evolve(&m, &rho0, &[0.0, 10.0, 30.0], Tolerance::default()).unwrap();
    let rate = m
        .rhs(&rho0.matrix, 0.0)
        .diagonal()[layout.index(DotState::V, 0, 0)]
        .re;
    for s in &traj.states {
        let pop = s.population(layout, DotState::V);
        assert!((pop - (rate * s.time).exp()).abs() < 1e-7);
    }
    assert!(rate < 0.0);
}

#[test]
fn post_pulse_semigroup() {
    let m = full_model(4.0);
    let mut rng = common::rng(11);
    let rho = DensityState::new(common::random_density(m.dim(), &mut rng), m.params.t_gate + 1.0);
    let tol = Tolerance { rel: 1e-11, abs: 1e-13 };
    let two = propagate_from(&m, &propagate_from(&m, &rho, 7.0, tol).unwrap(), 13.0, tol).unwrap();
    let one = propagate_from(&m, &rho, 20.0, tol).unwrap();
    let diff = (&two.matrix - &one.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff < 1e-8, "{diff}");
}

#[test]
fn trajectory_trace_and_hermiticity() {
    let m = full_model(20.0);
    let p = &m.params;
    let times = checkpoint_times(p.t_gate, p.t_gate + 100.0, 0.25, 1.0);
    let traj = evolve(&m, &DensityState::ground(m.layout), &times, Tolerance::default()).unwrap();
    assert!(traj.diagnostics.trace_drift < 1e-7, "{}", traj.diagnostics.trace_drift);
    assert!(traj.diagnostics.max_hermiticity_defect < 1e-10);
    // The pulse leaves the cascade populated and the cavities lit.
    let s = traj.state_at(p.t_gate).unwrap();
    assert!(s.population(m.layout, DotState::G) < 0.9);
}

#[test]
fn toggles_reduce_to_the_bare_model_without_coupling() {
    let p = PhysicalParams { alpha_p: 0.0, ..Default::default() };
    let k = PhononKernel::build(&p).unwrap();
    let with = Model::new(&p, &k, ModelConfig::full()).unwrap();
    let q = PhysicalParams { phonons_enabled: false, ..p.clone() };
    let without = Model::new(&q, &PhononKernel::build(&q).unwrap(), ModelConfig::without_phonons()).unwrap();
    let mut rng = common::rng(3);
    let rho: DMatrix<C64> = common::random_density(with.dim(), &mut rng);
    for t in [0.0, p.t_0, p.t_gate + 3.0] {
        let d = &with.rhs(&rho, t) - &without.rhs(&rho, t);
        assert!(d.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
    }
}

fn truncation_gap(base: &PhysicalParams, lo: usize, hi: usize) -> f64 {
    let pops = |n_max: usize| {
        let p = PhysicalParams { n_max, ..base.clone() };
        let (m, _) = Model::from_params(&p).unwrap();
        let times = checkpoint_times(p.t_gate, p.horizon(), 1.0, 5.0);
        let traj = evolve(&m, &DensityState::ground(m.layout), &times, Tolerance::default()).unwrap();
        traj.states
            .iter()
            .map(|s| DotState::ALL.map(|q| s.population(m.layout, q)))
            .collect::<Vec<_>>()
    };
    let (a, b) = (pops(lo), pops(hi));
    a.iter()
        .zip(&b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn truncation_converges_geometrically() {
    let strong = PhysicalParams { window_first: 20.0, window_second: 20.0, ..Default::default() };
    let (g23, g34) = (truncation_gap(&strong, 2, 3), truncation_gap(&strong, 3, 4));
    // At g = 70 ueV the two-photon truncation is good to a few 1e-3 only.
    assert!(g34 < 1e-3 && g34 < 0.2 * g23, "{g23:e} {g34:e}");
    let weak = PhysicalParams { g: uev_to_ps_inv(30.0), ..strong };
    assert!(truncation_gap(&weak, 2, 3) < 1e-3);
}
