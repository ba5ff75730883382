//! Two-time photon correlators and the two-photon polarization density matrix.
//!
//! The element ⟨μν|ρ^TP|ξζ⟩ is the time-integrated correlator
//! ⟨a†_μ(t) a†_ν(t+t′) a_ζ(t+t′) a_ξ(t)⟩ over the detection windows, normalized
//! to unit trace. Two routes are provided:
//!
//! * [`correlator_grid`] + [`build_tpdm`]: the textbook regression recipe,
//!   sampled on uniform (t, t′) grids and integrated with the trapezoidal rule;
//! * [`build_tpdm_separable`]: uses that the generator is constant after the
//!   gate, so both integrals factor into ρ̄ = ∫ρ dt and the Heisenberg-picture
//!   Ō = ∫O(t′) dt′, each obtained to integrator accuracy.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_operator, integrate_static, DensityState, Trajectory};
use crate::error::{Error, Result};
use crate::model::{unvectorize, vectorize, Model};
use crate::ode::Tolerance;
use crate::ops::{trace_of_product, ElementaryOps, Polarization};
use crate::quadrature::trapezoid_uniform;

pub const BASIS_LABELS: [&str; 4] = ["HH", "HV", "VH", "VV"];

/// Raw diagonals below this are treated as "no photons detected".
const DEGENERATE_WEIGHT: f64 = 1e-14;

fn pol_index(p: Polarization) -> usize {
    match p {
        Polarization::H => 0,
        Polarization::V => 1,
    }
}

/// Polarization labels (μ, ν, ζ, ξ) of ⟨a†_μ(t) a†_ν(t+t′) a_ζ(t+t′) a_ξ(t)⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Channel {
    pub mu: Polarization,
    pub nu: Polarization,
    pub zeta: Polarization,
    pub xi: Polarization,
}

impl Channel {
    pub fn new(mu: Polarization, nu: Polarization, zeta: Polarization, xi: Polarization) -> Self {
        Channel { mu, nu, zeta, xi }
    }

    /// All sixteen channels, row-major over the ρ^TP matrix.
    pub fn all() -> Vec<Channel> {
        let mut v = Vec::with_capacity(16);
        for mu in Polarization::BOTH {
            for nu in Polarization::BOTH {
                for xi in Polarization::BOTH {
                    for zeta in Polarization::BOTH {
                        v.push(Channel { mu, nu, zeta, xi });
                    }
                }
            }
        }
        v
    }

    /// Row |μν⟩ of ρ^TP.
    pub fn row(&self) -> usize {
        2 * pol_index(self.mu) + pol_index(self.nu)
    }

    /// Column ⟨ξζ| of ρ^TP.
    pub fn col(&self) -> usize {
        2 * pol_index(self.xi) + pol_index(self.zeta)
    }

    pub fn label(&self) -> String {
        format!(
            "{}{}{}{}",
            self.mu.label(),
            self.nu.label(),
            self.zeta.label(),
            self.xi.label()
        )
    }
}

/// ⟨a†_μ(t) a†_ν(t+t′) a_ζ(t+t′) a_ξ(t)⟩ by the regression recipe: the
/// sandwiched state a_ξ ρ(t) a†_μ is propagated for `tprime` under the same
/// generator (time dependent if `t` falls inside the pulse) and a†_ν a_ζ is
/// measured on it.
pub fn two_time_correlator(
    model: &Model,
    trajectory: &Trajectory,
    channel: Channel,
    t: f64,
    tprime: f64,
    tol: Tolerance,
) -> Result<C64> {
    let rho = trajectory.state_at(t)?;
    if tprime < 0.0 {
        return Err(Error::Range(format!("negative delay t' = {tprime} ps")));
    }
    let ops = &model.ops;
    let sandwiched = sandwich(ops, &rho.matrix, channel.xi, channel.mu);
    let x = evolve_operator(model, &sandwiched, t, &[t + tprime], tol)?;
    let o = detector(ops, channel.nu, channel.zeta);
    Ok(trace_of_product(&o, &x[0]))
}

/// a_ξ ρ a†_μ
fn sandwich(ops: &ElementaryOps, rho: &DMatrix<C64>, xi: Polarization, mu: Polarization) -> DMatrix<C64> {
    ops.mode(xi).matrix() * rho * ops.mode(mu).dagger().matrix()
}

/// a†_ν a_ζ
fn detector(ops: &ElementaryOps, nu: Polarization, zeta: Polarization) -> DMatrix<C64> {
    ops.mode(nu).dagger().matrix() * ops.mode(zeta).matrix()
}

/// `len/step` rounded to whole intervals, then spaced exactly uniformly.
pub fn uniform_grid(start: f64, len: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || len < 0.0 {
        return Err(Error::Argument(format!("bad grid: length {len}, step {step}")));
    }
    let n = ((len / step).round() as usize).max(1);
    let h = len / n as f64;
    Ok((0..=n).map(|i| start + i as f64 * h).collect())
}

#[derive(Debug, Clone)]
pub struct CorrelatorGrid {
    /// First-photon times (ps), uniform over [t_gate, t_gate + T_p].
    pub t_grid: Vec<f64>,
    /// Delays (ps), uniform over [0, T_p′].
    pub tprime_grid: Vec<f64>,
    /// Per channel, a `t_grid.len() × tprime_grid.len()` array.
    pub values: BTreeMap<Channel, DMatrix<C64>>,
}

impl CorrelatorGrid {
    pub fn t_step(&self) -> f64 {
        step_of(&self.t_grid)
    }

    pub fn tprime_step(&self) -> f64 {
        step_of(&self.tprime_grid)
    }

    fn check(&self) -> Result<()> {
        for g in [&self.t_grid, &self.tprime_grid] {
            if g.len() < 2 {
                return Err(Error::Argument("correlator grids need at least two points".into()));
            }
            let h = step_of(g);
            if g.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
                return Err(Error::Argument("correlator grid is not uniform".into()));
            }
        }
        for v in self.values.values() {
            if v.nrows() != self.t_grid.len() || v.ncols() != self.tprime_grid.len() {
                return Err(Error::Dimension {
                    expected: self.t_grid.len() * self.tprime_grid.len(),
                    got: v.len(),
                });
            }
        }
        Ok(())
    }
}

fn step_of(g: &[f64]) -> f64 {
    if g.len() < 2 {
        0.0
    } else {
        (g[g.len() - 1] - g[0]) / (g.len() - 1) as f64
    }
}

/// Samples every channel on the (t, t′) grid. Each (t, ξ, μ) regression
/// branch is independent and runs in parallel; the four (ν, ζ) detectors are
/// read off the same branch.
pub fn correlator_grid(
    model: &Model,
    trajectory: &Trajectory,
    t_grid: &[f64],
    tprime_grid: &[f64],
    tol: Tolerance,
) -> Result<CorrelatorGrid> {
    let ops = &model.ops;
    let mut tasks = Vec::new();
    for (i, &t) in t_grid.iter().enumerate() {
        for mu in Polarization::BOTH {
            for xi in Polarization::BOTH {
                tasks.push((i, t, mu, xi));
            }
        }
    }
    let detectors: Vec<(Polarization, Polarization, DMatrix<C64>)> = Polarization::BOTH
        .iter()
        .flat_map(|&nu| Polarization::BOTH.map(|zeta| (nu, zeta, detector(ops, nu, zeta))))
        .collect();
    let results: Vec<Result<(usize, Polarization, Polarization, Vec<Vec<C64>>)>> = tasks
        .par_iter()
        .map(|&(i, t, mu, xi)| {
            let rho = trajectory.state_at(t)?;
            let x0 = sandwich(ops, &rho.matrix, xi, mu);
            let samples: Vec<f64> = tprime_grid.iter().map(|tp| t + tp).collect();
            let xs = evolve_operator(model, &x0, t, &samples, tol)?;
            let per_detector = detectors
                .iter()
                .map(|(_, _, o)| xs.iter().map(|x| trace_of_product(o, x)).collect())
                .collect();
            Ok((i, mu, xi, per_detector))
        })
        .collect();

    let mut values: BTreeMap<Channel, DMatrix<C64>> = Channel::all()
        .into_iter()
        .map(|c| (c, DMatrix::zeros(t_grid.len(), tprime_grid.len())))
        .collect();
    for r in results {
        let (i, mu, xi, per_detector) = r.map_err(|e| e.in_module("correlations"))?;
        for ((nu, zeta, _), series) in detectors.iter().zip(per_detector) {
            let m = values
                .get_mut(&Channel::new(mu, *nu, *zeta, xi))
                .expect("all channels present");
            for (j, v) in series.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
    }
    let grid = CorrelatorGrid {
        t_grid: t_grid.to_vec(),
        tprime_grid: tprime_grid.to_vec(),
        values,
    };
    grid.check()?;
    Ok(grid)
}

/// Detection-window metadata carried alongside ρ^TP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t_gate_ps: f64,
    pub t_p_ps: f64,
    pub t_p_prime_ps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonDM {
    /// Basis order HH, HV, VH, VV.
    pub matrix: Matrix4<C64>,
    /// N such that the normalized trace is one.
    pub norm_constant: f64,
    pub raw_diagonals: [f64; 4],
    /// ‖M − M†‖_max / max|M| of the raw integrated matrix.
    pub raw_hermiticity_defect: f64,
    pub window: Option<Window>,
}

impl TwoPhotonDM {
    /// Normalizes and Hermitizes a raw integrated correlator matrix.
    pub fn from_raw(raw: Matrix4<C64>, window: Option<Window>) -> Result<Self> {
        let raw_diagonals = [raw[(0, 0)].re, raw[(1, 1)].re, raw[(2, 2)].re, raw[(3, 3)].re];
        let total: f64 = raw_diagonals.iter().sum();
        if !(total.abs() > DEGENERATE_WEIGHT) || !total.is_finite() {
            return Err(Error::DegenerateNormalization(total));
        }
        let scale = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let defect = (raw - raw.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
        if defect > 1e-6 {
            log::warn!("raw two-photon matrix is not Hermitian: relative defect {defect:e}");
        }
        let n = 1.0 / total;
        let m = (raw + raw.adjoint()) * C64::new(0.5 * n, 0.0);
        let tpdm = TwoPhotonDM {
            matrix: m,
            norm_constant: n,
            raw_diagonals,
            raw_hermiticity_defect: defect,
            window,
        };
        let min_eig = tpdm.eigenvalues()[0];
        if min_eig < -1e-6 {
            log::warn!("two-photon density matrix has eigenvalue {min_eig:e}");
        }
        Ok(tpdm)
    }

    /// Wraps an already normalized two-qubit density matrix.
    pub fn from_density(m: Matrix4<C64>) -> Result<Self> {
        let tr = m.trace();
        if (tr - 1.0).norm() > 1e-8 {
            return Err(Error::Validation {
                field: "tpdm",
                msg: format!("trace {tr} is not one"),
            });
        }
        let defect = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > 1e-8 {
            return Err(Error::Validation {
                field: "tpdm",
                msg: format!("not Hermitian (defect {defect:e})"),
            });
        }
        Ok(TwoPhotonDM {
            matrix: m,
            norm_constant: 1.0,
            raw_diagonals: [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re],
            raw_hermiticity_defect: defect,
            window: None,
        })
    }

    /// γ = ⟨HH|ρ|VV⟩.
    pub fn gamma(&self) -> C64 {
        self.matrix[(0, 3)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let e = self.matrix.symmetric_eigenvalues();
        let mut v = [e[0], e[1], e[2], e[3]];
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn to_json(&self) -> TpdmJson {
        TpdmJson {
            basis: BASIS_LABELS.map(String::from).to_vec(),
            real: (0..4).map(|i| (0..4).map(|j| self.matrix[(i, j)].re).collect()).collect(),
            imag: (0..4).map(|i| (0..4).map(|j| self.matrix[(i, j)].im).collect()).collect(),
            norm_constant: self.norm_constant,
            raw_diagonals: self.raw_diagonals.to_vec(),
            window: self.window,
        }
    }

    pub fn from_json(j: &TpdmJson) -> Result<Self> {
        if j.real.len() != 4 || j.imag.len() != 4 || j.real.iter().chain(&j.imag).any(|r| r.len() != 4) {
            return Err(Error::Dimension {
                expected: 16,
                got: j.real.iter().map(Vec::len).sum(),
            });
        }
        let m = Matrix4::from_fn(|i, k| C64::new(j.real[i][k], j.imag[i][k]));
        let mut d = TwoPhotonDM::from_density(m)?;
        d.norm_constant = j.norm_constant;
        if j.raw_diagonals.len() == 4 {
            d.raw_diagonals.copy_from_slice(&j.raw_diagonals);
        }
        d.window = j.window;
        Ok(d)
    }
}

/// On-disk layout of a two-photon density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpdmJson {
    pub basis: Vec<String>,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
    pub norm_constant: f64,
    pub raw_diagonals: Vec<f64>,
    pub window: Option<Window>,
}

/// Trapezoidal double integral of every channel, then normalization.
pub fn build_tpdm(grid: &CorrelatorGrid) -> Result<TwoPhotonDM> {
    grid.check()?;
    if grid.values.len() != 16 {
        return Err(Error::Argument(format!(
            "expected 16 channels, got {}",
            grid.values.len()
        )));
    }
    let (ht, htp) = (grid.t_step(), grid.tprime_step());
    let mut raw = Matrix4::zeros();
    for (ch, v) in &grid.values {
        let inner: Vec<C64> = (0..v.nrows())
            .map(|i| {
                let row: Vec<C64> = v.row(i).iter().copied().collect();
                trapezoid_uniform(&row, htp)
            })
            .collect();
        raw[(ch.row(), ch.col())] = trapezoid_uniform(&inner, ht);
    }
    let window = Window {
        t_gate_ps: grid.t_grid[0],
        t_p_ps: grid.t_grid[grid.t_grid.len() - 1] - grid.t_grid[0],
        t_p_prime_ps: grid.tprime_grid[grid.tprime_grid.len() - 1] - grid.tprime_grid[0],
    };
    TwoPhotonDM::from_raw(raw, Some(window))
}

/// ρ^TP from the state at the gate, using that the generator is constant
/// afterwards:
/// element = Tr[a†_μ Ō_νζ a_ξ ρ̄] with ρ̄ = ∫ρ(t)dt over [t_gate, t_gate+T_p]
/// and Ō_νζ = ∫ e^{L†t′}(a†_ν a_ζ) dt′ over [0, T_p′].
pub fn build_tpdm_separable(model: &Model, rho_gate: &DensityState, tol: Tolerance) -> Result<TwoPhotonDM> {
    let p = &model.params;
    if !model.is_static_after(rho_gate.time) {
        return Err(Error::Range(format!(
            "state at t = {} ps precedes the gate at {} ps",
            rho_gate.time, model.pulse.cutoff
        )));
    }
    let d = model.dim();
    let ops = &model.ops;
    let adjoint = model.static_transpose();
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);

    // Job 0 integrates ρ; jobs 1..=4 integrate the Heisenberg detectors.
    let pairs: Vec<(Polarization, Polarization)> = Polarization::BOTH
        .iter()
        .flat_map(|&nu| Polarization::BOTH.map(|zeta| (nu, zeta)))
        .collect();
    let jobs: Vec<Option<(Polarization, Polarization)>> =
        std::iter::once(None).chain(pairs.iter().copied().map(Some)).collect();
    let integrals: Vec<Result<DMatrix<C64>>> = jobs
        .par_iter()
        .map(|job| match job {
            None => {
                let (_, int) = integrate_static(
                    |v, out| model.apply_static(v, out),
                    &vectorize(&rho_gate.matrix),
                    p.window_first,
                    tol,
                )?;
                Ok(unvectorize(&int, d))
            }
            Some((nu, zeta)) => {
                let o = detector(ops, *nu, *zeta);
                let (_, int) = integrate_static(
                    |v, out| {
                        out.fill(zero);
                        adjoint.apply_add(one, v, out)
                    },
                    &vectorize(&o.transpose()),
                    p.window_second,
                    tol,
                )?;
                Ok(unvectorize(&int, d).transpose())
            }
        })
        .collect();
    let mut integrals = integrals
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_module("correlations"))?;
    let rho_bar = integrals.remove(0);

    let mut raw = Matrix4::zeros();
    for ((nu, zeta), o_bar) in pairs.iter().zip(&integrals) {
        for mu in Polarization::BOTH {
            for xi in Polarization::BOTH {
                let ch = Channel::new(mu, *nu, *zeta, xi);
                let left = ops.mode(mu).dagger().matrix() * o_bar * ops.mode(xi).matrix();
                raw[(ch.row(), ch.col())] = trace_of_product(&left, &rho_bar);
            }
        }
    }
    TwoPhotonDM::from_raw(
        raw,
        Some(Window {
            t_gate_ps: rho_gate.time,
            t_p_ps: p.window_first,
            t_p_prime_ps: p.window_second,
        }),
    )
}

/// Equal-time third-order correlation ⟨a†³a³⟩ of one mode.
pub fn ettocf(ops: &ElementaryOps, state: &DensityState, pol: Polarization) -> Result<f64> {
    if ops.layout.n_max < 3 {
        log::warn!(
            "n_max = {} truncates every three-photon state; the third-order correlation is identically zero",
            ops.layout.n_max
        );
    }
    let v = ops.factorial_moment(pol, 3).expectation_matrix(&state.matrix)?;
    if v.im.abs() > 1e-10 * v.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("third-order correlation is not real: {v}")));
    }
    Ok(v.re)
}

/// ⟨a_H†³a_H³⟩ at every checkpoint of a trajectory.
pub fn ettocf_series(ops: &ElementaryOps, trajectory: &Trajectory) -> Result<Vec<(f64, f64)>> {
    trajectory
        .states
        .iter()
        .map(|s| Ok((s.time, ettocf(ops, s, Polarization::H)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{checkpoint_times, evolve};
    use crate::ops::{DotState, HilbertLayout};
    use crate::params::PhysicalParams;

    #[test]
    fn channel_indexing_covers_the_matrix() {
        let mut seen = [[false; 4]; 4];
        for c in Channel::all() {
            assert!(!seen[c.row()][c.col()]);
            seen[c.row()][c.col()] = true;
        }
        assert!(seen.iter().flatten().all(|&b| b));
        let c = Channel::new(Polarization::H, Polarization::H, Polarization::V, Polarization::V);
        assert_eq!((c.row(), c.col()), (0, 3));
    }

    #[test]
    fn uniform_grid_endpoints() {
        let g = uniform_grid(39.0, 200.0, 1.0).unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 39.0);
        assert!((g[200] - 239.0).abs() < 1e-12);
        assert!(uniform_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn ettocf_fock_states() {
        let layout = HilbertLayout::new(3);
        let ops = ElementaryOps::build(layout);
        let vac = DensityState::ground(layout);
        assert_eq!(ettocf(&ops, &vac, Polarization::H).unwrap(), 0.0);
        let three = DensityState::basis(layout, DotState::G, 3, 0, 0.0);
        assert!((ettocf(&ops, &three, Polarization::H).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_normalization_is_an_error() {
        assert!(matches!(
            TwoPhotonDM::from_raw(Matrix4::zeros(), None),
            Err(Error::DegenerateNormalization(_))
        ));
    }

    #[test]
    fn vacuum_without_drive_has_zero_correlators() {
        let p = PhysicalParams {
            omega_h0: 0.0,
            phonons_enabled: false,
            window_first: 4.0,
            window_second: 4.0,
            ..Default::default()
        };
        let (model, _) = Model::from_params(&p).unwrap();
        let times = checkpoint_times(p.t_gate, p.t_gate + 4.0, 1.0, 1.0);
        let traj = evolve(&model, &DensityState::ground(model.layout), &times, Tolerance::default()).unwrap();
        for c in Channel::all() {
            let v = two_time_correlator(&model, &traj, c, p.t_gate, 2.0, Tolerance::default()).unwrap();
            assert_eq!(v, C64::new(0.0, 0.0));
        }
        assert!(two_time_correlator(&model, &traj, Channel::all()[0], 1e4, 0.0, Tolerance::default()).is_err());
        let rho_gate = traj.state_at(p.t_gate).unwrap();
        assert!(matches!(
            build_tpdm_separable(&model, rho_gate, Tolerance::default()),
            Err(Error::DegenerateNormalization(_))
        ));
    }

    #[test]
    fn zero_delay_reduces_to_same_time_moment() {
        let layout = HilbertLayout::new(2);
        let p = PhysicalParams {
            phonons_enabled: false,
            ..Default::default()
        };
        let (model, _) = Model::from_params(&p).unwrap();
        // A state with two H photons.
        let rho = DensityState::basis(layout, DotState::G, 2, 0, p.t_gate);
        let traj = Trajectory {
            times: vec![p.t_gate],
            states: vec![rho.clone()],
            diagnostics: Default::default(),
        };
        let h = Polarization::H;
        let g2 = two_time_correlator(&model, &traj, Channel::new(h, h, h, h), p.t_gate, 0.0, Tolerance::default())
            .unwrap();
        let direct = model.ops.factorial_moment(h, 2).expectation_matrix(&rho.matrix).unwrap();
        assert!((g2 - direct).norm() < 1e-14);
        assert!((g2.re - 2.0).abs() < 1e-14);
    }
}
