//! Time evolution of the system density matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{unvectorize, vectorize, Model};
use crate::ode::{Dopri5, StepStats, Tolerance};
use crate::ops::{max_abs, DotState, HilbertLayout, Polarization};

/// Tolerated negative eigenvalue before a positivity warning is logged.
pub const POSITIVITY_WARN: f64 = -1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    pub matrix: DMatrix<C64>,
    pub time: f64,
}

impl DensityState {
    pub fn new(matrix: DMatrix<C64>, time: f64) -> Self {
        DensityState { matrix, time }
    }

    /// `|qd, n_h, n_v⟩⟨qd, n_h, n_v|` at time `t`.
    pub fn basis(layout: HilbertLayout, qd: DotState, n_h: usize, n_v: usize, time: f64) -> Self {
        DensityState::new(layout.basis_projector(qd, n_h, n_v).0, time)
    }

    /// The undriven dot with empty cavities, |G, 0, 0⟩.
    pub fn ground(layout: HilbertLayout) -> Self {
        Self::basis(layout, DotState::G, 0, 0, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn symmetrize(&mut self) {
        self.matrix = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.min()
    }

    pub fn population(&self, layout: HilbertLayout, qd: DotState) -> f64 {
        let f = layout.fock_dim();
        let mut p = 0.0;
        for nh in 0..f {
            for nv in 0..f {
                let i = layout.index(qd, nh, nv);
                p += self.matrix[(i, i)].re;
            }
        }
        p
    }

    pub fn mean_photons(&self, layout: HilbertLayout, pol: Polarization) -> f64 {
        let mut n = 0.0;
        for i in 0..layout.total_dim() {
            let (_, nh, nv) = layout.unpack(i);
            let k = match pol {
                Polarization::H => nh,
                Polarization::V => nv,
            };
            n += k as f64 * self.matrix[(i, i)].re;
        }
        n
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// max |Tr ρ − 1| over the checkpoints.
    pub trace_drift: f64,
    /// Smallest eigenvalue seen at any checkpoint.
    pub min_eigenvalue: f64,
    pub max_hermiticity_defect: f64,
    pub steps: StepStats,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityState>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    /// Index of the checkpoint at time `t` (to within 1e-9 ps).
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let i = self.times.partition_point(|&x| x < t - 1e-9);
        if i < self.times.len() && (self.times[i] - t).abs() <= 1e-9 {
            Ok(i)
        } else {
            Err(Error::Range(format!(
                "t = {t} ps is not a checkpoint of the trajectory [{}, {}]",
                self.times.first().copied().unwrap_or(f64::NAN),
                self.times.last().copied().unwrap_or(f64::NAN)
            )))
        }
    }

    pub fn state_at(&self, t: f64) -> Result<&DensityState> {
        Ok(&self.states[self.index_of(t)?])
    }

    pub fn last(&self) -> &DensityState {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Checkpoint times for a standard run: `pulse_step` spacing up to the gate,
/// `detect_step` spacing from the gate to `end`. The gate is always a
/// checkpoint.
pub fn checkpoint_times(t_gate: f64, end: f64, pulse_step: f64, detect_step: f64) -> Vec<f64> {
    let mut times = Vec::new();
    let n_pulse = (t_gate / pulse_step).ceil() as usize;
    for i in 0..n_pulse {
        let t = i as f64 * pulse_step;
        if t < t_gate - 1e-9 {
            times.push(t);
        }
    }
    let n_detect = ((end - t_gate) / detect_step - 1e-9).ceil().max(0.0) as usize;
    for i in 0..=n_detect {
        times.push((t_gate + i as f64 * detect_step).min(end));
    }
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    times
}

/// Integrates ρ from `rho0` through every time in `times` (which must be
/// strictly increasing and start at `rho0.time`).
pub fn evolve(model: &Model, rho0: &DensityState, times: &[f64], tol: Tolerance) -> Result<Trajectory> {
    if rho0.dim() != model.dim() {
        return Err(Error::Dimension {
            expected: model.dim(),
            got: rho0.dim(),
        });
    }
    if times.is_empty() || (times[0] - rho0.time).abs() > 1e-12 {
        return Err(Error::Argument(
            "checkpoint times must start at the initial state's time".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("checkpoint times must be strictly increasing".into()));
    }
    let d = model.dim();
    let mut y = vectorize(&rho0.matrix);
    let mut solver = Dopri5::new(y.len(), tol);
    let mut rhs = |t: f64, v: &[C64], out: &mut [C64]| model.apply(t, v, out);
    let gate = model.pulse.cutoff;

    let mut states = Vec::with_capacity(times.len());
    let mut diagnostics = Diagnostics {
        min_eigenvalue: f64::INFINITY,
        ..Default::default()
    };
    let mut record = |t: f64, y: &[C64], diag: &mut Diagnostics| {
        let mut s = DensityState::new(unvectorize(y, d), t);
        diag.max_hermiticity_defect = diag.max_hermiticity_defect.max(s.hermiticity_defect());
        s.symmetrize();
        diag.trace_drift = diag.trace_drift.max((s.trace() - 1.0).norm());
        let me = s.min_eigenvalue();
        if me < POSITIVITY_WARN && me < diag.min_eigenvalue {
            log::warn!("density matrix has eigenvalue {me:e} at t = {t} ps");
        }
        diag.min_eigenvalue = diag.min_eigenvalue.min(me);
        states.push(s);
    };
    record(times[0], &y, &mut diagnostics);
    let mut t = times[0];
    for &target in &times[1..] {
        // Stop at the pulse cutoff so no step straddles the discontinuity.
        if t < gate && target > gate {
            solver.advance(&mut rhs, t, gate, &mut y)?;
            t = gate;
        }
        solver.advance(&mut rhs, t, target, &mut y)?;
        t = target;
        record(t, &y, &mut diagnostics);
    }
    diagnostics.steps = solver.stats;
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        diagnostics,
    })
}

/// Advances a single state by `dt`.
pub fn propagate_from(model: &Model, state: &DensityState, dt: f64, tol: Tolerance) -> Result<DensityState> {
    if dt < 0.0 {
        return Err(Error::Argument(format!("negative propagation time {dt}")));
    }
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let traj = evolve(model, state, &[state.time, state.time + dt], tol)?;
    Ok(traj.states.into_iter().last().expect("two checkpoints"))
}

/// Propagates an arbitrary (not necessarily Hermitian or normalized)
/// operator `x0` from `t0` under the model, returning it at each of
/// `samples` (all ≥ `t0`, increasing). Used for regression branches.
pub fn evolve_operator(
    model: &Model,
    x0: &DMatrix<C64>,
    t0: f64,
    samples: &[f64],
    tol: Tolerance,
) -> Result<Vec<DMatrix<C64>>> {
    let d = model.dim();
    if x0.nrows() != d || x0.ncols() != d {
        return Err(Error::Dimension {
            expected: d,
            got: x0.nrows(),
        });
    }
    if samples.first().is_some_and(|&s| s < t0) || samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Range(format!(
            "sample times must be increasing and start at or after t = {t0} ps"
        )));
    }
    let mut y = vectorize(x0);
    let mut solver = Dopri5::new(y.len(), tol);
    let mut rhs = |t: f64, v: &[C64], out: &mut [C64]| model.apply(t, v, out);
    let gate = model.pulse.cutoff;
    let mut t = t0;
    let mut out = Vec::with_capacity(samples.len());
    for &target in samples {
        if t < gate && target > gate {
            solver.advance(&mut rhs, t, gate, &mut y)?;
            t = gate;
        }
        solver.advance(&mut rhs, t, target, &mut y)?;
        t = target;
        out.push(unvectorize(&y, d));
    }
    Ok(out)
}

/// Integrates dy/dt = f(y) over `[0, span]` for a time-independent linear
/// `f`, returning `(y(span), ∫₀^span y dt)`. The integral is carried as
/// extra ODE components so it inherits the integrator's error control.
pub fn integrate_static<F>(f: F, y0: &[C64], span: f64, tol: Tolerance) -> Result<(Vec<C64>, Vec<C64>)>
where
    F: Fn(&[C64], &mut [C64]),
{
    if span < 0.0 {
        return Err(Error::Argument(format!("negative integration span {span}")));
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    y.resize(2 * n, C64::new(0.0, 0.0));
    let mut solver = Dopri5::new(2 * n, tol);
    let mut rhs = |_t: f64, v: &[C64], out: &mut [C64]| {
        let (head, tail) = out.split_at_mut(n);
        f(&v[..n], head);
        tail.copy_from_slice(&v[..n]);
    };
    solver.advance(&mut rhs, 0.0, span, &mut y)?;
    let integral = y.split_off(n);
    Ok((y, integral))
}
