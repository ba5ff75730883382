//! Adaptive Dormand–Prince 5(4) integrator for complex linear systems.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-8,
            abs: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub min_step: f64,
    /// Largest normalized local error estimate among accepted steps.
    pub max_error: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrator state that persists across consecutive segments so the step
/// size adapted in one segment carries into the next.
pub struct Dopri5 {
    pub tol: Tolerance,
    pub h: f64,
    pub h_min: f64,
    pub max_steps: usize,
    pub stats: StepStats,
    k: [Vec<C64>; 7],
    tmp: Vec<C64>,
    y_new: Vec<C64>,
}

impl Dopri5 {
    pub fn new(n: usize, tol: Tolerance) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Dopri5 {
            tol,
            h: 0.01,
            h_min: 1e-12,
            max_steps: 10_000_000,
            stats: StepStats {
                min_step: f64::INFINITY,
                ..Default::default()
            },
            k: [z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z.clone(),
            y_new: z,
        }
    }

    /// Advances `y` from `t0` to exactly `t1` under dy/dt = f(t, y).
    ///
    /// `f(t, y, out)` must overwrite `out`.
    pub fn advance<F>(&mut self, f: &mut F, t0: f64, t1: f64, y: &mut [C64]) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(());
        }
        if span < 0.0 {
            return Err(Error::Argument(format!(
                "cannot integrate backwards from {t0} to {t1}"
            )));
        }
        let n = y.len();
        let mut t = t0;
        f(t, y, &mut self.k[0]);
        self.stats.evaluations += 1;
        let mut steps = 0usize;
        while t < t1 {
            let last = t + self.h >= t1 - 1e-12 * t1.abs().max(1.0);
            let h = if last { t1 - t } else { self.h };

            macro_rules! stage {
                ($dst:expr, $c:expr, [$(($ki:expr, $a:expr)),*]) => {{
                    for i in 0..n {
                        let mut acc = C64::new(0.0, 0.0);
                        $( acc += self.k[$ki][i] * $a; )*
                        self.tmp[i] = y[i] + acc * h;
                    }
                    f(t + $c * h, &self.tmp, &mut self.k[$dst]);
                }};
            }
            stage!(1, C2, [(0, A21)]);
            stage!(2, C3, [(0, A31), (1, A32)]);
            stage!(3, C4, [(0, A41), (1, A42), (2, A43)]);
            stage!(4, C5, [(0, A51), (1, A52), (2, A53), (3, A54)]);
            stage!(5, 1.0, [(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
            for i in 0..n {
                self.y_new[i] = y[i]
                    + (self.k[0][i] * B1
                        + self.k[2][i] * B3
                        + self.k[3][i] * B4
                        + self.k[4][i] * B5
                        + self.k[5][i] * B6)
                        * h;
            }
            f(t + h, &self.y_new, &mut self.k[6]);
            self.stats.evaluations += 6;

            let mut err = 0.0f64;
            for i in 0..n {
                let e = (self.k[0][i] * E1
                    + self.k[2][i] * E3
                    + self.k[3][i] * E4
                    + self.k[4][i] * E5
                    + self.k[5][i] * E6
                    + self.k[6][i] * E7)
                    * h;
                let sc = self.tol.abs + self.tol.rel * y[i].norm().max(self.y_new[i].norm());
                let r = e.norm() / sc;
                err = if r.is_nan() || !self.y_new[i].is_finite() { f64::INFINITY } else { err.max(r) };
            }

            if !err.is_finite() {
                err = f64::INFINITY;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if last { t1 } else { t + h };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                self.stats.accepted += 1;
                self.stats.max_error = self.stats.max_error.max(err);
                self.stats.min_step = self.stats.min_step.min(h);
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
            } else {
                self.stats.rejected += 1;
                self.h = h * factor.min(1.0);
                if self.h < self.h_min {
                    return Err(Error::Stiffness { t, h: self.h });
                }
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::Numerical(format!(
                    "exceeded {} steps between t = {t0} and {t1}",
                    self.max_steps
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_and_rotation() {
        let lambda = C64::new(-0.3, 2.0);
        let mut f = |_t: f64, y: &[C64], out: &mut [C64]| out[0] = lambda * y[0];
        let mut y = vec![C64::new(1.0, 0.0)];
        let mut solver = Dopri5::new(1, Tolerance::default());
        solver.advance(&mut f, 0.0, 5.0, &mut y).unwrap();
        let exact = (lambda * 5.0).exp();
        assert!((y[0] - exact).norm() < 1e-8);
        // Continue in a second segment.
        solver.advance(&mut f, 5.0, 7.5, &mut y).unwrap();
        assert!((y[0] - (lambda * 7.5).exp()).norm() < 1e-8);
    }

    #[test]
    fn two_level_rabi_oscillation() {
        // ċ_g = −iΩ/2 c_e, ċ_e = −iΩ/2 c_g  ⇒  |c_e|² = sin²(Ωt/2).
        let omega = 1.3;
        let mut f = |_t: f64, y: &[C64], out: &mut [C64]| {
            let k = C64::new(0.0, -omega / 2.0);
            out[0] = k * y[1];
            out[1] = k * y[0];
        };
        let mut y = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let mut solver = Dopri5::new(2, Tolerance::default());
        let mut t = 0.0;
        for k in 1..=40 {
            let t1 = 0.5 * k as f64;
            solver.advance(&mut f, t, t1, &mut y).unwrap();
            t = t1;
            let pe = y[1].norm_sqr();
            assert!((pe - (omega * t / 2.0).sin().powi(2)).abs() < 1e-7);
        }
    }

    #[test]
    fn backwards_span_is_an_error() {
        let mut f = |_t: f64, _y: &[C64], out: &mut [C64]| out[0] = C64::new(0.0, 0.0);
        let mut y = vec![C64::new(1.0, 0.0)];
        let mut solver = Dopri5::new(1, Tolerance::default());
        assert!(solver.advance(&mut f, 1.0, 0.0, &mut y).is_err());
    }

    #[test]
    fn underflow_reports_stiffness() {
        // Blow-up forces ever smaller steps.
        let mut f = |_t: f64, y: &[C64], out: &mut [C64]| out[0] = y[0] * y[0] * 1e3;
        let mut y = vec![C64::new(1.0, 0.0)];
        let mut solver = Dopri5::new(1, Tolerance::default());
        solver.h_min = 1e-9;
        let r = solver.advance(&mut f, 0.0, 1.0, &mut y);
        assert!(matches!(r, Err(Error::Stiffness { .. }) | Err(Error::Numerical(_))), "{r:?}");
    }
}
