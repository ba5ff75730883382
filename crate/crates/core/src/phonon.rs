//! Phonon bath: spectral density, correlation function φ(τ), the Franck–Condon
//! factor ⟨B⟩ and the prefactor-stripped rate integrals of the polaron master
//! equation.
//!
//! Every phonon-induced rate has the form `prefactor · ⟨B⟩² · ∫₀^∞ dτ f(τ)`
//! where the prefactor is g² (cavity processes) or (Ω_H(t)/2)² (pulse
//! processes). The τ integrals only depend on the bath and on the detunings,
//! so they are computed once per parameter set and stored in a [`RateSet`].

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{thermal_frequency, PhysicalParams};
use crate::quadrature::{integrate, simpson_uniform, QuadOptions};

/// Upper end of the tabulated τ range (ps).
pub const TAU_MAX: f64 = 20.0;
/// τ grid spacing (ps).
pub const TAU_STEP: f64 = 0.005;
/// The ω integral is cut at this multiple of ω_b.
pub const OMEGA_CUT_FACTOR: f64 = 10.0;
/// Relative tolerance of the ω quadrature.
pub const PHI_REL_TOL: f64 = 1e-8;
/// Number of nodes of the Ω′ table for the Rabi-dependent rates.
pub const RABI_NODES: usize = 64;

/// Super-Ohmic LA-phonon spectral density J(ω) = α_p ω³ exp(−ω²/2ω_b²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensity {
    pub alpha_p: f64,
    pub omega_b: f64,
}

impl SpectralDensity {
    pub fn new(alpha_p: f64, omega_b: f64) -> Self {
        SpectralDensity { alpha_p, omega_b }
    }

    pub fn from_params(p: &PhysicalParams) -> Self {
        SpectralDensity::new(p.alpha_p, p.omega_b)
    }

    pub fn eval(&self, omega: f64) -> Result<f64> {
        if omega < 0.0 || omega.is_nan() {
            return Err(Error::Argument(format!(
                "spectral density needs omega >= 0, got {omega}"
            )));
        }
        Ok(self.alpha_p * omega.powi(3) * self.gaussian(omega))
    }

    /// Frequency of the single maximum, √3·ω_b.
    pub fn peak_frequency(&self) -> f64 {
        3f64.sqrt() * self.omega_b
    }

    fn gaussian(&self, omega: f64) -> f64 {
        (-omega * omega / (2.0 * self.omega_b * self.omega_b)).exp()
    }

    /// J(ω)/ω² · coth(ω/2k_BT) written so it stays finite as ω → 0.
    fn thermal_weight(&self, omega: f64, kt: f64) -> f64 {
        let x = omega / (2.0 * kt);
        let w_coth = if x < 1e-8 { 2.0 * kt } else { omega / x.tanh() };
        self.alpha_p * w_coth * self.gaussian(omega)
    }

    /// J(ω)/ω².
    fn bare_weight(&self, omega: f64) -> f64 {
        self.alpha_p * omega * self.gaussian(omega)
    }
}

/// φ(τ) = ∫₀^∞ dω J(ω)/ω² [coth(ω/2k_BT) cos ωτ − i sin ωτ], evaluated by
/// adaptive quadrature on (0, 10 ω_b].
pub fn compute_phi(sd: &SpectralDensity, temperature: f64, tau: f64) -> Result<C64> {
    if !(temperature > 0.0) {
        return Err(Error::Argument(format!(
            "phonon correlation needs T > 0, got {temperature}"
        )));
    }
    if sd.alpha_p == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let kt = thermal_frequency(temperature);
    let cut = OMEGA_CUT_FACTOR * sd.omega_b;
    let opts = QuadOptions {
        rel_tol: PHI_REL_TOL,
        ..Default::default()
    };
    let r = integrate(
        |w| {
            let (s, c) = (w * tau).sin_cos();
            C64::new(sd.thermal_weight(w, kt) * c, -sd.bare_weight(w) * s)
        },
        0.0,
        cut,
        opts,
    )?;
    Ok(r.value)
}

/// Which exponential of the correlation function enters a kernel:
/// `Plus` for e^{φ(τ)} − 1, `Minus` for e^{−φ(τ)} − 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// Tabulated φ(τ) on a uniform grid starting at τ = 0.
#[derive(Debug, Clone)]
pub struct PhononCorrelation {
    pub tau_step: f64,
    pub phi_values: Vec<C64>,
    pub b_avg: f64,
    pub temperature: f64,
}

impl PhononCorrelation {
    pub fn tabulate(sd: &SpectralDensity, temperature: f64) -> Result<Self> {
        Self::tabulate_with(sd, temperature, TAU_MAX, TAU_STEP)
    }

    pub fn tabulate_with(
        sd: &SpectralDensity,
        temperature: f64,
        tau_max: f64,
        tau_step: f64,
    ) -> Result<Self> {
        let n = (tau_max / tau_step).round() as usize + 1;
        let phi_values = (0..n)
            .into_par_iter()
            .map(|i| compute_phi(sd, temperature, i as f64 * tau_step))
            .collect::<Result<Vec<_>>>()?;
        let b_avg = (-phi_values[0].re / 2.0).exp();
        Ok(PhononCorrelation {
            tau_step,
            phi_values,
            b_avg,
            temperature,
        })
    }

    /// A bath with φ ≡ 0 (no phonon coupling).
    pub fn zero(temperature: f64) -> Self {
        PhononCorrelation {
            tau_step: TAU_STEP,
            phi_values: vec![C64::new(0.0, 0.0); (TAU_MAX / TAU_STEP).round() as usize + 1],
            b_avg: 1.0,
            temperature,
        }
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        (0..self.phi_values.len())
            .map(|i| i as f64 * self.tau_step)
            .collect()
    }

    pub fn tau_max(&self) -> f64 {
        (self.phi_values.len() - 1) as f64 * self.tau_step
    }

    pub fn phi0(&self) -> f64 {
        self.phi_values[0].re
    }

    pub fn is_trivial(&self) -> bool {
        self.phi_values.iter().all(|p| p.norm() == 0.0)
    }

    /// ∫₀^{τ_max} dτ (e^{±φ(τ)} − 1) e^{i·delta_eff·τ} by composite Simpson.
    pub fn halfline_integral(&self, delta_eff: f64, branch: Branch) -> C64 {
        let sign = match branch {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        };
        let integrand: Vec<C64> = self
            .phi_values
            .iter()
            .enumerate()
            .map(|(i, phi)| {
                let tau = i as f64 * self.tau_step;
                ((phi * sign).exp() - 1.0) * C64::from_polar(1.0, delta_eff * tau)
            })
            .collect();
        let result = simpson_uniform(&integrand, self.tau_step);
        let tail = integrand.last().map(|v| v.norm()).unwrap_or(0.0) * self.tau_max();
        if tail > 1e-6 * result.norm() && result.norm() > 0.0 {
            log::warn!(
                "rate integral truncated at tau_max = {} ps: tail estimate {tail:e} vs result {:e}",
                self.tau_max(),
                result.norm()
            );
        }
        result
    }

    pub fn halfline_rate(&self, delta_eff: f64, branch: Branch, part: Part) -> f64 {
        let v = self.halfline_integral(delta_eff, branch);
        match part {
            Part::Re => v.re,
            Part::Im => v.im,
        }
    }

    /// Prefactor-stripped kernels of Γ^R_B and Γ^I_B at renormalized Rabi
    /// frequency Ω′: (∫ Re sinh φ·[cos(Ω′τ/√2) − 1], ∫ Re sinh φ·sin(Ω′τ/√2)).
    pub fn rabi_kernels(&self, omega_prime: f64) -> (f64, f64) {
        let w = omega_prime / std::f64::consts::SQRT_2;
        let (mut re, mut im) = (Vec::with_capacity(self.phi_values.len()), Vec::new());
        im.reserve(self.phi_values.len());
        for (i, phi) in self.phi_values.iter().enumerate() {
            let tau = i as f64 * self.tau_step;
            let sh = phi.sinh().re;
            let (s, c) = (w * tau).sin_cos();
            re.push(sh * (c - 1.0));
            im.push(sh * s);
        }
        (
            simpson_uniform(&re, self.tau_step),
            simpson_uniform(&im, self.tau_step),
        )
    }

    /// Polaron Green's functions (G_g, G_u) = ⟨B⟩²(cosh φ − 1, sinh φ) at grid index `i`.
    pub fn greens(&self, i: usize) -> (C64, C64) {
        let phi = self.phi_values[i];
        let b2 = self.b_avg * self.b_avg;
        ((phi.cosh() - 1.0) * b2, phi.sinh() * b2)
    }
}

/// ⟨B⟩ = exp(−φ(0)/2).
pub fn franck_condon(pc: &PhononCorrelation) -> f64 {
    (-pc.phi0() / 2.0).exp()
}

/// Γ^R_B and Γ^I_B kernels tabulated on a uniform Ω′ grid.
#[derive(Debug, Clone)]
pub struct RabiTable {
    pub omega_max: f64,
    pub real_kernel: Vec<f64>,
    pub imag_kernel: Vec<f64>,
}

impl RabiTable {
    pub fn build(pc: &PhononCorrelation, omega_max: f64) -> Self {
        let nodes = RABI_NODES;
        let step = omega_max / (nodes - 1) as f64;
        let (real_kernel, imag_kernel) = (0..nodes)
            .into_par_iter()
            .map(|i| pc.rabi_kernels(i as f64 * step))
            .unzip();
        RabiTable {
            omega_max,
            real_kernel,
            imag_kernel,
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.real_kernel.len()).map(|i| i as f64 * step).collect()
    }

    fn step(&self) -> f64 {
        self.omega_max / (self.real_kernel.len() - 1) as f64
    }

    /// (real, imaginary) kernels at Ω′ by cubic Lagrange interpolation on
    /// the four surrounding nodes. Linear interpolation on 64 nodes leaves
    /// errors above 1e-4 near the pulse peak.
    pub fn lookup(&self, omega_prime: f64) -> Result<(f64, f64)> {
        if omega_prime < 0.0 || omega_prime > self.omega_max * (1.0 + 1e-12) {
            return Err(Error::Range(format!(
                "Rabi frequency {omega_prime} ps^-1 outside table range [0, {}]",
                self.omega_max
            )));
        }
        if self.omega_max == 0.0 {
            return Ok((self.real_kernel[0], self.imag_kernel[0]));
        }
        let n = self.real_kernel.len();
        let x = omega_prime / self.step();
        if n < 4 {
            let i = (x.floor() as usize).min(n - 2);
            let f = x - i as f64;
            let lerp = |v: &[f64]| v[i] * (1.0 - f) + v[i + 1] * f;
            return Ok((lerp(&self.real_kernel), lerp(&self.imag_kernel)));
        }
        let start = (x.floor() as usize).saturating_sub(1).min(n - 4);
        let u = x - start as f64;
        let w = [
            -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0,
            u * (u - 2.0) * (u - 3.0) / 2.0,
            -u * (u - 1.0) * (u - 3.0) / 2.0,
            u * (u - 1.0) * (u - 2.0) / 6.0,
        ];
        let interp = |v: &[f64]| (0..4).map(|k| w[k] * v[start + k]).sum::<f64>();
        Ok((interp(&self.real_kernel), interp(&self.imag_kernel)))
    }
}

/// Rate constants of the polaron master equation.
///
/// Cavity-mediated entries are complete rates (ps⁻¹). Pulse-mediated entries
/// (`k_*`) carry the factor ⟨B⟩² but not (Ω_H(t)/2)², which the model
/// applies at every time step.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RateSet {
    pub gamma_plus_h: f64,
    pub gamma_minus_h: f64,
    pub gamma_plus_v: f64,
    pub gamma_minus_v: f64,
    pub gamma_tp_h: f64,
    pub gamma_tp_v: f64,
    pub delta_plus_h: f64,
    pub delta_minus_h: f64,
    pub delta_plus_v: f64,
    pub delta_minus_v: f64,
    pub delta_minus_ph: f64,
    pub delta_minus_pv: f64,
    /// Γ^±_Ω(t) = (Ω_H(t)/2)²·k_plus/minus_omega.
    pub k_plus_omega: f64,
    pub k_minus_omega: f64,
    /// Γ^TP_Ω(t) = (Ω_H(t)/2)²·k_tp_omega.
    pub k_tp_omega: f64,
    /// Δ^±_Ω(t) = (Ω_H(t)/2)²·delta_pm_omega_kernel.
    pub delta_plus_omega_kernel: f64,
    pub delta_minus_omega_kernel: f64,
    /// Δ^p_Ω(t) = (Ω_H(t)/2)²·delta_p_omega.
    pub delta_p_omega: f64,
    /// ⟨B⟩² (multiplies the tabulated Rabi kernels).
    pub b_avg_sq: f64,
}

impl RateSet {
    pub fn from_correlation(pc: &PhononCorrelation, p: &PhysicalParams) -> Self {
        let b2 = pc.b_avg * pc.b_avg;
        let g2b2 = p.g * p.g * b2;
        let dh = p.delta_h();
        let dv = p.delta_v();

        let plus_h = pc.halfline_integral(dh, Branch::Plus);
        let minus_h = pc.halfline_integral(-dh, Branch::Plus);
        let plus_v = pc.halfline_integral(dv, Branch::Plus);
        let minus_v = pc.halfline_integral(-dv, Branch::Plus);
        let tp_h = pc.halfline_integral(-dh, Branch::Minus);
        let tp_v = pc.halfline_integral(-dv, Branch::Minus);

        RateSet {
            gamma_plus_h: g2b2 * plus_h.re,
            gamma_minus_h: g2b2 * minus_h.re,
            gamma_plus_v: g2b2 * plus_v.re,
            gamma_minus_v: g2b2 * minus_v.re,
            gamma_tp_h: g2b2 * tp_h.re,
            gamma_tp_v: g2b2 * tp_v.re,
            delta_plus_h: g2b2 * plus_h.im,
            delta_minus_h: g2b2 * minus_h.im,
            delta_plus_v: g2b2 * plus_v.im,
            delta_minus_v: g2b2 * minus_v.im,
            delta_minus_ph: g2b2 * tp_h.im,
            delta_minus_pv: g2b2 * tp_v.im,
            k_plus_omega: b2 * plus_h.re,
            k_minus_omega: b2 * minus_h.re,
            k_tp_omega: b2 * tp_h.re,
            delta_plus_omega_kernel: b2 * plus_h.im,
            delta_minus_omega_kernel: b2 * minus_h.im,
            delta_p_omega: b2 * tp_h.im,
            b_avg_sq: b2,
        }
    }

    /// Γ^+_Ω(t) for a given instantaneous Rabi frequency.
    pub fn gamma_plus_omega(&self, omega_h: f64) -> f64 {
        0.25 * omega_h * omega_h * self.k_plus_omega
    }

    pub fn gamma_minus_omega(&self, omega_h: f64) -> f64 {
        0.25 * omega_h * omega_h * self.k_minus_omega
    }

    pub fn gamma_tp_omega(&self, omega_h: f64) -> f64 {
        0.25 * omega_h * omega_h * self.k_tp_omega
    }
}

/// Everything the master equation needs from the phonon bath.
#[derive(Debug, Clone)]
pub struct PhononKernel {
    pub spectral: SpectralDensity,
    pub correlation: PhononCorrelation,
    pub rates: RateSet,
    pub rabi: RabiTable,
    pub b_avg: f64,
    pub temperature: f64,
}

impl PhononKernel {
    /// Tabulates φ and evaluates every rate integral for `p`.
    ///
    /// With phonons disabled the kernel is the zero-coupling one: ⟨B⟩ = 1 and
    /// all rates vanish.
    pub fn build(p: &PhysicalParams) -> Result<Self> {
        let spectral = SpectralDensity::from_params(p);
        let correlation = if p.phonons_enabled && p.alpha_p > 0.0 {
            PhononCorrelation::tabulate(&spectral, p.temperature)?
        } else {
            PhononCorrelation::zero(p.temperature)
        };
        Ok(Self::from_correlation(p, spectral, correlation))
    }

    pub fn from_correlation(
        p: &PhysicalParams,
        spectral: SpectralDensity,
        correlation: PhononCorrelation,
    ) -> Self {
        let b_avg = correlation.b_avg;
        let rates = RateSet::from_correlation(&correlation, p);
        let rabi = RabiTable::build(&correlation, 1.2 * b_avg * p.omega_h0);
        PhononKernel {
            spectral,
            correlation,
            rates,
            rabi,
            b_avg,
            temperature: p.temperature,
        }
    }

    /// (Γ^R_B, Γ^I_B) at the instantaneous bare Rabi frequency Ω_H(t).
    pub fn rabi_dependent_rates(&self, omega_h: f64) -> Result<(f64, f64)> {
        let (kr, ki) = self.rabi.lookup(self.b_avg * omega_h)?;
        let b2 = self.rates.b_avg_sq;
        Ok((
            2.0 * 0.25 * omega_h * omega_h * b2 * kr,
            omega_h * omega_h * b2 * ki,
        ))
    }
}

/// One row of the rate-curve dump.
#[derive(Debug, Clone, Serialize)]
pub struct RateCurvePoint {
    pub delta_mev: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_tp: f64,
    pub temperature_k: f64,
}

/// Cavity rates Γ^±_H and Γ^TP_H (ps⁻¹) as a function of the detuning.
pub fn rate_curve(
    pc: &PhononCorrelation,
    g: f64,
    detunings_mev: &[f64],
) -> Vec<RateCurvePoint> {
    let g2b2 = g * g * pc.b_avg * pc.b_avg;
    detunings_mev
        .par_iter()
        .map(|&d| {
            let w = crate::params::mev_to_ps_inv(d);
            RateCurvePoint {
                delta_mev: d,
                gamma_plus: g2b2 * pc.halfline_rate(w, Branch::Plus, Part::Re),
                gamma_minus: g2b2 * pc.halfline_rate(-w, Branch::Plus, Part::Re),
                gamma_tp: g2b2 * pc.halfline_rate(-w, Branch::Minus, Part::Re),
                temperature_k: pc.temperature,
            }
        })
        .collect()
}
