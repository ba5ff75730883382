//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64 as C64;
use qd_entangle::params::{thermal_frequency, PhysicalParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Composite Gauss–Legendre over [a, b] in `panels` equal pieces.
pub fn composite<F: FnMut(f64) -> f64>(rule: &GaussLegendre, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * h;
            rule.integrate(lo, lo + h, &mut f)
        })
        .sum()
}

/// φ(τ) by fixed-order quadrature, valid for either sign of τ.
pub struct PhiOracle {
    rule: GaussLegendre,
    alpha: f64,
    omega_b: f64,
    kt: f64,
}

impl PhiOracle {
    pub fn new(p: &PhysicalParams) -> Self {
        PhiOracle {
            rule: GaussLegendre::new(40).unwrap(),
            alpha: p.alpha_p,
            omega_b: p.omega_b,
            kt: thermal_frequency(p.temperature),
        }
    }

    pub fn phi(&self, tau: f64) -> C64 {
        let (a, wb, kt) = (self.alpha, self.omega_b, self.kt);
        let weight = |w: f64| a * w * (-w * w / (2.0 * wb * wb)).exp();
        let cut = 10.0 * wb;
        let re = composite(&self.rule, 0.0, cut, 40, |w| {
            weight(w) / (w / (2.0 * kt)).tanh() * (w * tau).cos()
        });
        let im = composite(&self.rule, 0.0, cut, 40, |w| -weight(w) * (w * tau).sin());
        C64::new(re, im)
    }

    pub fn b_avg(&self) -> f64 {
        (-self.phi(0.0).re / 2.0).exp()
    }

    /// ∫_{−τm}^{τm} (e^{φ(τ)} − 1) e^{iΔτ} dτ.
    pub fn two_sided_spectrum(&self, delta: f64, tau_max: f64) -> C64 {
        let rule = GaussLegendre::new(20).unwrap();
        let h = 2.0 * tau_max / 400.0;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..400 {
            let lo = -tau_max + k as f64 * h;
            let (x, w) = nodes(&rule, lo, lo + h);
            for (t, wt) in x.iter().zip(w) {
                acc += (self.phi(*t).exp() - 1.0) * C64::from_polar(1.0, delta * t) * wt;
            }
        }
        acc
    }

    /// Γ^R_B and Γ^I_B kernels at Ω′ by direct quadrature on [0, τm].
    pub fn rabi_kernels(&self, omega_prime: f64, tau_max: f64) -> (f64, f64) {
        let rule = GaussLegendre::new(20).unwrap();
        let w = omega_prime / std::f64::consts::SQRT_2;
        let h = tau_max / 200.0;
        let (mut re, mut im) = (0.0, 0.0);
        for k in 0..200 {
            let lo = k as f64 * h;
            let (x, wt) = nodes(&rule, lo, lo + h);
            for (t, q) in x.iter().zip(wt) {
                let sh = self.phi(*t).sinh().re;
                re += q * sh * ((w * t).cos() - 1.0);
                im += q * sh * (w * t).sin();
            }
        }
        (re, im)
    }
}

fn nodes(rule: &GaussLegendre, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    rule.iter().map(|&(x, w)| (c + r * x, r * w)).unzip()
}

pub fn random_density(d: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let a = DMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &a * a.adjoint();
    let tr = m.trace();
    m / tr
}

pub fn random_density4(rng: &mut impl Rng) -> Matrix4<C64> {
    let d = random_density(4, rng);
    Matrix4::from_fn(|i, j| d[(i, j)])
}

/// Random 2×2 unitary [[a, b], [−e^{iφ}b*, e^{iφ}a*]] with |a|² + |b|² = 1.
pub fn random_unitary2(rng: &mut impl Rng) -> nalgebra::Matrix2<C64> {
    let th = rng.gen_range(0.0..std::f64::consts::PI);
    let (x, y, phi) = (rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3));
    let a = C64::from_polar(th.cos(), x);
    let b = C64::from_polar(th.sin(), y);
    let e = C64::from_polar(1.0, phi);
    nalgebra::Matrix2::new(a, b, -e * b.conj(), e * a.conj())
}

/// Params with every coupling, decay and drive switched off.
pub fn bare_params() -> PhysicalParams {
    PhysicalParams {
        phonons_enabled: false,
        delta_fss: 0.0,
        g: 0.0,
        kappa: 0.0,
        gamma_b: 0.0,
        gamma_e: 0.0,
        gamma_b_deph: 0.0,
        gamma_e_deph: 0.0,
        omega_h0: 0.0,
        ..Default::default()
    }
}
