//! Entanglement and key-distribution figures of merit, plus cavity-induced
//! ac-Stark shifts.

use nalgebra::{Matrix4, Schur, Vector4};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::correlations::TwoPhotonDM;
use crate::error::{Error, Result};
use crate::params::PhysicalParams;

/// Eigenvalues of ρ A ρ* A below this are a genuine failure, not round-off.
pub const EIGEN_VALIDITY: f64 = -1e-6;
const EIGEN_CLIP: f64 = -1e-9;
const IMAG_WARN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    /// Eigenvalues of M = ρ A ρ* A, descending, negatives clipped to zero.
    pub eigenvalues: [f64; 4],
    pub gamma_coherence: C64,
    /// γ ≠ 0
    pub peres_entangled: bool,
}

fn flip() -> Matrix4<C64> {
    let mut a = Matrix4::zeros();
    a[(0, 3)] = C64::new(-1.0, 0.0);
    a[(1, 2)] = C64::new(1.0, 0.0);
    a[(2, 1)] = C64::new(1.0, 0.0);
    a[(3, 0)] = C64::new(-1.0, 0.0);
    a
}

/// Eigenvalues of a general complex 4×4 matrix from its Schur form.
fn general_eigenvalues(m: Matrix4<C64>) -> Vector4<C64> {
    let (_, t) = Schur::new(m).unpack();
    t.diagonal()
}

/// Wootters concurrence of a two-photon polarization state.
pub fn concurrence(tpdm: &TwoPhotonDM) -> Result<EntanglementReport> {
    let rho = tpdm.matrix;
    let a = flip();
    let m = rho * a * rho.conjugate() * a;
    let ev = general_eigenvalues(m);
    let scale = ev.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut e = [0.0; 4];
    for (k, z) in ev.iter().enumerate() {
        if z.im.abs() > IMAG_WARN * scale {
            log::warn!("discarding imaginary part {:e} of a concurrence eigenvalue", z.im);
        }
        if z.re < EIGEN_VALIDITY {
            return Err(Error::Numerical(format!(
                "concurrence eigenvalue {:e} is negative; the input is not a valid state",
                z.re
            )));
        }
        if z.re < EIGEN_CLIP {
            log::warn!("clipping concurrence eigenvalue {:e}", z.re);
        }
        e[k] = z.re.max(0.0);
    }
    e.sort_by(|x, y| y.total_cmp(x));
    let c = e[0].sqrt() - e[1].sqrt() - e[2].sqrt() - e[3].sqrt();
    let gamma = tpdm.gamma();
    Ok(EntanglementReport {
        concurrence: c.clamp(0.0, 1.0),
        eigenvalues: e,
        gamma_coherence: gamma,
        peres_entangled: gamma.norm() > 1e-12,
    })
}

/// ½ Σ ⟨O|ρ|O⟩ over the erroneous outcomes HV, VH, DA, AD.
pub fn qber(tpdm: &TwoPhotonDM) -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = [1.0, 0.0];
    let v = [0.0, 1.0];
    let d = [s, s];
    let a = [s, -s];
    let ket = |x: [f64; 2], y: [f64; 2]| Vector4::new(x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]).map(|r| C64::new(r, 0.0));
    let outcomes = [ket(h, v), ket(v, h), ket(d, a), ket(a, d)];
    let q: f64 = outcomes
        .iter()
        .map(|o| (o.adjoint() * tpdm.matrix * o)[(0, 0)].re)
        .sum();
    0.5 * q
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarkReport {
    /// meV
    pub delta_hh: f64,
    /// meV
    pub delta_vv: f64,
    /// |Δ_HH − Δ_VV|, meV
    pub splitting: f64,
}

/// Cavity-induced shifts Δ_HH = 2n_H(⟨B⟩g)²/δ_H, Δ_VV = 2n_V(⟨B⟩g)²/δ_V.
pub fn stark_shifts(params: &PhysicalParams, b_avg: f64, n_h: f64, n_v: f64) -> Result<StarkReport> {
    use crate::params::ps_inv_to_mev;
    let (dh, dv) = (params.delta_h(), params.delta_v());
    for (name, d) in [("delta_H", dh), ("delta_V", dv)] {
        if !(d.abs() > 1e-12) {
            return Err(Error::Numerical(format!(
                "ac-Stark shift is singular: {name} = {d}"
            )));
        }
    }
    let bg = b_avg * params.g;
    let delta_hh = ps_inv_to_mev(2.0 * n_h * bg * bg / dh);
    let delta_vv = ps_inv_to_mev(2.0 * n_v * bg * bg / dv);
    Ok(StarkReport {
        delta_hh,
        delta_vv,
        splitting: (delta_hh - delta_vv).abs(),
    })
}
