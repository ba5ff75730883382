//! Physical and numerical parameters of a simulation run.
//!
//! Everything is stored internally with ħ = 1: energies and rates as angular
//! frequencies in ps⁻¹, times in ps, the phonon coupling in ps², the bath
//! temperature in K. The on-disk config uses laboratory units (meV, μeV, K)
//! and is converted exactly once, in [`PhysicalParams::from_config_str`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ħ in meV·ps.
pub const HBAR_MEV_PS: f64 = 0.6582119;
/// Boltzmann constant in meV/K.
pub const KB_MEV_PER_K: f64 = 0.08617333262;

/// Default threshold for treating the polaron validity figure as "≪ 1".
pub const VALIDITY_THRESHOLD: f64 = 0.1;

#[inline]
pub fn mev_to_ps_inv(e_mev: f64) -> f64 {
    e_mev / HBAR_MEV_PS
}

#[inline]
pub fn ps_inv_to_mev(w: f64) -> f64 {
    w * HBAR_MEV_PS
}

#[inline]
pub fn uev_to_ps_inv(e_uev: f64) -> f64 {
    mev_to_ps_inv(e_uev * 1e-3)
}

#[inline]
pub fn ps_inv_to_uev(w: f64) -> f64 {
    ps_inv_to_mev(w) * 1e3
}

/// Thermal energy k_B·T expressed as an angular frequency (ps⁻¹).
#[inline]
pub fn thermal_frequency(temperature_k: f64) -> f64 {
    mev_to_ps_inv(KB_MEV_PER_K * temperature_k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Phonon coupling strength α_p (ps²).
    pub alpha_p: f64,
    /// Phonon cutoff ω_b (ps⁻¹).
    pub omega_b: f64,
    /// Bath temperature (K).
    pub temperature: f64,
    /// Exciton fine-structure splitting δ (ps⁻¹).
    pub delta_fss: f64,
    /// Detuning Δ between the H exciton and the laser (ps⁻¹).
    pub detuning: f64,
    pub g: f64,
    pub kappa: f64,
    pub gamma_b: f64,
    pub gamma_e: f64,
    pub gamma_b_deph: f64,
    pub gamma_e_deph: f64,
    /// Peak Rabi frequency Ω_H0 (ps⁻¹).
    pub omega_h0: f64,
    pub t_p: f64,
    pub t_0: f64,
    /// Fock truncation: each cavity mode holds 0..=n_max photons.
    pub n_max: usize,
    /// Detection window for the biexciton photon (ps).
    pub window_first: f64,
    /// Detection window for the delayed exciton photon (ps).
    pub window_second: f64,
    /// Start of photon detection (ps); the drive is treated as off afterwards.
    pub t_gate: f64,
    pub phonons_enabled: bool,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        let t_p = 6.0;
        let t_0 = default_t0(t_p);
        PhysicalParams {
            alpha_p: 0.06,
            omega_b: mev_to_ps_inv(1.0),
            temperature: 4.0,
            delta_fss: uev_to_ps_inv(20.0),
            detuning: mev_to_ps_inv(1.1),
            g: uev_to_ps_inv(70.0),
            kappa: uev_to_ps_inv(65.0),
            gamma_b: uev_to_ps_inv(2.0),
            gamma_e: uev_to_ps_inv(1.0),
            gamma_b_deph: uev_to_ps_inv(4.0),
            gamma_e_deph: uev_to_ps_inv(2.0),
            omega_h0: mev_to_ps_inv(0.8),
            t_p,
            t_0,
            n_max: 2,
            window_first: 200.0,
            window_second: 200.0,
            t_gate: default_gate(t_0, t_p),
            phonons_enabled: true,
        }
    }
}

fn default_t0(t_p: f64) -> f64 {
    4.0 * t_p
}

fn default_gate(t_0: f64, t_p: f64) -> f64 {
    t_0 + 2.5 * t_p
}

/// On-disk config record. Every key is optional; omitted keys take defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ConfigFile {
    pub alpha_p_ps2: Option<f64>,
    pub omega_b_meV: Option<f64>,
    pub temperature_K: Option<f64>,
    pub delta_fss_ueV: Option<f64>,
    pub detuning_meV: Option<f64>,
    pub g_ueV: Option<f64>,
    pub kappa_ueV: Option<f64>,
    pub gamma_B_ueV: Option<f64>,
    pub gamma_E_ueV: Option<f64>,
    pub gamma_Bp_ueV: Option<f64>,
    pub gamma_Ep_ueV: Option<f64>,
    pub omega_H0_meV: Option<f64>,
    pub t_p_ps: Option<f64>,
    pub t0_ps: Option<f64>,
    pub n_max: Option<i64>,
    pub Tp_ps: Option<f64>,
    pub Tpprime_ps: Option<f64>,
    pub t_gate_ps: Option<f64>,
    pub phonons_enabled: Option<bool>,
}

/// The exact key set accepted by the config file, in schema order.
pub const CONFIG_KEYS: [&str; 19] = [
    "alpha_p_ps2",
    "omega_b_meV",
    "temperature_K",
    "delta_fss_ueV",
    "detuning_meV",
    "g_ueV",
    "kappa_ueV",
    "gamma_B_ueV",
    "gamma_E_ueV",
    "gamma_Bp_ueV",
    "gamma_Ep_ueV",
    "omega_H0_meV",
    "t_p_ps",
    "t0_ps",
    "n_max",
    "Tp_ps",
    "Tpprime_ps",
    "t_gate_ps",
    "phonons_enabled",
];

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            line: e.span().map(|s| line_of(text, s.start)),
            msg: e.message().to_string(),
        })
    }

    /// Sets a single key from its textual value, as given on a command line.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let fragment = format!("{key} = {value}");
        let one = ConfigFile::parse(&fragment).map_err(|e| match e {
            Error::Config { msg, .. } => Error::Config {
                line: None,
                msg: format!("override `{fragment}`: {msg}"),
            },
            e => e,
        })?;
        self.merge(one);
        Ok(())
    }

    /// Overwrites every key that `other` sets.
    pub fn merge(&mut self, other: ConfigFile) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            alpha_p_ps2, omega_b_meV, temperature_K, delta_fss_ueV, detuning_meV, g_ueV,
            kappa_ueV, gamma_B_ueV, gamma_E_ueV, gamma_Bp_ueV, gamma_Ep_ueV, omega_H0_meV,
            t_p_ps, t0_ps, n_max, Tp_ps, Tpprime_ps, t_gate_ps, phonons_enabled
        );
    }

    pub fn to_params(&self) -> Result<PhysicalParams> {
        let d = PhysicalParams::default();
        let t_p = self.t_p_ps.unwrap_or(d.t_p);
        let t_0 = self.t0_ps.unwrap_or_else(|| default_t0(t_p));
        let n_max = match self.n_max {
            None => d.n_max,
            Some(n) if n < 0 => {
                return Err(Error::Validation {
                    field: "n_max",
                    msg: format!("must be >= 1, got {n}"),
                })
            }
            Some(n) => n as usize,
        };
        let window_second = self.Tpprime_ps.unwrap_or(d.window_second);
        let p = PhysicalParams {
            alpha_p: self.alpha_p_ps2.unwrap_or(d.alpha_p),
            omega_b: self.omega_b_meV.map(mev_to_ps_inv).unwrap_or(d.omega_b),
            temperature: self.temperature_K.unwrap_or(d.temperature),
            delta_fss: self.delta_fss_ueV.map(uev_to_ps_inv).unwrap_or(d.delta_fss),
            detuning: self.detuning_meV.map(mev_to_ps_inv).unwrap_or(d.detuning),
            g: self.g_ueV.map(uev_to_ps_inv).unwrap_or(d.g),
            kappa: self.kappa_ueV.map(uev_to_ps_inv).unwrap_or(d.kappa),
            gamma_b: self.gamma_B_ueV.map(uev_to_ps_inv).unwrap_or(d.gamma_b),
            gamma_e: self.gamma_E_ueV.map(uev_to_ps_inv).unwrap_or(d.gamma_e),
            gamma_b_deph: self.gamma_Bp_ueV.map(uev_to_ps_inv).unwrap_or(d.gamma_b_deph),
            gamma_e_deph: self.gamma_Ep_ueV.map(uev_to_ps_inv).unwrap_or(d.gamma_e_deph),
            omega_h0: self.omega_H0_meV.map(mev_to_ps_inv).unwrap_or(d.omega_h0),
            t_p,
            t_0,
            n_max,
            // The biexciton window follows the exciton window unless set.
            window_first: self.Tp_ps.unwrap_or(window_second),
            window_second,
            t_gate: self.t_gate_ps.unwrap_or_else(|| default_gate(t_0, t_p)),
            phonons_enabled: self.phonons_enabled.unwrap_or(d.phonons_enabled),
        };
        p.validate()?;
        Ok(p)
    }
}

fn line_of(text: &str, byte: usize) -> usize {
    text[..byte.min(text.len())].matches('\n').count() + 1
}

/// Outcome of the polaron-frame validity check (Ω_H0/ω_b)²(1 − ⟨B⟩⁴).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityReport {
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl PhysicalParams {
    pub fn load_config(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_str(&text)
    }

    pub fn from_config_str(text: &str) -> Result<Self> {
        ConfigFile::parse(text)?.to_params()
    }

    /// Fully explicit config record (every key present) in laboratory units.
    pub fn to_config(&self) -> ConfigFile {
        ConfigFile {
            alpha_p_ps2: Some(self.alpha_p),
            omega_b_meV: Some(ps_inv_to_mev(self.omega_b)),
            temperature_K: Some(self.temperature),
            delta_fss_ueV: Some(ps_inv_to_uev(self.delta_fss)),
            detuning_meV: Some(ps_inv_to_mev(self.detuning)),
            g_ueV: Some(ps_inv_to_uev(self.g)),
            kappa_ueV: Some(ps_inv_to_uev(self.kappa)),
            gamma_B_ueV: Some(ps_inv_to_uev(self.gamma_b)),
            gamma_E_ueV: Some(ps_inv_to_uev(self.gamma_e)),
            gamma_Bp_ueV: Some(ps_inv_to_uev(self.gamma_b_deph)),
            gamma_Ep_ueV: Some(ps_inv_to_uev(self.gamma_e_deph)),
            omega_H0_meV: Some(ps_inv_to_mev(self.omega_h0)),
            t_p_ps: Some(self.t_p),
            t0_ps: Some(self.t_0),
            n_max: Some(self.n_max as i64),
            Tp_ps: Some(self.window_first),
            Tpprime_ps: Some(self.window_second),
            t_gate_ps: Some(self.t_gate),
            phonons_enabled: Some(self.phonons_enabled),
        }
    }

    pub fn to_config_string(&self) -> String {
        toml::to_string(&self.to_config()).expect("flat config always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        // (key, internal value, factor to the key's unit)
        let mev = ps_inv_to_mev(1.0);
        let uev = ps_inv_to_uev(1.0);
        let nonneg = [
            ("alpha_p_ps2", self.alpha_p, 1.0),
            ("omega_b_meV", self.omega_b, mev),
            ("delta_fss_ueV", self.delta_fss, uev),
            ("g_ueV", self.g, uev),
            ("kappa_ueV", self.kappa, uev),
            ("gamma_B_ueV", self.gamma_b, uev),
            ("gamma_E_ueV", self.gamma_e, uev),
            ("gamma_Bp_ueV", self.gamma_b_deph, uev),
            ("gamma_Ep_ueV", self.gamma_e_deph, uev),
            ("omega_H0_meV", self.omega_h0, mev),
            ("t0_ps", self.t_0, 1.0),
            ("t_gate_ps", self.t_gate, 1.0),
        ];
        for (field, v, unit) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Validation {
                    field,
                    msg: format!("must be finite and >= 0, got {}", v * unit),
                });
            }
        }
        let positive = [
            ("t_p_ps", self.t_p),
            ("Tp_ps", self.window_first),
            ("Tpprime_ps", self.window_second),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation {
                    field,
                    msg: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        if self.phonons_enabled && !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::Validation {
                field: "temperature_K",
                msg: format!("must be > 0 with phonons enabled, got {}", self.temperature),
            });
        }
        if self.phonons_enabled && self.alpha_p > 0.0 && self.omega_b <= 0.0 {
            return Err(Error::Validation {
                field: "omega_b_meV",
                msg: "phonon cutoff must be > 0 when alpha_p > 0".into(),
            });
        }
        if !(1..=4).contains(&self.n_max) {
            return Err(Error::Validation {
                field: "n_max",
                msg: format!("must lie in 1..=4, got {}", self.n_max),
            });
        }
        if !(self.detuning > self.delta_fss) {
            return Err(Error::Validation {
                field: "detuning_meV",
                msg: format!(
                    "must exceed the fine-structure splitting ({} meV <= {} meV)",
                    ps_inv_to_mev(self.detuning),
                    ps_inv_to_mev(self.delta_fss)
                ),
            });
        }
        Ok(())
    }

    /// Detuning of the H exciton from the laser, δ_H = Δ.
    pub fn delta_h(&self) -> f64 {
        self.detuning
    }

    /// Detuning of the V exciton from the laser, δ_V = Δ − δ.
    pub fn delta_v(&self) -> f64 {
        self.detuning - self.delta_fss
    }

    /// End of the default simulation horizon, t_gate + T_p + T_p′.
    pub fn horizon(&self) -> f64 {
        self.t_gate + self.window_first + self.window_second
    }

    /// Whether every field agrees with `other` to `rel` relative tolerance.
    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= rel * a.abs().max(b.abs()) || a == b;
        close(self.alpha_p, other.alpha_p)
            && close(self.omega_b, other.omega_b)
            && close(self.temperature, other.temperature)
            && close(self.delta_fss, other.delta_fss)
            && close(self.detuning, other.detuning)
            && close(self.g, other.g)
            && close(self.kappa, other.kappa)
            && close(self.gamma_b, other.gamma_b)
            && close(self.gamma_e, other.gamma_e)
            && close(self.gamma_b_deph, other.gamma_b_deph)
            && close(self.gamma_e_deph, other.gamma_e_deph)
            && close(self.omega_h0, other.omega_h0)
            && close(self.t_p, other.t_p)
            && close(self.t_0, other.t_0)
            && close(self.window_first, other.window_first)
            && close(self.window_second, other.window_second)
            && close(self.t_gate, other.t_gate)
            && self.n_max == other.n_max
            && self.phonons_enabled == other.phonons_enabled
    }

    pub fn check_polaron_validity(&self, b_avg: f64) -> Result<ValidityReport> {
        check_polaron_validity(self.omega_h0, self.omega_b, b_avg, VALIDITY_THRESHOLD)
    }
}

/// Evaluates (Ω_H0/ω_b)²(1 − ⟨B⟩⁴) against `threshold`.
pub fn check_polaron_validity(
    omega_h0: f64,
    omega_b: f64,
    b_avg: f64,
    threshold: f64,
) -> Result<ValidityReport> {
    if !(b_avg > 0.0 && b_avg <= 1.0) {
        return Err(Error::Argument(format!("<B> must lie in (0, 1], got {b_avg}")));
    }
    let value = if omega_h0 == 0.0 {
        0.0
    } else {
        (omega_h0 / omega_b).powi(2) * (1.0 - b_avg.powi(4))
    };
    Ok(ValidityReport {
        value,
        threshold,
        pass: value < threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let p = PhysicalParams::from_config_str("").unwrap();
        assert_eq!(p, PhysicalParams::default());
        assert_eq!(p.alpha_p, 0.06);
        assert!((ps_inv_to_mev(p.detuning) - 1.1).abs() < 1e-12);
        assert!((ps_inv_to_mev(p.omega_b) - 1.0).abs() < 1e-12);
        assert!((ps_inv_to_mev(p.omega_h0) - 0.8).abs() < 1e-12);
        assert!((ps_inv_to_uev(p.gamma_b) - 2.0).abs() < 1e-12);
        assert!((ps_inv_to_uev(p.gamma_e) - 1.0).abs() < 1e-12);
        assert!((ps_inv_to_uev(p.gamma_b_deph) - 4.0).abs() < 1e-12);
        assert!((ps_inv_to_uev(p.gamma_e_deph) - 2.0).abs() < 1e-12);
        assert!((ps_inv_to_uev(p.kappa) - 65.0).abs() < 1e-12);
        assert!((ps_inv_to_uev(p.delta_fss) - 20.0).abs() < 1e-12);
        assert_eq!(p.t_p, 6.0);
        assert_eq!(p.t_0, 24.0);
        assert_eq!(p.t_gate, 39.0);
        assert_eq!(p.window_first, p.window_second);
    }

    #[test]
    fn negative_g_is_rejected() {
        let err = PhysicalParams::from_config_str("g_ueV = -1").unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "g_ueV"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn temperature_override() {
        let p = PhysicalParams::from_config_str("temperature_K = 4").unwrap();
        assert_eq!(p.temperature, 4.0);
        let p = PhysicalParams::from_config_str("temperature_K = 20.0").unwrap();
        assert_eq!(p.temperature, 20.0);
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = PhysicalParams::from_config_str("g_ueV = 30\n\nkappa_ueV = = 3\n").unwrap_err();
        match err {
            Error::Config { line, .. } => assert_eq!(line, Some(3)),
            e => panic!("unexpected {e}"),
        }
        let err = PhysicalParams::from_config_str("g_ueV = 30\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: Some(2), .. }), "{err}");
    }

    #[test]
    fn pulse_width_moves_derived_defaults() {
        let p = PhysicalParams::from_config_str("t_p_ps = 4").unwrap();
        assert_eq!(p.t_0, 16.0);
        assert_eq!(p.t_gate, 26.0);
    }

    #[test]
    fn detuning_must_exceed_fss() {
        let err = PhysicalParams::from_config_str("detuning_meV = 0.01\ndelta_fss_ueV = 20").unwrap_err();
        assert!(matches!(err, Error::Validation { field: "detuning_meV", .. }));
    }

    #[test]
    fn phonon_temperature_and_truncation_checks() {
        assert!(PhysicalParams::from_config_str("temperature_K = 0").is_err());
        assert!(PhysicalParams::from_config_str("temperature_K = 0\nphonons_enabled = false").is_ok());
        assert!(PhysicalParams::from_config_str("n_max = 0").is_err());
        assert!(PhysicalParams::from_config_str("n_max = 5").is_err());
        assert!(PhysicalParams::from_config_str("n_max = -2").is_err());
    }

    #[test]
    fn overrides_use_config_syntax() {
        let mut cfg = ConfigFile::default();
        cfg.set("g_ueV", "30").unwrap();
        cfg.set("phonons_enabled", "false").unwrap();
        let p = cfg.to_params().unwrap();
        assert!((ps_inv_to_uev(p.g) - 30.0).abs() < 1e-12);
        assert!(!p.phonons_enabled);
        assert!(cfg.set("nonsense", "1").is_err());
    }

    #[test]
    fn validity_examples() {
        let r = check_polaron_validity(0.8, 1.0, 1.0, 0.1).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.pass);
        let r = check_polaron_validity(0.8, 1.0, 0.9, 0.1).unwrap();
        assert!((r.value - 0.64 * (1.0 - 0.6561)).abs() < 1e-12);
        assert!((r.value - 0.220_096).abs() < 1e-6);
        assert!(!r.pass);
        let r = check_polaron_validity(0.0, 1.0, 0.5, 0.1).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.pass);
        assert!(check_polaron_validity(0.8, 1.0, 0.0, 0.1).is_err());
        assert!(check_polaron_validity(0.8, 1.0, 1.2, 0.1).is_err());
    }

    #[test]
    fn unit_conversion_is_involutive() {
        for x in [1e-6, 0.02, 1.1, 65.0, 1234.5] {
            let back = ps_inv_to_mev(mev_to_ps_inv(x));
            assert!((back - x).abs() <= 1e-12 * x);
            let back = ps_inv_to_uev(uev_to_ps_inv(x));
            assert!((back - x).abs() <= 1e-12 * x);
        }
    }
}
