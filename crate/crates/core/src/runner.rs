//! Orchestration of single runs and parameter sweeps, and the CSV/JSON
//! artifacts they leave on disk.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::correlations::{build_tpdm_separable, ettocf_series, TwoPhotonDM};
use crate::dynamics::{checkpoint_times, evolve, DensityState, Trajectory};
use crate::error::{Error, Result};
use crate::metrics::{concurrence, qber, stark_shifts, EntanglementReport, StarkReport};
use crate::model::{Model, ModelConfig};
use crate::ode::Tolerance;
use crate::ops::{DotState, Polarization};
use crate::params::{ps_inv_to_uev, uev_to_ps_inv, PhysicalParams, ValidityReport};
use crate::phonon::{rate_curve, PhononKernel, RateSet};

/// Environment variable holding the sweep worker count.
pub const WORKERS_ENV: &str = "QD_ENTANGLE_WORKERS";

/// Artifacts a run can write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Artifact {
    Concurrence,
    Qber,
    Tpdm,
    Rates,
    Stark,
    Ettocf,
    Trajectory,
}

impl Artifact {
    pub const ALL: [Artifact; 7] = [
        Artifact::Concurrence,
        Artifact::Qber,
        Artifact::Tpdm,
        Artifact::Rates,
        Artifact::Stark,
        Artifact::Ettocf,
        Artifact::Trajectory,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "concurrence" => Artifact::Concurrence,
            "qber" => Artifact::Qber,
            "tpdm" => Artifact::Tpdm,
            "rates" => Artifact::Rates,
            "stark" => Artifact::Stark,
            "ettocf" => Artifact::Ettocf,
            "trajectory" => Artifact::Trajectory,
            other => return Err(Error::Argument(format!("unknown artifact '{other}'"))),
        })
    }
}

/// Numerical knobs that are not physical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub tol: Tolerance,
    /// Checkpoint spacing up to the gate (ps).
    pub pulse_step: f64,
    /// Checkpoint spacing after the gate (ps).
    pub detect_step: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tol: Tolerance::default(),
            pulse_step: 0.25,
            detect_step: 1.0,
        }
    }
}

/// Everything computed for one parameter point.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub params: PhysicalParams,
    pub kernel: PhononKernel,
    pub validity: ValidityReport,
    pub trajectory: Trajectory,
    pub tpdm: TwoPhotonDM,
    pub entanglement: EntanglementReport,
    pub qber: f64,
    /// Shifts at the peak mean photon numbers of the run.
    pub stark: StarkReport,
    pub ettocf: Vec<(f64, f64)>,
    pub runtime_s: f64,
}

impl Simulation {
    pub fn b_avg(&self) -> f64 {
        self.kernel.b_avg
    }

    /// Largest ⟨a†³a³⟩ at or before the gate.
    pub fn ettocf_peak_during_pulse(&self) -> f64 {
        self.ettocf
            .iter()
            .filter(|(t, _)| *t <= self.params.t_gate + 1e-9)
            .map(|&(_, v)| v)
            .fold(0.0, f64::max)
    }

    pub fn summary_line(&self) -> String {
        format!(
            "C = {:.4}  q = {:.4}  <B> = {:.4}  validity = {:.4} ({})",
            self.entanglement.concurrence,
            self.qber,
            self.b_avg(),
            self.validity.value,
            if self.validity.pass { "pass" } else { "FAIL" }
        )
    }
}

/// Kernel → model → dynamics → correlations → metrics.
pub fn simulate(p: &PhysicalParams, opts: &RunOptions) -> Result<Simulation> {
    simulate_with(p, ModelConfig::for_params(p), opts)
}

/// [`simulate`] with an explicit choice of phonon term groups.
pub fn simulate_with(p: &PhysicalParams, cfg: ModelConfig, opts: &RunOptions) -> Result<Simulation> {
    let start = Instant::now();
    p.validate()?;
    let kernel = PhononKernel::build(p).map_err(|e| e.in_module("phonon-kernel"))?;
    let validity = p.check_polaron_validity(kernel.b_avg)?;
    if !validity.pass {
        log::warn!(
            "polaron validity figure {:.4} exceeds {:.2}",
            validity.value,
            validity.threshold
        );
    }
    let model = Model::new(p, &kernel, cfg).map_err(|e| e.in_module("model"))?;
    let times = checkpoint_times(p.t_gate, p.horizon(), opts.pulse_step, opts.detect_step);
    let rho0 = DensityState::ground(model.layout);
    let trajectory = evolve(&model, &rho0, &times, opts.tol).map_err(|e| e.in_module("dynamics"))?;
    let rho_gate = trajectory.state_at(p.t_gate)?;
    let tpdm = build_tpdm_separable(&model, rho_gate, opts.tol).map_err(|e| e.in_module("correlations"))?;
    let entanglement = concurrence(&tpdm).map_err(|e| e.in_module("metrics"))?;
    let q = qber(&tpdm);
    let (mut n_h, mut n_v) = (0.0f64, 0.0f64);
    for s in &trajectory.states {
        n_h = n_h.max(s.mean_photons(model.layout, Polarization::H));
        n_v = n_v.max(s.mean_photons(model.layout, Polarization::V));
    }
    let stark = stark_shifts(p, kernel.b_avg, n_h, n_v).map_err(|e| e.in_module("metrics"))?;
    let ettocf = ettocf_series(&model.ops, &trajectory)?;
    Ok(Simulation {
        params: p.clone(),
        kernel,
        validity,
        trajectory,
        tpdm,
        entanglement,
        qber: q,
        stark,
        ettocf,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

/// Short stable identifier derived from the canonical config text.
pub fn run_id(p: &PhysicalParams) -> String {
    let digest = Sha256::digest(p.to_config_string().as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

/// Shortest text that parses back to the same f64.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

pub fn summary_csv(sim: &Simulation) -> String {
    csv(
        &[
            "concurrence",
            "qber",
            "b_avg",
            "validity",
            "validity_pass",
            "gamma_re",
            "gamma_im",
            "trace_drift",
            "min_eigenvalue",
            "runtime_s",
        ],
        [vec![
            num(sim.entanglement.concurrence),
            num(sim.qber),
            num(sim.b_avg()),
            num(sim.validity.value),
            sim.validity.pass.to_string(),
            num(sim.entanglement.gamma_coherence.re),
            num(sim.entanglement.gamma_coherence.im),
            num(sim.trajectory.diagnostics.trace_drift),
            num(sim.trajectory.diagnostics.min_eigenvalue),
            num(sim.runtime_s),
        ]],
    )
}

/// Every rate and shift in μeV (ħ·rate); pulse-mediated entries are
/// evaluated at the pulse peak Ω_H0.
pub fn rates_csv(kernel: &PhononKernel, p: &PhysicalParams) -> Result<String> {
    let r = &kernel.rates;
    let w = p.omega_h0;
    let (rabi_re, rabi_im) = kernel.rabi_dependent_rates(w)?;
    let peak = 0.25 * w * w;
    let rows = [
        ("gamma_plus_H", r.gamma_plus_h),
        ("gamma_minus_H", r.gamma_minus_h),
        ("gamma_plus_V", r.gamma_plus_v),
        ("gamma_minus_V", r.gamma_minus_v),
        ("gamma_TP_H", r.gamma_tp_h),
        ("gamma_TP_V", r.gamma_tp_v),
        ("delta_plus_H", r.delta_plus_h),
        ("delta_minus_H", r.delta_minus_h),
        ("delta_plus_V", r.delta_plus_v),
        ("delta_minus_V", r.delta_minus_v),
        ("delta_minus_pH", r.delta_minus_ph),
        ("delta_minus_pV", r.delta_minus_pv),
        ("gamma_plus_Omega_peak", peak * r.k_plus_omega),
        ("gamma_minus_Omega_peak", peak * r.k_minus_omega),
        ("gamma_TP_Omega_peak", peak * r.k_tp_omega),
        ("delta_plus_Omega_peak", peak * r.delta_plus_omega_kernel),
        ("delta_minus_Omega_peak", peak * r.delta_minus_omega_kernel),
        ("delta_p_Omega_peak", peak * r.delta_p_omega),
        ("gamma_R_B_peak", rabi_re),
        ("gamma_I_B_peak", rabi_im),
    ];
    Ok(csv(
        &["rate", "value_ueV", "temperature_K", "b_avg"],
        rows.iter().map(|(k, v)| {
            vec![
                k.to_string(),
                num(ps_inv_to_uev(*v)),
                num(p.temperature),
                num(kernel.b_avg),
            ]
        }),
    ))
}

/// Γ⁺, Γ⁻, Γ^TP against detuning (μeV), the data behind the rate curves.
pub fn rate_curve_csv(p: &PhysicalParams, kernel: &PhononKernel, detunings_mev: &[f64]) -> String {
    let pts = rate_curve(&kernel.correlation, p.g, detunings_mev);
    csv(
        &["delta_meV", "gamma_plus_ueV", "gamma_minus_ueV", "gamma_tp_ueV", "temperature_K"],
        pts.iter().map(|r| {
            vec![
                num(r.delta_mev),
                num(ps_inv_to_uev(r.gamma_plus)),
                num(ps_inv_to_uev(r.gamma_minus)),
                num(ps_inv_to_uev(r.gamma_tp)),
                num(r.temperature_k),
            ]
        }),
    )
}

pub fn trajectory_csv(sim: &Simulation) -> String {
    let layout = crate::ops::HilbertLayout::new(sim.params.n_max);
    csv(
        &["t_ps", "pop_G", "pop_H", "pop_V", "pop_B", "n_H", "n_V", "trace", "min_eig"],
        sim.trajectory.states.iter().map(|s| {
            let mut r = vec![num(s.time)];
            r.extend(DotState::ALL.iter().map(|&q| num(s.population(layout, q))));
            r.push(num(s.mean_photons(layout, Polarization::H)));
            r.push(num(s.mean_photons(layout, Polarization::V)));
            r.push(num(s.trace().re));
            r.push(num(s.min_eigenvalue()));
            r
        }),
    )
}

/// Instantaneous shifts along the trajectory.
pub fn stark_csv(sim: &Simulation) -> Result<String> {
    let layout = crate::ops::HilbertLayout::new(sim.params.n_max);
    let mut rows = Vec::new();
    for s in &sim.trajectory.states {
        let n_h = s.mean_photons(layout, Polarization::H);
        let n_v = s.mean_photons(layout, Polarization::V);
        let r = stark_shifts(&sim.params, sim.b_avg(), n_h, n_v)?;
        rows.push(vec![
            num(s.time),
            num(n_h),
            num(n_v),
            num(r.delta_hh * 1e3),
            num(r.delta_vv * 1e3),
            num(r.splitting * 1e3),
        ]);
    }
    Ok(csv(
        &["t_ps", "n_H", "n_V", "delta_HH_ueV", "delta_VV_ueV", "splitting_ueV"],
        rows,
    ))
}

pub fn ettocf_csv(sim: &Simulation) -> String {
    csv(
        &["t_ps", "ettocf_H", "temperature_K"],
        sim.ettocf
            .iter()
            .map(|&(t, v)| vec![num(t), num(v), num(sim.params.temperature)]),
    )
}

pub fn tpdm_json(tpdm: &TwoPhotonDM) -> String {
    serde_json::to_string_pretty(&tpdm.to_json()).expect("tpdm serializes")
}

/// Runs one point and writes the requested artifacts to `out/<run-id>/`.
/// Nothing is written unless the whole simulation succeeds.
pub fn run_single(
    p: &PhysicalParams,
    outputs: &[Artifact],
    out_root: &Path,
    opts: &RunOptions,
) -> Result<(PathBuf, Simulation)> {
    let sim = simulate(p, opts)?;
    let mut files: Vec<(&str, String)> = vec![
        ("summary.csv", summary_csv(&sim)),
        ("config.echo", p.to_config_string()),
    ];
    for a in outputs {
        match a {
            Artifact::Concurrence | Artifact::Qber => {}
            Artifact::Tpdm => files.push(("tpdm.json", tpdm_json(&sim.tpdm))),
            Artifact::Rates => files.push(("rates.csv", rates_csv(&sim.kernel, p)?)),
            Artifact::Stark => files.push(("stark.csv", stark_csv(&sim)?)),
            Artifact::Ettocf => files.push(("ettocf.csv", ettocf_csv(&sim))),
            Artifact::Trajectory => files.push(("trajectory.csv", trajectory_csv(&sim))),
        }
    }
    let dir = out_root.join(run_id(p));
    write_all(&dir, &files)?;
    Ok((dir, sim))
}

/// Writes into a sibling temporary directory and renames it into place, so
/// an interrupted write never leaves a partial bundle.
fn write_all(dir: &Path, files: &[(&str, String)]) -> Result<()> {
    let parent = dir.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(parent)?;
    let tmp = parent.join(format!(
        ".{}.partial",
        dir.file_name().and_then(|s| s.to_str()).unwrap_or("run")
    ));
    if tmp.exists() {
        fs::remove_dir_all(&tmp)?;
    }
    fs::create_dir_all(&tmp)?;
    for (name, text) in files {
        fs::write(tmp.join(name), text)?;
    }
    if dir.exists() {
        fs::remove_dir_all(dir)?;
    }
    fs::rename(&tmp, dir)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepAxis {
    /// μeV
    G,
    /// K
    Temperature,
    /// μeV
    DeltaFss,
    /// ps
    TpPrime,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "g" | "g_ueV" => SweepAxis::G,
            "temperature" | "temperature_K" | "T" => SweepAxis::Temperature,
            "delta_fss" | "delta_fss_ueV" => SweepAxis::DeltaFss,
            "T_p_prime" | "Tpprime_ps" | "tp_prime" => SweepAxis::TpPrime,
            other => {
                return Err(Error::Argument(format!(
                    "unknown sweep axis '{other}' (expected g, temperature, delta_fss or T_p_prime)"
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::G => "g_ueV",
            SweepAxis::Temperature => "temperature_K",
            SweepAxis::DeltaFss => "delta_fss_ueV",
            SweepAxis::TpPrime => "Tpprime_ps",
        }
    }

    /// `base` with this axis set to `value` (laboratory units). Setting
    /// T_p′ also moves T_p, which follows it by default.
    pub fn apply(self, base: &PhysicalParams, value: f64) -> Result<PhysicalParams> {
        let mut p = base.clone();
        match self {
            SweepAxis::G => p.g = uev_to_ps_inv(value),
            SweepAxis::Temperature => p.temperature = value,
            SweepAxis::DeltaFss => p.delta_fss = uev_to_ps_inv(value),
            SweepAxis::TpPrime => {
                if base.window_first == base.window_second {
                    p.window_first = value;
                }
                p.window_second = value;
            }
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub base: PhysicalParams,
    pub outputs: Vec<Artifact>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Argument("sweep needs at least one value".into()));
        }
        for &v in &self.values {
            self.axis.apply(&self.base, v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub concurrence: f64,
    pub qber: f64,
    pub b_avg: f64,
    pub validity: f64,
    pub gamma_abs: f64,
    pub ettocf_peak: f64,
    pub runtime_s: f64,
    pub error: Option<String>,
}

/// Worker count from [`WORKERS_ENV`], else the number of CPUs.
pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Runs every sweep point on a bounded pool. Rows come back in the order of
/// `spec.values` whatever the scheduling; a failed point is recorded in its
/// row and does not stop the others.
pub fn run_sweep(spec: &SweepSpec, workers: usize, opts: &RunOptions) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Argument(format!("cannot build worker pool: {e}")))?;
    let rows = pool.install(|| {
        spec.values
            .par_iter()
            .map(|&v| {
                let start = Instant::now();
                let res = spec.axis.apply(&spec.base, v).and_then(|p| simulate(&p, opts));
                match res {
                    Ok(sim) => SweepRow {
                        axis_value: v,
                        concurrence: sim.entanglement.concurrence,
                        qber: sim.qber,
                        b_avg: sim.b_avg(),
                        validity: sim.validity.value,
                        gamma_abs: sim.tpdm.gamma().norm(),
                        ettocf_peak: sim.ettocf_peak_during_pulse(),
                        runtime_s: sim.runtime_s,
                        error: None,
                    },
                    Err(e) => {
                        log::error!("sweep point {} = {v} failed: {e}", spec.axis.name());
                        SweepRow {
                            axis_value: v,
                            concurrence: f64::NAN,
                            qber: f64::NAN,
                            b_avg: f64::NAN,
                            validity: f64::NAN,
                            gamma_abs: f64::NAN,
                            ettocf_peak: f64::NAN,
                            runtime_s: start.elapsed().as_secs_f64(),
                            error: Some(e.to_string()),
                        }
                    }
                }
            })
            .collect()
    });
    Ok(rows)
}

pub fn sweep_csv(axis: SweepAxis, rows: &[SweepRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "axis_value,concurrence,qber,b_avg,validity,gamma_abs,ettocf_peak,runtime_s,error,axis"
    );
    for r in rows {
        let err = r
            .error
            .as_deref()
            .map(|e| format!("\"{}\"", e.replace('"', "'")))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            num(r.axis_value),
            num(r.concurrence),
            num(r.qber),
            num(r.b_avg),
            num(r.validity),
            num(r.gamma_abs),
            num(r.ettocf_peak),
            num(r.runtime_s),
            err,
            axis.name()
        );
    }
    s
}

/// Default detuning axis for rate curves: 0.05 to 3 meV.
pub fn default_rate_detunings() -> Vec<f64> {
    (1..=60).map(|k| 0.05 * k as f64).collect()
}

/// Peak ratio Γ±_Ω/Γ±_H = (Ω_H0/2g)² at the pulse maximum.
pub fn pulse_to_cavity_ratio(p: &PhysicalParams) -> f64 {
    (p.omega_h0 / (2.0 * p.g)).powi(2)
}

/// Helper for command-line display: rates in μeV.
pub fn format_rates(rates: &RateSet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Gamma+_H   {:>10.4} ueV", ps_inv_to_uev(rates.gamma_plus_h));
    let _ = writeln!(s, "Gamma-_H   {:>10.4} ueV", ps_inv_to_uev(rates.gamma_minus_h));
    let _ = writeln!(s, "Gamma^TP_H {:>10.4} ueV", ps_inv_to_uev(rates.gamma_tp_h));
    let _ = writeln!(s, "Gamma+_V   {:>10.4} ueV", ps_inv_to_uev(rates.gamma_plus_v));
    let _ = writeln!(s, "Gamma-_V   {:>10.4} ueV", ps_inv_to_uev(rates.gamma_minus_v));
    let _ = writeln!(s, "Gamma^TP_V {:>10.4} ueV", ps_inv_to_uev(rates.gamma_tp_v));
    let _ = write!(s, "<B>^2      {:>10.6}", rates.b_avg_sq);
    s
}
