//! Polaron-frame Hamiltonian and the right-hand side of the master equation.
//!
//! The generator is written as a list of [`LiouvillianTerm`]s: a constant
//! superoperator (a sum of sandwiches `c·AρB`) times a scalar coefficient
//! that is either constant or follows the pulse. Terms are compiled into one
//! sparse superoperator per coefficient kind so that evaluating the
//! right-hand side costs a handful of sparse matrix–vector products.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ops::{DotState, ElementaryOps, HilbertLayout, QuantumOp};
use crate::params::PhysicalParams;
use crate::phonon::{PhononKernel, RabiTable};
use crate::superop::{SparseSuperop, SuperopBuilder};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Gaussian pump envelope Ω_H(t) = Ω_H0·exp(−(t−t₀)²/t_p²), switched off
/// after `cutoff` (the detection gate) so the generator is time independent
/// during detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    pub omega_h0: f64,
    pub t_p: f64,
    pub t_0: f64,
    pub cutoff: f64,
}

impl PulseShape {
    pub fn from_params(p: &PhysicalParams) -> Self {
        PulseShape {
            omega_h0: p.omega_h0,
            t_p: p.t_p,
            t_0: p.t_0,
            cutoff: p.t_gate,
        }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        let x = (t - self.t_0) / self.t_p;
        self.omega_h0 * (-x * x).exp()
    }

    /// Rabi frequency seen by the dynamics (zero past the cutoff).
    pub fn omega(&self, t: f64) -> f64 {
        if t > self.cutoff {
            0.0
        } else {
            self.envelope(t)
        }
    }
}

/// Which optional groups of phonon terms are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    pub phonons_enabled: bool,
    pub include_lamb_shifts: bool,
    pub include_cross_coupling: bool,
    pub include_tp_terms: bool,
    /// Γ^R_B and Γ^I_B, the terms that depend on the instantaneous Rabi
    /// frequency.
    pub include_rabi_terms: bool,
}

impl ModelConfig {
    pub fn full() -> Self {
        ModelConfig {
            phonons_enabled: true,
            include_lamb_shifts: true,
            include_cross_coupling: true,
            include_tp_terms: true,
            include_rabi_terms: true,
        }
    }

    pub fn without_phonons() -> Self {
        ModelConfig {
            phonons_enabled: false,
            include_lamb_shifts: false,
            include_cross_coupling: false,
            include_tp_terms: false,
            include_rabi_terms: false,
        }
    }

    pub fn for_params(p: &PhysicalParams) -> Self {
        if p.phonons_enabled {
            Self::full()
        } else {
            Self::without_phonons()
        }
    }

    fn check(&self, p: &PhysicalParams) -> Result<()> {
        if !self.phonons_enabled
            && (self.include_lamb_shifts
                || self.include_cross_coupling
                || self.include_tp_terms
                || self.include_rabi_terms)
        {
            return Err(Error::Config {
                line: None,
                msg: "phonon term toggles set while phonons are disabled".into(),
            });
        }
        if self.phonons_enabled && !p.phonons_enabled {
            return Err(Error::Config {
                line: None,
                msg: "model requests phonon terms but params disable phonons".into(),
            });
        }
        Ok(())
    }
}

/// How a term's scalar coefficient depends on time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoeffKind {
    Constant(f64),
    /// Coefficient Ω_H(t) × the given scale (the drive Hamiltonian).
    Drive(f64),
    /// Coefficient (Ω_H(t)/2)² × the given kernel.
    PulseSquared(f64),
    /// Γ^R_B(t), from the Ω′ table.
    RabiReal,
    /// Γ^I_B(t), from the Ω′ table.
    RabiImag,
}

/// `c · AρB`.
#[derive(Debug, Clone)]
pub struct Sandwich {
    pub c: C64,
    pub left: QuantumOp,
    pub right: QuantumOp,
}

#[derive(Debug, Clone)]
pub struct LiouvillianTerm {
    pub label: String,
    pub kind: CoeffKind,
    pub sandwiches: Vec<Sandwich>,
}

impl LiouvillianTerm {
    /// Applies the superoperator (without its coefficient) to a dense ρ.
    pub fn apply_unit(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
        for s in &self.sandwiches {
            out += (&s.left.0 * rho * &s.right.0) * s.c;
        }
        out
    }
}

impl fmt::Display for LiouvillianTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

/// Sandwiches of the generalized dissipator
/// L(a, b)ρ = 2aρb† − a†bρ − ρa†b.
fn dissipator(a: &QuantumOp, b: &QuantumOp, scale: f64) -> Vec<Sandwich> {
    let id = QuantumOp::identity(a.dim());
    let adb = &a.dagger() * b;
    vec![
        Sandwich {
            c: C64::new(2.0 * scale, 0.0),
            left: a.clone(),
            right: b.dagger(),
        },
        Sandwich {
            c: C64::new(-scale, 0.0),
            left: adb.clone(),
            right: id.clone(),
        },
        Sandwich {
            c: C64::new(-scale, 0.0),
            left: id,
            right: adb,
        },
    ]
}

fn lindblad(o: &QuantumOp) -> Vec<Sandwich> {
    dissipator(o, o, 1.0)
}

/// c·(Xρ − ρX).
fn commutator(x: &QuantumOp, c: C64) -> Vec<Sandwich> {
    let id = QuantumOp::identity(x.dim());
    vec![
        Sandwich {
            c,
            left: x.clone(),
            right: id.clone(),
        },
        Sandwich {
            c: -c,
            left: id,
            right: x.clone(),
        },
    ]
}

/// Appends the Hermitian-conjugate partner ρ ↦ (K(ρ))† of every sandwich.
fn with_hc(mut s: Vec<Sandwich>) -> Vec<Sandwich> {
    let partners: Vec<Sandwich> = s
        .iter()
        .map(|w| Sandwich {
            c: w.c.conj(),
            left: w.right.dagger(),
            right: w.left.dagger(),
        })
        .collect();
    s.extend(partners);
    s
}

/// ½(K + K‡) with K‡(ρ) = K(ρ†)†. A cross dissipator L(a, b) is neither
/// trace- nor Hermiticity-preserving on its own; its Hermitian part
/// ½[L(a, b) + L(b, a)] is both.
fn hermitian_part(s: Vec<Sandwich>) -> Vec<Sandwich> {
    with_hc(s)
        .into_iter()
        .map(|w| Sandwich { c: w.c * 0.5, ..w })
        .collect()
}

fn concat(parts: Vec<Vec<Sandwich>>) -> Vec<Sandwich> {
    parts.into_iter().flatten().collect()
}

fn term(label: &str, kind: CoeffKind, sandwiches: Vec<Sandwich>) -> LiouvillianTerm {
    LiouvillianTerm {
        label: label.to_string(),
        kind,
        sandwiches,
    }
}

/// Static part of H′_S: Δ|H⟩⟨H| + (Δ−δ)|V⟩⟨V| + ⟨B⟩g(a_H†σ_H2 + a_H†σ_H1 + a_V†σ_V2 + a_V†σ_V1 + H.c.).
fn static_hamiltonian(ops: &ElementaryOps, p: &PhysicalParams, b_avg: f64) -> QuantumOp {
    let ah_d = ops.a_h.dagger();
    let av_d = ops.a_v.dagger();
    let cav = &(&(&(&ah_d * &ops.s_h2) + &(&ah_d * &ops.s_h1)) + &(&av_d * &ops.s_v2))
        + &(&av_d * &ops.s_v1);
    let cav = (&cav + &cav.dagger()).scale_re(b_avg * p.g);
    let free = &ops.projector(DotState::H).scale_re(p.delta_h())
        + &ops.projector(DotState::V).scale_re(p.delta_v());
    &free + &cav
}

/// Drive operator D with H′_S(t) = H_static + Ω_H(t)·D, D = ⟨B⟩/2 (σ_H2 + σ_H1 + H.c.).
fn drive_operator(ops: &ElementaryOps, b_avg: f64) -> QuantumOp {
    let x = &ops.s_h2 + &ops.s_h1;
    (&x + &x.dagger()).scale_re(0.5 * b_avg)
}

/// H′_S(t) with the renormalized couplings ⟨B⟩g and ⟨B⟩Ω_H(t).
pub fn build_hamiltonian(p: &PhysicalParams, b_avg: f64, t: f64) -> QuantumOp {
    let ops = ElementaryOps::build(HilbertLayout::new(p.n_max));
    let pulse = PulseShape::from_params(p);
    &static_hamiltonian(&ops, p, b_avg) + &drive_operator(&ops, b_avg).scale_re(pulse.omega(t))
}

/// The complete list of master-equation terms for `p`.
pub fn build_liouvillian_terms(
    p: &PhysicalParams,
    kernel: &PhononKernel,
    cfg: &ModelConfig,
) -> Result<Vec<LiouvillianTerm>> {
    cfg.check(p)?;
    let ops = ElementaryOps::build(HilbertLayout::new(p.n_max));
    let b_avg = if cfg.phonons_enabled { kernel.b_avg } else { 1.0 };
    let (ah, av) = (&ops.a_h, &ops.a_v);
    let (h1, h2, v1, v2) = (&ops.s_h1, &ops.s_h2, &ops.s_v1, &ops.s_v2);
    let d = |o: &QuantumOp| o.dagger();
    let m = |x: &QuantumOp, y: &QuantumOp| x * y;

    let mut terms = vec![
        term(
            "H_static",
            CoeffKind::Constant(1.0),
            commutator(&static_hamiltonian(&ops, p, b_avg), -I),
        ),
        term(
            "H_drive",
            CoeffKind::Drive(1.0),
            commutator(&drive_operator(&ops, b_avg), -I),
        ),
        term("kappa/2 L(a_H)", CoeffKind::Constant(p.kappa / 2.0), lindblad(ah)),
        term("kappa/2 L(a_V)", CoeffKind::Constant(p.kappa / 2.0), lindblad(av)),
        term("gamma_B/2 L(s_H1)", CoeffKind::Constant(p.gamma_b / 2.0), lindblad(h1)),
        term("gamma_B/2 L(s_V1)", CoeffKind::Constant(p.gamma_b / 2.0), lindblad(v1)),
        term("gamma_E/2 L(s_H2)", CoeffKind::Constant(p.gamma_e / 2.0), lindblad(h2)),
        term("gamma_E/2 L(s_V2)", CoeffKind::Constant(p.gamma_e / 2.0), lindblad(v2)),
        term(
            "gamma'_B/2 L(|B><B|)",
            CoeffKind::Constant(p.gamma_b_deph / 2.0),
            lindblad(ops.projector(DotState::B)),
        ),
        term(
            "gamma'_E/2 L(|H><H|)",
            CoeffKind::Constant(p.gamma_e_deph / 2.0),
            lindblad(ops.projector(DotState::H)),
        ),
        term(
            "gamma'_E/2 L(|V><V|)",
            CoeffKind::Constant(p.gamma_e_deph / 2.0),
            lindblad(ops.projector(DotState::V)),
        ),
    ];
    if !cfg.phonons_enabled {
        return Ok(terms);
    }

    let r = &kernel.rates;
    // One-photon cavity-assisted phonon scattering.
    terms.push(term(
        "Gamma+_H {L(a_H s_H1^+) + L(a_H^+ s_H2)}",
        CoeffKind::Constant(r.gamma_plus_h),
        concat(vec![lindblad(&m(ah, &d(h1))), lindblad(&m(&d(ah), h2))]),
    ));
    terms.push(term(
        "Gamma+_V {L(a_V s_V1^+) + L(a_V^+ s_V2)}",
        CoeffKind::Constant(r.gamma_plus_v),
        concat(vec![lindblad(&m(av, &d(v1))), lindblad(&m(&d(av), v2))]),
    ));
    terms.push(term(
        "Gamma-_H {L(a_H s_H2^+) + L(a_H^+ s_H1)}",
        CoeffKind::Constant(r.gamma_minus_h),
        concat(vec![lindblad(&m(ah, &d(h2))), lindblad(&m(&d(ah), h1))]),
    ));
    terms.push(term(
        "Gamma-_V {L(a_V s_V2^+) + L(a_V^+ s_V1)}",
        CoeffKind::Constant(r.gamma_minus_v),
        concat(vec![lindblad(&m(av, &d(v2))), lindblad(&m(&d(av), v1))]),
    ));
    // Pulse-assisted phonon scattering.
    terms.push(term(
        "Gamma-_Omega(t) {L(s_H2^+) + L(s_H1)}",
        CoeffKind::PulseSquared(r.k_minus_omega),
        concat(vec![lindblad(&d(h2)), lindblad(h1)]),
    ));
    terms.push(term(
        "Gamma+_Omega(t) {L(s_H1^+) + L(s_H2)}",
        CoeffKind::PulseSquared(r.k_plus_omega),
        concat(vec![lindblad(&d(h1)), lindblad(h2)]),
    ));
    if cfg.include_tp_terms {
        terms.push(term(
            "Gamma^TP_Omega(t) {L(s_H1, s_H2^+) + L(s_H2^+, s_H1)}",
            CoeffKind::PulseSquared(r.k_tp_omega),
            concat(vec![dissipator(h1, &d(h2), 1.0), dissipator(&d(h2), h1, 1.0)]),
        ));
    }
    if cfg.include_rabi_terms {
        terms.push(term(
            "Gamma^I_B {L(s_H1, s_H1^+ s_H1) - L(s_H2^+, s_H2 s_H2^+)} + H.c.",
            CoeffKind::RabiImag,
            with_hc(concat(vec![
                dissipator(h1, &m(&d(h1), h1), 1.0),
                dissipator(&d(h2), &m(h2, &d(h2)), -1.0),
            ])),
        ));
    }
    if cfg.include_cross_coupling {
        terms.push(term(
            "Gamma+_V {L(a_H s_H1^+, a_V s_V1^+) + L(a_H^+ s_H2, a_V^+ s_V2)}",
            CoeffKind::Constant(r.gamma_plus_v),
            hermitian_part(concat(vec![
                dissipator(&m(ah, &d(h1)), &m(av, &d(v1)), 1.0),
                dissipator(&m(&d(ah), h2), &m(&d(av), v2), 1.0),
            ])),
        ));
        terms.push(term(
            "Gamma+_H {L(a_V s_V1^+, a_H s_H1^+) + L(a_V^+ s_V2, a_H^+ s_H2)}",
            CoeffKind::Constant(r.gamma_plus_h),
            hermitian_part(concat(vec![
                dissipator(&m(av, &d(v1)), &m(ah, &d(h1)), 1.0),
                dissipator(&m(&d(av), v2), &m(&d(ah), h2), 1.0),
            ])),
        ));
        if cfg.include_lamb_shifts {
            let x1 = m(&m(&d(ah), h1), &m(av, &d(v1)));
            let x2 = m(&m(ah, &d(h2)), &m(&d(av), v2));
            terms.push(term(
                "-i Delta+_V {[a_H^+ s_H1 a_V s_V1^+, .] + [a_H s_H2^+ a_V^+ s_V2, .]} + H.c.",
                CoeffKind::Constant(r.delta_plus_v),
                with_hc(concat(vec![commutator(&x1, -I), commutator(&x2, -I)])),
            ));
            let y1 = m(&m(&d(av), v1), &m(ah, &d(h1)));
            let y2 = m(&m(av, &d(v2)), &m(&d(ah), h2));
            terms.push(term(
                "-i Delta+_H {[a_V^+ s_V1 a_H s_H1^+, .] + [a_V s_V2^+ a_H^+ s_H2, .]} + H.c.",
                CoeffKind::Constant(r.delta_plus_h),
                with_hc(concat(vec![commutator(&y1, -I), commutator(&y2, -I)])),
            ));
        }
    }
    // Terms grouped under one trailing "+ H.c.".
    if cfg.include_tp_terms {
        terms.push(term(
            "[Gamma^TP_H L(a_H s_H2^+, a_H^+ s_H1) + H.c.]",
            CoeffKind::Constant(r.gamma_tp_h),
            with_hc(dissipator(&m(ah, &d(h2)), &m(&d(ah), h1), 1.0)),
        ));
        terms.push(term(
            "[Gamma^TP_V L(a_V s_V2^+, a_V^+ s_V1) + H.c.]",
            CoeffKind::Constant(r.gamma_tp_v),
            with_hc(dissipator(&m(av, &d(v2)), &m(&d(av), v1), 1.0)),
        ));
    }
    if cfg.include_rabi_terms {
        terms.push(term(
            "[Gamma^R_B {L(s_H1) + L(s_H2) - L(s_H2^+, s_H1)} + H.c.]",
            CoeffKind::RabiReal,
            with_hc(concat(vec![
                lindblad(h1),
                lindblad(h2),
                dissipator(&d(h2), h1, -1.0),
            ])),
        ));
    }
    if cfg.include_lamb_shifts {
        terms.push(term(
            "[i Delta^p_Omega(t) [s_H2 s_H1, .] + H.c.]",
            CoeffKind::PulseSquared(r.delta_p_omega),
            with_hc(commutator(&m(h2, h1), I)),
        ));
        terms.push(term(
            "[i Delta-_Omega(t) {[s_H2^+ s_H2, .] + [s_H1 s_H1^+, .]} + H.c.]",
            CoeffKind::PulseSquared(r.delta_minus_omega_kernel),
            with_hc(concat(vec![
                commutator(&m(&d(h2), h2), I),
                commutator(&m(h1, &d(h1)), I),
            ])),
        ));
        for (k, a, s1, s2, shift, shift_p) in [
            ("H", ah, h1, h2, r.delta_minus_h, r.delta_minus_ph),
            ("V", av, v1, v2, r.delta_minus_v, r.delta_minus_pv),
        ] {
            let x = m(&m(&d(a), s2), &m(a, &d(s2)));
            let y = m(&m(a, &d(s1)), &m(&d(a), s1));
            terms.push(term(
                &format!("[i Delta-_{k} {{[a^+ s_2 a s_2^+, .] + [a s_1^+ a^+ s_1, .]}} + H.c.]"),
                CoeffKind::Constant(shift),
                with_hc(concat(vec![commutator(&x, I), commutator(&y, I)])),
            ));
            let z = m(&m(&d(a), s2), &m(&d(a), s1));
            terms.push(term(
                &format!("[i Delta-_p{k} [a^+ s_2 a^+ s_1, .] + H.c.]"),
                CoeffKind::Constant(shift_p),
                with_hc(commutator(&z, I)),
            ));
        }
    }
    Ok(terms)
}

/// Instantaneous scalar coefficients of the time-dependent groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub omega: f64,
    pub pulse_sq: f64,
    pub rabi_real: f64,
    pub rabi_imag: f64,
}

/// Compiled master-equation generator.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: PhysicalParams,
    pub config: ModelConfig,
    pub layout: HilbertLayout,
    pub ops: ElementaryOps,
    pub pulse: PulseShape,
    pub b_avg: f64,
    pub terms: Vec<LiouvillianTerm>,
    rabi: RabiTable,
    b_avg_sq: f64,
    constant: SparseSuperop,
    drive: SparseSuperop,
    pulse_sq: SparseSuperop,
    rabi_real: SparseSuperop,
    rabi_imag: SparseSuperop,
}

impl Model {
    pub fn new(p: &PhysicalParams, kernel: &PhononKernel, cfg: ModelConfig) -> Result<Self> {
        let terms = build_liouvillian_terms(p, kernel, &cfg)?;
        let layout = HilbertLayout::new(p.n_max);
        let d2 = layout.total_dim().pow(2);
        let mut constant = SuperopBuilder::new(d2);
        let mut drive = SuperopBuilder::new(d2);
        let mut pulse_sq = SuperopBuilder::new(d2);
        let mut rabi_real = SuperopBuilder::new(d2);
        let mut rabi_imag = SuperopBuilder::new(d2);
        for t in &terms {
            let (builder, scale) = match t.kind {
                CoeffKind::Constant(c) => (&mut constant, c),
                CoeffKind::Drive(c) => (&mut drive, c),
                CoeffKind::PulseSquared(c) => (&mut pulse_sq, c),
                CoeffKind::RabiReal => (&mut rabi_real, 1.0),
                CoeffKind::RabiImag => (&mut rabi_imag, 1.0),
            };
            if scale == 0.0 {
                continue;
            }
            for s in &t.sandwiches {
                builder.add_sandwich(s.c * scale, &s.left, &s.right);
            }
        }
        let b_avg = if cfg.phonons_enabled { kernel.b_avg } else { 1.0 };
        Ok(Model {
            params: p.clone(),
            config: cfg,
            layout,
            ops: ElementaryOps::build(layout),
            pulse: PulseShape::from_params(p),
            b_avg,
            terms,
            rabi: kernel.rabi.clone(),
            b_avg_sq: kernel.rates.b_avg_sq,
            constant: constant.build(),
            drive: drive.build(),
            pulse_sq: pulse_sq.build(),
            rabi_real: rabi_real.build(),
            rabi_imag: rabi_imag.build(),
        })
    }

    /// Builds the phonon kernel and the model in one go.
    pub fn from_params(p: &PhysicalParams) -> Result<(Self, PhononKernel)> {
        let kernel = PhononKernel::build(p)?;
        let model = Model::new(p, &kernel, ModelConfig::for_params(p))?;
        Ok((model, kernel))
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn hamiltonian(&self, t: f64) -> QuantumOp {
        build_hamiltonian(&self.params, self.b_avg, t)
    }

    pub fn coefficients(&self, t: f64) -> Coefficients {
        let omega = self.pulse.omega(t);
        if omega == 0.0 {
            return Coefficients {
                omega,
                pulse_sq: 0.0,
                rabi_real: 0.0,
                rabi_imag: 0.0,
            };
        }
        let (kr, ki) = self
            .rabi
            .lookup(self.b_avg * omega)
            .expect("Rabi table spans [0, 1.2 <B> Omega_H0]");
        Coefficients {
            omega,
            pulse_sq: 0.25 * omega * omega,
            rabi_real: 2.0 * 0.25 * omega * omega * self.b_avg_sq * kr,
            rabi_imag: omega * omega * self.b_avg_sq * ki,
        }
    }

    /// Coefficient multiplying each term's superoperator at time `t`.
    pub fn term_coefficients(&self, t: f64) -> Vec<(String, f64)> {
        let c = self.coefficients(t);
        self.terms
            .iter()
            .map(|term| {
                let v = match term.kind {
                    CoeffKind::Constant(x) => x,
                    CoeffKind::Drive(x) => x * c.omega,
                    CoeffKind::PulseSquared(x) => x * c.pulse_sq,
                    CoeffKind::RabiReal => c.rabi_real,
                    CoeffKind::RabiImag => c.rabi_imag,
                };
                (term.label.clone(), v)
            })
            .collect()
    }

    /// `out = L(t)·v` for row-major vectorized ρ.
    pub fn apply(&self, t: f64, v: &[C64], out: &mut [C64]) {
        out.fill(ZERO);
        self.constant.apply_add(ONE, v, out);
        let c = self.coefficients(t);
        if c.omega != 0.0 {
            self.drive.apply_add(C64::new(c.omega, 0.0), v, out);
            self.pulse_sq.apply_add(C64::new(c.pulse_sq, 0.0), v, out);
            self.rabi_real.apply_add(C64::new(c.rabi_real, 0.0), v, out);
            self.rabi_imag.apply_add(C64::new(c.rabi_imag, 0.0), v, out);
        }
    }

    /// `out = L·v` with every pulse-driven group switched off, i.e. the
    /// generator after the cutoff.
    pub fn apply_static(&self, v: &[C64], out: &mut [C64]) {
        out.fill(ZERO);
        self.constant.apply_add(ONE, v, out);
    }

    /// Whether the generator is constant from `t` on.
    pub fn is_static_after(&self, t: f64) -> bool {
        t >= self.pulse.cutoff
    }

    /// Transpose of the post-gate (drive-free) generator, which propagates
    /// vec(Oᵀ) of Heisenberg-picture observables.
    pub fn static_transpose(&self) -> SparseSuperop {
        self.constant.transpose()
    }

    /// dρ/dt at time `t` for a dense ρ.
    pub fn rhs(&self, rho: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
        let v = vectorize(rho);
        let mut out = vec![ZERO; v.len()];
        self.apply(t, &v, &mut out);
        unvectorize(&out, rho.nrows())
    }

    pub fn superop_nnz(&self) -> usize {
        self.constant.nnz()
            + self.drive.nnz()
            + self.pulse_sq.nnz()
            + self.rabi_real.nnz()
            + self.rabi_imag.nnz()
    }
}

pub fn vectorize(m: &DMatrix<C64>) -> Vec<C64> {
    let d = m.nrows();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            v.push(m[(i, j)]);
        }
    }
    v
}

pub fn unvectorize(v: &[C64], d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |i, j| v[i * d + j])
}
