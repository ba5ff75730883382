//! Operators on the dot ⊗ Fock_H ⊗ Fock_V space.
//!
//! Basis order is `(qd, n_H, n_V)` row-major with the dot states ordered
//! G, H, V, B. Saved density matrices rely on this order.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const QD_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(usize)]
pub enum DotState {
    G = 0,
    H = 1,
    V = 2,
    B = 3,
}

impl DotState {
    pub const ALL: [DotState; 4] = [DotState::G, DotState::H, DotState::V, DotState::B];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertLayout {
    pub n_max: usize,
}

impl HilbertLayout {
    pub fn new(n_max: usize) -> Self {
        HilbertLayout { n_max }
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn total_dim(&self) -> usize {
        QD_DIM * self.fock_dim() * self.fock_dim()
    }

    pub fn index(&self, qd: DotState, n_h: usize, n_v: usize) -> usize {
        debug_assert!(n_h <= self.n_max && n_v <= self.n_max);
        let f = self.fock_dim();
        (qd as usize * f + n_h) * f + n_v
    }

    pub fn unpack(&self, index: usize) -> (DotState, usize, usize) {
        let f = self.fock_dim();
        let n_v = index % f;
        let n_h = (index / f) % f;
        (DotState::ALL[index / (f * f)], n_h, n_v)
    }

    /// Embeds a 4×4 dot operator as `A ⊗ I ⊗ I`.
    pub fn embed_dot(&self, a: &DMatrix<C64>) -> QuantumOp {
        let f = self.fock_dim();
        QuantumOp(kron(&kron(a, &DMatrix::identity(f, f)), &DMatrix::identity(f, f)))
    }

    /// Embeds a single-mode operator on the H mode: `I ⊗ A ⊗ I`.
    pub fn embed_mode_h(&self, a: &DMatrix<C64>) -> QuantumOp {
        let f = self.fock_dim();
        QuantumOp(kron(
            &kron(&DMatrix::identity(QD_DIM, QD_DIM), a),
            &DMatrix::identity(f, f),
        ))
    }

    /// Embeds a single-mode operator on the V mode: `I ⊗ I ⊗ A`.
    pub fn embed_mode_v(&self, a: &DMatrix<C64>) -> QuantumOp {
        let f = self.fock_dim();
        QuantumOp(kron(
            &kron(&DMatrix::identity(QD_DIM, QD_DIM), &DMatrix::identity(f, f)),
            a,
        ))
    }

    pub fn identity(&self) -> QuantumOp {
        QuantumOp::identity(self.total_dim())
    }

    /// Projector onto the basis state `|qd, n_h, n_v⟩`.
    pub fn basis_projector(&self, qd: DotState, n_h: usize, n_v: usize) -> QuantumOp {
        let d = self.total_dim();
        let i = self.index(qd, n_h, n_v);
        let mut m = DMatrix::zeros(d, d);
        m[(i, i)] = C64::new(1.0, 0.0);
        QuantumOp(m)
    }
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Truncated annihilation operator Σ √(n+1)|n⟩⟨n+1| on `0..=n_max`.
pub fn annihilation(n_max: usize) -> DMatrix<C64> {
    let f = n_max + 1;
    let mut a = DMatrix::zeros(f, f);
    for n in 0..n_max {
        a[(n, n + 1)] = C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    a
}

/// `|to⟩⟨from|` on the dot.
pub fn dot_transition(to: DotState, from: DotState) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(QD_DIM, QD_DIM);
    m[(to as usize, from as usize)] = C64::new(1.0, 0.0);
    m
}

/// Dense complex operator on the composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumOp(pub DMatrix<C64>);

impl QuantumOp {
    pub fn identity(dim: usize) -> Self {
        QuantumOp(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        QuantumOp(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dagger(&self) -> Self {
        QuantumOp(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        QuantumOp(&self.0 * c)
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        QuantumOp(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// max |(A − A†)_ij|.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.0 - self.0.adjoint()))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = QuantumOp::identity(self.dim());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Tr(op·ρ) for a matrix ρ of matching dimension.
    pub fn expectation_matrix(&self, rho: &DMatrix<C64>) -> Result<C64> {
        if rho.nrows() != self.dim() || rho.ncols() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: rho.nrows(),
            });
        }
        Ok(trace_of_product(&self.0, rho))
    }

    /// Nonzero entries as (row, col, value).
    pub fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for c in 0..self.0.ncols() {
            for r in 0..self.0.nrows() {
                let v = self.0[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    out.push((r, c, v));
                }
            }
        }
        out
    }
}

/// max |m_ij|.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Tr(A·B) without forming the product.
pub fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

impl<'a> Mul<&'a QuantumOp> for &'a QuantumOp {
    type Output = QuantumOp;
    fn mul(self, rhs: &QuantumOp) -> QuantumOp {
        QuantumOp(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a QuantumOp> for &'a QuantumOp {
    type Output = QuantumOp;
    fn add(self, rhs: &QuantumOp) -> QuantumOp {
        QuantumOp(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a QuantumOp> for &'a QuantumOp {
    type Output = QuantumOp;
    fn sub(self, rhs: &QuantumOp) -> QuantumOp {
        QuantumOp(&self.0 - &rhs.0)
    }
}

/// Named elementary operators of the dot–cavity system.
#[derive(Debug, Clone)]
pub struct ElementaryOps {
    pub layout: HilbertLayout,
    pub a_h: QuantumOp,
    pub a_v: QuantumOp,
    /// |H⟩⟨B|
    pub s_h1: QuantumOp,
    /// |G⟩⟨H|
    pub s_h2: QuantumOp,
    /// |V⟩⟨B|
    pub s_v1: QuantumOp,
    /// |G⟩⟨V|
    pub s_v2: QuantumOp,
    pub proj: [QuantumOp; 4],
    pub identity: QuantumOp,
}

impl ElementaryOps {
    pub fn build(layout: HilbertLayout) -> Self {
        use DotState::*;
        let a = annihilation(layout.n_max);
        let dot = |to, from| layout.embed_dot(&dot_transition(to, from));
        ElementaryOps {
            layout,
            a_h: layout.embed_mode_h(&a),
            a_v: layout.embed_mode_v(&a),
            s_h1: dot(H, B),
            s_h2: dot(G, H),
            s_v1: dot(V, B),
            s_v2: dot(G, V),
            proj: [dot(G, G), dot(H, H), dot(V, V), dot(B, B)],
            identity: layout.identity(),
        }
    }

    pub fn projector(&self, s: DotState) -> &QuantumOp {
        &self.proj[s as usize]
    }

    pub fn mode(&self, pol: Polarization) -> &QuantumOp {
        match pol {
            Polarization::H => &self.a_h,
            Polarization::V => &self.a_v,
        }
    }

    pub fn number(&self, pol: Polarization) -> QuantumOp {
        let a = self.mode(pol);
        &a.dagger() * a
    }

    /// a†ᵏ aᵏ for one mode.
    pub fn factorial_moment(&self, pol: Polarization, k: u32) -> QuantumOp {
        let a = self.mode(pol);
        &a.dagger().pow(k) * &a.pow(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn label(self) -> &'static str {
        match self {
            Polarization::H => "H",
            Polarization::V => "V",
        }
    }
}

/// Tr(op·ρ).
pub fn expectation(op: &QuantumOp, rho: &crate::dynamics::DensityState) -> Result<C64> {
    op.expectation_matrix(&rho.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_dense(n: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn layout_dimensions_and_bijection() {
        let l = HilbertLayout::new(2);
        assert_eq!(l.total_dim(), 36);
        let mut seen = vec![false; l.total_dim()];
        for qd in DotState::ALL {
            for nh in 0..=2 {
                for nv in 0..=2 {
                    let i = l.index(qd, nh, nv);
                    assert!(!seen[i]);
                    seen[i] = true;
                    assert_eq!(l.unpack(i), (qd, nh, nv));
                }
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn truncated_commutator_is_identity_below_top_level() {
        let l = HilbertLayout::new(3);
        let ops = ElementaryOps::build(l);
        let c = ops.a_h.commutator(&ops.a_h.dagger());
        for i in 0..l.total_dim() {
            let (_, nh, _) = l.unpack(i);
            for j in 0..l.total_dim() {
                let expect = if i == j && nh < l.n_max { 1.0 } else if i == j { -(l.n_max as f64) } else { 0.0 };
                assert!((c.0[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn ladder_composition() {
        let l = HilbertLayout::new(2);
        let ops = ElementaryOps::build(l);
        let gb = l.embed_dot(&dot_transition(DotState::G, DotState::B));
        assert_eq!(&ops.s_h2 * &ops.s_h1, gb);
        assert_eq!(&ops.s_v2 * &ops.s_v1, gb);
    }

    #[test]
    fn expectation_examples() {
        let l = HilbertLayout::new(3);
        let ops = ElementaryOps::build(l);
        let vac = l.basis_projector(DotState::G, 0, 0);
        assert_eq!(ops.identity.expectation_matrix(&vac.0).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(ops.number(Polarization::H).expectation_matrix(&vac.0).unwrap(), C64::new(0.0, 0.0));
        let three = l.basis_projector(DotState::G, 3, 0);
        let m3 = ops.factorial_moment(Polarization::H, 3).expectation_matrix(&three.0).unwrap();
        assert!((m3 - C64::new(6.0, 0.0)).norm() < 1e-12);
        let small = HilbertLayout::new(1).identity();
        assert!(matches!(
            ops.identity.expectation_matrix(&small.0),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn embedding_commutes_with_products() {
        let l = HilbertLayout::new(2);
        let a = random_dense(3, 1);
        let b = random_dense(3, 2);
        let lhs = l.embed_mode_h(&(&a * &b));
        let rhs = &l.embed_mode_h(&a) * &l.embed_mode_h(&b);
        assert!(max_abs(&(lhs.0 - rhs.0)) < 1e-13);
        let a4 = random_dense(4, 3);
        let b4 = random_dense(4, 4);
        let lhs = l.embed_dot(&(&a4 * &b4));
        let rhs = &l.embed_dot(&a4) * &l.embed_dot(&b4);
        assert!(max_abs(&(lhs.0 - rhs.0)) < 1e-13);
    }

    #[test]
    fn dagger_reverses_products() {
        let a = QuantumOp(random_dense(12, 5));
        let b = QuantumOp(random_dense(12, 6));
        let lhs = (&a * &b).dagger();
        let rhs = &b.dagger() * &a.dagger();
        assert!(max_abs(&(lhs.0 - rhs.0)) < 1e-14);
        assert_eq!(a.dagger().dagger(), a);
    }
}
