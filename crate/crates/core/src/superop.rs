//! Sparse superoperators acting on row-major vectorized density matrices.
//!
//! With `vec(ρ)[i·d + j] = ρ_ij`, a sandwich `ρ ↦ AρB` is the Kronecker
//! product `A ⊗ Bᵀ`.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::ops::QuantumOp;

/// Compressed sparse row matrix over complex numbers.
#[derive(Debug, Clone, Default)]
pub struct SparseSuperop {
    pub dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseSuperop {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// `out += c · S·v`.
    pub fn apply_add(&self, c: C64, v: &[C64], out: &mut [C64]) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * v[self.cols[k]];
            }
            *o += c * acc;
        }
    }

    pub fn transpose(&self) -> SparseSuperop {
        let mut b = SuperopBuilder::new(self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                b.push(self.cols[k], r, self.vals[k]);
            }
        }
        b.build()
    }
}

/// Accumulates entries (summing duplicates) before compressing to CSR.
#[derive(Debug, Clone)]
pub struct SuperopBuilder {
    dim: usize,
    entries: BTreeMap<(usize, usize), C64>,
}

impl SuperopBuilder {
    /// `dim` is the side of the superoperator, i.e. d² for a d×d ρ.
    pub fn new(dim: usize) -> Self {
        SuperopBuilder {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, v: C64) {
        *self.entries.entry((row, col)).or_insert(C64::new(0.0, 0.0)) += v;
    }

    /// Adds `c · (ρ ↦ AρB)`.
    pub fn add_sandwich(&mut self, c: C64, a: &QuantumOp, b: &QuantumOp) {
        let d = a.dim();
        let a_nz = a.nonzeros();
        let b_nz = b.nonzeros();
        // (A ⊗ Bᵀ)[(i,j),(k,l)] = A_ik B_lj
        for &(i, k, av) in &a_nz {
            for &(l, j, bv) in &b_nz {
                self.push(i * d + j, k * d + l, c * av * bv);
            }
        }
    }

    pub fn build(self) -> SparseSuperop {
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut vals = Vec::with_capacity(self.entries.len());
        for (&(r, c), &v) in &self.entries {
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..self.dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseSuperop {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn vec_rm(m: &DMatrix<C64>) -> Vec<C64> {
        let d = m.nrows();
        (0..d * d).map(|k| m[(k / d, k % d)]).collect()
    }

    #[test]
    fn sandwich_matches_dense_product() {
        let d = 5;
        let f = |s: f64| DMatrix::from_fn(d, d, |i, j| C64::new((i as f64 * s + j as f64).sin(), (i * j) as f64 * 0.1 - s));
        let (a, b, rho) = (f(0.3), f(1.7), f(-0.4));
        let mut builder = SuperopBuilder::new(d * d);
        let c = C64::new(0.5, -2.0);
        builder.add_sandwich(c, &QuantumOp(a.clone()), &QuantumOp(b.clone()));
        let s = builder.build();
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        s.apply_add(C64::new(1.0, 0.0), &vec_rm(&rho), &mut out);
        let expect = vec_rm(&(&a * &rho * &b * c));
        for (x, y) in out.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-12);
        }

        let st = s.transpose();
        let mut probe = vec![C64::new(0.0, 0.0); d * d];
        probe[3] = C64::new(1.0, 0.0);
        let mut col = vec![C64::new(0.0, 0.0); d * d];
        st.apply_add(C64::new(1.0, 0.0), &probe, &mut col);
        // Row 3 of S equals column 3 of Sᵀ.
        for k in 0..d * d {
            let mut e = vec![C64::new(0.0, 0.0); d * d];
            e[k] = C64::new(1.0, 0.0);
            let mut sk = vec![C64::new(0.0, 0.0); d * d];
            s.apply_add(C64::new(1.0, 0.0), &e, &mut sk);
            assert!((sk[3] - col[k]).norm() < 1e-14);
        }
    }
}
