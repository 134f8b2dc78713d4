use std::f64::consts::SQRT_2;
use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::model::HermitianMat;

/// Maps each user's Hermitian covariance `W_k` (and optional epigraph
/// scalars `t_k`) into one flat real decision vector.
///
/// Block `k` holds `N²` reals: the `N` diagonal entries, then the real parts
/// and then the imaginary parts of the strict lower triangle, both in
/// column-major order. Hermitian symmetry is therefore structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableLayout {
    pub n_antennas: usize,
    pub n_users: usize,
    pub has_epigraphs: bool,
}

impl VariableLayout {
    pub fn new(n_antennas: usize, n_users: usize, has_epigraphs: bool) -> Self {
        Self {
            n_antennas,
            n_users,
            has_epigraphs,
        }
    }

    pub fn block_len(&self) -> usize {
        self.n_antennas * self.n_antennas
    }

    pub fn block(&self, k: usize) -> Range<usize> {
        let l = self.block_len();
        k * l..(k + 1) * l
    }

    pub fn epigraph(&self, k: usize) -> Option<usize> {
        self.has_epigraphs.then(|| self.n_users * self.block_len() + k)
    }

    pub fn len(&self) -> usize {
        self.n_users * self.block_len() + if self.has_epigraphs { self.n_users } else { 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Strict lower-triangle pairs `(i, j)`, `i > j`, in parameter order.
    pub fn lower_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_antennas;
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for j in 0..n {
            for i in (j + 1)..n {
                out.push((i, j));
            }
        }
        out
    }

    /// Hermitian matrix with parameter `p` (within a block) set to one.
    pub fn basis_matrix(&self, p: usize) -> HermitianMat {
        let mut params = vec![0.0; self.block_len()];
        params[p] = 1.0;
        self.to_hermitian(&params)
    }

    /// Decodes one block of parameters.
    pub fn to_hermitian(&self, params: &[f64]) -> HermitianMat {
        let n = self.n_antennas;
        let pairs = self.lower_pairs();
        let np = pairs.len();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(params[i], 0.0);
        }
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            let z = Complex64::new(params[n + idx], params[n + np + idx]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        HermitianMat::new(m).expect("decoded matrix is Hermitian by construction")
    }

    /// Encodes a Hermitian matrix into its block parameters.
    pub fn from_hermitian(&self, w: &HermitianMat) -> Vec<f64> {
        let n = self.n_antennas;
        let m = w.as_matrix();
        let pairs = self.lower_pairs();
        let np = pairs.len();
        let mut out = vec![0.0; self.block_len()];
        for i in 0..n {
            out[i] = m[(i, i)].re;
        }
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            out[n + idx] = m[(i, j)].re;
            out[n + np + idx] = m[(i, j)].im;
        }
        out
    }

    /// All covariances from a full decision vector.
    pub fn covariances(&self, x: &[f64]) -> Vec<HermitianMat> {
        (0..self.n_users).map(|k| self.to_hermitian(&x[self.block(k)])).collect()
    }

    /// Coefficients `a` with `aᵀ params = Tr(H W)`.
    pub fn trace_coeffs(&self, h: &HermitianMat) -> Vec<f64> {
        let n = self.n_antennas;
        let m = h.as_matrix();
        let pairs = self.lower_pairs();
        let np = pairs.len();
        let mut out = vec![0.0; self.block_len()];
        for i in 0..n {
            out[i] = m[(i, i)].re;
        }
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            out[n + idx] = 2.0 * m[(i, j)].re;
            out[n + np + idx] = 2.0 * m[(i, j)].im;
        }
        out
    }

    /// Per-parameter weights such that `‖W‖_F = ‖weights ∘ params‖₂`.
    pub fn frobenius_weights(&self) -> Vec<f64> {
        let n = self.n_antennas;
        (0..self.block_len())
            .map(|p| if p < n { 1.0 } else { SQRT_2 })
            .collect()
    }
}
