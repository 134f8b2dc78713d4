//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};

/// Relative symmetry tolerance accepted on input.
pub const SYMMETRY_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 60;

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

/// Decomposes `S = V Λ Vᵀ` with cyclic Jacobi rotations.
pub fn jacobi_eigensym(s: &DMatrix<f64>) -> Result<SymEigen> {
    let n = s.nrows();
    if !s.is_square() {
        return invalid(format!("matrix must be square, got {}x{}", s.nrows(), s.ncols()));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return invalid("matrix entries must be finite");
    }
    let scale = 1.0 + s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        for j in 0..i {
            if (s[(i, j)] - s[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return invalid(format!("matrix is not symmetric at ({i}, {j})"));
            }
        }
    }
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (s[(i, j)] + s[(j, i)]);
        }
    }
    let mut v = identity(n);
    diagonalize(&mut a, &mut v, n);
    Ok(sorted(&a, &v, n))
}

/// Workspace that reuses the previous eigenbasis as a starting rotation.
///
/// Successive calls on slowly varying matrices (as inside an iterative
/// solver) are then nearly diagonal after the change of basis and converge
/// in one or two sweeps.
#[derive(Debug, Clone)]
pub struct WarmJacobi {
    n: usize,
    basis: Vec<f64>,
    a: Vec<f64>,
    tmp: Vec<f64>,
    rot: Vec<f64>,
}

impl WarmJacobi {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            basis: identity(n),
            a: vec![0.0; n * n],
            tmp: vec![0.0; n * n],
            rot: vec![0.0; n * n],
        }
    }

    /// Eigen-decomposition of the row-major symmetric matrix `s`; returns
    /// unsorted eigenvalues, eigenvectors are the columns of the returned
    /// row-major matrix.
    pub fn decompose(&mut self, s: &[f64]) -> (&[f64], Vec<f64>) {
        let n = self.n;
        // a = Bᵀ S B
        matmul_tn(&self.basis, s, &mut self.tmp, n);
        matmul_nn(&self.tmp, &self.basis, &mut self.a, n);
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (self.a[i * n + j] + self.a[j * n + i]);
                self.a[i * n + j] = m;
                self.a[j * n + i] = m;
            }
        }
        self.rot.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..n {
            self.rot[i * n + i] = 1.0;
        }
        diagonalize(&mut self.a, &mut self.rot, n);
        let mut vecs = vec![0.0; n * n];
        matmul_nn(&self.basis, &self.rot, &mut vecs, n);
        self.basis.copy_from_slice(&vecs);
        let vals: Vec<f64> = (0..n).map(|i| self.a[i * n + i]).collect();
        self.tmp[..n].copy_from_slice(&vals);
        (&self.tmp[..n], vecs)
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    v
}

fn matmul_nn(x: &[f64], y: &[f64], out: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += x[i * n + k] * y[k * n + j];
            }
            out[i * n + j] = acc;
        }
    }
}

fn matmul_tn(x: &[f64], y: &[f64], out: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += x[k * n + i] * y[k * n + j];
            }
            out[i * n + j] = acc;
        }
    }
}

/// Runs Jacobi sweeps on row-major `a` in place, accumulating rotations into
/// the columns of `v`.
fn diagonalize(a: &mut [f64], v: &mut [f64], n: usize) {
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>();
    if total == 0.0 {
        return;
    }
    let tiny = f64::EPSILON * f64::EPSILON * total;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= tiny {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq * apq <= tiny / ((n * n) as f64) {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
}

fn sorted(a: &[f64], v: &[f64], n: usize) -> SymEigen {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| a[i * n + i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| v[r * n + order[c]]);
    SymEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn residuals(s: &DMatrix<f64>, e: &SymEigen) -> (f64, f64) {
        let lam = DMatrix::from_diagonal(&e.values);
        let recon = (s - &e.vectors * lam * e.vectors.transpose()).norm();
        let n = s.nrows();
        let ortho = (e.vectors.transpose() * &e.vectors - DMatrix::identity(n, n)).norm();
        (recon, ortho)
    }

    #[test]
    fn diagonal_input() {
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let e = jacobi_eigensym(&s).unwrap();
        assert_eq!(e.values.as_slice(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn textbook_two_by_two() {
        let s = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = jacobi_eigensym(&s).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vectors.column(0);
        let v1 = e.vectors.column(1);
        // up to sign
        assert!((v0[0] * v0[1] + r * r).abs() < 1e-14);
        assert!((v1[0] * v1[1] - r * r).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonsymmetric() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(jacobi_eigensym(&s).is_err());
    }

    #[test]
    fn zero_matrix() {
        let e = jacobi_eigensym(&DMatrix::zeros(4, 4)).unwrap();
        assert!(e.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matches_nalgebra_spectrum() {
        let s = DMatrix::from_fn(12, 12, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0 + ((j * 7 + i * 3) % 11) as f64);
        let e = jacobi_eigensym(&s).unwrap();
        let mut reference: Vec<f64> = s.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in e.values.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn warm_start_agrees_with_cold() {
        let n = 6;
        let s1 = DMatrix::from_fn(n, n, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let s2 = &s1 + DMatrix::from_fn(n, n, |i, j| 1e-3 * ((i + j) % 3) as f64);
        let mut warm = WarmJacobi::new(n);
        for s in [&s1, &s2] {
            let flat: Vec<f64> = (0..n * n).map(|k| s[(k / n, k % n)]).collect();
            let (vals, vecs) = warm.decompose(&flat);
            let mut got: Vec<f64> = vals.to_vec();
            got.sort_by(f64::total_cmp);
            let cold = jacobi_eigensym(s).unwrap();
            for (a, b) in got.iter().zip(cold.values.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
            let v = DMatrix::from_row_slice(n, n, &vecs);
            assert!((v.transpose() * &v - DMatrix::identity(n, n)).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn random_sixteen_by_sixteen(entries in proptest::collection::vec(-10.0f64..10.0, 256)) {
            let m = DMatrix::from_vec(16, 16, entries);
            let s = (&m + m.transpose()) * 0.5;
            let e = jacobi_eigensym(&s).unwrap();
            let (recon, ortho) = residuals(&s, &e);
            prop_assert!(recon <= 1e-9 * (1.0 + s.norm()));
            prop_assert!(ortho <= 1e-10);
            for w in e.values.as_slice().windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
        }
    }
}
