//! Cone definitions, scaled vectorization and Euclidean projections.
//!
//! PSD blocks are stored as `svec`: the lower triangle in column-major order
//! with off-diagonal entries multiplied by `√2`, so that
//! `⟨X, Y⟩_F = svec(X)·svec(Y)`.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::jacobi::{jacobi_eigensym, WarmJacobi};

/// One segment of the cone product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    /// `{0}^m`; its dual is all of `R^m`.
    Zero(usize),
    /// `R_+^m`
    Nonneg(usize),
    /// `{(t, z) : ‖z‖ ≤ t}` with total length `m`.
    Soc(usize),
    /// `n×n` PSD matrices in svec form, length `n(n+1)/2`.
    Psd(usize),
}

impl Cone {
    pub fn len(&self) -> usize {
        match *self {
            Cone::Zero(m) | Cone::Nonneg(m) | Cone::Soc(m) => m,
            Cone::Psd(n) => n * (n + 1) / 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Index of entry `(i, j)`, `i >= j`, inside an svec of an `n×n` matrix.
pub fn svec_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i >= j && i < n);
    // columns 0..j contribute n + (n-1) + ... + (n-j+1) entries
    j * n - j * j.saturating_sub(1) / 2 + (i - j)
}

pub fn svec(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(svec_len(n));
    for j in 0..n {
        for i in j..n {
            if i == j {
                out.push(m[(i, i)]);
            } else {
                out.push(SQRT_2 * 0.5 * (m[(i, j)] + m[(j, i)]));
            }
        }
    }
    out
}

pub fn smat(v: &[f64], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for j in 0..n {
        for i in j..n {
            if i == j {
                m[(i, i)] = v[k];
            } else {
                let x = v[k] / SQRT_2;
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
            k += 1;
        }
    }
    m
}

fn smat_rowmajor(v: &[f64], n: usize, out: &mut [f64]) {
    let mut k = 0;
    for j in 0..n {
        for i in j..n {
            if i == j {
                out[i * n + i] = v[k];
            } else {
                let x = v[k] / SQRT_2;
                out[i * n + j] = x;
                out[j * n + i] = x;
            }
            k += 1;
        }
    }
}

pub fn project_nonneg(v: &mut [f64]) {
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

pub fn project_soc(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let t = v[0];
    let nz = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if nz <= t {
        return;
    }
    if nz <= -t {
        v.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let a = 0.5 * (t + nz);
    v[0] = a;
    let f = a / nz;
    v[1..].iter_mut().for_each(|x| *x *= f);
}

/// Projection of an svec onto the PSD cone, cold-started.
pub fn project_psd(v: &mut [f64], n: usize) {
    let m = smat(v, n);
    let e = jacobi_eigensym(&m).expect("smat output is symmetric");
    let mut out = DMatrix::zeros(n, n);
    for (k, &lam) in e.values.iter().enumerate() {
        if lam > 0.0 {
            let col = e.vectors.column(k);
            out += col * col.transpose() * lam;
        }
    }
    v.copy_from_slice(&svec(&out));
}

/// Projector onto a cone product that caches PSD eigenbases between calls.
#[derive(Debug, Clone)]
pub struct ConeProjector {
    cones: Vec<Cone>,
    psd: Vec<Option<WarmJacobi>>,
    scratch: Vec<f64>,
}

impl ConeProjector {
    pub fn new(cones: &[Cone]) -> Self {
        let psd = cones
            .iter()
            .map(|c| match c {
                Cone::Psd(n) => Some(WarmJacobi::new(*n)),
                _ => None,
            })
            .collect();
        let max_n = cones
            .iter()
            .map(|c| if let Cone::Psd(n) = c { n * n } else { 0 })
            .max()
            .unwrap_or(0);
        Self {
            cones: cones.to_vec(),
            psd,
            scratch: vec![0.0; max_n],
        }
    }

    /// Projects onto the dual cone `K*` (zero segments are left free).
    pub fn project_dual(&mut self, v: &mut [f64]) {
        self.project(v, true)
    }

    /// Projects onto the primal cone `K` (zero segments are zeroed).
    pub fn project_primal(&mut self, v: &mut [f64]) {
        self.project(v, false)
    }

    fn project(&mut self, v: &mut [f64], dual: bool) {
        let mut off = 0;
        for (idx, cone) in self.cones.iter().enumerate() {
            let len = cone.len();
            let seg = &mut v[off..off + len];
            match *cone {
                Cone::Zero(_) => {
                    if !dual {
                        seg.iter_mut().for_each(|x| *x = 0.0);
                    }
                }
                Cone::Nonneg(_) => project_nonneg(seg),
                Cone::Soc(_) => project_soc(seg),
                Cone::Psd(n) => {
                    let warm = self.psd[idx].as_mut().expect("psd workspace");
                    let dense = &mut self.scratch[..n * n];
                    smat_rowmajor(seg, n, dense);
                    let (vals, vecs) = warm.decompose(dense);
                    let vals = vals.to_vec();
                    let mut k = 0;
                    for j in 0..n {
                        for i in j..n {
                            let mut acc = 0.0;
                            for (e, &lam) in vals.iter().enumerate() {
                                if lam > 0.0 {
                                    acc += lam * vecs[i * n + e] * vecs[j * n + e];
                                }
                            }
                            seg[k] = if i == j { acc } else { SQRT_2 * acc };
                            k += 1;
                        }
                    }
                }
            }
            off += len;
        }
    }
}

/// Euclidean distance from `v` to the cone product (primal or dual).
pub fn distance_to_cone(cones: &[Cone], v: &[f64], dual: bool) -> f64 {
    let mut p = v.to_vec();
    let mut off = 0;
    for cone in cones {
        let len = cone.len();
        let seg = &mut p[off..off + len];
        match *cone {
            Cone::Zero(_) => {
                if !dual {
                    seg.iter_mut().for_each(|x| *x = 0.0);
                }
            }
            Cone::Nonneg(_) => project_nonneg(seg),
            Cone::Soc(_) => project_soc(seg),
            Cone::Psd(n) => project_psd(seg, n),
        }
        off += len;
    }
    v.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}
