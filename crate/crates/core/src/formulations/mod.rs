//! Robust beamforming programs in conic standard form.
//!
//! All three formulations share the objective `Σ Tr W_k`, one PSD block per
//! secondary user and the Hermitian parametrization of [`VariableLayout`].
//! They differ only in how the worst case over each uncertainty ball is
//! bounded.

mod layout;
mod worst_case;

pub use layout::VariableLayout;
pub use worst_case::{
    interference_combination, ip_worst, prop1_max_delta, prop1_min_delta, prop2_min_delta, sinr_lhs,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conic::{embed_hermitian, svec, Cone, ConicProgram, SparseMatrix};
use crate::error::{Error, Result};
use crate::model::{outer_product, HermitianMat, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulationKind {
    /// Trace bounds on every uncertain term.
    Lbcs,
    /// Per-term Frobenius bounds.
    Sbcs,
    /// One joint Frobenius bound per SINR constraint.
    Excs,
}

impl FormulationKind {
    pub const ALL: [FormulationKind; 3] = [Self::Lbcs, Self::Sbcs, Self::Excs];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Lbcs => "lbcs",
            Self::Sbcs => "sbcs",
            Self::Excs => "excs",
        }
    }
}

impl fmt::Display for FormulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str().to_uppercase())
    }
}

impl FromStr for FormulationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lbcs" => Ok(Self::Lbcs),
            "sbcs" => Ok(Self::Sbcs),
            "excs" => Ok(Self::Excs),
            other => Err(Error::Parse(format!(
                "unknown formulation '{other}' (expected lbcs, sbcs or excs)"
            ))),
        }
    }
}

/// A built program together with what is needed to read its solution.
#[derive(Debug, Clone)]
pub struct Formulation {
    pub kind: FormulationKind,
    pub layout: VariableLayout,
    pub program: ConicProgram,
    num_su: usize,
    num_pu: usize,
}

impl Formulation {
    pub fn covariances(&self, x: &[f64]) -> Vec<HermitianMat> {
        self.layout.covariances(x)
    }

    /// Copy of `x` with every epigraph scalar lowered to `‖W_k‖_F`.
    pub fn tighten_epigraphs(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        let weights = self.layout.frobenius_weights();
        for k in 0..self.layout.n_users {
            if let Some(t) = self.layout.epigraph(k) {
                out[t] = x[self.layout.block(k)]
                    .iter()
                    .zip(&weights)
                    .map(|(v, w)| (v * w).powi(2))
                    .sum::<f64>()
                    .sqrt();
            }
        }
        out
    }

    /// Per-user SINR margins `worst-case LHS − σ²γ_k`, read off the program
    /// rows at `x`.
    pub fn sinr_row_margins(&self, x: &[f64]) -> Vec<f64> {
        let s = self.slacks(x);
        match self.kind {
            FormulationKind::Lbcs | FormulationKind::Sbcs => s[..self.num_su].to_vec(),
            FormulationKind::Excs => {
                let start = self.num_pu;
                let len = 1 + self.layout.block_len();
                (0..self.num_su)
                    .map(|k| {
                        let seg = &s[start + k * len..start + (k + 1) * len];
                        let tail = seg[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                        seg[0] - tail
                    })
                    .collect()
            }
        }
    }

    /// Per-PU margins `κ_ℓ − worst-case interference` at `x`.
    pub fn ip_row_margins(&self, x: &[f64]) -> Vec<f64> {
        let s = self.slacks(x);
        let start = match self.kind {
            FormulationKind::Excs => 0,
            _ => self.num_su,
        };
        s[start..start + self.num_pu].to_vec()
    }

    fn slacks(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.program.a.mul_vec(x);
        self.program.b.iter().zip(ax).map(|(b, a)| b - a).collect()
    }
}

/// Row accumulator; `s = b − A x` for each row.
struct Rows {
    entries: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
}

impl Rows {
    fn new() -> Self {
        Self {
            entries: Vec::new(),
            b: Vec::new(),
        }
    }

    /// Adds a row whose slack equals `coeffs·x − offset`.
    fn push_affine(&mut self, coeffs: Vec<(usize, f64)>, offset: f64) {
        self.entries.push(coeffs.into_iter().map(|(c, v)| (c, -v)).collect());
        self.b.push(-offset);
    }
}

fn add_scaled(dst: &mut Vec<(usize, f64)>, base: usize, coeffs: &[f64], scale: f64) {
    if scale == 0.0 {
        return;
    }
    for (p, &v) in coeffs.iter().enumerate() {
        if v != 0.0 {
            dst.push((base + p, scale * v));
        }
    }
}

fn check_scenario(s: &ScenarioConfig) -> Result<()> {
    s.validate().map_err(|e| match e {
        Error::DimensionMismatch(m) => Error::InvalidArgument(m),
        other => other,
    })
}

/// Builds the program for `kind`.
pub fn build(kind: FormulationKind, s: &ScenarioConfig) -> Result<Formulation> {
    check_scenario(s)?;
    let n = s.n_antennas;
    let k_users = s.num_su();
    let l_users = s.num_pu();
    let has_epigraphs = match kind {
        FormulationKind::Lbcs => false,
        FormulationKind::Sbcs => true,
        FormulationKind::Excs => l_users > 0,
    };
    let layout = VariableLayout::new(n, k_users, has_epigraphs);
    let nvars = layout.len();
    let block_len = layout.block_len();
    let weights = layout.frobenius_weights();
    let identity = layout.trace_coeffs(&HermitianMat::identity(n));

    let mut rows = Rows::new();
    let mut cones = Vec::new();

    let h: Vec<HermitianMat> = s.su_channels.iter().map(outer_product).collect();
    let g: Vec<HermitianMat> = s.pu_channels.iter().map(outer_product).collect();
    let h_coeffs: Vec<Vec<f64>> = h.iter().map(|m| layout.trace_coeffs(m)).collect();
    let g_coeffs: Vec<Vec<f64>> = g.iter().map(|m| layout.trace_coeffs(m)).collect();

    // Linear SINR rows.
    if kind != FormulationKind::Excs && k_users > 0 {
        for k in 0..k_users {
            let gamma = s.sinr_thresholds[k];
            let eps = s.su_uncertainty[k].matrix_radius;
            let mut row = Vec::new();
            for i in 0..k_users {
                let sign = if i == k { 1.0 } else { -gamma };
                let base = layout.block(i).start;
                add_scaled(&mut row, base, &h_coeffs[k], sign);
                match kind {
                    FormulationKind::Lbcs => {
                        let pen = if i == k { eps } else { gamma * eps };
                        add_scaled(&mut row, base, &identity, -pen);
                    }
                    _ => {
                        let pen = if i == k { eps } else { gamma * eps };
                        if pen != 0.0 {
                            row.push((layout.epigraph(i).expect("epigraph present"), -pen));
                        }
                    }
                }
            }
            rows.push_affine(row, s.noise_power * gamma);
        }
        cones.push(Cone::Nonneg(k_users));
    }

    // Interference rows: κ − Σ_k (Tr(G W_k) + ξ·bound_k) ≥ 0.
    if l_users > 0 {
        for l in 0..l_users {
            let xi = s.pu_uncertainty[l].matrix_radius;
            let mut row = Vec::new();
            for k in 0..k_users {
                let base = layout.block(k).start;
                add_scaled(&mut row, base, &g_coeffs[l], -1.0);
                match kind {
                    FormulationKind::Lbcs => add_scaled(&mut row, base, &identity, -xi),
                    _ => {
                        if xi != 0.0 {
                            row.push((layout.epigraph(k).expect("epigraph present"), -xi));
                        }
                    }
                }
            }
            rows.push_affine(row, -s.ip_thresholds[l]);
        }
        cones.push(Cone::Nonneg(l_users));
    }

    // Joint SINR cones: (Tr(H M_k) − σ²γ, ε vec(M_k)).
    if kind == FormulationKind::Excs {
        for k in 0..k_users {
            let gamma = s.sinr_thresholds[k];
            let eps = s.su_uncertainty[k].matrix_radius;
            let coef = |i: usize| if i == k { 1.0 } else { -gamma };
            let mut head = Vec::new();
            for i in 0..k_users {
                add_scaled(&mut head, layout.block(i).start, &h_coeffs[k], coef(i));
            }
            rows.push_affine(head, s.noise_power * gamma);
            for p in 0..block_len {
                let mut row = Vec::new();
                for i in 0..k_users {
                    let v = eps * weights[p] * coef(i);
                    if v != 0.0 {
                        row.push((layout.block(i).start + p, v));
                    }
                }
                rows.push_affine(row, 0.0);
            }
            cones.push(Cone::Soc(1 + block_len));
        }
    }

    // Epigraph cones: (t_k, vec(W_k)).
    if has_epigraphs {
        for k in 0..k_users {
            rows.push_affine(vec![(layout.epigraph(k).unwrap(), 1.0)], 0.0);
            let base = layout.block(k).start;
            for (p, &w) in weights.iter().enumerate() {
                rows.push_affine(vec![(base + p, w)], 0.0);
            }
            cones.push(Cone::Soc(1 + block_len));
        }
    }

    // PSD blocks: svec of the real embedding of each W_k.
    let basis_columns: Vec<Vec<f64>> = (0..block_len)
        .map(|p| {
            let e = embed_hermitian(&layout.basis_matrix(p)).expect("basis matrices are Hermitian");
            svec(&e)
        })
        .collect();
    let psd_len = basis_columns[0].len();
    for k in 0..k_users {
        let base = layout.block(k).start;
        for r in 0..psd_len {
            let row: Vec<(usize, f64)> = basis_columns
                .iter()
                .enumerate()
                .filter(|(_, col)| col[r] != 0.0)
                .map(|(p, col)| (base + p, col[r]))
                .collect();
            rows.push_affine(row, 0.0);
        }
        cones.push(Cone::Psd(2 * n));
    }

    let mut a = SparseMatrix::new(rows.b.len(), nvars);
    for (r, row) in rows.entries.iter().enumerate() {
        for &(c, v) in row {
            a.push(r, c, v);
        }
    }
    let mut c = vec![0.0; nvars];
    for k in 0..k_users {
        for (p, &v) in identity.iter().enumerate() {
            c[layout.block(k).start + p] = v;
        }
    }
    let program = ConicProgram::new(c, a, rows.b, cones)?;
    Ok(Formulation {
        kind,
        layout,
        program,
        num_su: k_users,
        num_pu: l_users,
    })
}

pub fn build_lbcs(s: &ScenarioConfig) -> Result<Formulation> {
    build(FormulationKind::Lbcs, s)
}

pub fn build_sbcs(s: &ScenarioConfig) -> Result<Formulation> {
    build(FormulationKind::Sbcs, s)
}

pub fn build_excs(s: &ScenarioConfig) -> Result<Formulation> {
    build(FormulationKind::Excs, s)
}
