//! Standard-form conic programs and a self-contained operator-splitting solver.
//!
//! Programs are written as
//!
//! ```text
//! minimize    cᵀx
//! subject to  Ax + s = b,  s ∈ K
//! ```
//!
//! where `K` is a product of zero, nonnegative, second-order and PSD cones.
//! The dual is `maximize -bᵀy  s.t.  Aᵀy + c = 0,  y ∈ K*`.

mod cones;
mod dump;
mod embed;
mod jacobi;
mod kkt;
mod solver;

pub use cones::{
    distance_to_cone, project_nonneg, project_psd, project_soc, smat, svec, svec_index, svec_len, Cone,
    ConeProjector,
};
pub use dump::{read_program, write_program};
pub use embed::{embed_complex, embed_hermitian};
pub use jacobi::{jacobi_eigensym, SymEigen, WarmJacobi};
pub use kkt::{kkt_report, Residuals};
pub use solver::{solve, ConicBackend, SplittingSolver};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse matrix in coordinate form. Duplicate entries are summed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows];
        for &(r, c, v) in &self.entries {
            out[r] += v * x[c];
        }
        out
    }

    /// `Aᵀ y`
    pub fn tmul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols];
        for &(r, c, v) in &self.entries {
            out[c] += v * y[r];
        }
        out
    }
}

/// `min cᵀx  s.t.  Ax + s = b, s ∈ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicProgram {
    pub c: Vec<f64>,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub cones: Vec<Cone>,
}

impl ConicProgram {
    pub fn new(c: Vec<f64>, a: SparseMatrix, b: Vec<f64>, cones: Vec<Cone>) -> Result<Self> {
        let p = Self { c, a, b, cones };
        p.validate()?;
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let rows: usize = self.cones.iter().map(Cone::len).sum();
        if rows != self.b.len() {
            return Err(Error::DimensionMismatch(format!(
                "cone segments cover {rows} rows but b has {}",
                self.b.len()
            )));
        }
        if self.a.nrows != self.b.len() || self.a.ncols != self.c.len() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, expected {}x{}",
                self.a.nrows,
                self.a.ncols,
                self.b.len(),
                self.c.len()
            )));
        }
        for &(r, c, v) in &self.a.entries {
            if r >= self.a.nrows || c >= self.a.ncols {
                return Err(Error::DimensionMismatch(format!("entry ({r}, {c}) outside A")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("A({r}, {c}) is not finite")));
            }
        }
        if self.b.iter().chain(&self.c).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("b and c must be finite".into()));
        }
        if self.cones.iter().any(|c| matches!(c, Cone::Soc(0))) {
            return Err(Error::InvalidArgument("second-order cones need length >= 1".into()));
        }
        Ok(())
    }

    /// True when `A` lacks full column rank (relative tolerance 1e-12 on the
    /// spectrum of `AᵀA`).
    pub fn is_column_rank_deficient(&self) -> bool {
        if self.num_vars() == 0 {
            return false;
        }
        let a = self.a.to_dense();
        let ata = a.transpose() * &a;
        let eig = ata.symmetric_eigen().eigenvalues;
        let max = eig.iter().cloned().fold(0.0, f64::max);
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        max == 0.0 || min <= 1e-12 * max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIters,
    Inaccurate,
}

impl std::fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::PrimalInfeasible => "primal_infeasible",
            SolverStatus::DualInfeasible => "dual_infeasible",
            SolverStatus::MaxIters => "max_iters",
            SolverStatus::Inaccurate => "inaccurate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    /// Relative KKT tolerance for declaring optimality.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Ruiz equilibration of `A` before iterating.
    pub scaling: bool,
    pub verbose: bool,
    /// Over-relaxation factor in (0, 2).
    pub relaxation: f64,
    /// Certificate residual below which infeasibility is suspected.
    pub infeasibility_tolerance: f64,
    /// Consecutive iterations the certificate must stay below tolerance.
    pub infeasibility_patience: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 50_000,
            scaling: true,
            verbose: false,
            relaxation: 1.5,
            infeasibility_tolerance: 1e-9,
            infeasibility_patience: 50,
        }
    }
}

impl SolverSettings {
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("solver tolerance must be positive".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::InvalidArgument("relaxation must lie in (0, 2)".into()));
        }
        Ok(())
    }
}

/// Outcome of a solve. For infeasible statuses `y` (resp. `x`, `s`) hold the
/// normalized certificate instead of a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub status: SolverStatus,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
}

impl SolverResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SolverStatus::Optimal
    }
}
