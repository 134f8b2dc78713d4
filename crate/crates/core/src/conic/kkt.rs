use serde::{Deserialize, Serialize};

use super::cones::distance_to_cone;
use super::{ConicProgram, SolverResult};

/// Relative primal, dual and gap residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.primal <= tol && self.dual <= tol && self.gap <= tol
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Recomputes KKT residuals from `(x, y)` alone.
///
/// The primal residual is the distance from `b - Ax` to `K`; the dual
/// residual combines `‖Aᵀy + c‖` with the distance from `y` to `K*`.
/// Neither uses the solver's slack vector.
pub fn kkt_report(p: &ConicProgram, r: &SolverResult) -> Residuals {
    let ax = p.a.mul_vec(&r.x);
    let slack: Vec<f64> = p.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let primal = distance_to_cone(&p.cones, &slack, false) / (1.0 + norm(&p.b));

    let aty = p.a.tmul_vec(&r.y);
    let stat: Vec<f64> = aty.iter().zip(&p.c).map(|(a, c)| a + c).collect();
    let ydist = distance_to_cone(&p.cones, &r.y, true);
    let dual = (norm(&stat).powi(2) + ydist * ydist).sqrt() / (1.0 + norm(&p.c));

    let cx = dot(&p.c, &r.x);
    let by = dot(&p.b, &r.y);
    let gap = (cx + by).abs() / (1.0 + cx.abs() + by.abs());
    Residuals { primal, dual, gap }
}
