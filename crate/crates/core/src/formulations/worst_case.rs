//! Closed-form worst-case perturbations over Frobenius balls and the
//! worst-case constraint expressions each formulation enforces.
//!
//! For Hermitian `Δ` with `‖Δ‖_F ≤ ε` and Hermitian `X`, `Tr(ΔX)` ranges over
//! `[-ε‖X‖_F, ε‖X‖_F]`, attained at `Δ = ∓ε X/‖X‖_F`.

use super::FormulationKind;
use crate::error::{invalid, Result};
use crate::model::{HermitianMat, ScenarioConfig};

fn extremal(x: &HermitianMat, eps: f64, sign: f64) -> Result<HermitianMat> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return invalid(format!("radius must be finite and >= 0, got {eps}"));
    }
    let nx = x.frobenius_norm();
    if nx == 0.0 {
        return invalid("worst-case direction undefined for a zero matrix");
    }
    // X is Hermitian so X† = X.
    Ok(x.scaled(sign * eps / nx))
}

/// Minimizer of `Tr((H̃ + Δ) W)` over `‖Δ‖ ≤ ε`: `Δ = -ε W/‖W‖`.
pub fn prop1_min_delta(w: &HermitianMat, eps: f64) -> Result<HermitianMat> {
    extremal(w, eps, -1.0)
}

/// Maximizer of `Tr((H̃ + Δ) W)` over `‖Δ‖ ≤ ε`: `Δ = +ε W/‖W‖`.
pub fn prop1_max_delta(w: &HermitianMat, eps: f64) -> Result<HermitianMat> {
    extremal(w, eps, 1.0)
}

/// `M = W_k - γ Σ_i W_i`.
pub fn interference_combination(w_k: &HermitianMat, others: &[&HermitianMat], gamma: f64) -> HermitianMat {
    others
        .iter()
        .fold(w_k.clone(), |acc, w| acc.sub(&w.scaled(gamma)))
}

/// Minimizer of `Tr((H̃ + Δ) M)` with `M = W_k - γ Σ W_i`: `Δ = -ε M/‖M‖`.
pub fn prop2_min_delta(
    w_k: &HermitianMat,
    others: &[&HermitianMat],
    gamma: f64,
    eps: f64,
) -> Result<HermitianMat> {
    let m = interference_combination(w_k, others, gamma);
    extremal(&m, eps, -1.0)
}

/// Worst-case SINR left-hand side for user `k` under `kind`'s bound, i.e.
/// the quantity the program requires to be `≥ σ²γ_k`.
pub fn sinr_lhs(kind: FormulationKind, s: &ScenarioConfig, ws: &[HermitianMat], k: usize) -> f64 {
    let h = crate::model::outer_product(&s.su_channels[k]);
    let gamma = s.sinr_thresholds[k];
    let eps = s.su_uncertainty[k].matrix_radius;
    let others: Vec<&HermitianMat> = ws.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, w)| w).collect();
    let m = interference_combination(&ws[k], &others, gamma);
    let nominal = h.trace_product(&m);
    let penalty = match kind {
        FormulationKind::Lbcs => ws[k].trace() + gamma * others.iter().map(|w| w.trace()).sum::<f64>(),
        FormulationKind::Sbcs => {
            ws[k].frobenius_norm() + gamma * others.iter().map(|w| w.frobenius_norm()).sum::<f64>()
        }
        FormulationKind::Excs => m.frobenius_norm(),
    };
    nominal - eps * penalty
}

/// Worst-case interference power at PU `l` under `kind`'s bound.
pub fn ip_worst(kind: FormulationKind, s: &ScenarioConfig, ws: &[HermitianMat], l: usize) -> f64 {
    let g = crate::model::outer_product(&s.pu_channels[l]);
    let xi = s.pu_uncertainty[l].matrix_radius;
    ws.iter()
        .map(|w| {
            let bound = match kind {
                FormulationKind::Lbcs => w.trace(),
                FormulationKind::Sbcs | FormulationKind::Excs => w.frobenius_norm(),
            };
            g.trace_product(w) + xi * bound
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{outer_product, ComplexVec};
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    #[test]
    fn identity_example() {
        let d = prop1_min_delta(&HermitianMat::identity(2), 1.0).unwrap();
        let r = -std::f64::consts::FRAC_1_SQRT_2;
        let expect = HermitianMat::identity(2).scaled(r);
        assert!((d.as_matrix() - expect.as_matrix()).norm() < 1e-15);
        let d = prop1_max_delta(&HermitianMat::identity(2), 1.0).unwrap();
        assert!((d.as_matrix() + expect.as_matrix()).norm() < 1e-15);
    }

    #[test]
    fn zero_radius_gives_zero() {
        let w = HermitianMat::identity(3).scaled(2.0);
        assert_eq!(prop1_min_delta(&w, 0.0).unwrap().frobenius_norm(), 0.0);
        assert_eq!(prop1_max_delta(&w, 0.0).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn zero_matrix_rejected() {
        assert!(prop1_min_delta(&HermitianMat::zeros(2), 0.1).is_err());
        assert!(prop1_max_delta(&HermitianMat::zeros(2), 0.1).is_err());
        let w = HermitianMat::identity(2);
        // W - 1·W = 0
        assert!(prop2_min_delta(&w, &[&w], 1.0, 0.1).is_err());
        assert!(prop1_min_delta(&w, -0.1).is_err());
    }

    #[test]
    fn prop2_reduces_to_prop1() {
        let v = ComplexVec::new(vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.1)]).unwrap();
        let w = outer_product(&v);
        let a = prop2_min_delta(&w, &[], 3.0, 0.2).unwrap();
        let b = prop1_min_delta(&w, 0.2).unwrap();
        assert_eq!(a, b);
        let other = HermitianMat::identity(2);
        let c = prop2_min_delta(&w, &[&other], 0.0, 0.2).unwrap();
        assert!((c.as_matrix() - b.as_matrix()).norm() < 1e-15);
    }

    #[test]
    fn attained_value_and_norm() {
        let m = DMatrix::from_fn(3, 3, |i, j| Complex64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let w = HermitianMat::new(&m * m.adjoint()).unwrap();
        let h = HermitianMat::identity(3).scaled(0.7);
        let d = prop1_min_delta(&w, 0.3).unwrap();
        assert!((d.frobenius_norm() - 0.3).abs() < 1e-12);
        let lhs = h.add(&d).trace_product(&w);
        assert!((lhs - (h.trace_product(&w) - 0.3 * w.frobenius_norm())).abs() < 1e-10);
        let d = prop1_max_delta(&w, 0.3).unwrap();
        let lhs = h.add(&d).trace_product(&w);
        assert!((lhs - (h.trace_product(&w) + 0.3 * w.frobenius_norm())).abs() < 1e-10);
    }
}
