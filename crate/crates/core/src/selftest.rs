//! Built-in sanity checks: conic programs with closed-form optima, sampled
//! checks of the worst-case perturbation formulas, and the radius lift.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::conic::{kkt_report, solve, svec_index, Cone, ConicProgram, SolverSettings, SparseMatrix};
use crate::formulations::{build, interference_combination, prop1_max_delta, prop1_min_delta, prop2_min_delta, FormulationKind};
use crate::model::{lift_radius, ula_steering, unlift_radius, HermitianMat, RadiusSpec, ScenarioConfig};

/// A conic program whose optimal value is known in closed form.
#[derive(Debug, Clone)]
pub struct ReferenceProgram {
    pub name: &'static str,
    pub program: ConicProgram,
    pub optimum: f64,
}

/// `min t  s.t. [[t, 1], [1, t]] ⪰ 0`, optimum 1.
pub fn two_by_two_sdp() -> ReferenceProgram {
    let mut a = SparseMatrix::new(3, 1);
    a.push(svec_index(2, 0, 0), 0, -1.0);
    a.push(svec_index(2, 1, 1), 0, -1.0);
    let mut b = vec![0.0; 3];
    b[svec_index(2, 1, 0)] = std::f64::consts::SQRT_2;
    ReferenceProgram {
        name: "2x2 sdp",
        program: ConicProgram::new(vec![1.0], a, b, vec![Cone::Psd(2)]).expect("valid"),
        optimum: 1.0,
    }
}

/// `min x  s.t. ‖(y, z)‖ ≤ x, y = 3, z = 4`, optimum 5.
pub fn soc_norm() -> ReferenceProgram {
    let mut a = SparseMatrix::new(5, 3);
    a.push(0, 1, 1.0);
    a.push(1, 2, 1.0);
    a.push(2, 0, -1.0);
    a.push(3, 1, -1.0);
    a.push(4, 2, -1.0);
    let p = ConicProgram::new(
        vec![1.0, 0.0, 0.0],
        a,
        vec![3.0, 4.0, 0.0, 0.0, 0.0],
        vec![Cone::Zero(2), Cone::Soc(3)],
    )
    .expect("valid");
    ReferenceProgram {
        name: "soc norm",
        program: p,
        optimum: 5.0,
    }
}

/// `max x  s.t. 0 ≤ x ≤ 2` written as `min -x`; the maximizer is 2.
pub fn box_lp() -> ReferenceProgram {
    let mut a = SparseMatrix::new(2, 1);
    a.push(0, 0, 1.0);
    a.push(1, 0, -1.0);
    ReferenceProgram {
        name: "box lp",
        program: ConicProgram::new(vec![-1.0], a, vec![2.0, 0.0], vec![Cone::Nonneg(2)]).expect("valid"),
        optimum: -2.0,
    }
}

/// Scenario with one user and no uncertainty; the optimum is `σ²γ/‖h̃‖²`.
pub fn single_user_scenario() -> ScenarioConfig {
    ScenarioConfig::from_angles(
        8,
        &[35.0],
        &[],
        0.01,
        10.0,
        1.0,
        RadiusSpec::Matrix(0.0),
        RadiusSpec::Matrix(0.0),
    )
    .expect("valid scenario")
}

/// Single-user, uncertainty-free beamforming SDP.
pub fn single_user_sdp() -> ReferenceProgram {
    let s = single_user_scenario();
    let h = ula_steering(35.0, 8).expect("valid steering");
    let f = build(FormulationKind::Lbcs, &s).expect("valid program");
    ReferenceProgram {
        name: "single-user sdp",
        program: f.program,
        optimum: 0.01 * 10.0 / h.norm_squared(),
    }
}

pub fn reference_programs() -> Vec<ReferenceProgram> {
    vec![two_by_two_sdp(), soc_norm(), box_lp(), single_user_sdp()]
}

/// One line of the self-test table.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn gaussian_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMat {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    HermitianMat::new((&a + a.adjoint()).map(|z| z * 0.5)).expect("symmetrized")
}

fn gaussian_psd(n: usize, rng: &mut ChaCha8Rng) -> HermitianMat {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    HermitianMat::new(&a * a.adjoint()).expect("Gram matrix")
}

fn ball_point(n: usize, eps: f64, rng: &mut ChaCha8Rng) -> HermitianMat {
    let d = gaussian_hermitian(n, rng);
    let r = eps * rng.random::<f64>().powf(1.0 / (n * n) as f64);
    d.scaled(r / d.frobenius_norm())
}

/// Largest amount by which any sampled perturbation beats the closed-form
/// extremes, relative to `1 + |Tr(H̃W)|`.
fn prop_sampling_excess(n: usize, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let w = gaussian_psd(n, rng);
    let others = [gaussian_psd(n, rng)];
    let refs: Vec<&HermitianMat> = others.iter().collect();
    let h = gaussian_psd(n, rng);
    let eps = 0.3;
    let m = interference_combination(&w, &refs, 2.0);
    let lo1 = h.add(&prop1_min_delta(&w, eps).expect("nonzero")).trace_product(&w);
    let hi1 = h.add(&prop1_max_delta(&w, eps).expect("nonzero")).trace_product(&w);
    let lo2 = h.add(&prop2_min_delta(&w, &refs, 2.0, eps).expect("nonzero")).trace_product(&m);
    let scale = 1.0 + h.trace_product(&w).abs() + h.trace_product(&m).abs();
    let mut excess: f64 = 0.0;
    for _ in 0..samples {
        let d = h.add(&ball_point(n, eps, rng));
        let v1 = d.trace_product(&w);
        let v2 = d.trace_product(&m);
        excess = excess.max(lo1 - v1).max(v1 - hi1).max(lo2 - v2);
    }
    excess / scale
}

/// Runs every check. `settings` applies to the solver checks only.
pub fn run_selftest(settings: &SolverSettings, seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    for r in reference_programs() {
        let check = match solve(&r.program, settings) {
            Ok(res) => {
                let kkt = kkt_report(&r.program, &res);
                let err = (res.objective - r.optimum).abs();
                Check {
                    name: format!("solver: {}", r.name),
                    passed: res.is_optimal() && err <= 1e-6 && kkt.within(1e-6),
                    detail: format!("status {} |obj - opt| {err:.1e} kkt {:.1e}", res.status, kkt.max()),
                }
            }
            Err(e) => Check {
                name: format!("solver: {}", r.name),
                passed: false,
                detail: e.to_string(),
            },
        };
        out.push(check);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in [4, 8] {
        let excess = prop_sampling_excess(n, 2000, &mut rng);
        out.push(Check {
            name: format!("worst-case formulas, N={n}"),
            passed: excess <= 1e-9,
            detail: format!("max sampled excess {excess:.1e}"),
        });
    }

    let h = ula_steering(30.0, 8).expect("valid steering");
    let worst = (0..=100)
        .map(|i| {
            let d = 0.1 * i as f64;
            let back = lift_radius(d, &h).and_then(|e| unlift_radius(e, &h)).unwrap_or(f64::NAN);
            (back - d).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check {
        name: "radius lift round trip".into(),
        passed: worst <= 1e-10,
        detail: format!("max error {worst:.1e}"),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_selftest_passes_and_is_seed_independent() {
        for seed in [0, 7] {
            let checks = run_selftest(&SolverSettings::default(), seed);
            assert_eq!(checks.len(), 7);
            for c in &checks {
                assert!(c.passed, "{}: {}", c.name, c.detail);
            }
        }
    }

    #[test]
    fn corrupted_tolerance_fails() {
        let s = SolverSettings::default().with_tolerance(1e-30).with_max_iterations(3000);
        let checks = run_selftest(&s, 0);
        assert!(checks.iter().any(|c| !c.passed && c.detail.contains("max_iters")));
    }
}
