#![allow(clippy::needless_range_loop)]

use crbeam::conic::{kkt_report, solve, SolverSettings, SolverStatus};
use crbeam::formulations::{
    build, interference_combination, prop1_max_delta, prop1_min_delta, prop2_min_delta, Formulation,
    FormulationKind,
};
use crbeam::model::{outer_product, ula_steering, HermitianMat, RadiusSpec, ScenarioConfig};

fn settings() -> SolverSettings {
    SolverSettings::default()
}

fn solve_kind(kind: FormulationKind, s: &ScenarioConfig) -> (Formulation, crbeam::conic::SolverResult) {
    let f = build(kind, s).unwrap();
    let r = solve(&f.program, &settings()).unwrap();
    (f, r)
}

fn small(eps: f64, xi: f64) -> ScenarioConfig {
    ScenarioConfig::from_angles(
        4,
        &[25.0, 60.0],
        &[100.0],
        0.01,
        10f64.powf(0.6),
        0.02,
        RadiusSpec::Matrix(eps),
        RadiusSpec::Matrix(xi),
    )
    .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn single_user_nonrobust_optimum_is_analytic() {
    let s = ScenarioConfig::from_angles(
        6,
        &[40.0],
        &[],
        0.02,
        5.0,
        1.0,
        RadiusSpec::Matrix(0.0),
        RadiusSpec::Matrix(0.0),
    )
    .unwrap();
    let (f, r) = solve_kind(FormulationKind::Lbcs, &s);
    assert_eq!(r.status, SolverStatus::Optimal);
    let h = &s.su_channels[0];
    let expect = 0.02 * 5.0 / h.norm_squared();
    assert!((r.objective - expect).abs() < 1e-6, "{} vs {expect}", r.objective);
    // Optimal covariance is the power-scaled projector onto h.
    let w = &f.covariances(&r.x)[0];
    let target = outer_product(h).scaled(expect / h.norm_squared());
    assert!((w.as_matrix() - target.as_matrix()).norm() < 1e-6);
}

#[test]
fn unbounded_sinr_demand_is_infeasible() {
    for gamma in [1e2, 1e3] {
        let s = small(0.05, 0.05).with_sinr_threshold(gamma).unwrap();
        for kind in FormulationKind::ALL {
            let (_, r) = solve_kind(kind, &s);
            assert_eq!(r.status, SolverStatus::PrimalInfeasible, "{kind} at {gamma}");
        }
    }
}

#[test]
fn nonrobust_limit_agrees() {
    let s = small(0.0, 0.0);
    let objs: Vec<f64> = FormulationKind::ALL
        .iter()
        .map(|&k| {
            let (_, r) = solve_kind(k, &s);
            assert_eq!(r.status, SolverStatus::Optimal);
            r.objective
        })
        .collect();
    assert!(rel(objs[1], objs[0]) < 1e-6 && rel(objs[2], objs[0]) < 1e-6, "{objs:?}");
}

#[test]
fn single_user_joint_and_per_term_bounds_coincide() {
    let s = ScenarioConfig::from_angles(
        4,
        &[70.0],
        &[],
        0.01,
        10.0,
        1.0,
        RadiusSpec::Matrix(0.1),
        RadiusSpec::Matrix(0.0),
    )
    .unwrap();
    let (_, a) = solve_kind(FormulationKind::Sbcs, &s);
    let (_, b) = solve_kind(FormulationKind::Excs, &s);
    assert!(a.is_optimal() && b.is_optimal());
    assert!(rel(a.objective, b.objective) < 1e-6);
}

/// Dense search over rank-one `W = ww†` on a discretized sphere of `C²`.
#[test]
fn single_user_sbcs_matches_grid_search() {
    let (sigma2, gamma, eps) = (0.05, 2.0, 0.3);
    let s = ScenarioConfig::from_angles(
        2,
        &[50.0],
        &[],
        sigma2,
        gamma,
        1.0,
        RadiusSpec::Matrix(eps),
        RadiusSpec::Matrix(0.0),
    )
    .unwrap();
    let (_, r) = solve_kind(FormulationKind::Sbcs, &s);
    assert!(r.is_optimal());
    let h = ula_steering(50.0, 2).unwrap();
    let hs = h.as_slice();
    // u = (cos a, e^{jφ} sin a); global phase is irrelevant. For unit u the
    // SINR row reads p(|u†h|² − ε) ≥ σ²γ, so p = σ²γ / (|u†h|² − ε).
    let mut best = f64::INFINITY;
    let steps = 2000;
    for i in 0..=steps {
        let a = std::f64::consts::FRAC_PI_2 * i as f64 / steps as f64;
        for j in 0..steps {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / steps as f64;
            let u0 = num_complex::Complex64::new(a.cos(), 0.0);
            let u1 = num_complex::Complex64::from_polar(a.sin(), phi);
            let g = (u0.conj() * hs[0] + u1.conj() * hs[1]).norm_sqr();
            if g > eps {
                best = best.min(sigma2 * gamma / (g - eps));
            }
        }
    }
    assert!(rel(r.objective, best) < 1e-5, "sdp {} grid {best}", r.objective);
    assert!(r.objective <= best * (1.0 + 1e-7));
}

#[test]
fn conservatism_ordering_and_monotonicity() {
    let mut prev: Option<Vec<f64>> = None;
    for radius in [0.01, 0.03, 0.06] {
        let s = small(radius, radius);
        let objs: Vec<f64> = FormulationKind::ALL
            .iter()
            .map(|&k| {
                let (f, r) = solve_kind(k, &s);
                assert_eq!(r.status, SolverStatus::Optimal, "{k} at {radius}");
                assert!(kkt_report(&f.program, &r).within(1e-6));
                r.objective
            })
            .collect();
        let (l, sb, ex) = (objs[0], objs[1], objs[2]);
        assert!(ex <= sb + 1e-5 * (1.0 + sb), "{objs:?}");
        assert!(sb <= l + 1e-5 * (1.0 + l), "{objs:?}");
        if let Some(p) = &prev {
            for (a, b) in p.iter().zip(&objs) {
                assert!(*b >= a - 1e-6 * (1.0 + a), "radius {radius}: {p:?} -> {objs:?}");
            }
        }
        prev = Some(objs);
    }
}

/// Plugging the closed-form worst cases into the original (perturbed)
/// constraint expressions reproduces the program rows.
#[test]
fn closed_form_worst_cases_reproduce_rows() {
    let s = small(0.04, 0.03);
    for kind in [FormulationKind::Sbcs, FormulationKind::Excs, FormulationKind::Lbcs] {
        let (f, r) = solve_kind(kind, &s);
        assert!(r.is_optimal());
        let x = f.tighten_epigraphs(&r.x);
        let ws = f.covariances(&x);
        let sinr_rows = f.sinr_row_margins(&x);
        let ip_rows = f.ip_row_margins(&x);
        for k in 0..s.num_su() {
            let gamma = s.sinr_thresholds[k];
            let eps = s.su_uncertainty[k].matrix_radius;
            let h = outer_product(&s.su_channels[k]);
            let others: Vec<&HermitianMat> = ws.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, w)| w).collect();
            let value = match kind {
                FormulationKind::Excs => {
                    let d = prop2_min_delta(&ws[k], &others, gamma, eps).unwrap();
                    h.add(&d).trace_product(&interference_combination(&ws[k], &others, gamma))
                }
                FormulationKind::Sbcs => {
                    let own = h.add(&prop1_min_delta(&ws[k], eps).unwrap()).trace_product(&ws[k]);
                    let inter: f64 = others
                        .iter()
                        .map(|w| h.add(&prop1_max_delta(w, eps).unwrap()).trace_product(w))
                        .sum();
                    own - gamma * inter
                }
                FormulationKind::Lbcs => {
                    let i = HermitianMat::identity(s.n_antennas).scaled(eps);
                    h.sub(&i).trace_product(&ws[k]) - gamma * others.iter().map(|w| h.add(&i).trace_product(w)).sum::<f64>()
                }
            };
            let expect = value - s.noise_power * gamma;
            assert!((sinr_rows[k] - expect).abs() < 1e-8, "{kind} user {k}: {} vs {expect}", sinr_rows[k]);
        }
        for l in 0..s.num_pu() {
            let xi = s.pu_uncertainty[l].matrix_radius;
            let g = outer_product(&s.pu_channels[l]);
            let ip: f64 = ws
                .iter()
                .map(|w| match kind {
                    FormulationKind::Lbcs => g.add(&HermitianMat::identity(s.n_antennas).scaled(xi)).trace_product(w),
                    _ => g.add(&prop1_max_delta(w, xi).unwrap()).trace_product(w),
                })
                .sum();
            assert!((ip_rows[l] - (s.ip_thresholds[l] - ip)).abs() < 1e-8, "{kind} pu {l}");
        }
    }
}

#[test]
fn solution_satisfies_every_row() {
    let s = small(0.05, 0.05);
    for kind in FormulationKind::ALL {
        let (f, r) = solve_kind(kind, &s);
        assert!(r.is_optimal());
        let scale = 1.0 + f.program.b.iter().map(|v| v * v).sum::<f64>().sqrt();
        for m in f.sinr_row_margins(&r.x).iter().chain(&f.ip_row_margins(&r.x)) {
            assert!(*m >= -1e-8 * scale, "{kind}: {m}");
        }
        for w in f.covariances(&r.x) {
            assert!(w.min_eigenvalue() >= -1e-8 * scale);
        }
    }
}
