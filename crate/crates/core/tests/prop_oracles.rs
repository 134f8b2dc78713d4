//! Brute-force sampling over Frobenius balls of Hermitian matrices.

use crbeam::formulations::{interference_combination, prop1_max_delta, prop1_min_delta, prop2_min_delta};
use crbeam::model::HermitianMat;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMat {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    HermitianMat::new((&a + a.adjoint()).map(|z| z * 0.5)).unwrap()
}

fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> HermitianMat {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    HermitianMat::new(&a * a.adjoint()).unwrap()
}

/// Random point of the ball `‖Δ‖_F ≤ eps`; a quarter of draws land on the
/// boundary.
fn ball_point(n: usize, eps: f64, rng: &mut ChaCha8Rng) -> HermitianMat {
    let d = random_hermitian(n, rng);
    let dim = (n * n) as f64;
    let r = if rng.random_bool(0.25) { eps } else { eps * rng.random::<f64>().powf(1.0 / dim) };
    d.scaled(r / d.frobenius_norm())
}

fn check_prop1(n: usize, seed: u64, samples: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = random_psd(n, &mut rng);
    let h = random_psd(n, &mut rng);
    let eps = 0.3;
    let dmin = prop1_min_delta(&w, eps).unwrap();
    let dmax = prop1_max_delta(&w, eps).unwrap();
    let lo = h.add(&dmin).trace_product(&w);
    let hi = h.add(&dmax).trace_product(&w);
    let nominal = h.trace_product(&w);
    let scale = 1.0 + nominal.abs();
    assert!((lo - (nominal - eps * w.frobenius_norm())).abs() <= 1e-10 * scale);
    assert!((hi - (nominal + eps * w.frobenius_norm())).abs() <= 1e-10 * scale);
    assert!((dmin.frobenius_norm() - eps).abs() < 1e-12);
    for _ in 0..samples {
        let v = h.add(&ball_point(n, eps, &mut rng)).trace_product(&w);
        assert!(lo <= v + 1e-9 * scale && v <= hi + 1e-9 * scale);
    }
}

fn check_prop2(n: usize, seed: u64, samples: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wk = random_psd(n, &mut rng);
    let others = [random_psd(n, &mut rng), random_psd(n, &mut rng)];
    let refs: Vec<&HermitianMat> = others.iter().collect();
    let h = random_psd(n, &mut rng);
    let (gamma, eps) = (2.0, 0.1);
    let m = interference_combination(&wk, &refs, gamma);
    let d = prop2_min_delta(&wk, &refs, gamma, eps).unwrap();
    let lo = h.add(&d).trace_product(&m);
    let nominal = h.trace_product(&m);
    let scale = 1.0 + nominal.abs();
    assert!((lo - (nominal - eps * m.frobenius_norm())).abs() <= 1e-10 * scale);
    for _ in 0..samples {
        let v = h.add(&ball_point(n, eps, &mut rng)).trace_product(&m);
        assert!(lo <= v + 1e-9 * scale);
    }
}

#[test]
fn prop1_bounds_random_ball_samples() {
    check_prop1(4, 1, 10_000);
    check_prop1(8, 2, 10_000);
}

#[test]
fn prop2_bounds_random_ball_samples() {
    check_prop2(4, 3, 10_000);
    check_prop2(8, 4, 10_000);
}

#[test]
fn prop2_with_zero_gamma_is_prop1() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w = random_psd(4, &mut rng);
    let o = random_psd(4, &mut rng);
    let a = prop2_min_delta(&w, &[&o], 0.0, 0.2).unwrap();
    let b = prop1_min_delta(&w, 0.2).unwrap();
    assert!((a.as_matrix() - b.as_matrix()).norm() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn extremes_bracket_ball(seed in any::<u64>(), n in 2usize..6) {
        check_prop1(n, seed, 200);
        check_prop2(n, seed.wrapping_add(1), 200);
    }
}
