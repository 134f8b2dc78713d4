//! Normalized constraints, Monte-Carlo robustness reports, array gains and
//! transmit-power sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conic::{solve, SolverSettings, SolverStatus};
use crate::error::{invalid, Error, Result};
use crate::extract::PrecoderSolution;
use crate::formulations::{build, prop1_max_delta, prop2_min_delta, FormulationKind};
use crate::model::{outer_product, ula_steering, ComplexVec, HermitianMat, PerturbationSampler, ScenarioConfig};

pub const HISTOGRAM_BINS: usize = 50;

/// `|w_k†h|² / (σ²γ) − Σ_{i≠k} |w_i†h|² / σ²`. At least one exactly when the
/// SINR of user `k` meets `γ`.
pub fn normalized_sinr(weights: &[ComplexVec], h: &ComplexVec, sigma2: f64, gamma: f64, k: usize) -> f64 {
    let signal = weights[k].gain_through(h);
    let interference: f64 = weights
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, w)| w.gain_through(h))
        .sum();
    signal / (sigma2 * gamma) - interference / sigma2
}

/// `|w_k†h|² / (σ² + Σ_{i≠k} |w_i†h|²)`.
pub fn sinr(weights: &[ComplexVec], h: &ComplexVec, sigma2: f64, k: usize) -> f64 {
    let signal = weights[k].gain_through(h);
    let interference: f64 = weights
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, w)| w.gain_through(h))
        .sum();
    signal / (sigma2 + interference)
}

/// `Σ_k |w_k†g|² / κ`. At most one when the interference cap holds.
pub fn normalized_ip(weights: &[ComplexVec], g: &ComplexVec, kappa: f64) -> f64 {
    weights.iter().map(|w| w.gain_through(g)).sum::<f64>() / kappa
}

/// Fixed-edge histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// `bins` uniform bins over `[min, max]` of `values`; the top edge is
    /// inclusive. Degenerate ranges put everything in the first bin.
    pub fn uniform(values: &[f64], bins: usize) -> Self {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins)
            .map(|i| if i == bins { hi } else { lo + width * i as f64 })
            .collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let idx = if width > 0.0 {
                (((v - lo) / width).floor() as usize).min(bins - 1)
            } else {
                0
            };
            counts[idx] += 1;
        }
        Self { edges, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Sample statistics of one normalized constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    /// Closed-form extreme over the lifted (matrix) ball: the minimum for
    /// SINR constraints, the maximum for interference constraints.
    pub matrix_ball_worst: f64,
    pub violations: u64,
    pub histogram: Histogram,
}

impl ConstraintStats {
    fn from_samples(values: &[f64], matrix_ball_worst: f64, violated: impl Fn(f64) -> bool) -> Self {
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = (values.iter().sum::<f64>() / values.len() as f64).clamp(min, max);
        Self {
            min,
            mean,
            max,
            matrix_ball_worst,
            violations: values.iter().filter(|&&v| violated(v)).count() as u64,
            histogram: Histogram::uniform(values, HISTOGRAM_BINS),
        }
    }
}

/// How channels are perturbed in [`monte_carlo`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Additive errors inside each channel's vector ball.
    Ball,
    /// Steering-angle errors uniform in `±max_deg`; needs angle-defined
    /// channels.
    Angular { max_deg: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub mode: SamplingMode,
    pub seed: u64,
    pub samples: usize,
    pub sinr: Vec<ConstraintStats>,
    pub ip: Vec<ConstraintStats>,
    /// Fraction of (sample, SU) evaluations with `C^sinr < 1`.
    pub sinr_violation_fraction: f64,
    /// Fraction of (sample, PU) evaluations with `C^ip > 1`.
    pub ip_violation_fraction: f64,
}

impl RobustnessReport {
    pub fn has_violations(&self) -> bool {
        self.sinr_violation_fraction > 0.0 || self.ip_violation_fraction > 0.0
    }
}

/// Lowest `C^sinr_k` over the lifted ball `‖Δ‖_F ≤ ε_k` around `h̃_k h̃_k†`.
pub fn matrix_ball_worst_sinr(s: &ScenarioConfig, weights: &[ComplexVec], k: usize) -> f64 {
    let ws: Vec<HermitianMat> = weights.iter().map(outer_product).collect();
    let others: Vec<&HermitianMat> = ws.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, w)| w).collect();
    let gamma = s.sinr_thresholds[k];
    let h = outer_product(&s.su_channels[k]);
    let eps = s.su_uncertainty[k].matrix_radius;
    let m = crate::formulations::interference_combination(&ws[k], &others, gamma);
    let worst = match prop2_min_delta(&ws[k], &others, gamma, eps) {
        Ok(delta) => h.add(&delta),
        // M = 0: every perturbation gives the same value.
        Err(_) => h,
    };
    worst.trace_product(&m) / (s.noise_power * gamma)
}

/// Highest `C^ip_ℓ` over the lifted ball `‖Δ‖_F ≤ ξ_ℓ`.
pub fn matrix_ball_worst_ip(s: &ScenarioConfig, weights: &[ComplexVec], l: usize) -> f64 {
    let total = weights
        .iter()
        .map(outer_product)
        .fold(HermitianMat::zeros(s.n_antennas), |a, w| a.add(&w));
    let g = outer_product(&s.pu_channels[l]);
    let worst = match prop1_max_delta(&total, s.pu_uncertainty[l].matrix_radius) {
        Ok(delta) => g.add(&delta),
        Err(_) => g,
    };
    worst.trace_product(&total) / s.ip_thresholds[l]
}

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn perturbed_channels(
    s: &ScenarioConfig,
    mode: SamplingMode,
    sampler: &PerturbationSampler,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<ComplexVec>, Vec<ComplexVec>)> {
    match mode {
        SamplingMode::Ball => {
            let mut draw = |nominal: &[ComplexVec], balls: &[crate::model::UncertaintyBall]| {
                nominal
                    .iter()
                    .zip(balls)
                    .map(|(c, b)| Ok(c.add(&sampler.sample(b.vector_radius, s.n_antennas, rng)?)))
                    .collect::<Result<Vec<_>>>()
            };
            let su = draw(&s.su_channels, &s.su_uncertainty)?;
            let pu = draw(&s.pu_channels, &s.pu_uncertainty)?;
            Ok((su, pu))
        }
        SamplingMode::Angular { max_deg } => {
            let (Some(su_deg), Some(pu_deg)) = (&s.su_angles_deg, &s.pu_angles_deg) else {
                return invalid("angular sampling needs a scenario defined by steering angles");
            };
            let mut draw = |angles: &[f64]| {
                angles
                    .iter()
                    .map(|&t| {
                        let d = if max_deg > 0.0 { rng.random_range(-max_deg..=max_deg) } else { 0.0 };
                        ula_steering(t + d, s.n_antennas)
                    })
                    .collect::<Result<Vec<_>>>()
            };
            let su = draw(su_deg)?;
            let pu = draw(pu_deg)?;
            Ok((su, pu))
        }
    }
}

/// Evaluates both normalized constraints of `sol` on `n_samples` perturbed
/// channel draws. Sample `i` uses its own stream derived from `(seed, i)`.
pub fn monte_carlo(
    s: &ScenarioConfig,
    sol: &PrecoderSolution,
    n_samples: usize,
    seed: u64,
) -> Result<RobustnessReport> {
    monte_carlo_with(s, &sol.weights, n_samples, seed, SamplingMode::Ball)
}

/// [`monte_carlo`] on bare weights with a chosen sampling mode.
pub fn monte_carlo_with(
    s: &ScenarioConfig,
    weights: &[ComplexVec],
    n_samples: usize,
    seed: u64,
    mode: SamplingMode,
) -> Result<RobustnessReport> {
    if n_samples == 0 {
        return invalid("need at least one sample");
    }
    s.validate()?;
    if weights.len() != s.num_su() {
        return Err(Error::DimensionMismatch(format!(
            "{} weight vectors for {} secondary users",
            weights.len(),
            s.num_su()
        )));
    }
    if let Some(k) = weights.iter().position(|w| w.len() != s.n_antennas) {
        return Err(Error::DimensionMismatch(format!(
            "weight vector for user {k} has length {}, expected {}",
            weights[k].len(),
            s.n_antennas
        )));
    }
    if let SamplingMode::Angular { max_deg } = mode {
        if !(max_deg >= 0.0) || !max_deg.is_finite() {
            return invalid(format!("angular range must be finite and >= 0, got {max_deg}"));
        }
    }
    let sampler = PerturbationSampler::default();
    let k_users = s.num_su();
    let l_users = s.num_pu();
    let mut sinr_vals = vec![Vec::with_capacity(n_samples); k_users];
    let mut ip_vals = vec![Vec::with_capacity(n_samples); l_users];
    for i in 0..n_samples {
        let mut rng = sample_rng(seed, i);
        let (su, pu) = perturbed_channels(s, mode, &sampler, &mut rng)?;
        for k in 0..k_users {
            sinr_vals[k].push(normalized_sinr(weights, &su[k], s.noise_power, s.sinr_thresholds[k], k));
        }
        for l in 0..l_users {
            ip_vals[l].push(normalized_ip(weights, &pu[l], s.ip_thresholds[l]));
        }
    }
    let sinr: Vec<ConstraintStats> = (0..k_users)
        .map(|k| ConstraintStats::from_samples(&sinr_vals[k], matrix_ball_worst_sinr(s, weights, k), |v| v < 1.0))
        .collect();
    let ip: Vec<ConstraintStats> = (0..l_users)
        .map(|l| ConstraintStats::from_samples(&ip_vals[l], matrix_ball_worst_ip(s, weights, l), |v| v > 1.0))
        .collect();
    let frac = |stats: &[ConstraintStats], users: usize| {
        if users == 0 {
            0.0
        } else {
            stats.iter().map(|c| c.violations).sum::<u64>() as f64 / (users * n_samples) as f64
        }
    };
    Ok(RobustnessReport {
        mode,
        seed,
        samples: n_samples,
        sinr_violation_fraction: frac(&sinr, k_users),
        ip_violation_fraction: frac(&ip, l_users),
        sinr,
        ip,
    })
}

/// 0° to 180° in 0.25° steps.
pub fn default_theta_grid() -> Vec<f64> {
    (0..=720).map(|i| i as f64 * 0.25).collect()
}

/// `|w†h(θ)|²` over `theta_grid` for the ULA with `w.len()` elements.
pub fn array_gain(w: &ComplexVec, theta_grid: &[f64]) -> Result<Vec<f64>> {
    if theta_grid.is_empty() {
        return invalid("angle grid is empty");
    }
    theta_grid
        .iter()
        .map(|&t| Ok(w.gain_through(&ula_steering(t, w.len())?)))
        .collect()
}

/// `10·log10(κ/σ²)`.
pub fn relative_ip_level_db(kappa: f64, sigma2: f64) -> f64 {
    10.0 * (kappa / sigma2).log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma_db: f64,
    pub ip_level_db: f64,
    pub method: FormulationKind,
    pub status: SolverStatus,
    /// `10·log10(TxP/σ²)`; only present for optimal rows.
    pub txp_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Rows for one method and level, in grid order.
    pub fn series(&self, method: FormulationKind, ip_level_db: f64) -> Vec<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.ip_level_db == ip_level_db)
            .collect()
    }

    /// Feasible γ values form one contiguous run starting at the first grid
    /// point (or there are none).
    pub fn feasible_prefix(&self, method: FormulationKind, ip_level_db: f64) -> bool {
        let feasible: Vec<bool> = self
            .series(method, ip_level_db)
            .iter()
            .map(|r| r.txp_db.is_some())
            .collect();
        let first_gap = feasible.iter().position(|f| !f).unwrap_or(feasible.len());
        feasible[first_gap..].iter().all(|f| !f)
    }

    /// Feasible γ values form a single contiguous run.
    pub fn feasible_interval(&self, method: FormulationKind, ip_level_db: f64) -> bool {
        let feasible: Vec<bool> = self
            .series(method, ip_level_db)
            .iter()
            .map(|r| r.txp_db.is_some())
            .collect();
        let runs = feasible.windows(2).filter(|w| !w[0] && w[1]).count() + usize::from(feasible.first() == Some(&true));
        runs <= 1
    }

    /// Power never decreases along the feasible γ values, allowing `slack`
    /// dB of solver noise.
    pub fn power_nondecreasing(&self, method: FormulationKind, ip_level_db: f64, slack_db: f64) -> bool {
        let p: Vec<f64> = self.series(method, ip_level_db).iter().filter_map(|r| r.txp_db).collect();
        p.windows(2).all(|w| w[1] >= w[0] - slack_db)
    }
}

/// Solves every `(γ, level, method)` combination. Individual solve failures
/// become rows with their status.
pub fn power_sweep(
    s: &ScenarioConfig,
    gamma_grid_db: &[f64],
    ip_levels_db: &[f64],
    methods: &[FormulationKind],
    settings: &SolverSettings,
) -> Result<SweepTable> {
    if gamma_grid_db.is_empty() || ip_levels_db.is_empty() || methods.is_empty() {
        return invalid("sweep grids must be nonempty");
    }
    let mut rows = Vec::new();
    for &level in ip_levels_db {
        let kappa = s.noise_power * 10f64.powf(level / 10.0);
        for &gamma_db in gamma_grid_db {
            let gamma = 10f64.powf(gamma_db / 10.0);
            let inst = s.with_sinr_threshold(gamma)?.with_ip_threshold(kappa)?;
            for &method in methods {
                let f = build(method, &inst)?;
                let (status, txp_db) = match solve(&f.program, settings) {
                    Ok(r) if r.is_optimal() => {
                        let txp: f64 = f.covariances(&r.x).iter().map(HermitianMat::trace).sum();
                        (r.status, Some(10.0 * (txp / s.noise_power).log10()))
                    }
                    Ok(r) => (r.status, None),
                    Err(e) => {
                        log::warn!("sweep point γ={gamma_db} dB level={level} dB {method}: {e}");
                        (SolverStatus::Inaccurate, None)
                    }
                };
                log::info!("sweep γ={gamma_db} dB level={level} dB {method}: {status}");
                rows.push(SweepRow {
                    gamma_db,
                    ip_level_db: level,
                    method,
                    status,
                    txp_db,
                });
            }
        }
    }
    Ok(SweepTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RadiusSpec;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn cvec(v: &[(f64, f64)]) -> ComplexVec {
        ComplexVec::new(v.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn matched_single_user_is_exactly_one() {
        let h = ula_steering(40.0, 6).unwrap();
        let (sigma2, gamma) = (0.01, 10.0);
        let p = sigma2 * gamma / h.norm_squared();
        let w = h.scaled((p / h.norm_squared()).sqrt());
        let c = normalized_sinr(std::slice::from_ref(&w), &h, sigma2, gamma, 0);
        assert!((c - 1.0).abs() < 1e-12);
        let c2 = normalized_sinr(&[w.scaled(2f64.sqrt())], &h, sigma2, gamma, 0);
        assert!((c2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ip_examples() {
        let g = cvec(&[(1.0, 0.0), (0.0, 0.0)]);
        let orth = cvec(&[(0.0, 0.0), (0.3, 0.2)]);
        assert_eq!(normalized_ip(&[orth], &g, 0.1), 0.0);
        let w = cvec(&[(0.1, 0.0), (0.5, 0.5)]);
        assert!((normalized_ip(std::slice::from_ref(&w), &g, 0.01) - 1.0).abs() < 1e-12);
        let a = normalized_ip(&[w.clone(), w.scaled(0.5)], &g, 0.02);
        let b = normalized_ip(&[w.scaled(2f64.sqrt()), w.scaled(0.5 * 2f64.sqrt())], &g, 0.02);
        assert!((b - 2.0 * a).abs() < 1e-12);
    }

    fn arb_cvec(n: usize) -> impl Strategy<Value = ComplexVec> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(|v| cvec(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn normalized_sinr_matches_sinr_ratio(
            ws in proptest::collection::vec(arb_cvec(4), 3),
            h in arb_cvec(4),
            sigma2 in 0.001f64..1.0,
            gamma in 0.1f64..100.0,
            k in 0usize..3,
        ) {
            let c = normalized_sinr(&ws, &h, sigma2, gamma, k);
            let r = sinr(&ws, &h, sigma2, k) / gamma;
            let interference: f64 = ws.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, w)| w.gain_through(&h)).sum();
            // C − 1 = (SINR/γ − 1)(σ² + I)/σ².
            let expect = (r - 1.0) * (sigma2 + interference) / sigma2;
            prop_assert!(((c - 1.0) - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
            if (r - 1.0).abs() > 1e-9 {
                prop_assert_eq!(c >= 1.0, r >= 1.0);
            }
        }
    }

    #[test]
    fn histogram_counts_and_edges() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let h = Histogram::uniform(&v, 50);
        assert_eq!(h.edges.len(), 51);
        assert_eq!(h.total(), 1000);
        let h = Histogram::uniform(&[2.0, 2.0, 2.0], 50);
        assert_eq!(h.counts[0], 3);
        assert_eq!(h.total(), 3);
    }

    fn tiny(eps: f64) -> ScenarioConfig {
        ScenarioConfig::from_angles(4, &[20.0, 60.0], &[120.0], 0.01, 2.0, 0.05, RadiusSpec::Matrix(eps), RadiusSpec::Matrix(eps))
            .unwrap()
    }

    fn beams(s: &ScenarioConfig) -> Vec<ComplexVec> {
        s.su_channels.iter().map(|h| h.scaled(0.2)).collect()
    }

    #[test]
    fn zero_radius_samples_are_nominal() {
        let s = tiny(0.0);
        let w = beams(&s);
        let r = monte_carlo_with(&s, &w, 50, 3, SamplingMode::Ball).unwrap();
        for (k, st) in r.sinr.iter().enumerate() {
            assert_eq!(st.min, st.max);
            let nominal = normalized_sinr(&w, &s.su_channels[k], s.noise_power, s.sinr_thresholds[k], k);
            assert_eq!(st.min, nominal);
            assert!((st.matrix_ball_worst - nominal).abs() < 1e-12);
        }
        let single = monte_carlo_with(&s, &w, 1, 3, SamplingMode::Ball).unwrap();
        assert_eq!(single.samples, 1);
        assert_eq!(single.sinr[0].histogram.total(), 1);
    }

    #[test]
    fn report_is_deterministic_and_ordered() {
        let s = tiny(0.1);
        let w = beams(&s);
        let a = monte_carlo_with(&s, &w, 500, 11, SamplingMode::Ball).unwrap();
        let b = monte_carlo_with(&s, &w, 500, 11, SamplingMode::Ball).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_with(&s, &w, 500, 12, SamplingMode::Ball).unwrap();
        assert_ne!(a, c);
        for st in a.sinr.iter().chain(&a.ip) {
            assert!(st.min <= st.mean && st.mean <= st.max);
            assert_eq!(st.histogram.total(), 500);
        }
        for st in &a.sinr {
            assert!(st.min >= st.matrix_ball_worst - 1e-6);
        }
        for st in &a.ip {
            assert!(st.max <= st.matrix_ball_worst + 1e-6);
        }
        assert!((0.0..=1.0).contains(&a.sinr_violation_fraction));
    }

    #[test]
    fn dimension_mismatch_names_user() {
        let s = tiny(0.1);
        let mut w = beams(&s);
        w[1] = ComplexVec::zeros(3);
        let e = monte_carlo_with(&s, &w, 10, 0, SamplingMode::Ball).unwrap_err();
        assert!(e.to_string().contains("user 1"), "{e}");
    }

    #[test]
    fn angular_mode_zero_range_is_nominal() {
        let s = tiny(0.1);
        let w = beams(&s);
        let r = monte_carlo_with(&s, &w, 20, 5, SamplingMode::Angular { max_deg: 0.0 }).unwrap();
        assert_eq!(r.sinr[0].min, r.sinr[0].max);
        let r = monte_carlo_with(&s, &w, 20, 5, SamplingMode::Angular { max_deg: 5.0 }).unwrap();
        assert!(r.sinr[0].min < r.sinr[0].max);
        let mut bare = s.clone();
        bare.su_angles_deg = None;
        assert!(monte_carlo_with(&bare, &w, 20, 5, SamplingMode::Angular { max_deg: 5.0 }).is_err());
    }

    #[test]
    fn gain_examples() {
        let n = 8;
        let h0 = ula_steering(35.0, n).unwrap();
        let w = h0.scaled(1.0 / (n as f64).sqrt());
        let g = array_gain(&w, &[35.0]).unwrap();
        assert!((g[0] - n as f64).abs() < 1e-12);
        let h1 = ula_steering(80.0, n).unwrap();
        let proj = h1.inner(&h0) / h1.norm_squared();
        let orth = ComplexVec::from_dvector(h0.as_dvector() - h1.as_dvector() * proj);
        assert!(array_gain(&orth, &[80.0]).unwrap()[0] < 1e-20);
        let grid = default_theta_grid();
        assert_eq!(grid.len(), 721);
        assert_eq!(grid[720], 180.0);
        assert!(array_gain(&w, &grid).unwrap().iter().all(|&v| v >= 0.0));
        assert!(array_gain(&w, &[]).is_err());
    }

    #[test]
    fn sweep_table_predicates() {
        let row = |g: f64, p: Option<f64>| SweepRow {
            gamma_db: g,
            ip_level_db: 0.0,
            method: FormulationKind::Lbcs,
            status: if p.is_some() { SolverStatus::Optimal } else { SolverStatus::PrimalInfeasible },
            txp_db: p,
        };
        let t = SweepTable {
            rows: vec![row(6.0, Some(1.0)), row(7.0, Some(2.0)), row(8.0, None)],
        };
        assert!(t.feasible_prefix(FormulationKind::Lbcs, 0.0));
        assert!(t.feasible_interval(FormulationKind::Lbcs, 0.0));
        assert!(t.power_nondecreasing(FormulationKind::Lbcs, 0.0, 0.0));
        let t = SweepTable {
            rows: vec![row(6.0, None), row(7.0, Some(2.0)), row(8.0, None), row(9.0, Some(3.0))],
        };
        assert!(!t.feasible_prefix(FormulationKind::Lbcs, 0.0));
        assert!(!t.feasible_interval(FormulationKind::Lbcs, 0.0));
        assert_eq!(relative_ip_level_db(0.01, 0.01), 0.0);
    }
}
