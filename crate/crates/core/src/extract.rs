//! From relaxed covariance solutions to beamforming weights.

use log::{info, warn};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conic::{solve, ConicBackend, Residuals, SolverSettings, SolverStatus};
use crate::error::{invalid, Error, Result};
use crate::formulations::{build, ip_worst, sinr_lhs, FormulationKind};
use crate::model::{outer_product, ComplexVec, HermitianMat, ScenarioConfig};

/// Minimum eigenvalue tolerated before a covariance is rejected as not PSD.
pub const PSD_TOLERANCE: f64 = 1e-8;
/// Rank-one defects above this trigger the scaling repair.
pub const DEFECT_THRESHOLD: f64 = 1e-6;
/// Margins at or above minus this value count as satisfied.
pub const MARGIN_TOLERANCE: f64 = 1e-6;
/// Largest amplitude factor tried by [`repair_by_scaling`].
pub const MAX_REPAIR_FACTOR: f64 = 10.0;

const REPAIR_BISECTION_TOL: f64 = 1e-9;

/// Worst-case constraint margins of a set of weights. Nonnegative margins
/// mean the constraint holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// `worst-case LHS − σ²γ_k` per secondary user.
    pub sinr: Vec<f64>,
    /// `κ_ℓ − worst-case interference` per primary user.
    pub ip: Vec<f64>,
}

impl Margins {
    pub fn min(&self) -> f64 {
        self.sinr.iter().chain(&self.ip).cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_certified(&self) -> bool {
        self.sinr.iter().chain(&self.ip).all(|&m| m >= -MARGIN_TOLERANCE)
    }
}

/// Outcome of [`repair_by_scaling`].
#[derive(Debug, Clone, PartialEq)]
pub enum Repair {
    Scaled { factor: f64, weights: Vec<ComplexVec> },
    Failed { reason: String },
}

#[derive(Debug, Clone)]
pub struct PrecoderSolution {
    pub formulation: FormulationKind,
    pub solver_status: SolverStatus,
    pub covariances: Vec<HermitianMat>,
    pub weights: Vec<ComplexVec>,
    /// `Σ Tr W_k` of the relaxed solution.
    pub objective: f64,
    pub rank1_defects: Vec<f64>,
    pub margins: Margins,
    /// Amplitude factor applied by the repair step, if it ran.
    pub repair_factor: Option<f64>,
}

impl PrecoderSolution {
    /// `Σ ‖w_k‖²` of the extracted weights.
    pub fn transmit_power(&self) -> f64 {
        self.weights.iter().map(ComplexVec::norm_squared).sum()
    }

    pub fn is_certified(&self) -> bool {
        self.margins.is_certified()
    }

    pub fn max_defect(&self) -> f64 {
        self.rank1_defects.iter().cloned().fold(0.0, f64::max)
    }
}

/// Full result of one design run, including failures.
#[derive(Debug, Clone)]
pub struct Design {
    pub formulation: FormulationKind,
    pub status: SolverStatus,
    pub iterations: usize,
    pub residuals: Residuals,
    pub solution: Option<PrecoderSolution>,
    /// Set when a solution existed but no certified weights could be made.
    pub extraction_error: Option<String>,
}

/// Rotates `v` so that its largest-magnitude entry (lowest index on ties)
/// is real and nonnegative.
pub fn fix_phase(v: &ComplexVec) -> ComplexVec {
    let s = v.as_slice();
    let mut best = 0;
    for (i, z) in s.iter().enumerate() {
        if z.norm() > s[best].norm() {
            best = i;
        }
    }
    let pivot = s[best];
    if pivot.norm() == 0.0 {
        return v.clone();
    }
    let rot = pivot.conj() / pivot.norm();
    ComplexVec::from_dvector(v.as_dvector().map(|z| z * rot))
}

/// `w = √λ_max · e_max` and the rank-one defect `1 − λ_max / Tr W`.
pub fn principal_weight(w: &HermitianMat) -> Result<(ComplexVec, f64)> {
    let trace = w.trace();
    if !(trace > 0.0) {
        return invalid(format!("covariance has non-positive trace {trace}"));
    }
    let (values, vectors) = w.eigen();
    let lmin = values[0];
    if lmin < -PSD_TOLERANCE {
        return invalid(format!("covariance is not PSD (minimum eigenvalue {lmin:e})"));
    }
    let lmax = *values.last().expect("nonempty spectrum");
    // Among (numerically) tied top eigenvectors prefer the one whose dominant
    // entry has the lowest index.
    let tie = 1e-12 * lmax.abs().max(1.0);
    let dominant = |col: usize| -> usize {
        let c = vectors.column(col);
        let mut best = 0;
        for i in 0..c.len() {
            if c[i].norm() > c[best].norm() + 1e-12 {
                best = i;
            }
        }
        best
    };
    let pick = (0..values.len())
        .filter(|&i| values[i] >= lmax - tie)
        .min_by_key(|&i| dominant(i))
        .expect("at least the top eigenvector qualifies");
    let e = DVector::from_iterator(vectors.nrows(), vectors.column(pick).iter().cloned());
    let amp = lmax.max(0.0).sqrt();
    let v = ComplexVec::from_dvector(e.map(|z| z * Complex64::new(amp, 0.0)));
    let defect = (1.0 - lmax / trace).clamp(0.0, 1.0);
    Ok((fix_phase(&v), defect))
}

/// Margins of `weights` under `kind`'s worst-case bounds with `W_k = w_k w_k†`.
pub fn certify_weights(s: &ScenarioConfig, weights: &[ComplexVec], kind: FormulationKind) -> Result<Margins> {
    if weights.len() != s.num_su() {
        return Err(Error::DimensionMismatch(format!(
            "{} weight vectors for {} secondary users",
            weights.len(),
            s.num_su()
        )));
    }
    for (k, w) in weights.iter().enumerate() {
        if w.len() != s.n_antennas {
            return Err(Error::DimensionMismatch(format!(
                "weight {k} has length {}, expected {}",
                w.len(),
                s.n_antennas
            )));
        }
    }
    let ws: Vec<HermitianMat> = weights.iter().map(outer_product).collect();
    let sinr = (0..s.num_su())
        .map(|k| sinr_lhs(kind, s, &ws, k) - s.noise_power * s.sinr_thresholds[k])
        .collect();
    let ip = (0..s.num_pu())
        .map(|l| s.ip_thresholds[l] - ip_worst(kind, s, &ws, l))
        .collect();
    Ok(Margins { sinr, ip })
}

fn scale_all(weights: &[ComplexVec], factor: f64) -> Vec<ComplexVec> {
    weights.iter().map(|w| w.scaled(factor)).collect()
}

/// Smallest common amplitude factor `α ∈ [1, 10]` that makes every SINR
/// margin nonnegative, provided the interference margins still hold there.
pub fn repair_by_scaling(s: &ScenarioConfig, weights: &[ComplexVec], kind: FormulationKind) -> Result<Repair> {
    if weights.iter().all(|w| w.norm() == 0.0) {
        return invalid("cannot repair all-zero weights");
    }
    let sinr_ok = |a: f64| -> Result<bool> {
        let m = certify_weights(s, &scale_all(weights, a), kind)?;
        Ok(m.sinr.iter().all(|&v| v >= 0.0))
    };
    let factor = if sinr_ok(1.0)? {
        1.0
    } else if !sinr_ok(MAX_REPAIR_FACTOR)? {
        return Ok(Repair::Failed {
            reason: format!("SINR constraints unmet for every factor up to {MAX_REPAIR_FACTOR}"),
        });
    } else {
        let (mut lo, mut hi) = (1.0, MAX_REPAIR_FACTOR);
        while hi - lo > REPAIR_BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if sinr_ok(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let scaled = scale_all(weights, factor);
    let m = certify_weights(s, &scaled, kind)?;
    if !m.is_certified() {
        return Ok(Repair::Failed {
            reason: format!(
                "interference limit exceeded at factor {factor:.9} (min margin {:e})",
                m.min()
            ),
        });
    }
    Ok(Repair::Scaled {
        factor,
        weights: scaled,
    })
}

/// Builds, solves and extracts weights for one formulation.
pub fn design(s: &ScenarioConfig, kind: FormulationKind, settings: &SolverSettings) -> Result<Design> {
    design_with(s, kind, settings, None)
}

/// As [`design`], optionally through an alternative solver backend.
pub fn design_with(
    s: &ScenarioConfig,
    kind: FormulationKind,
    settings: &SolverSettings,
    backend: Option<&dyn ConicBackend>,
) -> Result<Design> {
    let f = build(kind, s)?;
    let r = match backend {
        Some(b) => b.solve(&f.program, settings)?,
        None => solve(&f.program, settings)?,
    };
    let mut out = Design {
        formulation: kind,
        status: r.status,
        iterations: r.iterations,
        residuals: r.residuals,
        solution: None,
        extraction_error: None,
    };
    if !matches!(r.status, SolverStatus::Optimal | SolverStatus::Inaccurate) {
        return Ok(out);
    }
    let covariances = f.covariances(&r.x);
    let objective = covariances.iter().map(HermitianMat::trace).sum();
    let mut weights = Vec::with_capacity(covariances.len());
    let mut defects = Vec::with_capacity(covariances.len());
    for (k, w) in covariances.iter().enumerate() {
        match principal_weight(w) {
            Ok((v, d)) => {
                weights.push(v);
                defects.push(d);
            }
            Err(e) => {
                out.extraction_error = Some(format!("user {k}: {e}"));
                return Ok(out);
            }
        }
    }
    let mut margins = certify_weights(s, &weights, kind)?;
    let max_defect = defects.iter().cloned().fold(0.0, f64::max);
    let mut repair_factor = None;
    if max_defect > DEFECT_THRESHOLD || !margins.is_certified() {
        info!("{kind}: rank-one defect {max_defect:e}, running scaling repair");
        match repair_by_scaling(s, &weights, kind)? {
            Repair::Scaled { factor, weights: w } => {
                weights = w;
                margins = certify_weights(s, &weights, kind)?;
                repair_factor = Some(factor);
            }
            Repair::Failed { reason } => {
                warn!("{kind}: repair failed: {reason}");
                out.extraction_error = Some(reason);
            }
        }
    }
    out.solution = Some(PrecoderSolution {
        formulation: kind,
        solver_status: r.status,
        covariances,
        weights,
        objective,
        rank1_defects: defects,
        margins,
        repair_factor,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ula_steering, RadiusSpec};
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_user(eps: f64) -> ScenarioConfig {
        ScenarioConfig::from_angles(4, &[30.0], &[], 0.1, 3.0, 1.0, RadiusSpec::Matrix(eps), RadiusSpec::Matrix(0.0))
            .unwrap()
    }

    #[test]
    fn rank_one_is_recovered_up_to_phase() {
        let v = ComplexVec::new(vec![c(0.3, -0.4), c(1.0, 2.0), c(-0.5, 0.0)]).unwrap();
        let (w, d) = principal_weight(&outer_product(&v)).unwrap();
        assert!(d.abs() < 1e-12);
        let phase = v.inner(&w) / v.norm_squared();
        assert!((phase.norm() - 1.0).abs() < 1e-10);
        let diff = w.as_dvector() - v.as_dvector() * phase;
        assert!(diff.norm() < 1e-10);
        // Dominant entry is the second one; it must come out real and positive.
        assert!(w.as_slice()[1].im.abs() < 1e-12 && w.as_slice()[1].re > 0.0);
    }

    #[test]
    fn identity_tie_picks_first_axis() {
        let (w, d) = principal_weight(&HermitianMat::identity(2)).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert!((w.as_slice()[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(w.as_slice()[1].norm() < 1e-12);
    }

    #[test]
    fn phase_invariance() {
        let v = ComplexVec::new(vec![c(0.1, 0.7), c(-0.2, 0.3), c(0.9, -0.1)]).unwrap();
        let rot = ComplexVec::from_dvector(v.as_dvector().map(|z| z * Complex64::from_polar(1.0, 1.1)));
        let (a, da) = principal_weight(&outer_product(&v)).unwrap();
        let (b, db) = principal_weight(&outer_product(&rot)).unwrap();
        assert!((da - db).abs() < 1e-12);
        assert!((a.as_dvector() - b.as_dvector()).norm() < 1e-10);
    }

    #[test]
    fn mixed_rank_defect() {
        let w = HermitianMat::from_real_diagonal(&[3.0, 1.0, 0.0]);
        let (v, d) = principal_weight(&w).unwrap();
        assert!((d - 0.25).abs() < 1e-12);
        assert!((v.norm_squared() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_and_indefinite_rejected() {
        assert!(principal_weight(&HermitianMat::zeros(2)).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.1, 0.0)]);
        assert!(principal_weight(&HermitianMat::new(m).unwrap()).is_err());
    }

    #[test]
    fn zero_weights_margins() {
        let s = ScenarioConfig::golden();
        let zeros = vec![ComplexVec::zeros(8); 3];
        for kind in FormulationKind::ALL {
            let m = certify_weights(&s, &zeros, kind).unwrap();
            for (k, v) in m.sinr.iter().enumerate() {
                assert!((v + s.noise_power * s.sinr_thresholds[k]).abs() < 1e-15);
            }
            assert!(!m.is_certified());
        }
        assert!(certify_weights(&s, &zeros[..2], FormulationKind::Lbcs).is_err());
    }

    #[test]
    fn repair_single_user() {
        let s = single_user(0.05);
        let h = &s.su_channels[0];
        // Exactly feasible matched beam for the exact bound: |w†h|² − ε‖w‖² = σ²γ.
        let target = s.noise_power * s.sinr_thresholds[0];
        let p = target / (h.norm_squared() - 0.05);
        let w = h.scaled((p / h.norm_squared()).sqrt() * 1.001);
        let kind = FormulationKind::Excs;
        match repair_by_scaling(&s, std::slice::from_ref(&w), kind).unwrap() {
            Repair::Scaled { factor, .. } => assert_eq!(factor, 1.0),
            other => panic!("{other:?}"),
        }
        let shrunk = w.scaled(0.9);
        match repair_by_scaling(&s, std::slice::from_ref(&shrunk), kind).unwrap() {
            Repair::Scaled { factor, weights } => {
                // Margin is α²·L − σ²γ, so the root follows directly.
                let l = certify_weights(&s, &[shrunk], kind).unwrap().sinr[0] + target;
                let expect = (target / l).sqrt();
                assert!((factor - expect).abs() < 2e-9);
                assert!(factor >= 1.0);
                assert!(certify_weights(&s, &weights, kind).unwrap().is_certified());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn repair_fails_without_signal() {
        let s = single_user(0.0);
        // Null toward the SU at 30°: a second steering vector projected off h.
        let h = &s.su_channels[0];
        let u = ula_steering(120.0, 4).unwrap();
        let proj = h.inner(&u) / h.norm_squared();
        let w = ComplexVec::from_dvector(u.as_dvector() - h.as_dvector() * proj);
        assert!(w.gain_through(h) < 1e-20);
        assert!(matches!(
            repair_by_scaling(&s, &[w], FormulationKind::Lbcs).unwrap(),
            Repair::Failed { .. }
        ));
    }

    #[test]
    fn repair_reports_ip_violation() {
        let mut s = single_user(0.0);
        // PU co-located with the SU and a tiny cap.
        s.pu_channels = vec![s.su_channels[0].clone()];
        s.pu_uncertainty = vec![crate::model::UncertaintyBall::none()];
        s.ip_thresholds = vec![1e-4];
        s.pu_angles_deg = None;
        s.su_angles_deg = None;
        let w = s.su_channels[0].scaled(0.01);
        assert!(matches!(
            repair_by_scaling(&s, &[w], FormulationKind::Lbcs).unwrap(),
            Repair::Failed { .. }
        ));
    }
}
