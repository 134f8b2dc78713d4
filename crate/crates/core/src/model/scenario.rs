//! Scenario instances and their plain-text file format.
//!
//! A scenario file is TOML. Top-level keys give the array size and noise
//! power; each `[[su]]` / `[[pu]]` table describes one receiver:
//!
//! ```text
//! n_antennas = 8
//! noise_power = 0.01
//!
//! [[su]]
//! angle_deg = 20.0            # or: channel = [[re, im], ...]
//! sinr_threshold = "10 dB"    # unit suffix is mandatory: "dB" or "lin"
//! matrix_radius = 0.05        # or: vector_radius = ...
//!
//! [[pu]]
//! angle_deg = 80.0
//! ip_threshold = "0.01 lin"
//! matrix_radius = 0.05
//! ```

use std::str::FromStr;

use num_complex::Complex64;
use serde::Deserialize;

use super::{check_dim, ula_steering, ComplexVec, UncertaintyBall};
use crate::error::{invalid, Error, Result};

/// A threshold written with an explicit unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Db(f64),
    Linear(f64),
}

impl Threshold {
    pub fn linear(self) -> f64 {
        match self {
            Threshold::Db(db) => 10f64.powf(db / 10.0),
            Threshold::Linear(v) => v,
        }
    }
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num, unit) = s
            .rsplit_once(char::is_whitespace)
            .ok_or_else(|| Error::Parse(format!("threshold {s:?} needs a unit suffix (dB or lin)")))?;
        let value: f64 = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("threshold {s:?}: {num:?} is not a number")))?;
        match unit.to_ascii_lowercase().as_str() {
            "db" => Ok(Threshold::Db(value)),
            "lin" | "linear" => Ok(Threshold::Linear(value)),
            other => Err(Error::Parse(format!(
                "threshold {s:?}: unknown unit {other:?} (expected dB or lin)"
            ))),
        }
    }
}

/// How an uncertainty radius is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusSpec {
    Vector(f64),
    Matrix(f64),
}

impl RadiusSpec {
    pub fn ball(self, nominal: &ComplexVec) -> Result<UncertaintyBall> {
        match self {
            RadiusSpec::Vector(d) => UncertaintyBall::from_vector_radius(d, nominal),
            RadiusSpec::Matrix(e) => UncertaintyBall::from_matrix_radius(e, nominal),
        }
    }
}

/// Full problem instance for one SU transmitter.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n_antennas: usize,
    pub su_channels: Vec<ComplexVec>,
    pub pu_channels: Vec<ComplexVec>,
    pub su_uncertainty: Vec<UncertaintyBall>,
    pub pu_uncertainty: Vec<UncertaintyBall>,
    /// Linear-scale SINR targets `γ_k`.
    pub sinr_thresholds: Vec<f64>,
    /// Interference caps `κ_ℓ` in power units.
    pub ip_thresholds: Vec<f64>,
    pub noise_power: f64,
    /// Directions the nominal channels were synthesized from, when known.
    pub su_angles_deg: Option<Vec<f64>>,
    pub pu_angles_deg: Option<Vec<f64>>,
}

impl ScenarioConfig {
    /// Builds and validates a scenario.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_antennas: usize,
        su_channels: Vec<ComplexVec>,
        pu_channels: Vec<ComplexVec>,
        su_uncertainty: Vec<UncertaintyBall>,
        pu_uncertainty: Vec<UncertaintyBall>,
        sinr_thresholds: Vec<f64>,
        ip_thresholds: Vec<f64>,
        noise_power: f64,
    ) -> Result<Self> {
        let s = Self {
            n_antennas,
            su_channels,
            pu_channels,
            su_uncertainty,
            pu_uncertainty,
            sinr_thresholds,
            ip_thresholds,
            noise_power,
            su_angles_deg: None,
            pu_angles_deg: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// ULA scenario with common thresholds and common matrix radii.
    #[allow(clippy::too_many_arguments)]
    pub fn from_angles(
        n_antennas: usize,
        su_angles_deg: &[f64],
        pu_angles_deg: &[f64],
        noise_power: f64,
        sinr_threshold: f64,
        ip_threshold: f64,
        su_radius: RadiusSpec,
        pu_radius: RadiusSpec,
    ) -> Result<Self> {
        let su: Vec<ComplexVec> = su_angles_deg
            .iter()
            .map(|&t| ula_steering(t, n_antennas))
            .collect::<Result<_>>()?;
        let pu: Vec<ComplexVec> = pu_angles_deg
            .iter()
            .map(|&t| ula_steering(t, n_antennas))
            .collect::<Result<_>>()?;
        let su_unc = su.iter().map(|h| su_radius.ball(h)).collect::<Result<_>>()?;
        let pu_unc = pu.iter().map(|g| pu_radius.ball(g)).collect::<Result<_>>()?;
        let mut s = Self::new(
            n_antennas,
            su,
            pu,
            su_unc,
            pu_unc,
            vec![sinr_threshold; su_angles_deg.len()],
            vec![ip_threshold; pu_angles_deg.len()],
            noise_power,
        )?;
        s.su_angles_deg = Some(su_angles_deg.to_vec());
        s.pu_angles_deg = Some(pu_angles_deg.to_vec());
        Ok(s)
    }

    /// Eight-element ULA, three SUs at 20/35/50°, two PUs at 80/85°,
    /// σ² = 0.01, γ = 10 dB, κ = 0.01, ε = ξ = 0.05.
    pub fn golden() -> Self {
        Self::from_angles(
            8,
            &[20.0, 35.0, 50.0],
            &[80.0, 85.0],
            0.01,
            Threshold::Db(10.0).linear(),
            0.01,
            RadiusSpec::Matrix(0.05),
            RadiusSpec::Matrix(0.05),
        )
        .expect("built-in scenario is valid")
    }

    pub fn num_su(&self) -> usize {
        self.su_channels.len()
    }

    pub fn num_pu(&self) -> usize {
        self.pu_channels.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_antennas;
        if n == 0 {
            return invalid("n_antennas must be positive");
        }
        if self.su_channels.is_empty() {
            return invalid("scenario needs at least one secondary user");
        }
        for (k, h) in self.su_channels.iter().enumerate() {
            check_dim(&format!("su[{k}] channel"), h.len(), n)?;
        }
        for (l, g) in self.pu_channels.iter().enumerate() {
            check_dim(&format!("pu[{l}] channel"), g.len(), n)?;
        }
        check_dim("su uncertainty list", self.su_uncertainty.len(), self.num_su())?;
        check_dim("pu uncertainty list", self.pu_uncertainty.len(), self.num_pu())?;
        check_dim("sinr threshold list", self.sinr_thresholds.len(), self.num_su())?;
        check_dim("ip threshold list", self.ip_thresholds.len(), self.num_pu())?;
        for (k, &g) in self.sinr_thresholds.iter().enumerate() {
            if !(g > 0.0) || !g.is_finite() {
                return invalid(format!("su[{k}] SINR threshold must be positive, got {g}"));
            }
        }
        for (l, &k) in self.ip_thresholds.iter().enumerate() {
            if !(k > 0.0) || !k.is_finite() {
                return invalid(format!("pu[{l}] IP threshold must be positive, got {k}"));
            }
        }
        if !(self.noise_power > 0.0) || !self.noise_power.is_finite() {
            return invalid(format!("noise power must be positive, got {}", self.noise_power));
        }
        for (k, b) in self.su_uncertainty.iter().chain(&self.pu_uncertainty).enumerate() {
            if !(b.vector_radius >= 0.0 && b.matrix_radius >= 0.0) {
                return invalid(format!("uncertainty radii must be >= 0 (entry {k})"));
            }
        }
        Ok(())
    }

    /// Copy with every SU matrix radius set to `eps` and every PU matrix
    /// radius set to `xi`; vector radii follow by inversion of the lift.
    pub fn with_matrix_radii(&self, eps: f64, xi: f64) -> Result<Self> {
        let mut s = self.clone();
        s.su_uncertainty = s
            .su_channels
            .iter()
            .map(|h| UncertaintyBall::from_matrix_radius(eps, h))
            .collect::<Result<_>>()?;
        s.pu_uncertainty = s
            .pu_channels
            .iter()
            .map(|g| UncertaintyBall::from_matrix_radius(xi, g))
            .collect::<Result<_>>()?;
        Ok(s)
    }

    pub fn with_sinr_threshold(&self, gamma: f64) -> Result<Self> {
        let mut s = self.clone();
        s.sinr_thresholds = vec![gamma; s.num_su()];
        s.validate()?;
        Ok(s)
    }

    pub fn with_ip_threshold(&self, kappa: f64) -> Result<Self> {
        let mut s = self.clone();
        s.ip_thresholds = vec![kappa; s.num_pu()];
        s.validate()?;
        Ok(s)
    }

    /// Copy with all primary users removed.
    pub fn without_primary_users(&self) -> Self {
        let mut s = self.clone();
        s.pu_channels.clear();
        s.pu_uncertainty.clear();
        s.ip_thresholds.clear();
        s.pu_angles_deg = s.pu_angles_deg.map(|_| Vec::new());
        s
    }

    pub fn is_non_robust(&self) -> bool {
        self.su_uncertainty
            .iter()
            .chain(&self.pu_uncertainty)
            .all(|b| b.matrix_radius == 0.0)
    }

    /// Parses the TOML scenario format described in the module docs.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| {
            let loc = e
                .span()
                .map(|sp| {
                    let line = text[..sp.start.min(text.len())].matches('\n').count() + 1;
                    format!("line {line}: ")
                })
                .unwrap_or_default();
            Error::Parse(format!("{loc}{}", e.message()))
        })?;
        raw.into_config()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    n_antennas: usize,
    noise_power: f64,
    #[serde(default)]
    su: Vec<RawUser>,
    #[serde(default)]
    pu: Vec<RawUser>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUser {
    angle_deg: Option<f64>,
    channel: Option<Vec<[f64; 2]>>,
    sinr_threshold: Option<String>,
    ip_threshold: Option<String>,
    vector_radius: Option<f64>,
    matrix_radius: Option<f64>,
}

impl RawUser {
    fn channel(&self, n: usize, field: &str) -> Result<(ComplexVec, Option<f64>)> {
        match (&self.angle_deg, &self.channel) {
            (Some(theta), None) => {
                if !(0.0..=180.0).contains(theta) {
                    return Err(Error::Parse(format!(
                        "{field}.angle_deg = {theta} is outside [0, 180]"
                    )));
                }
                Ok((ula_steering(*theta, n)?, Some(*theta)))
            }
            (None, Some(entries)) => {
                if entries.len() != n {
                    return Err(Error::Parse(format!(
                        "{field}.channel has {} entries, expected n_antennas = {n}",
                        entries.len()
                    )));
                }
                let v = entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                let v = ComplexVec::new(v).map_err(|e| Error::Parse(format!("{field}.channel: {e}")))?;
                Ok((v, None))
            }
            _ => Err(Error::Parse(format!(
                "{field}: give exactly one of angle_deg or channel"
            ))),
        }
    }

    fn radius(&self, field: &str) -> Result<RadiusSpec> {
        match (self.vector_radius, self.matrix_radius) {
            (Some(d), None) => Ok(RadiusSpec::Vector(d)),
            (None, Some(e)) => Ok(RadiusSpec::Matrix(e)),
            _ => Err(Error::Parse(format!(
                "{field}: give exactly one of vector_radius or matrix_radius"
            ))),
        }
    }
}

fn parse_threshold(value: &Option<String>, field: &str) -> Result<f64> {
    let s = value
        .as_ref()
        .ok_or_else(|| Error::Parse(format!("{field} is missing")))?;
    let t: Threshold = s.parse().map_err(|e: Error| Error::Parse(format!("{field}: {e}")))?;
    Ok(t.linear())
}

impl RawScenario {
    fn into_config(self) -> Result<ScenarioConfig> {
        let n = self.n_antennas;
        if n == 0 {
            return Err(Error::Parse("n_antennas must be positive".into()));
        }
        let mut su_ch = Vec::new();
        let mut su_unc = Vec::new();
        let mut gammas = Vec::new();
        let mut su_angles = Vec::new();
        for (k, u) in self.su.iter().enumerate() {
            let field = format!("su[{k}]");
            if u.ip_threshold.is_some() {
                return Err(Error::Parse(format!("{field}: ip_threshold belongs to [[pu]] entries")));
            }
            let (h, angle) = u.channel(n, &field)?;
            let ball = u
                .radius(&field)?
                .ball(&h)
                .map_err(|e| Error::Parse(format!("{field}: {e}")))?;
            gammas.push(parse_threshold(&u.sinr_threshold, &format!("{field}.sinr_threshold"))?);
            su_angles.push(angle);
            su_ch.push(h);
            su_unc.push(ball);
        }
        let mut pu_ch = Vec::new();
        let mut pu_unc = Vec::new();
        let mut kappas = Vec::new();
        let mut pu_angles = Vec::new();
        for (l, u) in self.pu.iter().enumerate() {
            let field = format!("pu[{l}]");
            if u.sinr_threshold.is_some() {
                return Err(Error::Parse(format!("{field}: sinr_threshold belongs to [[su]] entries")));
            }
            let (g, angle) = u.channel(n, &field)?;
            let ball = u
                .radius(&field)?
                .ball(&g)
                .map_err(|e| Error::Parse(format!("{field}: {e}")))?;
            kappas.push(parse_threshold(&u.ip_threshold, &format!("{field}.ip_threshold"))?);
            pu_angles.push(angle);
            pu_ch.push(g);
            pu_unc.push(ball);
        }
        let mut cfg = ScenarioConfig::new(n, su_ch, pu_ch, su_unc, pu_unc, gammas, kappas, self.noise_power)
            .map_err(|e| Error::Parse(e.to_string()))?;
        if su_angles.iter().all(Option::is_some) {
            cfg.su_angles_deg = Some(su_angles.into_iter().flatten().collect());
        }
        if pu_angles.iter().all(Option::is_some) {
            cfg.pu_angles_deg = Some(pu_angles.into_iter().flatten().collect());
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEC7: &str = r#"
n_antennas = 8
noise_power = 0.01

[[su]]
angle_deg = 20.0
sinr_threshold = "10 dB"
matrix_radius = 0.05

[[su]]
angle_deg = 35.0
sinr_threshold = "10 dB"
matrix_radius = 0.05

[[su]]
angle_deg = 50.0
sinr_threshold = "10 dB"
matrix_radius = 0.05

[[pu]]
angle_deg = 80.0
ip_threshold = "0.01 lin"
matrix_radius = 0.05

[[pu]]
angle_deg = 85.0
ip_threshold = "0.01 lin"
matrix_radius = 0.05
"#;

    #[test]
    fn parses_builtin_equivalent() {
        let s = ScenarioConfig::from_toml_str(SEC7).unwrap();
        assert_eq!(s, ScenarioConfig::golden());
        assert!((s.sinr_thresholds[0] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_units() {
        assert_eq!("10 dB".parse::<Threshold>().unwrap().linear(), 10.0);
        assert_eq!("0.5 lin".parse::<Threshold>().unwrap().linear(), 0.5);
        assert!("10".parse::<Threshold>().is_err());
        assert!("10 watts".parse::<Threshold>().is_err());
    }

    #[test]
    fn explicit_channels_and_vector_radius() {
        let text = r#"
n_antennas = 2
noise_power = 0.1
[[su]]
channel = [[1.0, 0.0], [0.0, 1.0]]
sinr_threshold = "2 lin"
vector_radius = 0.1
"#;
        let s = ScenarioConfig::from_toml_str(text).unwrap();
        assert_eq!(s.num_pu(), 0);
        let eps = 0.01 + 0.2 * 2f64.sqrt();
        assert!((s.su_uncertainty[0].matrix_radius - eps).abs() < 1e-14);
        assert!(s.su_angles_deg.is_none());
    }

    #[test]
    fn diagnostics_name_field_or_line() {
        let both = SEC7.replacen("matrix_radius = 0.05", "matrix_radius = 0.05\nvector_radius = 0.1", 1);
        let e = ScenarioConfig::from_toml_str(&both).unwrap_err().to_string();
        assert!(e.contains("su[0]"), "{e}");

        let unitless = SEC7.replacen("\"10 dB\"", "\"10\"", 1);
        let e = ScenarioConfig::from_toml_str(&unitless).unwrap_err().to_string();
        assert!(e.contains("su[0].sinr_threshold"), "{e}");

        let broken = SEC7.replacen("noise_power = 0.01", "noise_power = = 0.01", 1);
        let e = ScenarioConfig::from_toml_str(&broken).unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");

        let short = "n_antennas = 3\nnoise_power = 1.0\n[[su]]\nchannel = [[1.0, 0.0]]\nsinr_threshold = \"1 lin\"\nmatrix_radius = 0.0\n";
        let e = ScenarioConfig::from_toml_str(short).unwrap_err().to_string();
        assert!(e.contains("su[0].channel"), "{e}");
    }

    #[test]
    fn rejects_bad_values() {
        let neg = SEC7.replacen("noise_power = 0.01", "noise_power = -1.0", 1);
        assert!(ScenarioConfig::from_toml_str(&neg).is_err());
        let nosu = "n_antennas = 3\nnoise_power = 1.0\n";
        assert!(ScenarioConfig::from_toml_str(nosu).is_err());
    }
}
