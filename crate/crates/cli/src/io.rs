use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crbeam::conic::{Residuals, SolverStatus};
use crbeam::extract::{Design, Margins};
use crbeam::formulations::FormulationKind;
use crbeam::model::{ComplexVec, ScenarioConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const TOOL: &str = "crbeam";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const BUNDLED_SCENARIO: &str = include_str!("../../../scenarios/paper_sec7.txt");
pub const BUNDLED_NAME: &str = "<bundled>/paper_sec7.txt";

/// A parsed scenario with the provenance recorded in every output.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub config: ScenarioConfig,
    pub path: String,
    pub sha256: String,
}

impl LoadedScenario {
    pub fn label(&self) -> &'static str {
        if self.config.is_non_robust() {
            "non-robust"
        } else {
            "robust"
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn load_scenario(path: Option<&Path>) -> Result<LoadedScenario, CliError> {
    let (text, name) = match path {
        Some(p) => (
            fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?,
            p.display().to_string(),
        ),
        None => (BUNDLED_SCENARIO.to_string(), BUNDLED_NAME.to_string()),
    };
    let config = ScenarioConfig::from_toml_str(&text).map_err(|e| CliError::Usage(format!("{name}: {e}")))?;
    Ok(LoadedScenario {
        config,
        path: name,
        sha256: sha256_hex(text.as_bytes()),
    })
}

/// Provenance block embedded in every structured output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub scenario_path: String,
    pub scenario_sha256: String,
}

impl Provenance {
    pub fn new(s: &LoadedScenario, seed: u64) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            seed,
            scenario_path: s.path.clone(),
            scenario_sha256: s.sha256.clone(),
        }
    }

    /// Comment line placed at the top of CSV files.
    pub fn csv_comment(&self) -> String {
        format!(
            "# {} {} seed={} scenario_sha256={}\n",
            self.tool, self.version, self.seed, self.scenario_sha256
        )
    }
}

/// Serialized result of one design run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub provenance: Provenance,
    pub method: FormulationKind,
    pub label: String,
    pub status: SolverStatus,
    pub iterations: usize,
    pub residuals: Residuals,
    pub objective: Option<f64>,
    pub transmit_power: Option<f64>,
    /// Per user, per antenna `[re, im]`.
    pub weights: Option<Vec<Vec<[f64; 2]>>>,
    pub rank1_defects: Option<Vec<f64>>,
    pub margins: Option<Margins>,
    pub repair_factor: Option<f64>,
    pub certified: bool,
    pub extraction_error: Option<String>,
}

impl SolutionFile {
    pub fn from_design(d: &Design, prov: Provenance, label: &str) -> Self {
        let sol = d.solution.as_ref();
        Self {
            provenance: prov,
            method: d.formulation,
            label: label.into(),
            status: d.status,
            iterations: d.iterations,
            residuals: d.residuals,
            objective: sol.map(|s| s.objective),
            transmit_power: sol.map(|s| s.transmit_power()),
            weights: sol.map(|s| {
                s.weights
                    .iter()
                    .map(|w| w.as_slice().iter().map(|z| [z.re, z.im]).collect())
                    .collect()
            }),
            rank1_defects: sol.map(|s| s.rank1_defects.clone()),
            margins: sol.map(|s| s.margins.clone()),
            repair_factor: sol.and_then(|s| s.repair_factor),
            certified: d.extraction_error.is_none() && sol.is_some_and(|s| s.is_certified()),
            extraction_error: d.extraction_error.clone(),
        }
    }

    /// The solve produced usable weights.
    pub fn succeeded(&self) -> bool {
        self.weights.is_some() && self.extraction_error.is_none()
    }

    /// Weight vectors checked against the scenario dimensions.
    pub fn weight_vectors(&self, s: &ScenarioConfig, source: &str) -> Result<Vec<ComplexVec>, CliError> {
        let Some(raw) = &self.weights else {
            return Err(CliError::Solver(format!(
                "{source}: {} run has no weights (status {})",
                self.method, self.status
            )));
        };
        if raw.len() != s.num_su() {
            return Err(CliError::Usage(format!(
                "{source}: {} weight vectors but the scenario has {} secondary users",
                raw.len(),
                s.num_su()
            )));
        }
        raw.iter()
            .enumerate()
            .map(|(k, w)| {
                if w.len() != s.n_antennas {
                    return Err(CliError::Usage(format!(
                        "{source}: weight vector for user {} has {} entries, scenario has {} antennas",
                        k + 1,
                        w.len(),
                        s.n_antennas
                    )));
                }
                ComplexVec::new(w.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                    .map_err(|e| CliError::Usage(format!("{source}: user {}: {e}", k + 1)))
            })
            .collect()
    }
}

pub fn read_solution(path: &Path) -> Result<SolutionFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    fs::write(path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    text.push('\n');
    write_file(path, &text)
}

/// CSV with the provenance comment, a header and one line per row.
pub fn write_csv(path: &Path, prov: &Provenance, header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut text = prov.csv_comment();
    text.push_str(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    write_file(path, &text)
}

pub fn design_path(out: &Path, method: FormulationKind) -> PathBuf {
    out.join(format!("design_{}.json", method.as_str()))
}

pub fn method_dir(out: &Path, method: FormulationKind) -> PathBuf {
    out.join(method.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenario_is_the_reference_setup() {
        let s = load_scenario(None).unwrap();
        assert_eq!(s.config, ScenarioConfig::golden());
        assert_eq!(s.label(), "robust");
        assert_eq!(s.sha256.len(), 64);
    }

    #[test]
    fn sha256_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
