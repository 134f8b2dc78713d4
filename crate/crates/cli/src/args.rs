use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use crbeam::formulations::FormulationKind;

#[derive(Debug, Parser)]
#[command(name = "crbeam", version, about = "Robust beamforming design and verification for cognitive radio downlinks")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Scenario file (TOML). Defaults to the bundled eight-antenna scenario.
    #[arg(long, global = true, value_name = "PATH")]
    pub scenario: Option<PathBuf>,

    /// Comma-separated formulations: lbcs, sbcs, excs or all.
    #[arg(long, global = true, default_value = "all", value_name = "LIST")]
    pub method: String,

    /// Monte-Carlo sample count for `verify`.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,

    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,

    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,

    #[arg(long = "max-iters", global = true, default_value_t = 50_000)]
    pub max_iters: usize,

    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand, Clone)]
pub enum Command {
    /// Solve the requested formulations and write one result file each.
    Design,
    /// Monte-Carlo check of designed weights under channel perturbations.
    Verify {
        /// Design result files; defaults to `design_<method>.json` in the
        /// output directory.
        #[arg(long = "solution", value_name = "PATH")]
        solutions: Vec<PathBuf>,
        /// Perturb steering angles uniformly within ±DEG instead of sampling
        /// the uncertainty balls.
        #[arg(long = "angular-deg", value_name = "DEG")]
        angular_deg: Option<f64>,
    },
    /// Total transmit power over a grid of SINR thresholds and IP levels.
    Sweep {
        /// SINR thresholds in dB.
        #[arg(long = "gamma-db", value_delimiter = ',', default_value = "6,7,8,9,10,11,12,13,14", allow_hyphen_values = true)]
        gamma_db: Vec<f64>,
        /// Interference levels 10·log10(κ/σ²) in dB.
        #[arg(long = "ip-level-db", value_delimiter = ',', default_value = "0,-4", allow_hyphen_values = true)]
        ip_level_db: Vec<f64>,
    },
    /// Array gain of each user's weights from 0° to 180°.
    Gain {
        /// Design result files; when absent, designs are loaded from the
        /// output directory or computed.
        #[arg(long = "solution", value_name = "PATH")]
        solutions: Vec<PathBuf>,
    },
    /// Built-in solver and formula checks.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Design => "design",
            Command::Verify { .. } => "verify",
            Command::Sweep { .. } => "sweep",
            Command::Gain { .. } => "gain",
            Command::Selftest => "selftest",
        }
    }
}

/// Parses the `--method` list. Empty lists are rejected.
pub fn parse_methods(list: &str) -> Result<Vec<FormulationKind>, String> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item.eq_ignore_ascii_case("all") {
            for k in FormulationKind::ALL {
                if !out.contains(&k) {
                    out.push(k);
                }
            }
            continue;
        }
        let k: FormulationKind = item.parse().map_err(|e: crbeam::Error| e.to_string())?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    if out.is_empty() {
        return Err("no formulation requested (use --method lbcs,sbcs,excs or all)".into());
    }
    Ok(out)
}
