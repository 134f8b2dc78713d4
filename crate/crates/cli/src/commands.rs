use std::path::{Path, PathBuf};

use crbeam::conic::SolverSettings;
use crbeam::evaluate::{array_gain, default_theta_grid, monte_carlo_with, power_sweep, RobustnessReport, SamplingMode};
use crbeam::extract::design;
use crbeam::formulations::FormulationKind;
use crbeam::selftest::run_selftest;
use serde::Serialize;

use crate::args::{CommonArgs, Command};
use crate::io::{
    design_path, method_dir, read_solution, write_csv, write_json, LoadedScenario, Provenance, SolutionFile,
};
use crate::CliError;

/// Everything that determines a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub scenario: String,
    pub methods: Vec<FormulationKind>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    pub samples: usize,
    pub out: PathBuf,
}

impl RunManifest {
    pub fn new(common: &CommonArgs, command: &Command, scenario: &str, methods: Vec<FormulationKind>) -> Self {
        Self {
            command: command.name().into(),
            scenario: scenario.into(),
            methods,
            tolerance: common.tol,
            max_iterations: common.max_iters,
            seed: common.seed,
            samples: common.samples,
            out: common.out.clone(),
        }
    }

    pub fn settings(&self) -> Result<SolverSettings, CliError> {
        let s = SolverSettings::default()
            .with_tolerance(self.tolerance)
            .with_max_iterations(self.max_iterations);
        s.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(s)
    }
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    provenance: &'a Provenance,
    manifest: &'a RunManifest,
    label: &'a str,
    results: T,
}

fn write_summary<T: Serialize>(
    m: &RunManifest,
    prov: &Provenance,
    label: &str,
    results: T,
) -> Result<(), CliError> {
    let path = m.out.join(format!("summary_{}.json", m.command));
    write_json(
        &path,
        &Summary {
            provenance: prov,
            manifest: m,
            label,
            results,
        },
    )
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_else(|| "-".into())
}

pub fn cmd_design(m: &RunManifest, s: &LoadedScenario) -> Result<(), CliError> {
    let settings = m.settings()?;
    let prov = Provenance::new(s, m.seed);
    let label = s.label();
    let mut files = Vec::new();
    println!("{label} design, scenario {}", s.path);
    println!("{:<6} {:<18} {:>8} {:>16} {:>12} {:>10}", "method", "status", "iters", "objective", "max defect", "certified");
    for &kind in &m.methods {
        let d = design(&s.config, kind, &settings).map_err(|e| CliError::Usage(e.to_string()))?;
        let file = SolutionFile::from_design(&d, prov.clone(), label);
        let defect = file.rank1_defects.as_ref().map(|v| v.iter().cloned().fold(0.0, f64::max));
        println!(
            "{:<6} {:<18} {:>8} {:>16} {:>12} {:>10}",
            kind.to_string(),
            d.status.to_string(),
            d.iterations,
            fmt_opt(file.objective, 10),
            defect.map(|v| format!("{v:.1e}")).unwrap_or_else(|| "-".into()),
            file.certified
        );
        if let Some(e) = &file.extraction_error {
            println!("       note: {e}");
        }
        write_json(&design_path(&m.out, kind), &file)?;
        files.push(file);
    }
    let solved: Vec<&SolutionFile> = files.iter().filter(|f| f.objective.is_some()).collect();
    if solved.len() > 1 {
        let mut v: Vec<&SolutionFile> = solved.clone();
        v.sort_by(|a, b| a.objective.partial_cmp(&b.objective).expect("finite objectives"));
        let mut line = v[0].method.to_string();
        for w in v.windows(2) {
            let (a, b) = (w[0].objective.unwrap_or(0.0), w[1].objective.unwrap_or(0.0));
            // Differences inside the ordering tolerance print as ties.
            let sep = if b - a <= 1e-5 * (1.0 + b.abs()) { " ~ " } else { " < " };
            line.push_str(sep);
            line.push_str(&w[1].method.to_string());
        }
        println!("transmit power ordering: {line}");
    }
    #[derive(Serialize)]
    struct Row<'a> {
        method: FormulationKind,
        status: String,
        objective: Option<f64>,
        transmit_power: Option<f64>,
        rank1_defects: &'a Option<Vec<f64>>,
        repair_factor: Option<f64>,
        certified: bool,
    }
    let rows: Vec<Row> = files
        .iter()
        .map(|f| Row {
            method: f.method,
            status: f.status.to_string(),
            objective: f.objective,
            transmit_power: f.transmit_power,
            rank1_defects: &f.rank1_defects,
            repair_factor: f.repair_factor,
            certified: f.certified,
        })
        .collect();
    write_summary(m, &prov, label, rows)?;
    if files.iter().all(|f| !f.succeeded()) {
        return Err(CliError::Solver("no requested formulation produced a design".into()));
    }
    Ok(())
}

/// Solutions named on the command line, or the design files in the output
/// directory. With `design_missing`, absent designs are computed.
fn gather_solutions(
    m: &RunManifest,
    s: &LoadedScenario,
    explicit: &[PathBuf],
    design_missing: bool,
) -> Result<Vec<(String, SolutionFile)>, CliError> {
    if !explicit.is_empty() {
        return explicit
            .iter()
            .map(|p| Ok((p.display().to_string(), read_solution(p)?)))
            .collect();
    }
    let mut out = Vec::new();
    for &kind in &m.methods {
        let p = design_path(&m.out, kind);
        if p.exists() {
            out.push((p.display().to_string(), read_solution(&p)?));
        } else if design_missing {
            let d = design(&s.config, kind, &m.settings()?).map_err(|e| CliError::Usage(e.to_string()))?;
            let f = SolutionFile::from_design(&d, Provenance::new(s, m.seed), s.label());
            write_json(&p, &f)?;
            out.push((p.display().to_string(), f));
        } else {
            return Err(CliError::Usage(format!(
                "{} not found; run `design` first or pass --solution",
                p.display()
            )));
        }
    }
    Ok(out)
}

fn write_histograms(dir: &Path, prov: &Provenance, r: &RobustnessReport) -> Result<(), CliError> {
    let hist = |name: String, h: &crbeam::evaluate::Histogram| -> Result<(), CliError> {
        let rows: Vec<String> = h
            .counts
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{},{},{}", h.edges[i], h.edges[i + 1], c))
            .collect();
        write_csv(&dir.join(format!("hist_{name}.csv")), prov, "bin_lo,bin_hi,count", &rows)
    };
    for (k, st) in r.sinr.iter().enumerate() {
        hist(format!("sinr_su{}", k + 1), &st.histogram)?;
    }
    for (l, st) in r.ip.iter().enumerate() {
        hist(format!("ip_pu{}", l + 1), &st.histogram)?;
    }
    Ok(())
}

pub fn cmd_verify(
    m: &RunManifest,
    s: &LoadedScenario,
    solutions: &[PathBuf],
    angular_deg: Option<f64>,
) -> Result<(), CliError> {
    if m.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let mode = match angular_deg {
        Some(d) => SamplingMode::Angular { max_deg: d },
        None => SamplingMode::Ball,
    };
    let prov = Provenance::new(s, m.seed);
    let sols = gather_solutions(m, s, solutions, false)?;
    let mut any_violation = false;
    let mut reports = Vec::new();
    println!("verification under scenario {} ({} samples, seed {})", s.path, m.samples, m.seed);
    for (source, f) in &sols {
        let weights = f.weight_vectors(&s.config, source)?;
        let r = monte_carlo_with(&s.config, &weights, m.samples, m.seed, mode)
            .map_err(|e| CliError::Usage(format!("{source}: {e}")))?;
        let dir = method_dir(&m.out, f.method);
        write_histograms(&dir, &prov, &r)?;
        let tag = format!("{} ({})", f.method, f.label);
        println!(
            "{tag:<22} sinr violations {:.4}  ip violations {:.4}",
            r.sinr_violation_fraction, r.ip_violation_fraction
        );
        for (k, st) in r.sinr.iter().enumerate() {
            println!(
                "    su{} C_sinr sampled min {:.6} mean {:.6} max {:.6}  matrix-ball worst {:.6}",
                k + 1,
                st.min,
                st.mean,
                st.max,
                st.matrix_ball_worst
            );
        }
        for (l, st) in r.ip.iter().enumerate() {
            println!(
                "    pu{} C_ip   sampled min {:.6} mean {:.6} max {:.6}  matrix-ball worst {:.6}",
                l + 1,
                st.min,
                st.mean,
                st.max,
                st.matrix_ball_worst
            );
        }
        any_violation |= r.has_violations();
        #[derive(Serialize)]
        struct VerifyFile<'a> {
            provenance: &'a Provenance,
            solution: &'a str,
            method: FormulationKind,
            design_label: &'a str,
            report: &'a RobustnessReport,
        }
        write_json(
            &dir.join("verify.json"),
            &VerifyFile {
                provenance: &prov,
                solution: source,
                method: f.method,
                design_label: &f.label,
                report: &r,
            },
        )?;
        reports.push((f.method, r));
    }
    #[derive(Serialize)]
    struct Row {
        method: FormulationKind,
        sinr_violation_fraction: f64,
        ip_violation_fraction: f64,
        min_sinr: Vec<f64>,
        matrix_ball_worst_sinr: Vec<f64>,
        max_ip: Vec<f64>,
        matrix_ball_worst_ip: Vec<f64>,
    }
    let rows: Vec<Row> = reports
        .iter()
        .map(|(k, r)| Row {
            method: *k,
            sinr_violation_fraction: r.sinr_violation_fraction,
            ip_violation_fraction: r.ip_violation_fraction,
            min_sinr: r.sinr.iter().map(|c| c.min).collect(),
            matrix_ball_worst_sinr: r.sinr.iter().map(|c| c.matrix_ball_worst).collect(),
            max_ip: r.ip.iter().map(|c| c.max).collect(),
            matrix_ball_worst_ip: r.ip.iter().map(|c| c.matrix_ball_worst).collect(),
        })
        .collect();
    write_summary(m, &prov, s.label(), rows)?;
    if any_violation {
        return Err(CliError::Violations("sampled constraint violations found".into()));
    }
    println!("certified: zero violations");
    Ok(())
}

pub fn cmd_sweep(m: &RunManifest, s: &LoadedScenario, gamma_db: &[f64], levels: &[f64]) -> Result<(), CliError> {
    if gamma_db.is_empty() || levels.is_empty() {
        return Err(CliError::Usage("sweep grids must be nonempty".into()));
    }
    let prov = Provenance::new(s, m.seed);
    let table = power_sweep(&s.config, gamma_db, levels, &m.methods, &m.settings()?)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                r.gamma_db,
                r.ip_level_db,
                r.method.as_str(),
                r.status,
                r.txp_db.map(|v| v.to_string()).unwrap_or_default()
            )
        })
        .collect();
    write_csv(&m.out.join("sweep.csv"), &prov, "gamma_db,ip_level_db,method,status,txp_db", &rows)?;
    println!("{:>9} {:>9} {:<6} {:<18} {:>9}", "gamma_db", "level_db", "method", "status", "txp_db");
    for r in &table.rows {
        println!(
            "{:>9} {:>9} {:<6} {:<18} {:>9}",
            r.gamma_db,
            r.ip_level_db,
            r.method.to_string(),
            r.status.to_string(),
            fmt_opt(r.txp_db, 3)
        );
    }
    write_summary(m, &prov, s.label(), &table)?;
    Ok(())
}

pub fn cmd_gain(m: &RunManifest, s: &LoadedScenario, solutions: &[PathBuf]) -> Result<(), CliError> {
    let prov = Provenance::new(s, m.seed);
    let grid = default_theta_grid();
    let sols = gather_solutions(m, s, solutions, true)?;
    let mut written = Vec::new();
    for (source, f) in &sols {
        let weights = f.weight_vectors(&s.config, source)?;
        let dir = method_dir(&m.out, f.method);
        for (k, w) in weights.iter().enumerate() {
            let g = array_gain(w, &grid).map_err(|e| CliError::Usage(e.to_string()))?;
            let rows: Vec<String> = grid.iter().zip(&g).map(|(t, v)| format!("{t},{v}")).collect();
            let path = dir.join(format!("gain_su{}.csv", k + 1));
            write_csv(&path, &prov, "theta_deg,gain", &rows)?;
            println!("{}", path.display());
            written.push(path.display().to_string());
        }
    }
    write_summary(m, &prov, s.label(), written)?;
    Ok(())
}

pub fn cmd_selftest(m: &RunManifest) -> Result<(), CliError> {
    let checks = run_selftest(&m.settings()?, m.seed);
    println!("{:<34} {:<6} detail", "check", "result");
    for c in &checks {
        println!("{:<34} {:<6} {}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Solver(format!("{failed} self-test check(s) failed")));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}
