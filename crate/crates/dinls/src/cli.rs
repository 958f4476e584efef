//! Command-line entry point: configuration parsing, experiment orchestration,
//! and CSV/JSON artifact serialization.
//!
//! Configs are TOML (or JSON for machine-written files); command-line flags
//! override file values, and every run summary echoes the full effective
//! configuration so artifacts are self-describing. Identical configs produce
//! bit-identical artifacts.
//!
//! Exit codes: 0 success; 1 error; 2 classify found no matching regime;
//! 3 a simulate run detected blow-up (a successful detection, separated for
//! scripting).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{self, Field, RadialGrid};
use crate::observables::{DiagnosticsSample, NonlinearTerms, DIAGNOSTICS_CSV_HEADER};
use crate::params::{
    classify_blowup, classify_global, default_eta, intercritical_pair, wvz_exponents,
    ProblemParams, Rational, RegimeVerdict,
};
use crate::solver::{self, RunOutcome, RunStatus, SolverConfig};
use crate::verify::{self, TestFunctionFamily};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation error: {0}")]
    Validation(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Params(#[from] crate::params::ParamsError),
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
    #[error(transparent)]
    Solver(#[from] crate::solver::SolverError),
    #[error(transparent)]
    Verify(#[from] crate::verify::VerifyError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    Classify,
    Exponents,
    VerifyInterpolation,
    VerifyKinetic,
    Convergence,
    PicardCheck,
    Sweep,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsSection {
    pub dimension: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    pub p1: Rational,
    pub p2: Rational,
    pub b1: Rational,
    pub b2: Rational,
}

impl ParamsSection {
    pub fn build(&self) -> Result<ProblemParams, CliError> {
        ProblemParams::new(
            self.dimension,
            self.lambda1,
            self.lambda2,
            self.p1.clone(),
            self.p2.clone(),
            self.b1.clone(),
            self.b2.clone(),
        )
        .map_err(CliError::from)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSection {
    pub radius: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            radius: 20.0,
            points: 2048,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialDataKind {
    Gaussian,
    Snapshot,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct InitialDataSection {
    pub kind: InitialDataKind,
    pub amplitude: f64,
    pub width: f64,
    pub chirp: f64,
    /// When set, the amplitude is bisected until the initial energy reaches
    /// this value (used to prepare negative-energy data).
    pub target_energy: Option<f64>,
    /// Binary snapshot path for `kind = "snapshot"`.
    pub path: Option<PathBuf>,
}

impl Default for InitialDataSection {
    fn default() -> Self {
        InitialDataSection {
            kind: InitialDataKind::Gaussian,
            amplitude: 1.0,
            width: 1.0,
            chirp: 0.0,
            target_energy: None,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnapshotFormat {
    Csv,
    Binary,
    Both,
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub snapshot: SnapshotFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: PathBuf::from("out"),
            snapshot: SnapshotFormat::Binary,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
#[derive(Default)]
pub struct ClassifySection {
    pub e0: Option<f64>,
    pub m0: Option<f64>,
    pub y0: Option<f64>,
    pub c_large: Option<f64>,
    pub variance0: Option<f64>,
}


#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
#[derive(Default)]
pub struct ExponentsSection {
    pub p: Option<Rational>,
    pub b: Option<Rational>,
    pub eta: Option<Rational>,
}


#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct InterpolationSection {
    pub eta: f64,
    pub count: usize,
    pub lambda_min: f64,
    pub decades: f64,
    pub mass: f64,
    pub exploratory: bool,
}

impl Default for InterpolationSection {
    fn default() -> Self {
        InterpolationSection {
            eta: 1.0,
            count: 50,
            lambda_min: 0.05,
            decades: 2.5,
            mass: 2.0,
            exploratory: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvergenceSection {
    pub dt_list: Vec<f64>,
    pub linear: bool,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        ConvergenceSection {
            dt_list: vec![4e-3, 2e-3, 1e-3, 2.5e-4],
            linear: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PicardSection {
    pub horizon: f64,
    pub iterations: usize,
    pub quad_nodes: usize,
}

impl Default for PicardSection {
    fn default() -> Self {
        PicardSection {
            horizon: 0.02,
            iterations: 4,
            quad_nodes: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct SweepSection {
    /// Config paths, resolved relative to the sweep file's directory.
    pub configs: Vec<PathBuf>,
    /// Worker threads (0 = rayon default).
    pub jobs: usize,
}

/// The full experiment configuration. Every block is validated by its owning
/// module before a run starts, and the effective values (defaults included)
/// are echoed into the run summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: Option<ParamsSection>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub initial_data: InitialDataSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub classify: ClassifySection,
    #[serde(default)]
    pub exponents: ExponentsSection,
    #[serde(default)]
    pub interpolation: InterpolationSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
    #[serde(default)]
    pub picard: PicardSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        ExperimentConfig {
            mode,
            seed: 0,
            params: None,
            grid: GridSection::default(),
            solver: SolverConfig::default(),
            initial_data: InitialDataSection::default(),
            output: OutputSection::default(),
            classify: ClassifySection::default(),
            exponents: ExponentsSection::default(),
            interpolation: InterpolationSection::default(),
            convergence: ConvergenceSection::default(),
            picard: PicardSection::default(),
            sweep: SweepSection::default(),
        }
    }

    /// Loads a TOML (or JSON, by extension) config file.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let config: ExperimentConfig = if path.extension().and_then(|e| e.to_str()) == Some("json")
        {
            serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?
        };
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.solver.validate()?;
        if let Some(p) = &self.params {
            p.build()?;
        }
        RadialGrid::new(
            self.params.as_ref().map(|p| p.dimension).unwrap_or(3),
            self.grid.radius,
            self.grid.points,
        )?;
        Ok(())
    }

    fn require_params(&self) -> Result<ProblemParams, CliError> {
        self.params
            .as_ref()
            .ok_or_else(|| CliError::Validation("this mode requires a [params] block".into()))?
            .build()
    }

    fn build_grid(&self, dimension: u32) -> Result<Arc<RadialGrid>, CliError> {
        Ok(RadialGrid::new(
            dimension,
            self.grid.radius,
            self.grid.points,
        )?)
    }

    /// Materializes the initial data, returning the field and the effective
    /// amplitude (after any energy-targeting bisection).
    fn build_initial_data(
        &self,
        params: &ProblemParams,
        grid: &Arc<RadialGrid>,
    ) -> Result<(Field, f64), CliError> {
        match self.initial_data.kind {
            InitialDataKind::Snapshot => {
                let path = self.initial_data.path.as_ref().ok_or_else(|| {
                    CliError::Validation("initial_data.path required for snapshot data".into())
                })?;
                let field = grid::read_binary_snapshot_from(path)?;
                let amp = field.max_amplitude();
                Ok((field, amp))
            }
            InitialDataKind::Gaussian => {
                let amplitude = match self.initial_data.target_energy {
                    Some(target) => verify::amplitude_for_energy(
                        params,
                        grid,
                        self.initial_data.width,
                        self.initial_data.chirp,
                        target,
                    ),
                    None => self.initial_data.amplitude,
                };
                let field = Field::chirped_gaussian(
                    grid.clone(),
                    amplitude,
                    self.initial_data.width,
                    self.initial_data.chirp,
                );
                Ok((field, amplitude))
            }
        }
    }
}

/// Writes `content` atomically: to a temp file in the target directory, then
/// renamed over the destination.
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    let tmp = path.with_extension("tmp-write");
    {
        let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(content).map_err(io_err(&tmp))?;
        f.sync_all().map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io_err(path))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Validation(format!("serialization: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn diagnostics_csv(samples: &[DiagnosticsSample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(DIAGNOSTICS_CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
struct InitialStateSummary {
    amplitude: f64,
    mass: f64,
    /// Energy of the discrete model (flattened weights), the conserved one.
    energy: f64,
    /// Exact-weight energy of the data, the one the theorems talk about.
    energy_exact: Option<f64>,
    kinetic: f64,
    variance: f64,
    y: f64,
    blowup_verdict: Option<RegimeVerdict>,
}

#[derive(Debug, Serialize)]
struct RunSummary<'a> {
    status: RunStatus,
    final_time: f64,
    t_detect: Option<f64>,
    t_bound_predicted: Option<f64>,
    blowup_trigger: Option<solver::BlowupTrigger>,
    max_kinetic: Option<f64>,
    mass_drift: f64,
    energy_drift: f64,
    tail_warning: bool,
    steps_taken: usize,
    samples: usize,
    initial: InitialStateSummary,
    config: &'a ExperimentConfig,
}

fn write_run_artifacts(
    config: &ExperimentConfig,
    out_dir: &Path,
    amplitude: f64,
    energy_exact: Option<f64>,
    outcome: &RunOutcome,
) -> Result<(), CliError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    write_atomic(
        &out_dir.join("diagnostics.csv"),
        diagnostics_csv(&outcome.diagnostics).as_bytes(),
    )?;

    let first = &outcome.diagnostics[0];
    let report = outcome.blowup_report.as_ref();
    let summary = RunSummary {
        status: outcome.status,
        final_time: outcome.final_time,
        t_detect: report.map(|r| r.t_detect),
        t_bound_predicted: report.and_then(|r| r.t_bound_predicted),
        blowup_trigger: report.map(|r| r.trigger),
        max_kinetic: report.map(|r| r.max_kinetic),
        mass_drift: outcome.mass_drift(),
        energy_drift: outcome.energy_drift(),
        tail_warning: outcome.tail_warning,
        steps_taken: outcome.steps_taken,
        samples: outcome.diagnostics.len(),
        initial: InitialStateSummary {
            amplitude,
            mass: first.mass,
            energy: first.energy,
            energy_exact,
            kinetic: first.kinetic,
            variance: first.variance,
            y: first.y,
            blowup_verdict: outcome.initial_blowup_verdict.clone(),
        },
        config,
    };
    write_json(&out_dir.join("summary.json"), &summary)?;

    if matches!(
        config.output.snapshot,
        SnapshotFormat::Csv | SnapshotFormat::Both
    ) {
        let mut buf = Vec::new();
        grid::write_csv_snapshot(&outcome.final_field, &mut buf)?;
        write_atomic(&out_dir.join("final_state.csv"), &buf)?;
    }
    if matches!(
        config.output.snapshot,
        SnapshotFormat::Binary | SnapshotFormat::Both
    ) {
        let mut buf = Vec::new();
        grid::write_binary_snapshot(&outcome.final_field, &mut buf)?;
        write_atomic(&out_dir.join("final_state.bin"), &buf)?;
    }
    Ok(())
}

fn run_simulate(config: &ExperimentConfig) -> Result<i32, CliError> {
    let params = config.require_params()?;
    let grid = config.build_grid(params.dimension)?;
    let (u0, amplitude) = config.build_initial_data(&params, &grid)?;
    let energy_exact = crate::observables::energy(&u0, &params);
    let outcome = solver::run_simulation(&u0, &params, &config.solver)?;
    write_run_artifacts(
        config,
        &config.output.directory,
        amplitude,
        Some(energy_exact),
        &outcome,
    )?;
    Ok(match outcome.status {
        RunStatus::BlowupDetected => 3,
        _ => 0,
    })
}

#[derive(Debug, Serialize)]
struct ClassifyOutput<'a> {
    global: RegimeVerdict,
    blowup: Option<RegimeVerdict>,
    blowup_coefficient: Option<f64>,
    t_bound_predicted: Option<f64>,
    config: &'a ExperimentConfig,
}

fn run_classify(config: &ExperimentConfig) -> Result<i32, CliError> {
    let params = config.require_params()?;
    let global = classify_global(&params);
    let c = &config.classify;
    let blowup = match (c.e0, c.m0, c.y0) {
        (Some(e0), Some(m0), Some(y0)) => Some(classify_blowup(
            &params,
            e0,
            m0,
            y0,
            c.c_large.unwrap_or(f64::NAN),
        )?),
        _ => None,
    };
    let coefficient = blowup.as_ref().and_then(|v| {
        crate::observables::blowup_coefficient_with_epsilon(
            &params,
            v,
            config.solver.case_v_epsilon,
        )
        .ok()
    });
    let t_bound = match (coefficient, c.y0, c.variance0) {
        (Some(coef), Some(y0), Some(v0)) => {
            Some(crate::observables::blowup_time_bound(coef, y0, v0))
        }
        _ => None,
    };

    let any_match = global.kind.is_global() || blowup.as_ref().is_some_and(|v| v.kind.is_blowup());
    let output = ClassifyOutput {
        global,
        blowup,
        blowup_coefficient: coefficient,
        t_bound_predicted: t_bound,
        config,
    };
    fs::create_dir_all(&config.output.directory).map_err(io_err(&config.output.directory))?;
    write_json(&config.output.directory.join("verdict.json"), &output)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("verdict serializes")
    );
    Ok(if any_match { 0 } else { 2 })
}

#[derive(Debug, Serialize)]
struct ExponentsOutput<'a> {
    dimension: u32,
    p: Option<Rational>,
    b: Rational,
    eta: Rational,
    intercritical: Option<crate::params::AdmissiblePair>,
    intercritical_identity_defect: Option<Rational>,
    wvz: Option<crate::params::WvzExponents>,
    config: &'a ExperimentConfig,
}

fn run_exponents(config: &ExperimentConfig) -> Result<i32, CliError> {
    let dimension = config.params.as_ref().map(|p| p.dimension).unwrap_or(3);
    let b = config
        .exponents
        .b
        .clone()
        .ok_or_else(|| CliError::Validation("exponents mode requires [exponents].b".into()))?;
    let eta = config.exponents.eta.clone().unwrap_or_else(default_eta);

    let intercritical = match &config.exponents.p {
        Some(p) => Some(intercritical_pair(p, &b, dimension)?),
        None => None,
    };
    let defect = intercritical
        .as_ref()
        .map(|pair| pair.as_pair().admissibility_defect(dimension));
    let wvz = wvz_exponents(dimension, &b, &eta).ok();

    if let Some(pair) = &intercritical {
        println!(
            "(gamma_b, rho_b) = {pair}   2/gamma + N/rho - N/2 = {}",
            defect.as_ref().expect("defect computed with pair")
        );
    }
    if let Some(w) = &wvz {
        println!("W0 = {}  V0 = {}  Z = {}", w.w0, w.v0, w.z);
    }
    let output = ExponentsOutput {
        dimension,
        p: config.exponents.p.clone(),
        b,
        eta,
        intercritical,
        intercritical_identity_defect: defect,
        wvz,
        config,
    };
    fs::create_dir_all(&config.output.directory).map_err(io_err(&config.output.directory))?;
    write_json(&config.output.directory.join("exponents.json"), &output)?;
    Ok(0)
}

fn run_verify_interpolation(config: &ExperimentConfig) -> Result<i32, CliError> {
    let params = config.require_params()?;
    let grid = config.build_grid(params.dimension)?;
    let s = &config.interpolation;
    let family =
        TestFunctionFamily::concentration_sweep(s.count, s.lambda_min, s.decades, s.mass);
    let report = verify::check_interpolation(&params, s.eta, &family, &grid, s.exploratory)?;

    fs::create_dir_all(&config.output.directory).map_err(io_err(&config.output.directory))?;
    let mut csv = String::from("parameter,residual,running_sup\n");
    for p in &report.points {
        csv.push_str(&format!(
            "{},{},{}\n",
            p.parameter, p.residual, p.running_sup
        ));
    }
    write_atomic(
        &config.output.directory.join("interpolation.csv"),
        csv.as_bytes(),
    )?;
    #[derive(Serialize)]
    struct Out<'a> {
        report: &'a verify::InterpolationReport,
        config: &'a ExperimentConfig,
    }
    write_json(
        &config.output.directory.join("interpolation.json"),
        &Out {
            report: &report,
            config,
        },
    )?;
    println!(
        "interpolation: sup D = {:.6e}, final-decade increase = {:.3e}, passed = {}",
        report.sup_residual, report.final_decade_increase, report.passed
    );
    Ok(0)
}

fn run_verify_kinetic(config: &ExperimentConfig) -> Result<i32, CliError> {
    let params = config.require_params()?;
    let grid = config.build_grid(params.dimension)?;
    let (u0, amplitude) = config.build_initial_data(&params, &grid)?;
    let energy_exact = crate::observables::energy(&u0, &params);
    let (report, outcome) =
        verify::check_kinetic_bound(&params, &u0, config.solver.t_end, &config.solver)?;
    write_run_artifacts(
        config,
        &config.output.directory,
        amplitude,
        Some(energy_exact),
        &outcome,
    )?;
    #[derive(Serialize)]
    struct Out<'a> {
        report: &'a verify::KineticBoundReport,
        config: &'a ExperimentConfig,
    }
    write_json(
        &config.output.directory.join("kinetic.json"),
        &Out {
            report: &report,
            config,
        },
    )?;
    println!(
        "kinetic bound: regime {:?}, sup/initial = {:.3}, identity within drift = {}",
        report.regime, report.sup_over_initial, report.identity_within_drift
    );
    Ok(0)
}

fn run_convergence(config: &ExperimentConfig) -> Result<i32, CliError> {
    let (terms, params) = if config.convergence.linear {
        (NonlinearTerms::linear(), None)
    } else {
        let p = config.require_params()?;
        (NonlinearTerms::from_params(&p), Some(p))
    };
    let dimension = params.as_ref().map(|p| p.dimension).unwrap_or(3);
    let grid = config.build_grid(dimension)?;
    let u0 = Field::chirped_gaussian(
        grid,
        config.initial_data.amplitude,
        config.initial_data.width,
        config.initial_data.chirp,
    );
    let report = verify::convergence_study(
        &u0,
        terms,
        params.as_ref(),
        config.solver.t_end,
        &config.convergence.dt_list,
    )?;
    fs::create_dir_all(&config.output.directory).map_err(io_err(&config.output.directory))?;
    #[derive(Serialize)]
    struct Out<'a> {
        report: &'a verify::ConvergenceReport,
        config: &'a ExperimentConfig,
    }
    write_json(
        &config.output.directory.join("convergence.json"),
        &Out {
            report: &report,
            config,
        },
    )?;
    println!("fitted order: {:.3}", report.fitted_order);
    Ok(0)
}

fn run_picard_check(config: &ExperimentConfig) -> Result<i32, CliError> {
    let params = config.require_params()?;
    let grid = config.build_grid(params.dimension)?;
    let (u0, _) = config.build_initial_data(&params, &grid)?;
    let s = &config.picard;
    let picard = solver::picard_solve(&u0, &params, s.horizon, s.iterations, s.quad_nodes)?;
    let run_config = SolverConfig {
        t_end: u0.time + s.horizon,
        ..config.solver.clone()
    };
    let run = solver::run_simulation(&u0, &params, &run_config)?;
    let rel = picard.field.l2_distance(&run.final_field) / run.final_field.l2_norm();

    #[derive(Serialize)]
    struct Out<'a> {
        relative_l2_disagreement: f64,
        iterate_distances: &'a [f64],
        config: &'a ExperimentConfig,
    }
    fs::create_dir_all(&config.output.directory).map_err(io_err(&config.output.directory))?;
    write_json(
        &config.output.directory.join("picard.json"),
        &Out {
            relative_l2_disagreement: rel,
            iterate_distances: &picard.iterate_distances,
            config,
        },
    )?;
    println!(
        "picard vs split-step: rel L2 = {rel:.3e}, iterate distances {:?}",
        picard.iterate_distances
    );
    Ok(0)
}

fn run_sweep(config: &ExperimentConfig, base_dir: &Path) -> Result<i32, CliError> {
    use rayon::prelude::*;
    if config.sweep.configs.is_empty() {
        return Err(CliError::Validation(
            "sweep mode requires [sweep].configs".into(),
        ));
    }
    let runs: Vec<(PathBuf, ExperimentConfig)> = config
        .sweep
        .configs
        .iter()
        .map(|rel| {
            let path = if rel.is_absolute() {
                rel.clone()
            } else {
                base_dir.join(rel)
            };
            let mut sub = ExperimentConfig::from_file(&path)?;
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("run")
                .to_string();
            sub.output.directory = config.output.directory.join(stem);
            Ok((path, sub))
        })
        .collect::<Result<_, CliError>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.sweep.jobs)
        .build()
        .map_err(|e| CliError::Validation(format!("worker pool: {e}")))?;
    let results: Vec<(PathBuf, Result<i32, CliError>)> = pool.install(|| {
        runs.into_par_iter()
            .map(|(path, sub)| {
                let code = run(&sub, path.parent().unwrap_or(Path::new(".")));
                (path, code)
            })
            .collect()
    });

    let mut worst = 0;
    for (path, result) in results {
        match result {
            Ok(code) => {
                println!("{}: exit {code}", path.display());
                if code == 1 {
                    worst = 1;
                }
            }
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                worst = 1;
            }
        }
    }
    Ok(worst)
}

/// Dispatches a validated config. `base_dir` anchors relative paths inside
/// sweep configs.
pub fn run(config: &ExperimentConfig, base_dir: &Path) -> Result<i32, CliError> {
    config.validate()?;
    match config.mode {
        Mode::Simulate => run_simulate(config),
        Mode::Classify => run_classify(config),
        Mode::Exponents => run_exponents(config),
        Mode::VerifyInterpolation => run_verify_interpolation(config),
        Mode::VerifyKinetic => run_verify_kinetic(config),
        Mode::Convergence => run_convergence(config),
        Mode::PicardCheck => run_picard_check(config),
        Mode::Sweep => run_sweep(config, base_dir),
    }
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonFlags {
    /// Experiment config file (TOML, or JSON by extension).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// RNG seed for randomized families.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Initial time step dt0.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Grid point count (power of two).
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Domain truncation radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Integration horizon.
    #[arg(long)]
    pub t_end: Option<f64>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ParamsFlags {
    #[arg(long)]
    pub dimension: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda2: Option<f64>,
    #[arg(long)]
    pub p1: Option<String>,
    #[arg(long)]
    pub p2: Option<String>,
    #[arg(long)]
    pub b1: Option<String>,
    #[arg(long)]
    pub b2: Option<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "dinls",
    about = "Numerical laboratory for the inhomogeneous NLS equation with two power-type nonlinearities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the flow and stream diagnostics.
    Simulate {
        #[command(flatten)]
        common: CommonFlags,
        #[command(flatten)]
        params: ParamsFlags,
        /// Gaussian amplitude A.
        #[arg(long)]
        amplitude: Option<f64>,
        /// Gaussian width w.
        #[arg(long)]
        width: Option<f64>,
        /// Quadratic chirp c (c > 0 gives y(0) > 0).
        #[arg(long, allow_negative_numbers = true)]
        chirp: Option<f64>,
        /// Bisect the amplitude until E(u0) hits this value.
        #[arg(long, allow_negative_numbers = true)]
        target_energy: Option<f64>,
        /// Start from a binary snapshot instead of a Gaussian.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Evaluate the global-existence and blow-up case predicates.
    Classify {
        #[command(flatten)]
        common: CommonFlags,
        #[command(flatten)]
        params: ParamsFlags,
        #[arg(long, allow_negative_numbers = true)]
        e0: Option<f64>,
        #[arg(long)]
        m0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y0: Option<f64>,
        #[arg(long)]
        c_large: Option<f64>,
        #[arg(long)]
        variance0: Option<f64>,
    },
    /// Compute the admissible-pair exponent calculus.
    Exponents {
        #[command(flatten)]
        common: CommonFlags,
        #[arg(long)]
        dimension: Option<u32>,
        /// Nonlinearity power p (rational, e.g. "2" or "1/2").
        #[arg(long)]
        p: Option<String>,
        /// Inhomogeneity exponent b.
        #[arg(long)]
        b: Option<String>,
        /// Perturbation offset for the +/- pairs.
        #[arg(long)]
        eta: Option<String>,
    },
    /// Probe the two-norm interpolation inequality over a test family.
    VerifyInterpolation {
        #[command(flatten)]
        common: CommonFlags,
        #[command(flatten)]
        params: ParamsFlags,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        exploratory: bool,
    },
    /// Run the flow and check kinetic-energy boundedness.
    VerifyKinetic {
        #[command(flatten)]
        common: CommonFlags,
        #[command(flatten)]
        params: ParamsFlags,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        width: Option<f64>,
        #[arg(long)]
        chirp: Option<f64>,
    },
    /// Measure the splitting convergence order in dt.
    Convergence {
        #[command(flatten)]
        common: CommonFlags,
        #[command(flatten)]
        params: ParamsFlags,
        /// Comma-separated decreasing dt list.
        #[arg(long)]
        dt_list: Option<String>,
        /// Coupling-free study against the analytic Gaussian.
        #[arg(long)]
        linear: bool,
    },
    /// Cross-check the split-step integrator against the Picard iteration.
    PicardCheck {
        #[command(flatten)]
        common: CommonFlags,
        #[command(flatten)]
        params: ParamsFlags,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        quad_nodes: Option<usize>,
    },
    /// Run several configs on a worker pool, one artifact directory each.
    Sweep {
        #[command(flatten)]
        common: CommonFlags,
        /// Worker threads (0 = default).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

fn parse_rational(name: &str, s: &Option<String>) -> Result<Option<Rational>, CliError> {
    s.as_deref()
        .map(|s| {
            Rational::from_str(s)
                .map_err(|e| CliError::Parse(format!("flag --{name}: {e}")))
        })
        .transpose()
}

fn apply_common(config: &mut ExperimentConfig, common: &CommonFlags) {
    if let Some(out) = &common.out {
        config.output.directory = out.clone();
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(dt) = common.dt {
        config.solver.dt0 = dt;
    }
    if let Some(points) = common.grid_points {
        config.grid.points = points;
    }
    if let Some(radius) = common.radius {
        config.grid.radius = radius;
    }
    if let Some(t_end) = common.t_end {
        config.solver.t_end = t_end;
    }
}

fn apply_params(config: &mut ExperimentConfig, flags: &ParamsFlags) -> Result<(), CliError> {
    let any = flags.dimension.is_some()
        || flags.lambda1.is_some()
        || flags.lambda2.is_some()
        || flags.p1.is_some()
        || flags.p2.is_some()
        || flags.b1.is_some()
        || flags.b2.is_some();
    if !any {
        return Ok(());
    }
    let mut section = config.params.clone().unwrap_or(ParamsSection {
        dimension: 3,
        lambda1: 1.0,
        lambda2: 1.0,
        p1: Rational::from(1),
        p2: Rational::from(3),
        b1: Rational::new(1, 2),
        b2: Rational::new(1, 2),
    });
    if let Some(d) = flags.dimension {
        section.dimension = d;
    }
    if let Some(l) = flags.lambda1 {
        section.lambda1 = l;
    }
    if let Some(l) = flags.lambda2 {
        section.lambda2 = l;
    }
    if let Some(p) = parse_rational("p1", &flags.p1)? {
        section.p1 = p;
    }
    if let Some(p) = parse_rational("p2", &flags.p2)? {
        section.p2 = p;
    }
    if let Some(b) = parse_rational("b1", &flags.b1)? {
        section.b1 = b;
    }
    if let Some(b) = parse_rational("b2", &flags.b2)? {
        section.b2 = b;
    }
    config.params = Some(section);
    Ok(())
}

/// Builds the effective config for a parsed command line: config file first,
/// then flag overrides. Returns the config and the directory against which
/// relative sweep paths resolve.
pub fn effective_config(cli: &Cli) -> Result<(ExperimentConfig, PathBuf), CliError> {
    let (mode, common) = match &cli.command {
        Command::Simulate { common, .. } => (Mode::Simulate, common),
        Command::Classify { common, .. } => (Mode::Classify, common),
        Command::Exponents { common, .. } => (Mode::Exponents, common),
        Command::VerifyInterpolation { common, .. } => (Mode::VerifyInterpolation, common),
        Command::VerifyKinetic { common, .. } => (Mode::VerifyKinetic, common),
        Command::Convergence { common, .. } => (Mode::Convergence, common),
        Command::PicardCheck { common, .. } => (Mode::PicardCheck, common),
        Command::Sweep { common, .. } => (Mode::Sweep, common),
    };
    let (mut config, base_dir) = match &common.config {
        Some(path) => {
            let c = ExperimentConfig::from_file(path)?;
            let base = path
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from("."));
            (c, base)
        }
        None => (ExperimentConfig::new(mode), PathBuf::from(".")),
    };
    config.mode = mode;
    apply_common(&mut config, common);

    match &cli.command {
        Command::Simulate {
            params,
            amplitude,
            width,
            chirp,
            target_energy,
            snapshot,
            ..
        } => {
            apply_params(&mut config, params)?;
            if let Some(a) = amplitude {
                config.initial_data.amplitude = *a;
            }
            if let Some(w) = width {
                config.initial_data.width = *w;
            }
            if let Some(c) = chirp {
                config.initial_data.chirp = *c;
            }
            if target_energy.is_some() {
                config.initial_data.target_energy = *target_energy;
            }
            if let Some(path) = snapshot {
                config.initial_data.kind = InitialDataKind::Snapshot;
                config.initial_data.path = Some(path.clone());
            }
        }
        Command::Classify {
            params,
            e0,
            m0,
            y0,
            c_large,
            variance0,
            ..
        } => {
            apply_params(&mut config, params)?;
            if e0.is_some() {
                config.classify.e0 = *e0;
            }
            if m0.is_some() {
                config.classify.m0 = *m0;
            }
            if y0.is_some() {
                config.classify.y0 = *y0;
            }
            if c_large.is_some() {
                config.classify.c_large = *c_large;
            }
            if variance0.is_some() {
                config.classify.variance0 = *variance0;
            }
        }
        Command::Exponents {
            dimension, p, b, eta, ..
        } => {
            if let Some(d) = dimension {
                let mut section = config.params.clone().unwrap_or(ParamsSection {
                    dimension: *d,
                    lambda1: 1.0,
                    lambda2: 1.0,
                    p1: Rational::from(1),
                    p2: Rational::from(3),
                    b1: Rational::new(1, 2),
                    b2: Rational::new(1, 2),
                });
                section.dimension = *d;
                config.params = Some(section);
            }
            if let Some(p) = parse_rational("p", p)? {
                config.exponents.p = Some(p);
            }
            if let Some(b) = parse_rational("b", b)? {
                config.exponents.b = Some(b);
            }
            if let Some(eta) = parse_rational("eta", eta)? {
                config.exponents.eta = Some(eta);
            }
        }
        Command::VerifyInterpolation {
            params,
            eta,
            count,
            exploratory,
            ..
        } => {
            apply_params(&mut config, params)?;
            if let Some(eta) = eta {
                config.interpolation.eta = *eta;
            }
            if let Some(count) = count {
                config.interpolation.count = *count;
            }
            if *exploratory {
                config.interpolation.exploratory = true;
            }
        }
        Command::VerifyKinetic {
            params,
            amplitude,
            width,
            chirp,
            ..
        } => {
            apply_params(&mut config, params)?;
            if let Some(a) = amplitude {
                config.initial_data.amplitude = *a;
            }
            if let Some(w) = width {
                config.initial_data.width = *w;
            }
            if let Some(c) = chirp {
                config.initial_data.chirp = *c;
            }
        }
        Command::Convergence {
            params,
            dt_list,
            linear,
            ..
        } => {
            apply_params(&mut config, params)?;
            if let Some(list) = dt_list {
                config.convergence.dt_list = list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|e| CliError::Parse(format!("--dt-list: {e}")))
                    })
                    .collect::<Result<_, _>>()?;
            }
            if *linear {
                config.convergence.linear = true;
            }
        }
        Command::PicardCheck {
            params,
            amplitude,
            horizon,
            iterations,
            quad_nodes,
            ..
        } => {
            apply_params(&mut config, params)?;
            if let Some(a) = amplitude {
                config.initial_data.amplitude = *a;
            }
            if let Some(h) = horizon {
                config.picard.horizon = *h;
            }
            if let Some(i) = iterations {
                config.picard.iterations = *i;
            }
            if let Some(q) = quad_nodes {
                config.picard.quad_nodes = *q;
            }
        }
        Command::Sweep { jobs, .. } => {
            if *jobs > 0 {
                config.sweep.jobs = *jobs;
            }
        }
    }
    Ok((config, base_dir))
}

/// Entry point for the `dinls` binary: parse, dispatch, exit.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match effective_config(&cli).and_then(|(config, base)| run(&config, &base)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_simulate_config_gets_defaults() {
        let text = r#"
mode = "simulate"

[params]
dimension = 3
lambda1 = 1.0
lambda2 = 1.0
p1 = "1"
p2 = "3"
b1 = "1/2"
b2 = "1/2"
"#;
        let config: ExperimentConfig = toml::from_str(text).unwrap();
        assert_eq!(config.solver.dt0, 1e-3);
        assert_eq!(config.grid.points, 2048);
        assert_eq!(config.initial_data.amplitude, 1.0);
        config.validate().unwrap();
    }

    #[test]
    fn criticality_violation_is_named() {
        let text = r#"
mode = "simulate"

[params]
dimension = 3
lambda1 = 1.0
lambda2 = 1.0
p1 = "1"
p2 = "2.9"
b1 = "1/2"
b2 = "1/2"
"#;
        let config: ExperimentConfig = toml::from_str(text).unwrap();
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("p2"), "got: {err}");
    }

    #[test]
    fn rationals_accept_numbers_and_strings() {
        let text = r#"
mode = "classify"

[params]
dimension = 3
lambda1 = 1.0
lambda2 = -1.0
p1 = 1
p2 = 3.0
b1 = 0.4
b2 = "1/2"
"#;
        let config: ExperimentConfig = toml::from_str(text).unwrap();
        let params = config.params.as_ref().unwrap().build().unwrap();
        assert_eq!(params.b1, Rational::new(2, 5));
        assert_eq!(params.p2, Rational::from(3));
    }

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.toml");
        std::fs::write(
            &path,
            r#"
mode = "simulate"

[params]
dimension = 3
lambda1 = 1.0
lambda2 = 1.0
p1 = "1"
p2 = "3"
b1 = "1/2"
b2 = "1/2"

[solver]
dt0 = 5e-3
"#,
        )
        .unwrap();
        let cli = Cli::parse_from([
            "dinls",
            "simulate",
            "--config",
            path.to_str().unwrap(),
            "--dt",
            "1e-4",
        ]);
        let (config, _) = effective_config(&cli).unwrap();
        assert_eq!(config.solver.dt0, 1e-4);
    }

    #[test]
    fn json_configs_parse_too() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(
            &path,
            r#"{"mode": "exponents", "exponents": {"p": "2", "b": "1/2"}}"#,
        )
        .unwrap();
        let config = ExperimentConfig::from_file(&path).unwrap();
        assert_eq!(config.mode, Mode::Exponents);
        assert_eq!(config.exponents.p, Some(Rational::from(2)));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("artifact.json");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        assert!(!path.with_extension("tmp-write").exists());
    }
}
