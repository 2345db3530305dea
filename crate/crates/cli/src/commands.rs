//! Subcommand execution and error classification.

use std::fmt;
use std::path::{Path, PathBuf};

use msf_core::design::SolverOptions;
use msf_core::{
    angle_map, bandwidth, find_peak, frequency_sweep, match_impedance, reconfiguration_map,
    reflection_coefficient, solve_chemical_potential, tmm_reflection, DesignError, FreeParameter,
    IncidentWave, LayerStack, MatchOptions, ModelError, ParameterKind, Polarization, SpectrumError,
    SweepOptions, WaveTemplate,
};
use serde_json::{json, Value};

use crate::config::{ConfigError, OutputFormat, RunConfig, SolverKind};
use crate::output::{self, write_atomic};

pub const VALIDATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Spectrum,
    Angles,
    Reconfig,
    Solve,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Config,
    Model,
    Io,
    Validation,
    Convergence,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Config => "config",
            ErrorKind::Model => "model",
            ErrorKind::Io => "io",
            ErrorKind::Validation => "validation",
            ErrorKind::Convergence => "convergence",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Model | ErrorKind::Io => 1,
            ErrorKind::Usage | ErrorKind::Config => 2,
            ErrorKind::Validation | ErrorKind::Convergence => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    pub details: Value,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            details: Value::Null,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    /// Single-line JSON document written to standard error.
    pub fn to_json(&self) -> String {
        let mut error = json!({
            "kind": self.kind.name(),
            "exit_code": self.kind.exit_code(),
            "message": self.message,
        });
        if !self.details.is_null() {
            error["details"] = self.details.clone();
        }
        json!({ "error": error }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind.name(), self.message)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        let message = e.to_string();
        CliError::new(ErrorKind::Config, message)
            .with_details(json!({ "line": e.line, "key": e.key }))
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::new(ErrorKind::Model, e.to_string())
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        CliError::new(ErrorKind::Model, e.to_string())
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::BracketFailure {
                target,
                lower_bound,
                upper_bound,
                lower_peak,
                upper_peak,
            } => CliError::new(ErrorKind::Convergence, e.to_string()).with_details(json!({
                "reason": "unbracketed",
                "target_frequency_hz": target,
                "mu_c_min_ev": lower_bound,
                "mu_c_max_ev": upper_bound,
                "peak_at_min_hz": lower_peak,
                "peak_at_max_hz": upper_peak,
            })),
            DesignError::InvalidRequest(message) => CliError::new(ErrorKind::Config, message),
            DesignError::Model(m) => m.into(),
            DesignError::Spectrum(s) => s.into(),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::new(ErrorKind::Io, format!("{}: {e}", path.display()))
        .with_details(json!({ "path": path.display().to_string() }))
}

/// Where and how results are written.
#[derive(Debug, Clone, PartialEq)]
pub struct Destination {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Destination {
    /// Command-line flags take precedence over the config file.
    pub fn resolve(config: &RunConfig, out: Option<PathBuf>, format: Option<OutputFormat>) -> Self {
        Self {
            path: out.or_else(|| config.output.as_ref().map(PathBuf::from)),
            format: format.unwrap_or(config.format),
        }
    }
}

/// Text produced by a subcommand: the primary artifact plus optional
/// companion files, each either written to disk or concatenated on stdout.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub primary: String,
    pub companions: Vec<(String, String)>,
}

impl Artifacts {
    fn single(text: String) -> Self {
        Self {
            primary: text,
            companions: Vec::new(),
        }
    }

    /// Writes files, or returns the text destined for stdout.
    pub fn emit(&self, path: Option<&Path>) -> Result<String, CliError> {
        match path {
            Some(path) => {
                write_atomic(path, &self.primary).map_err(|e| io_error(path, e))?;
                for (suffix, text) in &self.companions {
                    let p = output::sibling_path(path, suffix);
                    write_atomic(&p, text).map_err(|e| io_error(&p, e))?;
                }
                Ok(String::new())
            }
            None => {
                let mut text = self.primary.clone();
                for (_, companion) in &self.companions {
                    text.push('\n');
                    text.push_str(companion);
                }
                Ok(text)
            }
        }
    }
}

/// Outcome of a subcommand: artifacts to emit, non-fatal warnings and an
/// optional failure reported after the artifacts are written.
#[derive(Debug, Default)]
pub struct Run {
    pub artifacts: Artifacts,
    pub warnings: Vec<Value>,
    pub failure: Option<CliError>,
}

pub fn execute(
    command: Subcommand,
    config: &RunConfig,
    format: OutputFormat,
    sweep: SweepOptions,
) -> Result<Run, CliError> {
    match command {
        Subcommand::Spectrum => spectrum(config, format, sweep),
        Subcommand::Angles => angles(config, format, sweep),
        Subcommand::Reconfig => reconfig(config, format, sweep),
        Subcommand::Solve => solve(config, sweep),
        Subcommand::Validate => validate(config),
    }
}

fn spectrum(
    config: &RunConfig,
    format: OutputFormat,
    sweep: SweepOptions,
) -> Result<Run, CliError> {
    let stackup = config.stackup()?;
    let wave = WaveTemplate::new(config.angle.to_radians(), config.polarization);
    let spectrum = frequency_sweep(&stackup, &wave, &config.grid(), sweep)?;
    let text = match format {
        OutputFormat::Csv => output::spectrum_csv(&spectrum),
        OutputFormat::Json => {
            let peak = find_peak(&spectrum).ok();
            let band = bandwidth(&spectrum, config.bandwidth_threshold).ok();
            output::to_json(&output::SpectrumDoc {
                kind: "spectrum",
                angle_deg: config.angle,
                polarization: config.polarization.name(),
                stackup: (&stackup).into(),
                points: spectrum.points().iter().map(Into::into).collect(),
                peak: peak.as_ref().map(Into::into),
                bandwidth: band
                    .as_ref()
                    .map(|b| output::BandwidthDto::new(config.bandwidth_threshold, b)),
            })
        }
    };
    Ok(Run {
        artifacts: Artifacts::single(text),
        ..Run::default()
    })
}

fn angles(config: &RunConfig, format: OutputFormat, sweep: SweepOptions) -> Result<Run, CliError> {
    let stackup = config.stackup()?;
    let grid = config.grid();
    let radians: Vec<f64> = config.angles.iter().map(|a| a.to_radians()).collect();
    let mut maps = Vec::with_capacity(2 * radians.len());
    for pol in [Polarization::Te, Polarization::Tm] {
        let spectra = angle_map(&stackup, &grid, &radians, pol, sweep)?;
        maps.extend(config.angles.iter().copied().zip(spectra));
    }
    let artifacts = match format {
        OutputFormat::Csv => Artifacts {
            primary: output::angles_csv(&maps),
            companions: vec![("_peaks".to_string(), output::angle_peaks_csv(&maps))],
        },
        OutputFormat::Json => Artifacts::single(output::to_json(&output::AnglesDoc {
            kind: "angles",
            stackup: (&stackup).into(),
            spectra: maps.iter().map(Into::into).collect(),
        })),
    };
    Ok(Run {
        artifacts,
        ..Run::default()
    })
}

fn reconfig(
    config: &RunConfig,
    format: OutputFormat,
    sweep: SweepOptions,
) -> Result<Run, CliError> {
    let map = reconfiguration_map(
        &config.stackup()?,
        &config.grid(),
        &config.mu_c_values,
        sweep,
    )?;
    let text = match format {
        OutputFormat::Csv => output::reconfig_csv(&map),
        OutputFormat::Json => output::to_json(&output::ReconfigDoc::from(&map)),
    };
    let warnings = map
        .anomalies
        .iter()
        .map(|&i| {
            json!({ "warning": {
                "kind": "non_monotone_peak",
                "message": format!(
                    "peak frequency does not increase from {} eV to {} eV",
                    map.entries[i - 1].chemical_potential_ev,
                    map.entries[i].chemical_potential_ev
                ),
                "index": i,
            }})
        })
        .collect();
    Ok(Run {
        artifacts: Artifacts::single(text),
        warnings,
        failure: None,
    })
}

fn solve(config: &RunConfig, sweep: SweepOptions) -> Result<Run, CliError> {
    let stackup = config.stackup()?;
    let grid = config.grid();
    let solution = match config.solver {
        SolverKind::ChemicalPotential => {
            let options = SolverOptions {
                grid,
                sweep,
                frequency_tolerance: config.frequency_tolerance,
                max_iterations: config.max_iterations,
            };
            solve_chemical_potential(
                &stackup,
                config.target_frequency,
                (config.mu_c_min, config.mu_c_max),
                &options,
            )?
        }
        SolverKind::Match => {
            let free: Vec<FreeParameter> = config
                .free_parameters
                .iter()
                .map(|&kind| match kind {
                    ParameterKind::ChemicalPotential => {
                        FreeParameter::new(kind, config.mu_c_min, config.mu_c_max)
                    }
                    _ => FreeParameter::with_default_bounds(kind, &stackup),
                })
                .collect();
            let options = MatchOptions {
                tolerance: config.match_tolerance,
                max_iterations: config.max_iterations,
                grid,
                sweep,
                ..MatchOptions::default()
            };
            match_impedance(&stackup, config.target_frequency, &free, &options)?
        }
    };
    let failure = (!solution.converged).then(|| {
        CliError::new(ErrorKind::Convergence, "solver did not converge").with_details(json!({
            "reason": "not_converged",
            "solver": config.solver.name(),
            "iterations": solution.iterations,
            "target_frequency_hz": solution.target_frequency,
            "achieved_peak_frequency_hz": solution.achieved_peak_frequency,
            "residual_s11": solution.residual,
        }))
    });
    Ok(Run {
        artifacts: Artifacts::single(output::to_json(&output::SolutionDoc::new(
            config.solver.name(),
            &solution,
        ))),
        warnings: Vec::new(),
        failure,
    })
}

fn validate(config: &RunConfig) -> Result<Run, CliError> {
    let stackup = config.stackup()?;
    let grid = config.grid();
    let mut max_deviation = 0.0f64;
    let mut worst = None;
    let mut evaluations = 0;
    for &angle in &config.angles {
        for pol in [Polarization::Te, Polarization::Tm] {
            for f in grid.frequencies() {
                let wave = IncidentWave::new(f, angle.to_radians(), pol)?;
                let circuit = reflection_coefficient(&stackup, &wave)?;
                let oracle = tmm_reflection(&LayerStack::from_stackup(&stackup, f)?, &wave)?;
                let deviation = (circuit - oracle).norm();
                evaluations += 1;
                if !(deviation <= max_deviation) {
                    max_deviation = deviation;
                    worst = Some(output::WorstCaseDto {
                        frequency_hz: f,
                        angle_deg: angle,
                        polarization: pol.name(),
                    });
                }
            }
        }
    }
    let pass = max_deviation < VALIDATION_TOLERANCE;
    let failure = (!pass).then(|| {
        CliError::new(
            ErrorKind::Validation,
            format!("circuit and transfer-matrix results differ by {max_deviation:e} (limit {VALIDATION_TOLERANCE:e})"),
        )
        .with_details(json!({ "max_deviation": max_deviation, "tolerance": VALIDATION_TOLERANCE }))
    });
    let doc = output::ValidationDoc {
        kind: "validation",
        max_deviation,
        tolerance: VALIDATION_TOLERANCE,
        pass,
        evaluations,
        angles_deg: config.angles.clone(),
        worst_case: worst,
    };
    Ok(Run {
        artifacts: Artifacts::single(output::to_json(&doc)),
        warnings: Vec::new(),
        failure,
    })
}

/// Reads `MSF_THREADS` (unset or `0` = automatic).
pub fn sweep_options_from_env(value: Option<&str>) -> Result<SweepOptions, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(SweepOptions::default()),
        Some(text) => text
            .parse::<usize>()
            .map(SweepOptions::with_threads)
            .map_err(|_| {
                CliError::new(
                    ErrorKind::Config,
                    format!("MSF_THREADS must be a non-negative integer, got `{text}`"),
                )
                .with_details(json!({ "key": "MSF_THREADS" }))
            }),
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::new(
            ErrorKind::Config,
            format!("cannot read config {}: {e}", path.display()),
        )
        .with_details(json!({ "path": path.display().to_string() }))
    })?;
    Ok(crate::config::parse_config(&text)?)
}
