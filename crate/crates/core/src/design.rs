//! Inverse design: geometry from wavelength ratios, chemical potential for a
//! target peak frequency, and local impedance matching.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{
    reflection_coefficient, GroundPlane, IncidentWave, PatchArrayGeometry, Stackup, Substrate,
};
use crate::constants::SPEED_OF_LIGHT;
use crate::error::ModelError;
use crate::material::GrapheneSheet;
use crate::optimize::bracketed_root;
use crate::spectrum::{
    find_peak, frequency_sweep, FrequencyGrid, Peak, SpectrumError, SweepOptions, WaveTemplate,
};

pub const DESIGN_FREQUENCY: f64 = 2.5e12;
pub const DEFAULT_CHEMICAL_POTENTIAL_EV: f64 = 0.5;
pub const DEFAULT_RELAXATION_TIME: f64 = 0.1e-12;
pub const DEFAULT_TEMPERATURE: f64 = 300.0;
/// 2000 cm²/(V·s).
pub const DEFAULT_MOBILITY: f64 = 0.2;
/// High-resistivity silicon at THz frequencies.
pub const SILICON_PERMITTIVITY: f64 = 11.9;

/// Wavelength divisors: `h = λ/13`, `d = λ/14`, `P = λ/10`.
pub const THICKNESS_DIVISOR: f64 = 13.0;
pub const PATCH_DIVISOR: f64 = 14.0;
pub const PERIOD_DIVISOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("invalid design request: {0}")]
    InvalidRequest(String),
    #[error(
        "target {target} Hz is not bracketed: peak is {lower_peak} Hz at {lower_bound} eV \
         and {upper_peak} Hz at {upper_bound} eV"
    )]
    BracketFailure {
        target: f64,
        lower_bound: f64,
        upper_bound: f64,
        lower_peak: f64,
        upper_peak: f64,
    },
}

/// Geometry from the wavelength ratios at `f_target`, with the default
/// graphene state and a silicon substrate.
pub fn synthesize_geometry(f_target: f64) -> Result<Stackup, ModelError> {
    if !(f_target > 0.0) || !f_target.is_finite() {
        return Err(ModelError::domain(
            "f_target",
            f_target,
            "must be finite and > 0",
        ));
    }
    let wavelength = SPEED_OF_LIGHT / f_target;
    let sheet = GrapheneSheet::new(
        DEFAULT_CHEMICAL_POTENTIAL_EV,
        DEFAULT_RELAXATION_TIME,
        DEFAULT_TEMPERATURE,
    )?
    .with_mobility(DEFAULT_MOBILITY)?;
    Stackup::new(
        sheet,
        PatchArrayGeometry::new(wavelength / PERIOD_DIVISOR, wavelength / PATCH_DIVISOR)?,
        Substrate::new(SILICON_PERMITTIVITY, wavelength / THICKNESS_DIVISOR)?,
        GroundPlane::default(),
    )
}

/// The reference 2.5 THz design.
pub fn default_stackup() -> Stackup {
    synthesize_geometry(DESIGN_FREQUENCY).expect("reference design is valid")
}

/// Parameters the matching search may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterKind {
    /// eV
    ChemicalPotential,
    /// m
    PatchWidth,
    /// m
    Period,
    /// m
    SubstrateThickness,
}

impl ParameterKind {
    pub fn key(self) -> &'static str {
        match self {
            ParameterKind::ChemicalPotential => "mu_c",
            ParameterKind::PatchWidth => "d",
            ParameterKind::Period => "P",
            ParameterKind::SubstrateThickness => "h",
        }
    }

    pub fn value(self, stackup: &Stackup) -> f64 {
        match self {
            ParameterKind::ChemicalPotential => stackup.sheet.chemical_potential_ev(),
            ParameterKind::PatchWidth => stackup.geometry.patch_width(),
            ParameterKind::Period => stackup.geometry.period(),
            ParameterKind::SubstrateThickness => stackup.substrate.thickness(),
        }
    }

    /// Returns a copy of `stackup` with this parameter replaced, or an error
    /// if the result violates an invariant (e.g. `d >= P`).
    pub fn apply(self, stackup: &Stackup, value: f64) -> Result<Stackup, ModelError> {
        let mut out = *stackup;
        match self {
            ParameterKind::ChemicalPotential => {
                out.sheet = stackup.sheet.with_chemical_potential(value)?
            }
            ParameterKind::PatchWidth => {
                out.geometry = PatchArrayGeometry::new(stackup.geometry.period(), value)?
            }
            ParameterKind::Period => {
                out.geometry = PatchArrayGeometry::new(value, stackup.geometry.patch_width())?
            }
            ParameterKind::SubstrateThickness => {
                out.substrate = Substrate::lossy(
                    stackup.substrate.relative_permittivity(),
                    value,
                    stackup.substrate.loss_tangent(),
                )?
            }
        }
        Ok(out)
    }

    /// Box used when none is given: 0.1–1 eV for µc, ±50% of the start value
    /// for dimensions.
    pub fn default_bounds(self, stackup: &Stackup) -> (f64, f64) {
        match self {
            ParameterKind::ChemicalPotential => (0.1, 1.0),
            _ => {
                let v = self.value(stackup);
                (0.5 * v, 1.5 * v)
            }
        }
    }
}

impl std::str::FromStr for ParameterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "mu_c" => Ok(ParameterKind::ChemicalPotential),
            "d" | "patch_width" => Ok(ParameterKind::PatchWidth),
            "P" | "period" => Ok(ParameterKind::Period),
            "h" | "thickness" => Ok(ParameterKind::SubstrateThickness),
            other => Err(format!(
                "unknown free parameter `{other}` (expected mu_c, d, P or h)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeParameter {
    pub kind: ParameterKind,
    pub lower: f64,
    pub upper: f64,
}

impl FreeParameter {
    pub fn new(kind: ParameterKind, lower: f64, upper: f64) -> Self {
        Self { kind, lower, upper }
    }

    pub fn with_default_bounds(kind: ParameterKind, stackup: &Stackup) -> Self {
        let (lower, upper) = kind.default_bounds(stackup);
        Self { kind, lower, upper }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignTarget {
    pub frequency: f64,
    pub min_absorption: f64,
    pub free_parameters: Vec<FreeParameter>,
}

impl DesignTarget {
    pub fn new(
        frequency: f64,
        min_absorption: f64,
        free_parameters: Vec<FreeParameter>,
    ) -> Result<Self, DesignError> {
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(DesignError::InvalidRequest(format!(
                "target frequency {frequency} must be > 0"
            )));
        }
        if !(min_absorption > 0.0 && min_absorption <= 1.0) {
            return Err(DesignError::InvalidRequest(format!(
                "min_absorption {min_absorption} must lie in (0, 1]"
            )));
        }
        if free_parameters.is_empty() {
            return Err(DesignError::InvalidRequest(
                "at least one free parameter is required".into(),
            ));
        }
        Ok(Self {
            frequency,
            min_absorption,
            free_parameters,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution {
    pub stackup: Stackup,
    pub target_frequency: f64,
    pub achieved_peak_frequency: f64,
    pub achieved_peak_absorption: f64,
    /// `|S11|` at the target frequency, normal incidence.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after each accepted step (matching only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objective_history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Grid used to locate peaks.
    pub grid: FrequencyGrid,
    pub sweep: SweepOptions,
    /// Converged when `|f_peak - f_target| < frequency_tolerance * f_target`.
    pub frequency_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grid: FrequencyGrid::default(),
            sweep: SweepOptions::default(),
            frequency_tolerance: 1e-3,
            max_iterations: 100,
        }
    }
}

/// Normal-incidence absorption peak of a stackup on the given grid.
pub fn peak_of(
    stackup: &Stackup,
    grid: &FrequencyGrid,
    sweep: SweepOptions,
) -> Result<Peak, SpectrumError> {
    find_peak(&frequency_sweep(
        stackup,
        &WaveTemplate::normal(),
        grid,
        sweep,
    )?)
}

fn residual_at(stackup: &Stackup, f: f64) -> Result<f64, ModelError> {
    Ok(reflection_coefficient(stackup, &IncidentWave::normal(f)?)?.norm())
}

fn solution(
    stackup: Stackup,
    f_target: f64,
    peak: Peak,
    iterations: usize,
    converged: bool,
    objective_history: Vec<f64>,
) -> Result<DesignSolution, DesignError> {
    Ok(DesignSolution {
        residual: residual_at(&stackup, f_target)?,
        stackup,
        target_frequency: f_target,
        achieved_peak_frequency: peak.frequency,
        achieved_peak_absorption: peak.absorption,
        iterations,
        converged,
        objective_history,
    })
}

/// Chemical potential (within `bounds`, eV) whose absorption peak lands on `f_target`.
///
/// The peak frequency grows monotonically with µc, so the endpoints must
/// bracket the target. The stackup's current µc is tried first.
pub fn solve_chemical_potential(
    stackup: &Stackup,
    f_target: f64,
    bounds: (f64, f64),
    options: &SolverOptions,
) -> Result<DesignSolution, DesignError> {
    let (lower, upper) = bounds;
    if !(f_target > 0.0) || !f_target.is_finite() {
        return Err(DesignError::InvalidRequest(format!(
            "target frequency {f_target} must be > 0"
        )));
    }
    if !(lower > 0.0 && lower < upper) {
        return Err(DesignError::InvalidRequest(format!(
            "chemical potential bounds [{lower}, {upper}] eV must satisfy 0 < low < high"
        )));
    }
    let tolerance = options.frequency_tolerance * f_target;
    let peak_for = |mu: f64| -> Result<(Stackup, Peak), DesignError> {
        let tuned = ParameterKind::ChemicalPotential.apply(stackup, mu)?;
        let peak = peak_of(&tuned, &options.grid, options.sweep)?;
        Ok((tuned, peak))
    };

    let (low_stack, low_peak) = peak_for(lower)?;
    let (high_stack, high_peak) = peak_for(upper)?;
    let g_lo = low_peak.frequency - f_target;
    let g_hi = high_peak.frequency - f_target;
    if g_lo.abs() < tolerance {
        return solution(low_stack, f_target, low_peak, 0, true, Vec::new());
    }
    if g_hi.abs() < tolerance {
        return solution(high_stack, f_target, high_peak, 0, true, Vec::new());
    }
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(DesignError::BracketFailure {
            target: f_target,
            lower_bound: lower,
            upper_bound: upper,
            lower_peak: low_peak.frequency,
            upper_peak: high_peak.frequency,
        });
    }

    let start = Some(stackup.sheet.chemical_potential_ev());
    let outcome = bracketed_root(
        |mu| peak_for(mu).map(|(_, p)| p.frequency - f_target),
        (lower, g_lo),
        (upper, g_hi),
        start,
        tolerance,
        options.max_iterations,
    )?;
    let (tuned, peak) = peak_for(outcome.x)?;
    solution(
        tuned,
        f_target,
        peak,
        outcome.iterations,
        outcome.converged,
        Vec::new(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchOptions {
    /// Converged when `|S11(f_target)| < tolerance`.
    pub tolerance: f64,
    /// Cap on coordinate sweeps.
    pub max_iterations: usize,
    /// Initial step as a fraction of each parameter's box width.
    pub initial_step: f64,
    /// Search stops once every step is below this fraction of its box width.
    pub min_step: f64,
    pub grid: FrequencyGrid,
    pub sweep: SweepOptions,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            tolerance: 0.01,
            max_iterations: 500,
            initial_step: 0.1,
            min_step: 1e-9,
            grid: FrequencyGrid::default(),
            sweep: SweepOptions::default(),
        }
    }
}

/// Drives `|S11(f_target)|²` down by coordinate search with shrinking steps,
/// starting from `stackup`. Each parameter stays inside its box; proposals
/// that break a geometry invariant are rejected.
pub fn match_impedance(
    stackup: &Stackup,
    f_target: f64,
    free_parameters: &[FreeParameter],
    options: &MatchOptions,
) -> Result<DesignSolution, DesignError> {
    if !(f_target > 0.0) || !f_target.is_finite() {
        return Err(DesignError::InvalidRequest(format!(
            "target frequency {f_target} must be > 0"
        )));
    }
    if free_parameters.is_empty() || free_parameters.len() > 3 {
        return Err(DesignError::InvalidRequest(
            "between one and three free parameters are required".into(),
        ));
    }
    for (i, p) in free_parameters.iter().enumerate() {
        if free_parameters[..i].iter().any(|q| q.kind == p.kind) {
            return Err(DesignError::InvalidRequest(format!(
                "free parameter {} listed twice",
                p.kind.key()
            )));
        }
        if !(p.lower < p.upper) || !(p.lower > 0.0) {
            return Err(DesignError::InvalidRequest(format!(
                "invalid bounds for {}",
                p.kind.key()
            )));
        }
        let v = p.kind.value(stackup);
        if v < p.lower || v > p.upper {
            return Err(DesignError::InvalidRequest(format!(
                "starting value {v} of {} lies outside [{}, {}]",
                p.kind.key(),
                p.lower,
                p.upper
            )));
        }
    }
    if !(options.tolerance > 0.0) {
        return Err(DesignError::InvalidRequest("tolerance must be > 0".into()));
    }

    let objective = |s: &Stackup| {
        residual_at(s, f_target)
            .map(|r| r * r)
            .unwrap_or(f64::INFINITY)
    };
    let mut current = *stackup;
    let mut best = residual_at(&current, f_target)?.powi(2);
    let mut history = vec![best];
    let mut steps: Vec<f64> = free_parameters
        .iter()
        .map(|p| options.initial_step * (p.upper - p.lower))
        .collect();
    let tol2 = options.tolerance * options.tolerance;
    let mut iterations = 0;
    let mut converged = best < tol2;

    while !converged && iterations < options.max_iterations {
        iterations += 1;
        let mut improved = false;
        for (p, step) in free_parameters.iter().zip(&steps) {
            let v = p.kind.value(&current);
            for candidate in [(v + step).min(p.upper), (v - step).max(p.lower)] {
                if candidate == v {
                    continue;
                }
                let Ok(proposal) = p.kind.apply(&current, candidate) else {
                    continue;
                };
                let value = objective(&proposal);
                if value < best {
                    best = value;
                    current = proposal;
                    history.push(value);
                    improved = true;
                    break;
                }
            }
        }
        converged = best < tol2;
        if !improved {
            for s in steps.iter_mut() {
                *s *= 0.5;
            }
            let exhausted = free_parameters
                .iter()
                .zip(&steps)
                .all(|(p, s)| *s < options.min_step * (p.upper - p.lower));
            if exhausted {
                break;
            }
        }
    }

    let peak = peak_of(&current, &options.grid, options.sweep)?;
    solution(current, f_target, peak, iterations, converged, history)
}
