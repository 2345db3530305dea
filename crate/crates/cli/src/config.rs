//! Flat `key = value` run configuration.
//!
//! Every dimensional value carries a unit (`2.5 THz`, `9.23 um`, `0.5 eV`,
//! `0.1 ps`, `300 K`, `30 deg`, `2000 cm2/Vs`). Lines starting with `#` and
//! trailing `# ...` text are comments. Unknown or repeated keys are errors.
//! Geometry that is not given explicitly is synthesized from `frequency`.

use std::fmt;
use std::str::FromStr;

use msf_core::design::{
    DEFAULT_CHEMICAL_POTENTIAL_EV, DEFAULT_MOBILITY, DEFAULT_RELAXATION_TIME, DEFAULT_TEMPERATURE,
    DESIGN_FREQUENCY, SILICON_PERMITTIVITY,
};
use msf_core::spectrum::DEFAULT_BANDWIDTH_THRESHOLD;
use msf_core::{
    synthesize_geometry, ConductivityModel, FrequencyGrid, GrapheneSheet, GroundPlane, ModelError,
    ParameterKind, PatchArrayGeometry, Polarization, Stackup, Substrate,
};

use crate::units::{format_list, format_quantity, parse_list, parse_quantity, Dimension};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, key: &str, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(line), Some(key)) => write!(f, "line {line}, key `{key}`: {}", self.message),
            (None, Some(key)) => write!(f, "key `{key}`: {}", self.message),
            (Some(line), None) => write!(f, "line {line}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    ChemicalPotential,
    Match,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::ChemicalPotential => "chemical_potential",
            SolverKind::Match => "match",
        }
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "chemical_potential" | "mu_c" => Ok(SolverKind::ChemicalPotential),
            "match" | "match_impedance" => Ok(SolverKind::Match),
            other => Err(format!(
                "unknown solver `{other}` (expected chemical_potential or match)"
            )),
        }
    }
}

/// Fully resolved run configuration. Values are SI except chemical
/// potentials (eV) and angles (degrees).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Design frequency used for geometry synthesis, Hz.
    pub frequency: f64,
    pub mu_c: f64,
    pub tau: f64,
    pub temperature: f64,
    /// m²/(V·s); `None` disables the consistency check.
    pub mobility: Option<f64>,
    pub eps_r: f64,
    pub loss_tangent: f64,
    pub thickness: f64,
    pub patch_width: f64,
    pub period: f64,
    pub ground_thickness: f64,
    pub model: ConductivityModel,
    pub f_start: f64,
    pub f_stop: f64,
    pub n_points: usize,
    pub angle: f64,
    pub polarization: Polarization,
    pub angles: Vec<f64>,
    pub mu_c_values: Vec<f64>,
    pub bandwidth_threshold: f64,
    pub target_frequency: f64,
    pub solver: SolverKind,
    pub mu_c_min: f64,
    pub mu_c_max: f64,
    pub free_parameters: Vec<ParameterKind>,
    pub match_tolerance: f64,
    pub frequency_tolerance: f64,
    pub max_iterations: usize,
    pub format: OutputFormat,
    pub output: Option<String>,
}

/// Every accepted key with its dimension, in dump order.
const KEYS: &[(&str, Dimension)] = &[
    ("frequency", Dimension::Frequency),
    ("mu_c", Dimension::Energy),
    ("tau", Dimension::Time),
    ("temperature", Dimension::Temperature),
    ("mobility", Dimension::Mobility),
    ("eps_r", Dimension::Dimensionless),
    ("loss_tangent", Dimension::Dimensionless),
    ("h", Dimension::Length),
    ("d", Dimension::Length),
    ("P", Dimension::Length),
    ("ground_thickness", Dimension::Length),
    ("model", Dimension::Dimensionless),
    ("f_start", Dimension::Frequency),
    ("f_stop", Dimension::Frequency),
    ("n_points", Dimension::Dimensionless),
    ("angle", Dimension::Angle),
    ("polarization", Dimension::Dimensionless),
    ("angles", Dimension::Angle),
    ("mu_c_values", Dimension::Energy),
    ("bandwidth_threshold", Dimension::Dimensionless),
    ("target_frequency", Dimension::Frequency),
    ("solver", Dimension::Dimensionless),
    ("mu_c_min", Dimension::Energy),
    ("mu_c_max", Dimension::Energy),
    ("free_parameters", Dimension::Dimensionless),
    ("match_tolerance", Dimension::Dimensionless),
    ("frequency_tolerance", Dimension::Dimensionless),
    ("max_iterations", Dimension::Dimensionless),
    ("format", Dimension::Dimensionless),
    ("output", Dimension::Dimensionless),
];

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

fn require_positive(line: usize, key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::at(line, key, format!("must be > 0, got {v}")))
    }
}

fn parse_count(line: usize, key: &str, text: &str) -> Result<usize, ConfigError> {
    text.trim().parse::<usize>().map_err(|_| {
        ConfigError::at(
            line,
            key,
            format!("`{}` is not a non-negative integer", text.trim()),
        )
    })
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: Vec<Option<Entry>> = (0..KEYS.len()).map(|_| None).collect();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError {
                line: Some(line),
                key: None,
                message: format!("expected `key = value`, found `{content}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let Some(slot) = KEYS.iter().position(|(k, _)| *k == key) else {
            return Err(ConfigError::at(line, key, "unknown key"));
        };
        if let Some(previous) = &entries[slot] {
            return Err(ConfigError::at(
                line,
                key,
                format!("duplicate key (first set on line {})", previous.line),
            ));
        }
        if value.is_empty() {
            return Err(ConfigError::at(line, key, "missing value"));
        }
        entries[slot] = Some(Entry { line, value });
    }

    let get = |key: &str| {
        let slot = KEYS.iter().position(|(k, _)| *k == key).expect("known key");
        entries[slot]
            .as_ref()
            .map(|e| (e.line, e.value, KEYS[slot].1))
    };
    let quantity = |key: &str, default: f64| -> Result<(f64, usize), ConfigError> {
        match get(key) {
            Some((line, value, dim)) => parse_quantity(value, dim)
                .map(|v| (v, line))
                .map_err(|m| ConfigError::at(line, key, m)),
            None => Ok((default, 0)),
        }
    };
    let positive = |key: &str, default: f64| -> Result<f64, ConfigError> {
        let (v, line) = quantity(key, default)?;
        require_positive(line, key, v)
    };
    let parsed = |key: &str| -> Option<(usize, &str)> { get(key).map(|(l, v, _)| (l, v)) };
    fn from_text<T: FromStr<Err = String>>(
        key: &str,
        entry: Option<(usize, &str)>,
        default: T,
    ) -> Result<T, ConfigError> {
        match entry {
            Some((line, value)) => value.parse().map_err(|m| ConfigError::at(line, key, m)),
            None => Ok(default),
        }
    }

    let frequency = positive("frequency", DESIGN_FREQUENCY)?;
    let mu_c = positive("mu_c", DEFAULT_CHEMICAL_POTENTIAL_EV)?;
    let tau = positive("tau", DEFAULT_RELAXATION_TIME)?;
    let temperature = positive("temperature", DEFAULT_TEMPERATURE)?;
    let mobility = match parsed("mobility") {
        Some((_, v)) if v.eq_ignore_ascii_case("none") => None,
        _ => Some(positive("mobility", DEFAULT_MOBILITY)?),
    };
    let (eps_r, eps_line) = quantity("eps_r", SILICON_PERMITTIVITY)?;
    if !(eps_r >= 1.0) {
        return Err(ConfigError::at(
            eps_line,
            "eps_r",
            format!("must be >= 1, got {eps_r}"),
        ));
    }
    let (loss_tangent, lt_line) = quantity("loss_tangent", 0.0)?;
    if !(loss_tangent >= 0.0) {
        return Err(ConfigError::at(
            lt_line,
            "loss_tangent",
            format!("must be >= 0, got {loss_tangent}"),
        ));
    }

    let synthesized = synthesize_geometry(frequency).map_err(|e| ConfigError {
        line: parsed("frequency").map(|(l, _)| l),
        key: Some("frequency".into()),
        message: e.to_string(),
    })?;
    let thickness = positive("h", synthesized.substrate.thickness())?;
    let patch_width = positive("d", synthesized.geometry.patch_width())?;
    let period = positive("P", synthesized.geometry.period())?;
    if !(patch_width < period) {
        let line = parsed("d").or(parsed("P")).map(|(l, _)| l);
        return Err(ConfigError {
            line,
            key: Some(if parsed("d").is_some() { "d" } else { "P" }.into()),
            message: format!(
                "patch width {patch_width} m must be smaller than the period {period} m"
            ),
        });
    }
    let ground_thickness = positive("ground_thickness", GroundPlane::default().thickness)?;
    let model = from_text("model", parsed("model"), ConductivityModel::Drude)?;

    let grid = FrequencyGrid::default();
    let f_start = positive("f_start", grid.start())?;
    let f_stop = positive("f_stop", grid.stop())?;
    if !(f_start < f_stop) {
        let line = parsed("f_stop").or(parsed("f_start")).map(|(l, _)| l);
        return Err(ConfigError {
            line,
            key: Some("f_stop".into()),
            message: format!("f_stop ({f_stop} Hz) must exceed f_start ({f_start} Hz)"),
        });
    }
    let n_points = match parsed("n_points") {
        Some((line, v)) => {
            let n = parse_count(line, "n_points", v)?;
            if n < 2 {
                return Err(ConfigError::at(
                    line,
                    "n_points",
                    "at least 2 points are required",
                ));
            }
            n
        }
        None => grid.len(),
    };

    let check_angle = |line: usize, key: &str, a: f64| {
        if (0.0..90.0).contains(&a) {
            Ok(a)
        } else {
            Err(ConfigError::at(
                line,
                key,
                format!("angle {a} deg must satisfy 0 <= angle < 90"),
            ))
        }
    };
    let (angle, angle_line) = quantity("angle", 0.0)?;
    let angle = check_angle(angle_line, "angle", angle)?;
    let polarization = from_text("polarization", parsed("polarization"), Polarization::Te)?;
    let angles = match parsed("angles") {
        Some((line, v)) => parse_list(v, Dimension::Angle)
            .map_err(|m| ConfigError::at(line, "angles", m))?
            .into_iter()
            .map(|a| check_angle(line, "angles", a))
            .collect::<Result<Vec<_>, _>>()?,
        None => (0..=5).map(|i| 10.0 * i as f64).collect(),
    };
    let mu_c_values = match parsed("mu_c_values") {
        Some((line, v)) => {
            let values = parse_list(v, Dimension::Energy)
                .map_err(|m| ConfigError::at(line, "mu_c_values", m))?;
            if values.iter().any(|&m| !(m > 0.0)) {
                return Err(ConfigError::at(
                    line,
                    "mu_c_values",
                    "chemical potentials must be > 0",
                ));
            }
            if values.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(ConfigError::at(
                    line,
                    "mu_c_values",
                    "values must be strictly increasing",
                ));
            }
            values
        }
        None => vec![0.50, 0.525, 0.55, 0.575, 0.60],
    };
    let (bandwidth_threshold, bt_line) =
        quantity("bandwidth_threshold", DEFAULT_BANDWIDTH_THRESHOLD)?;
    if !(bandwidth_threshold > 0.0 && bandwidth_threshold < 1.0) {
        return Err(ConfigError::at(
            bt_line,
            "bandwidth_threshold",
            "must lie strictly between 0 and 1",
        ));
    }

    let target_frequency = positive("target_frequency", frequency)?;
    let solver = from_text("solver", parsed("solver"), SolverKind::ChemicalPotential)?;
    let mu_c_min = positive("mu_c_min", 0.3)?;
    let mu_c_max = positive("mu_c_max", 0.8)?;
    if !(mu_c_min < mu_c_max) {
        let line = parsed("mu_c_max").or(parsed("mu_c_min")).map(|(l, _)| l);
        return Err(ConfigError {
            line,
            key: Some("mu_c_max".into()),
            message: format!("mu_c_max ({mu_c_max} eV) must exceed mu_c_min ({mu_c_min} eV)"),
        });
    }
    let free_parameters = match parsed("free_parameters") {
        Some((line, v)) => {
            let kinds = v
                .split(',')
                .map(|s| s.parse::<ParameterKind>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|m| ConfigError::at(line, "free_parameters", m))?;
            if kinds.is_empty() || kinds.len() > 3 {
                return Err(ConfigError::at(
                    line,
                    "free_parameters",
                    "between one and three parameters are required",
                ));
            }
            for (i, k) in kinds.iter().enumerate() {
                if kinds[..i].contains(k) {
                    return Err(ConfigError::at(
                        line,
                        "free_parameters",
                        format!("`{}` listed twice", k.key()),
                    ));
                }
            }
            kinds
        }
        None => vec![
            ParameterKind::ChemicalPotential,
            ParameterKind::SubstrateThickness,
        ],
    };
    let match_tolerance = positive("match_tolerance", 0.01)?;
    let frequency_tolerance = positive("frequency_tolerance", 1e-3)?;
    let max_iterations = match parsed("max_iterations") {
        Some((line, v)) => {
            let n = parse_count(line, "max_iterations", v)?;
            if n == 0 {
                return Err(ConfigError::at(line, "max_iterations", "must be >= 1"));
            }
            n
        }
        None => 100,
    };
    let format = from_text("format", parsed("format"), OutputFormat::Csv)?;
    let output = parsed("output").map(|(_, v)| v.to_string());

    let config = RunConfig {
        frequency,
        mu_c,
        tau,
        temperature,
        mobility,
        eps_r,
        loss_tangent,
        thickness,
        patch_width,
        period,
        ground_thickness,
        model,
        f_start,
        f_stop,
        n_points,
        angle,
        polarization,
        angles,
        mu_c_values,
        bandwidth_threshold,
        target_frequency,
        solver,
        mu_c_min,
        mu_c_max,
        free_parameters,
        match_tolerance,
        frequency_tolerance,
        max_iterations,
        format,
        output,
    };
    config.stackup().map_err(|e| ConfigError {
        line: None,
        key: None,
        message: e.to_string(),
    })?;
    Ok(config)
}

impl RunConfig {
    pub fn stackup(&self) -> Result<Stackup, ModelError> {
        let mut sheet = GrapheneSheet::new(self.mu_c, self.tau, self.temperature)?;
        if let Some(m) = self.mobility {
            sheet = sheet.with_mobility(m)?;
        }
        Ok(Stackup::new(
            sheet,
            PatchArrayGeometry::new(self.period, self.patch_width)?,
            Substrate::lossy(self.eps_r, self.thickness, self.loss_tangent)?,
            GroundPlane {
                perfect_conductor: true,
                thickness: self.ground_thickness,
            },
        )?
        .with_model(self.model))
    }

    pub fn grid(&self) -> FrequencyGrid {
        FrequencyGrid::new(self.f_start, self.f_stop, self.n_points)
            .expect("validated at parse time")
    }

    /// Effective configuration with every key set, in canonical units.
    /// Parsing the result yields an identical `RunConfig`.
    pub fn dump(&self) -> String {
        let q = format_quantity;
        let mut out = String::from("# effective configuration\n");
        let mut put = |key: &str, value: String| {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        };
        put("frequency", q(self.frequency, Dimension::Frequency));
        put("mu_c", q(self.mu_c, Dimension::Energy));
        put("tau", q(self.tau, Dimension::Time));
        put("temperature", q(self.temperature, Dimension::Temperature));
        put(
            "mobility",
            self.mobility
                .map_or_else(|| "none".to_string(), |m| q(m, Dimension::Mobility)),
        );
        put("eps_r", q(self.eps_r, Dimension::Dimensionless));
        put(
            "loss_tangent",
            q(self.loss_tangent, Dimension::Dimensionless),
        );
        put("h", q(self.thickness, Dimension::Length));
        put("d", q(self.patch_width, Dimension::Length));
        put("P", q(self.period, Dimension::Length));
        put(
            "ground_thickness",
            q(self.ground_thickness, Dimension::Length),
        );
        put("model", self.model.name().to_string());
        put("f_start", q(self.f_start, Dimension::Frequency));
        put("f_stop", q(self.f_stop, Dimension::Frequency));
        put("n_points", self.n_points.to_string());
        put("angle", q(self.angle, Dimension::Angle));
        put(
            "polarization",
            self.polarization.name().to_ascii_lowercase(),
        );
        put("angles", format_list(&self.angles, Dimension::Angle));
        put(
            "mu_c_values",
            format_list(&self.mu_c_values, Dimension::Energy),
        );
        put(
            "bandwidth_threshold",
            q(self.bandwidth_threshold, Dimension::Dimensionless),
        );
        put(
            "target_frequency",
            q(self.target_frequency, Dimension::Frequency),
        );
        put("solver", self.solver.name().to_string());
        put("mu_c_min", q(self.mu_c_min, Dimension::Energy));
        put("mu_c_max", q(self.mu_c_max, Dimension::Energy));
        put(
            "free_parameters",
            self.free_parameters
                .iter()
                .map(|k| k.key())
                .collect::<Vec<_>>()
                .join(", "),
        );
        put(
            "match_tolerance",
            q(self.match_tolerance, Dimension::Dimensionless),
        );
        put(
            "frequency_tolerance",
            q(self.frequency_tolerance, Dimension::Dimensionless),
        );
        put("max_iterations", self.max_iterations.to_string());
        put("format", self.format.name().to_string());
        if let Some(path) = &self.output {
            put("output", path.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c.mu_c, 0.5);
        assert_eq!(c.tau, 1e-13);
        assert_eq!(c.temperature, 300.0);
        assert_eq!(c.mobility, Some(0.2));
        assert_eq!(c.eps_r, 11.9);
        assert_eq!(c.model, ConductivityModel::Drude);
        assert_eq!(c.stackup().unwrap(), msf_core::default_stackup());
        assert_eq!(c.grid(), FrequencyGrid::default());
        assert_eq!(c.format, OutputFormat::Csv);
    }

    #[test]
    fn negative_chemical_potential_names_key_and_line() {
        let err = parse_config("# comment\nmu_c = -0.1 eV\n").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("mu_c"));
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn frequency_units_are_equivalent() {
        assert_eq!(
            parse_config("frequency = 2.5 THz").unwrap(),
            parse_config("frequency = 2.5e12 Hz").unwrap()
        );
    }

    #[test]
    fn unknown_and_duplicate_keys_rejected() {
        let err = parse_config("colour = blue").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("colour"));
        let err = parse_config("mu_c = 0.5 eV\nmu_c = 0.6 eV").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(parse_config("just text").is_err());
        assert!(parse_config("mu_c =").is_err());
    }

    #[test]
    fn unit_mismatch_rejected() {
        let err = parse_config("\n\nh = 9 THz").unwrap_err();
        assert_eq!((err.line, err.key.as_deref()), (Some(3), Some("h")));
        assert!(err.message.contains("unit mismatch"));
        assert!(parse_config("n_points = 2.5").is_err());
        assert!(parse_config("eps_r = 11.9 m").is_err());
    }

    #[test]
    fn invariant_violations_rejected() {
        assert_eq!(
            parse_config("d = 13 um").unwrap_err().key.as_deref(),
            Some("d")
        );
        assert!(parse_config("eps_r = 0.5").is_err());
        assert!(parse_config("f_start = 5 THz").is_err());
        assert!(parse_config("n_points = 1").is_err());
        assert!(parse_config("angle = 90 deg").is_err());
        assert!(parse_config("angles = 0, 95 deg").is_err());
        assert!(parse_config("mu_c_values = 0.6, 0.5 eV").is_err());
        assert!(parse_config("bandwidth_threshold = 1.0").is_err());
        assert!(parse_config("mu_c_min = 0.9 eV").is_err());
        assert!(parse_config("free_parameters = mu_c, mu_c").is_err());
        assert!(parse_config("free_parameters = mu_c, h, d, P").is_err());
        assert!(parse_config("model = quantum").is_err());
        assert!(parse_config("format = xml").is_err());
    }

    #[test]
    fn geometry_synthesized_from_frequency_unless_overridden() {
        let c = parse_config("frequency = 5 THz\nh = 10 um").unwrap();
        let s = synthesize_geometry(5e12).unwrap();
        assert_eq!(c.patch_width, s.geometry.patch_width());
        assert_eq!(c.period, s.geometry.period());
        assert_eq!(c.thickness, 10e-6);
        assert_eq!(c.target_frequency, 5e12);
    }

    #[test]
    fn comments_and_spacing() {
        let c = parse_config(
            "  # header\nmu_c=0.55eV   # tuned\n\nangles = 0, 20, 40 deg\nmobility = none",
        )
        .unwrap();
        assert_eq!(c.mu_c, 0.55);
        assert_eq!(c.angles, vec![0.0, 20.0, 40.0]);
        assert_eq!(c.mobility, None);
    }

    #[test]
    fn dump_round_trips() {
        let text = "frequency = 2.7 THz\nmu_c = 0.55 eV\ntau = 0.13 ps\nangle = 0.3 rad\nangles = 0, 25 deg\n\
                    polarization = tm\nmodel = kubo\nloss_tangent = 0.01\noutput = out.csv\nformat = json\n\
                    free_parameters = d, P\nsolver = match\nmobility = 1500 cm2/Vs";
        let c = parse_config(text).unwrap();
        let again = parse_config(&c.dump()).unwrap();
        assert_eq!(c, again);
        let d = RunConfig::default();
        assert_eq!(parse_config(&d.dump()).unwrap(), d);
    }
}
