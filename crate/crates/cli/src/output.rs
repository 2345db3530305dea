//! Serialized artifacts: CSV tables, JSON documents and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use msf_core::spectrum::{AngleSpectrum, SpectrumPoint};
use msf_core::{Bandwidth, DesignSolution, Peak, ReconfigurationMap, Spectrum, Stackup};
use serde::Serialize;

pub const SPECTRUM_HEADER: &str = "frequency_hz,s11_real,s11_imag,s11_mag_db,absorption";
pub const ANGLES_HEADER: &str =
    "angle_deg,polarization,frequency_hz,s11_real,s11_imag,s11_mag_db,absorption";
pub const ANGLE_PEAKS_HEADER: &str =
    "angle_deg,polarization,peak_frequency_hz,peak_absorption,boundary";
pub const RECONFIG_HEADER: &str = "mu_c_ev,peak_frequency_hz,peak_absorption";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn magnitude_db(point: &SpectrumPoint) -> f64 {
    20.0 * point.s11.norm().log10()
}

fn spectrum_row(out: &mut String, p: &SpectrumPoint) {
    let _ = writeln!(
        out,
        "{},{},{},{},{}",
        float(p.frequency),
        float(p.s11.re),
        float(p.s11.im),
        float(magnitude_db(p)),
        float(p.absorption)
    );
}

pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = String::with_capacity(96 * (spectrum.len() + 1));
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for p in spectrum.points() {
        spectrum_row(&mut out, p);
    }
    out
}

/// Angle in degrees as configured, with the spectrum computed for it.
pub type AngleRow = (f64, AngleSpectrum);

/// One row per (angle, polarization, frequency).
pub fn angles_csv(maps: &[AngleRow]) -> String {
    let mut out = String::from(ANGLES_HEADER);
    out.push('\n');
    for (deg, map) in maps {
        let prefix = format!("{},{}", float(*deg), polarization_of(map));
        for p in map.spectrum.points() {
            out.push_str(&prefix);
            out.push(',');
            spectrum_row(&mut out, p);
        }
    }
    out
}

pub fn angle_peaks_csv(maps: &[AngleRow]) -> String {
    let mut out = String::from(ANGLE_PEAKS_HEADER);
    out.push('\n');
    for (deg, map) in maps {
        let _ = write!(out, "{},{},", float(*deg), polarization_of(map));
        match &map.peak {
            Some(peak) => {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    float(peak.frequency),
                    float(peak.absorption),
                    peak.boundary
                );
            }
            None => out.push_str(",,\n"),
        }
    }
    out
}

pub fn reconfig_csv(map: &ReconfigurationMap) -> String {
    let mut out = String::from(RECONFIG_HEADER);
    out.push('\n');
    for e in &map.entries {
        let _ = writeln!(
            out,
            "{},{},{}",
            float(e.chemical_potential_ev),
            float(e.peak_frequency),
            float(e.peak_absorption)
        );
    }
    out
}

fn polarization_of(map: &AngleSpectrum) -> &'static str {
    map.spectrum
        .source()
        .map_or("", |s| s.wave.polarization.name())
}

#[derive(Debug, Serialize)]
pub struct PointDto {
    pub frequency_hz: f64,
    pub s11_real: f64,
    pub s11_imag: f64,
    pub s11_mag_db: Option<f64>,
    pub absorption: f64,
}

impl From<&SpectrumPoint> for PointDto {
    fn from(p: &SpectrumPoint) -> Self {
        Self {
            frequency_hz: p.frequency,
            s11_real: p.s11.re,
            s11_imag: p.s11.im,
            s11_mag_db: finite(magnitude_db(p)),
            absorption: p.absorption,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PeakDto {
    pub frequency_hz: f64,
    pub absorption: f64,
    pub boundary: bool,
    pub refined: bool,
}

impl From<&Peak> for PeakDto {
    fn from(p: &Peak) -> Self {
        Self {
            frequency_hz: p.frequency,
            absorption: p.absorption,
            boundary: p.boundary,
            refined: p.refined,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BandwidthDto {
    pub threshold: f64,
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    pub f_center_hz: f64,
    pub fractional_bandwidth: f64,
}

impl BandwidthDto {
    pub fn new(threshold: f64, b: &Bandwidth) -> Self {
        Self {
            threshold,
            f_lo_hz: b.f_lo,
            f_hi_hz: b.f_hi,
            f_center_hz: b.f_center,
            fractional_bandwidth: b.fractional_bandwidth,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StackupDto {
    pub mu_c_ev: f64,
    pub tau_s: f64,
    pub temperature_k: f64,
    pub mobility_m2_per_vs: Option<f64>,
    pub eps_r: f64,
    pub loss_tangent: f64,
    pub h_m: f64,
    pub d_m: f64,
    pub period_m: f64,
    pub model: &'static str,
}

impl From<&Stackup> for StackupDto {
    fn from(s: &Stackup) -> Self {
        Self {
            mu_c_ev: s.sheet.chemical_potential_ev(),
            tau_s: s.sheet.relaxation_time(),
            temperature_k: s.sheet.temperature(),
            mobility_m2_per_vs: s.sheet.mobility(),
            eps_r: s.substrate.relative_permittivity(),
            loss_tangent: s.substrate.loss_tangent(),
            h_m: s.substrate.thickness(),
            d_m: s.geometry.patch_width(),
            period_m: s.geometry.period(),
            model: s.model.name(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumDoc {
    pub kind: &'static str,
    pub angle_deg: f64,
    pub polarization: &'static str,
    pub stackup: StackupDto,
    pub points: Vec<PointDto>,
    pub peak: Option<PeakDto>,
    pub bandwidth: Option<BandwidthDto>,
}

#[derive(Debug, Serialize)]
pub struct AngleEntryDto {
    pub angle_deg: f64,
    pub polarization: &'static str,
    pub peak: Option<PeakDto>,
    pub points: Vec<PointDto>,
}

impl From<&AngleRow> for AngleEntryDto {
    fn from((deg, map): &AngleRow) -> Self {
        Self {
            angle_deg: *deg,
            polarization: polarization_of(map),
            peak: map.peak.as_ref().map(PeakDto::from),
            points: map.spectrum.points().iter().map(PointDto::from).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AnglesDoc {
    pub kind: &'static str,
    pub stackup: StackupDto,
    pub spectra: Vec<AngleEntryDto>,
}

#[derive(Debug, Serialize)]
pub struct ReconfigEntryDto {
    pub mu_c_ev: f64,
    pub peak_frequency_hz: f64,
    pub peak_absorption: f64,
}

#[derive(Debug, Serialize)]
pub struct ReconfigDoc {
    pub kind: &'static str,
    pub entries: Vec<ReconfigEntryDto>,
    pub monotone: bool,
    pub anomalies: Vec<usize>,
}

impl From<&ReconfigurationMap> for ReconfigDoc {
    fn from(map: &ReconfigurationMap) -> Self {
        Self {
            kind: "reconfiguration",
            entries: map
                .entries
                .iter()
                .map(|e| ReconfigEntryDto {
                    mu_c_ev: e.chemical_potential_ev,
                    peak_frequency_hz: e.peak_frequency,
                    peak_absorption: e.peak_absorption,
                })
                .collect(),
            monotone: map.is_monotone(),
            anomalies: map.anomalies.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolutionDoc {
    pub kind: &'static str,
    pub solver: &'static str,
    pub target_frequency_hz: f64,
    pub achieved_peak_frequency_hz: f64,
    pub achieved_peak_absorption: f64,
    pub residual_s11: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stackup: StackupDto,
    pub objective_history: Vec<f64>,
}

impl SolutionDoc {
    pub fn new(solver: &'static str, s: &DesignSolution) -> Self {
        Self {
            kind: "solution",
            solver,
            target_frequency_hz: s.target_frequency,
            achieved_peak_frequency_hz: s.achieved_peak_frequency,
            achieved_peak_absorption: s.achieved_peak_absorption,
            residual_s11: s.residual,
            iterations: s.iterations,
            converged: s.converged,
            stackup: StackupDto::from(&s.stackup),
            objective_history: s.objective_history.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct WorstCaseDto {
    pub frequency_hz: f64,
    pub angle_deg: f64,
    pub polarization: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ValidationDoc {
    pub kind: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub evaluations: usize,
    pub angles_deg: Vec<f64>,
    pub worst_case: Option<WorstCaseDto>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("DTOs serialize");
    text.push('\n');
    text
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir)?;
    file.write_all(contents.as_bytes())?;
    file.as_file().sync_all()?;
    file.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// `out.csv` -> `out_peaks.csv`.
pub fn sibling_path(path: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for v in [0.1, 1.0 / 3.0, 2.666e12, -44.0, f64::MIN_POSITIVE, 1e300] {
            let s = float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(float(2.5e12), "2.5000000000000000e12");
    }

    #[test]
    fn csv_header_and_rows() {
        let points = vec![SpectrumPoint {
            frequency: 1e12,
            s11: Complex64::new(0.0, 0.1),
            absorption: 0.99,
        }];
        let csv = spectrum_csv(&Spectrum::from_points(points).unwrap());
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(SPECTRUM_HEADER));
        let row: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(row, vec![1e12, 0.0, 0.1, -20.0, 0.99]);
    }

    #[test]
    fn zero_reflection_serializes_as_null_db() {
        let p = SpectrumPoint {
            frequency: 1e12,
            s11: Complex64::new(0.0, 0.0),
            absorption: 1.0,
        };
        assert_eq!(PointDto::from(&p).s11_mag_db, None);
        assert!(to_json(&PointDto::from(&p)).contains("\"s11_mag_db\": null"));
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(
            sibling_path(Path::new("a/out.csv"), "_peaks"),
            Path::new("a/out_peaks.csv")
        );
        assert_eq!(
            sibling_path(Path::new("out"), "_peaks"),
            Path::new("out_peaks")
        );
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
