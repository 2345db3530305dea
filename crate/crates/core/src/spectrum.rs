//! Frequency, angle and chemical-potential sweeps with peak and bandwidth
//! extraction.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{
    absorption, absorption_from_reflection, reflection_coefficient, IncidentWave, Polarization,
    Stackup,
};
use crate::error::ModelError;
use crate::optimize::golden_section_maximize;

/// Peak refinement stops once the golden-section bracket is below this fraction of the peak frequency.
pub const PEAK_REFINEMENT_TOLERANCE: f64 = 1e-4;
/// Absorption range under which a spectrum is considered flat.
pub const FLAT_SPECTRUM_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_BANDWIDTH_THRESHOLD: f64 = 0.80;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("spectrum is empty")]
    Empty,
    #[error("no peak: absorption is flat across the spectrum")]
    Flat,
    #[error("threshold {0} must lie strictly between 0 and 1")]
    InvalidThreshold(f64),
    #[error("absorption never reaches {threshold} (peak {peak_absorption})")]
    BelowThreshold {
        threshold: f64,
        peak_absorption: f64,
    },
    #[error("invalid sweep input: {0}")]
    InvalidInput(&'static str),
}

/// Uniformly spaced frequency samples, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    start: f64,
    stop: f64,
    n_points: usize,
}

impl FrequencyGrid {
    pub fn new(start: f64, stop: f64, n_points: usize) -> Result<Self, SpectrumError> {
        if !(start > 0.0) || !stop.is_finite() {
            return Err(SpectrumError::InvalidGrid(
                "frequencies must be finite and positive",
            ));
        }
        if !(start < stop) {
            return Err(SpectrumError::InvalidGrid("f_start must be below f_stop"));
        }
        if n_points < 2 {
            return Err(SpectrumError::InvalidGrid(
                "at least two points are required",
            ));
        }
        Ok(Self {
            start,
            stop,
            n_points,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.n_points - 1) as f64
    }

    pub fn frequency(&self, index: usize) -> f64 {
        if index + 1 == self.n_points {
            self.stop
        } else {
            self.start + (self.stop - self.start) * index as f64 / (self.n_points - 1) as f64
        }
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.frequency(i))
    }
}

impl Default for FrequencyGrid {
    /// 1–4 THz with 601 samples (5 GHz spacing).
    fn default() -> Self {
        Self {
            start: 1e12,
            stop: 4e12,
            n_points: 601,
        }
    }
}

/// Incidence angle and polarization, with frequency supplied per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveTemplate {
    pub angle: f64,
    pub polarization: Polarization,
}

impl WaveTemplate {
    pub fn normal() -> Self {
        Self {
            angle: 0.0,
            polarization: Polarization::Te,
        }
    }

    pub fn new(angle: f64, polarization: Polarization) -> Self {
        Self {
            angle,
            polarization,
        }
    }

    pub fn at(&self, frequency: f64) -> Result<IncidentWave, ModelError> {
        IncidentWave::new(frequency, self.angle, self.polarization)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub frequency: f64,
    pub s11: Complex64,
    pub absorption: f64,
}

/// The model configuration a spectrum was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSource {
    pub stackup: Stackup,
    pub wave: WaveTemplate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    points: Vec<SpectrumPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<SweepSource>,
}

impl Spectrum {
    /// Builds a spectrum from precomputed samples (no model attached, so
    /// peaks are not refined).
    pub fn from_points(points: Vec<SpectrumPoint>) -> Result<Self, SpectrumError> {
        if points
            .windows(2)
            .any(|w| !(w[0].frequency < w[1].frequency))
        {
            return Err(SpectrumError::InvalidInput(
                "frequencies must be strictly increasing",
            ));
        }
        Ok(Self {
            points,
            source: None,
        })
    }

    pub fn points(&self) -> &[SpectrumPoint] {
        &self.points
    }

    pub fn source(&self) -> Option<&SweepSource> {
        self.source.as_ref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Parallelism control. `threads == 0` uses the global rayon pool, `1` runs
/// serially. Results are identical for every setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    pub threads: usize,
}

impl SweepOptions {
    pub fn serial() -> Self {
        Self { threads: 1 }
    }

    pub fn with_threads(threads: usize) -> Self {
        Self { threads }
    }
}

fn evaluate_point(
    stackup: &Stackup,
    wave: &WaveTemplate,
    frequency: f64,
) -> Result<SpectrumPoint, ModelError> {
    let incident = wave.at(frequency).map_err(|e| e.at_frequency(frequency))?;
    let s11 = reflection_coefficient(stackup, &incident).map_err(|e| e.at_frequency(frequency))?;
    Ok(SpectrumPoint {
        frequency,
        s11,
        absorption: absorption_from_reflection(s11),
    })
}

/// Evaluates the circuit model at every grid frequency, in grid order.
pub fn frequency_sweep(
    stackup: &Stackup,
    wave: &WaveTemplate,
    grid: &FrequencyGrid,
    options: SweepOptions,
) -> Result<Spectrum, SpectrumError> {
    let eval = |i: usize| evaluate_point(stackup, wave, grid.frequency(i));
    let points: Result<Vec<_>, ModelError> = match options.threads {
        1 => (0..grid.len()).map(eval).collect(),
        0 => (0..grid.len()).into_par_iter().map(eval).collect(),
        n => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|_| SpectrumError::InvalidInput("failed to start worker pool"))?;
            pool.install(|| (0..grid.len()).into_par_iter().map(eval).collect())
        }
    };
    Ok(Spectrum {
        points: points?,
        source: Some(SweepSource {
            stackup: *stackup,
            wave: *wave,
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub frequency: f64,
    pub absorption: f64,
    /// Index of the discrete maximum.
    pub grid_index: usize,
    /// The discrete maximum sits on the first or last sample.
    pub boundary: bool,
    pub refined: bool,
}

/// Global absorption maximum. The discrete argmax (lowest frequency on ties)
/// is refined by golden-section search on the continuous model over its two
/// neighbouring cells when the spectrum carries its source.
pub fn find_peak(spectrum: &Spectrum) -> Result<Peak, SpectrumError> {
    let points = spectrum.points();
    let first = points.first().ok_or(SpectrumError::Empty)?;
    let (mut index, mut max, mut min) = (0, first.absorption, first.absorption);
    for (i, p) in points.iter().enumerate().skip(1) {
        if p.absorption > max {
            max = p.absorption;
            index = i;
        }
        min = min.min(p.absorption);
    }
    if max - min < FLAT_SPECTRUM_TOLERANCE {
        return Err(SpectrumError::Flat);
    }
    let boundary = index == 0 || index + 1 == points.len();
    let mut peak = Peak {
        frequency: points[index].frequency,
        absorption: max,
        grid_index: index,
        boundary,
        refined: false,
    };
    if boundary {
        return Ok(peak);
    }
    if let Some(source) = spectrum.source() {
        let lo = points[index - 1].frequency;
        let hi = points[index + 1].frequency;
        let objective = |f: f64| {
            source
                .wave
                .at(f)
                .and_then(|w| absorption(&source.stackup, &w))
                .unwrap_or(f64::NEG_INFINITY)
        };
        let tol = PEAK_REFINEMENT_TOLERANCE * points[index].frequency;
        let (f, a) = golden_section_maximize(objective, lo, hi, tol);
        if a > peak.absorption {
            peak.frequency = f;
            peak.absorption = a;
            peak.refined = true;
        }
    }
    Ok(peak)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandwidth {
    pub f_lo: f64,
    pub f_hi: f64,
    pub f_center: f64,
    pub fractional_bandwidth: f64,
    pub peak: Peak,
}

/// Contiguous band around the peak where absorption stays at or above
/// `threshold`. Band edges are linearly interpolated between samples.
pub fn bandwidth(spectrum: &Spectrum, threshold: f64) -> Result<Bandwidth, SpectrumError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(SpectrumError::InvalidThreshold(threshold));
    }
    let peak = find_peak(spectrum)?;
    let points = spectrum.points();
    let k = peak.grid_index;
    if points[k].absorption < threshold {
        return Err(SpectrumError::BelowThreshold {
            threshold,
            peak_absorption: peak.absorption,
        });
    }
    let crossing = |inside: &SpectrumPoint, outside: &SpectrumPoint| {
        let t = (inside.absorption - threshold) / (inside.absorption - outside.absorption);
        inside.frequency + t * (outside.frequency - inside.frequency)
    };

    let mut lo = k;
    while lo > 0 && points[lo - 1].absorption >= threshold {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < points.len() && points[hi + 1].absorption >= threshold {
        hi += 1;
    }
    let f_lo = if lo == 0 {
        points[0].frequency
    } else {
        crossing(&points[lo], &points[lo - 1])
    };
    let f_hi = if hi + 1 == points.len() {
        points[hi].frequency
    } else {
        crossing(&points[hi], &points[hi + 1])
    };
    let f_lo = f_lo.min(peak.frequency);
    let f_hi = f_hi.max(peak.frequency);
    let f_center = 0.5 * (f_lo + f_hi);
    Ok(Bandwidth {
        f_lo,
        f_hi,
        f_center,
        fractional_bandwidth: (f_hi - f_lo) / f_center,
        peak,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSpectrum {
    /// Incidence angle in radians.
    pub angle: f64,
    pub spectrum: Spectrum,
    pub peak: Option<Peak>,
}

/// One spectrum per incidence angle (radians) at a fixed polarization.
pub fn angle_map(
    stackup: &Stackup,
    grid: &FrequencyGrid,
    angles: &[f64],
    polarization: Polarization,
    options: SweepOptions,
) -> Result<Vec<AngleSpectrum>, SpectrumError> {
    angles
        .iter()
        .map(|&angle| {
            let wave = WaveTemplate::new(angle, polarization);
            let spectrum = frequency_sweep(stackup, &wave, grid, options)?;
            let peak = find_peak(&spectrum).ok();
            Ok(AngleSpectrum {
                angle,
                spectrum,
                peak,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconfigurationEntry {
    pub chemical_potential_ev: f64,
    pub peak_frequency: f64,
    pub peak_absorption: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconfigurationMap {
    pub entries: Vec<ReconfigurationEntry>,
    /// Indices whose peak frequency does not exceed the previous entry's.
    pub anomalies: Vec<usize>,
}

impl ReconfigurationMap {
    pub fn is_monotone(&self) -> bool {
        self.anomalies.is_empty()
    }
}

/// Normal-incidence peak for each chemical potential (eV, strictly increasing).
pub fn reconfiguration_map(
    stackup: &Stackup,
    grid: &FrequencyGrid,
    chemical_potentials: &[f64],
    options: SweepOptions,
) -> Result<ReconfigurationMap, SpectrumError> {
    if chemical_potentials.is_empty() {
        return Err(SpectrumError::InvalidInput(
            "at least one chemical potential is required",
        ));
    }
    if chemical_potentials.iter().any(|&mu| !(mu > 0.0)) {
        return Err(SpectrumError::InvalidInput(
            "chemical potentials must be positive",
        ));
    }
    if chemical_potentials.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(SpectrumError::InvalidInput(
            "chemical potentials must be strictly increasing",
        ));
    }
    let mut entries = Vec::with_capacity(chemical_potentials.len());
    for &mu in chemical_potentials {
        let mut tuned = *stackup;
        tuned.sheet = stackup.sheet.with_chemical_potential(mu)?;
        let spectrum = frequency_sweep(&tuned, &WaveTemplate::normal(), grid, options)?;
        let peak = find_peak(&spectrum)?;
        entries.push(ReconfigurationEntry {
            chemical_potential_ev: mu,
            peak_frequency: peak.frequency,
            peak_absorption: peak.absorption,
        });
    }
    let anomalies = entries
        .windows(2)
        .enumerate()
        .filter(|(_, w)| !(w[1].peak_frequency > w[0].peak_frequency))
        .map(|(i, _)| i + 1)
        .collect();
    Ok(ReconfigurationMap { entries, anomalies })
}
