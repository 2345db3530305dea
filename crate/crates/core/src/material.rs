//! Graphene sheet conductivity: full Kubo expression and its Drude limit.
//!
//! Time convention is `e^{+jωt}` throughout, so a Drude sheet reads
//! `σ0 / (1 + jωτ)` and inductive impedances carry `+jωL`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{ev_to_joule, BOLTZMANN, ELECTRON_CHARGE, FERMI_VELOCITY, REDUCED_PLANCK};
use crate::error::{ModelError, Result};

/// Relative tolerance of the mobility / relaxation-time consistency check.
pub const MOBILITY_CONSISTENCY_TOLERANCE: f64 = 0.05;

/// Electronic state of the graphene layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrapheneSheet {
    /// Chemical potential µc in eV.
    chemical_potential_ev: f64,
    /// Carrier relaxation time τ in seconds.
    relaxation_time: f64,
    /// Temperature in kelvin.
    temperature: f64,
    /// Carrier mobility in m²/(V·s); informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mobility: Option<f64>,
}

impl GrapheneSheet {
    pub fn new(chemical_potential_ev: f64, relaxation_time: f64, temperature: f64) -> Result<Self> {
        check_positive("chemical_potential", chemical_potential_ev)?;
        check_positive("relaxation_time", relaxation_time)?;
        check_positive("temperature", temperature)?;
        Ok(Self {
            chemical_potential_ev,
            relaxation_time,
            temperature,
            mobility: None,
        })
    }

    /// Attaches a carrier mobility (m²/(V·s)). An inconsistent mobility is
    /// accepted; see [`GrapheneSheet::mobility_mismatch`].
    pub fn with_mobility(mut self, mobility: f64) -> Result<Self> {
        check_positive("mobility", mobility)?;
        self.mobility = Some(mobility);
        Ok(self)
    }

    pub fn with_chemical_potential(self, chemical_potential_ev: f64) -> Result<Self> {
        check_positive("chemical_potential", chemical_potential_ev)?;
        Ok(Self {
            chemical_potential_ev,
            ..self
        })
    }

    pub fn chemical_potential_ev(&self) -> f64 {
        self.chemical_potential_ev
    }

    pub fn chemical_potential_joule(&self) -> f64 {
        ev_to_joule(self.chemical_potential_ev)
    }

    pub fn relaxation_time(&self) -> f64 {
        self.relaxation_time
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn mobility(&self) -> Option<f64> {
        self.mobility
    }

    /// Relative mismatch between τ and the relaxation time implied by the
    /// mobility, or `None` when no mobility is set.
    pub fn mobility_mismatch(&self) -> Option<f64> {
        let mobility = self.mobility?;
        let implied = relaxation_time_from_mobility(self.chemical_potential_ev, mobility).ok()?;
        Some((implied - self.relaxation_time).abs() / self.relaxation_time)
    }

    pub fn mobility_consistent(&self) -> bool {
        self.mobility_mismatch()
            .is_none_or(|m| m <= MOBILITY_CONSISTENCY_TOLERANCE)
    }
}

/// Which conductivity expression feeds the grid impedance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConductivityModel {
    #[default]
    Drude,
    Kubo,
}

impl ConductivityModel {
    pub fn name(self) -> &'static str {
        match self {
            ConductivityModel::Drude => "drude",
            ConductivityModel::Kubo => "kubo",
        }
    }
}

impl std::str::FromStr for ConductivityModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "drude" => Ok(ConductivityModel::Drude),
            "kubo" => Ok(ConductivityModel::Kubo),
            other => Err(format!(
                "unknown conductivity model `{other}` (expected drude or kubo)"
            )),
        }
    }
}

/// Kubo conductivity split into its two contributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KuboConductivity {
    pub intraband: Complex64,
    pub interband: Complex64,
}

impl KuboConductivity {
    pub fn total(&self) -> Complex64 {
        self.intraband + self.interband
    }
}

/// DC sheet conductance `σ0 = e²µcτ/(πħ²)` in siemens.
pub fn drude_sigma0(sheet: &GrapheneSheet) -> f64 {
    ELECTRON_CHARGE * ELECTRON_CHARGE * sheet.chemical_potential_joule() * sheet.relaxation_time
        / (PI * REDUCED_PLANCK * REDUCED_PLANCK)
}

/// Drude sheet conductivity at frequency `f` (Hz).
pub fn drude_conductivity(sheet: &GrapheneSheet, f: f64) -> Result<Complex64> {
    if !(f >= 0.0) || !f.is_finite() {
        return Err(ModelError::domain(
            "frequency",
            f,
            "must be finite and >= 0",
        ));
    }
    Ok(drude_conductivity_angular(sheet, 2.0 * PI * f))
}

/// Drude conductivity for any real angular frequency, including negative ω.
pub fn drude_conductivity_angular(sheet: &GrapheneSheet, omega: f64) -> Complex64 {
    let denom = Complex64::new(1.0, omega * sheet.relaxation_time);
    Complex64::new(drude_sigma0(sheet), 0.0) / denom
}

/// Full Kubo conductivity (intraband + interband) at frequency `f` (Hz).
///
/// Both logarithms use the principal branch. The interband argument has a
/// strictly positive imaginary part whenever τ is finite, so the branch cut
/// is only reachable in the τ → ∞ limit; that case is reported as an error.
pub fn kubo_conductivity(sheet: &GrapheneSheet, f: f64) -> Result<KuboConductivity> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(ModelError::domain("frequency", f, "must be finite and > 0"));
    }
    let omega = 2.0 * PI * f;
    let e2 = ELECTRON_CHARGE * ELECTRON_CHARGE;
    let kt = BOLTZMANN * sheet.temperature;
    let mu = sheet.chemical_potential_joule();
    let j = Complex64::i();
    let damped = Complex64::new(omega, -1.0 / sheet.relaxation_time);

    let x = mu / kt;
    let bracket = x + 2.0 * (-x).exp().ln_1p();
    let intraband = -j * (e2 * kt / (PI * REDUCED_PLANCK * REDUCED_PLANCK)) / damped * bracket;

    let two_mu = Complex64::new(2.0 * mu.abs(), 0.0);
    let arg = (two_mu - REDUCED_PLANCK * damped) / (two_mu + REDUCED_PLANCK * damped);
    if arg.re < 0.0 && arg.im.abs() <= 1e-12 * arg.norm() {
        return Err(ModelError::BranchCut { frequency: f });
    }
    let interband = -j * (e2 / (4.0 * PI * REDUCED_PLANCK)) * arg.ln();

    Ok(KuboConductivity {
        intraband,
        interband,
    })
}

/// Sheet conductivity under the selected model.
pub fn sheet_conductivity(
    sheet: &GrapheneSheet,
    f: f64,
    model: ConductivityModel,
) -> Result<Complex64> {
    match model {
        ConductivityModel::Drude => drude_conductivity(sheet, f),
        ConductivityModel::Kubo => kubo_conductivity(sheet, f).map(|k| k.total()),
    }
}

/// Relaxation time implied by a mobility: `τ = µc·µg/(e·v_F²)`.
pub fn relaxation_time_from_mobility(chemical_potential_ev: f64, mobility: f64) -> Result<f64> {
    check_positive("chemical_potential", chemical_potential_ev)?;
    check_positive("mobility", mobility)?;
    Ok(ev_to_joule(chemical_potential_ev) * mobility
        / (ELECTRON_CHARGE * FERMI_VELOCITY * FERMI_VELOCITY))
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::domain(name, value, "must be finite and > 0"))
    }
}
