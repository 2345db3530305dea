//! Equivalent-circuit model of the grounded graphene patch array.
//!
//! The patch grid is a homogenized series R-L-C sheet impedance `Z_g`; the
//! metal-backed substrate is a shorted transmission-line stub `Z_s`. The two
//! sit in parallel at the sheet plane and the combination is compared with
//! the wave impedance of the incident field.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{
    free_space_impedance, SPEED_OF_LIGHT, VACUUM_PERMEABILITY, VACUUM_PERMITTIVITY,
};
use crate::error::{ModelError, Result};
use crate::material::{drude_sigma0, sheet_conductivity, ConductivityModel, GrapheneSheet};

/// `|cos(β_z h)|` below which the shorted stub is treated as an open circuit.
pub const SLAB_OPEN_TOLERANCE: f64 = 1e-9;

/// Square lattice of square patches. The gap is always `period - patch_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchArrayGeometry {
    period: f64,
    patch_width: f64,
    gap: f64,
}

impl PatchArrayGeometry {
    pub fn new(period: f64, patch_width: f64) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(ModelError::domain(
                "period",
                period,
                "must be finite and > 0",
            ));
        }
        if !(patch_width > 0.0) || !(patch_width < period) {
            return Err(ModelError::domain(
                "patch_width",
                patch_width,
                "must satisfy 0 < d < P",
            ));
        }
        Ok(Self {
            period,
            patch_width,
            gap: period - patch_width,
        })
    }

    /// Builds the geometry from period and gap (`d = P - s`).
    pub fn from_gap(period: f64, gap: f64) -> Result<Self> {
        if !(gap > 0.0) {
            return Err(ModelError::domain(
                "gap",
                gap,
                "zero gap makes the capacitance infinite",
            ));
        }
        if !(gap < period) {
            return Err(ModelError::domain(
                "gap",
                gap,
                "gap equal to the period leaves no patch",
            ));
        }
        Self::new(period, period - gap)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn patch_width(&self) -> f64 {
        self.patch_width
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Substrate {
    relative_permittivity: f64,
    thickness: f64,
    loss_tangent: f64,
}

impl Substrate {
    pub fn new(relative_permittivity: f64, thickness: f64) -> Result<Self> {
        Self::lossy(relative_permittivity, thickness, 0.0)
    }

    pub fn lossy(relative_permittivity: f64, thickness: f64, loss_tangent: f64) -> Result<Self> {
        if !(relative_permittivity >= 1.0) || !relative_permittivity.is_finite() {
            return Err(ModelError::domain(
                "eps_r",
                relative_permittivity,
                "must be finite and >= 1",
            ));
        }
        if !(thickness > 0.0) || !thickness.is_finite() {
            return Err(ModelError::domain(
                "thickness",
                thickness,
                "must be finite and > 0",
            ));
        }
        if !(loss_tangent >= 0.0) || !loss_tangent.is_finite() {
            return Err(ModelError::domain(
                "loss_tangent",
                loss_tangent,
                "must be finite and >= 0",
            ));
        }
        Ok(Self {
            relative_permittivity,
            thickness,
            loss_tangent,
        })
    }

    pub fn relative_permittivity(&self) -> f64 {
        self.relative_permittivity
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn loss_tangent(&self) -> f64 {
        self.loss_tangent
    }

    /// `ε_r (1 - j tanδ)` under the `e^{+jωt}` convention.
    pub fn complex_permittivity(&self) -> Complex64 {
        Complex64::new(
            self.relative_permittivity,
            -self.relative_permittivity * self.loss_tangent,
        )
    }
}

/// Metal backplane. Always treated electrically as a perfect short.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundPlane {
    pub perfect_conductor: bool,
    /// Physical thickness in meters (recorded, not modeled).
    pub thickness: f64,
}

impl Default for GroundPlane {
    fn default() -> Self {
        Self {
            perfect_conductor: true,
            thickness: 0.3e-6,
        }
    }
}

/// Complete absorber: graphene patch array on a grounded substrate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stackup {
    pub sheet: GrapheneSheet,
    pub geometry: PatchArrayGeometry,
    pub substrate: Substrate,
    pub ground: GroundPlane,
    #[serde(default)]
    pub model: ConductivityModel,
}

impl Stackup {
    pub fn new(
        sheet: GrapheneSheet,
        geometry: PatchArrayGeometry,
        substrate: Substrate,
        ground: GroundPlane,
    ) -> Result<Self> {
        if !(ground.thickness > 0.0) {
            return Err(ModelError::domain(
                "ground_thickness",
                ground.thickness,
                "must be > 0",
            ));
        }
        Ok(Self {
            sheet,
            geometry,
            substrate,
            ground,
            model: ConductivityModel::Drude,
        })
    }

    pub fn with_model(self, model: ConductivityModel) -> Self {
        Self { model, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Polarization {
    Te,
    Tm,
}

impl Polarization {
    pub fn name(self) -> &'static str {
        match self {
            Polarization::Te => "TE",
            Polarization::Tm => "TM",
        }
    }
}

impl std::str::FromStr for Polarization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "te" => Ok(Polarization::Te),
            "tm" => Ok(Polarization::Tm),
            other => Err(format!(
                "unknown polarization `{other}` (expected te or tm)"
            )),
        }
    }
}

/// Plane wave incident from free space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentWave {
    frequency: f64,
    angle: f64,
    polarization: Polarization,
}

impl IncidentWave {
    pub fn new(frequency: f64, angle: f64, polarization: Polarization) -> Result<Self> {
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(ModelError::domain(
                "frequency",
                frequency,
                "must be finite and > 0",
            ));
        }
        if !(0.0..PI / 2.0).contains(&angle) {
            return Err(ModelError::domain(
                "angle",
                angle,
                "must satisfy 0 <= theta < pi/2",
            ));
        }
        Ok(Self {
            frequency,
            angle,
            polarization,
        })
    }

    pub fn normal(frequency: f64) -> Result<Self> {
        Self::new(frequency, 0.0, Polarization::Te)
    }

    pub fn at_frequency(&self, frequency: f64) -> Result<Self> {
        Self::new(frequency, self.angle, self.polarization)
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * self.frequency
    }

    /// Free-space wave impedance seen by this polarization: `Z0/cosθ` (TE) or `Z0·cosθ` (TM).
    pub fn free_space_wave_impedance(&self) -> f64 {
        let z0 = free_space_impedance();
        match self.polarization {
            Polarization::Te => z0 / self.angle.cos(),
            Polarization::Tm => z0 * self.angle.cos(),
        }
    }
}

/// Lumped series elements of the patch grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlcTriple {
    pub resistance: f64,
    pub inductance: f64,
    pub capacitance: f64,
}

impl RlcTriple {
    /// `R + j(ωL - 1/(ωC))`.
    pub fn impedance(&self, f: f64) -> Complex64 {
        let omega = 2.0 * PI * f;
        Complex64::new(
            self.resistance,
            omega * self.inductance - 1.0 / (omega * self.capacitance),
        )
    }
}

/// Input impedance of the grounded slab; `Open` at the quarter-wave pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlabImpedance {
    Finite(Complex64),
    Open {
        characteristic_impedance: Complex64,
        electrical_length: f64,
    },
}

impl SlabImpedance {
    pub fn is_open(&self) -> bool {
        matches!(self, SlabImpedance::Open { .. })
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            SlabImpedance::Finite(z) => Some(z),
            SlabImpedance::Open { .. } => None,
        }
    }
}

/// Gap capacitance `C_ef = (1/π) ε0 (ε_r + 1) P ln csc(πs/2P)`.
pub fn effective_capacitance(geometry: &PatchArrayGeometry, eps_r: f64) -> Result<f64> {
    if !(eps_r >= 1.0) || !eps_r.is_finite() {
        return Err(ModelError::domain(
            "eps_r",
            eps_r,
            "must be finite and >= 1",
        ));
    }
    let p = geometry.period();
    let s = geometry.gap();
    let ln_csc = -(PI * s / (2.0 * p)).sin().ln();
    if !(ln_csc > 0.0) || !ln_csc.is_finite() {
        return Err(ModelError::domain("gap", s, "degenerate gap capacitance"));
    }
    Ok(VACUUM_PERMITTIVITY * (eps_r + 1.0) * p * ln_csc / PI)
}

/// Grid impedance `P/(d σ) - j/(ω C_ef)` for a given sheet conductivity.
pub fn grid_impedance_from_conductivity(
    geometry: &PatchArrayGeometry,
    eps_r: f64,
    sigma: Complex64,
    f: f64,
) -> Result<Complex64> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(ModelError::domain("frequency", f, "must be finite and > 0"));
    }
    let capacitance = effective_capacitance(geometry, eps_r)?;
    let omega = 2.0 * PI * f;
    let sheet_term = geometry.period() / (geometry.patch_width() * sigma);
    Ok(sheet_term - Complex64::new(0.0, 1.0 / (omega * capacitance)))
}

/// Homogenized patch-array impedance at frequency `f`.
pub fn grid_impedance(stackup: &Stackup, f: f64, model: ConductivityModel) -> Result<Complex64> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(ModelError::domain("frequency", f, "must be finite and > 0"));
    }
    let sigma = sheet_conductivity(&stackup.sheet, f, model)?;
    grid_impedance_from_conductivity(
        &stackup.geometry,
        stackup.substrate.relative_permittivity(),
        sigma,
        f,
    )
}

/// Series R-L-C equivalent of the Drude grid impedance.
pub fn rlc_extract(stackup: &Stackup) -> Result<RlcTriple> {
    let g = &stackup.geometry;
    let resistance = g.period() / (g.patch_width() * drude_sigma0(&stackup.sheet));
    Ok(RlcTriple {
        resistance,
        inductance: stackup.sheet.relaxation_time() * resistance,
        capacitance: effective_capacitance(g, stackup.substrate.relative_permittivity())?,
    })
}

/// Longitudinal wavenumber `β_z = k0 √(ε - sin²θ)` inside a medium.
pub(crate) fn longitudinal_wavenumber(eps: Complex64, wave: &IncidentWave) -> Complex64 {
    let k0 = wave.angular_frequency() / SPEED_OF_LIGHT;
    let sin2 = wave.angle().sin().powi(2);
    k0 * (eps - sin2).sqrt()
}

/// Characteristic impedance of the substrate line for the wave's polarization:
/// `ωµ0/β_z` (TE) or `β_z/(ωε0ε)` (TM). At normal incidence both reduce to
/// `Z0/√ε`, which is evaluated directly so the two polarizations agree bitwise.
pub(crate) fn medium_wave_impedance(
    eps: Complex64,
    kz: Complex64,
    wave: &IncidentWave,
) -> Complex64 {
    if wave.angle() == 0.0 {
        return free_space_impedance() / eps.sqrt();
    }
    let omega = wave.angular_frequency();
    match wave.polarization() {
        Polarization::Te => omega * VACUUM_PERMEABILITY / kz,
        Polarization::Tm => kz / (omega * VACUUM_PERMITTIVITY * eps),
    }
}

/// Input impedance `j Z_c tan(β_z h)` of the metal-backed substrate.
pub fn slab_input_impedance(substrate: &Substrate, wave: &IncidentWave) -> SlabImpedance {
    let eps = substrate.complex_permittivity();
    let kz = longitudinal_wavenumber(eps, wave);
    let zc = medium_wave_impedance(eps, kz, wave);
    let delta = kz * substrate.thickness();
    if delta.im == 0.0 && delta.re.cos().abs() < SLAB_OPEN_TOLERANCE {
        return SlabImpedance::Open {
            characteristic_impedance: zc,
            electrical_length: delta.re,
        };
    }
    SlabImpedance::Finite(Complex64::i() * zc * delta.tan())
}

/// Total impedance at the sheet plane, `1/Z_in = 1/Z_g + 1/Z_s`.
pub fn input_impedance(stackup: &Stackup, wave: &IncidentWave) -> Result<Complex64> {
    let zg = grid_impedance(stackup, wave.frequency(), stackup.model)?;
    Ok(parallel(zg, slab_input_impedance(&stackup.substrate, wave)))
}

/// Parallel combination with the analytic open/short limits.
pub(crate) fn parallel(zg: Complex64, slab: SlabImpedance) -> Complex64 {
    match slab {
        SlabImpedance::Open { .. } => zg,
        SlabImpedance::Finite(zs) if zs == Complex64::new(0.0, 0.0) => zs,
        SlabImpedance::Finite(zs) => zg * zs / (zg + zs),
    }
}

/// `(Z_in - Z_w)/(Z_in + Z_w)` against a reference wave impedance.
pub fn reflection_from_impedance(z_in: Complex64, z_wave: f64) -> Complex64 {
    (z_in - z_wave) / (z_in + z_wave)
}

/// Reflection coefficient S11 for the incident wave.
pub fn reflection_coefficient(stackup: &Stackup, wave: &IncidentWave) -> Result<Complex64> {
    let z_in = input_impedance(stackup, wave)?;
    Ok(reflection_from_impedance(
        z_in,
        wave.free_space_wave_impedance(),
    ))
}

/// `1 - |S11|²`, clamped to [0, 1]. Transmission is zero behind the ground plane.
pub fn absorption_from_reflection(s11: Complex64) -> f64 {
    (1.0 - s11.norm_sqr()).clamp(0.0, 1.0)
}

pub fn absorption(stackup: &Stackup, wave: &IncidentWave) -> Result<f64> {
    reflection_coefficient(stackup, wave).map(absorption_from_reflection)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn crel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    /// The rounded µm geometry quoted for the 2.5 THz design.
    fn rounded_design() -> Stackup {
        Stackup::new(
            GrapheneSheet::new(0.5, 1e-13, 300.0).unwrap(),
            PatchArrayGeometry::new(12e-6, 8.57e-6).unwrap(),
            Substrate::new(11.9, 9.23e-6).unwrap(),
            GroundPlane::default(),
        )
        .unwrap()
    }

    #[test]
    fn geometry_invariants() {
        let g = PatchArrayGeometry::new(12e-6, 8.57e-6).unwrap();
        assert_eq!(g.gap(), g.period() - g.patch_width());
        assert!(PatchArrayGeometry::new(12e-6, 12e-6).is_err());
        assert!(PatchArrayGeometry::new(12e-6, 0.0).is_err());
        assert!(PatchArrayGeometry::new(0.0, 1e-6).is_err());
        assert!(PatchArrayGeometry::from_gap(12e-6, 0.0).is_err());
        assert!(PatchArrayGeometry::from_gap(12e-6, 12e-6).is_err());
    }

    #[test]
    fn substrate_invariants() {
        assert!(Substrate::new(0.5, 1e-6).is_err());
        assert!(Substrate::new(11.9, 0.0).is_err());
        assert!(Substrate::lossy(11.9, 1e-6, -0.1).is_err());
        assert!(Stackup::new(
            GrapheneSheet::new(0.5, 1e-13, 300.0).unwrap(),
            PatchArrayGeometry::new(12e-6, 8.57e-6).unwrap(),
            Substrate::new(11.9, 9.23e-6).unwrap(),
            GroundPlane {
                perfect_conductor: true,
                thickness: 0.0
            },
        )
        .is_err());
    }

    #[test]
    fn capacitance_reference_value() {
        // Hand evaluation: ε0·12.9·12e-6·ln csc(π·3.43/24)/π = 3.6412e-16 F
        let g = PatchArrayGeometry::from_gap(12e-6, 3.43e-6).unwrap();
        let c = effective_capacitance(&g, 11.9).unwrap();
        assert!(rel(c, 3.641_189e-16) < 1e-5, "{c}");
    }

    #[test]
    fn capacitance_linear_in_eps_plus_one_and_grows_as_gap_shrinks() {
        let g = PatchArrayGeometry::from_gap(12e-6, 3.43e-6).unwrap();
        let ratio =
            effective_capacitance(&g, 3.0).unwrap() / effective_capacitance(&g, 1.0).unwrap();
        assert!((ratio - 2.0).abs() < 1e-14);
        let mut prev = 0.0;
        for gap_um in [10.0, 6.0, 3.0, 1.0, 0.1] {
            let c = effective_capacitance(
                &PatchArrayGeometry::from_gap(12e-6, gap_um * 1e-6).unwrap(),
                11.9,
            )
            .unwrap();
            assert!(c > prev);
            prev = c;
        }
        assert!(effective_capacitance(&g, 0.9).is_err());
    }

    #[test]
    fn grid_impedance_reference_value() {
        // R = 12/(8.57·σ0) = 237.9 Ω, ωL = (π/2)·R = 373.7 Ω,
        // 1/(ωC) = 174.9 Ω → Z_g ≈ 237.9 + j198.9 Ω.
        let s = rounded_design();
        let zg = grid_impedance(&s, 2.5e12, ConductivityModel::Drude).unwrap();
        assert!((zg.re - 237.903_83).abs() < 1e-3, "{zg}");
        assert!((zg.im - 198.860_03).abs() < 1e-3, "{zg}");
    }

    #[test]
    fn rlc_reference_values_and_ratio() {
        let rlc = rlc_extract(&rounded_design()).unwrap();
        assert!(rel(rlc.resistance, 237.9) < 2e-3);
        assert!(rel(rlc.inductance, 23.79e-12) < 2e-3);
        assert!(rel(rlc.capacitance, 0.3641e-15) < 1e-3);
        assert_eq!(rlc.inductance / rlc.resistance, 1e-13);
    }

    #[test]
    fn rlc_scales_inversely_with_patch_width() {
        let base = rounded_design();
        let mut half = base;
        half.geometry = PatchArrayGeometry::new(12e-6, 8.57e-6 / 2.0).unwrap();
        let a = rlc_extract(&base).unwrap();
        let b = rlc_extract(&half).unwrap();
        assert!(rel(b.resistance, 2.0 * a.resistance) < 1e-14);
        assert!(rel(b.inductance, 2.0 * a.inductance) < 1e-14);
    }

    #[test]
    fn grid_impedance_forms_agree() {
        let s = rounded_design();
        let rlc = rlc_extract(&s).unwrap();
        for i in 1..=50 {
            let f = i as f64 * 0.1e12;
            let closed = grid_impedance(&s, f, ConductivityModel::Drude).unwrap();
            assert!(crel(closed, rlc.impedance(f)) < 1e-12);
        }
    }

    #[test]
    fn real_conductivity_leaves_pure_capacitive_reactance() {
        let s = rounded_design();
        let f = 1.3e12;
        let zg = grid_impedance_from_conductivity(&s.geometry, 11.9, Complex64::new(5e-3, 0.0), f)
            .unwrap();
        let c = effective_capacitance(&s.geometry, 11.9).unwrap();
        assert_eq!(zg.im, -1.0 / (2.0 * PI * f * c));
    }

    #[test]
    fn slab_reference_value() {
        // β h = 2π·2.5e12·√11.9·9.23e-6/c = 1.6683 rad, Zc = 109.21 Ω → Z_s ≈ -j1116.49 Ω
        let sub = Substrate::new(11.9, 9.23e-6).unwrap();
        let zs = slab_input_impedance(&sub, &IncidentWave::normal(2.5e12).unwrap())
            .finite()
            .unwrap();
        assert!(zs.re.abs() < 1e-9);
        assert!((zs.im - (-1116.4859)).abs() < 1e-3, "{zs}");
    }

    #[test]
    fn slab_thin_limit_is_short() {
        let sub = Substrate::new(11.9, 1e-15).unwrap();
        let zs = slab_input_impedance(&sub, &IncidentWave::normal(2.5e12).unwrap())
            .finite()
            .unwrap();
        assert!(zs.norm() < 1e-6);
    }

    #[test]
    fn slab_polarizations_degenerate_at_normal_incidence() {
        let sub = Substrate::new(11.9, 9.23e-6).unwrap();
        for i in 1..40 {
            let f = i as f64 * 0.1e12;
            let te =
                slab_input_impedance(&sub, &IncidentWave::new(f, 0.0, Polarization::Te).unwrap());
            let tm =
                slab_input_impedance(&sub, &IncidentWave::new(f, 0.0, Polarization::Tm).unwrap());
            let (te, tm) = (te.finite().unwrap(), tm.finite().unwrap());
            assert_eq!(te, tm);
        }
    }

    #[test]
    fn quarter_wave_slab_reports_open_branch() {
        let f = 2.5e12;
        let h = SPEED_OF_LIGHT / (4.0 * f * 11.9f64.sqrt());
        let sub = Substrate::new(11.9, h).unwrap();
        let wave = IncidentWave::normal(f).unwrap();
        assert!(slab_input_impedance(&sub, &wave).is_open());

        let mut s = rounded_design();
        s.substrate = sub;
        let zg = grid_impedance(&s, f, ConductivityModel::Drude).unwrap();
        assert_eq!(input_impedance(&s, &wave).unwrap(), zg);
    }

    #[test]
    fn shorted_slab_shorts_the_input() {
        let zg = Complex64::new(200.0, 100.0);
        assert_eq!(
            parallel(zg, SlabImpedance::Finite(Complex64::new(0.0, 0.0))),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            reflection_from_impedance(Complex64::new(0.0, 0.0), free_space_impedance()),
            Complex64::new(-1.0, 0.0)
        );
    }

    #[test]
    fn matched_input_gives_zero_reflection() {
        let z0 = free_space_impedance();
        assert_eq!(
            reflection_from_impedance(Complex64::new(z0, 0.0), z0).norm(),
            0.0
        );
        assert_eq!(absorption_from_reflection(Complex64::new(0.0, 0.0)), 1.0);
        assert_eq!(absorption_from_reflection(Complex64::new(-1.0, 0.0)), 0.0);
    }

    #[test]
    fn minus_44_db_reflection_level() {
        let mag = 10f64.powf(-44.0 / 20.0);
        assert!((mag - 0.0063).abs() < 1e-4);
        let a = absorption_from_reflection(Complex64::new(mag, 0.0));
        assert!((a - 0.99996).abs() < 1e-5, "{a}");
    }

    #[test]
    fn default_input_impedance_near_free_space() {
        let s = rounded_design();
        let z = input_impedance(&s, &IncidentWave::normal(2.5e12).unwrap()).unwrap();
        assert!(z.re > 250.0 && z.re < 400.0, "{z}");
    }

    #[test]
    fn oblique_wave_impedances() {
        let th = 0.6;
        let z0 = free_space_impedance();
        let te = IncidentWave::new(1e12, th, Polarization::Te).unwrap();
        let tm = IncidentWave::new(1e12, th, Polarization::Tm).unwrap();
        assert!(rel(te.free_space_wave_impedance(), z0 / th.cos()) < 1e-15);
        assert!(rel(tm.free_space_wave_impedance(), z0 * th.cos()) < 1e-15);
        assert!(IncidentWave::new(1e12, PI / 2.0, Polarization::Te).is_err());
        assert!(IncidentWave::new(0.0, 0.0, Polarization::Te).is_err());
    }

    #[test]
    fn lossy_substrate_stays_passive() {
        let mut s = rounded_design();
        s.substrate = Substrate::lossy(11.9, 9.23e-6, 0.05).unwrap();
        for i in 1..50 {
            let wave = IncidentWave::new(i as f64 * 0.1e12, 0.4, Polarization::Tm).unwrap();
            let r = reflection_coefficient(&s, &wave).unwrap();
            assert!(r.norm() <= 1.0);
        }
    }
}
