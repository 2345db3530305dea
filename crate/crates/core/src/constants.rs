//! Physical constants (CODATA 2018) used throughout the models.

/// Elementary charge (C).
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reduced Planck constant (J·s).
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;
/// Vacuum permittivity ε0 (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability µ0 (H/m).
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Fermi velocity of graphene (m/s), used only for the mobility/relaxation-time relation.
pub const FERMI_VELOCITY: f64 = 1.0e6;

/// Free-space wave impedance √(µ0/ε0) in ohms.
pub fn free_space_impedance() -> f64 {
    (VACUUM_PERMEABILITY / VACUUM_PERMITTIVITY).sqrt()
}

/// Bundle of the constants, for callers that want them as a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub electron_charge: f64,
    pub boltzmann: f64,
    pub reduced_planck: f64,
    pub vacuum_permittivity: f64,
    pub vacuum_permeability: f64,
    pub free_space_impedance: f64,
    pub light_speed: f64,
    pub fermi_velocity: f64,
}

impl PhysicalConstants {
    pub fn codata2018() -> Self {
        Self {
            electron_charge: ELECTRON_CHARGE,
            boltzmann: BOLTZMANN,
            reduced_planck: REDUCED_PLANCK,
            vacuum_permittivity: VACUUM_PERMITTIVITY,
            vacuum_permeability: VACUUM_PERMEABILITY,
            free_space_impedance: free_space_impedance(),
            light_speed: SPEED_OF_LIGHT,
            fermi_velocity: FERMI_VELOCITY,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// Converts electronvolts to joules.
#[inline]
pub fn ev_to_joule(ev: f64) -> f64 {
    ev * ELECTRON_CHARGE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_space_impedance_matches_reference() {
        let z0 = free_space_impedance();
        assert!(((z0 - 376.73) / 376.73).abs() < 1e-3, "{z0}");
        assert!((z0 - 376.730_313_668).abs() < 1e-6);
    }

    #[test]
    fn all_positive() {
        let k = PhysicalConstants::codata2018();
        for v in [
            k.electron_charge,
            k.boltzmann,
            k.reduced_planck,
            k.vacuum_permittivity,
            k.vacuum_permeability,
            k.free_space_impedance,
            k.light_speed,
            k.fermi_velocity,
        ] {
            assert!(v > 0.0);
        }
    }

    #[test]
    fn light_speed_consistent_with_vacuum_constants() {
        let c = 1.0 / (VACUUM_PERMEABILITY * VACUUM_PERMITTIVITY).sqrt();
        assert!((c - SPEED_OF_LIGHT).abs() / SPEED_OF_LIGHT < 1e-9);
    }
}
