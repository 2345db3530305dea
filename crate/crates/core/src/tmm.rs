//! One-dimensional transfer-matrix solver for planar stacks terminated by a
//! perfect conductor, used to cross-check the circuit model.
//!
//! Fields are tracked as tangential `(E, H)` pairs. Each layer maps the pair
//! at its bottom face to the pair at its top face; the stack is cascaded from
//! the incidence side down to the conductor, where `E = 0`. Reflection is
//! read off by splitting the top-face field into forward and backward waves in
//! free space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{grid_impedance, IncidentWave, Polarization, Stackup};
use crate::constants::{SPEED_OF_LIGHT, VACUUM_PERMEABILITY, VACUUM_PERMITTIVITY};
use crate::error::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layer {
    /// Zero-thickness conductive sheet with surface impedance in ohms.
    Sheet {
        impedance: Complex64,
    },
    /// Homogeneous dielectric with complex relative permittivity.
    Dielectric {
        eps_r: Complex64,
        thickness: f64,
    },
    PecTermination,
}

/// Layers listed from the incidence side; the last entry must be the conductor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    layers: Vec<Layer>,
}

type Mat2 = [[Complex64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn determinant(m: &Mat2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

impl LayerStack {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        let pec_count = layers
            .iter()
            .filter(|l| matches!(l, Layer::PecTermination))
            .count();
        if pec_count != 1 || !matches!(layers.last(), Some(Layer::PecTermination)) {
            return Err(ModelError::InvalidStack(
                "exactly one conductor termination is required and it must be last",
            ));
        }
        for layer in &layers {
            match *layer {
                Layer::Dielectric { eps_r, thickness } => {
                    if !(thickness > 0.0) || !thickness.is_finite() {
                        return Err(ModelError::InvalidStack(
                            "dielectric thickness must be positive",
                        ));
                    }
                    if !(eps_r.re > 0.0) || eps_r.im > 0.0 {
                        return Err(ModelError::InvalidStack(
                            "dielectric permittivity must be passive",
                        ));
                    }
                }
                Layer::Sheet { impedance } => {
                    if impedance.norm() == 0.0
                        || !impedance.re.is_finite()
                        || !impedance.im.is_finite()
                    {
                        return Err(ModelError::InvalidStack(
                            "sheet impedance must be finite and nonzero",
                        ));
                    }
                }
                Layer::PecTermination => {}
            }
        }
        Ok(Self { layers })
    }

    /// Bare conductor: a perfect mirror.
    pub fn mirror() -> Self {
        Self {
            layers: vec![Layer::PecTermination],
        }
    }

    /// The absorber as air / sheet(Z_g) / substrate / conductor at frequency `f`,
    /// sharing the homogenized grid impedance with the circuit model.
    pub fn from_stackup(stackup: &Stackup, f: f64) -> Result<Self> {
        let zg = grid_impedance(stackup, f, stackup.model)?;
        Self::new(vec![
            Layer::Sheet { impedance: zg },
            Layer::Dielectric {
                eps_r: stackup.substrate.complex_permittivity(),
                thickness: stackup.substrate.thickness(),
            },
            Layer::PecTermination,
        ])
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }
}

/// Transverse wave admittance in a medium: `β_z/(ωµ0)` (TE) or `ωε0ε/β_z` (TM).
fn wave_admittance(eps: Complex64, wave: &IncidentWave) -> Result<(Complex64, Complex64)> {
    let omega = wave.angular_frequency();
    let k0 = omega / SPEED_OF_LIGHT;
    let sin2 = wave.angle().sin().powi(2);
    let radicand = eps - sin2;
    if radicand.re <= 0.0 {
        return Err(ModelError::Evanescent {
            eps_r: eps.re,
            angle: wave.angle(),
        });
    }
    let kz = k0 * radicand.sqrt();
    let admittance = match wave.polarization() {
        Polarization::Te => kz / (omega * VACUUM_PERMEABILITY),
        Polarization::Tm => omega * VACUUM_PERMITTIVITY * eps / kz,
    };
    Ok((kz, admittance))
}

/// Matrix mapping `(E, H)` at the bottom face of a layer to its top face.
/// The conductor has no matrix.
pub fn layer_matrix(layer: &Layer, wave: &IncidentWave) -> Result<Option<Mat2>> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match *layer {
        // Tangential E continuous; tangential H jumps by the sheet current.
        Layer::Sheet { impedance } => Ok(Some([[one, zero], [one / impedance, one]])),
        Layer::Dielectric { eps_r, thickness } => {
            let (kz, y) = wave_admittance(eps_r, wave)?;
            let phase = kz * thickness;
            let (c, s) = (phase.cos(), phase.sin());
            let j = Complex64::i();
            Ok(Some([[c, j * s / y], [j * s * y, c]]))
        }
        Layer::PecTermination => Ok(None),
    }
}

/// Reflection coefficient of the stack for a wave incident from free space.
pub fn tmm_reflection(stack: &LayerStack, wave: &IncidentWave) -> Result<Complex64> {
    let (_, y_air) = wave_admittance(Complex64::new(1.0, 0.0), wave)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut total: Mat2 = [[one, zero], [zero, one]];
    for layer in stack.layers() {
        if let Some(m) = layer_matrix(layer, wave)? {
            total = mat_mul(&total, &m);
        }
    }
    // Conductor face: E = 0, H = 1.
    let e_top = total[0][1];
    let h_top = total[1][1];
    // E = a + b, H = y (a - b)
    let forward = (e_top + h_top / y_air) * 0.5;
    let backward = (e_top - h_top / y_air) * 0.5;
    Ok(backward / forward)
}

pub fn tmm_absorption(stack: &LayerStack, wave: &IncidentWave) -> Result<f64> {
    let r = tmm_reflection(stack, wave)?;
    Ok((1.0 - r.norm_sqr()).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::free_space_impedance;
    use std::f64::consts::PI;

    #[test]
    fn mirror_reflects_with_phase_pi() {
        let r =
            tmm_reflection(&LayerStack::mirror(), &IncidentWave::normal(1e12).unwrap()).unwrap();
        assert!((r.norm() - 1.0).abs() < 1e-15);
        assert!((r.arg().abs() - PI).abs() < 1e-15);
        assert_eq!(
            tmm_absorption(&LayerStack::mirror(), &IncidentWave::normal(1e12).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn salisbury_screen_absorbs_fully_at_quarter_wave() {
        let f = 1e12;
        let stack = LayerStack::new(vec![
            Layer::Sheet {
                impedance: Complex64::new(free_space_impedance(), 0.0),
            },
            Layer::Dielectric {
                eps_r: Complex64::new(1.0, 0.0),
                thickness: SPEED_OF_LIGHT / (4.0 * f),
            },
            Layer::PecTermination,
        ])
        .unwrap();
        let wave = IncidentWave::normal(f).unwrap();
        assert!(tmm_reflection(&stack, &wave).unwrap().norm() < 1e-12);
        assert!((tmm_absorption(&stack, &wave).unwrap() - 1.0).abs() < 1e-12);
        // off resonance it reflects
        let off = IncidentWave::normal(1.5 * f).unwrap();
        assert!(tmm_absorption(&stack, &off).unwrap() < 0.99);
    }

    #[test]
    fn stack_validation() {
        assert!(LayerStack::new(vec![]).is_err());
        assert!(LayerStack::new(vec![Layer::PecTermination, Layer::PecTermination]).is_err());
        assert!(LayerStack::new(vec![
            Layer::PecTermination,
            Layer::Dielectric {
                eps_r: Complex64::new(2.0, 0.0),
                thickness: 1e-6
            }
        ])
        .is_err());
        assert!(LayerStack::new(vec![
            Layer::Dielectric {
                eps_r: Complex64::new(2.0, 0.0),
                thickness: 0.0
            },
            Layer::PecTermination
        ])
        .is_err());
        assert!(LayerStack::new(vec![
            Layer::Sheet {
                impedance: Complex64::new(0.0, 0.0)
            },
            Layer::PecTermination
        ])
        .is_err());
    }

    #[test]
    fn propagation_matrices_are_unimodular() {
        for pol in [Polarization::Te, Polarization::Tm] {
            for &angle in &[0.0, 0.5, 1.2] {
                let wave = IncidentWave::new(2.3e12, angle, pol).unwrap();
                let layer = Layer::Dielectric {
                    eps_r: Complex64::new(11.9, 0.0),
                    thickness: 9.23e-6,
                };
                let m = layer_matrix(&layer, &wave).unwrap().unwrap();
                assert!((determinant(&m) - 1.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn lossy_dielectric_is_passive() {
        let stack = LayerStack::new(vec![
            Layer::Dielectric {
                eps_r: Complex64::new(4.0, -0.4),
                thickness: 30e-6,
            },
            Layer::PecTermination,
        ])
        .unwrap();
        for i in 1..30 {
            let wave = IncidentWave::new(i as f64 * 0.2e12, 0.3, Polarization::Tm).unwrap();
            let a = tmm_absorption(&stack, &wave).unwrap();
            assert!(a > 0.0 && a <= 1.0);
        }
    }
}
