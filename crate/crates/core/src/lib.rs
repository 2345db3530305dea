//! Analytical model of a graphene patch-array terahertz absorber on a
//! grounded dielectric slab.
//!
//! - [`material`]: graphene sheet conductivity (Kubo and Drude).
//! - [`circuit`]: homogenized grid impedance, grounded-slab line, S11 and absorption.
//! - [`tmm`]: transfer-matrix cross-check of the circuit result.
//! - [`spectrum`]: frequency/angle/chemical-potential sweeps, peaks, bandwidth.
//! - [`design`]: geometry synthesis, chemical-potential solve, impedance matching.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod constants;
pub mod design;
pub mod error;
pub mod material;
pub mod optimize;
pub mod spectrum;
pub mod tmm;

pub use circuit::{
    absorption, effective_capacitance, grid_impedance, input_impedance, reflection_coefficient,
    rlc_extract, slab_input_impedance, GroundPlane, IncidentWave, PatchArrayGeometry, Polarization,
    RlcTriple, SlabImpedance, Stackup, Substrate,
};
pub use design::{
    default_stackup, match_impedance, solve_chemical_potential, synthesize_geometry, DesignError,
    DesignSolution, DesignTarget, FreeParameter, MatchOptions, ParameterKind, SolverOptions,
};
pub use error::ModelError;
pub use material::{
    drude_conductivity, drude_sigma0, kubo_conductivity, relaxation_time_from_mobility,
    ConductivityModel, GrapheneSheet, KuboConductivity,
};
pub use spectrum::{
    angle_map, bandwidth, find_peak, frequency_sweep, reconfiguration_map, Bandwidth,
    FrequencyGrid, Peak, ReconfigurationMap, Spectrum, SpectrumError, SweepOptions, WaveTemplate,
};
pub use tmm::{tmm_absorption, tmm_reflection, Layer, LayerStack};
