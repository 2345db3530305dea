use msf_core::circuit::{absorption_from_reflection, grid_impedance};
use msf_core::material::drude_conductivity_angular;
use msf_core::spectrum::{
    bandwidth, find_peak, frequency_sweep, FrequencyGrid, SweepOptions, WaveTemplate,
};
use msf_core::*;
use proptest::prelude::*;

fn stackup_strategy() -> impl Strategy<Value = Stackup> {
    (
        0.1f64..1.0,   // µc, eV
        0.02f64..1.0,  // τ, ps
        4.0f64..400.0, // T, K
        5.0f64..40.0,  // P, µm
        0.05f64..0.95, // d/P
        1.0f64..16.0,  // ε_r
        1.0f64..40.0,  // h, µm
    )
        .prop_map(|(mu, tau_ps, t, p_um, fill, eps, h_um)| {
            Stackup::new(
                GrapheneSheet::new(mu, tau_ps * 1e-12, t).unwrap(),
                PatchArrayGeometry::new(p_um * 1e-6, fill * p_um * 1e-6).unwrap(),
                Substrate::new(eps, h_um * 1e-6).unwrap(),
                GroundPlane::default(),
            )
            .unwrap()
        })
}

fn wave_strategy() -> impl Strategy<Value = IncidentWave> {
    (0.5f64..5.0, 0.0f64..60.0, prop::bool::ANY).prop_map(|(f_thz, deg, te)| {
        let pol = if te {
            Polarization::Te
        } else {
            Polarization::Tm
        };
        IncidentWave::new(f_thz * 1e12, deg.to_radians(), pol).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn passivity_and_energy_balance(stack in stackup_strategy(), wave in wave_strategy(), kubo in prop::bool::ANY) {
        let model = if kubo { ConductivityModel::Kubo } else { ConductivityModel::Drude };
        let stack = stack.with_model(model);
        let s11 = reflection_coefficient(&stack, &wave).unwrap();
        let a = absorption(&stack, &wave).unwrap();
        prop_assert!(s11.norm() <= 1.0 + 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a + s11.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert_eq!(a, absorption_from_reflection(s11));
    }

    #[test]
    fn rlc_matches_closed_form_grid_impedance(stack in stackup_strategy(), f_thz in 0.1f64..10.0) {
        let f = f_thz * 1e12;
        let rlc = rlc_extract(&stack).unwrap();
        let closed = grid_impedance(&stack, f, ConductivityModel::Drude).unwrap();
        let series = rlc.impedance(f);
        prop_assert!((closed - series).norm() / closed.norm() < 1e-12);
        let tau = stack.sheet.relaxation_time();
        prop_assert!((rlc.inductance / rlc.resistance - tau).abs() <= f64::EPSILON * tau);
        prop_assert!(rlc.resistance > 0.0 && rlc.inductance > 0.0 && rlc.capacitance > 0.0);
    }

    #[test]
    fn circuit_matches_transfer_matrix(stack in stackup_strategy(), wave in wave_strategy()) {
        let circuit = reflection_coefficient(&stack, &wave).unwrap();
        let oracle = tmm_reflection(&LayerStack::from_stackup(&stack, wave.frequency()).unwrap(), &wave).unwrap();
        prop_assert!((circuit - oracle).norm() < 1e-10, "{} vs {}", circuit, oracle);
    }

    #[test]
    fn conductivity_is_passive(mu in 0.1f64..1.0, f_thz in 0.1f64..10.0) {
        let sheet = GrapheneSheet::new(mu, 1e-13, 300.0).unwrap();
        prop_assert!(drude_conductivity(&sheet, f_thz * 1e12).unwrap().re > 0.0);
        prop_assert!(kubo_conductivity(&sheet, f_thz * 1e12).unwrap().total().re > 0.0);
    }

    #[test]
    fn drude_and_kubo_agree_for_degenerate_doping(mu in 0.3f64..1.0, f_thz in 0.1f64..5.0) {
        let sheet = GrapheneSheet::new(mu, 1e-13, 300.0).unwrap();
        let drude = drude_conductivity(&sheet, f_thz * 1e12).unwrap();
        let kubo = kubo_conductivity(&sheet, f_thz * 1e12).unwrap().total();
        prop_assert!((kubo - drude).norm() / drude.norm() < 0.02);
    }

    #[test]
    fn drude_time_response_is_real(mu in 0.1f64..1.0, omega in 1e10f64..1e14) {
        let sheet = GrapheneSheet::new(mu, 1e-13, 300.0).unwrap();
        prop_assert_eq!(drude_conductivity_angular(&sheet, -omega), drude_conductivity_angular(&sheet, omega).conj());
    }

    #[test]
    fn sigma0_bilinear(mu in 0.05f64..1.0, tau_ps in 0.01f64..1.0, k in 0.1f64..10.0) {
        let base = drude_sigma0(&GrapheneSheet::new(mu, tau_ps * 1e-12, 300.0).unwrap());
        let scaled_mu = drude_sigma0(&GrapheneSheet::new(k * mu, tau_ps * 1e-12, 300.0).unwrap());
        let scaled_tau = drude_sigma0(&GrapheneSheet::new(mu, k * tau_ps * 1e-12, 300.0).unwrap());
        prop_assert!((scaled_mu - k * base).abs() / (k * base) < 1e-14);
        prop_assert!((scaled_tau - k * base).abs() / (k * base) < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bandwidth_shrinks_as_threshold_rises(mu in 0.3f64..0.8, t1 in 0.3f64..0.85, dt in 0.0f64..0.1) {
        let stack = default_stackup();
        let stack = msf_core::ParameterKind::ChemicalPotential.apply(&stack, mu).unwrap();
        let s = frequency_sweep(&stack, &WaveTemplate::normal(), &FrequencyGrid::default(), SweepOptions::default()).unwrap();
        let t2 = t1 + dt;
        match (bandwidth(&s, t1), bandwidth(&s, t2)) {
            (Ok(wide), Ok(narrow)) => prop_assert!(wide.f_lo <= narrow.f_lo && narrow.f_hi <= wide.f_hi),
            (Ok(_), Err(_)) | (Err(_), Err(_)) => {}
            (Err(e), Ok(_)) => prop_assert!(false, "lower threshold failed: {e}"),
        }
    }

    #[test]
    fn refined_peak_within_one_cell(mu in 0.3f64..0.8, n in 31usize..400) {
        let stack = msf_core::ParameterKind::ChemicalPotential.apply(&default_stackup(), mu).unwrap();
        let grid = FrequencyGrid::new(1e12, 4e12, n).unwrap();
        let s = frequency_sweep(&stack, &WaveTemplate::normal(), &grid, SweepOptions::default()).unwrap();
        let peak = find_peak(&s).unwrap();
        let grid_peak = s.points()[peak.grid_index];
        prop_assert!((peak.frequency - grid_peak.frequency).abs() <= grid.step() * (1.0 + 1e-12));
        prop_assert!(peak.absorption >= grid_peak.absorption);
    }
}

#[test]
fn peak_frequency_increases_with_chemical_potential() {
    let mus: Vec<f64> = (0..=25).map(|i| 0.3 + 0.02 * i as f64).collect();
    let map = reconfiguration_map(
        &default_stackup(),
        &FrequencyGrid::default(),
        &mus,
        SweepOptions::default(),
    )
    .unwrap();
    assert!(map.is_monotone(), "{:?}", map.anomalies);
}
