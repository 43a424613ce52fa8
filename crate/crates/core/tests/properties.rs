use ghz_core::dynamics::{ladder_hamiltonian, CurveSample};
use ghz_core::linalg::{max_abs_diff, unitarity_error};
use ghz_core::unitary::exp_map_reference;
use ghz_core::*;
use nalgebra::Vector3;
use proptest::prelude::*;

fn vec3(max: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-max..max).prop_map(|a| Vector3::new(a[0], a[1], a[2]))
}

fn pair() -> impl Strategy<Value = RotationVectorPair> {
    (vec3(4.0), vec3(4.0)).prop_map(|(a, b)| RotationVectorPair::new(a, b))
}

fn rabi() -> impl Strategy<Value = RabiTriple> {
    prop::array::uniform3(-5.0..5.0f64).prop_map(RabiTriple::from_array)
}

proptest! {
    #[test]
    fn exp_map_is_unitary(p in pair()) {
        prop_assert!(unitarity_error(&exp_map(&p, &build_generators())) < 1e-13);
    }

    #[test]
    fn closed_form_matches_eigendecomposition(p in pair()) {
        let g = build_generators();
        prop_assert!(max_abs_diff(&exp_map(&p, &g), &exp_map_reference(&p, &g)) < 1e-10);
    }

    #[test]
    fn m_coefficients_have_unit_norm(v in vec3(10.0)) {
        prop_assert!((m_coefficients(&v).norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn factors_commute_and_compose(a in vec3(4.0), b in vec3(4.0)) {
        let g = build_generators();
        let z = Vec3::zeros();
        let ua = exp_map(&RotationVectorPair::new(a, z), &g);
        let ub = exp_map(&RotationVectorPair::new(z, b), &g);
        let both = exp_map(&RotationVectorPair::new(a, b), &g);
        prop_assert!(max_abs_diff(&(ua * ub), &both) < 1e-13);
        prop_assert!(max_abs_diff(&(ub * ua), &both) < 1e-13);
    }

    #[test]
    fn two_pi_rotation_is_minus_identity(a in vec3(1.0)) {
        prop_assume!(a.norm() > 1e-3);
        let v = a.normalize() * (2.0 * std::f64::consts::PI);
        let g = build_generators();
        let u = exp_map(&RotationVectorPair::new(v, Vec3::zeros()), &g);
        prop_assert!(max_abs_diff(&u, &(-Mat4::identity())) < 1e-13);
    }

    #[test]
    fn rabi_round_trip(t in rabi()) {
        let back = rabi_from_vectorial(&t.to_vectorial()).unwrap();
        for (x, y) in back.as_array().iter().zip(t.as_array().iter()) {
            prop_assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn generator_and_ladder_forms_agree(t in rabi()) {
        let g = build_generators();
        prop_assert!(max_abs_diff(&effective_hamiltonian(&t, &g), &ladder_hamiltonian(&t)) < 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact(rows in prop::collection::vec(prop::array::uniform3(-1e3..1e3f64), 2..40), dt in 1e-6..10.0f64) {
        let samples: Vec<_> = rows.iter().enumerate()
            .map(|(k, r)| ScheduleSample::new(k as f64 * dt, RabiTriple::from_array(*r)))
            .collect();
        let s = PulseSchedule::new(samples).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = PulseSchedule::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.samples, s.samples);
    }

    #[test]
    fn normalized_area_hits_target(rows in prop::collection::vec(prop::array::uniform3(-3.0..3.0f64), 2..20), target in 0.1..50.0f64) {
        let samples: Vec<_> = rows.iter().enumerate()
            .map(|(k, r)| ScheduleSample::new(k as f64 * 0.1, RabiTriple::from_array(*r)))
            .collect();
        let s = PulseSchedule::new(samples).unwrap();
        prop_assume!(squared_area(&s) > 1e-6);
        let n = normalize_to_area(&s, target).unwrap();
        prop_assert!((squared_area(&n) - target).abs() <= 1e-12 * target);
    }

    #[test]
    fn constraints_hold_on_synthesized_curves(row in 0usize..8, t in 0.0..1.0f64, tau in 0.0..0.49f64) {
        let ep = enumerate_endpoints(&SolveOptions::default())[row];
        let profile = ghz_core::synthesis::profile_for(&ep, ProfileKind::Trapezoid, tau, 1.0).unwrap();
        let curve = build_curve(&ep, &profile).unwrap();
        let v = vectorial_rabi(&curve.sample(t));
        prop_assert!(check_constraints(&v, 1e-9).passed);
        let via_map = rabi_from_vectorial(&v).unwrap();
        let direct = curve.rabi_at(t);
        for (x, y) in via_map.as_array().iter().zip(direct.as_array().iter()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn angular_velocity_is_linear_in_rate(v in vec3(3.0), d in vec3(2.0), k in -3.0..3.0f64) {
        let s = CurveSample { t: 0.0, alpha: v, beta: v, alpha_dot: d, beta_dot: d * k };
        let w = vectorial_rabi(&s);
        prop_assert!((w.w_beta - w.w_alpha * k).norm() < 1e-12 * (1.0 + w.w_alpha.norm() * k.abs()));
    }
}
