use super::*;
use crate::cr::bases;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_small(label: &str, value: f64, tol: f64) {
    assert!(value.abs() < tol, "{label}: |{value:.3e}| >= {tol:.1e}");
}

fn sample_phi(rng: &mut impl rand::Rng) -> f64 {
    rng.gen_range(-std::f64::consts::FRAC_PI_2 + 0.08..std::f64::consts::FRAC_PI_2 - 0.08)
}

fn sample_point(rng: &mut impl rand::Rng, dim: usize, spread: f64) -> Vec<f64> {
    let mut pt: Vec<f64> = (0..dim).map(|_| rng.gen_range(-spread..spread)).collect();
    pt[0] = sample_phi(rng).clamp(-1.2, 1.2);
    pt
}

#[test]
fn profile_coefficients_match_recurrence() {
    let a2 = aj_coefficients(2).unwrap();
    assert_eq!(a2, vec![1.0, 2.0, 8.0]);
    let a3 = aj_coefficients(3).unwrap();
    for (got, want) in a3.iter().zip([1.0, 8.0 / 5.0, 16.0 / 5.0, 64.0 / 5.0]) {
        assert_small("m=3 coefficient", got - want, 1e-14);
    }
    // Σ a_j − 2 a_m = −(2m+1) pins the endpoint value of the profile.
    for m in 1..=6 {
        let a = aj_coefficients(m).unwrap();
        let sum: f64 = a.iter().sum();
        assert_small("endpoint identity", sum - 2.0 * a[m] + (2 * m + 1) as f64, 1e-10);
    }
    assert!(matches!(aj_coefficients(0), Err(Error::Argument(_))));
}

#[test]
fn profile_endpoint_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    use rand::Rng as _;
    for m in 2..=4 {
        for _ in 0..5 {
            let params = EinsteinParams::new(
                m,
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            )
            .unwrap();
            let at0 = lambda0(&params, 0.0).unwrap().value();
            assert_small("value at zero", at0 - (params.ulambda - params.lambda), 1e-12);
            for sign in [-1.0, 1.0] {
                let near = lambda0(&params, sign * (std::f64::consts::FRAC_PI_2 - 1e-3))
                    .unwrap()
                    .value();
                assert_small(
                    "endpoint value",
                    near - params.lambda / (2.0 * m as f64 + 1.0),
                    1e-6,
                );
            }
        }
    }
    // Fefferman-type parameters give the constant profile.
    let params = EinsteinParams::new(2, 5.0 / 6.0 * 1.2, 1.2, 0.0).unwrap();
    assert!(params.is_fefferman());
    for phi in [-1.3, -0.4, 0.0, 0.7, 1.5] {
        let j = lambda0(&params, phi).unwrap();
        assert_small("constant value", j.value() - 1.2 / 6.0, 1e-12);
        assert_small("constant derivative", j.derivative(0).max_modulus(), 1e-12);
    }
    // All-zero parameters give the zero profile.
    let zero = EinsteinParams::new(3, 0.0, 0.0, 0.0).unwrap();
    assert_small("zero profile", lambda0(&zero, 0.9).unwrap().max_modulus(), 0.0_f64.max(1e-300));
}

#[test]
fn profile_satisfies_all_odes() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    use rand::Rng as _;
    for m in [2usize, 3, 4] {
        for _ in 0..3 {
            let params = EinsteinParams::new(
                m,
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            )
            .unwrap();
            let mut worst = 0.0f64;
            let mut worst_b = 0.0f64;
            for _ in 0..100 {
                let phi = sample_phi(&mut rng);
                let res = lambda0_ode_residuals(&params, phi).unwrap();
                worst = worst
                    .max(res.scalar_ode)
                    .max(res.mixed_ode)
                    .max(res.first_order)
                    .max(res.alternate_ode);
                worst_b = worst_b.max(res.b_coefficient);
            }
            assert_small("ODE residual", worst, 1e-10);
            assert_small("coefficient relation", worst_b, 1e-12);
        }
    }
    let zero = EinsteinParams::new(2, 0.0, 0.0, 0.0).unwrap();
    let res = lambda0_ode_residuals(&zero, 0.45).unwrap();
    assert_eq!(res.scalar_ode, 0.0);
    assert_eq!(res.mixed_ode, 0.0);
    assert_eq!(res.first_order, 0.0);
    assert_eq!(res.alternate_ode, 0.0);
}

#[test]
fn rejects_low_rank_and_mismatched_base() {
    assert!(matches!(EinsteinParams::new(1, 1.0, 0.0, 0.0), Err(Error::Argument(_))));
    let base = bases::heisenberg(2).unwrap();
    let params = EinsteinParams::new(2, 1.0, 0.5, 0.0).unwrap();
    let err = assemble_einstein(&base, &params).unwrap_err();
    match err {
        Error::Argument(msg) => {
            assert!(msg.contains("0.5"), "message should name both constants: {msg}");
        }
        other => panic!("expected argument error, got {other:?}"),
    }
    let params3 = EinsteinParams::new(3, 1.0, 0.0, 0.0).unwrap();
    assert!(matches!(assemble_einstein(&base, &params3), Err(Error::Argument(_))));
}

#[test]
fn frame_metric_pattern_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let base = bases::heisenberg(2).unwrap();
    let lam = GeneralLambda::random(2, &mut rng, 0.4);
    let model = assemble_general(&base, lam).unwrap();
    for _ in 0..6 {
        let pt = sample_point(&mut rng, 6, 0.5);
        assert_small("frame pattern", frame_pattern_residual(&model, &pt).unwrap(), 1e-10);
    }
    let fs = bases::fs_lift(2).unwrap();
    let model = assemble_general(&fs, GeneralLambda::flat(2)).unwrap();
    for _ in 0..4 {
        let pt = sample_point(&mut rng, 6, 0.3);
        assert_small("frame pattern (lifted base)", frame_pattern_residual(&model, &pt).unwrap(), 1e-10);
    }
}

#[test]
fn ricci_flat_model_over_flat_base() {
    let base = bases::heisenberg(2).unwrap();
    let params = EinsteinParams::new(2, 0.0, 0.0, 0.0).unwrap();
    let model = assemble_einstein(&base, &params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..5 {
        let pt = sample_point(&mut rng, 6, 0.6);
        assert_small("Ricci-flat residual", einstein_residual(&model, &pt).unwrap(), 1e-7);
    }
}

#[test]
fn einstein_model_generic_parameters() {
    let base = bases::heisenberg(2).unwrap();
    let params = EinsteinParams::new(2, 1.0, 0.0, 0.3).unwrap();
    let model = assemble_einstein(&base, &params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for _ in 0..5 {
        let pt = sample_point(&mut rng, 6, 0.6);
        assert_small("Einstein residual", einstein_residual(&model, &pt).unwrap(), 1e-7);
        let steps = step_residuals(&model, &pt).unwrap();
        assert_small("step residual", steps.max(), 1e-7);
        assert_small("radiation component", steps.radiation_phi, 1e-8);
    }
}

#[test]
fn einstein_model_over_lifted_base() {
    let base = bases::fs_lift(2).unwrap();
    let params = EinsteinParams::new(2, -0.7, 3.0, 0.5).unwrap();
    let model = assemble_einstein(&base, &params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    for _ in 0..4 {
        let pt = sample_point(&mut rng, 6, 0.35);
        assert_small("Einstein residual", einstein_residual(&model, &pt).unwrap(), 1e-7);
        let steps = step_residuals(&model, &pt).unwrap();
        assert_small("step residual", steps.max(), 1e-7);
    }
}

#[test]
fn einstein_profile_matches_field_jets() {
    let params = EinsteinParams::new(2, 0.8, 0.0, -0.4).unwrap();
    let lam = GeneralLambda::from_einstein(&params);
    let pt = [0.37, 0.1, -0.2, 0.05, 0.3, -0.1];
    let field_jet = lam.lambda0_jet(&pt).unwrap();
    let axis_jet = lambda0(&params, 0.37).unwrap();
    assert_small("value", field_jet.value() - axis_jet.value(), 1e-13);
    assert_small("phi derivative", field_jet.grad(0) - axis_jet.grad(0), 1e-13);
    for i in 1..6 {
        assert_small("base derivative", field_jet.grad(i), 1e-14);
    }
    for al in 1..=2 {
        assert_small(
            "screen component",
            lam.alpha_jet(al, &pt).unwrap().max_modulus(),
            1e-300_f64.max(0.0) + 1e-30,
        );
    }
}

// ----- connection-coefficient and curvature-oracle tests -----

#[test]
fn bce_vanish_for_trivial_lambda() {
    let base = bases::heisenberg(2).unwrap();
    let lam = GeneralLambda::flat(2);
    let pt = [0.3, 0.1, -0.2, 0.05, 0.12, -0.07];
    let bce = bce_coefficients(&base, &lam, &pt).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            assert_small("B hol-hol", bce.b_hol_hol[a][b].norm(), 1e-12);
            assert_small("B mixed", bce.b_mixed[a][b].norm(), 1e-12);
        }
        assert_small("C", bce.c_hol[a].norm(), 1e-12);
        assert_small("E", bce.e_hol[a].norm(), 1e-12);
    }
    assert_small("E contact", bce.e_contact.norm(), 1e-12);
    assert_small("exterior cross-check", bce.exterior_residual, 1e-10);
}

#[test]
fn bce_einstein_profile_structure() {
    let base = bases::heisenberg(2).unwrap();
    let params = EinsteinParams::new(2, 0.7, 0.0, 0.4).unwrap();
    let lam = GeneralLambda::from_einstein(&params);
    let pt = [0.41, 0.2, -0.1, 0.3, -0.25, 0.15];
    let bce = bce_coefficients(&base, &lam, &pt).unwrap();
    let l0 = lambda0(&params, pt[0]).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            assert_small("B hol-hol", bce.b_hol_hol[a][b].norm(), 1e-12);
            let expect = if a == b {
                Complex64::new(0.0, -0.5 * l0.value())
            } else {
                Complex64::new(0.0, 0.0)
            };
            assert_small("B mixed", (bce.b_mixed[a][b] - expect).norm(), 1e-12);
        }
        assert_small("C", bce.c_hol[a].norm(), 1e-12);
        assert_small("E screen", bce.e_hol[a].norm(), 1e-12);
    }
    assert_small(
        "E contact",
        (bce.e_contact - Complex64::new(0.5 * l0.grad(0), 0.0)).norm(),
        1e-12,
    );
    assert_small("exterior cross-check", bce.exterior_residual, 1e-8);
}

#[test]
fn bce_exterior_match_random_lambda() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for base in [bases::heisenberg(2).unwrap(), bases::fs_lift(2).unwrap()] {
        for _ in 0..2 {
            let lam = GeneralLambda::random(2, &mut rng, 0.5);
            let pt = sample_point(&mut rng, 6, 0.3);
            let bce = bce_coefficients(&base, &lam, &pt).unwrap();
            assert_small("exterior cross-check", bce.exterior_residual, 1e-8);
            assert_small("mixed symmetry", bce.hermitian_residual, 1e-8);
        }
    }
}

#[test]
fn curvature_identities_trivial_lambda() {
    let base = bases::heisenberg(2).unwrap();
    let lam = GeneralLambda::flat(2);
    let pt = [0.2, 0.15, -0.1, 0.2, 0.05, -0.12];
    let rec = appendix_oracle(&base, &lam, &pt).unwrap();
    assert_small("riemann", rec.max_riemann(), 1e-8);
    assert_small("ricci", rec.max_ricci(), 1e-8);
    assert_small("scalar", rec.scalar, 1e-8);
    assert_small("bianchi", rec.max_bianchi(), 1e-9);
}

#[test]
fn curvature_identities_einstein_profile() {
    let base = bases::heisenberg(2).unwrap();
    let params = EinsteinParams::new(2, 1.1, 0.0, -0.3).unwrap();
    let lam = GeneralLambda::from_einstein(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    for _ in 0..3 {
        let pt = sample_point(&mut rng, 6, 0.3);
        let rec = appendix_oracle(&base, &lam, &pt).unwrap();
        assert_small("curvature", rec.max_curvature(), 1e-7);
        assert_small("bianchi", rec.max_bianchi(), 1e-8);
    }
}

#[test]
fn curvature_identities_random_lambda() {
    let base = bases::heisenberg(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(49);
    for _ in 0..2 {
        let lam = GeneralLambda::random(2, &mut rng, 0.5);
        for _ in 0..3 {
            let pt = sample_point(&mut rng, 6, 0.3);
            let rec = appendix_oracle(&base, &lam, &pt).unwrap();
            assert_small("curvature", rec.max_curvature(), 1e-7);
            assert_small("bianchi", rec.max_bianchi(), 1e-8);
        }
    }
}

#[test]
fn curvature_identities_curved_base() {
    let base = bases::fs_lift(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let lam = GeneralLambda::random(2, &mut rng, 0.4);
    for _ in 0..2 {
        let pt = sample_point(&mut rng, 6, 0.25);
        let rec = appendix_oracle(&base, &lam, &pt).unwrap();
        assert_small("curvature", rec.max_curvature(), 1e-7);
        assert_small("bianchi", rec.max_bianchi(), 1e-8);
    }
}

#[test]
fn weyl_components_match_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let cases = [
        (bases::heisenberg(2).unwrap(), EinsteinParams::new(2, 0.9, 0.0, 0.5).unwrap()),
        (bases::fs_lift(2).unwrap(), EinsteinParams::new(2, -0.6, 3.0, 0.3).unwrap()),
    ];
    for (base, params) in cases {
        for _ in 0..2 {
            let pt = sample_point(&mut rng, 6, 0.3);
            let recs = weyl_einstein_components(&base, &params, &pt).unwrap();
            for rec in &recs {
                assert_small(&rec.name, rec.residual, 1e-7);
            }
        }
    }
}

#[test]
fn coframe_derivative_patterns() {
    let base = bases::heisenberg(2).unwrap();
    let params = EinsteinParams::new(2, 0.8, 0.0, -0.6).unwrap();
    let model = assemble_einstein(&base, &params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..3 {
        let pt = sample_point(&mut rng, 6, 0.3);
        let res = coframe_derivative_check(&model, &pt).unwrap();
        assert_small("kappa pattern", res.kappa, 1e-8);
        assert_small("theta pattern", res.theta, 1e-8);
        assert_small("lambda pattern", res.lambda, 1e-8);
    }

    // With all constants zero the profile vanishes identically and λ is
    // parallel.
    let zero = EinsteinParams::new(2, 0.0, 0.0, 0.0).unwrap();
    let flat_model = assemble_einstein(&base, &zero).unwrap();
    let pt = [0.3, 0.1, -0.2, 0.05, 0.12, -0.07];
    let res = coframe_derivative_check(&flat_model, &pt).unwrap();
    assert_small("parallel lambda", res.lambda, 1e-10);

    let general = assemble_general(&base, GeneralLambda::random(2, &mut rng, 0.3)).unwrap();
    assert!(coframe_derivative_check(&general, &pt).is_err());
}

#[test]
fn killing_field_and_conformal_direction() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let heis = bases::heisenberg(2).unwrap();
    let fs = bases::fs_lift(2).unwrap();
    let configs = [
        (&heis, EinsteinParams::new(2, 0.8, 0.0, -0.6).unwrap()),
        (&fs, EinsteinParams::new(2, -0.4, 3.0, 0.9).unwrap()),
    ];
    for (base, params) in configs {
        let model = assemble_einstein(base, &params).unwrap();
        for _ in 0..2 {
            let pt = sample_point(&mut rng, 6, 0.3);
            let res = killing_check(&model, &pt).unwrap();
            assert_small("killing symmetry", res.sym, 1e-8);
            assert_small("killing norm", res.norm, 1e-10);
        }
    }

    // The null coordinate direction is conformal-Killing for the rescaled
    // metric exactly when the parameters are of Fefferman type.
    let pt = [0.3, 0.1, -0.2, 0.05, 0.12, -0.07];
    let fmodel = assemble_einstein(&fs, &EinsteinParams::new(2, 2.5, 3.0, 0.0).unwrap()).unwrap();
    let res = killing_check(&fmodel, &pt).unwrap();
    assert_small("conformal killing (fefferman)", res.conformal, 1e-8);
    let generic = assemble_einstein(&fs, &EinsteinParams::new(2, -0.4, 3.0, 0.9).unwrap()).unwrap();
    let res = killing_check(&generic, &pt).unwrap();
    assert!(res.conformal > 1e-4, "conformal residual should detect generic members");
}

#[test]
fn fefferman_member_conformal_criteria() {
    let fs = bases::fs_lift(2).unwrap();
    let params = EinsteinParams::new(2, 2.5, 3.0, 0.0).unwrap();
    assert!(params.is_fefferman());
    let model = assemble_einstein(&fs, &params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    for _ in 0..2 {
        let pt = sample_point(&mut rng, 6, 0.25);
        let crit = fefferman_criteria(&model, &pt).unwrap();
        assert_small("null Weyl contraction", crit.weyl_res, 1e-6);
        assert_small("null Cotton contraction", crit.cotton_res, 1e-6);
        assert_small("conformal scalar", crit.scalar_value + 1.0, 1e-8);
    }

    let generic = assemble_einstein(&fs, &EinsteinParams::new(2, 1.0, 3.0, 0.0).unwrap()).unwrap();
    let pt = [0.2, 0.1, -0.1, 0.05, 0.0, 0.15];
    assert!(matches!(fefferman_criteria(&generic, &pt), Err(Error::Precondition(_))));
}

#[test]
fn kerr_schild_relation_to_fefferman_member() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    let heis = bases::heisenberg(2).unwrap();
    let fs = bases::fs_lift(2).unwrap();
    let configs = [
        (&heis, EinsteinParams::new(2, 0.8, 0.0, -0.6).unwrap()),
        (&fs, EinsteinParams::new(2, -0.4, 3.0, 0.9).unwrap()),
    ];
    for (base, params) in configs {
        let model = assemble_einstein(base, &params).unwrap();
        for _ in 0..2 {
            let pt = sample_point(&mut rng, 6, 0.3);
            assert_small("kerr-schild difference", kerr_schild_check(&model, &pt).unwrap(), 1e-9);
        }
    }
    // The Fefferman-type member differs from itself by nothing.
    let fmodel = assemble_einstein(&fs, &EinsteinParams::new(2, 2.5, 3.0, 0.0).unwrap()).unwrap();
    let pt = [0.4, 0.05, 0.1, -0.2, 0.0, 0.1];
    assert_small("fefferman self-difference", kerr_schild_check(&fmodel, &pt).unwrap(), 1e-12);
}

#[test]
fn radial_form_profile_and_mass() {
    let params = EinsteinParams::new(2, 0.0, 1.0, 0.0).unwrap();
    for i in 0..41 {
        let r = -10.0 + 0.5 * i as f64;
        let tn = taubnut_map(&params, r).unwrap();
        assert_small("round trip", tn.round_trip, 1e-12);
        assert_small("radial profile equation", tn.f_ode_residual, 1e-8);
        if let Some(mass) = tn.mass {
            assert_small("mass extraction", mass - tn.mass_reference, 1e-6);
        }
    }
    // A nonzero odd constant shifts the mass away from zero.
    let params = EinsteinParams::new(2, 0.7, 2.0, 0.3).unwrap();
    let tn = taubnut_map(&params, 3.2).unwrap();
    assert_small("radial profile equation", tn.f_ode_residual, 1e-8);
    assert_small("mass extraction", tn.mass.unwrap() - tn.mass_reference, 1e-6);
    assert_small("mass closed form", tn.mass_reference + 2.0f64.powi(3) * 0.3, 1e-14);

    assert!(matches!(
        taubnut_map(&EinsteinParams::new(2, 0.4, 0.0, 0.1).unwrap(), 1.0),
        Err(Error::Argument(_))
    ));
}

#[test]
fn dual_congruence_displays() {
    let heis = bases::heisenberg(2).unwrap();
    let fs = bases::fs_lift(2).unwrap();
    // Generic member whose profile is bounded away from zero near φ = 0.
    let model = assemble_einstein(&heis, &EinsteinParams::new(2, 0.8, 0.0, -0.6).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    use rand::Rng as _;
    for _ in 0..2 {
        let mut pt = sample_point(&mut rng, 6, 0.3);
        pt[0] = rng.gen_range(-0.35..0.35);
        let rec = dual_robinson_check(&model, &pt).unwrap();
        assert_eq!(rec.status, DualRobinsonStatus::Checked);
        assert_small("primary display", rec.primary_residual.unwrap(), 1e-8);
        assert_small("dual display", rec.dual_residual.unwrap(), 1e-9);
        assert_small("congruence invariants", rec.congruence_residual, 1e-9);
    }

    // Fefferman-type member: the profile is constant and the derivative
    // entries drop from both displays.
    let pt = [0.3, 0.1, -0.2, 0.05, 0.12, -0.07];
    let fmodel = assemble_einstein(&fs, &EinsteinParams::new(2, 2.5, 3.0, 0.0).unwrap()).unwrap();
    let rec = dual_robinson_check(&fmodel, &pt).unwrap();
    assert_eq!(rec.status, DualRobinsonStatus::Checked);
    assert_small("primary display (fefferman)", rec.primary_residual.unwrap(), 1e-9);
    assert_small("dual display (fefferman)", rec.dual_residual.unwrap(), 1e-9);

    // All constants zero: λ is parallel and there is no dual structure.
    let zero = assemble_einstein(&heis, &EinsteinParams::new(2, 0.0, 0.0, 0.0).unwrap()).unwrap();
    let rec = dual_robinson_check(&zero, &pt).unwrap();
    assert_eq!(rec.status, DualRobinsonStatus::ParallelLambda);
    assert_small("parallel lambda", rec.parallel_residual.unwrap(), 1e-10);
    assert_small("congruence invariants", rec.congruence_residual, 1e-9);

    // Isolated zero of the profile: the dual coframe is singular there.
    let iso = assemble_einstein(&heis, &EinsteinParams::new(2, 0.0, 0.0, 0.5).unwrap()).unwrap();
    let rec = dual_robinson_check(&iso, &[0.0, 0.1, -0.2, 0.05, 0.12, -0.07]).unwrap();
    assert_eq!(rec.status, DualRobinsonStatus::SkippedNearZero);
    assert_small("congruence invariants", rec.congruence_residual, 1e-9);
}
