//! Geometry invariants: Hsiung identity health, trace identity, the
//! finite-difference shape-operator oracle, optimal inequalities, junction
//! continuity of the glued construction, extrinsic radii.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use revsurf::geometry::*;
use revsurf::profile::catenoidal_profile;

fn suite() -> Vec<(String, RevolutionImmersion)> {
    let mut out: Vec<(String, RevolutionImmersion)> = vec![
        ("sphere-1".into(), sphere(2, 1.0).unwrap()),
        ("sphere-2.5".into(), sphere(2, 2.5).unwrap()),
        ("sphere-n3".into(), sphere(3, 1.0).unwrap()),
        ("spheroid-1.05".into(), spheroid(2, 1.05, 1.0).unwrap()),
        ("spheroid-2".into(), spheroid(2, 2.0, 1.0).unwrap()),
        ("dumbbell-0.1".into(), dumbbell(2, 2, 0.1, 0.0).unwrap()),
        ("dumbbell-3sph".into(), dumbbell(2, 3, 0.05, 0.0).unwrap()),
        (
            "sphere-with-neck".into(),
            sphere_with_neck(2, 0.02, 20.0).unwrap(),
        ),
    ];
    for (eps, a) in [(0.1, 0.28), (0.025, 0.28)] {
        let prof = catenoidal_profile(2, 0, eps, a).unwrap();
        out.push((
            format!("bispherical-{eps}"),
            bispherical_immersion(2, 0, prof).unwrap(),
        ));
    }
    let prof = catenoidal_profile(3, 1, 0.05, 0.25).unwrap();
    out.push((
        "bispherical-n3k1".into(),
        bispherical_immersion(3, 1, prof).unwrap(),
    ));
    out
}

#[test]
fn hsiung_identity_across_suite() {
    for (name, imm) in suite() {
        let res = hsiung_residual(&imm);
        assert!(res < 1e-8, "{name}: hsiung residual {res:.3e}");
    }
}

#[test]
fn trace_identity_at_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (name, imm) in suite() {
        for _ in 0..1000 {
            let a = rng.random_range(0..imm.arc_count());
            let (q0, q1) = imm.arc_range(a);
            let q = rng.random_range(q0..q1);
            let j = imm.radial_jet(a, q);
            let sum: f64 = j.kappas.iter().map(|(k, m)| k * *m as f64).sum();
            let nh = imm.n as f64 * j.mean_curvature;
            assert!(
                (sum - nh).abs() <= 1e-10 * (1.0 + nh.abs()),
                "{name}: trace {sum} vs nH {nh} at arc {a} q {q}"
            );
        }
    }
}

#[test]
fn principal_curvatures_bound_operator_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (name, imm) in suite() {
        for _ in 0..200 {
            let a = rng.random_range(0..imm.arc_count());
            let (q0, q1) = imm.arc_range(a);
            let q = rng.random_range(q0..q1);
            let j = imm.radial_jet(a, q);
            let maxk = j
                .kappas
                .iter()
                .filter(|(_, m)| *m > 0)
                .map(|(k, _)| k.abs())
                .fold(0.0, f64::max);
            assert!((maxk - j.b_op).abs() < 1e-12, "{name}");
            let frob2: f64 = j
                .kappas
                .iter()
                .map(|(k, m)| k * k * *m as f64)
                .sum();
            assert!((frob2.sqrt() - j.b_frob).abs() < 1e-10, "{name}");
        }
    }
}

/// The closed-form shape operator against a finite difference of the
/// closed-form unit normal along the base direction, plus the exact
/// orbital identities kappa_orbit = normal_coefficient / warp.
#[test]
fn shape_operator_matches_normal_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    for (name, imm) in suite() {
        for _ in 0..50 {
            let a = rng.random_range(0..imm.arc_count());
            let (q0, q1) = imm.arc_range(a);
            let w = q1 - q0;
            let q = rng.random_range((q0 + 0.05 * w)..(q1 - 0.05 * w));
            let h = 1e-6 * w;
            let jm = imm.radial_jet(a, q - h);
            let j0 = imm.radial_jet(a, q);
            let jp = imm.radial_jet(a, q + h);
            // base-direction curvature: <d nu/ds, T> with T the unit tangent;
            // in profile coordinates T = (rho1', rho2')/v and nu = (n1, n2)
            let dn1 = (jp.normal1 - jm.normal1) / (2.0 * h);
            let dn2 = (jp.normal2 - jm.normal2) / (2.0 * h);
            let t1 = (jp.rho1 - jm.rho1) / (2.0 * h);
            let t2 = (jp.rho2 - jm.rho2) / (2.0 * h);
            let v = j0.speed;
            let kappa_fd = (dn1 * t1 + dn2 * t2) / (v * v);
            // which closed-form slot is the base-direction curvature:
            // generatrix slot 0, bispherical slot 2
            let kappa_cf = match imm.fib {
                Fibration::Generatrix { .. } => j0.kappas[0].0,
                Fibration::BiSpherical { .. } => j0.kappas[2].0,
            };
            assert!(
                (kappa_fd - kappa_cf).abs() <= 1e-6 * (1.0 + kappa_cf.abs()).max(kappa_fd.abs()),
                "{name} arc {a} q {q}: fd {kappa_fd} vs closed {kappa_cf}"
            );
            // orbital curvature = normal coefficient / warp (exact identity)
            match imm.fib {
                Fibration::Generatrix { .. } => {
                    if j0.rho1 > 1e-6 {
                        assert!(
                            (j0.normal1 / j0.rho1 - j0.kappas[1].0).abs()
                                <= 1e-9 * (1.0 + j0.kappas[1].0.abs()),
                            "{name}"
                        );
                    }
                }
                Fibration::BiSpherical { .. } => {
                    if j0.rho1 > 1e-6 {
                        assert!(
                            (j0.normal1 / j0.rho1 - j0.kappas[0].0).abs()
                                <= 1e-9 * (1.0 + j0.kappas[0].0.abs()),
                            "{name}"
                        );
                    }
                    if j0.rho2 > 1e-6 && j0.kappas[1].1 > 0 {
                        assert!(
                            (j0.normal2 / j0.rho2 - j0.kappas[1].0).abs()
                                <= 1e-9 * (1.0 + j0.kappas[1].0.abs()),
                            "{name}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn cauchy_schwarz_pinching_and_hk_inequalities() {
    for (name, imm) in suite() {
        if !imm.is_closed() {
            continue;
        }
        let rec = imm.recentered();
        let quad = OrbitQuadrature::new(&rec, 48);
        let vol = quad.integrate(|_| 1.0);
        let h2 = (quad.integrate(|j| j.mean_curvature * j.mean_curvature) / vol).sqrt();
        let x2 = (quad.integrate(|j| j.abs_x_sq()) / vol).sqrt();
        assert!(h2 * x2 >= 1.0 - 1e-9, "{name}: CS pinching {}", h2 * x2);
        let (rm, _) = extrinsic_radius(&imm);
        assert!(rm * h2 >= 1.0 - 1e-6, "{name}: hk {}", rm * h2);
        if name.starts_with("sphere-") && !name.contains("neck") {
            assert!(h2 * x2 - 1.0 < 1e-6, "{name}: sphere equality {}", h2 * x2);
            assert!(rm * h2 - 1.0 < 1e-6, "{name}");
        }
    }
}

#[test]
fn reilly_test_function_trace() {
    // sum_i ||grad X_i||_2^2 = n: pointwise sum_i |grad^M X_i|^2 = n + 1 - |nu|^2
    for (name, imm) in suite() {
        let quad = OrbitQuadrature::new(&imm, 32);
        let vol = quad.integrate(|_| 1.0);
        let val = quad.integrate(|j| {
            let nu2 = j.normal1 * j.normal1 + j.normal2 * j.normal2;
            (imm.n + 1) as f64 - nu2
        }) / vol;
        assert!(
            (val - imm.n as f64).abs() < 1e-8,
            "{name}: trace {val} vs n {}",
            imm.n
        );
    }
}

#[test]
fn sphere_lp_norms_and_volume() {
    let imm = sphere(2, 2.0).unwrap();
    let h = lp_norm(&imm, RadialField::MeanCurvature, 2.0).unwrap();
    assert!((h.normalized - 0.5).abs() < 1e-12);
    let quad = OrbitQuadrature::new(&imm, 32);
    let vol = quad.volume();
    assert!((vol - 16.0 * std::f64::consts::PI).abs() < 1e-9);
    let sup = lp_norm(&imm, RadialField::MeanCurvature, f64::INFINITY).unwrap();
    assert!((sup.normalized - 0.5).abs() < 1e-12);
}

#[test]
fn extrinsic_radius_examples() {
    let (r, c) = extrinsic_radius(&sphere(2, 1.0).unwrap());
    assert!((r - 1.0).abs() < 1e-9 && c.abs() < 1e-9);
    let (r, c) = extrinsic_radius(&sphere_at(2, 1.0, 0.3).unwrap());
    assert!((r - 1.0).abs() < 1e-9 && (c - 0.3).abs() < 1e-7);
    let (r, _) = extrinsic_radius(&spheroid(2, 2.0, 1.0).unwrap());
    assert!((r - 2.0).abs() < 1e-7);
}

#[test]
fn junction_continuity_of_glued_branches() {
    // |B|_op, |B|_F, |H| and theta agree across the neck from both branches
    let prof = catenoidal_profile(2, 0, 0.05, 0.28).unwrap();
    let imm = bispherical_immersion(2, 0, prof).unwrap();
    // arcs 2 and 3 are the u-charts of the two branches meeting at u = 0
    let minus = imm.radial_jet(2, -1e-7);
    let plus = imm.radial_jet(3, 1e-7);
    assert!((minus.b_op - plus.b_op).abs() < 1e-6 * plus.b_op);
    assert!((minus.b_frob - plus.b_frob).abs() < 1e-6 * plus.b_frob);
    assert!(
        (minus.mean_curvature.abs() - plus.mean_curvature.abs()).abs()
            < 1e-4 * (1.0 + plus.mean_curvature.abs())
    );
    assert!((minus.weight - plus.weight).abs() < 1e-6 * (1.0 + plus.weight));
    // exact junction value: |B|_op -> m / eps
    let limit = imm.radial_jet(3, 0.0);
    assert!(
        (limit.b_op - 1.0 / 0.05).abs() < 1e-9 * (1.0 / 0.05),
        "junction b_op {}",
        limit.b_op
    );
}

#[test]
fn bispherical_constant_profile_is_round_sphere() {
    let imm = bispherical_immersion(
        2,
        0,
        revsurf::profile::ProfileFunction::Constant { value: 0.25 },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let (q0, q1) = imm.arc_range(0);
        let q = rng.random_range(q0..q1);
        let j = imm.radial_jet(0, q);
        assert!((j.mean_curvature - 1.0 / 1.25).abs() < 1e-12);
        assert!((j.b_op - 1.0 / 1.25).abs() < 1e-12);
    }
}

#[test]
fn dumbbell_neck_is_minimal_and_h_bounded() {
    for waist in [0.2, 0.1, 0.05, 0.025] {
        let imm = dumbbell(2, 2, waist, 0.0).unwrap();
        let sup = lp_norm(&imm, RadialField::MeanCurvature, f64::INFINITY)
            .unwrap()
            .normalized;
        assert!(sup <= 1.0 + 1e-9, "waist {waist}: sup H {sup}");
    }
}

#[test]
fn curvature_at_full_jet() {
    let imm = sphere(2, 1.0).unwrap();
    let jet = imm.curvature_at(0, std::f64::consts::FRAC_PI_3, &[1.0, 0.0], &[1.0]);
    assert!((jet.mean_curvature - 1.0).abs() < 1e-12);
    let r2: f64 = jet.position.iter().map(|v| v * v).sum();
    assert!((r2 - 1.0).abs() < 1e-12);
    // outward normal on the unit sphere equals the position
    for (p, nu) in jet.position.iter().zip(&jet.unit_normal) {
        assert!((p - nu).abs() < 1e-12);
    }
}

#[test]
fn immersion_spec_round_trip() {
    for (_, imm) in suite() {
        let v = imm.to_json();
        let back = RevolutionImmersion::from_json(&v).unwrap();
        assert!((hsiung_residual(&back) - hsiung_residual(&imm)).abs() < 1e-12);
    }
}

#[test]
fn generatrix_rejects_bad_assemblies() {
    use revsurf::profile::ProfileFunction;
    // discontinuous assembly
    let segs = vec![
        PlaneSegment::Cylinder {
            x0: 0.0,
            radius: 1.0,
            q0: 0.0,
            q1: 1.0,
        },
        PlaneSegment::Cylinder {
            x0: 5.0,
            radius: 1.0,
            q0: 0.0,
            q1: 1.0,
        },
    ];
    assert!(matches!(
        generatrix_immersion(segs, 2),
        Err(GeometryError::DiscontinuousAssembly(..))
    ));
    // profile too deep for the glued construction
    assert!(matches!(
        bispherical_immersion(2, 0, ProfileFunction::Constant { value: 0.7 }),
        Err(GeometryError::ProfileTooDeep(..))
    ));
    assert!(dumbbell(2, 0, 0.1, 0.0).is_err());
    assert!(matches!(
        bispherical_immersion(2, 1, ProfileFunction::Constant { value: 0.0 }),
        Err(GeometryError::BadCodimension(..))
    ));
}

#[test]
fn equality_rigidity_near_round() {
    // hk_gap - 1 < 1e-6 forces L^2 sphere proximity
    for imm in [sphere(2, 1.0).unwrap(), sphere(2, 2.0).unwrap()] {
        let rec = imm.recentered();
        let h2 = h2_norm(&rec);
        let (rm, _) = extrinsic_radius(&rec);
        assert!(rm * h2 - 1.0 < 1e-6);
        let quad = OrbitQuadrature::new(&rec, 48);
        let vol = quad.integrate(|_| 1.0);
        let dev = (quad.integrate(|j| {
            let d = j.abs_x_sq().sqrt() - 1.0 / h2;
            d * d
        }) / vol)
            .sqrt();
        assert!(dev < 1e-3, "sphere proximity {dev}");
    }
}

#[test]
fn spline_profile_perturbed_sphere() {
    // a shallow radial bump on the sphere, C^1-capped at both ends
    let prof = revsurf::profile::spline_profile(
        vec![0.0, 0.5, 1.0, std::f64::consts::FRAC_PI_2],
        vec![0.0, 0.04, 0.01, 0.0],
        vec![0.0, 0.0, -0.05, 0.0],
    )
    .unwrap();
    let imm = bispherical_immersion(2, 0, prof).unwrap();
    assert!(hsiung_residual(&imm) < 1e-8);
    let (rm, _) = extrinsic_radius(&imm);
    assert!(rm * h2_norm(&imm) >= 1.0 - 1e-6);
}

#[test]
fn volume_density_closed_form() {
    // weight per dq equals (1 +- phi)^n sqrt(1 + (phi'/(1 +- phi))^2)
    // sin^{n-k-1} r cos^k r, checked on the r-chart arcs of the glued surface
    let (n, k) = (3u32, 1u32);
    let prof = catenoidal_profile(n, k, 0.06, 0.25).unwrap();
    let imm = bispherical_immersion(n, k, prof.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (arc, sign) in [(1usize, -1.0f64), (4, 1.0), (5, 1.0)] {
        for _ in 0..50 {
            let (q0, q1) = imm.arc_range(arc);
            let q = rng.random_range(q0..q1);
            let r = q.abs();
            let (phi, dphi, _) = prof.eval(r);
            let p = 1.0 + sign * phi;
            let expect = p.powi(n as i32) * (1.0 + (dphi / p).powi(2)).sqrt()
                * r.sin().powi((n - k - 1) as i32)
                * r.cos().powi(k as i32);
            let got = imm.radial_jet(arc, q).weight;
            assert!(
                (got - expect).abs() <= 1e-10 * (1.0 + expect),
                "arc {arc} r {r}: {got} vs {expect}"
            );
        }
    }
}

#[test]
fn shared_types_are_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<RevolutionImmersion>();
    check::<revsurf::harmonic::HarmonicBasis>();
    check::<revsurf::spectral::SpectrumResult>();
    check::<revsurf::pinching::PinchReport>();
    check::<revsurf::profile::ProfileFunction>();
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        /// Any valid glued profile yields positive interior volume density,
        /// the trace identity, and a tiny Hsiung residual.
        #[test]
        fn prop_glued_profiles_are_healthy(
            n in 2u32..=4,
            k_off in 0u32..3,
            eps in 0.02f64..0.15,
            a in 0.16f64..0.31,
        ) {
            prop_assume!(eps < a && a < std::f64::consts::PI / 10.0);
            let k = k_off.min(n - 2);
            let prof = catenoidal_profile(n, k, eps, a).unwrap();
            let imm = bispherical_immersion(n, k, prof).unwrap();
            for arc in 0..imm.arc_count() {
                let (q0, q1) = imm.arc_range(arc);
                for i in 1..8 {
                    let q = q0 + (q1 - q0) * i as f64 / 8.0;
                    let j = imm.radial_jet(arc, q);
                    prop_assert!(j.weight > 0.0);
                    let sum: f64 = j.kappas.iter().map(|(x, m)| x * *m as f64).sum();
                    prop_assert!((sum - n as f64 * j.mean_curvature).abs() < 1e-9 * (1.0 + sum.abs()));
                }
            }
            prop_assert!(hsiung_residual(&imm) < 1e-8);
        }

        /// Homothety: scaling a spheroid scales curvature norms inversely.
        #[test]
        fn prop_lp_norm_scaling(aa in 1.05f64..1.8, c in 1.2f64..2.5) {
            let small = spheroid(2, aa, 1.0).unwrap();
            let big = spheroid(2, aa * c, c).unwrap();
            let h_small = lp_norm(&small, RadialField::MeanCurvature, 2.0).unwrap().normalized;
            let h_big = lp_norm(&big, RadialField::MeanCurvature, 2.0).unwrap().normalized;
            prop_assert!((h_small / h_big / c - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn concentration_sphere_equality_case() {
    let imm = sphere(2, 1.0).unwrap();
    let rep = concentration_report(&imm, 0.2);
    assert!(rep.xt_l2 < 1e-7, "X^T {}", rep.xt_l2);
    assert!(rep.phi_z_l2 < 1e-7, "phi Z {}", rep.phi_z_l2);
    assert!(rep.annulus_deficit.abs() < 1e-9);
    assert!((rep.phi_mass - 1.0).abs() < 1e-12);
    assert!(rep.h_dev_l2 < 1e-9);
}
