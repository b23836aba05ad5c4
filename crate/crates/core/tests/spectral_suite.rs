//! Spectral oracles: exact sphere spectra, Dirichlet strings, homothety
//! covariance, domain monotonicity, Galerkin dominance, mesh
//! self-convergence, residual equality cases.

use revsurf::geometry::*;
use revsurf::geometry::catenoid_tangency;
use revsurf::harmonic::multiplicity;
use revsurf::spectral::*;

/// First four distinct eigenvalues of S^n(R) with their multiplicities.
fn sphere_oracle(n: u32, radius: f64) -> Vec<(f64, u64)> {
    (0..4u32)
        .map(|k| {
            (
                (k * (n + k - 1)) as f64 / (radius * radius),
                multiplicity(n, k).unwrap(),
            )
        })
        .collect()
}

#[test]
fn sphere_spectrum_oracle_n2_n3() {
    for (n, radius) in [(2u32, 1.0), (2, 2.0), (3, 1.0), (3, 2.0)] {
        let imm = sphere(n, radius).unwrap();
        let lam_max = (3.0 * (n + 2) as f64 + 1.0) / (radius * radius);
        let spec = spectrum_up_to(&imm, lam_max, 1200).unwrap();
        let clusters = spec.clustered(10.0);
        let oracle = sphere_oracle(n, radius);
        for (i, (lam, mult)) in oracle.iter().enumerate() {
            let (got, gm) = clusters[i];
            if i == 0 {
                assert!(got.abs() < 1e-8, "n={n} R={radius}: lam0 {got}");
            } else {
                assert!(
                    (got / lam - 1.0).abs() < 5e-3,
                    "n={n} R={radius} k={i}: {got} vs {lam}"
                );
            }
            assert_eq!(gm, *mult, "n={n} R={radius} k={i} multiplicity");
        }
    }
}

#[test]
fn homothety_covariance() {
    let a = spectrum_up_to(&sphere(2, 1.0).unwrap(), 13.0, 800).unwrap();
    let b = spectrum_up_to(&sphere(2, 2.0).unwrap(), 13.0 / 4.0, 800).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - 4.0 * y).abs() < 1e-9 * (1.0 + x.abs()), "{x} vs 4*{y}");
    }
    // spheroid scaling too (non-round case)
    let a = spectrum_up_to(&spheroid(2, 1.3, 1.0).unwrap(), 8.0, 800).unwrap();
    let big = spheroid(2, 2.6, 2.0).unwrap();
    let b = spectrum_up_to(&big, 2.0, 800).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - 4.0 * y).abs() < 1e-9 * (1.0 + x.abs()));
    }
}

#[test]
fn dirichlet_flat_cylinder_string() {
    // zero mode of [0, L] x S^1: lambda_j = (j pi / L)^2
    let l = 2.0;
    let cyl = flat_cylinder(2, 0.35, l).unwrap();
    let spec = dirichlet_spectrum(&cyl, 3, 900).unwrap();
    // angular modes carry potential >= 1/0.35^2 ~ 8.2; the first three string
    // modes are (pi/2)^2, (2pi/2)^2, (3pi/2)^2 = 2.47, 9.87, 22.2 — merged
    let exact = [
        (std::f64::consts::PI / l).powi(2),
        (2.0 * std::f64::consts::PI / l).powi(2),
    ];
    for (i, e) in exact.iter().enumerate() {
        let got = spec
            .entries
            .iter()
            .filter(|en| en.mode.deg1 == 0)
            .nth(i)
            .unwrap()
            .eigenvalue;
        assert!((got / e - 1.0).abs() < 1e-5, "j={i}: {got} vs {e}");
    }
}

#[test]
fn dirichlet_hemisphere_equator() {
    // z restricted to the upper hemisphere is the first Dirichlet
    // eigenfunction: lambda_1^D = 2
    let hemi = hemisphere(2, 1.0).unwrap();
    let lam = lambda1_dirichlet(&hemi, 1200).unwrap();
    assert!((lam - 2.0).abs() < 2e-5, "{lam}");
}

#[test]
fn dirichlet_scaling() {
    let a = lambda1_dirichlet(&flat_cylinder(2, 0.3, 1.0).unwrap(), 600).unwrap();
    let b = lambda1_dirichlet(&flat_cylinder(2, 0.15, 0.5).unwrap(), 600).unwrap();
    assert!((b / a - 4.0).abs() < 1e-6, "{a} {b}");
}

#[test]
fn domain_monotonicity_on_dumbbell() {
    // Dirichlet eigenvalue of the half dumbbell (cut at the waist) bounds the
    // closed dumbbell's first nonzero eigenvalue from above (symmetric
    // Dirichlet bracketing)
    let waist = 0.1f64;
    let closed = dumbbell(2, 2, waist, 0.0).unwrap();
    let spec = spectrum_up_to(&closed, 2.0, 1200).unwrap();
    let lam1 = spec.first_nonzero().unwrap();
    let (t0, u0) = catenoid_tangency(waist);
    let half = generatrix_immersion(
        vec![
            PlaneSegment::Circle {
                cx: 0.0,
                crho: 0.0,
                r: 1.0,
                ang0: std::f64::consts::PI,
                dir: -1.0,
                q0: 0.0,
                q1: std::f64::consts::PI - t0,
            },
            PlaneSegment::Catenoid {
                x_waist: t0.cos() + waist * u0,
                waist,
                q0: -u0,
                q1: 0.0,
            },
        ],
        2,
    )
    .unwrap();
    let lam_d = lambda1_dirichlet(&half, 1200).unwrap();
    // both sides carry their own discretization error; the exact statement
    // is between the true eigenvalues
    assert!(
        lam_d >= lam1 * (1.0 - 1e-4),
        "domain monotonicity: {lam_d} < {lam1}"
    );
    // and they are close for the symmetric dumbbell (the first mode is odd)
    assert!((lam_d / lam1 - 1.0).abs() < 0.02, "{lam_d} vs {lam1}");
}

#[test]
fn galerkin_dominates_separated_solver() {
    for imm in [
        sphere(2, 1.0).unwrap(),
        spheroid(2, 1.05, 1.0).unwrap(),
        spheroid(2, 1.3, 1.0).unwrap(),
    ] {
        let g = galerkin_upper_bounds(&imm, 3, 24).unwrap();
        let spec = spectrum_up_to(&imm, 16.0, 1600).unwrap();
        for (i, ub) in g.upper_bounds.iter().enumerate() {
            if i >= spec.eigenvalues.len() {
                break;
            }
            // the separated value carries its own discretization error;
            // allow it before testing the upper-bound property
            let est = spec
                .entries
                .iter()
                .find(|e| (e.eigenvalue - spec.eigenvalues[i]).abs() < 1e-12)
                .map(|e| e.discretization_estimate)
                .unwrap_or(0.0);
            assert!(
                *ub >= spec.eigenvalues[i] - 4.0 * est - 1e-8,
                "index {i}: galerkin {ub} < separated {}",
                spec.eigenvalues[i]
            );
        }
    }
}

#[test]
fn galerkin_monotone_in_degree() {
    let imm = spheroid(2, 1.2, 1.0).unwrap();
    let g2 = galerkin_upper_bounds(&imm, 2, 24).unwrap();
    let g3 = galerkin_upper_bounds(&imm, 3, 24).unwrap();
    for (i, b2) in g2.upper_bounds.iter().enumerate() {
        assert!(g3.upper_bounds[i] <= b2 + 1e-9, "index {i}");
    }
}

#[test]
fn galerkin_close_on_nearly_round() {
    let imm = spheroid(2, 1.05, 1.0).unwrap();
    let g = galerkin_upper_bounds(&imm, 3, 24).unwrap();
    let spec = spectrum_up_to(&imm, 14.0, 1600).unwrap();
    for i in 1..g.upper_bounds.len().min(spec.eigenvalues.len()).min(9) {
        let gap = (g.upper_bounds[i] - spec.eigenvalues[i]) / spec.eigenvalues[i];
        assert!(gap < 0.05, "index {i}: relative gap {gap}");
    }
}

#[test]
fn mesh_self_convergence_within_estimate() {
    let imm = spheroid(2, 1.2, 1.0).unwrap();
    let spec_n = spectrum_up_to(&imm, 8.0, 1000).unwrap();
    let spec_2n = spectrum_up_to(&imm, 8.0, 2000).unwrap();
    for (a, b) in spec_n.entries.iter().zip(&spec_2n.entries) {
        if a.eigenvalue.abs() < 1e-8 {
            continue; // the zero mode is exact; its estimate is roundoff
        }
        assert!(
            (a.eigenvalue - b.eigenvalue).abs() <= 4.0 * a.discretization_estimate + 1e-11,
            "{} vs {} (est {})",
            a.eigenvalue,
            b.eigenvalue,
            a.discretization_estimate
        );
    }
}

#[test]
fn model_metric_d1_is_round_sphere() {
    let spec = model_metric_spectrum(3, 1, 14, 1200).unwrap();
    let exact = [0.0, 3.0, 3.0, 3.0, 3.0, 8.0, 8.0, 8.0, 8.0, 8.0, 8.0, 8.0, 8.0, 8.0];
    for (got, want) in spec.eigenvalues.iter().zip(exact) {
        if want == 0.0 {
            assert!(got.abs() < 1e-8);
        } else {
            assert!((got / want - 1.0).abs() < 5e-3, "{got} vs {want}");
        }
    }
}

#[test]
fn model_metric_d2_has_new_eigenvalues() {
    let spec = model_metric_spectrum(3, 2, 10, 1600).unwrap();
    // mu = a/2 + b + 2j gives mu(mu+2): 1.25 appears with multiplicity 2
    let count_near = |x: f64| {
        spec.eigenvalues
            .iter()
            .filter(|&&l| (l - x).abs() < 5e-3)
            .count()
    };
    assert_eq!(count_near(1.25), 2, "{:?}", spec.eigenvalues);
    assert!(count_near(5.25) >= 2);
}

#[test]
fn model_metric_self_convergence() {
    let a = model_metric_spectrum(3, 2, 12, 1000).unwrap();
    let b = model_metric_spectrum(3, 2, 12, 2000).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - y).abs() <= 1e-3 * (1.0 + x.abs()), "{x} vs {y}");
    }
}

#[test]
fn tune_neck_flat_cylinder_family() {
    // lambda_1^D(L) = (pi/L)^2; target 3 gives L = pi/sqrt(3)
    let res = tune_neck(3.0, 0.5, 4.0, 1200, |l| flat_cylinder(2, 0.3, l)).unwrap();
    let exact = std::f64::consts::PI / 3f64.sqrt();
    assert!(
        (res.parameter - exact).abs() < 1e-5,
        "L = {} vs {exact}",
        res.parameter
    );
    // target below the family's range over the bracket: no bracketing
    assert!(matches!(
        tune_neck(0.1, 0.5, 4.0, 400, |l| flat_cylinder(2, 0.3, l)),
        Err(SpectralError::NoBracket(..))
    ));
}

#[test]
fn residual_pointwise_sphere_reduction() {
    // on the round sphere Z = 0 and Eq. for Delta P reduces to mu_k H^2 P;
    // the residual report must vanish to quadrature precision
    let imm = sphere(2, 1.0).unwrap();
    for k in 1..=3u32 {
        let rep = residual_norm(&imm, k, 0.2, 24).unwrap();
        assert!(rep.max_residual_rel < 1e-9, "k={k}: {}", rep.max_residual_rel);
        assert!(rep.max_mass_deviation < 1e-9, "k={k}");
    }
}

#[test]
fn residual_decreases_toward_round() {
    let mut last = f64::INFINITY;
    for delta in [0.2, 0.1, 0.05] {
        let imm = spheroid(2, 1.0 + delta, 1.0).unwrap();
        let rep = residual_norm(&imm, 1, 0.25, 24).unwrap();
        assert!(rep.max_residual_rel < last);
        last = rep.max_residual_rel;
    }
}

#[test]
fn bispherical_two_fiber_lattice_reproduces_round_s3() {
    // constant profile with n = 3, k = 1: the S^1 x S^1 mode lattice must
    // rebuild the round S^3 spectrum with multiplicities (k+1)^2
    let imm = bispherical_immersion(
        3,
        1,
        revsurf::profile::ProfileFunction::Constant { value: 0.0 },
    )
    .unwrap();
    let spec = spectrum_up_to(&imm, 16.0, 1200).unwrap();
    let clusters = spec.clustered(10.0);
    let oracle: [(f64, u64); 4] = [(0.0, 1), (3.0, 4), (8.0, 9), (15.0, 16)];
    for (i, (lam, mult)) in oracle.iter().enumerate() {
        let (got, gm) = clusters[i];
        assert_eq!(gm, *mult, "cluster {i}");
        if *lam > 0.0 {
            assert!((got / lam - 1.0).abs() < 1e-3, "{got} vs {lam}");
        }
    }
}

#[test]
fn p_spheres_contribute_p_near_zero_eigenvalues() {
    // a chain of p spheres has p eigenvalues near zero (one exact)
    for p in [2usize, 3] {
        let imm = dumbbell(2, p, 0.05, 0.0).unwrap();
        let spec = spectrum_up_to(&imm, 1.0, 1800).unwrap();
        let low = spec.eigenvalues.iter().filter(|&&l| l < 0.5).count();
        assert_eq!(low, p, "p={p}: {:?}", spec.eigenvalues);
    }
}

#[test]
fn glued_family_first_eigenvalue_decreases() {
    // the glued two-sheet surface: lambda_1 (the odd S^0-parity mode across
    // the necks) decreases as the necks tighten
    let mut last = f64::INFINITY;
    for eps in [0.2, 0.1, 0.05] {
        let prof = revsurf::profile::catenoidal_profile(2, 0, eps, 0.28).unwrap();
        let imm = bispherical_immersion(2, 0, prof).unwrap();
        let spec = spectrum_up_to(&imm, 2.0, 1200).unwrap();
        let l1 = spec.first_nonzero().unwrap();
        assert!(l1 < last, "eps={eps}: {l1} !< {last}");
        last = l1;
    }
}

#[test]
fn glued_family_residual_and_cluster_window_shrink() {
    // as the necks tighten toward the round sphere, both the
    // almost-eigenfunction residual and the minimal k = 1 cluster window
    // shrink with the measured pinching gap
    use revsurf::pinching::pinch_report;
    let mut last_res = f64::INFINITY;
    let mut last_tau = f64::INFINITY;
    for eps in [0.1, 0.05, 0.025] {
        let prof = revsurf::profile::catenoidal_profile(2, 0, eps, 0.28).unwrap();
        let imm = bispherical_immersion(2, 0, prof).unwrap();
        let res = residual_norm(&imm, 1, 0.24, 32).unwrap().max_residual_rel;
        let spec = spectrum_up_to(&imm, 6.5, 1200).unwrap();
        let tau = pinch_report(&imm, &spec, &[0.2], 1).unwrap().clusters[0].minimal_tau;
        assert!(res < last_res, "eps={eps}: residual {res} !< {last_res}");
        assert!(tau < last_tau, "eps={eps}: tau {tau} !< {last_tau}");
        last_res = res;
        last_tau = tau;
    }
    // regression band from the first verified run
    assert!(last_res < 0.45 && last_tau < 0.2, "res {last_res}, tau {last_tau}");
}

#[test]
fn mode_labels() {
    use revsurf::geometry::Fibration;
    let gen = Fibration::Generatrix { fiber_dim: 1 };
    assert_eq!(AngularMode { deg1: 2, deg2: -1 }.label(&gen), "l=2");
    let bi0 = Fibration::BiSpherical { d1: 1, d2: 0 };
    assert_eq!(AngularMode { deg1: 1, deg2: 1 }.label(&bi0), "a=1,odd");
    let bi2 = Fibration::BiSpherical { d1: 1, d2: 2 };
    assert_eq!(AngularMode { deg1: 0, deg2: 3 }.label(&bi2), "a=0,b=3");
}

#[test]
fn residual_and_galerkin_on_bispherical_chart() {
    // exercises the two-block fiber space (S^1 x S^0 moments): the constant
    // profile is a round sphere, so residuals vanish and the Galerkin bounds
    // are exact
    let imm = bispherical_immersion(
        2,
        0,
        revsurf::profile::ProfileFunction::Constant { value: 0.0 },
    )
    .unwrap();
    let rep = residual_norm(&imm, 1, 0.2, 24).unwrap();
    assert!(rep.max_residual_rel < 1e-9, "{}", rep.max_residual_rel);
    assert!(rep.max_mass_deviation < 1e-9);
    let g = galerkin_upper_bounds(&imm, 2, 24).unwrap();
    let exact = [0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0];
    for (got, want) in g.upper_bounds.iter().zip(exact) {
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
}

#[test]
fn dumbbell_spectrum_keeps_sphere_clusters_plus_near_zero() {
    // two glued spheres: one extra near-zero eigenvalue, and the lambda = 2
    // cluster appears with the doubled multiplicity 6
    let imm = dumbbell(2, 2, 0.05, 0.0).unwrap();
    let spec = spectrum_up_to(&imm, 3.5, 1500).unwrap();
    let below_half = spec.eigenvalues.iter().filter(|&&l| l < 0.5).count();
    assert_eq!(below_half, 2, "{:?}", &spec.eigenvalues[..4]);
    // at this waist the sixth member (the symmetric axial mode) still sits
    // at ~2.45 on its way down to 2
    let near_two = spec
        .eigenvalues
        .iter()
        .filter(|&&l| (l - 2.0).abs() < 0.6)
        .count();
    assert_eq!(near_two, 6, "{:?}", spec.eigenvalues);
}

#[test]
fn count_interface_and_completeness() {
    let imm = sphere(2, 1.0).unwrap();
    let spec = spectrum_count(&imm, 9, 800).unwrap();
    assert_eq!(spec.eigenvalues.len(), 9);
    assert!(spec.eigenvalues[8] <= spec.completeness_bound);
    for e in &spec.entries {
        assert!(e.eigenvalue <= spec.completeness_bound);
    }
    // labels carry radial indices
    assert!(spec.entries.iter().any(|e| e.radial_index > 0));
}

#[test]
fn assemble_rejects_tiny_mesh() {
    let imm = sphere(2, 1.0).unwrap();
    let geom = BaseGeometry::from_immersion(&imm);
    assert!(matches!(
        assemble_radial(&geom, AngularMode { deg1: 0, deg2: -1 }, 16, false),
        Err(SpectralError::MeshTooSmall(16))
    ));
}

#[test]
fn spectrum_csv_has_provenance_columns() {
    let imm = sphere(2, 1.0).unwrap();
    let spec = spectrum_up_to(&imm, 8.0, 600).unwrap();
    let csv = spec.to_csv();
    assert!(csv.starts_with("eigenvalue,deg1,deg2,radial_index,multiplicity"));
    assert!(csv.lines().count() > 3);
}
