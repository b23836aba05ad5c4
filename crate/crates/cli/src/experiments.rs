//! The six batch experiments. Each consumes validated parameters, fills a
//! `RunOutput` with provenance-labelled quantities, tables, plot series and
//! pass/fail assertions, and never panics on in-range inputs.

use crate::config::{Experiment, ExperimentConfig};
use crate::output::RunOutput;
use anyhow::{Context, Result};
use revsurf::geometry::{
    bispherical_immersion, curvature_table, dumbbell, extrinsic_radius, flat_cylinder, h2_norm,
    hsiung_residual, lp_norm, neck_appendage, sphere, sphere_with_neck, spheroid, RadialField,
    RevolutionImmersion,
};
use revsurf::harmonic::{build_basis, identity_report, multiplicity, sample_points};
use revsurf::pinching::{inequality_suite, pinch_report, PinchBranch};
use revsurf::profile::catenoidal_profile;
use revsurf::spectral::{
    model_metric_spectrum, spectrum_up_to, tune_neck, SpectrumResult,
};

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    match cfg.experiment {
        Experiment::SphereValidate => sphere_validate(cfg),
        Experiment::SpheroidPinchSweep => spheroid_pinch_sweep(cfg),
        Experiment::DumbbellSweep => dumbbell_sweep(cfg),
        Experiment::NeckTune => neck_tune_experiment(cfg),
        Experiment::ModelSpectrum => model_spectrum(cfg),
        Experiment::IdentityAudit => identity_audit(cfg),
    }
}

fn sphere_validate(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let p = &cfg.parameters;
    let mut out = RunOutput::default();
    let imm = sphere(p.n, p.radius)?;
    // lambda_max placed between the max_ell and max_ell+1 potential floors
    let r2 = p.radius * p.radius;
    let lam_max = 0.5
        * ((p.max_ell * (p.max_ell + p.n - 1)) as f64 + ((p.max_ell + 1) * (p.max_ell + p.n)) as f64)
        / r2;
    let spec = spectrum_up_to(&imm, lam_max, p.mesh)?;
    out.table("spectrum", spec.to_csv());
    out.series(
        "eigenvalue_trajectory",
        spec.eigenvalues
            .iter()
            .enumerate()
            .map(|(i, l)| (i as f64, *l))
            .collect(),
    );
    let clusters = spec.clustered(10.0);
    let mut max_rel: f64 = 0.0;
    let mut mult_ok = true;
    for (i, (lam, mult)) in clusters.iter().enumerate() {
        let k = i as u32;
        let exact = (k * (p.n + k - 1)) as f64 / r2;
        if exact > 0.0 && *lam <= lam_max - 1.0 {
            max_rel = max_rel.max((lam / exact - 1.0).abs());
            mult_ok &= *mult == multiplicity(p.n, k).unwrap_or(0);
        }
        out.quantity(format!("lambda_cluster_{k}"), "spectral", *lam);
        out.quantity(format!("multiplicity_{k}"), "spectral", *mult as f64);
    }
    out.quantity("max_relative_error", "spectral", max_rel);
    out.quantity("completeness_bound", "spectral", spec.completeness_bound);
    out.quantity("hsiung_residual", "geometry", hsiung_residual(&imm));
    out.assert_that(
        "eigenvalues within 0.5% of k(n+k-1)/R^2",
        max_rel < 5e-3,
        format!("max rel err {max_rel:.3e}"),
    );
    out.assert_that(
        "cluster multiplicities equal m_k",
        mult_ok,
        format!("{} clusters checked", clusters.len()),
    );
    Ok(out)
}

fn spheroid_pinch_sweep(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let p = &cfg.parameters;
    let mut out = RunOutput::default();
    let mut tau_series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); p.k_max as usize];
    let mut pinch_csv = String::from("delta,k,tau,count,m_k,satisfied\n");
    let mut prev: Vec<f64> = vec![f64::INFINITY; p.k_max as usize];
    let mut monotone = true;
    for &delta in &p.deltas {
        let imm = spheroid(p.n, 1.0 + delta, 1.0)?;
        let h2 = h2_norm(&imm);
        let max_tau = p.tau_grid.iter().cloned().fold(0.0, f64::max);
        let lam_max = (1.0 + max_tau + 0.25)
            * (p.k_max * (p.n + p.k_max - 1)) as f64
            * h2
            * h2;
        let spec = spectrum_up_to(&imm, lam_max, p.mesh)?;
        let rep = pinch_report(&imm, &spec, &p.tau_grid, p.k_max)
            .with_context(|| format!("pinch report at delta = {delta}"))?;
        for row in &rep.clusters {
            for c in &row.cells {
                pinch_csv.push_str(&format!(
                    "{delta},{},{:.6},{},{},{}\n",
                    c.k, c.tau, c.count, c.m_k, c.satisfied
                ));
            }
            tau_series[row.k as usize - 1].push((delta, row.minimal_tau));
            monotone &= row.minimal_tau <= prev[row.k as usize - 1] + 1e-12;
            prev[row.k as usize - 1] = row.minimal_tau;
        }
        out.quantity(format!("hk_gap_delta_{delta}"), "pinching", rep.hk_gap);
        out.quantity(
            format!("reilly_gap_delta_{delta}"),
            "pinching",
            rep.reilly_gap,
        );
        out.assert_that(
            format!("gaps >= 1 - 1e-6 at delta = {delta}"),
            rep.hk_gap >= 1.0 - 1e-6 && rep.reilly_gap >= 1.0 - 1e-6,
            format!("hk {:.6}, reilly {:.6}", rep.hk_gap, rep.reilly_gap),
        );
        if (delta - p.deltas[0]).abs() < 1e-15 {
            out.extra(
                "pinch_report_first_delta",
                serde_json::to_value(&rep).unwrap_or_default(),
            );
        }
        let suite = inequality_suite(&imm, &spec, PinchBranch::ExtrinsicRadius)?;
        for row in &suite.rows {
            out.quantity(
                format!("lhs[{}]_delta_{delta}", row.name),
                "pinching",
                row.lhs,
            );
        }
        out.assert_that(
            format!("inequality suite at delta = {delta}"),
            suite.all_pass_where_hypothesis_met,
            format!(
                "eps = {:.4}; {} rows, hypothesis met on {}",
                suite.epsilon,
                suite.rows.len(),
                suite.rows.iter().filter(|r| r.hypothesis_met).count()
            ),
        );
    }
    out.table("pinch_cells", pinch_csv);
    for (i, series) in tau_series.into_iter().enumerate() {
        out.series(format!("tau_min_vs_delta_k{}", i + 1), series);
    }
    out.assert_that(
        "minimal tau monotone non-increasing in delta",
        monotone,
        "per k = 1..k_max".into(),
    );
    Ok(out)
}

fn dumbbell_sweep(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let p = &cfg.parameters;
    let mut out = RunOutput::default();
    if p.family == "chain" {
        let mut lam1 = Vec::new();
        let mut lam2 = Vec::new();
        let mut table = String::from("eps,lambda1,lambda2,sup_h,hk_gap\n");
        for &eps in &p.eps_list {
            let imm = dumbbell(p.n, p.p_spheres, eps, p.neck_len)?;
            let spec = spectrum_up_to(&imm, 3.0, p.mesh)?;
            let l1 = spec
                .first_nonzero()
                .context("dumbbell spectrum lost its gap")?;
            let l2 = spec
                .eigenvalues
                .iter()
                .copied()
                .find(|&l| l > l1 * (1.0 + 1e-6) && l > 0.5)
                .unwrap_or(f64::NAN);
            let sup_h = lp_norm(&imm, RadialField::MeanCurvature, f64::INFINITY)?.normalized;
            let hk = extrinsic_radius(&imm).0 * h2_norm(&imm);
            table.push_str(&format!("{eps},{l1:.9},{l2:.9},{sup_h:.6},{hk:.6}\n"));
            lam1.push((eps, l1));
            lam2.push((eps, l2));
            out.quantity(format!("lambda1_eps_{eps}"), "spectral", l1);
        }
        out.table("collapse", table);
        let last = dumbbell(p.n, p.p_spheres, *p.eps_list.last().unwrap(), p.neck_len)?;
        out.table("curvature_profile", curvature_csv(&last));
        out.series("lambda1_vs_eps", lam1.clone());
        out.series("lambda2_vs_eps", lam2);
        let decreasing = lam1.windows(2).all(|w| w[1].1 < w[0].1);
        out.assert_that(
            "lambda_1 decreases toward 0 along the sweep",
            decreasing,
            format!("{lam1:?}"),
        );
    } else {
        let a = p.flattening_scale;
        let mut rows = String::from(
            "eps,b_eps,h_minus_1_l1,x_dev_inf,sup_h,int_b2,int_b3,hk_gap,lambda1,lambda2\n",
        );
        let mut h1 = Vec::new();
        let mut b2 = Vec::new();
        let mut b3 = Vec::new();
        let mut lam1 = Vec::new();
        for &eps in &p.eps_list {
            let prof = catenoidal_profile(p.n, 0, eps, a)?;
            let b_eps = prof.tail_value();
            let imm = bispherical_immersion(p.n, 0, prof)?;
            let q = p.n; // n - k with k = 0
            let h_l1 = lp_norm(&imm, RadialField::HMinus(1.0), 1.0)?.normalized;
            let x_inf = lp_norm(&imm, RadialField::AbsXMinus(1.0), f64::INFINITY)?.normalized;
            let sup_h = lp_norm(&imm, RadialField::MeanCurvature, f64::INFINITY)?.normalized;
            let ib2 = lp_norm(&imm, RadialField::SecondFormOp, q as f64)?.unnormalized_integral;
            let ib3 =
                lp_norm(&imm, RadialField::SecondFormOp, (q + 1) as f64)?.unnormalized_integral;
            let hk = extrinsic_radius(&imm).0 * h2_norm(&imm);
            let spec = spectrum_up_to(&imm, 2.5, p.mesh)?;
            let l1 = spec.first_nonzero().unwrap_or(f64::NAN);
            let l2 = spec
                .eigenvalues
                .iter()
                .copied()
                .find(|&l| l > l1 * (1.0 + 1e-6) && l > 0.5)
                .unwrap_or(f64::NAN);
            rows.push_str(&format!(
                "{eps},{b_eps:.6},{h_l1:.6},{x_inf:.6},{sup_h:.6},{ib2:.6},{ib3:.6},{hk:.6},{l1:.8},{l2:.8}\n"
            ));
            h1.push((eps, h_l1));
            b2.push(ib2);
            b3.push(ib3);
            lam1.push((eps, l1));
        }
        out.series("lambda1_vs_eps", lam1.clone());
        let lam_decreasing = lam1.windows(2).all(|w| w[1].1 < w[0].1);
        out.assert_that(
            "lambda_1 of the glued surface decreases along the sweep",
            lam_decreasing,
            format!("{lam1:?}"),
        );
        out.table("curvature_budgets", rows);
        let prof = catenoidal_profile(p.n, 0, *p.eps_list.last().unwrap(), a)?;
        out.table(
            "curvature_profile",
            curvature_csv(&bispherical_immersion(p.n, 0, prof)?),
        );
        out.series("h_minus_1_vs_eps", h1.clone());
        let decreasing = h1.windows(2).all(|w| w[1].1 < w[0].1);
        let ratio = b2.iter().cloned().fold(0.0, f64::max)
            / b2.iter().cloned().fold(f64::MAX, f64::min);
        let growth = b3.last().unwrap() / b3.first().unwrap();
        out.quantity("int_b_pow_nk_ratio", "geometry", ratio);
        out.quantity("int_b_pow_nk_plus1_growth", "geometry", growth);
        out.assert_that(
            "||H - 1||_1 strictly decreasing",
            decreasing,
            format!("{h1:?}"),
        );
        out.assert_that(
            "int |B|^{n-k} bounded (max/min < 3)",
            ratio < 3.0,
            format!("ratio {ratio:.3}"),
        );
        out.assert_that(
            "int |B|^{n-k+1} grows (>= 2x over sweep)",
            growth >= 2.0,
            format!("growth {growth:.3}x"),
        );
    }
    Ok(out)
}

/// Arclength profile table s -> (H, |B|_op, theta) for plotting.
fn curvature_csv(imm: &RevolutionImmersion) -> String {
    let mut s = String::from("s,mean_curvature,b_op,volume_density\n");
    for (t, h, b, w) in curvature_table(imm, 400) {
        s.push_str(&format!("{t:.9e},{h:.9e},{b:.9e},{w:.9e}\n"));
    }
    s
}

fn neck_tune_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let p = &cfg.parameters;
    let mut out = RunOutput::default();
    // part 1: flat-cylinder family, exact string formula L = pi / sqrt(target)
    let tuned = tune_neck(p.cylinder_target, 0.5, 6.0, p.mesh.max(1200), |l| {
        flat_cylinder(p.n, 0.3, l)
    })?;
    let exact_l = std::f64::consts::PI / p.cylinder_target.sqrt();
    out.quantity("tuned_cylinder_length", "spectral", tuned.parameter);
    out.quantity("cylinder_length_exact", "spectral", exact_l);
    out.assert_that(
        "flat-cylinder tuning recovers pi/sqrt(target)",
        (tuned.parameter - exact_l).abs() < 1e-5,
        format!("L = {:.8} vs {:.8}", tuned.parameter, exact_l),
    );
    // part 2: assembled sphere + tuned appendage across tube lengths
    let target = p.target_lambda;
    let mut gaps = Vec::new();
    let mut rows = String::from("L,nu,lambda_tilde,gap\n");
    let sphere_gap_lo = (p.n as f64) + 0.5; // just above lambda_1(S^n) = n
    for &big_l in &p.lengths {
        let tn = tune_neck(target, 1e-3, 0.07, (p.mesh / 2).max(600), |nu| {
            neck_appendage(p.n, nu, big_l)
        })?;
        let closed = sphere_with_neck(p.n, tn.parameter, big_l)?;
        let spec = spectrum_up_to(&closed, target * 1.48, p.mesh.max(2000))?;
        let tilde = spec
            .eigenvalues
            .iter()
            .copied()
            .find(|&l| l > sphere_gap_lo && l < target * 1.48)
            .context("no added eigenvalue in the window")?;
        rows.push_str(&format!(
            "{big_l},{:.8},{tilde:.8},{:.8}\n",
            tn.parameter,
            target - tilde
        ));
        gaps.push((big_l, target - tilde));
        out.quantity(format!("lambda_tilde_L_{big_l}"), "spectral", tilde);
    }
    out.table("added_eigenvalue", rows);
    out.series("gap_vs_length", gaps.clone());
    let contained = gaps.iter().all(|(_, g)| *g >= -1e-6);
    let shrinking = gaps.windows(2).all(|w| w[1].1 < w[0].1);
    if p.n >= 3 {
        out.assert_that(
            "added eigenvalue contained below the target",
            contained,
            format!("{gaps:?}"),
        );
        out.assert_that(
            "window gap shrinks with tube length",
            shrinking,
            format!("{gaps:?}"),
        );
    } else {
        // the window mechanism needs dim >= 3; in dim 2 the run is
        // informational and the outcome is recorded, not asserted
        out.quantity(
            "dim2_window_contained",
            "spectral",
            if contained { 1.0 } else { 0.0 },
        );
        out.quantity(
            "dim2_window_shrinking",
            "spectral",
            if shrinking { 1.0 } else { 0.0 },
        );
    }
    Ok(out)
}

fn model_spectrum(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let p = &cfg.parameters;
    let mut out = RunOutput::default();
    let spec = model_metric_spectrum(p.n, p.d_cover, p.count, p.mesh)?;
    out.table("model_spectrum", spec.to_csv());
    out.series(
        "eigenvalue_trajectory",
        spec.eigenvalues
            .iter()
            .enumerate()
            .map(|(i, l)| (i as f64, *l))
            .collect(),
    );
    if p.d_cover == 1 {
        let max_rel = round_sphere_mismatch(&spec, p.n);
        out.quantity("max_rel_err_vs_round", "spectral", max_rel);
        out.assert_that(
            "d = 1 reproduces the round sphere within 0.5%",
            max_rel < 5e-3,
            format!("max rel {max_rel:.2e}"),
        );
    } else {
        let sphere_vals: Vec<f64> = (0..8)
            .map(|k| (k * (k + p.n - 1)) as f64)
            .collect();
        let novel: Vec<f64> = spec
            .eigenvalues
            .iter()
            .copied()
            .filter(|&l| l < 12.0 && sphere_vals.iter().all(|s| (l - s).abs() > 0.05))
            .collect();
        out.quantity("novel_below_12", "spectral", novel.len() as f64);
        out.assert_that(
            "d >= 2 contributes non-sphere eigenvalues",
            novel.len() >= 3,
            format!("{} novel values, first {:?}", novel.len(), novel.first()),
        );
    }
    Ok(out)
}

fn round_sphere_mismatch(spec: &SpectrumResult, n: u32) -> f64 {
    let mut max_rel: f64 = 0.0;
    let mut idx = 0usize;
    let mut k = 0u32;
    while idx < spec.eigenvalues.len() {
        let exact = (k * (k + n - 1)) as f64;
        let m = multiplicity(n, k).unwrap() as usize;
        for j in 0..m.min(spec.eigenvalues.len() - idx) {
            let got = spec.eigenvalues[idx + j];
            if exact == 0.0 {
                max_rel = max_rel.max(got.abs());
            } else {
                max_rel = max_rel.max((got / exact - 1.0).abs());
            }
        }
        idx += m;
        k += 1;
    }
    max_rel
}

fn identity_audit(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let p = &cfg.parameters;
    let mut out = RunOutput::default();
    let mut table = String::from("n,k,addition_dev,gradient_dev,hessian_dev,euler_dev,pass\n");
    let mut all = true;
    for &n in &p.n_list {
        for k in 0..=p.k_max {
            let basis = build_basis(n, k)?;
            let d = (n + 1) as usize;
            let pts = sample_points(d, p.samples, 2.0, cfg.seed + (100 * n + k) as u64);
            let dirs = sample_points(d, p.samples, 1.5, cfg.seed + (200 * n + k) as u64);
            let rep = identity_report(&basis, &pts, &dirs, cfg.seed);
            table.push_str(&format!(
                "{n},{k},{:.3e},{:.3e},{:.3e},{:.3e},{}\n",
                rep.addition_dev, rep.gradient_dev, rep.hessian_dev, rep.euler_dev, rep.pass
            ));
            all &= rep.pass;
        }
    }
    out.table("identities", table);
    out.assert_that(
        "harmonic identities hold to 1e-9",
        all,
        format!("n in {:?}, k <= {}", p.n_list, p.k_max),
    );
    // geometric health on a default suite
    let mut hs_max: f64 = 0.0;
    for imm in [
        sphere(2, 1.0)?,
        spheroid(2, 1.3, 1.0)?,
        dumbbell(2, 2, 0.1, 0.0)?,
        bispherical_immersion(2, 0, catenoidal_profile(2, 0, 0.1, 0.28)?)?,
    ] {
        hs_max = hs_max.max(hsiung_residual(&imm));
    }
    out.quantity("hsiung_residual_max", "geometry", hs_max);
    out.assert_that(
        "Hsiung identity residual < 1e-8 across the audit suite",
        hs_max < 1e-8,
        format!("max {hs_max:.2e}"),
    );
    Ok(out)
}
