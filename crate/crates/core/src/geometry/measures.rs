//! Orbit-reduced integrals over revolution immersions: volume, L^p norms,
//! the Hsiung identity residual, extrinsic radius, and the concentration
//! diagnostics of the pinching analysis.

use super::{EndKind, Fibration, GeometryError, RadialJet, RevolutionImmersion};
use crate::cutoff::Cutoff;
use crate::quad::gauss16;
use serde::Serialize;

/// Vol(S^d) for the fiber factors (Vol S^0 = 2).
pub fn sphere_volume(d: u32) -> f64 {
    match d {
        0 => 2.0,
        _ => {
            let dp1 = (d + 1) as f64;
            2.0 * std::f64::consts::PI.powf(dp1 / 2.0) / gamma_half(d + 1)
        }
    }
}

/// Gamma(m/2) for integer m >= 1.
fn gamma_half(m: u32) -> f64 {
    if m % 2 == 0 {
        // Gamma(k) = (k-1)!
        (1..m / 2).map(|i| i as f64).product::<f64>().max(1.0)
    } else {
        // Gamma(k + 1/2) = (2k-1)!! / 2^k sqrt(pi)
        let k = m / 2;
        let mut acc = std::f64::consts::PI.sqrt();
        for i in 1..=k {
            acc *= (2 * i - 1) as f64 / 2.0;
        }
        acc
    }
}

/// Pre-evaluated panel-Gauss nodes over every arc of an immersion.
/// Integrals of radial fields reduce to a weighted sum over these jets.
pub struct OrbitQuadrature {
    pub nodes: Vec<(RadialJet, f64)>,
    pub fiber_volume: f64,
}

impl OrbitQuadrature {
    pub fn new(imm: &RevolutionImmersion, panels_per_arc: usize) -> Self {
        let rule = gauss16();
        let mut nodes = Vec::new();
        for a in 0..imm.arc_count() {
            let (q0, q1) = imm.arc_range(a);
            let h = (q1 - q0) / panels_per_arc as f64;
            for p in 0..panels_per_arc {
                let (pa, pb) = (q0 + p as f64 * h, q0 + (p + 1) as f64 * h);
                let mid = 0.5 * (pa + pb);
                let half = 0.5 * (pb - pa);
                for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                    nodes.push((imm.radial_jet(a, mid + half * x), w * half));
                }
            }
        }
        let fiber_volume = match imm.fib {
            Fibration::BiSpherical { d1, d2 } => sphere_volume(d1) * sphere_volume(d2),
            Fibration::Generatrix { fiber_dim } => sphere_volume(fiber_dim),
        };
        OrbitQuadrature {
            nodes,
            fiber_volume,
        }
    }

    /// Integral of f(jet) against the volume measure, fiber volumes excluded.
    pub fn integrate<F: Fn(&RadialJet) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(|(j, w)| w * f(j) * j.weight).sum()
    }

    /// Full volume of the immersion.
    pub fn volume(&self) -> f64 {
        self.integrate(|_| 1.0) * self.fiber_volume
    }
}

/// Scalar fields with closed-form orbit reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialField {
    MeanCurvature,
    SecondFormOp,
    SecondFormFrob,
    /// | |X| - c |
    AbsXMinus(f64),
    /// | H - c |
    HMinus(f64),
    /// | |H| - c |
    AbsHMinus(f64),
}

pub fn field_value(f: RadialField, jet: &RadialJet) -> f64 {
    match f {
        RadialField::MeanCurvature => jet.mean_curvature,
        RadialField::SecondFormOp => jet.b_op,
        RadialField::SecondFormFrob => jet.b_frob,
        RadialField::AbsXMinus(c) => (jet.abs_x_sq().sqrt() - c).abs(),
        RadialField::HMinus(c) => (jet.mean_curvature - c).abs(),
        RadialField::AbsHMinus(c) => (jet.mean_curvature.abs() - c).abs(),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LpNorm {
    /// Volume-normalized norm (1/v int |f|^p)^{1/p}; sup norm for p = inf.
    pub normalized: f64,
    /// Unnormalized integral int |f|^p (the sup for p = inf).
    pub unnormalized_integral: f64,
}

/// ||f||_p with the crate-wide volume normalization; p = f64::INFINITY gives
/// the sup norm by dense sampling (including arc-end limits).
pub fn lp_norm(
    imm: &RevolutionImmersion,
    field: RadialField,
    p: f64,
) -> Result<LpNorm, GeometryError> {
    if p.is_infinite() {
        let mut sup: f64 = 0.0;
        for a in 0..imm.arc_count() {
            let (q0, q1) = imm.arc_range(a);
            for i in 0..=2000 {
                let q = q0 + (q1 - q0) * i as f64 / 2000.0;
                sup = sup.max(field_value(field, &imm.radial_jet(a, q)).abs());
            }
        }
        return Ok(LpNorm {
            normalized: sup,
            unnormalized_integral: sup,
        });
    }
    if p < 1.0 {
        return Err(GeometryError::Invalid(format!("p = {p} < 1")));
    }
    // |B|_op is a max of curvature magnitudes, so |field|^p can have
    // derivative kinks where the argmax switches; adaptive bisection
    // refines through them where fixed panels stall
    let arc_integral = |tol: f64| -> f64 {
        let mut acc = 0.0;
        for a in 0..imm.arc_count() {
            let (q0, q1) = imm.arc_range(a);
            acc += crate::quad::integrate_adaptive(
                &|q: f64| {
                    let j = imm.radial_jet(a, q);
                    field_value(field, &j).abs().powf(p) * j.weight
                },
                q0,
                q1,
                tol,
            );
        }
        acc
    };
    let fiber_volume = OrbitQuadrature::new(imm, 4).fiber_volume;
    let coarse = arc_integral(1e-7) * fiber_volume;
    let fine = arc_integral(1e-10) * fiber_volume;
    let drift = (fine - coarse).abs() / (1.0 + fine.abs());
    if drift > 1e-6 {
        return Err(GeometryError::NonConvergentQuadrature(drift));
    }
    let vol = OrbitQuadrature::new(imm, 48).volume();
    Ok(LpNorm {
        normalized: (fine / vol).powf(1.0 / p),
        unnormalized_integral: fine,
    })
}

/// ||H||_2, the scale of the comparison sphere S_M.
pub fn h2_norm(imm: &RevolutionImmersion) -> f64 {
    let quad = OrbitQuadrature::new(imm, 48);
    let vol = quad.integrate(|_| 1.0);
    (quad.integrate(|j| j.mean_curvature * j.mean_curvature) / vol).sqrt()
}

/// |(1/v) int H <nu, X> dv - 1|: vanishes identically on closed immersions,
/// so it measures quadrature health.
pub fn hsiung_residual(imm: &RevolutionImmersion) -> f64 {
    let imm = imm.recentered();
    let quad = OrbitQuadrature::new(&imm, 48);
    let vol = quad.integrate(|_| 1.0);
    let val = quad.integrate(|j| j.mean_curvature * j.x_dot_normal()) / vol;
    (val - 1.0).abs()
}

/// Least enclosing-ball radius with the center restricted to the symmetry
/// axis (exact for revolution bodies); returns (r_M, center on the axis).
pub fn extrinsic_radius(imm: &RevolutionImmersion) -> (f64, f64) {
    match imm.fib {
        Fibration::BiSpherical { .. } => {
            // the symmetry group fixes only the origin
            let mut r: f64 = 0.0;
            for a in 0..imm.arc_count() {
                let (q0, q1) = imm.arc_range(a);
                for i in 0..=2000 {
                    let q = q0 + (q1 - q0) * i as f64 / 2000.0;
                    r = r.max(imm.radial_jet(a, q).abs_x_sq().sqrt());
                }
            }
            (r, 0.0)
        }
        Fibration::Generatrix { .. } => {
            let mut pts = Vec::new();
            for a in 0..imm.arc_count() {
                let (q0, q1) = imm.arc_range(a);
                for i in 0..=2000 {
                    let q = q0 + (q1 - q0) * i as f64 / 2000.0;
                    let j = imm.radial_jet(a, q);
                    pts.push((j.rho2, j.rho1)); // (x, rho)
                }
            }
            let rad = |c: f64| -> f64 {
                pts.iter()
                    .map(|&(x, rho)| ((x - c) * (x - c) + rho * rho).sqrt())
                    .fold(0.0, f64::max)
            };
            let (mut lo, mut hi) = pts
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &(x, _)| {
                    (l.min(x), h.max(x))
                });
            // rad is convex in c: golden-section search
            let gr = (5f64.sqrt() - 1.0) / 2.0;
            let (mut c1, mut c2) = (hi - gr * (hi - lo), lo + gr * (hi - lo));
            let (mut f1, mut f2) = (rad(c1), rad(c2));
            for _ in 0..200 {
                if f1 < f2 {
                    hi = c2;
                    c2 = c1;
                    f2 = f1;
                    c1 = hi - gr * (hi - lo);
                    f1 = rad(c1);
                } else {
                    lo = c1;
                    c1 = c2;
                    f1 = f2;
                    c2 = lo + gr * (hi - lo);
                    f2 = rad(c2);
                }
                if hi - lo < 1e-12 * (1.0 + hi.abs()) {
                    break;
                }
            }
            let c = 0.5 * (lo + hi);
            (rad(c), c)
        }
    }
}

/// The six concentration diagnostics of the pinching analysis, all by
/// orbit-reduced quadrature on the recentered immersion.
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub eta: f64,
    pub h2: f64,
    /// ||X^T||_2
    pub xt_l2: f64,
    /// ||X - (H/||H||_2^2) nu||_2
    pub x_minus_hnu_l2: f64,
    /// ||phi Z||_2 with Z = nu - H X
    pub phi_z_l2: f64,
    /// || |H| - ||H||_2 ||_2
    pub h_dev_l2: f64,
    /// Vol(M \ A_eta) / v_M
    pub annulus_deficit: f64,
    /// ||phi||_2^2
    pub phi_mass: f64,
    /// ||phi^2 (H^2 - ||H||_2^2)||_1
    pub phi_h2_dev_l1: f64,
    /// ||X||_2
    pub x_l2: f64,
}

/// Vol(M \ A_eta) / v_M for the annulus A_eta of relative width eta around
/// the comparison sphere; no cutoff involved, so any eta > 0 is valid.
pub fn annulus_deficit(imm: &RevolutionImmersion, eta: f64) -> f64 {
    let imm = imm.recentered();
    let quad = OrbitQuadrature::new(&imm, 48);
    let vol = quad.integrate(|_| 1.0);
    let h2 = (quad.integrate(|j| j.mean_curvature * j.mean_curvature) / vol).sqrt();
    let fine = OrbitQuadrature::new(&imm, 256);
    fine.integrate(|j| {
        let r = j.abs_x_sq().sqrt();
        if (r - 1.0 / h2).abs() > eta / h2 {
            1.0
        } else {
            0.0
        }
    }) / vol
}

pub fn concentration_report(imm: &RevolutionImmersion, eta: f64) -> ConcentrationReport {
    let imm = imm.recentered();
    let quad = OrbitQuadrature::new(&imm, 48);
    let vol = quad.integrate(|_| 1.0);
    let h2 = (quad.integrate(|j| j.mean_curvature * j.mean_curvature) / vol).sqrt();
    let cut = Cutoff::new(h2, eta);
    let nrm = |f: &dyn Fn(&RadialJet) -> f64| (quad.integrate(f) / vol).sqrt();
    let xt_l2 = nrm(&|j: &RadialJet| {
        let c = j.x_dot_normal();
        (j.abs_x_sq() - c * c).max(0.0)
    });
    let x_minus_hnu_l2 = nrm(&|j: &RadialJet| {
        let c = j.x_dot_normal();
        let h = j.mean_curvature;
        j.abs_x_sq() - 2.0 * (h / (h2 * h2)) * c + h * h / (h2 * h2 * h2 * h2)
    });
    let phi_z_l2 = nrm(&|j: &RadialJet| {
        let phi = cut.phi(j.abs_x_sq());
        let z2 = 1.0 - 2.0 * j.mean_curvature * j.x_dot_normal()
            + j.mean_curvature * j.mean_curvature * j.abs_x_sq();
        phi * phi * z2.max(0.0)
    });
    let h_dev_l2 = nrm(&|j: &RadialJet| {
        let d = j.mean_curvature.abs() - h2;
        d * d
    });
    // indicator integrand: dense panels keep the crossing error small
    let fine = OrbitQuadrature::new(&imm, 256);
    let annulus_deficit = fine.integrate(|j| {
        let r = j.abs_x_sq().sqrt();
        if (r - 1.0 / h2).abs() > eta / h2 {
            1.0
        } else {
            0.0
        }
    }) / vol;
    let phi_mass = quad.integrate(|j| {
        let phi = cut.phi(j.abs_x_sq());
        phi * phi
    }) / vol;
    let phi_h2_dev_l1 = quad.integrate(|j| {
        let phi = cut.phi(j.abs_x_sq());
        phi * phi * (j.mean_curvature * j.mean_curvature - h2 * h2).abs()
    }) / vol;
    let x_l2 = nrm(&|j: &RadialJet| j.abs_x_sq());
    ConcentrationReport {
        eta,
        h2,
        xt_l2,
        x_minus_hnu_l2,
        phi_z_l2,
        h_dev_l2,
        annulus_deficit,
        phi_mass,
        phi_h2_dev_l1,
        x_l2,
    }
}

/// Emit r -> (H, |B|_op, theta) rows for plotting; one row per sample.
pub fn curvature_table(imm: &RevolutionImmersion, samples_per_arc: usize) -> Vec<(f64, f64, f64, f64)> {
    let mut out = Vec::new();
    let mut s_accum = 0.0;
    for a in 0..imm.arc_count() {
        let (q0, q1) = imm.arc_range(a);
        let h = (q1 - q0) / samples_per_arc as f64;
        for i in 0..=samples_per_arc {
            let q = q0 + i as f64 * h;
            let j = imm.radial_jet(a, q);
            out.push((s_accum + (q - q0) * j.speed, j.mean_curvature, j.b_op, j.weight));
        }
        let jmid = imm.radial_jet(a, 0.5 * (q0 + q1));
        s_accum += (q1 - q0) * jmid.speed;
    }
    out
}

/// End kinds visible to the spectral assembly.
pub fn end_kinds(imm: &RevolutionImmersion) -> [EndKind; 2] {
    imm.ends
}
