//! Almost-eigenfunction residuals: || Delta(phi P) - mu_k^{S_M} phi P ||_2
//! for restricted harmonic polynomials P, evaluated pointwise through
//!   Delta P = mu_k H^2 P + (n + 2k - 2) H dP(Z) + Hess^0 P(Z, Z),
//!   Delta phi = -2 n psi' <nu, Z> - 4 psi'' |X^T|^2,
//!   <d phi, dP> = 2 psi' dP(X^T),
//! with Z = nu - H X and the band cutoff phi = psi(|X|^2). All terms are
//! fiber-radial, so the L^2 norms reduce to base quadrature x exact moments.

use super::galerkin::directional_derivative;
use super::SpectralError;
use crate::cutoff::Cutoff;
use crate::fiber::{FiberPoly, FiberSpace};
use crate::geometry::{h2_norm, Fibration, OrbitQuadrature, RevolutionImmersion};
use crate::harmonic::{build_basis_capped, monomials, HarmonicBasis};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    /// ||Delta(phi P_i) - mu_k^{S_M} phi P_i||_2 / ||phi P_i||_2
    pub residual_rel: f64,
    /// | ||H||_2^{2k} ||phi P_i||_2^2 - 1 |  (P_i is unit on S^n)
    pub mass_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub degree: u32,
    pub eta: f64,
    pub h2: f64,
    pub mu_k_sm: f64,
    pub rows: Vec<ResidualRow>,
    pub max_residual_rel: f64,
    pub max_mass_deviation: f64,
}

fn hessian_coefficients(
    coeffs: &[f64],
    mons: &[Vec<u32>],
    d: usize,
    k: u32,
) -> Vec<Vec<Vec<f64>>> {
    // [a][b] -> coefficients over degree-(k-2) monomials, a <= b stored both ways
    if k < 2 {
        return vec![vec![vec![]; d]; d];
    }
    let lower = monomials(d, k - 2);
    let pos = |m: &[u32]| lower.iter().position(|x| x[..] == *m).unwrap();
    let mut out = vec![vec![vec![0.0; lower.len()]; d]; d];
    for (c, alpha) in coeffs.iter().zip(mons) {
        if *c == 0.0 {
            continue;
        }
        for a in 0..d {
            if alpha[a] == 0 {
                continue;
            }
            for b in a..d {
                let coef = if a == b {
                    if alpha[a] < 2 {
                        continue;
                    }
                    (alpha[a] * (alpha[a] - 1)) as f64
                } else {
                    if alpha[b] == 0 {
                        continue;
                    }
                    (alpha[a] * alpha[b]) as f64
                };
                let mut beta = alpha.clone();
                beta[a] -= 1;
                beta[b] -= 1;
                let p = pos(&beta);
                out[a][b][p] += c * coef;
                if a != b {
                    out[b][a][p] += c * coef;
                }
            }
        }
    }
    out
}

/// Hess P(W, W) for a fiber-radial field W = (w1 y, w2 z | w2 e_axis).
/// For a generatrix the axial slot contributes no fiber variable.
fn hessian_quadratic(fs: &FiberSpace, hess: &[Vec<FiberPoly>], w1: f64, w2: f64) -> FiberPoly {
    let b1 = fs.block1;
    let nv = if fs.block2 > 0 { b1 + fs.block2 } else { b1 + 1 };
    let fiber_var = |i: usize| i < b1 || fs.block2 > 0;
    let mut out = FiberPoly::zero();
    for a in 0..nv {
        for b in 0..nv {
            let wa = if a < b1 { w1 } else { w2 };
            let wb = if b < b1 { w1 } else { w2 };
            let mut term = hess[a][b].clone();
            if fiber_var(a) {
                term = term.times_var(a);
            }
            if fiber_var(b) {
                term = term.times_var(b);
            }
            out.add_scaled(&term, wa * wb);
        }
    }
    out
}

/// Residual and mass-deviation rows for the degree-k basis on `imm`.
pub fn residual_norm(
    imm: &RevolutionImmersion,
    degree: u32,
    eta: f64,
    panels_per_arc: usize,
) -> Result<ResidualReport, SpectralError> {
    let imm = imm.recentered();
    let n = imm.n;
    let d = (n + 1) as usize;
    let k = degree;
    let basis: HarmonicBasis = build_basis_capped(n, k, k.max(6), 1e14)?;
    let m_k = basis.len();
    let mons_k = monomials(d, k);
    let mons_k1 = if k >= 1 { monomials(d, k - 1) } else { vec![] };
    let fs = match imm.fib {
        Fibration::BiSpherical { d1, d2 } => FiberSpace::bispherical(d1, d2, 2 * k + 4),
        Fibration::Generatrix { fiber_dim } => FiberSpace::generatrix(fiber_dim, 2 * k + 4),
    };
    let h2 = h2_norm(&imm);
    let mu_k = (k * (n + k - 1)) as f64;
    let mu_sm = mu_k * h2 * h2;
    let cut = Cutoff::new(h2, eta);
    // per element: gradient and Hessian coefficient vectors
    let grad_coeffs: Vec<Vec<Vec<f64>>> = basis
        .coefficients
        .iter()
        .map(|row| super::galerkin::gradient_coefficients(row, &mons_k, d, k))
        .collect();
    let hess_coeffs: Vec<Vec<Vec<Vec<f64>>>> = basis
        .coefficients
        .iter()
        .map(|row| hessian_coefficients(row, &mons_k, d, k))
        .collect();
    let mons_k2 = if k >= 2 { monomials(d, k - 2) } else { vec![] };

    let quad = OrbitQuadrature::new(&imm, panels_per_arc);
    let vol = quad.integrate(|_| 1.0);
    let mut num = vec![0.0; m_k];
    let mut den = vec![0.0; m_k];
    for (jet, wq) in &quad.nodes {
        let w = wq * jet.weight / vol;
        let x2 = jet.abs_x_sq();
        let h = jet.mean_curvature;
        let c = jet.x_dot_normal();
        let phi = cut.phi(x2);
        let psi_p = cut.phi_d(x2);
        let psi_pp = cut.phi_dd(x2);
        // everything vanishes outside the cutoff support
        if phi == 0.0 && psi_p == 0.0 && psi_pp == 0.0 {
            continue;
        }
        let xt2 = (x2 - c * c).max(0.0);
        let nu_z = 1.0 - h * c;
        let delta_phi = -2.0 * n as f64 * psi_p * nu_z - 4.0 * psi_pp * xt2;
        // fiber-radial component pairs
        let (z1, z2) = (jet.normal1 - h * jet.rho1, jet.normal2 - h * jet.rho2);
        let (xt1, xt2c) = (jet.rho1 - c * jet.normal1, jet.rho2 - c * jet.normal2);
        for i in 0..m_k {
            let p = fs.substitute(&basis.coefficients[i], &mons_k, jet.rho1, jet.rho2);
            let grads: Vec<FiberPoly> = if k >= 1 {
                grad_coeffs[i]
                    .iter()
                    .map(|gc| fs.substitute(gc, &mons_k1, jet.rho1, jet.rho2))
                    .collect()
            } else {
                vec![FiberPoly::zero(); d]
            };
            let dp_z = directional_derivative(&fs, &grads, z1, z2);
            let dp_xt = directional_derivative(&fs, &grads, xt1, xt2c);
            let hess_zz = if k >= 2 {
                let hp: Vec<Vec<FiberPoly>> = (0..d)
                    .map(|a| {
                        (0..d)
                            .map(|b| {
                                fs.substitute(&hess_coeffs[i][a][b], &mons_k2, jet.rho1, jet.rho2)
                            })
                            .collect()
                    })
                    .collect();
                hessian_quadratic(&fs, &hp, z1, z2)
            } else {
                FiberPoly::zero()
            };
            // Delta P = mu_k H^2 P + (n + 2k - 2) H dP(Z) + Hess P(Z, Z)
            let mut lap = FiberPoly::zero();
            lap.add_scaled(&p, mu_k * h * h);
            lap.add_scaled(&dp_z, ((n + 2 * k) as f64 - 2.0) * h);
            lap.add_scaled(&hess_zz, 1.0);
            // G = P Delta(phi) - 2 <d phi, dP> + phi Delta P - mu_k^{S_M} phi P
            let mut g = FiberPoly::zero();
            g.add_scaled(&p, delta_phi);
            g.add_scaled(&dp_xt, -4.0 * psi_p);
            g.add_scaled(&lap, phi);
            g.add_scaled(&p, -mu_sm * phi);
            num[i] += w * fs.expect_product(&g, &g);
            let mut pp = p.clone();
            pp.scale(phi);
            den[i] += w * fs.expect_product(&pp, &pp);
        }
    }
    let rows: Vec<ResidualRow> = (0..m_k)
        .map(|i| ResidualRow {
            residual_rel: (num[i].max(0.0) / den[i].max(1e-300)).sqrt(),
            mass_deviation: (h2.powi(2 * k as i32) * den[i] - 1.0).abs(),
        })
        .collect();
    let max_residual_rel = rows.iter().map(|r| r.residual_rel).fold(0.0, f64::max);
    let max_mass_deviation = rows.iter().map(|r| r.mass_deviation).fold(0.0, f64::max);
    Ok(ResidualReport {
        degree: k,
        eta,
        h2,
        mu_k_sm: mu_sm,
        rows,
        max_residual_rel,
        max_mass_deviation,
    })
}
