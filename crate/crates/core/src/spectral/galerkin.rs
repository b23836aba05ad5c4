//! Rayleigh-Ritz upper bounds from restricted harmonic polynomials.
//!
//! The trial space is the span of the orthonormal H^j(R^{n+1}) bases for
//! j = 0..K restricted to the immersion. Mass and stiffness use
//! grad^M P = grad^0 P - dP(nu) nu with the closed-form normal; base-curve
//! integrals are quadrature, fiber integrals are exact moments. By min-max
//! the generalized eigenvalues bound lambda_0..lambda_{D-1} from above.

use super::SpectralError;
use crate::fiber::{FiberPoly, FiberSpace};
use crate::geometry::{Fibration, OrbitQuadrature, RevolutionImmersion};
use crate::harmonic::{build_basis_capped, monomials};
use crate::linalg::{dense_generalized_eigenvalues, sym_condition_number};
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct GalerkinResult {
    /// Certified upper bounds for lambda_0 .. lambda_{dim-1}.
    pub upper_bounds: Vec<f64>,
    pub trial_dim: usize,
    pub max_degree: u32,
    pub mass_condition: f64,
}

struct TrialFunction {
    degree: u32,
    coeffs: Vec<f64>,
    /// `grad_coeffs[a]` = coefficients of d_a P over the degree-(k-1) monomials
    grad_coeffs: Vec<Vec<f64>>,
}

pub(crate) fn gradient_coefficients(
    coeffs: &[f64],
    mons: &[Vec<u32>],
    d: usize,
    k: u32,
) -> Vec<Vec<f64>> {
    if k == 0 {
        return vec![vec![]; d];
    }
    let lower = monomials(d, k - 1);
    let pos = |m: &[u32]| lower.iter().position(|x| x[..] == *m).unwrap();
    let mut out = vec![vec![0.0; lower.len()]; d];
    for (c, alpha) in coeffs.iter().zip(mons) {
        if *c == 0.0 {
            continue;
        }
        for a in 0..d {
            if alpha[a] > 0 {
                let mut beta = alpha.clone();
                beta[a] -= 1;
                out[a][pos(&beta)] += c * alpha[a] as f64;
            }
        }
    }
    out
}

/// dP(W) for a fiber-radial vector field W = (w1 y, w2 z) (bi-spherical) or
/// (w1 y, w2 e_axis) (generatrix), from the substituted gradient polys.
pub(crate) fn directional_derivative(
    fs: &FiberSpace,
    grads: &[FiberPoly],
    w1: f64,
    w2: f64,
) -> FiberPoly {
    let mut out = FiberPoly::zero();
    for a in 0..fs.block1 {
        out.add_scaled(&grads[a].times_var(a), w1);
    }
    if fs.block2 > 0 {
        for a in 0..fs.block2 {
            out.add_scaled(&grads[fs.block1 + a].times_var(fs.block1 + a), w2);
        }
    } else {
        out.add_scaled(&grads[fs.block1], w2);
    }
    out
}

/// Upper bounds for the first eigenvalues via the degree <= K harmonic trial
/// space. Errors with `MassRankDeficient` if the restricted trial functions
/// are numerically dependent.
pub fn galerkin_upper_bounds(
    imm: &RevolutionImmersion,
    max_degree: u32,
    panels_per_arc: usize,
) -> Result<GalerkinResult, SpectralError> {
    let n = imm.n;
    let d = (n + 1) as usize;
    let fs = match imm.fib {
        Fibration::BiSpherical { d1, d2 } => FiberSpace::bispherical(d1, d2, 2 * max_degree + 2),
        Fibration::Generatrix { fiber_dim } => FiberSpace::generatrix(fiber_dim, 2 * max_degree + 2),
    };
    let mut trials = Vec::new();
    let mut mons_by_k = Vec::new();
    for k in 0..=max_degree {
        mons_by_k.push(monomials(d, k));
        let basis = build_basis_capped(n, k, max_degree.max(6), 1e14)?;
        for row in &basis.coefficients {
            trials.push(TrialFunction {
                degree: k,
                coeffs: row.clone(),
                grad_coeffs: gradient_coefficients(row, &mons_by_k[k as usize], d, k),
            });
        }
    }
    let dim = trials.len();
    let quad = OrbitQuadrature::new(imm, panels_per_arc);
    let vol = quad.integrate(|_| 1.0);
    let mut mass = DMatrix::<f64>::zeros(dim, dim);
    let mut stiff = DMatrix::<f64>::zeros(dim, dim);
    for (jet, wq) in &quad.nodes {
        let w = wq * jet.weight / vol;
        // substituted values, gradients and dP(nu) per trial function
        let mut vals = Vec::with_capacity(dim);
        let mut grads: Vec<Vec<FiberPoly>> = Vec::with_capacity(dim);
        let mut dnu = Vec::with_capacity(dim);
        for t in &trials {
            let k = t.degree as usize;
            let f = fs.substitute(&t.coeffs, &mons_by_k[k], jet.rho1, jet.rho2);
            let g: Vec<FiberPoly> = if t.degree == 0 {
                vec![FiberPoly::zero(); d]
            } else {
                t.grad_coeffs
                    .iter()
                    .map(|gc| fs.substitute(gc, &mons_by_k[k - 1], jet.rho1, jet.rho2))
                    .collect()
            };
            let dn = directional_derivative(&fs, &g, jet.normal1, jet.normal2);
            vals.push(f);
            grads.push(g);
            dnu.push(dn);
        }
        for i in 0..dim {
            for j in i..dim {
                let mij = fs.expect_product(&vals[i], &vals[j]);
                let mut amb = 0.0;
                for a in 0..d {
                    amb += fs.expect_product(&grads[i][a], &grads[j][a]);
                }
                let sij = amb - fs.expect_product(&dnu[i], &dnu[j]);
                mass[(i, j)] += w * mij;
                stiff[(i, j)] += w * sij;
                if i != j {
                    mass[(j, i)] = mass[(i, j)];
                    stiff[(j, i)] = stiff[(i, j)];
                }
            }
        }
    }
    let cond = sym_condition_number(&mass);
    if !cond.is_finite() || cond > 1e12 {
        return Err(SpectralError::MassRankDeficient(cond));
    }
    let upper_bounds = dense_generalized_eigenvalues(&stiff, &mass)
        .map_err(|_| SpectralError::MassRankDeficient(cond))?;
    Ok(GalerkinResult {
        upper_bounds,
        trial_dim: dim,
        max_degree,
        mass_condition: cond,
    })
}
