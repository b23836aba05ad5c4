//! Polynomials on product-of-spheres fibers, with exact moment pairing.
//!
//! Restricting an ambient polynomial to a revolution immersion at a fixed
//! base point substitutes x = (rho1 y, rho2 z) (bi-spherical) or
//! x = (rho y, x_axial) (generatrix), leaving a polynomial in the fiber
//! variables. Fiber integrals then reduce to products of exact sphere
//! moments, which is how the Galerkin matrices and the residual norms avoid
//! any quadrature over the fibers.

use crate::moments::SphereMomentTable;
use std::collections::BTreeMap;

/// Packed fiber multi-index: 8 bits per variable, up to 8 variables.
pub type Key = u64;

pub fn pack(exps: &[u32]) -> Key {
    debug_assert!(exps.len() <= 8);
    let mut k: u64 = 0;
    for (i, &e) in exps.iter().enumerate() {
        debug_assert!(e < 256);
        k |= (e as u64) << (8 * i);
    }
    k
}

fn unpack(k: Key, len: usize, out: &mut [u32]) {
    for (i, o) in out.iter_mut().enumerate().take(len) {
        *o = ((k >> (8 * i)) & 0xff) as u32;
    }
}

/// Sparse polynomial in the fiber variables.
#[derive(Debug, Clone, Default)]
pub struct FiberPoly {
    pub terms: BTreeMap<Key, f64>,
}

impl FiberPoly {
    pub fn zero() -> Self {
        FiberPoly::default()
    }

    pub fn add_term(&mut self, key: Key, c: f64) {
        if c != 0.0 {
            *self.terms.entry(key).or_insert(0.0) += c;
        }
    }

    pub fn add_scaled(&mut self, other: &FiberPoly, s: f64) {
        if s == 0.0 {
            return;
        }
        for (&k, &c) in &other.terms {
            self.add_term(k, s * c);
        }
    }

    /// Multiply by the fiber variable with index `var`.
    pub fn times_var(&self, var: usize) -> FiberPoly {
        let mut out = FiberPoly::zero();
        for (&k, &c) in &self.terms {
            out.add_term(k + (1u64 << (8 * var)), c);
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        for v in self.terms.values_mut() {
            *v *= s;
        }
    }
}

/// Fiber block structure plus its moment tables.
pub struct FiberSpace {
    /// Variables in block 1 (y lives on S^{block1 - 1}).
    pub block1: usize,
    /// Variables in block 2 (0 = generatrix: no second fiber).
    pub block2: usize,
    mom1: SphereMomentTable,
    mom2: Option<SphereMomentTable>,
}

impl FiberSpace {
    pub fn bispherical(d1: u32, d2: u32, max_degree: u32) -> Self {
        FiberSpace {
            block1: d1 as usize + 1,
            block2: d2 as usize + 1,
            mom1: SphereMomentTable::new(d1 as usize + 1, max_degree),
            mom2: Some(SphereMomentTable::new(d2 as usize + 1, max_degree)),
        }
    }

    pub fn generatrix(fiber_dim: u32, max_degree: u32) -> Self {
        FiberSpace {
            block1: fiber_dim as usize + 1,
            block2: 0,
            mom1: SphereMomentTable::new(fiber_dim as usize + 1, max_degree),
            mom2: None,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.block1 + self.block2
    }

    /// Normalized fiber average of the monomial with packed exponents `key`.
    pub fn moment(&self, key: Key) -> f64 {
        let mut exps = [0u32; 8];
        unpack(key, self.n_vars(), &mut exps);
        let m1 = self.mom1.get(&exps[..self.block1]);
        if m1 == 0.0 {
            return 0.0;
        }
        match &self.mom2 {
            Some(t) => m1 * t.get(&exps[self.block1..self.block1 + self.block2]),
            None => m1,
        }
    }

    /// E[f g] over the fiber.
    pub fn expect_product(&self, f: &FiberPoly, g: &FiberPoly) -> f64 {
        let mut acc = 0.0;
        for (&ka, &ca) in &f.terms {
            for (&kb, &cb) in &g.terms {
                let m = self.moment(ka + kb);
                if m != 0.0 {
                    acc += ca * cb * m;
                }
            }
        }
        acc
    }

    pub fn expect(&self, f: &FiberPoly) -> f64 {
        f.terms.iter().map(|(&k, &c)| c * self.moment(k)).sum()
    }

    /// Substitute the base-point scalars into an ambient polynomial given by
    /// `coeffs` over `mons` (d ambient variables = block1 + block2 for
    /// bi-spherical, block1 + 1 for generatrix with the axial variable last).
    pub fn substitute(
        &self,
        coeffs: &[f64],
        mons: &[Vec<u32>],
        rho1: f64,
        rho2_or_axial: f64,
    ) -> FiberPoly {
        let mut out = FiberPoly::zero();
        for (c, alpha) in coeffs.iter().zip(mons) {
            if *c == 0.0 {
                continue;
            }
            if self.block2 > 0 {
                let s1: u32 = alpha[..self.block1].iter().sum();
                let s2: u32 = alpha[self.block1..].iter().sum();
                let scale = rho1.powi(s1 as i32) * rho2_or_axial.powi(s2 as i32);
                out.add_term(pack(alpha), c * scale);
            } else {
                let s1: u32 = alpha[..self.block1].iter().sum();
                let ax = alpha[self.block1];
                let scale = rho1.powi(s1 as i32) * rho2_or_axial.powi(ax as i32);
                out.add_term(pack(&alpha[..self.block1]), c * scale);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_factorizes_over_blocks() {
        // y in R^2 (S^1), z in R^1 (S^0): E[y1^2 z^2] = 1/2 * 1
        let fs = FiberSpace::bispherical(1, 0, 8);
        let key = pack(&[2, 0, 2]);
        assert!((fs.moment(key) - 0.5).abs() < 1e-14);
        assert_eq!(fs.moment(pack(&[1, 0, 0])), 0.0);
    }

    #[test]
    fn substitution_generatrix() {
        // ambient R^3 = (y1, y2) fiber + axial; P = x3^2 gives a scalar
        let fs = FiberSpace::generatrix(1, 8);
        let mons = crate::harmonic::monomials(3, 2);
        let mut coeffs = vec![0.0; mons.len()];
        let idx = mons.iter().position(|m| m == &vec![0, 0, 2]).unwrap();
        coeffs[idx] = 1.0;
        let f = fs.substitute(&coeffs, &mons, 2.0, 3.0);
        assert_eq!(f.terms.len(), 1);
        assert!((f.terms[&0] - 9.0).abs() < 1e-14);
    }

    #[test]
    fn expectation_of_square_positive() {
        let fs = FiberSpace::generatrix(2, 8);
        let mut f = FiberPoly::zero();
        f.add_term(pack(&[1, 0, 0]), 1.0);
        f.add_term(pack(&[0, 1, 0]), -2.0);
        // E[(y1 - 2 y2)^2] = (1 + 4)/3 on S^2
        let v = fs.expect_product(&f, &f);
        assert!((v - 5.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn times_var_shifts_exponent() {
        let mut f = FiberPoly::zero();
        f.add_term(pack(&[1, 0]), 3.0);
        let g = f.times_var(1);
        assert!((g.terms[&pack(&[1, 1])] - 3.0).abs() < 1e-15);
    }

    /// Moment pairing against trapezoid quadrature on the circle (exact for
    /// trigonometric polynomials at this node count), including the S^0
    /// block of the bi-spherical case.
    #[test]
    fn expectation_matches_circle_quadrature() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let eval_circle = |f: &FiberPoly, theta: f64, z: f64, nvars: usize| -> f64 {
            let (c, s) = (theta.cos(), theta.sin());
            f.terms
                .iter()
                .map(|(&k, &coef)| {
                    let mut e = [0u32; 8];
                    unpack(k, nvars, &mut e);
                    coef * c.powi(e[0] as i32)
                        * s.powi(e[1] as i32)
                        * if nvars > 2 { z.powi(e[2] as i32) } else { 1.0 }
                })
                .sum()
        };
        for trial in 0..20 {
            let bisph = trial % 2 == 0;
            let nvars = if bisph { 3 } else { 2 };
            let fs = if bisph {
                FiberSpace::bispherical(1, 0, 16)
            } else {
                FiberSpace::generatrix(1, 16)
            };
            let mut f = FiberPoly::zero();
            let mut g = FiberPoly::zero();
            for _ in 0..5 {
                let e = [
                    rng.random_range(0..4u32),
                    rng.random_range(0..4u32),
                    rng.random_range(0..3u32),
                ];
                f.add_term(pack(&e[..nvars]), rng.random_range(-1.0..1.0));
                let e2 = [
                    rng.random_range(0..4u32),
                    rng.random_range(0..4u32),
                    rng.random_range(0..3u32),
                ];
                g.add_term(pack(&e2[..nvars]), rng.random_range(-1.0..1.0));
            }
            let exact = fs.expect_product(&f, &g);
            let n_nodes = 64;
            let mut quad = 0.0;
            for i in 0..n_nodes {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / n_nodes as f64;
                for z in [-1.0, 1.0] {
                    quad += eval_circle(&f, theta, z, nvars) * eval_circle(&g, theta, z, nvars);
                }
            }
            quad /= 2.0 * n_nodes as f64;
            assert!(
                (exact - quad).abs() < 1e-12 * (1.0 + exact.abs()),
                "trial {trial}: {exact} vs {quad}"
            );
        }
    }
}
