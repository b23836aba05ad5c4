//! Exact normalized monomial moments over round spheres.
//!
//! For a multi-index alpha on R^d the normalized moment is
//! (1/Vol S^{d-1}) \int_{S^{d-1}} x^alpha dv. It vanishes unless every
//! exponent is even, and for alpha = 2 beta equals
//!   prod_i (2 beta_i - 1)!!  /  prod_{j=0}^{|beta|-1} (d + 2j),
//! a rational number. This is the exact inner-product oracle used to
//! orthonormalize harmonic polynomial bases without quadrature error.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Exact normalized moment of x^alpha on S^{d-1} (d = number of ambient
/// variables, i.e. d = n + 1 for S^n). Total function: odd exponents give 0.
pub fn moment_exact(alpha: &[u32], d: usize) -> BigRational {
    assert_eq!(alpha.len(), d, "multi-index length must equal ambient dim");
    if alpha.iter().any(|&a| a % 2 == 1) {
        return BigRational::zero();
    }
    let mut num = BigInt::one();
    let mut total_beta: u64 = 0;
    for &a in alpha {
        let beta = (a / 2) as u64;
        total_beta += beta;
        for j in 1..=beta {
            num *= BigInt::from(2 * j - 1); // (2 beta - 1)!!
        }
    }
    let mut den = BigInt::one();
    for j in 0..total_beta {
        den *= BigInt::from(d as u64 + 2 * j);
    }
    BigRational::new(num, den)
}

/// Same as [`moment_exact`] but as f64.
pub fn moment_f64(alpha: &[u32], d: usize) -> f64 {
    moment_exact(alpha, d).to_f64().unwrap()
}

/// Precomputed table of all normalized moments up to a total degree.
#[derive(Debug, Clone)]
pub struct SphereMomentTable {
    /// Number of ambient variables d (the sphere is S^{d-1}).
    pub ambient_dim: usize,
    pub max_total_degree: u32,
    moments: BTreeMap<Vec<u32>, f64>,
}

impl SphereMomentTable {
    pub fn new(ambient_dim: usize, max_total_degree: u32) -> Self {
        let mut moments = BTreeMap::new();
        let mut idx = vec![0u32; ambient_dim];
        fill(&mut moments, &mut idx, 0, max_total_degree, ambient_dim);
        SphereMomentTable {
            ambient_dim,
            max_total_degree,
            moments,
        }
    }

    /// Table lookup; falls back to direct evaluation above the table degree.
    pub fn get(&self, alpha: &[u32]) -> f64 {
        if alpha.iter().any(|&a| a % 2 == 1) {
            return 0.0;
        }
        match self.moments.get(alpha) {
            Some(&v) => v,
            None => moment_f64(alpha, self.ambient_dim),
        }
    }
}

fn fill(
    map: &mut BTreeMap<Vec<u32>, f64>,
    idx: &mut Vec<u32>,
    pos: usize,
    budget: u32,
    d: usize,
) {
    if pos == d {
        map.insert(idx.clone(), moment_f64(idx, d));
        return;
    }
    // only even exponents carry nonzero moments
    let mut e = 0;
    while e <= budget {
        idx[pos] = e;
        fill(map, idx, pos + 1, budget - e, d);
        e += 2;
    }
    idx[pos] = 0;
}
