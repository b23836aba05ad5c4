//! Orthonormal bases of homogeneous harmonic polynomials on R^{n+1} and the
//! addition-theorem identities they satisfy.
//!
//! Basis synthesis is exact where it matters: the harmonicity constraint
//! Delta P = 0 is solved over the rationals (nullspace of the coefficient-level
//! Laplacian in the lex monomial basis), and inner products on S^n come from
//! the exact moment table. Orthonormalization is a two-pass Cholesky in f64.

use crate::linalg::sym_condition_number;
use crate::moments::SphereMomentTable;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the basis degree; m_k growth makes larger degrees a
/// deliberate configuration choice.
pub const DEFAULT_MAX_DEGREE: u32 = 6;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("ambient dimension must satisfy n >= 2, got n = {0}")]
    DimensionTooSmall(i64),
    #[error("degree {0} exceeds the configured cap {1}")]
    DegreeTooLarge(u32, u32),
    #[error("negative degree")]
    NegativeDegree,
    #[error("Gram matrix condition number {0:.3e} exceeds the bound {1:.3e}")]
    IllConditioned(f64, f64),
    #[error("mean-curvature norm must be positive, got {0}")]
    NonpositiveNorm(f64),
    #[error("basis JSON does not satisfy its invariants: {0}")]
    InvalidImport(String),
}

/// Multiplicity m_k of the k-th distinct Laplace eigenvalue of S^n:
/// m_k = C(n+k-1, k) (n+2k-1)/(n+k-1).
pub fn multiplicity(n: u32, k: u32) -> Result<u64, BasisError> {
    if n < 2 {
        return Err(BasisError::DimensionTooSmall(n as i64));
    }
    if k == 0 {
        return Ok(1);
    }
    let binom = binomial(n as u64 + k as u64 - 1, k as u64);
    let num = binom * (n as u128 + 2 * k as u128 - 1);
    let den = n as u128 + k as u128 - 1;
    debug_assert_eq!(num % den, 0);
    Ok((num / den) as u64)
}

/// mu_k^{S_M} = k(n+k-1) ||H||_2^2, the k-th distinct eigenvalue of the
/// comparison sphere of radius 1/||H||_2.
pub fn sphere_eigenvalue(n: u32, k: u32, h2norm: f64) -> Result<f64, BasisError> {
    if n < 2 {
        return Err(BasisError::DimensionTooSmall(n as i64));
    }
    if !(h2norm > 0.0) {
        return Err(BasisError::NonpositiveNorm(h2norm));
    }
    Ok(k as f64 * (n + k - 1) as f64 * h2norm * h2norm)
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Monomials of total degree k in d variables, lexicographic (first exponent
/// largest first). The ordering is the determinism contract for coefficients.
pub fn monomials(d: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut idx = vec![0u32; d];
    fn rec(d: usize, pos: usize, left: u32, idx: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == d - 1 {
            idx[pos] = left;
            out.push(idx.clone());
            return;
        }
        for e in (0..=left).rev() {
            idx[pos] = e;
            rec(d, pos + 1, left - e, idx, out);
        }
    }
    rec(d, 0, k, &mut idx, &mut out);
    out
}

/// An orthonormal basis of H^k(R^{n+1}) in the lex monomial basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicBasis {
    /// Ambient dimension n+1 (the sphere is S^n).
    pub ambient_dim_plus_one: usize,
    pub degree: u32,
    pub monomial_order: String,
    /// Row-major m_k x (monomial count); row i holds the coefficients of P_i.
    pub coefficients: Vec<Vec<f64>>,
    pub gram_tolerance: f64,
    #[serde(skip)]
    monomials: Vec<Vec<u32>>,
}

/// Builds the degree-k orthonormal basis. Deterministic given (n, k).
pub fn build_basis(n: u32, k: u32) -> Result<HarmonicBasis, BasisError> {
    build_basis_capped(n, k, DEFAULT_MAX_DEGREE, 1e12)
}

pub fn build_basis_capped(
    n: u32,
    k: u32,
    max_degree: u32,
    cond_bound: f64,
) -> Result<HarmonicBasis, BasisError> {
    if n < 2 {
        return Err(BasisError::DimensionTooSmall(n as i64));
    }
    if k > max_degree {
        return Err(BasisError::DegreeTooLarge(k, max_degree));
    }
    let d = (n + 1) as usize;
    let mons = monomials(d, k);
    let m_k = multiplicity(n, k)? as usize;

    // exact nullspace of the coefficient-level Laplacian
    let null = harmonicity_nullspace(d, k, &mons);
    assert_eq!(null.len(), m_k, "nullspace dimension must equal m_k");

    // convert to f64 and orthonormalize against the exact moment table
    let table = SphereMomentTable::new(d, 2 * k);
    let raw: Vec<Vec<f64>> = null
        .iter()
        .map(|row| row.iter().map(|q| q.to_f64().unwrap()).collect())
        .collect();
    let mut basis = orthonormalize(&raw, &mons, &table, cond_bound)?;
    // second pass: Gram of the once-orthonormalized set is ~identity, so a
    // repeat drives the deviation to roundoff
    basis = orthonormalize(&basis, &mons, &table, f64::INFINITY)?;

    Ok(HarmonicBasis {
        ambient_dim_plus_one: d,
        degree: k,
        monomial_order: "lex".to_string(),
        coefficients: basis,
        gram_tolerance: 1e-10,
        monomials: mons,
    })
}

fn harmonicity_nullspace(d: usize, k: u32, mons: &[Vec<u32>]) -> Vec<Vec<BigRational>> {
    let ncols = mons.len();
    if k < 2 {
        // every polynomial of degree 0 or 1 is harmonic
        return (0..ncols)
            .map(|j| {
                let mut v = vec![BigRational::zero(); ncols];
                v[j] = BigRational::from(BigInt::from(1));
                v
            })
            .collect();
    }
    let lower = monomials(d, k - 2);
    let row_of = |m: &[u32]| lower.iter().position(|x| x[..] == *m).unwrap();
    // constraint matrix: rows = degree k-2 monomials, cols = degree k monomials
    let mut c = vec![vec![BigRational::zero(); ncols]; lower.len()];
    for (j, alpha) in mons.iter().enumerate() {
        for i in 0..d {
            if alpha[i] >= 2 {
                let mut beta = alpha.clone();
                beta[i] -= 2;
                let coef = BigInt::from(alpha[i] as u64 * (alpha[i] as u64 - 1));
                let r = row_of(&beta);
                c[r][j] += BigRational::from(coef);
            }
        }
    }
    rational_nullspace(&mut c, ncols)
}

/// Row-reduce over Q and read the nullspace off the free columns.
fn rational_nullspace(c: &mut [Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let nrows = c.len();
    let mut pivot_col_of_row = Vec::new();
    let mut row = 0usize;
    for col in 0..ncols {
        let mut piv = None;
        for r in row..nrows {
            if !c[r][col].is_zero() {
                piv = Some(r);
                break;
            }
        }
        let Some(piv) = piv else { continue };
        c.swap(row, piv);
        let inv = c[row][col].recip();
        for j in col..ncols {
            let v = &c[row][j] * &inv;
            c[row][j] = v;
        }
        for r in 0..nrows {
            if r != row && !c[r][col].is_zero() {
                let f = c[r][col].clone();
                for j in col..ncols {
                    let v = &c[r][j] - &f * &c[row][j];
                    c[r][j] = v;
                }
            }
        }
        pivot_col_of_row.push(col);
        row += 1;
        if row == nrows {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row;
    let mut out = Vec::new();
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); ncols];
        v[free] = BigRational::from(BigInt::from(1));
        for (r, &pc) in pivot_cols.iter().enumerate() {
            let coeff = c[r][free].clone();
            v[pc] = -coeff;
        }
        out.push(v);
    }
    out
}

fn orthonormalize(
    rows: &[Vec<f64>],
    mons: &[Vec<u32>],
    table: &SphereMomentTable,
    cond_bound: f64,
) -> Result<Vec<Vec<f64>>, BasisError> {
    let m = rows.len();
    let nm = mons.len();
    let d = table.ambient_dim;
    // moment matrix of monomial pairs: Gram = C Mom C^T
    let mut mom = DMatrix::<f64>::zeros(nm, nm);
    let mut sum = vec![0u32; d];
    for i in 0..nm {
        for j in i..nm {
            let mut odd = false;
            for t in 0..d {
                sum[t] = mons[i][t] + mons[j][t];
                odd |= sum[t] % 2 == 1;
            }
            if !odd {
                let v = table.get(&sum);
                mom[(i, j)] = v;
                mom[(j, i)] = v;
            }
        }
    }
    let c = DMatrix::<f64>::from_fn(m, nm, |a, j| rows[a][j]);
    let gram = &c * &mom * c.transpose();
    if cond_bound.is_finite() {
        let cond = sym_condition_number(&gram);
        if !(cond <= cond_bound) {
            return Err(BasisError::IllConditioned(cond, cond_bound));
        }
    }
    let chol = gram
        .cholesky()
        .ok_or(BasisError::IllConditioned(f64::INFINITY, cond_bound))?;
    let l = chol.l();
    // rows_new = L^-1 rows  (in-order, so the result is the Gram-Schmidt basis)
    let ncols = mons.len();
    let mut out = vec![vec![0.0; ncols]; m];
    for j in 0..ncols {
        let mut col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        // forward substitution
        for a in 0..m {
            let mut v = col[a];
            for b in 0..a {
                v -= l[(a, b)] * col[b];
            }
            col[a] = v / l[(a, a)];
        }
        for a in 0..m {
            out[a][j] = col[a];
        }
    }
    Ok(out)
}

/// <P, Q>_{S^n} = (1/Vol S^n) int P Q, from the exact moment table. The
/// exact oracle behind the basis orthonormality checks.
pub fn sphere_inner_product(
    p: &[f64],
    q: &[f64],
    mons: &[Vec<u32>],
    table: &SphereMomentTable,
) -> f64 {
    let mut acc = 0.0;
    let d = table.ambient_dim;
    let mut sum = vec![0u32; d];
    for (i, &ci) in p.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        for (j, &cj) in q.iter().enumerate() {
            if cj == 0.0 {
                continue;
            }
            let mut odd = false;
            for t in 0..d {
                sum[t] = mons[i][t] + mons[j][t];
                odd |= sum[t] % 2 == 1;
            }
            if !odd {
                acc += ci * cj * table.get(&sum);
            }
        }
    }
    acc
}

/// Values, gradients and Hessians of every basis element at a point.
#[derive(Debug, Clone)]
pub struct Jet {
    pub values: Vec<f64>,
    /// `gradients[i][a]` = d_a P_i
    pub gradients: Vec<Vec<f64>>,
    /// `hessians[i][a][b]` = d_a d_b P_i
    pub hessians: Vec<Vec<Vec<f64>>>,
}

impl HarmonicBasis {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    /// n such that the basis lives on R^{n+1}.
    pub fn n(&self) -> u32 {
        (self.ambient_dim_plus_one - 1) as u32
    }

    pub fn evaluate_jet(&self, x: &[f64]) -> Jet {
        let d = self.ambient_dim_plus_one;
        assert_eq!(x.len(), d);
        let m = self.len();
        let mut values = vec![0.0; m];
        let mut gradients = vec![vec![0.0; d]; m];
        let mut hessians = vec![vec![vec![0.0; d]; d]; m];
        for (mi, alpha) in self.monomials.iter().enumerate() {
            let base: f64 = (0..d).map(|t| x[t].powi(alpha[t] as i32)).product();
            // partials of the monomial
            let mut grad = vec![0.0; d];
            for a in 0..d {
                if alpha[a] > 0 {
                    grad[a] = alpha[a] as f64 * pow_drop(x, alpha, a, d);
                }
            }
            for i in 0..m {
                let c = self.coefficients[i][mi];
                if c == 0.0 {
                    continue;
                }
                values[i] += c * base;
                for a in 0..d {
                    gradients[i][a] += c * grad[a];
                }
                for a in 0..d {
                    if alpha[a] == 0 {
                        continue;
                    }
                    for b in a..d {
                        let h = if a == b {
                            if alpha[a] < 2 {
                                continue;
                            }
                            alpha[a] as f64 * (alpha[a] - 1) as f64 * pow_drop2(x, alpha, a, a, d)
                        } else {
                            if alpha[b] == 0 {
                                continue;
                            }
                            alpha[a] as f64 * alpha[b] as f64 * pow_drop2(x, alpha, a, b, d)
                        };
                        hessians[i][a][b] += c * h;
                        if a != b {
                            hessians[i][b][a] += c * h;
                        }
                    }
                }
            }
        }
        Jet {
            values,
            gradients,
            hessians,
        }
    }

    /// Applies the ambient Laplacian at coefficient level; the result is the
    /// coefficient vector of Delta P_i over the degree-(k-2) monomials.
    pub fn laplacian_coefficients(&self, i: usize) -> Vec<f64> {
        let d = self.ambient_dim_plus_one;
        if self.degree < 2 {
            return vec![];
        }
        let lower = monomials(d, self.degree - 2);
        let mut out = vec![0.0; lower.len()];
        for (mi, alpha) in self.monomials.iter().enumerate() {
            let c = self.coefficients[i][mi];
            if c == 0.0 {
                continue;
            }
            for a in 0..d {
                if alpha[a] >= 2 {
                    let mut beta = alpha.clone();
                    beta[a] -= 2;
                    let r = lower.iter().position(|x| x[..] == beta[..]).unwrap();
                    out[r] += c * alpha[a] as f64 * (alpha[a] - 1) as f64;
                }
            }
        }
        out
    }

    /// Export per the interchange schema (monomial order is part of the data).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n(),
            "k": self.degree,
            "monomial_order": "lex",
            "coefficients": self.coefficients.iter().flatten().copied().collect::<Vec<f64>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, BasisError> {
        let n = v["n"]
            .as_u64()
            .ok_or_else(|| BasisError::InvalidImport("missing n".into()))? as u32;
        let k = v["k"]
            .as_u64()
            .ok_or_else(|| BasisError::InvalidImport("missing k".into()))? as u32;
        let order = v["monomial_order"].as_str().unwrap_or("lex");
        if order != "lex" {
            return Err(BasisError::InvalidImport(format!(
                "unsupported monomial order {order}"
            )));
        }
        let flat: Vec<f64> = v["coefficients"]
            .as_array()
            .ok_or_else(|| BasisError::InvalidImport("missing coefficients".into()))?
            .iter()
            .map(|x| x.as_f64().unwrap_or(f64::NAN))
            .collect();
        let d = (n + 1) as usize;
        let mons = monomials(d, k);
        let m_k = multiplicity(n, k)? as usize;
        if flat.len() != m_k * mons.len() || flat.iter().any(|x| !x.is_finite()) {
            return Err(BasisError::InvalidImport(format!(
                "expected {} x {} finite coefficients",
                m_k,
                mons.len()
            )));
        }
        let coefficients = flat.chunks(mons.len()).map(|c| c.to_vec()).collect();
        Ok(HarmonicBasis {
            ambient_dim_plus_one: d,
            degree: k,
            monomial_order: "lex".into(),
            coefficients,
            gram_tolerance: 1e-10,
            monomials: mons,
        })
    }
}

fn pow_drop(x: &[f64], alpha: &[u32], a: usize, d: usize) -> f64 {
    let mut acc = 1.0;
    for t in 0..d {
        let e = if t == a { alpha[t] - 1 } else { alpha[t] };
        acc *= x[t].powi(e as i32);
    }
    acc
}

fn pow_drop2(x: &[f64], alpha: &[u32], a: usize, b: usize, d: usize) -> f64 {
    let mut acc = 1.0;
    for t in 0..d {
        let mut e = alpha[t];
        if t == a {
            e -= 1;
        }
        if t == b {
            e -= 1;
        }
        acc *= x[t].powi(e as i32);
    }
    acc
}

/// Deviations of the addition-theorem identities measured on samples.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub n: u32,
    pub k: u32,
    pub seed: u64,
    /// max relative deviation of sum_i P_i^2 - m_k |x|^{2k}
    pub addition_dev: f64,
    /// max relative deviation of the gradient identity (k >= 1)
    pub gradient_dev: f64,
    /// max relative deviation of the Hessian identity (k >= 2; 0 = 0 for k = 1)
    pub hessian_dev: f64,
    /// max relative deviation of the Euler identities dP(x) = kP,
    /// Hess P(x, u) = (k-1) dP(u)
    pub euler_dev: f64,
    pub pass: bool,
}

/// Verifies the addition theorem, the gradient identity and the Hessian identity at the
/// given samples. Deviations above 1e-9 are flagged as a basis-construction
/// failure.
pub fn identity_report(
    basis: &HarmonicBasis,
    sample_points: &[Vec<f64>],
    direction_samples: &[Vec<f64>],
    seed: u64,
) -> IdentityReport {
    assert!(!sample_points.is_empty());
    let n = basis.n();
    let k = basis.degree;
    let d = basis.ambient_dim_plus_one;
    let m_k = basis.len() as f64;
    let mu_k = (k * (n + k - 1)) as f64;
    let alpha_nk = if k >= 1 {
        (k as f64 - 1.0) * ((k * k) as f64 + mu_k) * (n as f64 + 2.0 * k as f64 - 3.0)
    } else {
        0.0
    };
    let mut add_dev: f64 = 0.0;
    let mut grad_dev: f64 = 0.0;
    let mut hess_dev: f64 = 0.0;
    let mut euler_dev: f64 = 0.0;
    for (pi, x) in sample_points.iter().enumerate() {
        let jet = basis.evaluate_jet(x);
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let sum_p2: f64 = jet.values.iter().map(|v| v * v).sum();
        let target = m_k * r2.powi(k as i32);
        if target > 0.0 {
            add_dev = add_dev.max((sum_p2 - target).abs() / target);
        }
        if k >= 1 {
            let u = &direction_samples[pi % direction_samples.len()];
            let u2: f64 = u.iter().map(|v| v * v).sum();
            let ux: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
            let sum_dp2: f64 = jet
                .gradients
                .iter()
                .map(|g| {
                    let dp: f64 = g.iter().zip(u).map(|(a, b)| a * b).sum();
                    dp * dp
                })
                .sum();
            let target = m_k
                * (mu_k / n as f64 * r2.powi(k as i32 - 1) * u2
                    + ((k * k) as f64 - mu_k / n as f64) * ux * ux * r2.powi(k as i32 - 2));
            if target > 0.0 {
                grad_dev = grad_dev.max((sum_dp2 - target).abs() / target);
            }
            // Euler: dP(x) = k P(x); Hess P(x, u) = (k-1) dP(u)
            for i in 0..basis.len() {
                let dpx: f64 = jet.gradients[i].iter().zip(x).map(|(a, b)| a * b).sum();
                let scale = (m_k * r2.powi(k as i32)).sqrt().max(1e-30);
                euler_dev = euler_dev.max((dpx - k as f64 * jet.values[i]).abs() / scale);
                if k >= 2 {
                    let mut hxu = 0.0;
                    let mut dpu = 0.0;
                    for a in 0..d {
                        dpu += jet.gradients[i][a] * u[a];
                        for b in 0..d {
                            hxu += jet.hessians[i][a][b] * x[a] * u[b];
                        }
                    }
                    let scale = (m_k * ((k * k) as f64 + mu_k) * r2.powi(k as i32 - 1)).sqrt()
                        * u2.sqrt().max(1e-30);
                    euler_dev = euler_dev.max((hxu - (k as f64 - 1.0) * dpu).abs() / scale);
                }
            }
        }
        if k >= 2 {
            let sum_h2: f64 = jet
                .hessians
                .iter()
                .map(|h| h.iter().flatten().map(|v| v * v).sum::<f64>())
                .sum();
            let target = m_k * alpha_nk * r2.powi(k as i32 - 2);
            if target > 0.0 {
                hess_dev = hess_dev.max((sum_h2 - target).abs() / target);
            }
        }
    }
    let pass = add_dev < 1e-9 && grad_dev < 1e-9 && hess_dev < 1e-9 && euler_dev < 1e-10;
    IdentityReport {
        n,
        k,
        seed,
        addition_dev: add_dev,
        gradient_dev: grad_dev,
        hessian_dev: hess_dev,
        euler_dev,
        pass,
    }
}

/// Reproducible sample points with |x| <= radius (rejection from the cube).
pub fn sample_points(d: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-radius..radius)).collect();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 <= radius * radius && r2 > 1e-8 {
            out.push(x);
        }
    }
    out
}
