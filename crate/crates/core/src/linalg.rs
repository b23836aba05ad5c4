//! Eigen-solvers for the two pencil shapes the crate produces: symmetric
//! tridiagonal (radial finite elements) and small dense symmetric (Galerkin
//! trial spaces).

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("mass matrix is not positive definite (row {0}); trial functions are numerically dependent")]
    MassNotPositiveDefinite(usize),
    #[error("bracket search failed for eigenvalue index {0}")]
    BracketFailure(usize),
}

/// Symmetric tridiagonal pencil (S, M): S u = lambda M u with
/// S = tridiag(s_off, s_diag, s_off), M = tridiag(m_off, m_diag, m_off).
#[derive(Debug, Clone)]
pub struct TridiagPencil {
    pub s_diag: Vec<f64>,
    pub s_off: Vec<f64>,
    pub m_diag: Vec<f64>,
    pub m_off: Vec<f64>,
}

impl TridiagPencil {
    pub fn dim(&self) -> usize {
        self.s_diag.len()
    }

    /// Number of eigenvalues strictly below `lam`, by the inertia of the
    /// LDL^T factorization of S - lam M (Sturm sequence).
    pub fn count_below(&self, lam: f64) -> usize {
        let n = self.dim();
        let mut count = 0;
        let mut d_prev = 0.0_f64;
        for i in 0..n {
            let a = self.s_diag[i] - lam * self.m_diag[i];
            let d = if i == 0 {
                a
            } else {
                let b = self.s_off[i - 1] - lam * self.m_off[i - 1];
                a - b * b / d_prev
            };
            // guard exact zeros so the recurrence can continue
            let d = if d == 0.0 { f64::MIN_POSITIVE } else { d };
            if d < 0.0 {
                count += 1;
            }
            d_prev = d;
        }
        count
    }

    /// Lowest `count` eigenvalues, ascending, by index bisection. `rel_tol`
    /// is the per-eigenvalue relative tolerance.
    pub fn lowest_eigenvalues(&self, count: usize, rel_tol: f64) -> Result<Vec<f64>, EigenError> {
        let n = self.dim();
        let count = count.min(n);
        if count == 0 {
            return Ok(vec![]);
        }
        // lower bound: stiffness can have a zero mode; generalized eigenvalues
        // of these FEM pencils are >= 0 up to roundoff
        let mut lo = -1.0;
        while self.count_below(lo) > 0 {
            lo *= 4.0;
            if lo < -1e18 {
                return Err(EigenError::BracketFailure(0));
            }
        }
        // upper bound: grow until enough eigenvalues are below
        let mut hi = 1.0;
        while self.count_below(hi) < count {
            hi *= 4.0;
            if hi > 1e18 {
                return Err(EigenError::BracketFailure(count - 1));
            }
        }
        let mut out = Vec::with_capacity(count);
        for idx in 0..count {
            let (mut a, mut b) = (lo, hi);
            // invariant: count_below(a) <= idx < count_below(b)
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if self.count_below(mid) <= idx {
                    a = mid;
                } else {
                    b = mid;
                }
                if (b - a).abs() <= rel_tol * (1.0 + 0.5 * (a.abs() + b.abs())) {
                    break;
                }
            }
            out.push(0.5 * (a + b));
        }
        Ok(out)
    }
}

/// Lowest eigenvalues of the dense symmetric pencil S u = lambda M u.
/// M must be positive definite; the pencil is reduced by Cholesky
/// (L^-1 S L^-T) and handed to a symmetric eigensolver.
pub fn dense_generalized_eigenvalues(
    s: &DMatrix<f64>,
    m: &DMatrix<f64>,
) -> Result<Vec<f64>, EigenError> {
    let n = s.nrows();
    assert_eq!(s.ncols(), n);
    assert_eq!(m.nrows(), n);
    let chol = m
        .clone()
        .cholesky()
        .ok_or(EigenError::MassNotPositiveDefinite(0))?;
    let l = chol.l();
    // A = L^-1 S L^-T
    let mut a = s.clone();
    // solve L X = S (in place, column by column), then L Y^T = X^T
    let lt = l.transpose();
    for j in 0..n {
        let mut col = a.column(j).into_owned();
        l.solve_lower_triangular_mut(&mut col);
        a.set_column(j, &col);
    }
    let mut a = a.transpose();
    for j in 0..n {
        let mut col = a.column(j).into_owned();
        l.solve_lower_triangular_mut(&mut col);
        a.set_column(j, &col);
    }
    // symmetrize against roundoff
    let a = 0.5 * (&a + a.transpose());
    let _ = lt;
    let eig = a.symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(vals)
}

/// Condition number estimate (ratio of extreme eigenvalues) of a symmetric
/// positive semi-definite matrix; used for Gram-matrix health checks.
pub fn sym_condition_number(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for v in eig.eigenvalues.iter() {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
