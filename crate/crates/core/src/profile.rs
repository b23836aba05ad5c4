//! Radial profiles for the bi-spherical construction: the catenoid-type
//! neck piece f(r) = eps * int_1^{r/eps} dt / sqrt(t^{2m} - 1), a concave C^2
//! bridge, and the constant tail.
//!
//! Near the neck the naive (r/eps)^{2m} - 1 cancels catastrophically; all
//! evaluations go through ((1+w)^{2m} - 1)/w = sum_{j=1}^{2m} C(2m,j) w^{j-1},
//! which is exact.

use crate::quad::gauss16;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("need 0 < eps < a < pi/10, got eps = {0}, a = {1}")]
    BadNeckParameters(f64, f64),
    #[error("need 0 <= k <= n-2, got n = {0}, k = {1}")]
    BadCodimension(u32, u32),
    #[error("no concave C^2 bridge for (eps, a) = ({0}, {1}): phi'' reaches {2:.3e} at r = {3:.6}")]
    BridgeNotConcave(f64, f64, f64, f64),
    #[error("spline needs at least two knots, strictly increasing")]
    BadSpline,
}

/// phi on an r-interval with two derivatives.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileFunction {
    /// phi == value; round sphere of radius 1 + value.
    Constant { value: f64 },
    /// Three-piece neck profile of the glued construction.
    Catenoidal {
        eps: f64,
        a: f64,
        /// n - k - 1
        m: u32,
        /// f(a + eps), frozen at build time
        f_join: f64,
        /// bridge derivative Hermite data: g(0) = c0, g'(0) = c1 (in r)
        c0: f64,
        c1: f64,
        /// constant value past 2a + eps
        b: f64,
    },
    /// Cubic Hermite spline through (knots, values) with slopes `derivs`.
    Spline {
        knots: Vec<f64>,
        values: Vec<f64>,
        derivs: Vec<f64>,
    },
}

/// ((1+w)^{2m} - 1)/w = sum_{j=1}^{2m} C(2m,j) w^{j-1}; stable for w near 0.
fn poly_ratio(w: f64, m: u32) -> f64 {
    let mm = 2 * m;
    let mut binom = 1.0_f64;
    let mut acc = 0.0;
    let mut wpow = 1.0;
    for j in 1..=mm {
        binom = binom * (mm - j + 1) as f64 / j as f64;
        acc += binom * wpow;
        wpow *= w;
    }
    acc
}

/// f'(r) for the catenoid piece, stable down to r = eps.
fn neck_fp(r: f64, eps: f64, m: u32) -> f64 {
    let w = r / eps - 1.0;
    if w <= 0.0 {
        return f64::INFINITY;
    }
    1.0 / (w * poly_ratio(w, m)).sqrt()
}

/// f(r) = eps * int_0^{sqrt(r/eps - 1)} 2 du / sqrt(poly_ratio(u^2)).
fn neck_f(r: f64, eps: f64, m: u32) -> f64 {
    let w = (r / eps - 1.0).max(0.0);
    let umax = w.sqrt();
    if umax == 0.0 {
        return 0.0;
    }
    let rule = gauss16();
    let panels = (umax / 0.25).ceil() as usize;
    eps * rule.integrate_panels(0.0, umax, panels.max(1), |u| 2.0 / poly_ratio(u * u, m).sqrt())
}

impl ProfileFunction {
    /// Left end of the r-domain (pi/2 is always the right end).
    pub fn r_min(&self) -> f64 {
        match self {
            ProfileFunction::Constant { .. } => 0.0,
            ProfileFunction::Catenoidal { eps, .. } => *eps,
            ProfileFunction::Spline { knots, .. } => knots[0],
        }
    }

    /// (phi, phi', phi'') at r.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        match self {
            ProfileFunction::Constant { value } => (*value, 0.0, 0.0),
            ProfileFunction::Catenoidal {
                eps,
                a,
                m,
                f_join,
                c0,
                c1,
                b,
            } => {
                if r <= a + eps {
                    let fp = neck_fp(r, *eps, *m);
                    let fpp = -(*m as f64) * (1.0 + fp * fp) * fp / r;
                    (neck_f(r, *eps, *m), fp, fpp)
                } else if r <= 2.0 * a + eps {
                    bridge_eval(r, *eps, *a, *f_join, *c0, *c1)
                } else {
                    (*b, 0.0, 0.0)
                }
            }
            ProfileFunction::Spline {
                knots,
                values,
                derivs,
            } => spline_eval(knots, values, derivs, r),
        }
    }

    /// Catenoid-piece jet from u = sqrt(r/eps - 1); exact where eval(r) would
    /// cancel. Only meaningful for the catenoidal kind with r <= a + eps.
    pub fn eval_neck(&self, u: f64) -> (f64, f64, f64) {
        match self {
            ProfileFunction::Catenoidal { eps, m, .. } => {
                let r = eps * (1.0 + u * u);
                let fp = if u == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / (u.abs() * poly_ratio(u * u, *m).sqrt())
                };
                let fpp = -(*m as f64) * (1.0 + fp * fp) * fp / r;
                let rule = gauss16();
                let panels = (u.abs() / 0.25).ceil().max(1.0) as usize;
                let f = eps
                    * rule.integrate_panels(0.0, u.abs(), panels, |t| {
                        2.0 / poly_ratio(t * t, *m).sqrt()
                    });
                (f, fp, fpp)
            }
            _ => self.eval(self.r_min()),
        }
    }

    /// phi' * dr/du along the u-chart; finite and smooth through u = 0 where
    /// phi' itself blows up. Equals 2 eps / sqrt(poly_ratio(u^2)).
    pub fn neck_fp_du(&self, u: f64) -> f64 {
        match self {
            ProfileFunction::Catenoidal { eps, m, .. } => 2.0 * eps / poly_ratio(u * u, *m).sqrt(),
            _ => 0.0,
        }
    }

    /// Constant tail value (b for catenoidal, value for constant).
    pub fn tail_value(&self) -> f64 {
        match self {
            ProfileFunction::Constant { value } => *value,
            ProfileFunction::Catenoidal { b, .. } => *b,
            ProfileFunction::Spline { values, .. } => *values.last().unwrap(),
        }
    }

    /// Inverse of the neck piece: r in [eps, a+eps] with f(r) = t, t >= 0.
    pub fn neck_inverse(&self, t: f64) -> f64 {
        let ProfileFunction::Catenoidal { eps, a, .. } = self else {
            return self.r_min();
        };
        let (mut lo, mut hi) = (*eps, a + eps);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid).0 < t {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 * (1.0 + hi) {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

fn bridge_eval(r: f64, eps: f64, a: f64, f_join: f64, c0: f64, c1: f64) -> (f64, f64, f64) {
    let s = (r - (a + eps)) / a;
    let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
    let h10 = s * s * s - 2.0 * s * s + s;
    let dh00 = 6.0 * s * s - 6.0 * s;
    let dh10 = 3.0 * s * s - 4.0 * s + 1.0;
    let i00 = 0.5 * s.powi(4) - s.powi(3) + s;
    let i10 = 0.25 * s.powi(4) - 2.0 / 3.0 * s.powi(3) + 0.5 * s * s;
    let val = f_join + a * (c0 * i00 + a * c1 * i10);
    let g = c0 * h00 + a * c1 * h10;
    let dg = (c0 * dh00 + a * c1 * dh10) / a;
    (val, g, dg)
}

fn spline_eval(knots: &[f64], values: &[f64], derivs: &[f64], r: f64) -> (f64, f64, f64) {
    let n = knots.len();
    let i = match knots.binary_search_by(|k| k.partial_cmp(&r).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    };
    let h = knots[i + 1] - knots[i];
    let s = (r - knots[i]) / h;
    let (v0, v1, d0, d1) = (values[i], values[i + 1], derivs[i], derivs[i + 1]);
    let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
    let h10 = s.powi(3) - 2.0 * s * s + s;
    let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
    let h11 = s.powi(3) - s * s;
    let val = v0 * h00 + h * d0 * h10 + v1 * h01 + h * d1 * h11;
    let dp = (v0 * (6.0 * s * s - 6.0 * s)
        + h * d0 * (3.0 * s * s - 4.0 * s + 1.0)
        + v1 * (6.0 * s - 6.0 * s * s)
        + h * d1 * (3.0 * s * s - 2.0 * s))
        / h;
    let dpp = (v0 * (12.0 * s - 6.0)
        + h * d0 * (6.0 * s - 4.0)
        + v1 * (6.0 - 12.0 * s)
        + h * d1 * (6.0 * s - 2.0))
        / (h * h);
    (val, dp, dpp)
}

/// Builds the three-piece profile of the glued construction and verifies the
/// concavity the construction requires.
pub fn catenoidal_profile(n: u32, k: u32, eps: f64, a: f64) -> Result<ProfileFunction, ProfileError> {
    if !(eps > 0.0 && eps < a && a < std::f64::consts::PI / 10.0) {
        return Err(ProfileError::BadNeckParameters(eps, a));
    }
    if n < 2 || k > n - 2 {
        return Err(ProfileError::BadCodimension(n, k));
    }
    let m = n - k - 1;
    let r_join = a + eps;
    let f_join = neck_f(r_join, eps, m);
    let c0 = neck_fp(r_join, eps, m);
    let c1 = -(m as f64) * (1.0 + c0 * c0) * c0 / r_join;
    // b = f_join + a * int_0^1 g(s) ds
    let b = f_join + a * (c0 * 0.5 + a * c1 / 12.0);
    let prof = ProfileFunction::Catenoidal {
        eps,
        a,
        m,
        f_join,
        c0,
        c1,
        b,
    };
    // concavity of the bridge on a fine grid; the f piece is concave by the ODE
    for i in 0..=400 {
        let r = r_join + (i as f64 / 400.0) * a;
        let (_, _, dd) = prof.eval(r.min(2.0 * a + eps));
        if dd > 1e-10 {
            return Err(ProfileError::BridgeNotConcave(eps, a, dd, r));
        }
    }
    Ok(prof)
}

/// Builds a spline profile (used for custom immersions supplied via JSON).
pub fn spline_profile(
    knots: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
) -> Result<ProfileFunction, ProfileError> {
    if knots.len() < 2
        || knots.len() != values.len()
        || knots.len() != derivs.len()
        || knots.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(ProfileError::BadSpline);
    }
    Ok(ProfileFunction::Spline {
        knots,
        values,
        derivs,
    })
}
