//! Laplace-Beltrami spectra of revolution hypersurfaces by separation of
//! variables: each fiber-harmonic mode leaves a singular Sturm-Liouville
//! problem on the base curve, discretized with P1 finite elements on the
//! arc charts and solved by Sturm-sequence bisection on the tridiagonal
//! pencil. Modes are merged with their fiber multiplicities and the cutoff
//! is certified through the pointwise infimum of the angular potential.

mod galerkin;
mod residual;

pub use galerkin::*;
pub use residual::*;

use crate::geometry::{EndKind, Fibration, RevolutionImmersion};
use crate::harmonic::multiplicity;
use crate::linalg::TridiagPencil;
use crate::quad::gauss4;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("mesh must have at least 64 elements, got {0}")]
    MeshTooSmall(usize),
    #[error("mass matrix failed positivity at node {0}")]
    MassNotPositive(usize),
    #[error("requested {0} eigenvalues but only {1} are certifiable below the mode cutoff")]
    CountNotCertifiable(usize, usize),
    #[error("segment has no boundary; Dirichlet spectrum undefined")]
    NoBoundary,
    #[error("no sign change of lambda_1^D - target over the bracket [{0}, {1}] (values {2:.6}, {3:.6})")]
    NoBracket(f64, f64, f64, f64),
    #[error("eigen solve failed: {0}")]
    Eigen(#[from] crate::linalg::EigenError),
    #[error("geometry error: {0}")]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("basis error: {0}")]
    Basis(#[from] crate::harmonic::BasisError),
    #[error("mass matrix rank-deficient: restriction map failed numerically (condition {0:.3e})")]
    MassRankDeficient(f64),
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

/// One separated angular mode: degrees on the two fibers.
/// `deg2 = -1` marks "no second fiber" (generatrix).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AngularMode {
    pub deg1: u32,
    pub deg2: i32,
}

impl AngularMode {
    pub fn label(&self, fib: &Fibration) -> String {
        match fib {
            Fibration::Generatrix { .. } => format!("l={}", self.deg1),
            Fibration::BiSpherical { d2: 0, .. } => format!(
                "a={},{}",
                self.deg1,
                if self.deg2 == 0 { "even" } else { "odd" }
            ),
            Fibration::BiSpherical { .. } => format!("a={},b={}", self.deg1, self.deg2),
        }
    }
}

/// Dimension of the degree-`deg` harmonics on S^d.
pub fn fiber_multiplicity(d: i32, deg: u32) -> u64 {
    match d {
        d if d < 0 => 1,
        0 => 1,                               // parity label
        1 => {
            if deg == 0 {
                1
            } else {
                2
            }
        }
        d => multiplicity(d as u32, deg).expect("d >= 2"),
    }
}

/// Angular eigenvalue deg (deg + d - 1) on S^d; 0 for S^0 and absent fibers.
fn angular_eigenvalue(d: i32, deg: u32) -> f64 {
    if d >= 1 {
        (deg as u64 * (deg as u64 + d as u64 - 1)) as f64
    } else {
        0.0
    }
}

/// Sample of the warped-product base at one chart point.
#[derive(Debug, Clone, Copy)]
pub struct BaseSample {
    pub rho1: f64,
    pub rho2: f64,
    pub dsdq: f64,
    /// rho1^{d1} rho2^{d2} dsdq (fiber volumes factored out).
    pub weight: f64,
}

/// The 1D reduction target: arcs, fiber dimensions, end closures.
pub struct BaseGeometry<'a> {
    pub arcs: Vec<(f64, f64)>,
    pub d1: i32,
    pub d2: i32,
    pub ends: [EndKind; 2],
    sampler: Box<dyn Fn(usize, f64) -> BaseSample + 'a>,
    rho1_max: f64,
    rho2_max: f64,
}

impl<'a> BaseGeometry<'a> {
    pub fn from_immersion(imm: &'a RevolutionImmersion) -> Self {
        let (d1, d2) = imm.fiber_dims();
        let arcs: Vec<(f64, f64)> = (0..imm.arc_count()).map(|i| imm.arc_range(i)).collect();
        let mut rho1_max: f64 = 0.0;
        let mut rho2_max: f64 = 0.0;
        for (i, &(q0, q1)) in arcs.iter().enumerate() {
            for t in 0..=200 {
                let q = q0 + (q1 - q0) * t as f64 / 200.0;
                let j = imm.radial_jet(i, q);
                rho1_max = rho1_max.max(j.rho1.abs());
                rho2_max = rho2_max.max(j.rho2.abs());
            }
        }
        BaseGeometry {
            arcs,
            d1,
            d2,
            ends: imm.ends,
            sampler: Box::new(move |i, q| {
                let j = imm.radial_jet(i, q);
                BaseSample {
                    rho1: j.rho1,
                    rho2: j.rho2,
                    dsdq: j.speed,
                    weight: j.weight,
                }
            }),
            rho1_max,
            rho2_max,
        }
    }

    /// The comparison metric of the double-cover construction:
    /// dr^2 + d^2 sin^2 r g_{S^1} + cos^2 r g_{S^{n-2}} on [0, pi/2].
    pub fn model_metric(n: u32, d: u32) -> Self {
        assert!(n >= 3 && d >= 1);
        let df = d as f64;
        let d2 = (n - 2) as i32;
        BaseGeometry {
            arcs: vec![(0.0, PI / 2.0)],
            d1: 1,
            d2,
            ends: [EndKind::Pole1, EndKind::Pole2],
            sampler: Box::new(move |_i, r: f64| {
                let rho1 = df * r.sin();
                let rho2 = r.cos();
                BaseSample {
                    rho1,
                    rho2,
                    dsdq: 1.0,
                    weight: rho1 * rho2.powi(d2),
                }
            }),
            rho1_max: df,
            rho2_max: 1.0,
        }
    }

    pub fn sample(&self, arc: usize, q: f64) -> BaseSample {
        (self.sampler)(arc, q)
    }

    fn min_potential(&self, mode: AngularMode) -> f64 {
        let mut v = 0.0;
        if self.d1 >= 1 && mode.deg1 > 0 {
            v += angular_eigenvalue(self.d1, mode.deg1) / (self.rho1_max * self.rho1_max);
        }
        if self.d2 >= 1 && mode.deg2 > 0 {
            v += angular_eigenvalue(self.d2, mode.deg2 as u32) / (self.rho2_max * self.rho2_max);
        }
        v
    }

    /// Modes whose potential infimum does not exceed lam_max, plus the
    /// certified completeness bound (the least excluded potential infimum).
    pub fn modes_up_to(&self, lam_max: f64) -> (Vec<AngularMode>, f64) {
        let deg2_range = |_a: u32| -> Vec<i32> {
            match self.d2 {
                d if d < 0 => vec![-1],
                0 => vec![0, 1],
                _ => (0..10_000_i32).collect(),
            }
        };
        let mut modes = Vec::new();
        let mut completeness = f64::INFINITY;
        let mut a = 0u32;
        loop {
            let base = AngularMode { deg1: a, deg2: 0 };
            if self.min_potential(base) > lam_max {
                completeness = completeness.min(self.min_potential(base));
                break;
            }
            for b in deg2_range(a) {
                let mode = AngularMode { deg1: a, deg2: b };
                let pot = self.min_potential(mode);
                if pot <= lam_max {
                    modes.push(mode);
                } else {
                    completeness = completeness.min(pot);
                    break;
                }
                if self.d2 == 0 && b == 1 {
                    break;
                }
                if self.d2 < 0 {
                    break;
                }
            }
            if self.d1 < 1 {
                break; // no angular ladder on fiber 1
            }
            a += 1;
        }
        (modes, completeness)
    }
}

/// Discretized radial problem for one angular mode.
pub struct RadialProblem {
    pub mode: AngularMode,
    pub pencil: TridiagPencil,
    pub active_nodes: usize,
    pub mesh_size: usize,
}

/// Uniform-in-chart element mesh distributed over the arcs in proportion to
/// arclength (the neck chart is already graded in arclength).
fn build_mesh(geom: &BaseGeometry, mesh_size: usize) -> Vec<(usize, f64, f64)> {
    let mut lens = Vec::new();
    for (i, &(q0, q1)) in geom.arcs.iter().enumerate() {
        let mut l = 0.0;
        for t in 0..32 {
            let q = q0 + (q1 - q0) * (t as f64 + 0.5) / 32.0;
            l += geom.sample(i, q).dsdq * (q1 - q0) / 32.0;
        }
        lens.push(l);
    }
    let total: f64 = lens.iter().sum();
    let mut elems = Vec::new();
    for (i, &(q0, q1)) in geom.arcs.iter().enumerate() {
        let ne = ((mesh_size as f64 * lens[i] / total).round() as usize).max(8);
        for e in 0..ne {
            let qa = q0 + (q1 - q0) * e as f64 / ne as f64;
            let qb = q0 + (q1 - q0) * (e + 1) as f64 / ne as f64;
            elems.push((i, qa, qb));
        }
    }
    elems
}

/// Assemble the P1 pencil for one mode. `dirichlet` turns Boundary ends into
/// essential conditions (otherwise they are natural/free).
pub fn assemble_radial(
    geom: &BaseGeometry,
    mode: AngularMode,
    mesh_size: usize,
    dirichlet: bool,
) -> Result<RadialProblem, SpectralError> {
    if mesh_size < 64 {
        return Err(SpectralError::MeshTooSmall(mesh_size));
    }
    let elems = build_mesh(geom, mesh_size);
    let n_nodes = elems.len() + 1;
    let mut s_diag = vec![0.0; n_nodes];
    let mut s_off = vec![0.0; n_nodes - 1];
    let mut m_diag = vec![0.0; n_nodes];
    let mut m_off = vec![0.0; n_nodes - 1];
    let rule = gauss4();
    let ev1 = angular_eigenvalue(geom.d1, mode.deg1);
    let ev2 = if mode.deg2 > 0 {
        angular_eigenvalue(geom.d2, mode.deg2 as u32)
    } else {
        0.0
    };
    for (e, &(arc, qa, qb)) in elems.iter().enumerate() {
        let dq = qb - qa;
        let mid = 0.5 * (qa + qb);
        let half = 0.5 * dq;
        let mut k_grad = 0.0;
        let mut m = [[0.0_f64; 2]; 2];
        let mut v = [[0.0_f64; 2]; 2];
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let q = mid + half * x;
            let s = geom.sample(arc, q);
            let w = w * half;
            k_grad += w * s.weight / (s.dsdq * s.dsdq);
            let t = (q - qa) / dq;
            let hats = [1.0 - t, t];
            let mut pot = 0.0;
            if ev1 > 0.0 {
                pot += ev1 / (s.rho1 * s.rho1);
            }
            if ev2 > 0.0 {
                pot += ev2 / (s.rho2 * s.rho2);
            }
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] += w * s.weight * hats[i] * hats[j];
                    v[i][j] += w * s.weight * pot * hats[i] * hats[j];
                }
            }
        }
        let k_grad = k_grad / (dq * dq);
        s_diag[e] += k_grad + v[0][0];
        s_diag[e + 1] += k_grad + v[1][1];
        s_off[e] += -k_grad + v[0][1];
        m_diag[e] += m[0][0];
        m_diag[e + 1] += m[1][1];
        m_off[e] += m[0][1];
    }
    // boundary conditions
    let essential_at = |end: EndKind, deg1: u32, deg2: i32| -> bool {
        match end {
            EndKind::Pole1 => deg1 >= 1,
            EndKind::Pole2 => deg2 >= 1,
            EndKind::Boundary => dirichlet,
        }
    };
    let drop_left = essential_at(geom.ends[0], mode.deg1, mode.deg2);
    let drop_right = essential_at(geom.ends[1], mode.deg1, mode.deg2);
    let lo = usize::from(drop_left);
    let hi = n_nodes - usize::from(drop_right);
    let pencil = TridiagPencil {
        s_diag: s_diag[lo..hi].to_vec(),
        s_off: s_off[lo..hi.saturating_sub(1)].to_vec(),
        m_diag: m_diag[lo..hi].to_vec(),
        m_off: m_off[lo..hi.saturating_sub(1)].to_vec(),
    };
    for (i, &md) in pencil.m_diag.iter().enumerate() {
        if !(md > 0.0) {
            return Err(SpectralError::MassNotPositive(i));
        }
    }
    Ok(RadialProblem {
        mode,
        pencil,
        active_nodes: hi - lo,
        mesh_size,
    })
}

/// One merged eigenvalue with provenance.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub mode: AngularMode,
    pub radial_index: usize,
    pub multiplicity: u64,
    /// |lam(N) - lam(N/2)| / 3, a Richardson error estimate.
    pub discretization_estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    /// Multiplicity-expanded, ascending.
    pub eigenvalues: Vec<f64>,
    pub entries: Vec<SpectrumEntry>,
    /// Every eigenvalue below this value is certified captured.
    pub completeness_bound: f64,
    pub mesh_size: usize,
}

impl SpectrumResult {
    /// First eigenvalue above the zero-mode threshold (1e-9 of the scale).
    pub fn first_nonzero(&self) -> Option<f64> {
        let scale = self.eigenvalues.last().copied().unwrap_or(1.0).abs().max(1.0);
        self.eigenvalues
            .iter()
            .find(|&&l| l > 1e-9 * scale)
            .copied()
    }

    /// Cluster eigenvalues whose gaps are below `factor` x their
    /// discretization estimates; returns (representative, multiplicity).
    pub fn clustered(&self, factor: f64) -> Vec<(f64, u64)> {
        let mut out: Vec<(f64, u64)> = Vec::new();
        let mut i = 0;
        while i < self.entries.len() {
            let mut j = i;
            let mut mass = 0.0;
            let mut mult = 0u64;
            while j < self.entries.len() {
                let tol = factor
                    * self.entries[j]
                        .discretization_estimate
                        .max(self.entries[i].discretization_estimate)
                    + 1e-12;
                if j > i && (self.entries[j].eigenvalue - self.entries[j - 1].eigenvalue) > tol {
                    break;
                }
                mass += self.entries[j].eigenvalue * self.entries[j].multiplicity as f64;
                mult += self.entries[j].multiplicity;
                j += 1;
            }
            out.push((mass / mult as f64, mult));
            i = j;
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("eigenvalue,deg1,deg2,radial_index,multiplicity,disc_estimate\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{:.12e},{},{},{},{},{:.3e}\n",
                e.eigenvalue,
                e.mode.deg1,
                e.mode.deg2,
                e.radial_index,
                e.multiplicity,
                e.discretization_estimate
            ));
        }
        s
    }
}

fn solve_modes(
    geom: &BaseGeometry,
    lam_max: f64,
    mesh_size: usize,
    dirichlet: bool,
) -> Result<SpectrumResult, SpectralError> {
    let (modes, completeness) = geom.modes_up_to(lam_max);
    let mut entries = Vec::new();
    for mode in modes {
        let prob = assemble_radial(geom, mode, mesh_size, dirichlet)?;
        let count = prob.pencil.count_below(lam_max);
        if count == 0 {
            continue;
        }
        let vals = prob.pencil.lowest_eigenvalues(count, 1e-12)?;
        let coarse = assemble_radial(geom, mode, (mesh_size / 2).max(64), dirichlet)?;
        let cvals = coarse
            .pencil
            .lowest_eigenvalues(count.min(coarse.pencil.dim()), 1e-12)?;
        let mult = fiber_multiplicity(geom.d1, mode.deg1)
            * if mode.deg2 >= 0 {
                fiber_multiplicity(geom.d2, mode.deg2 as u32)
            } else {
                1
            };
        for (j, &lam) in vals.iter().enumerate() {
            if lam > lam_max {
                break;
            }
            let est = match cvals.get(j) {
                Some(&c) => ((lam - c) / 3.0).abs(),
                // the coarse solve can certify fewer values near the cutoff
                None => lam.abs() * 1e-6 + 1e-12,
            };
            entries.push(SpectrumEntry {
                eigenvalue: lam,
                mode,
                radial_index: j,
                multiplicity: mult,
                discretization_estimate: est,
            });
        }
    }
    entries.sort_by(|a, b| a.eigenvalue.partial_cmp(&b.eigenvalue).unwrap());
    let mut eigenvalues = Vec::new();
    for e in &entries {
        for _ in 0..e.multiplicity {
            eigenvalues.push(e.eigenvalue);
        }
    }
    Ok(SpectrumResult {
        eigenvalues,
        entries,
        completeness_bound: completeness,
        mesh_size,
    })
}

/// All eigenvalues up to lam_max (certified complete below the cutoff).
pub fn spectrum_up_to(
    imm: &RevolutionImmersion,
    lam_max: f64,
    mesh_size: usize,
) -> Result<SpectrumResult, SpectralError> {
    let geom = BaseGeometry::from_immersion(imm);
    solve_modes(&geom, lam_max, mesh_size, false)
}

/// The lowest `count` eigenvalues (with multiplicity), raising the mode
/// cutoff until the count is certified.
pub fn spectrum_count(
    imm: &RevolutionImmersion,
    count: usize,
    mesh_size: usize,
) -> Result<SpectrumResult, SpectralError> {
    let geom = BaseGeometry::from_immersion(imm);
    let mut lam_max = 10.0;
    for _ in 0..12 {
        let mut res = solve_modes(&geom, lam_max, mesh_size, false)?;
        if res.eigenvalues.len() >= count {
            res.entries.retain(|e| e.eigenvalue <= res.eigenvalues[count - 1] + 1e-12);
            res.eigenvalues.truncate(count);
            return Ok(res);
        }
        lam_max *= 2.0;
    }
    let res = solve_modes(&geom, lam_max, mesh_size, false)?;
    Err(SpectralError::CountNotCertifiable(
        count,
        res.eigenvalues.len(),
    ))
}

/// Dirichlet spectrum of a segment with boundary.
pub fn dirichlet_spectrum(
    imm: &RevolutionImmersion,
    count: usize,
    mesh_size: usize,
) -> Result<SpectrumResult, SpectralError> {
    if imm.is_closed() {
        return Err(SpectralError::NoBoundary);
    }
    let geom = BaseGeometry::from_immersion(imm);
    let mut lam_max = 10.0;
    for _ in 0..16 {
        let res = solve_modes(&geom, lam_max, mesh_size, true)?;
        if res.eigenvalues.len() >= count {
            let mut res = res;
            res.entries.retain(|e| e.eigenvalue <= res.eigenvalues[count - 1] + 1e-12);
            res.eigenvalues.truncate(count);
            return Ok(res);
        }
        lam_max *= 2.0;
    }
    Err(SpectralError::CountNotCertifiable(count, 0))
}

/// First Dirichlet eigenvalue of a segment.
pub fn lambda1_dirichlet(
    imm: &RevolutionImmersion,
    mesh_size: usize,
) -> Result<f64, SpectralError> {
    Ok(dirichlet_spectrum(imm, 1, mesh_size)?.eigenvalues[0])
}

#[derive(Debug, Clone, Serialize)]
pub struct TuneResult {
    pub parameter: f64,
    pub achieved_lambda: f64,
    pub iterations: usize,
}

/// Bisection on a parametrized segment family for lambda_1^D = target.
/// The family must bracket the target over [lo, hi] (checked).
pub fn tune_neck<F>(
    target: f64,
    lo: f64,
    hi: f64,
    mesh_size: usize,
    family: F,
) -> Result<TuneResult, SpectralError>
where
    F: Fn(f64) -> Result<RevolutionImmersion, crate::geometry::GeometryError>,
{
    let eval = |p: f64| -> Result<f64, SpectralError> {
        let seg = family(p)?;
        lambda1_dirichlet(&seg, mesh_size)
    };
    let f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if (f_lo - target) * (f_hi - target) > 0.0 {
        return Err(SpectralError::NoBracket(lo, hi, f_lo, f_hi));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f_lo;
    let mut iterations = 0;
    let mut best = (lo, f_lo);
    for _ in 0..200 {
        iterations += 1;
        let mid = 0.5 * (a + b);
        let lam = eval(mid)?;
        best = (mid, lam);
        if (lam - target) * (fa - target) > 0.0 {
            a = mid;
            fa = lam;
        } else {
            b = mid;
        }
        if (lam / target - 1.0).abs() < 1e-6 || (b - a) < 1e-14 * (1.0 + b.abs()) {
            break;
        }
    }
    // return the evaluated point, not the midpoint of the final bracket
    Ok(TuneResult {
        parameter: best.0,
        achieved_lambda: best.1,
        iterations,
    })
}

/// Spectrum of the model metric dr^2 + d^2 sin^2 r g_{S^1} + cos^2 r g_{S^{n-2}}.
pub fn model_metric_spectrum(
    n: u32,
    d: u32,
    count: usize,
    mesh_size: usize,
) -> Result<SpectrumResult, SpectralError> {
    if n < 3 || d < 1 {
        return Err(SpectralError::Invalid(format!(
            "model metric needs n >= 3, d >= 1 (got n = {n}, d = {d})"
        )));
    }
    let geom = BaseGeometry::model_metric(n, d);
    let mut lam_max = 12.0;
    for _ in 0..12 {
        let res = solve_modes(&geom, lam_max, mesh_size, false)?;
        if res.eigenvalues.len() >= count {
            let mut res = res;
            res.entries.retain(|e| e.eigenvalue <= res.eigenvalues[count - 1] + 1e-12);
            res.eigenvalues.truncate(count);
            return Ok(res);
        }
        lam_max *= 2.0;
    }
    Err(SpectralError::CountNotCertifiable(count, 0))
}
