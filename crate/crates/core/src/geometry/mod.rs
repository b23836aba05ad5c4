//! Hypersurfaces of revolution in R^{n+1} with closed-form extrinsic geometry.
//!
//! Two families are covered by one 1D "base curve + warped fibers" reduction:
//!
//! * `Generatrix`: a plane curve s -> (x(s), rho(s)) rotated along S^{n-1};
//!   ambient splits as R^n (+) R_axis. Principal curvatures are the curve
//!   curvature (once) and x'/(v rho) (n-1 fold).
//! * `BiSpherical`: Phi(y, z, r) = (1 + phi(r)) (y sin r + z cos r) with
//!   y in S^{n-k-1}, z in S^k; curvature in closed form (three principal
//!   values with multiplicities n-k-1, k, 1) and volume density
//!   (1+phi)^{n-1} sqrt(phi'^2 + (1+phi)^2) sin^{n-k-1} r cos^k r.
//!
//! Orientation note: the glued two-branch construction uses per-branch
//! ("sheet-outward") normals, which is what the closed-form curvature
//! formulas produce; every integrated quantity in this crate (H<nu,X>, |Z|,
//! H dP(Z), Hess P(Z,Z), |B|) is invariant under flipping the normal, so the
//! convention is observable only in the sign of H on the inner sheet.

mod measures;

pub use measures::*;

use crate::profile::ProfileFunction;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("profile violates 1 - |phi| > 1/2 (sup |phi| = {0:.4})")]
    ProfileTooDeep(f64),
    #[error("need 0 <= k <= n-2 and n >= 2, got n = {0}, k = {1}")]
    BadCodimension(u32, u32),
    #[error("orbit radius must be nonnegative in the interior (rho = {0:.3e} at arc {1})")]
    NegativeOrbitRadius(f64, usize),
    #[error("interior pole: rho vanishes away from the curve endpoints (arc {0})")]
    InteriorPole(usize),
    #[error("assembly is discontinuous at junction {0} (gap {1:.3e})")]
    DiscontinuousAssembly(usize, f64),
    #[error("dumbbell needs p >= 1 spheres and waist in (0, 1/2), got p = {0}, waist = {1}")]
    BadDumbbell(usize, f64),
    #[error("neck assembly needs 3 nu < {1} (flat-disc radius); got nu = {0}")]
    NeckTooWide(f64, f64),
    #[error("quadrature did not converge (refinement mismatch {0:.3e})")]
    NonConvergentQuadrature(f64),
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

/// How the base-curve end closes the manifold (or does not).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndKind {
    /// First fiber collapses (rho1 -> 0); smooth cap.
    Pole1,
    /// Second fiber collapses (bispherical equator r = pi/2).
    Pole2,
    /// Genuine manifold boundary.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fibration {
    /// Fibers S^{d1} x S^{d2} over the r-interval (d2 = 0 is a genuine S^0).
    BiSpherical { d1: u32, d2: u32 },
    /// Single fiber S^{n-1} plus the axial coordinate.
    Generatrix { fiber_dim: u32 },
}

/// Serializable construction recipe; the runtime arcs are rebuilt from it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum ImmersionSpec {
    Sphere {
        n: u32,
        radius: f64,
        #[serde(default)]
        axis_offset: f64,
    },
    Spheroid {
        n: u32,
        a_axis: f64,
        b_axis: f64,
    },
    /// p unit spheres along the axis joined by tangent catenoid necks of the
    /// given waist; `neck_len` inserts a straight cylinder at each waist.
    Dumbbell {
        n: u32,
        p: usize,
        waist: f64,
        #[serde(default)]
        neck_len: f64,
    },
    BiSpherical {
        n: u32,
        k: u32,
        profile: ProfileFunction,
    },
    /// Flat cylinder [0, length] x S^{n-1}(radius); boundary at both ends.
    FlatCylinder {
        n: u32,
        radius: f64,
        length: f64,
    },
    /// Unit-sphere cap t in [0, pi/2] with boundary at the equator.
    Hemisphere {
        n: u32,
        radius: f64,
    },
    /// Thin appendage (cap + tube of length l*nu + transition) alone, with a
    /// Dirichlet-able boundary at orbit radius 3 nu.
    NeckAppendage {
        n: u32,
        nu: f64,
        tube_l: f64,
    },
    /// Flattened unit sphere with the appendage attached (closed).
    SphereWithNeck {
        n: u32,
        nu: f64,
        tube_l: f64,
    },
    /// Raw generatrix assembly.
    Generatrix {
        n: u32,
        segments: Vec<PlaneSegment>,
    },
}

/// One smooth plane-curve piece of a generatrix assembly, chart q in [q0, q1].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlaneSegment {
    /// (x, rho) = (cx + r cos(ang0 + dir q), crho + r sin(ang0 + dir q))
    Circle {
        cx: f64,
        crho: f64,
        r: f64,
        ang0: f64,
        dir: f64,
        q0: f64,
        q1: f64,
    },
    /// (x, rho) = (cx - a cos q, b sin q)
    Ellipse {
        cx: f64,
        a: f64,
        b: f64,
        q0: f64,
        q1: f64,
    },
    /// (x, rho) = (x_waist + c q, c cosh q)
    Catenoid {
        x_waist: f64,
        waist: f64,
        q0: f64,
        q1: f64,
    },
    /// (x, rho) = (x0 + q, radius)
    Cylinder {
        x0: f64,
        radius: f64,
        q0: f64,
        q1: f64,
    },
    /// (x, rho) = (x_at, q) — flat disc annulus
    RadialLine {
        x_at: f64,
        q0: f64,
        q1: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum BiChart {
    /// q = r directly (|q| = r on the minus branch).
    R,
    /// q = +-u with r = eps (1 + u^2); regular through the neck.
    U,
}

#[derive(Debug, Clone)]
pub(crate) enum ArcKind {
    Plane(PlaneSegment),
    BiSph { sign: f64, chart: BiChart },
}

#[derive(Debug, Clone)]
pub(crate) struct ImmArc {
    pub q0: f64,
    pub q1: f64,
    pub kind: ArcKind,
}

/// Orbit-invariant geometric data at one base-curve point.
#[derive(Debug, Clone)]
pub struct RadialJet {
    /// Warping radius of fiber 1 (orbit radius for a generatrix).
    pub rho1: f64,
    /// Warping radius of fiber 2 (bispherical) or axial coordinate.
    pub rho2: f64,
    /// Normal = (normal1 * y, normal2 * z) resp. (normal1 * y, normal2 * e_axis).
    pub normal1: f64,
    pub normal2: f64,
    /// ds/dq, arclength density of the chart.
    pub speed: f64,
    /// Principal curvatures with orbit multiplicities (slots with mult 0 unused).
    pub kappas: [(f64, u32); 3],
    pub mean_curvature: f64,
    pub b_op: f64,
    pub b_frob: f64,
    /// Volume density per dq, fiber volumes factored out:
    /// rho1^{d1} rho2^{d2} speed resp. rho^{n-1} speed.
    pub weight: f64,
}

impl RadialJet {
    /// |X|^2; rho2 doubles as the axial coordinate for a generatrix.
    pub fn abs_x_sq(&self) -> f64 {
        self.rho1 * self.rho1 + self.rho2 * self.rho2
    }

    /// <X, nu> in the profile plane (fiber directions integrate out).
    pub fn x_dot_normal(&self) -> f64 {
        self.rho1 * self.normal1 + self.rho2 * self.normal2
    }
}

/// Full pointwise data at a parameter point (base point + fiber points).
#[derive(Debug, Clone)]
pub struct GeometryJet {
    pub position: Vec<f64>,
    pub unit_normal: Vec<f64>,
    pub mean_curvature: f64,
    pub principal_curvatures: Vec<(f64, u32)>,
    pub second_form_op: f64,
    pub second_form_frob: f64,
    pub volume_density: f64,
}

#[derive(Debug, Clone)]
pub struct RevolutionImmersion {
    pub n: u32,
    pub fib: Fibration,
    pub descriptor: ImmersionSpec,
    pub(crate) arcs: Vec<ImmArc>,
    pub ends: [EndKind; 2],
    /// Added to every axial coordinate (recentring shift).
    pub(crate) axis_shift: f64,
    pub(crate) profile: Option<ProfileFunction>,
    /// Tangent-direction mismatch (radians) at each interior junction.
    pub c1_defects: Vec<f64>,
    /// Geodesic-curvature jump at each interior junction (C^2 mismatch).
    pub c2_defects: Vec<f64>,
}

fn plane_jet(seg: &PlaneSegment, q: f64) -> (f64, f64, f64, f64, f64, f64) {
    match *seg {
        PlaneSegment::Circle {
            cx,
            crho,
            r,
            ang0,
            dir,
            ..
        } => {
            let a = ang0 + dir * q;
            (
                cx + r * a.cos(),
                crho + r * a.sin(),
                -r * dir * a.sin(),
                r * dir * a.cos(),
                -r * dir * dir * a.cos(),
                -r * dir * dir * a.sin(),
            )
        }
        PlaneSegment::Ellipse { cx, a, b, .. } => (
            cx - a * q.cos(),
            b * q.sin(),
            a * q.sin(),
            b * q.cos(),
            a * q.cos(),
            -b * q.sin(),
        ),
        PlaneSegment::Catenoid { x_waist, waist, .. } => (
            x_waist + waist * q,
            waist * q.cosh(),
            waist,
            waist * q.sinh(),
            0.0,
            waist * q.cosh(),
        ),
        PlaneSegment::Cylinder { x0, radius, .. } => (x0 + q, radius, 1.0, 0.0, 0.0, 0.0),
        PlaneSegment::RadialLine { x_at, .. } => (x_at, q, 0.0, 1.0, 0.0, 0.0),
    }
}

impl RevolutionImmersion {
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc_range(&self, i: usize) -> (f64, f64) {
        (self.arcs[i].q0, self.arcs[i].q1)
    }

    pub fn is_closed(&self) -> bool {
        self.ends.iter().all(|e| *e != EndKind::Boundary)
    }

    /// (d1, d2) with d2 = -1 meaning "no second fiber" (generatrix axis).
    pub fn fiber_dims(&self) -> (i32, i32) {
        match self.fib {
            Fibration::BiSpherical { d1, d2 } => (d1 as i32, d2 as i32),
            Fibration::Generatrix { fiber_dim } => (fiber_dim as i32, -1),
        }
    }

    /// Radial jet at chart point q of arc `arc`.
    pub fn radial_jet(&self, arc: usize, q: f64) -> RadialJet {
        match &self.arcs[arc].kind {
            ArcKind::Plane(seg) => self.generatrix_jet(seg, q),
            ArcKind::BiSph { sign, chart } => self.bispherical_jet(*sign, *chart, q),
        }
    }

    fn generatrix_jet(&self, seg: &PlaneSegment, q: f64) -> RadialJet {
        let n = self.n;
        let (x, rho, xp, rhop, xpp, rhopp) = plane_jet(seg, q);
        let x = x + self.axis_shift;
        let v = xp.hypot(rhop);
        let n1 = xp / v;
        let n2 = -rhop / v;
        let k_geo = (xpp * rhop - rhopp * xp) / (v * v * v);
        let k_orb = if rho.abs() > 1e-9 {
            xp / (v * rho)
        } else {
            // smooth pole: L'Hopital along the curve
            xpp / (v * rhop)
        };
        let h = (k_geo + (n as f64 - 1.0) * k_orb) / n as f64;
        let b_op = k_geo.abs().max(k_orb.abs());
        let b_frob = (k_geo * k_geo + (n as f64 - 1.0) * k_orb * k_orb).sqrt();
        RadialJet {
            rho1: rho,
            rho2: x,
            normal1: n1,
            normal2: n2,
            speed: v,
            kappas: [(k_geo, 1), (k_orb, n - 1), (0.0, 0)],
            mean_curvature: h,
            b_op,
            b_frob,
            weight: rho.powi(n as i32 - 1) * v,
        }
    }

    fn bispherical_jet(&self, sign: f64, chart: BiChart, q: f64) -> RadialJet {
        let prof = self.profile.as_ref().expect("bispherical without profile");
        let Fibration::BiSpherical { d1, d2 } = self.fib else {
            unreachable!()
        };
        let n = self.n;
        let (r, phi, phip, phipp, speed) = match chart {
            BiChart::R => {
                let r = q.abs();
                let (f, fp, fpp) = prof.eval(r);
                let sp = (fp * fp + (1.0 + sign * f) * (1.0 + sign * f)).sqrt();
                (r, sign * f, sign * fp, sign * fpp, sp)
            }
            BiChart::U => {
                let u = q.abs();
                let eps = prof.r_min();
                let r = eps * (1.0 + u * u);
                let (f, fp, fpp) = prof.eval_neck(u);
                // d s / d u = sqrt((phi' dr/du)^2 + (1+phi)^2 (dr/du)^2); the
                // first factor stays finite through u = 0
                let fp_du = prof.neck_fp_du(u);
                let p = 1.0 + sign * f;
                let sp = (fp_du * fp_du + p * p * (2.0 * eps * u) * (2.0 * eps * u)).sqrt();
                (r, sign * f, sign * fp, sign * fpp, sp)
            }
        };
        let p = 1.0 + phi;
        let (k_u, k_v, k_xi) = if phip.is_finite() && phip.abs() < 1e12 {
            let denom = (phip * phip + p * p).sqrt();
            (
                (1.0 - phip / p / r.tan()) / denom,
                (1.0 + phip / p * r.tan()) / denom,
                (-p * phipp + p * p + 2.0 * phip * phip) / (denom * denom * denom),
            )
        } else {
            // neck junction limits as phi' -> +- infinity
            let s = phip.signum();
            let m = (n - d2 - 1) as f64;
            (-s / r.tan(), s * r.tan(), s * m / r)
        };
        let h = (d1 as f64 * k_u + d2 as f64 * k_v + k_xi) / n as f64;
        let b_op = k_u.abs().max(k_v.abs()).max(k_xi.abs());
        let b_frob =
            (d1 as f64 * k_u * k_u + d2 as f64 * k_v * k_v + k_xi * k_xi).sqrt();
        let rho1 = p * r.sin();
        let rho2 = p * r.cos();
        let denom = (phip * phip + p * p).sqrt();
        let (n1, n2) = if phip.is_finite() && phip.abs() < 1e12 {
            (
                (-phip * r.cos() + p * r.sin()) / denom,
                (phip * r.sin() + p * r.cos()) / denom,
            )
        } else {
            (-phip.signum() * r.cos(), phip.signum() * r.sin())
        };
        RadialJet {
            rho1,
            rho2,
            normal1: n1,
            normal2: n2,
            speed,
            kappas: [(k_u, d1), (k_v, d2), (k_xi, 1)],
            mean_curvature: h,
            b_op,
            b_frob,
            weight: rho1.powi(d1 as i32) * rho2.powi(d2 as i32) * speed,
        }
    }

    /// Full jet at a parameter point: arc index, chart coordinate, and unit
    /// fiber points (y on S^{d1}; z on S^{d2} for bispherical, ignored for a
    /// generatrix where the axis direction is fixed).
    pub fn curvature_at(&self, arc: usize, q: f64, y: &[f64], z: &[f64]) -> GeometryJet {
        let jet = self.radial_jet(arc, q);
        let (mut position, mut normal) = (Vec::new(), Vec::new());
        match self.fib {
            Fibration::BiSpherical { d1, d2 } => {
                assert_eq!(y.len(), d1 as usize + 1);
                assert_eq!(z.len(), d2 as usize + 1);
                position.extend(y.iter().map(|c| jet.rho1 * c));
                position.extend(z.iter().map(|c| jet.rho2 * c));
                normal.extend(y.iter().map(|c| jet.normal1 * c));
                normal.extend(z.iter().map(|c| jet.normal2 * c));
            }
            Fibration::Generatrix { fiber_dim } => {
                assert_eq!(y.len(), fiber_dim as usize + 1);
                position.extend(y.iter().map(|c| jet.rho1 * c));
                position.push(jet.rho2);
                normal.extend(y.iter().map(|c| jet.normal1 * c));
                normal.push(jet.normal2);
            }
        }
        GeometryJet {
            position,
            unit_normal: normal,
            mean_curvature: jet.mean_curvature,
            principal_curvatures: jet
                .kappas
                .iter()
                .filter(|(_, m)| *m > 0)
                .copied()
                .collect(),
            second_form_op: jet.b_op,
            second_form_frob: jet.b_frob,
            volume_density: jet.weight,
        }
    }

    /// Clone with the axial shift moved so the mean position vanishes.
    pub fn recentered(&self) -> Self {
        let mut out = self.clone();
        match self.fib {
            Fibration::BiSpherical { .. } => out, // symmetric about the origin
            Fibration::Generatrix { .. } => {
                let quad = OrbitQuadrature::new(&out, 48);
                let vol = quad.integrate(|_| 1.0);
                let xbar = quad.integrate(|j| j.rho2) / vol;
                out.axis_shift -= xbar;
                out
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.descriptor).expect("descriptor serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, GeometryError> {
        let spec: ImmersionSpec = serde_json::from_value(v.clone())
            .map_err(|e| GeometryError::Invalid(e.to_string()))?;
        build(spec)
    }
}

/// Dispatch a recipe to its constructor.
pub fn build(spec: ImmersionSpec) -> Result<RevolutionImmersion, GeometryError> {
    match spec {
        ImmersionSpec::Sphere {
            n,
            radius,
            axis_offset,
        } => sphere_at(n, radius, axis_offset),
        ImmersionSpec::Spheroid { n, a_axis, b_axis } => spheroid(n, a_axis, b_axis),
        ImmersionSpec::Dumbbell {
            n,
            p,
            waist,
            neck_len,
        } => dumbbell(n, p, waist, neck_len),
        ImmersionSpec::BiSpherical { n, k, profile } => bispherical_immersion(n, k, profile),
        ImmersionSpec::FlatCylinder { n, radius, length } => flat_cylinder(n, radius, length),
        ImmersionSpec::Hemisphere { n, radius } => hemisphere(n, radius),
        ImmersionSpec::NeckAppendage { n, nu, tube_l } => neck_appendage(n, nu, tube_l),
        ImmersionSpec::SphereWithNeck { n, nu, tube_l } => sphere_with_neck(n, nu, tube_l),
        ImmersionSpec::Generatrix { n, segments } => generatrix_immersion(segments, n),
    }
}

fn seg_range(seg: &PlaneSegment) -> (f64, f64) {
    match *seg {
        PlaneSegment::Circle { q0, q1, .. }
        | PlaneSegment::Ellipse { q0, q1, .. }
        | PlaneSegment::Catenoid { q0, q1, .. }
        | PlaneSegment::Cylinder { q0, q1, .. }
        | PlaneSegment::RadialLine { q0, q1, .. } => (q0, q1),
    }
}

/// Validates a generatrix assembly and computes its junction defects.
pub fn generatrix_immersion(
    segments: Vec<PlaneSegment>,
    n: u32,
) -> Result<RevolutionImmersion, GeometryError> {
    if n < 2 || segments.is_empty() {
        return Err(GeometryError::Invalid(
            "need n >= 2 and at least one segment".into(),
        ));
    }
    let mut arcs = Vec::new();
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        let (q0, q1) = seg_range(seg);
        if !(q1 > q0) {
            return Err(GeometryError::Invalid(format!("segment {i} has empty range")));
        }
        // interior positivity + no interior poles
        for t in 1..64 {
            let q = q0 + (q1 - q0) * t as f64 / 64.0;
            let (_, rho, ..) = plane_jet(seg, q);
            if rho < -1e-12 {
                return Err(GeometryError::NegativeOrbitRadius(rho, i));
            }
            if rho < 1e-12 {
                return Err(GeometryError::InteriorPole(i));
            }
        }
        if i + 1 < segments.len() {
            let a = plane_jet(seg, q1);
            let b = plane_jet(&segments[i + 1], seg_range(&segments[i + 1]).0);
            let gap = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
            if gap > 1e-9 {
                return Err(GeometryError::DiscontinuousAssembly(i, gap));
            }
            let va = a.2.hypot(a.3);
            let vb = b.2.hypot(b.3);
            let cross = (a.2 * b.3 - a.3 * b.2) / (va * vb);
            let dot = (a.2 * b.2 + a.3 * b.3) / (va * vb);
            c1.push(cross.atan2(dot).abs());
            let ka = (a.4 * a.3 - a.5 * a.2) / (va * va * va);
            let kb = (b.4 * b.3 - b.5 * b.2) / (vb * vb * vb);
            c2.push((ka - kb).abs());
        }
        arcs.push(ImmArc {
            q0,
            q1,
            kind: ArcKind::Plane(seg.clone()),
        });
    }
    // end classification; a pole must be a smooth cap (|d rho / ds| = 1)
    let first = plane_jet(&segments[0], seg_range(&segments[0]).0);
    let last = plane_jet(
        segments.last().unwrap(),
        seg_range(segments.last().unwrap()).1,
    );
    for (x, rho, xp, rhop, ..) in [first, last] {
        let _ = x;
        if rho.abs() < 1e-9 {
            let slope = rhop.abs() / xp.hypot(rhop);
            if (slope - 1.0).abs() > 1e-6 {
                return Err(GeometryError::Invalid(format!(
                    "pole endpoint is not a smooth cap (|d rho/ds| = {slope:.6})"
                )));
            }
        }
    }
    let endkind = |rho: f64| if rho.abs() < 1e-9 { EndKind::Pole1 } else { EndKind::Boundary };
    Ok(RevolutionImmersion {
        n,
        fib: Fibration::Generatrix { fiber_dim: n - 1 },
        descriptor: ImmersionSpec::Generatrix {
            n,
            segments: segments.clone(),
        },
        arcs,
        ends: [endkind(first.1), endkind(last.1)],
        axis_shift: 0.0,
        profile: None,
        c1_defects: c1,
        c2_defects: c2,
    })
}

/// Round sphere of the given radius, centered on the axis at `axis_offset`.
pub fn sphere_at(n: u32, radius: f64, axis_offset: f64) -> Result<RevolutionImmersion, GeometryError> {
    if radius <= 0.0 || n < 2 {
        return Err(GeometryError::Invalid("sphere needs n >= 2, radius > 0".into()));
    }
    let seg = PlaneSegment::Circle {
        cx: axis_offset,
        crho: 0.0,
        r: radius,
        ang0: PI,
        dir: -1.0,
        q0: 0.0,
        q1: PI,
    };
    let mut imm = generatrix_immersion(vec![seg], n)?;
    imm.descriptor = ImmersionSpec::Sphere {
        n,
        radius,
        axis_offset,
    };
    Ok(imm)
}

pub fn sphere(n: u32, radius: f64) -> Result<RevolutionImmersion, GeometryError> {
    sphere_at(n, radius, 0.0)
}

/// Spheroid with semi-axis `a_axis` along the rotation axis and equatorial
/// radius `b_axis`.
pub fn spheroid(n: u32, a_axis: f64, b_axis: f64) -> Result<RevolutionImmersion, GeometryError> {
    if a_axis <= 0.0 || b_axis <= 0.0 {
        return Err(GeometryError::Invalid("spheroid needs positive semi-axes".into()));
    }
    let seg = PlaneSegment::Ellipse {
        cx: 0.0,
        a: a_axis,
        b: b_axis,
        q0: 0.0,
        q1: PI,
    };
    let mut imm = generatrix_immersion(vec![seg], n)?;
    imm.descriptor = ImmersionSpec::Spheroid { n, a_axis, b_axis };
    Ok(imm)
}

/// Tangency data for a catenoid of the given waist against a unit circle:
/// contact at polar angle t0 with sin^2 t0 = waist, |u| = u0 at the contact.
pub fn catenoid_tangency(waist: f64) -> (f64, f64) {
    let t0 = waist.sqrt().asin();
    let u0 = (1.0 / t0.tan()).asinh();
    (t0, u0)
}

/// Chain of p unit spheres joined by tangent catenoid necks. `neck_len > 0`
/// inserts a straight cylinder at each waist (raises sup |H| to ~1/(2 waist)).
pub fn dumbbell(
    n: u32,
    p: usize,
    waist: f64,
    neck_len: f64,
) -> Result<RevolutionImmersion, GeometryError> {
    if p == 0 || !(waist > 0.0 && waist < 0.5) {
        return Err(GeometryError::BadDumbbell(p, waist));
    }
    let (t0, u0) = catenoid_tangency(waist);
    let spacing = 2.0 * (t0.cos() + waist * u0) + neck_len;
    let mut segs = Vec::new();
    for i in 0..p {
        let cx = i as f64 * spacing;
        let ta = if i > 0 { t0 } else { 0.0 };
        let tb = if i + 1 < p { PI - t0 } else { PI };
        segs.push(PlaneSegment::Circle {
            cx,
            crho: 0.0,
            r: 1.0,
            ang0: PI,
            dir: -1.0,
            q0: ta,
            q1: tb,
        });
        if i + 1 < p {
            let x_waist = cx + t0.cos() + waist * u0;
            segs.push(PlaneSegment::Catenoid {
                x_waist,
                waist,
                q0: -u0,
                q1: 0.0,
            });
            if neck_len > 0.0 {
                segs.push(PlaneSegment::Cylinder {
                    x0: x_waist,
                    radius: waist,
                    q0: 0.0,
                    q1: neck_len,
                });
            }
            segs.push(PlaneSegment::Catenoid {
                x_waist: x_waist + neck_len,
                waist,
                q0: 0.0,
                q1: u0,
            });
        }
    }
    let mut imm = generatrix_immersion(segs, n)?;
    imm.descriptor = ImmersionSpec::Dumbbell {
        n,
        p,
        waist,
        neck_len,
    };
    Ok(imm)
}

/// The glued bi-spherical hypersurface M_eps^k (two branches +-phi) for a
/// catenoidal profile; single branch for constant/spline profiles.
pub fn bispherical_immersion(
    n: u32,
    k: u32,
    profile: ProfileFunction,
) -> Result<RevolutionImmersion, GeometryError> {
    if n < 2 || k > n - 2 {
        return Err(GeometryError::BadCodimension(n, k));
    }
    // 1 - |phi| > 1/2 (the construction's b_eps < 1/2 requirement)
    let mut sup_phi: f64 = 0.0;
    let r_lo = profile.r_min();
    for i in 0..=512 {
        let r = r_lo + (PI / 2.0 - r_lo) * i as f64 / 512.0;
        sup_phi = sup_phi.max(profile.eval(r).0.abs());
    }
    if sup_phi >= 0.5 {
        return Err(GeometryError::ProfileTooDeep(sup_phi));
    }
    let arcs = match &profile {
        ProfileFunction::Catenoidal { eps, a, .. } => {
            let umax = (a / eps).sqrt();
            let r1 = a + eps;
            let r2 = 2.0 * a + eps;
            vec![
                ImmArc {
                    q0: -PI / 2.0,
                    q1: -r2,
                    kind: ArcKind::BiSph {
                        sign: -1.0,
                        chart: BiChart::R,
                    },
                },
                ImmArc {
                    q0: -r2,
                    q1: -r1,
                    kind: ArcKind::BiSph {
                        sign: -1.0,
                        chart: BiChart::R,
                    },
                },
                ImmArc {
                    q0: -umax,
                    q1: 0.0,
                    kind: ArcKind::BiSph {
                        sign: -1.0,
                        chart: BiChart::U,
                    },
                },
                ImmArc {
                    q0: 0.0,
                    q1: umax,
                    kind: ArcKind::BiSph {
                        sign: 1.0,
                        chart: BiChart::U,
                    },
                },
                ImmArc {
                    q0: r1,
                    q1: r2,
                    kind: ArcKind::BiSph {
                        sign: 1.0,
                        chart: BiChart::R,
                    },
                },
                ImmArc {
                    q0: r2,
                    q1: PI / 2.0,
                    kind: ArcKind::BiSph {
                        sign: 1.0,
                        chart: BiChart::R,
                    },
                },
            ]
        }
        ProfileFunction::Spline { knots, .. } => {
            // the profile is C^1 at knots; quadrature panels and elements
            // must not straddle them
            if (knots[0] - 0.0).abs() > 1e-12 || (knots.last().unwrap() - PI / 2.0).abs() > 1e-9 {
                return Err(GeometryError::Invalid(
                    "spline profile must span [0, pi/2]".into(),
                ));
            }
            knots
                .windows(2)
                .map(|w| ImmArc {
                    q0: w[0],
                    q1: w[1],
                    kind: ArcKind::BiSph {
                        sign: 1.0,
                        chart: BiChart::R,
                    },
                })
                .collect()
        }
        ProfileFunction::Constant { .. } => vec![ImmArc {
            q0: 0.0,
            q1: PI / 2.0,
            kind: ArcKind::BiSph {
                sign: 1.0,
                chart: BiChart::R,
            },
        }],
    };
    let two_branch = matches!(profile, ProfileFunction::Catenoidal { .. });
    let ends = if two_branch {
        [EndKind::Pole2, EndKind::Pole2]
    } else {
        [EndKind::Pole1, EndKind::Pole2]
    };
    Ok(RevolutionImmersion {
        n,
        fib: Fibration::BiSpherical {
            d1: n - k - 1,
            d2: k,
        },
        descriptor: ImmersionSpec::BiSpherical {
            n,
            k,
            profile: profile.clone(),
        },
        arcs,
        ends,
        axis_shift: 0.0,
        profile: Some(profile),
        c1_defects: vec![],
        c2_defects: vec![],
    })
}

/// Flat cylinder [0, length] x S^{n-1}(radius); boundary at both ends.
pub fn flat_cylinder(n: u32, radius: f64, length: f64) -> Result<RevolutionImmersion, GeometryError> {
    if radius <= 0.0 || length <= 0.0 {
        return Err(GeometryError::Invalid("cylinder needs positive radius/length".into()));
    }
    let mut imm = generatrix_immersion(
        vec![PlaneSegment::Cylinder {
            x0: 0.0,
            radius,
            q0: 0.0,
            q1: length,
        }],
        n,
    )?;
    imm.descriptor = ImmersionSpec::FlatCylinder { n, radius, length };
    Ok(imm)
}

/// Half sphere with its equator as boundary.
pub fn hemisphere(n: u32, radius: f64) -> Result<RevolutionImmersion, GeometryError> {
    let mut imm = generatrix_immersion(
        vec![PlaneSegment::Circle {
            cx: 0.0,
            crho: 0.0,
            r: radius,
            ang0: PI,
            dir: -1.0,
            q0: 0.0,
            q1: PI / 2.0,
        }],
        n,
    )?;
    imm.descriptor = ImmersionSpec::Hemisphere { n, radius };
    Ok(imm)
}

/// Attachment constants for the flattened-sphere neck experiments: disc plane
/// at x = -0.97 and a fillet of radius 0.08 into the unit sphere.
pub const NECK_DISC_PLANE: f64 = -0.97;
pub const NECK_FILLET_RADIUS: f64 = 0.08;

/// Flat-disc radius and sphere join angle of the flattened attachment.
pub fn neck_attachment_geometry() -> (f64, f64) {
    let x_fc = NECK_DISC_PLANE + NECK_FILLET_RADIUS;
    let rho_fc = ((1.0 - NECK_FILLET_RADIUS).powi(2) - x_fc * x_fc).sqrt();
    let t_f = (-x_fc / (1.0 - NECK_FILLET_RADIUS)).acos();
    (rho_fc, t_f)
}

fn appendage_segments(nu: f64, tube_l: f64) -> Vec<PlaneSegment> {
    let c0x = NECK_DISC_PLANE - tube_l * nu - 2.0 * nu;
    vec![
        // hemispherical cap: pole at (c0x - nu, 0), joins the tube C^1
        PlaneSegment::Circle {
            cx: c0x,
            crho: 0.0,
            r: nu,
            ang0: PI,
            dir: -1.0,
            q0: 0.0,
            q1: PI / 2.0,
        },
        PlaneSegment::Cylinder {
            x0: c0x,
            radius: nu,
            q0: 0.0,
            q1: tube_l * nu,
        },
        // quarter-circle transition up to the flat disc at orbit radius 3 nu
        PlaneSegment::Circle {
            cx: c0x + tube_l * nu,
            crho: 3.0 * nu,
            r: 2.0 * nu,
            ang0: -PI / 2.0,
            dir: 1.0,
            q0: 0.0,
            q1: PI / 2.0,
        },
    ]
}

/// The nu-scaled appendage alone: hemispherical cap + tube of length
/// tube_l * nu + transition; boundary circle at orbit radius 3 nu.
pub fn neck_appendage(n: u32, nu: f64, tube_l: f64) -> Result<RevolutionImmersion, GeometryError> {
    let (rho_fc, _) = neck_attachment_geometry();
    if !(nu > 0.0 && 3.0 * nu < rho_fc) {
        return Err(GeometryError::NeckTooWide(nu, rho_fc));
    }
    let mut imm = generatrix_immersion(appendage_segments(nu, tube_l), n)?;
    imm.descriptor = ImmersionSpec::NeckAppendage { n, nu, tube_l };
    Ok(imm)
}

/// Closed surface: unit sphere flattened near one pole (flat disc + fillet)
/// with the appendage attached through the disc.
pub fn sphere_with_neck(n: u32, nu: f64, tube_l: f64) -> Result<RevolutionImmersion, GeometryError> {
    let (rho_fc, t_f) = neck_attachment_geometry();
    if !(nu > 0.0 && 3.0 * nu < rho_fc) {
        return Err(GeometryError::NeckTooWide(nu, rho_fc));
    }
    let x_fc = NECK_DISC_PLANE + NECK_FILLET_RADIUS;
    let mut segs = appendage_segments(nu, tube_l);
    segs.push(PlaneSegment::RadialLine {
        x_at: NECK_DISC_PLANE,
        q0: 3.0 * nu,
        q1: rho_fc,
    });
    // fillet: (x_fc - rf cos q, rho_fc + rf sin q), q in [0, t_f]
    segs.push(PlaneSegment::Circle {
        cx: x_fc,
        crho: rho_fc,
        r: NECK_FILLET_RADIUS,
        ang0: PI,
        dir: -1.0,
        q0: 0.0,
        q1: t_f,
    });
    segs.push(PlaneSegment::Circle {
        cx: 0.0,
        crho: 0.0,
        r: 1.0,
        ang0: PI,
        dir: -1.0,
        q0: t_f,
        q1: PI,
    });
    let mut imm = generatrix_immersion(segs, n)?;
    imm.descriptor = ImmersionSpec::SphereWithNeck { n, nu, tube_l };
    Ok(imm)
}
