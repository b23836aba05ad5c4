//! Declarative experiment configuration: one JSON file per run.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub parameters: Parameters,
    pub output: OutputConfig,
    /// Recorded in every artifact; defaults to 42.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SphereValidate,
    SpheroidPinchSweep,
    DumbbellSweep,
    NeckTune,
    ModelSpectrum,
    IdentityAudit,
}

impl Experiment {
    pub fn all() -> [(Experiment, &'static str); 6] {
        use Experiment::*;
        [
            (SphereValidate, "sphere-validate: spectrum of S^n against the exact k(n+k-1)/R^2 ladder"),
            (SpheroidPinchSweep, "spheroid-pinch-sweep: cluster windows and inequality suite across a flattening sweep"),
            (DumbbellSweep, "dumbbell-sweep: eigenvalue collapse (chain) or curvature budgets (bispherical) across neck widths"),
            (NeckTune, "neck-tune: Dirichlet tuning of a thin appendage and the added eigenvalue of the assembled surface"),
            (ModelSpectrum, "model-spectrum: spectrum of the d-cover model metric on [0, pi/2]"),
            (IdentityAudit, "identity-audit: harmonic polynomial identities and geometric identity health checks"),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::SphereValidate => "sphere-validate",
            Experiment::SpheroidPinchSweep => "spheroid-pinch-sweep",
            Experiment::DumbbellSweep => "dumbbell-sweep",
            Experiment::NeckTune => "neck-tune",
            Experiment::ModelSpectrum => "model-spectrum",
            Experiment::IdentityAudit => "identity-audit",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Parameters {
    pub n: u32,
    pub radius: f64,
    pub mesh: usize,
    pub max_ell: u32,
    pub deltas: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub tau_grid: Vec<f64>,
    pub k_max: u32,
    pub p_spheres: usize,
    pub family: String,
    pub neck_len: f64,
    pub flattening_scale: f64,
    pub target_lambda: f64,
    pub cylinder_target: f64,
    pub lengths: Vec<f64>,
    pub d_cover: u32,
    pub count: usize,
    pub n_list: Vec<u32>,
    pub samples: usize,
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            n: 2,
            radius: 1.0,
            mesh: 1500,
            max_ell: 5,
            deltas: vec![0.2, 0.1, 0.05, 0.02],
            eps_list: vec![0.2, 0.1, 0.05, 0.025],
            tau_grid: vec![0.01, 0.02, 0.05, 0.1],
            k_max: 3,
            p_spheres: 2,
            family: "chain".into(),
            neck_len: 0.0,
            flattening_scale: 0.28,
            target_lambda: 5.0,
            cylinder_target: 3.0,
            lengths: vec![10.0, 20.0, 40.0],
            d_cover: 2,
            count: 30,
            n_list: vec![2, 3, 4],
            samples: 200,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["json".into(), "csv".into()]
}

/// Range validation; violations are reported together.
pub fn validate(cfg: &ExperimentConfig) -> Result<(), Vec<String>> {
    let p = &cfg.parameters;
    let mut errs = Vec::new();
    let mut need = |ok: bool, msg: &str| {
        if !ok {
            errs.push(msg.to_string());
        }
    };
    need(p.n >= 2 && p.n <= 6, "n must be in 2..=6");
    need(p.radius > 0.0, "radius must be positive");
    need(p.mesh >= 64 && p.mesh <= 100_000, "mesh must be in 64..=100000");
    need(p.max_ell <= 24, "max_ell must be <= 24");
    need(
        p.deltas.iter().all(|d| *d > 0.0 && *d < 1.0),
        "deltas must lie in (0, 1)",
    );
    need(
        p.eps_list
            .iter()
            .all(|e| *e > 0.0 && *e < p.flattening_scale.min(0.5)),
        "eps values must satisfy 0 < eps < flattening_scale (and < 1/2)",
    );
    need(
        p.flattening_scale > 0.0 && p.flattening_scale < std::f64::consts::PI / 10.0,
        "flattening_scale must lie in (0, pi/10)",
    );
    need(
        p.tau_grid.iter().all(|t| *t > 0.0 && *t < 1.0),
        "tau_grid must lie in (0, 1)",
    );
    need(p.k_max >= 1 && p.k_max <= 6, "k_max must be in 1..=6");
    need(p.p_spheres >= 1 && p.p_spheres <= 8, "p_spheres must be in 1..=8");
    need(
        p.family == "chain" || p.family == "bispherical",
        "family must be 'chain' or 'bispherical'",
    );
    need(p.neck_len >= 0.0, "neck_len must be nonnegative");
    need(p.target_lambda > 0.0, "target_lambda must be positive");
    need(p.cylinder_target > 0.0, "cylinder_target must be positive");
    need(
        !p.lengths.is_empty() && p.lengths.iter().all(|l| *l > 0.0),
        "lengths must be positive and nonempty",
    );
    need(p.d_cover >= 1 && p.d_cover <= 8, "d_cover must be in 1..=8");
    need(p.count >= 1 && p.count <= 500, "count must be in 1..=500");
    need(
        !p.n_list.is_empty() && p.n_list.iter().all(|n| (2..=6).contains(n)),
        "n_list entries must be in 2..=6",
    );
    need(p.samples >= 1 && p.samples <= 10_000, "samples must be in 1..=10000");
    if cfg.experiment == Experiment::ModelSpectrum {
        need(p.n >= 3, "model-spectrum needs n >= 3");
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}
