use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use softpart_core::geometry::{norm, DomainSpec, Vec3};
use softpart_core::particles::{impedance_capacitance, sphere_capacitance, sphere_surface_area, Impedance, SamplingConstraints};
use softpart_core::synthesis::{default_lambda_ladder, SynthesisOptions};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsTargets {
    pub eps1: f64,
    pub eps2: f64,
    pub eps: f64,
}

impl Default for EpsTargets {
    fn default() -> Self {
        Self {
            eps1: 1e-6,
            eps2: 1e-3,
            eps: 1e-2,
        }
    }
}

/// Identical particles: either a sphere radius or an explicit capacitance,
/// optionally with a boundary impedance.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleParams {
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub c0: Option<f64>,
    /// [re, im]; absent means the Dirichlet condition.
    #[serde(default)]
    pub zeta: Option<[f64; 2]>,
}

impl ParticleParams {
    /// Per-particle capacitance (C₀ or C_ζ) and the radius to use when sampling.
    pub fn capacitance(&self) -> Result<(Complex64, Option<f64>), CliError> {
        let c0 = match (self.c0, self.radius) {
            (Some(c), _) => c,
            (None, Some(a)) => sphere_capacitance(a)?,
            (None, None) => return Err(CliError::validation("particle: one of `radius` or `c0` is required")),
        };
        let Some(z) = self.zeta else {
            return Ok((Complex64::from(c0), self.radius));
        };
        let a = self
            .radius
            .ok_or_else(|| CliError::validation("particle: `radius` is required with `zeta` (surface area)"))?;
        let cz = impedance_capacitance(c0, Impedance::Finite(Complex64::new(z[0], z[1])), sphere_surface_area(a))?;
        Ok((cz, Some(a)))
    }
}

fn default_domain() -> DomainSpec {
    DomainSpec::unit_ball()
}
fn default_resolution() -> usize {
    20
}
fn default_k() -> f64 {
    1.0
}
fn default_alpha() -> Vec3 {
    [0.0, 0.0, 1.0]
}
fn default_order() -> usize {
    12
}
fn default_solver_tol() -> f64 {
    1e-12
}
fn default_m_list() -> Vec<usize> {
    vec![100, 1000, 5000]
}
fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4]
}
fn default_contrast() -> f64 {
    1.0
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Experiment configuration; every report embeds the fully defaulted copy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_domain")]
    pub domain_spec: DomainSpec,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_alpha")]
    pub alpha: Vec3,
    #[serde(default = "default_order")]
    pub quadrature_order: usize,
    #[serde(default)]
    pub eps: EpsTargets,
    /// Clipping threshold on |u|; null selects 1e−3·max|u|.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default = "default_lambda_ladder")]
    pub lambda_ladder: Vec<f64>,
    #[serde(default = "default_solver_tol")]
    pub solver_tol: f64,
    /// Constant background potential q₀ on D.
    #[serde(default)]
    pub q0: f64,
    /// Particle parameters; the design command derives N(x) only when set.
    #[serde(default)]
    pub particle: Option<ParticleParams>,
    #[serde(default)]
    pub constraints: SamplingConstraints,
    #[serde(default = "default_m_list", rename = "M_list")]
    pub m_list: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Capacitance density C(x) used by `simulate` when no input file is given.
    #[serde(default = "default_contrast")]
    pub contrast: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let cfg: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))?;
        Ok(cfg)
    }

    /// Field-level checks run before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |field: &str, msg: String| Err(CliError::validation(format!("{field}: {msg}")));
        if let Err(e) = self.domain_spec.validate() {
            return fail("domain_spec", e.to_string());
        }
        if self.resolution < 2 {
            return fail("resolution", format!("must be at least 2, got {}", self.resolution));
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return fail("k", format!("must be positive, got {}", self.k));
        }
        if (norm(&self.alpha) - 1.0).abs() > 1e-9 {
            return fail("alpha", format!("must be a unit vector, got {:?}", self.alpha));
        }
        if self.quadrature_order < 1 {
            return fail("quadrature_order", "must be at least 1".into());
        }
        let e = &self.eps;
        if !(e.eps1 > 0.0) || !(e.eps2 > 0.0) || !(e.eps > 0.0) {
            return fail("eps", "eps1, eps2 and eps must be positive".into());
        }
        let budget = e.eps1 + e.eps2 * self.domain_spec.volume() / (4.0 * PI);
        if e.eps < budget {
            return fail(
                "eps",
                format!("eps = {:e} is below eps1 + eps2·|D|/(4π) = {budget:e}", e.eps),
            );
        }
        if let Some(d) = self.delta {
            if !(d > 0.0) {
                return fail("delta", format!("must be positive, got {d}"));
            }
        }
        if self.lambda_ladder.is_empty() || self.lambda_ladder.iter().any(|l| !(*l > 0.0)) {
            return fail("lambda_ladder", "must be a nonempty list of positive values".into());
        }
        if !(self.solver_tol > 0.0) {
            return fail("solver_tol", "must be positive".into());
        }
        if let Some(p) = &self.particle {
            if let Err(err) = p.capacitance() {
                return fail("particle", err.to_string());
            }
            if let Some(z) = p.zeta {
                if z[0] < 0.0 {
                    return fail("particle.zeta", "real part must be nonnegative".into());
                }
            }
        }
        let c = &self.constraints;
        if !(c.ka_max > 0.0) || !(c.a_over_d_max > 0.0) || c.a_over_d_max >= 0.5 {
            return fail("constraints", "ka_max > 0 and 0 < a_over_d_max < 0.5 required".into());
        }
        if self.seeds.is_empty() {
            return fail("seeds", "at least one seed is required".into());
        }
        if !(self.contrast >= 0.0) {
            return fail("contrast", "must be nonnegative".into());
        }
        Ok(())
    }

    pub fn synthesis_options(&self) -> SynthesisOptions {
        SynthesisOptions {
            eps1_target: self.eps.eps1,
            lambda_ladder: self.lambda_ladder.clone(),
            delta: self.delta,
            solver_tol: self.solver_tol,
        }
    }
}
