//! Subcommand implementations. Each validates the configuration first,
//! writes its artifacts under the output directory, and returns a report.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use softpart_core::forward::{optical_theorem_defect, ForwardSolver};
use softpart_core::geometry::{norm, Vec3};
use softpart_core::io::{self as sio, EnsembleSidecar, GridFileKind};
use softpart_core::particles::{homogenization_check, particle_density, ConvergenceRecord, DensityField};
use softpart_core::synthesis::{design_potential, SynthesisReport};
use softpart_core::{
    born_amplitude, scattering_amplitude, ComplexField, DomainGrid, Error as CoreError, FarFieldPattern, FieldRole,
    SphereQuadrature,
};

use crate::config::PipelineConfig;
use crate::error::CliError;

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(e.to_string()))?;
    let mut w = sio::create(path)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn write_with<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut std::io::BufWriter<fs::File>) -> softpart_core::Result<()>,
{
    let mut w = sio::create(path)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn quadrature(cfg: &PipelineConfig) -> Result<Arc<SphereQuadrature>, CliError> {
    Ok(Arc::new(SphereQuadrature::new(cfg.quadrature_order)?))
}

fn config_grid(cfg: &PipelineConfig) -> Result<Arc<DomainGrid>, CliError> {
    Ok(Arc::new(DomainGrid::build(cfg.domain_spec.clone(), cfg.resolution)?))
}

fn same_direction(a: &Vec3, b: &Vec3) -> bool {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]]) <= 1e-9
}

#[derive(Debug, Clone, Serialize)]
pub struct ForwardReport {
    pub residual: f64,
    pub iterations: usize,
    pub pattern_norm: f64,
    /// Present for real-valued potentials only.
    pub optical_theorem_defect: Option<f64>,
    /// ‖A − A_Born‖ / ‖A_Born‖
    pub born_relative_diff: f64,
    pub resolution: usize,
    pub k: f64,
    pub alpha: Vec3,
    pub config: PipelineConfig,
}

/// Forward solve for a potential file; writes `pattern.csv` and `forward_report.json`.
pub fn cmd_forward(cfg: &PipelineConfig, q_file: &Path) -> Result<ForwardReport, CliError> {
    cfg.validate()?;
    let (q, _) = sio::read_field(sio::open(q_file)?)?;
    let out = &cfg.output_dir;
    ensure_dir(out)?;
    let quad = quadrature(cfg)?;
    let solver = ForwardSolver::new(q.grid.clone(), cfg.k, cfg.solver_tol)?;
    let sol = solver.solve(&q, &cfg.alpha)?;
    let pattern = scattering_amplitude(&sol, &quad);
    let born = born_amplitude(&q, &cfg.alpha, cfg.k, &quad)?;
    let born_norm = born.norm();
    let born_relative_diff = if born_norm > 0.0 {
        pattern.distance(&born)? / born_norm
    } else {
        pattern.norm()
    };
    let optical = if q.is_real(0.0) && pattern.norm() > 0.0 {
        Some(optical_theorem_defect(&sol, &pattern))
    } else {
        None
    };
    write_with(&out.join("pattern.csv"), |w| sio::write_pattern(w, &pattern))?;
    let report = ForwardReport {
        residual: sol.residual,
        iterations: sol.iterations,
        pattern_norm: pattern.norm(),
        optical_theorem_defect: optical,
        born_relative_diff,
        resolution: q.grid.resolution,
        k: cfg.k,
        alpha: cfg.alpha,
        config: cfg.clone(),
    };
    write_json(&out.join("forward_report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignReport {
    #[serde(flatten)]
    pub synthesis: SynthesisReport,
    pub resolution: usize,
    pub k: f64,
    pub alpha: Vec3,
    /// (λ, residual) for each rung of the ladder that was tried.
    pub ladder: Vec<(f64, f64)>,
    pub total_particles: Option<f64>,
    pub config: PipelineConfig,
}

/// Steps 1–3 for a target pattern, then N(x) when particles are configured.
///
/// Writes `h.csv`, `u.csv`, `q.csv`, `synthesis_report.json` and, with a
/// `particle` section, `N.csv`.
pub fn cmd_design(cfg: &PipelineConfig, target_file: &Path) -> Result<DesignReport, CliError> {
    cfg.validate()?;
    let target = sio::read_pattern(sio::open(target_file)?)?;
    if (target.k - cfg.k).abs() > 1e-12 * cfg.k {
        return Err(CliError::validation(format!(
            "target pattern has k = {} but config has k = {}",
            target.k, cfg.k
        )));
    }
    if !same_direction(&target.alpha, &cfg.alpha) {
        return Err(CliError::validation(format!(
            "target pattern has alpha = {:?} but config has alpha = {:?}",
            target.alpha, cfg.alpha
        )));
    }
    let out = &cfg.output_dir;
    ensure_dir(out)?;
    let grid = config_grid(cfg)?;
    let outcome = design_potential(&target, &grid, &cfg.synthesis_options())?;
    let wave = (Some(cfg.k), Some(cfg.alpha));
    write_with(&out.join("h.csv"), |w| sio::write_field(w, &outcome.h, wave.0, wave.1))?;
    write_with(&out.join("u.csv"), |w| sio::write_field(w, &outcome.u, wave.0, wave.1))?;
    write_with(&out.join("q.csv"), |w| sio::write_field(w, &outcome.q, wave.0, wave.1))?;

    let mut report = DesignReport {
        synthesis: outcome.report.clone(),
        resolution: cfg.resolution,
        k: cfg.k,
        alpha: cfg.alpha,
        ladder: outcome.ladder.clone(),
        total_particles: None,
        config: cfg.clone(),
    };

    let density = match &cfg.particle {
        Some(p) => {
            let (c, _) = p.capacitance()?;
            let q0 = ComplexField::from_fn(grid.clone(), FieldRole::BackgroundQ0, |_| Complex64::from(cfg.q0));
            match particle_density(&outcome.q, &q0, c) {
                Ok(n) => Some(n),
                Err(e @ CoreError::Realizability { .. }) => {
                    write_json(&out.join("synthesis_report.json"), &report)?;
                    return Err(CliError::Numerical(format!(
                        "{e}. Hint: set particle.zeta to an impedance whose C_ζ is aligned with q − q0, \
                         or change the target pattern"
                    )));
                }
                Err(e) => return Err(e.into()),
            }
        }
        None => None,
    };
    if let Some(n) = &density {
        write_with(&out.join("N.csv"), |w| sio::write_density(w, n))?;
        report.total_particles = Some(n.total_expected);
    }
    write_json(&out.join("synthesis_report.json"), &report)?;
    if report.synthesis.final_error > cfg.eps.eps {
        return Err(CliError::validation(format!(
            "final error {:e} exceeds eps = {:e}",
            report.synthesis.final_error, cfg.eps.eps
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub records: Vec<ConvergenceRecord>,
    pub medians: Vec<(usize, f64)>,
    pub non_increasing: bool,
    pub effective_norm: f64,
    pub config: PipelineConfig,
}

/// Samples ensembles over `M_list × seeds`, solves Foldy–Lax for each and
/// compares against the effective medium q = C(x).
///
/// The input may be a density file (`x,y,z,n`), a potential or capacitance
/// field file, or absent (constant `contrast` on the configured domain).
pub fn cmd_simulate(cfg: &PipelineConfig, input: Option<&Path>) -> Result<SimulateReport, CliError> {
    cfg.validate()?;
    let (c_eff, m_list): (ComplexField, Vec<usize>) = match input {
        None => {
            let grid = config_grid(cfg)?;
            let c = ComplexField::from_fn(grid, FieldRole::CapacitanceC, |_| Complex64::from(cfg.contrast));
            (c, cfg.m_list.clone())
        }
        Some(path) => match sio::sniff_kind(path)? {
            GridFileKind::Density => {
                let n: DensityField = sio::read_density(sio::open(path)?)?;
                if n.capacitance.im != 0.0 || !(n.capacitance.re > 0.0) {
                    return Err(CliError::validation(
                        "simulate: density file must carry a real positive capacitance",
                    ));
                }
                let values = n.capacitance_density();
                let c = ComplexField::new(n.grid.clone(), values, FieldRole::CapacitanceC)?;
                (c, vec![n.total_expected.round() as usize])
            }
            GridFileKind::Field => {
                let (q, _) = sio::read_field(sio::open(path)?)?;
                let values = q.values.iter().map(|v| v - cfg.q0).collect();
                let c = ComplexField::new(q.grid.clone(), values, FieldRole::CapacitanceC)?;
                (c, cfg.m_list.clone())
            }
            other => {
                return Err(CliError::validation(format!(
                    "simulate: expected a density or field file, got {other:?}"
                )))
            }
        },
    };
    if let Some(m) = c_eff.values.iter().position(|v| v.im != 0.0 || v.re < 0.0) {
        return Err(CliError::validation(format!(
            "simulate: C(x) = q − q0 must be real and nonnegative (cell {m} has {})",
            c_eff.values[m]
        )));
    }
    let out = cfg.output_dir.clone();
    ensure_dir(&out)?;
    let quad = quadrature(cfg)?;
    let solver = ForwardSolver::new(c_eff.grid.clone(), cfg.k, cfg.solver_tol)?;
    let eff = solver.solve(&c_eff, &cfg.alpha)?;
    let a_eff = scattering_amplitude(&eff, &quad);
    write_with(&out.join("effective_pattern.csv"), |w| sio::write_pattern(w, &a_eff))?;

    let k = cfg.k;
    let alpha = cfg.alpha;
    let report = homogenization_check(
        &c_eff,
        &alpha,
        &quad,
        &solver,
        &m_list,
        &cfg.seeds,
        &cfg.constraints,
        |m, seed, ens, pattern| {
            let stem = format!("M{m}_seed{seed}");
            let csv = out.join(format!("ensemble_{stem}.csv"));
            let side = out.join(format!("ensemble_{stem}.json"));
            let mut cw = sio::create(&csv)?;
            let mut sw = sio::create(&side)?;
            sio::write_ensemble(&mut cw, &mut sw, ens, &EnsembleSidecar { k, alpha, seed, m })?;
            cw.flush()?;
            sw.flush()?;
            let mut pw = sio::create(&out.join(format!("pattern_{stem}.csv")))?;
            sio::write_pattern(&mut pw, pattern)?;
            pw.flush()?;
            Ok(())
        },
    )?;
    let report = SimulateReport {
        records: report.records,
        medians: report.medians,
        non_increasing: report.non_increasing,
        effective_norm: report.effective_norm,
        config: cfg.clone(),
    };
    write_json(&out.join("convergence.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

/// Runs the invariant suite at desk-check sizes; writes `validate.json`.
pub fn cmd_validate(cfg: &PipelineConfig) -> Result<ValidateReport, CliError> {
    cfg.validate()?;
    let checks = crate::invariants::run_all(cfg.k)?;
    let all_passed = checks.iter().all(|c| c.passed);
    for c in &checks {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let report = ValidateReport { checks, all_passed };
    ensure_dir(&cfg.output_dir)?;
    write_json(&cfg.output_dir.join("validate.json"), &report)?;
    if !all_passed {
        return Err(CliError::validation("one or more invariants failed"));
    }
    Ok(report)
}

/// Writes the pattern file for f = Σ c_lm Y_lm (helper for building targets).
pub fn write_harmonic_target(
    path: &PathBuf,
    cfg: &PipelineConfig,
    terms: &[(usize, i32, Complex64)],
) -> Result<FarFieldPattern, CliError> {
    let quad = quadrature(cfg)?;
    let f = FarFieldPattern::from_fn(quad, cfg.k, cfg.alpha, |b| {
        terms
            .iter()
            .map(|(l, m, c)| c * softpart_core::harmonics::spherical_harmonic(*l, *m, b))
            .sum()
    });
    write_with(path, |w| sio::write_pattern(w, &f))?;
    Ok(f)
}

