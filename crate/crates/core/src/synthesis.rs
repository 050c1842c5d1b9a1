//! Pattern synthesis: target pattern f → auxiliary density h → potential q.
//!
//! Step 1 finds h with f + F h small, where
//! (F h)(β) = (1/4π) Σ_m e^{−ikβ·x_m} h_m w_m, by Tikhonov regularization
//! with a discrepancy-principle choice of λ. Step 2 uses h = q u: the
//! Lippmann–Schwinger representation gives u = u₀ − K h directly, and then
//! q = h / u away from the (near-)zeros of u. Step 3 re-solves the forward
//! problem with that q and measures ‖f − A_q‖.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, FieldRole};
use crate::forward::{plane_wave, radiate, scattering_amplitude, ForwardSolver};
use crate::geometry::{dot, DomainGrid, Vec3};
use crate::pattern::FarFieldPattern;
use crate::volume::VolumeOperator;

/// λ ∈ {1e−1, 1e−2, …, 1e−12}.
pub fn default_lambda_ladder() -> Vec<f64> {
    (1..=12).map(|e| 10f64.powi(-e)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOptions {
    /// Target for ‖f + F h‖ in L²(S²).
    pub eps1_target: f64,
    pub lambda_ladder: Vec<f64>,
    /// Clipping threshold on |u|; `None` selects 1e−3·max|u|.
    pub delta: Option<f64>,
    /// Relative residual for the verification solve.
    pub solver_tol: f64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            eps1_target: 1e-6,
            lambda_ladder: default_lambda_ladder(),
            delta: None,
            solver_tol: 1e-12,
        }
    }
}

/// F as a dense matrix in the weighted coordinates where both L² norms are
/// Euclidean: entry (j, m) = √s_j · (1/4π) e^{−ikβ_j·x_m} · √w_m.
fn weighted_fourier_matrix(grid: &DomainGrid, k: f64, nodes: &[Vec3], weights: &[f64]) -> DMatrix<Complex64> {
    let sw: Vec<f64> = grid.cell_weights.iter().map(|w| w.sqrt()).collect();
    DMatrix::from_fn(nodes.len(), grid.len(), |j, m| {
        let b = &nodes[j];
        Complex64::from_polar(weights[j].sqrt() * sw[m] / (4.0 * PI), -k * dot(b, &grid.cell_centers[m]))
    })
}

/// (F h)(β_j) at the pattern's quadrature nodes.
pub fn fourier_of_density(h: &ComplexField, k: f64, nodes: &[Vec3]) -> Vec<Complex64> {
    // radiate() carries the −1/4π factor of the amplitude.
    radiate(&h.grid, &h.values, k, nodes)
        .into_iter()
        .map(|v| -v)
        .collect()
}

/// ‖f + F h‖ in L²(S²).
pub fn step1_residual(f: &FarFieldPattern, h: &ComplexField) -> f64 {
    let fh = fourier_of_density(h, f.k, &f.quadrature.nodes);
    f.values
        .iter()
        .zip(&fh)
        .zip(&f.quadrature.weights)
        .map(|((a, b), w)| (a + b).norm_sqr() * w)
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone)]
pub struct DensitySynthesis {
    pub h: ComplexField,
    pub eps1_achieved: f64,
    pub lambda: f64,
    /// (λ, residual) for every rung tried, in ladder order.
    pub ladder: Vec<(f64, f64)>,
}

/// Tikhonov-regularized inverse of F via a thin SVD.
pub struct RegularizedInverse {
    grid: Arc<DomainGrid>,
    sigma: Vec<f64>,
    u: DMatrix<Complex64>,
    v_adj: DMatrix<Complex64>,
    sqrt_node_weights: Vec<f64>,
}

impl RegularizedInverse {
    pub fn new(grid: Arc<DomainGrid>, k: f64, nodes: &[Vec3], weights: &[f64]) -> Result<Self> {
        let a = weighted_fourier_matrix(&grid, k, nodes, weights);
        let svd = a.svd(true, true);
        let u = svd.u.ok_or_else(|| Error::Config("SVD did not produce U".into()))?;
        let v_adj = svd.v_t.ok_or_else(|| Error::Config("SVD did not produce V".into()))?;
        Ok(Self {
            grid,
            sigma: svd.singular_values.iter().copied().collect(),
            u,
            v_adj,
            sqrt_node_weights: weights.iter().map(|w| w.sqrt()).collect(),
        })
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    /// argmin ‖f + F h‖² + λ‖h‖²_{L²(D)}.
    pub fn solve(&self, f: &[Complex64], lambda: f64) -> ComplexField {
        let b = DVector::from_iterator(
            f.len(),
            f.iter().zip(&self.sqrt_node_weights).map(|(v, s)| -v * *s),
        );
        let coeff = self.u.adjoint() * b;
        let filtered = DVector::from_iterator(
            self.sigma.len(),
            self.sigma
                .iter()
                .zip(coeff.iter())
                .map(|(s, c)| c * (s / (s * s + lambda))),
        );
        let g = self.v_adj.adjoint() * filtered;
        let values = g
            .iter()
            .zip(&self.grid.cell_weights)
            .map(|(v, w)| v / w.sqrt())
            .collect();
        ComplexField {
            grid: self.grid.clone(),
            values,
            role: FieldRole::DensityH,
        }
    }
}

/// Step 1: the largest λ on the ladder whose residual meets `eps1_target`.
pub fn synthesize_h(
    f: &FarFieldPattern,
    grid: &Arc<DomainGrid>,
    eps1_target: f64,
    lambda_ladder: &[f64],
) -> Result<DensitySynthesis> {
    if !(eps1_target > 0.0) {
        return Err(Error::Config(format!("eps1 target must be positive, got {eps1_target}")));
    }
    if lambda_ladder.is_empty() || lambda_ladder.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Config("lambda ladder must hold positive values".into()));
    }
    if f.values.iter().all(|v| v.norm() == 0.0) {
        return Ok(DensitySynthesis {
            h: ComplexField::zeros(grid.clone(), FieldRole::DensityH),
            eps1_achieved: 0.0,
            lambda: lambda_ladder[0],
            ladder: vec![(lambda_ladder[0], 0.0)],
        });
    }
    let mut ladder: Vec<f64> = lambda_ladder.to_vec();
    ladder.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let inverse = RegularizedInverse::new(grid.clone(), f.k, &f.quadrature.nodes, &f.quadrature.weights)?;
    let mut tried = Vec::with_capacity(ladder.len());
    let mut best: Option<(f64, ComplexField, f64)> = None;
    for &lambda in &ladder {
        let h = inverse.solve(&f.values, lambda);
        let r = step1_residual(f, &h);
        tried.push((lambda, r));
        if best.as_ref().is_none_or(|(br, _, _)| r < *br) {
            best = Some((r, h.clone(), lambda));
        }
        if r <= eps1_target {
            return Ok(DensitySynthesis {
                h,
                eps1_achieved: r,
                lambda,
                ladder: tried,
            });
        }
    }
    let best_residual = best.map(|b| b.0).unwrap_or(f64::INFINITY);
    Err(Error::SynthesisFailure {
        best_residual,
        smallest_lambda: *ladder.last().unwrap(),
        target: eps1_target,
    })
}

/// u = u₀ − K h, the total field implied by h = q u.
pub fn field_from_h(h: &ComplexField, alpha: &Vec3, k: f64) -> Result<ComplexField> {
    let op = VolumeOperator::new(h.grid.clone(), k)?;
    Ok(field_from_h_with(&op, h, alpha))
}

pub fn field_from_h_with(op: &VolumeOperator, h: &ComplexField, alpha: &Vec3) -> ComplexField {
    let mut u = plane_wave(&h.grid, op.k(), alpha);
    let kh = op.apply_vec(&h.values);
    for (ui, khi) in u.iter_mut().zip(&kh) {
        *ui -= khi;
    }
    ComplexField {
        grid: h.grid.clone(),
        values: u,
        role: FieldRole::FieldU,
    }
}

#[derive(Debug, Clone)]
pub struct RecoveredPotential {
    pub q: ComplexField,
    pub eps2_achieved: f64,
    pub clipped: Vec<usize>,
    pub clip_fraction: f64,
}

/// Step 2: q = h/u where |u| ≥ δ, q = 0 elsewhere.
pub fn recover_q(h: &ComplexField, u: &ComplexField, delta: f64) -> Result<RecoveredPotential> {
    h.same_grid(u)?;
    if !(delta > 0.0) {
        return Err(Error::Config(format!("delta must be positive, got {delta}")));
    }
    let mut clipped = Vec::new();
    let mut mass = 0.0;
    let values = h
        .values
        .iter()
        .zip(&u.values)
        .enumerate()
        .map(|(m, (hm, um))| {
            if um.norm() >= delta {
                hm / um
            } else {
                clipped.push(m);
                mass += hm.norm_sqr() * h.grid.cell_weights[m];
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let clip_fraction = if h.is_empty() {
        0.0
    } else {
        clipped.len() as f64 / h.len() as f64
    };
    Ok(RecoveredPotential {
        q: ComplexField {
            grid: h.grid.clone(),
            values,
            role: FieldRole::PotentialQ,
        },
        eps2_achieved: mass.sqrt(),
        clipped,
        clip_fraction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub eps1: f64,
    pub eps2: f64,
    pub final_error: f64,
    /// ε₁ + ε₂|D|/(4π)
    pub bound: f64,
    pub lambda: f64,
    pub clip_fraction: f64,
    /// ‖A(constructed u) − A(re-solved u)‖ for the same q.
    pub slack: f64,
    pub within_bound: bool,
    pub target_norm: f64,
    pub solver_residual: f64,
}

/// Step-1/2 diagnostics carried into the verification.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepDiagnostics<'a> {
    pub eps1: f64,
    pub eps2: f64,
    pub lambda: f64,
    pub clip_fraction: f64,
    pub constructed_u: Option<&'a ComplexField>,
}

/// Step 3: a genuine forward solve with q and the end-to-end error.
pub fn verify_pipeline(
    f: &FarFieldPattern,
    q: &ComplexField,
    solver: &ForwardSolver,
    diag: &StepDiagnostics<'_>,
) -> Result<SynthesisReport> {
    let sol = solver.solve(q, &f.alpha)?;
    let a = scattering_amplitude(&sol, &f.quadrature);
    let final_error = f.distance(&a)?;
    let measure = q.grid.total_volume();
    let bound = diag.eps1 + diag.eps2 * measure / (4.0 * PI);
    let slack = match diag.constructed_u {
        Some(uc) => {
            let src: Vec<Complex64> = q.values.iter().zip(&uc.values).map(|(a, b)| a * b).collect();
            let ac = radiate(&q.grid, &src, f.k, &f.quadrature.nodes);
            let ac = FarFieldPattern {
                values: ac,
                ..a.clone()
            };
            ac.distance(&a)?
        }
        None => 0.0,
    };
    Ok(SynthesisReport {
        eps1: diag.eps1,
        eps2: diag.eps2,
        final_error,
        bound,
        lambda: diag.lambda,
        clip_fraction: diag.clip_fraction,
        slack,
        within_bound: final_error <= bound + slack,
        target_norm: f.norm(),
        solver_residual: sol.residual,
    })
}

#[derive(Debug, Clone)]
pub struct DesignOutcome {
    pub h: ComplexField,
    pub u: ComplexField,
    pub q: ComplexField,
    pub report: SynthesisReport,
    pub ladder: Vec<(f64, f64)>,
}

/// Steps 1–3 end to end.
pub fn design_potential(
    f: &FarFieldPattern,
    grid: &Arc<DomainGrid>,
    options: &SynthesisOptions,
) -> Result<DesignOutcome> {
    let step1 = synthesize_h(f, grid, options.eps1_target, &options.lambda_ladder)?;
    let solver = ForwardSolver::new(grid.clone(), f.k, options.solver_tol)?;
    let u = field_from_h_with(solver.volume_operator(), &step1.h, &f.alpha);
    let delta = options.delta.unwrap_or_else(|| 1e-3 * u.max_abs());
    let step2 = recover_q(&step1.h, &u, delta)?;
    let report = verify_pipeline(
        f,
        &step2.q,
        &solver,
        &StepDiagnostics {
            eps1: step1.eps1_achieved,
            eps2: step2.eps2_achieved,
            lambda: step1.lambda,
            clip_fraction: step2.clip_fraction,
            constructed_u: Some(&u),
        },
    )?;
    Ok(DesignOutcome {
        h: step1.h,
        u,
        q: step2.q,
        report,
        ladder: step1.ladder,
    })
}
