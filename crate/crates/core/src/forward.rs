//! Direct scattering by a potential supported in D.
//!
//! The total field solves the collocated Lippmann–Schwinger system
//! u_i + Σ_j K_ij q_j u_j = e^{ikα·x_i}, and the radiation pattern is
//! A(β) = −(1/4π) Σ_m e^{−ikβ·x_m} q_m u_m w_m.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ComplexField, FieldRole};
use crate::geometry::{dot, DomainGrid, Vec3};
use crate::gmres::{gmres, GmresOptions, LinearOperator};
use crate::pattern::{check_wave, FarFieldPattern};
use crate::quadrature::SphereQuadrature;
use crate::volume::VolumeOperator;

#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    pub u: ComplexField,
    pub q: ComplexField,
    pub k: f64,
    pub alpha: Vec3,
    pub residual: f64,
    pub iterations: usize,
}

pub fn plane_wave(grid: &DomainGrid, k: f64, alpha: &Vec3) -> Vec<Complex64> {
    grid.cell_centers
        .iter()
        .map(|x| Complex64::from_polar(1.0, k * dot(alpha, x)))
        .collect()
}

/// Holds the assembled volume operator so several incident directions or
/// potentials can be solved on one grid at one wavenumber.
#[derive(Debug)]
pub struct ForwardSolver {
    op: VolumeOperator,
    pub options: GmresOptions,
}

struct LippmannSchwinger<'a> {
    op: &'a VolumeOperator,
    q: &'a [Complex64],
}

impl LinearOperator for LippmannSchwinger<'_> {
    fn dim(&self) -> usize {
        self.q.len()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let qx: Vec<Complex64> = x.iter().zip(self.q).map(|(a, b)| a * b).collect();
        self.op.apply(&qx, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += xi;
        }
    }
}

impl ForwardSolver {
    pub fn new(grid: Arc<DomainGrid>, k: f64, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Config(format!("solver tolerance must be positive, got {tol}")));
        }
        check_wave(k, &[0.0, 0.0, 1.0])?;
        Ok(Self {
            op: VolumeOperator::new(grid, k)?,
            options: GmresOptions {
                tol,
                ..GmresOptions::default()
            },
        })
    }

    pub fn grid(&self) -> &Arc<DomainGrid> {
        self.op.grid()
    }

    pub fn k(&self) -> f64 {
        self.op.k()
    }

    pub fn volume_operator(&self) -> &VolumeOperator {
        &self.op
    }

    pub fn solve(&self, q: &ComplexField, alpha: &Vec3) -> Result<ScatteringSolution> {
        let k = self.k();
        check_wave(k, alpha)?;
        if *q.grid != **self.grid() {
            return Err(Error::GridMismatch("potential is not sampled on the solver grid".into()));
        }
        let u0 = plane_wave(self.grid(), k, alpha);
        let (u, residual, iterations) = if q.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            (u0, 0.0, 0)
        } else {
            let sys = LippmannSchwinger {
                op: &self.op,
                q: &q.values,
            };
            let sol = gmres(&sys, &u0, &self.options)?;
            (sol.x, sol.residual, sol.iterations)
        };
        Ok(ScatteringSolution {
            u: ComplexField::new(self.grid().clone(), u, FieldRole::FieldU)?,
            q: q.clone().with_role(FieldRole::PotentialQ),
            k,
            alpha: *alpha,
            residual,
            iterations,
        })
    }
}

/// One-shot solve: assembles the operator and solves for a single incidence.
pub fn forward_solve(q: &ComplexField, alpha: &Vec3, k: f64, tol: f64) -> Result<ScatteringSolution> {
    ForwardSolver::new(q.grid.clone(), k, tol)?.solve(q, alpha)
}

/// −(1/4π) Σ_m e^{−ikβ·x_m} s_m w_m for each direction β.
pub fn radiate(grid: &DomainGrid, source: &[Complex64], k: f64, directions: &[Vec3]) -> Vec<Complex64> {
    let scale = -1.0 / (4.0 * PI);
    directions
        .par_iter()
        .map(|b| {
            let s: Complex64 = grid
                .cell_centers
                .iter()
                .zip(source)
                .zip(&grid.cell_weights)
                .map(|((x, s), w)| Complex64::from_polar(*w, -k * dot(b, x)) * s)
                .sum();
            s * scale
        })
        .collect()
}

impl ScatteringSolution {
    /// q·u per cell.
    pub fn source(&self) -> Vec<Complex64> {
        self.q.values.iter().zip(&self.u.values).map(|(a, b)| a * b).collect()
    }

    /// Amplitude at arbitrary outgoing directions.
    pub fn amplitude_at(&self, directions: &[Vec3]) -> Vec<Complex64> {
        radiate(&self.u.grid, &self.source(), self.k, directions)
    }
}

pub fn scattering_amplitude(sol: &ScatteringSolution, quad: &Arc<SphereQuadrature>) -> FarFieldPattern {
    let values = sol.amplitude_at(&quad.nodes);
    FarFieldPattern {
        quadrature: quad.clone(),
        values,
        k: sol.k,
        alpha: sol.alpha,
    }
}

/// First Born approximation: the amplitude with u replaced by the incident wave.
pub fn born_amplitude(
    q: &ComplexField,
    alpha: &Vec3,
    k: f64,
    quad: &Arc<SphereQuadrature>,
) -> Result<FarFieldPattern> {
    check_wave(k, alpha)?;
    let u0 = plane_wave(&q.grid, k, alpha);
    let source: Vec<Complex64> = q.values.iter().zip(&u0).map(|(a, b)| a * b).collect();
    Ok(FarFieldPattern {
        quadrature: quad.clone(),
        values: radiate(&q.grid, &source, k, &quad.nodes),
        k,
        alpha: *alpha,
    })
}

/// Im A(α,α) − (k/4π)‖A‖², relative to |Im A(α,α)|.
///
/// Vanishes for real potentials (energy conservation).
pub fn optical_theorem_defect(sol: &ScatteringSolution, pattern: &FarFieldPattern) -> f64 {
    let forward = sol.amplitude_at(&[sol.alpha])[0];
    let power = pattern.norm().powi(2);
    let lhs = forward.im;
    let rhs = sol.k / (4.0 * PI) * power;
    (lhs - rhs).abs() / lhs.abs()
}
