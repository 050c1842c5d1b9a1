//! Foldy–Lax reduction for small soft particles.
//!
//! Particle m radiates c_m e^{ik|x−x_m|}/(4π|x−x_m|). The Dirichlet
//! condition gives c_j = −C_j [u₀(x_j) + Σ_{m≠j} G(x_j, x_m) c_m + (ik/4π) c_j],
//! where the last term is the regular part of the particle's own field at its
//! center. Folding it into the capacitance, C̃_j = C_j / (1 + ikC_j/4π), we
//! solve for the exciting field v_j = u₀(x_j) + Σ_{m≠j} G_jm c_m:
//!     v_j + Σ_{m≠j} G_jm C̃_m v_m = u₀(x_j),   c_j = −C̃_j v_j.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{dot, Vec3};
use crate::gmres::{gmres, GmresOptions, LinearOperator};
use crate::kernel::green_at_distance;
use crate::geometry::dist;
use crate::pattern::{check_wave, FarFieldPattern};
use crate::particles::ParticleEnsemble;
use crate::quadrature::SphereQuadrature;

#[derive(Debug, Clone)]
pub struct FoldyLaxSolution {
    /// Source strengths c_m.
    pub strengths: Vec<Complex64>,
    pub pattern: FarFieldPattern,
    pub residual: f64,
    pub iterations: usize,
}

/// C / (1 + ikC/4π)
pub(crate) fn dressed_capacitance(c: Complex64, k: f64) -> Complex64 {
    c / (Complex64::from(1.0) + Complex64::new(0.0, k) * c / (4.0 * PI))
}

struct MultipleScattering<'a> {
    positions: &'a [Vec3],
    dressed: &'a [Complex64],
    k: f64,
}

impl LinearOperator for MultipleScattering<'_> {
    fn dim(&self) -> usize {
        self.positions.len()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let src: Vec<Complex64> = x.iter().zip(self.dressed).map(|(a, b)| a * b).collect();
        y.par_iter_mut().enumerate().for_each(|(j, yj)| {
            let xj = &self.positions[j];
            let mut s = Complex64::new(0.0, 0.0);
            for (m, (xm, sm)) in self.positions.iter().zip(&src).enumerate() {
                if m != j {
                    s += green_at_distance(dist(xj, xm), self.k) * sm;
                }
            }
            *yj = x[j] + s;
        });
    }
}

pub fn foldy_lax_solve(
    ens: &ParticleEnsemble,
    alpha: &Vec3,
    k: f64,
    quad: &Arc<SphereQuadrature>,
) -> Result<FoldyLaxSolution> {
    foldy_lax_solve_with(ens, alpha, k, quad, &GmresOptions { tol: 1e-12, ..GmresOptions::default() })
}

pub fn foldy_lax_solve_with(
    ens: &ParticleEnsemble,
    alpha: &Vec3,
    k: f64,
    quad: &Arc<SphereQuadrature>,
    options: &GmresOptions,
) -> Result<FoldyLaxSolution> {
    check_wave(k, alpha)?;
    if ens.is_empty() {
        return Ok(FoldyLaxSolution {
            strengths: Vec::new(),
            pattern: FarFieldPattern::zeros(quad.clone(), k, *alpha),
            residual: 0.0,
            iterations: 0,
        });
    }
    let dressed: Vec<Complex64> = ens.capacitances.iter().map(|c| dressed_capacitance(*c, k)).collect();
    let u0: Vec<Complex64> = ens
        .positions
        .iter()
        .map(|x| Complex64::from_polar(1.0, k * dot(alpha, x)))
        .collect();
    let op = MultipleScattering {
        positions: &ens.positions,
        dressed: &dressed,
        k,
    };
    let sol = gmres(&op, &u0, options)?;
    let strengths: Vec<Complex64> = sol.x.iter().zip(&dressed).map(|(v, c)| -c * v).collect();
    let values = quad
        .nodes
        .par_iter()
        .map(|b| {
            let s: Complex64 = ens
                .positions
                .iter()
                .zip(&strengths)
                .map(|(x, c)| Complex64::from_polar(1.0, -k * dot(b, x)) * c)
                .sum();
            s / (4.0 * PI)
        })
        .collect();
    Ok(FoldyLaxSolution {
        strengths,
        pattern: FarFieldPattern {
            quadrature: quad.clone(),
            values,
            k,
            alpha: *alpha,
        },
        residual: sol.residual,
        iterations: sol.iterations,
    })
}
