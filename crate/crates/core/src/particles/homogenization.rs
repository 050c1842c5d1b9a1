//! Effective-medium check: many soft particles with capacitance density
//! C(x) against a single forward solve with q = C.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::forward::{scattering_amplitude, ForwardSolver};
use crate::geometry::Vec3;
use crate::particles::foldy_lax::foldy_lax_solve_with;
use crate::particles::{particle_density, sample_particles, ParticleEnsemble, SamplingConstraints};
use crate::gmres::GmresOptions;
use crate::pattern::FarFieldPattern;
use crate::quadrature::SphereQuadrature;
use crate::field::FieldRole;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub error: f64,
    pub realized: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogenizationReport {
    pub records: Vec<ConvergenceRecord>,
    /// (M, median error over seeds), in the order of the M list.
    pub medians: Vec<(usize, f64)>,
    pub non_increasing: bool,
    pub effective_norm: f64,
}

/// Runs the Foldy–Lax solve for every (M, seed) and compares against the
/// effective-medium pattern. `solver` must be built on `c_eff`'s grid.
///
/// `on_run` sees each ensemble and its pattern, e.g. to write artifacts.
#[allow(clippy::too_many_arguments)]
pub fn homogenization_check(
    c_eff: &ComplexField,
    alpha: &Vec3,
    quad: &Arc<SphereQuadrature>,
    solver: &ForwardSolver,
    m_list: &[usize],
    seeds: &[u64],
    constraints: &SamplingConstraints,
    mut on_run: impl FnMut(usize, u64, &ParticleEnsemble, &FarFieldPattern) -> Result<()>,
) -> Result<HomogenizationReport> {
    let k = solver.k();
    if c_eff.values.iter().any(|v| v.im != 0.0 || v.re < 0.0) {
        return Err(Error::Config(
            "the capacitance density for the homogenization check must be real and nonnegative".into(),
        ));
    }
    let eff = solver.solve(c_eff, alpha)?;
    let a_eff = scattering_amplitude(&eff, quad);
    let eff_norm = a_eff.norm();
    let total: f64 = c_eff
        .values
        .iter()
        .zip(&c_eff.grid.cell_weights)
        .map(|(c, w)| c.re * w)
        .sum();
    let q0 = ComplexField::zeros(c_eff.grid.clone(), FieldRole::BackgroundQ0);
    let fl_opts = GmresOptions {
        tol: 1e-10,
        ..GmresOptions::default()
    };

    let mut records = Vec::new();
    let mut medians = Vec::new();
    for &m in m_list {
        let mut errs = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let (ens, radius) = if m == 0 || total == 0.0 {
                (ParticleEnsemble::empty(k), 0.0)
            } else {
                // M identical spheres carry the total capacitance: 4πa·M = ∫C.
                let c0 = total / m as f64;
                let density = particle_density(c_eff, &q0, Complex64::from(c0))?;
                let ens = sample_particles(&density, seed, m as u64, k, constraints)?;
                let a = ens.a_max;
                (ens, a)
            };
            let sol = foldy_lax_solve_with(&ens, alpha, k, quad, &fl_opts)?;
            let diff = sol.pattern.distance(&a_eff)?;
            let error = if eff_norm > 0.0 {
                diff / eff_norm
            } else {
                diff
            };
            on_run(m, seed, &ens, &sol.pattern)?;
            errs.push(error);
            records.push(ConvergenceRecord {
                m,
                seed,
                error,
                realized: ens.len(),
                radius,
            });
        }
        medians.push((m, median(&mut errs)));
    }
    let non_increasing = medians.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(HomogenizationReport {
        records,
        medians,
        non_increasing,
        effective_norm: eff_norm,
    })
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainGrid, DomainSpec};

    const Z: Vec3 = [0.0, 0.0, 1.0];

    #[test]
    fn zero_density_scatters_nothing() {
        let g = Arc::new(DomainGrid::build(DomainSpec::unit_ball(), 8).unwrap());
        let c = ComplexField::zeros(g.clone(), FieldRole::CapacitanceC);
        let quad = Arc::new(SphereQuadrature::new(4).unwrap());
        let solver = ForwardSolver::new(g, 1.0, 1e-10).unwrap();
        let r = homogenization_check(&c, &Z, &quad, &solver, &[10, 100], &[0, 1], &SamplingConstraints::default(), |_, _, e, p| {
            assert!(e.is_empty());
            assert!(p.values.iter().all(|v| v.norm() == 0.0));
            Ok(())
        })
        .unwrap();
        assert!(r.records.iter().all(|x| x.error == 0.0));
        assert_eq!(r.effective_norm, 0.0);
    }

    #[test]
    fn capacitance_split_does_not_change_effective_medium() {
        // Same C(x) from (N, C₀) and (N/2, 2C₀).
        let g = Arc::new(DomainGrid::build(DomainSpec::unit_ball(), 8).unwrap());
        let q0 = ComplexField::zeros(g.clone(), FieldRole::BackgroundQ0);
        let c = ComplexField::from_fn(g.clone(), FieldRole::CapacitanceC, |x| Complex64::from(1.0 + x[0]));
        let n1 = particle_density(&c, &q0, Complex64::from(0.01)).unwrap();
        let n2 = particle_density(&c, &q0, Complex64::from(0.02)).unwrap();
        let c1 = n1.capacitance_density();
        let c2 = n2.capacitance_density();
        for (a, b) in c1.iter().zip(&c2) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
