//! Potential → particle density → sampled ensemble → multiple scattering,
//! compared with the continuous forward solution.

use std::sync::Arc;

use num_complex::Complex64;

use softpart_core::geometry::dot;
use softpart_core::particles::{foldy_lax_solve, particle_density, sample_particles, SamplingConstraints};
use softpart_core::{forward_solve, scattering_amplitude, ComplexField, DomainGrid, DomainSpec, FieldRole, SphereQuadrature};

#[test]
fn sampled_ensemble_reproduces_effective_pattern() {
    let k = 1.0;
    let alpha = [0.0, 0.0, 1.0];
    let grid = Arc::new(DomainGrid::build(DomainSpec::unit_ball(), 16).unwrap());
    let quad = Arc::new(SphereQuadrature::new(8).unwrap());
    let q = ComplexField::from_fn(grid.clone(), FieldRole::PotentialQ, |x| Complex64::from(1.0 - dot(x, x)));
    let q0 = ComplexField::zeros(grid.clone(), FieldRole::BackgroundQ0);

    let total: f64 = q.values.iter().zip(&grid.cell_weights).map(|(v, w)| v.re * w).sum();
    let c0 = Complex64::from(total / 3000.0);
    let n = particle_density(&q, &q0, c0).unwrap();
    assert!((n.total_expected - 3000.0).abs() < 1e-6);

    let effective = scattering_amplitude(&forward_solve(&q, &alpha, k, 1e-12).unwrap(), &quad);
    let mut errors = Vec::new();
    for seed in 0..3 {
        let constraints = SamplingConstraints::default();
        let ens = sample_particles(&n, seed, 3000, k, &constraints).unwrap();
        ens.validate(&constraints).unwrap();
        let fl = foldy_lax_solve(&ens, &alpha, k, &quad).unwrap();
        errors.push(fl.pattern.distance(&effective).unwrap() / effective.norm());
    }
    errors.sort_by(f64::total_cmp);
    assert!(errors[1] < 0.1, "{errors:?}");
}
