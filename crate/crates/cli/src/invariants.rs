//! Quick invariant checks behind the `validate` subcommand.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use softpart_core::forward::{optical_theorem_defect, ForwardSolver};
use softpart_core::harmonics::spherical_harmonic;
use softpart_core::kernel::self_cell_weight;
use softpart_core::particles::{
    foldy_lax_solve, impedance_capacitance, sphere_capacitance, Impedance, ParticleEnsemble,
};
use softpart_core::quadrature::gauss_legendre;
use softpart_core::synthesis::{design_potential, fourier_of_density, SynthesisOptions};
use softpart_core::{
    born_amplitude, scattering_amplitude, ComplexField, DomainGrid, DomainSpec, FarFieldPattern, FieldRole,
    SphereQuadrature,
};

use crate::commands::CheckResult;
use crate::error::CliError;

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

pub fn run_all(k: f64) -> Result<Vec<CheckResult>, CliError> {
    let z = [0.0, 0.0, 1.0];
    let mut out = Vec::new();

    let quad = SphereQuadrature::new(8)?;
    let total: f64 = quad.weights.iter().sum();
    let y20 = quad.integrate(|b| Complex64::from(spherical_harmonic(2, 0, b).norm_sqr()));
    out.push(check(
        "sphere quadrature exactness",
        (total - 4.0 * PI).abs() < 1e-10 && (y20.re - 1.0).abs() < 1e-8,
        format!("sum w = {total:.15}, |Y20|^2 = {:.12}", y20.re),
    ));

    let rho: f64 = 0.1;
    let s = self_cell_weight(4.0 / 3.0 * PI * rho.powi(3), k)?;
    let (x, w) = gauss_legendre(40);
    let oracle: Complex64 = x
        .iter()
        .zip(&w)
        .map(|(t, w)| {
            let r = 0.5 * rho * (t + 1.0);
            Complex64::from_polar(r, k * r) * (0.5 * rho * w)
        })
        .sum();
    out.push(check(
        "self-cell weight",
        (s - oracle).norm() < 1e-10,
        format!("closed form {s}, quadrature {oracle}"),
    ));

    let grid = Arc::new(DomainGrid::build(DomainSpec::unit_ball(), 12)?);
    let quad12 = Arc::new(SphereQuadrature::new(12)?);
    let solver = ForwardSolver::new(grid.clone(), k, 1e-12)?;
    let q = ComplexField::from_fn(grid.clone(), FieldRole::PotentialQ, |x| Complex64::from(1.0 - 0.5 * x[0] * x[0]));
    let sol = solver.solve(&q, &z)?;
    let a = scattering_amplitude(&sol, &quad12);
    let defect = optical_theorem_defect(&sol, &a);
    out.push(check("optical theorem", defect <= 5e-3, format!("relative defect {defect:e}")));

    let alpha = [0.6, 0.0, 0.8];
    let beta = [0.0, -0.8, 0.6];
    let ab = solver.solve(&q, &alpha)?.amplitude_at(&[beta])[0];
    let ba = solver.solve(&q, &[-beta[0], -beta[1], -beta[2]])?.amplitude_at(&[[-alpha[0], -alpha[1], -alpha[2]]])[0];
    let mismatch = (ab - ba).norm() / ab.norm();
    out.push(check("reciprocity", mismatch <= 1e-3, format!("relative mismatch {mismatch:e}")));

    let born_ratio = |scale: f64| -> Result<f64, CliError> {
        let qs = ComplexField::from_fn(grid.clone(), FieldRole::PotentialQ, |x| Complex64::from(scale * (1.0 - 0.5 * x[0] * x[0])));
        let full = scattering_amplitude(&solver.solve(&qs, &z)?, &quad12);
        let born = born_amplitude(&qs, &z, k, &quad12)?;
        Ok(full.distance(&born)? / born.norm())
    };
    let r1 = born_ratio(1e-2)?;
    let r2 = born_ratio(1e-3)?;
    let factor = r1 / r2;
    out.push(check(
        "Born consistency",
        (5.0..=20.0).contains(&factor),
        format!("ratio {r1:e} -> {r2:e}, factor {factor:.3}"),
    ));

    let a_sphere = 0.01 / k;
    let c = Complex64::from(sphere_capacitance(a_sphere)?);
    let ens = ParticleEnsemble::new(vec![[0.0; 3]], vec![a_sphere], vec![c], k)?;
    let fl = foldy_lax_solve(&ens, &z, k, &Arc::new(SphereQuadrature::new(4)?))?;
    let ka = k * a_sphere;
    let exact = -Complex64::from_polar(ka.sin() / k, -ka);
    let worst = fl.pattern.values.iter().map(|v| (v - exact).norm() / exact.norm()).fold(0.0, f64::max);
    out.push(check(
        "single soft sphere",
        worst <= 1e-4 && (c.re / (4.0 * PI) - a_sphere).abs() <= 1e-15,
        format!("max relative deviation from s-wave {worst:e}"),
    ));

    let cz = impedance_capacitance(1.0, Impedance::Finite(Complex64::from(1.0)), 1.0)?;
    let cinf = impedance_capacitance(1.0, Impedance::Infinite, 1.0)?;
    out.push(check(
        "impedance capacitance",
        (cz - 0.5).norm() < 1e-12 && cinf == Complex64::from(1.0),
        format!("C_zeta(1,1,1) = {cz}"),
    ));

    let g10 = Arc::new(DomainGrid::build(DomainSpec::unit_ball(), 10)?);
    let hstar = ComplexField::from_fn(g10.clone(), FieldRole::DensityH, |x| {
        Complex64::from(0.3 * (1.0 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]))
    });
    let quad8 = Arc::new(SphereQuadrature::new(8)?);
    let f = FarFieldPattern::new(
        quad8.clone(),
        fourier_of_density(&hstar, k, &quad8.nodes).into_iter().map(|v| -v).collect(),
        k,
        z,
    )?;
    let d = design_potential(&f, &g10, &SynthesisOptions::default())?;
    let r = &d.report;
    out.push(check(
        "pipeline closure",
        r.eps2 == 0.0 && r.final_error <= 1.1 * r.bound && r.eps1 <= 1e-6,
        format!("final {:e}, bound {:e}", r.final_error, r.bound),
    ));

    Ok(out)
}
