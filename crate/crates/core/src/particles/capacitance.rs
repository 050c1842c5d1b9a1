use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Capacitance of a sphere of radius `a`, 4πa.
///
/// With the kernel e^{ikr}/(4πr), a particle of capacitance C radiates
/// −C/(4π) in the far field, so a soft sphere scatters with amplitude −a.
pub fn sphere_capacitance(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Config(format!("sphere radius must be positive, got {a}")));
    }
    Ok(4.0 * PI * a)
}

pub fn sphere_surface_area(a: f64) -> f64 {
    4.0 * PI * a * a
}

/// Boundary impedance ζ in u_N = ζu; `Infinite` is the Dirichlet limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Impedance {
    Finite(Complex64),
    Infinite,
}

/// C_ζ = C₀ / (1 + C₀/(ζ|S|)).
pub fn impedance_capacitance(c0: f64, zeta: Impedance, surface_area: f64) -> Result<Complex64> {
    if !(c0 > 0.0) {
        return Err(Error::Config(format!("capacitance must be positive, got {c0}")));
    }
    if !(surface_area > 0.0) {
        return Err(Error::Config(format!(
            "surface area must be positive, got {surface_area}"
        )));
    }
    let zeta = match zeta {
        Impedance::Infinite => return Ok(Complex64::from(c0)),
        Impedance::Finite(z) => z,
    };
    if zeta.norm() == 0.0 {
        return Err(Error::Config("impedance must be nonzero".into()));
    }
    if zeta.re < 0.0 {
        return Err(Error::Config(format!(
            "impedance must have nonnegative real part, got {zeta}"
        )));
    }
    let denom = Complex64::from(1.0) + c0 / (zeta * surface_area);
    if denom.norm() <= f64::EPSILON {
        return Err(Error::SingularImpedance);
    }
    Ok(c0 / denom)
}
