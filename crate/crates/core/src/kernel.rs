use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{dist, Vec3};

/// Outgoing free-space kernel e^{ik|x−y|} / (4π|x−y|).
pub fn green_kernel(x: &Vec3, y: &Vec3, k: f64) -> Result<Complex64> {
    let r = dist(x, y);
    if r == 0.0 {
        return Err(Error::SingularArgument);
    }
    Ok(green_at_distance(r, k))
}

#[inline]
pub(crate) fn green_at_distance(r: f64, k: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (4.0 * PI * r), k * r)
}

/// Integral of the kernel over a ball of volume `cell_volume` centered at
/// the singularity: ∫₀^ρ r e^{ikr} dr with ρ = (3V/4π)^{1/3}.
pub fn self_cell_weight(cell_volume: f64, k: f64) -> Result<Complex64> {
    if !(cell_volume > 0.0) || !cell_volume.is_finite() {
        return Err(Error::Config(format!(
            "cell volume must be positive, got {cell_volume}"
        )));
    }
    let rho = (3.0 * cell_volume / (4.0 * PI)).cbrt();
    let x = k * rho;
    if x.abs() < 1e-3 {
        // ρ² Σ (ix)^n (n+1)/(n+2)! ; truncated where the terms drop below 1e-18.
        let i = Complex64::i();
        let series = Complex64::from(0.5) + i * x / 3.0 - x * x / 8.0 - i * x.powi(3) / 30.0
            + x.powi(4) / 144.0;
        return Ok(series * rho * rho);
    }
    let e = Complex64::from_polar(1.0, x);
    let ik = Complex64::new(0.0, k);
    Ok(e * rho / ik + (e - 1.0) / (k * k))
}
