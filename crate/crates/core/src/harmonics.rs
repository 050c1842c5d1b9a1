//! Orthonormal complex spherical harmonics (Condon–Shortley phase).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::Vec3;

/// Y_l^m evaluated at the unit direction `dir`, normalized so that
/// ∫_{S²} |Y_l^m|² dΩ = 1.
pub fn spherical_harmonic(l: usize, m: i32, dir: &Vec3) -> Complex64 {
    let ma = m.unsigned_abs() as usize;
    if ma > l {
        return Complex64::new(0.0, 0.0);
    }
    let r = crate::geometry::norm(dir);
    let x = (dir[2] / r).clamp(-1.0, 1.0);
    let phi = dir[1].atan2(dir[0]);
    let p = normalized_legendre(l, ma, x);
    let y = Complex64::from_polar(p, ma as f64 * phi);
    if m >= 0 {
        y
    } else if ma % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}

/// Associated Legendre function scaled so that P̄_l^m(cos θ) e^{imφ} is
/// orthonormal on the sphere.
fn normalized_legendre(l: usize, m: usize, x: f64) -> f64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for i in 1..=m {
        let fi = i as f64;
        pmm *= -((2.0 * fi + 1.0) / (2.0 * fi)).sqrt() * s;
    }
    if l == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = x * (2.0 * m as f64 + 3.0).sqrt() * pmm;
    let mf = m as f64;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * p - b * p_prev);
        p_prev = p;
        p = next;
    }
    p
}
