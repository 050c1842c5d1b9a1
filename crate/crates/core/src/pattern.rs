use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{self, Vec3};
use crate::quadrature::SphereQuadrature;

/// Radiation pattern A(β) sampled at the nodes of a sphere quadrature, for
/// a fixed wavenumber and incident direction.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldPattern {
    pub quadrature: Arc<SphereQuadrature>,
    pub values: Vec<Complex64>,
    pub k: f64,
    pub alpha: Vec3,
}

impl FarFieldPattern {
    pub fn new(
        quadrature: Arc<SphereQuadrature>,
        values: Vec<Complex64>,
        k: f64,
        alpha: Vec3,
    ) -> Result<Self> {
        if values.len() != quadrature.len() {
            return Err(Error::Config(format!(
                "pattern has {} values but quadrature has {} nodes",
                values.len(),
                quadrature.len()
            )));
        }
        check_wave(k, &alpha)?;
        Ok(Self {
            quadrature,
            values,
            k,
            alpha,
        })
    }

    pub fn zeros(quadrature: Arc<SphereQuadrature>, k: f64, alpha: Vec3) -> Self {
        let n = quadrature.len();
        Self {
            quadrature,
            values: vec![Complex64::new(0.0, 0.0); n],
            k,
            alpha,
        }
    }

    pub fn from_fn(
        quadrature: Arc<SphereQuadrature>,
        k: f64,
        alpha: Vec3,
        f: impl Fn(&Vec3) -> Complex64,
    ) -> Self {
        let values = quadrature.nodes.iter().map(f).collect();
        Self {
            quadrature,
            values,
            k,
            alpha,
        }
    }

    /// L²(S²) norm computed with the quadrature weights.
    pub fn norm(&self) -> f64 {
        sphere_norm(self)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Pointwise `self - other`; both must share a quadrature layout.
    pub fn difference(&self, other: &FarFieldPattern) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::Config("patterns sampled on different quadratures".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a -= b;
        }
        Ok(out)
    }

    /// ‖self − other‖ in L²(S²).
    pub fn distance(&self, other: &FarFieldPattern) -> Result<f64> {
        Ok(self.difference(other)?.norm())
    }
}

/// sqrt(Σ_j w_j |A(β_j)|²).
pub fn sphere_norm(p: &FarFieldPattern) -> f64 {
    p.values
        .iter()
        .zip(&p.quadrature.weights)
        .map(|(v, w)| v.norm_sqr() * w)
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn check_wave(k: f64, alpha: &Vec3) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Config(format!("wavenumber must be positive, got {k}")));
    }
    if (geometry::norm(alpha) - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "incident direction {alpha:?} is not a unit vector"
        )));
    }
    Ok(())
}
