use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::geometry::DomainGrid;

/// Tolerance on the imaginary part and on negative values of N.
pub const REALIZABILITY_TOL: f64 = 1e-9;

/// Number of particles per unit volume, one value per grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: Arc<DomainGrid>,
    pub values: Vec<f64>,
    /// ∫_D N dx.
    pub total_expected: f64,
    /// Capacitance of each particle, C₀ or C_ζ.
    pub capacitance: Complex64,
}

impl DensityField {
    pub fn new(grid: Arc<DomainGrid>, values: Vec<f64>, capacitance: Complex64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "density has {} values but grid has {} cells",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Config("density values must be nonnegative".into()));
        }
        let total_expected = values.iter().zip(&grid.cell_weights).map(|(n, w)| n * w).sum();
        Ok(Self {
            grid,
            values,
            total_expected,
            capacitance,
        })
    }

    /// C(x) = N(x)·C₀.
    pub fn capacitance_density(&self) -> Vec<Complex64> {
        self.values.iter().map(|n| self.capacitance * n).collect()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// N = (q − q₀)/C₀, rejecting cells where that is not a nonnegative real.
pub fn particle_density(q: &ComplexField, q0: &ComplexField, c0: Complex64) -> Result<DensityField> {
    q.same_grid(q0)?;
    if c0.norm() == 0.0 {
        return Err(Error::Config("particle capacitance must be nonzero".into()));
    }
    let mut bad = Vec::new();
    let values: Vec<f64> = q
        .values
        .iter()
        .zip(&q0.values)
        .enumerate()
        .map(|(m, (a, b))| {
            let n = (a - b) / c0;
            if n.im.abs() > REALIZABILITY_TOL || n.re < -REALIZABILITY_TOL {
                bad.push(m);
            }
            n.re.max(0.0)
        })
        .collect();
    if !bad.is_empty() {
        return Err(Error::Realizability {
            cells: bad,
            capacitance: format!("{c0}"),
        });
    }
    DensityField::new(q.grid.clone(), values, c0)
}
