use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainGrid, Vec3};

/// What a sampled complex field represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldRole {
    PotentialQ,
    BackgroundQ0,
    DensityH,
    FieldU,
    CapacitanceC,
}

impl FieldRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldRole::PotentialQ => "potential_q",
            FieldRole::BackgroundQ0 => "background_q0",
            FieldRole::DensityH => "density_h",
            FieldRole::FieldU => "field_u",
            FieldRole::CapacitanceC => "capacitance_c",
        }
    }
}

/// Complex values, one per grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: Arc<DomainGrid>,
    pub values: Vec<Complex64>,
    pub role: FieldRole,
}

impl ComplexField {
    pub fn new(grid: Arc<DomainGrid>, values: Vec<Complex64>, role: FieldRole) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "field has {} values but grid has {} cells",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, role })
    }

    pub fn zeros(grid: Arc<DomainGrid>, role: FieldRole) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
            role,
        }
    }

    pub fn from_fn(grid: Arc<DomainGrid>, role: FieldRole, f: impl Fn(&Vec3) -> Complex64) -> Self {
        let values = grid.cell_centers.iter().map(f).collect();
        Self { grid, values, role }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.grid.l2_norm(&self.values)
    }

    /// True when every imaginary part is at most `tol` in magnitude.
    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn with_role(mut self, role: FieldRole) -> Self {
        self.role = role;
        self
    }

    /// Checks that `other` lives on the same grid.
    pub fn same_grid(&self, other: &ComplexField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different grids".into()))
        }
    }
}
