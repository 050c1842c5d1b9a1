//! Domain discretization.
//!
//! The domain is covered by a uniform Cartesian lattice over its bounding
//! box. For a ball, lattice cells whose centers fall outside are dropped, so
//! every surviving cell carries the full lattice-cell volume.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &Vec3, b: &Vec3) -> f64 {
    norm(&sub(a, b))
}

/// Returns `v / |v|`, or a configuration error for a zero vector.
pub fn normalized(v: &Vec3) -> Result<Vec3> {
    let n = norm(v);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Config(format!("cannot normalize vector {v:?}")));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

/// Bounded domain D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Ball { center: Vec3, radius: f64 },
    Box { min: Vec3, max: Vec3 },
}

impl DomainSpec {
    pub fn unit_ball() -> Self {
        DomainSpec::Ball {
            center: [0.0; 3],
            radius: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Ball { center, radius } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::Config(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Config("ball center must be finite".into()));
                }
            }
            DomainSpec::Box { min, max } => {
                for axis in 0..3 {
                    let extent = max[axis] - min[axis];
                    if !(extent > 0.0) || !extent.is_finite() {
                        return Err(Error::Config(format!(
                            "box extent along axis {axis} must be positive, got {extent}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Analytic measure |D|.
    pub fn volume(&self) -> f64 {
        match self {
            DomainSpec::Ball { radius, .. } => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
            DomainSpec::Box { min, max } => {
                (max[0] - min[0]) * (max[1] - min[1]) * (max[2] - min[2])
            }
        }
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        match self {
            DomainSpec::Ball { center, radius } => dist(x, center) <= *radius,
            DomainSpec::Box { min, max } => (0..3).all(|i| x[i] >= min[i] && x[i] <= max[i]),
        }
    }

    fn bounding_box(&self) -> (Vec3, Vec3) {
        match self {
            DomainSpec::Ball { center, radius } => (
                [center[0] - radius, center[1] - radius, center[2] - radius],
                [center[0] + radius, center[1] + radius, center[2] + radius],
            ),
            DomainSpec::Box { min, max } => (*min, *max),
        }
    }
}

/// Cells of a uniform lattice that lie inside a domain.
///
/// `indices[c]` is the integer lattice position of cell `c`; the FFT-based
/// volume operator relies on it.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainGrid {
    pub domain: DomainSpec,
    pub resolution: usize,
    pub spacing: Vec3,
    pub origin: Vec3,
    pub cell_centers: Vec<Vec3>,
    pub cell_weights: Vec<f64>,
    pub indices: Vec<[usize; 3]>,
}

impl DomainGrid {
    pub fn build(domain: DomainSpec, resolution: usize) -> Result<Self> {
        domain.validate()?;
        if resolution < 2 {
            return Err(Error::Config(format!(
                "resolution must be at least 2, got {resolution}"
            )));
        }
        let (lo, hi) = domain.bounding_box();
        let n = resolution as f64;
        let spacing = [(hi[0] - lo[0]) / n, (hi[1] - lo[1]) / n, (hi[2] - lo[2]) / n];
        let weight = spacing[0] * spacing[1] * spacing[2];

        let mut cell_centers = Vec::new();
        let mut indices = Vec::new();
        for i in 0..resolution {
            for j in 0..resolution {
                for l in 0..resolution {
                    let x = [
                        lo[0] + (i as f64 + 0.5) * spacing[0],
                        lo[1] + (j as f64 + 0.5) * spacing[1],
                        lo[2] + (l as f64 + 0.5) * spacing[2],
                    ];
                    if domain.contains(&x) {
                        cell_centers.push(x);
                        indices.push([i, j, l]);
                    }
                }
            }
        }
        let cell_weights = vec![weight; cell_centers.len()];
        Ok(Self {
            domain,
            resolution,
            spacing,
            origin: lo,
            cell_centers,
            cell_weights,
            indices,
        })
    }

    pub fn len(&self) -> usize {
        self.cell_centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_centers.is_empty()
    }

    /// Discrete measure Σ w_m.
    pub fn total_volume(&self) -> f64 {
        self.cell_weights.iter().sum()
    }

    /// Volume of one lattice cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    /// Lattice cell index containing `x`, if that cell belongs to the grid.
    pub fn locate(&self, x: &Vec3) -> Option<usize> {
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let t = ((x[a] - self.origin[a]) / self.spacing[a]).floor();
            if t < 0.0 || t >= self.resolution as f64 {
                return None;
            }
            ijk[a] = t as usize;
        }
        self.indices.binary_search(&ijk).ok()
    }

    /// Weighted L²(D) norm of cell values.
    pub fn l2_norm<T: Copy + Into<num_complex::Complex64>>(&self, values: &[T]) -> f64 {
        values
            .iter()
            .zip(&self.cell_weights)
            .map(|(v, w)| (*v).into().norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_box() -> DomainSpec {
        DomainSpec::Box {
            min: [0.0; 3],
            max: [1.0; 3],
        }
    }

    #[test]
    fn unit_box_resolution_two() {
        let g = DomainGrid::build(unit_box(), 2).unwrap();
        assert_eq!(g.len(), 8);
        for w in &g.cell_weights {
            assert_eq!(*w, 0.125);
        }
        assert_eq!(g.total_volume(), 1.0);
    }

    #[test]
    fn box_volume_is_exact() {
        let d = DomainSpec::Box {
            min: [-1.0, 0.0, 2.0],
            max: [0.5, 0.25, 3.0],
        };
        let g = DomainGrid::build(d.clone(), 7).unwrap();
        assert!((g.total_volume() - d.volume()).abs() < 1e-12);
        assert!(g.cell_centers.iter().all(|x| d.contains(x)));
    }

    #[test]
    fn unit_ball_volume_within_two_percent() {
        // Oracle: count lattice centers inside the ball independently.
        let n = 32;
        let h = 2.0 / n as f64;
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let c = |t: usize| -1.0 + (t as f64 + 0.5) * h;
                    if c(i).powi(2) + c(j).powi(2) + c(l).powi(2) <= 1.0 {
                        count += 1;
                    }
                }
            }
        }
        let g = DomainGrid::build(DomainSpec::unit_ball(), n).unwrap();
        assert_eq!(g.len(), count);
        let exact = 4.0 * PI / 3.0;
        assert!((g.total_volume() - exact).abs() / exact < 0.02);
    }

    #[test]
    fn ball_refinement_reduces_volume_error() {
        let exact = 4.0 * PI / 3.0;
        let errs: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&n| {
                let g = DomainGrid::build(DomainSpec::unit_ball(), n).unwrap();
                (g.total_volume() - exact).abs()
            })
            .collect();
        for pair in errs.windows(2) {
            assert!(pair[1] < pair[0], "{errs:?}");
        }
    }

    #[test]
    fn rejects_bad_domains() {
        let bad = DomainSpec::Ball {
            center: [0.0; 3],
            radius: -1.0,
        };
        assert!(matches!(DomainGrid::build(bad, 8), Err(Error::Config(_))));
        let flat = DomainSpec::Box {
            min: [0.0; 3],
            max: [1.0, 0.0, 1.0],
        };
        assert!(matches!(DomainGrid::build(flat, 8), Err(Error::Config(_))));
        assert!(matches!(
            DomainGrid::build(DomainSpec::unit_ball(), 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn locate_finds_cells() {
        let g = DomainGrid::build(DomainSpec::unit_ball(), 10).unwrap();
        for (c, x) in g.cell_centers.iter().enumerate() {
            assert_eq!(g.locate(x), Some(c));
        }
        assert_eq!(g.locate(&[5.0, 0.0, 0.0]), None);
    }
}
