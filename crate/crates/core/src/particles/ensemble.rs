//! Sampling particle ensembles from a density.
//!
//! Counts per cell are Poisson with mean N(x)·w; positions are uniform in
//! the cell and rejected when they leave D or come closer than the
//! hard-core distance to an accepted particle.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, Vec3};
use crate::particles::DensityField;

/// Random sequential addition saturates near this volume fraction of the
/// exclusion spheres (diameter d).
const RSA_JAMMING_FRACTION: f64 = 0.38;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConstraints {
    /// Upper bound on k·a.
    pub ka_max: f64,
    /// Upper bound on a/d, d the minimum center distance.
    pub a_over_d_max: f64,
    /// Placement attempts per particle before giving up.
    pub max_retries: usize,
    /// Particle radius; `None` derives it from a real capacitance as C/(4π).
    pub radius: Option<f64>,
}

impl Default for SamplingConstraints {
    fn default() -> Self {
        Self {
            ka_max: 0.1,
            a_over_d_max: 0.1,
            max_retries: 100,
            radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    pub positions: Vec<Vec3>,
    pub radii: Vec<f64>,
    pub capacitances: Vec<Complex64>,
    pub k: f64,
    pub a_max: f64,
    /// Minimum pairwise center distance (∞ for fewer than two particles).
    pub d_min: f64,
}

impl ParticleEnsemble {
    pub fn empty(k: f64) -> Self {
        Self {
            positions: Vec::new(),
            radii: Vec::new(),
            capacitances: Vec::new(),
            k,
            a_max: 0.0,
            d_min: f64::INFINITY,
        }
    }

    /// Builds an ensemble and measures a_max and d_min.
    pub fn new(positions: Vec<Vec3>, radii: Vec<f64>, capacitances: Vec<Complex64>, k: f64) -> Result<Self> {
        if positions.len() != radii.len() || positions.len() != capacitances.len() {
            return Err(Error::Config("ensemble arrays differ in length".into()));
        }
        if radii.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Config("particle radii must be positive".into()));
        }
        let a_max = radii.iter().copied().fold(0.0, f64::max);
        let d_min = min_pair_distance(&positions);
        Ok(Self {
            positions,
            radii,
            capacitances,
            k,
            a_max,
            d_min,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_capacitance(&self) -> Complex64 {
        self.capacitances.iter().sum()
    }

    /// Checks k·a ≪ 1 and a ≪ d against `constraints`.
    pub fn validate(&self, constraints: &SamplingConstraints) -> Result<()> {
        if self.len() == 0 {
            return Ok(());
        }
        if self.k * self.a_max > constraints.ka_max {
            return Err(Error::Packing {
                requested_density: f64::NAN,
                max_feasible_density: f64::NAN,
                reason: format!("k·a = {:e} exceeds {}", self.k * self.a_max, constraints.ka_max),
            });
        }
        if self.d_min <= 2.0 * self.a_max || self.a_max / self.d_min > constraints.a_over_d_max {
            return Err(Error::Packing {
                requested_density: f64::NAN,
                max_feasible_density: max_feasible_density(self.a_max / constraints.a_over_d_max),
                reason: format!("a/d = {:e} exceeds {}", self.a_max / self.d_min, constraints.a_over_d_max),
            });
        }
        Ok(())
    }
}

/// Largest number density reachable with hard-core distance `d`.
pub(crate) fn max_feasible_density(d: f64) -> f64 {
    RSA_JAMMING_FRACTION / (PI * d.powi(3) / 6.0)
}

type Bin = (i64, i64, i64);

struct SpatialHash {
    size: f64,
    bins: HashMap<Bin, Vec<Vec3>>,
}

impl SpatialHash {
    fn new(size: f64) -> Self {
        Self {
            size,
            bins: HashMap::new(),
        }
    }

    fn bin(&self, x: &Vec3) -> Bin {
        (
            (x[0] / self.size).floor() as i64,
            (x[1] / self.size).floor() as i64,
            (x[2] / self.size).floor() as i64,
        )
    }

    /// Distance from `x` to the nearest stored point within one bin size.
    fn nearest_within(&self, x: &Vec3) -> f64 {
        let (bi, bj, bl) = self.bin(x);
        let mut best = f64::INFINITY;
        for di in -1..=1 {
            for dj in -1..=1 {
                for dl in -1..=1 {
                    if let Some(pts) = self.bins.get(&(bi + di, bj + dj, bl + dl)) {
                        for p in pts {
                            best = best.min(dist(x, p));
                        }
                    }
                }
            }
        }
        best
    }

    fn insert(&mut self, x: Vec3) {
        let b = self.bin(&x);
        self.bins.entry(b).or_default().push(x);
    }
}

fn min_pair_distance(positions: &[Vec3]) -> f64 {
    if positions.len() < 2 {
        return f64::INFINITY;
    }
    // Bin size from the mean spacing of the bounding box.
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in positions {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let vol: f64 = (0..3).map(|a| (hi[a] - lo[a]).max(1e-12)).product();
    let mut size = (vol / positions.len() as f64).cbrt();
    loop {
        let mut hash = SpatialHash::new(size);
        let mut best = f64::INFINITY;
        for p in positions {
            best = best.min(hash.nearest_within(p));
            hash.insert(*p);
        }
        if best <= size {
            return best;
        }
        size *= 2.0;
    }
}

/// Draws an ensemble from `density`. The random stream is keyed by
/// `(seed, stream)`, so a run is reproducible independent of threading.
pub fn sample_particles(
    density: &DensityField,
    seed: u64,
    stream: u64,
    k: f64,
    constraints: &SamplingConstraints,
) -> Result<ParticleEnsemble> {
    if density.total_expected == 0.0 {
        return Ok(ParticleEnsemble::empty(k));
    }
    let c = density.capacitance;
    let a = match constraints.radius {
        Some(a) => a,
        None => {
            if c.im != 0.0 || !(c.re > 0.0) {
                return Err(Error::Config(
                    "a radius is required for non-Dirichlet particle capacitances".into(),
                ));
            }
            c.re / (4.0 * PI)
        }
    };
    if !(a > 0.0) {
        return Err(Error::Config(format!("particle radius must be positive, got {a}")));
    }
    let d_req = a / constraints.a_over_d_max;
    let n_max = max_feasible_density(d_req);
    let requested = density.max();
    if k * a > constraints.ka_max {
        return Err(Error::Packing {
            requested_density: requested,
            max_feasible_density: n_max,
            reason: format!("particle radius {a:e} gives k·a = {:e} above {}", k * a, constraints.ka_max),
        });
    }
    if requested > n_max {
        return Err(Error::Packing {
            requested_density: requested,
            max_feasible_density: n_max,
            reason: format!("hard-core distance {d_req:e} required for a/d ≤ {}", constraints.a_over_d_max),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let grid = &density.grid;
    let h = grid.spacing;
    let mut hash = SpatialHash::new(d_req.max(1e-300));
    let mut positions = Vec::new();
    for (cell, (&n, w)) in density.values.iter().zip(&grid.cell_weights).enumerate() {
        let mean = n * w;
        if mean <= 0.0 {
            continue;
        }
        let count = Poisson::new(mean)
            .map_err(|e| Error::Config(format!("invalid Poisson mean {mean}: {e}")))?
            .sample(&mut rng) as usize;
        let center = grid.cell_centers[cell];
        for _ in 0..count {
            let mut placed = false;
            for _ in 0..constraints.max_retries {
                let x = [
                    center[0] + (rng.random::<f64>() - 0.5) * h[0],
                    center[1] + (rng.random::<f64>() - 0.5) * h[1],
                    center[2] + (rng.random::<f64>() - 0.5) * h[2],
                ];
                if !grid.domain.contains(&x) || hash.nearest_within(&x) < d_req {
                    continue;
                }
                hash.insert(x);
                positions.push(x);
                placed = true;
                break;
            }
            if !placed {
                return Err(Error::Packing {
                    requested_density: requested,
                    max_feasible_density: n_max,
                    reason: format!(
                        "no admissible position after {} attempts in cell {cell}",
                        constraints.max_retries
                    ),
                });
            }
        }
    }
    let m = positions.len();
    let ens = ParticleEnsemble::new(positions, vec![a; m], vec![c; m], k)?;
    ens.validate(constraints)?;
    Ok(ens)
}
