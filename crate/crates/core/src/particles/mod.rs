//! Small acoustically soft particles: capacitances, densities, sampling,
//! the Foldy–Lax many-body solve, and the effective-medium check.

mod capacitance;
mod density;
mod ensemble;
mod foldy_lax;
mod homogenization;

pub use capacitance::{impedance_capacitance, sphere_capacitance, sphere_surface_area, Impedance};
pub use density::{particle_density, DensityField, REALIZABILITY_TOL};
pub use ensemble::{sample_particles, ParticleEnsemble, SamplingConstraints};
pub use foldy_lax::{foldy_lax_solve, FoldyLaxSolution};
pub use homogenization::{homogenization_check, ConvergenceRecord, HomogenizationReport};
