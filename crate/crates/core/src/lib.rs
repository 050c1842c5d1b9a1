//! Radiation-pattern synthesis for acoustic scattering.
//!
//! Given a desired pattern f(β) on the unit sphere, the pipeline builds a
//! potential q on a bounded domain whose scattering amplitude approximates
//! f, converts q into a density of small acoustically soft particles, and
//! checks the effective-medium claim by a direct many-particle simulation.

pub mod error;
pub mod field;
pub mod forward;
pub mod geometry;
pub mod gmres;
pub mod harmonics;
pub mod io;
pub mod kernel;
pub mod particles;
pub mod pattern;
pub mod quadrature;
pub mod synthesis;
pub mod volume;

pub use error::{Error, Result};
pub use field::{ComplexField, FieldRole};
pub use forward::{born_amplitude, forward_solve, scattering_amplitude, ForwardSolver, ScatteringSolution};
pub use geometry::{DomainGrid, DomainSpec, Vec3};
pub use pattern::{sphere_norm, FarFieldPattern};
pub use quadrature::SphereQuadrature;
