//! Product quadrature on the unit sphere: Gauss–Legendre in cos θ times the
//! uniform trapezoid rule in φ.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Gauss–Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights on S².
///
/// With `order` Gauss nodes in cos θ and `2·order` azimuthal nodes, the rule
/// integrates spherical harmonics of degree up to `2·order − 1` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    pub order: usize,
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn new(order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::Config(format!(
                "quadrature order must be at least 1, got {order}"
            )));
        }
        let (ct, wt) = gauss_legendre(order);
        let n_phi = 2 * order;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(order * n_phi);
        let mut weights = Vec::with_capacity(order * n_phi);
        for (c, w) in ct.iter().zip(&wt) {
            let s = (1.0 - c * c).max(0.0).sqrt();
            for p in 0..n_phi {
                let phi = p as f64 * dphi;
                nodes.push([s * phi.cos(), s * phi.sin(), *c]);
                weights.push(w * dphi);
            }
        }
        Ok(Self {
            order,
            nodes,
            weights,
        })
    }

    /// Builds a rule from explicit nodes and weights (e.g. read from a file).
    pub fn from_parts(nodes: Vec<Vec3>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::Config("node and weight counts differ".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Config("quadrature weights must be positive".into()));
        }
        for b in &nodes {
            let n = crate::geometry::norm(b);
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::Config(format!("node {b:?} is not a unit vector")));
            }
        }
        // Order is not recoverable from arbitrary nodes; 0 marks "external".
        Ok(Self {
            order: 0,
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&Vec3) -> num_complex::Complex64) -> num_complex::Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(b, w)| f(b) * *w)
            .sum()
    }
}
