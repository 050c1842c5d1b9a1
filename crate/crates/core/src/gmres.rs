//! Restarted GMRES for complex non-Hermitian systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// y ← A x
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    pub tol: f64,
    pub restart: usize,
    pub max_iterations: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            restart: 60,
            max_iterations: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresSolution {
    pub x: Vec<Complex64>,
    /// True relative residual ‖b − Ax‖ / ‖b‖.
    pub residual: f64,
    pub iterations: usize,
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨a, b⟩ = Σ conj(a_i) b_i
fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn residual_vec(op: &dyn LinearOperator, b: &[Complex64], x: &[Complex64], r: &mut [Complex64]) {
    op.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

/// Solves A x = b to relative residual `opts.tol`, starting from zero.
pub fn gmres(op: &dyn LinearOperator, b: &[Complex64], opts: &GmresOptions) -> Result<GmresSolution> {
    let n = op.dim();
    assert_eq!(b.len(), n, "right-hand side has the wrong length");
    let zero = Complex64::new(0.0, 0.0);
    let bnorm = norm2(b);
    let mut x = vec![zero; n];
    if bnorm == 0.0 {
        return Ok(GmresSolution {
            x,
            residual: 0.0,
            iterations: 0,
        });
    }
    let m = opts.restart.max(1).min(n.max(1));
    let mut r = vec![zero; n];
    let mut w = vec![zero; n];
    let mut iterations = 0;
    let mut rel = 1.0;

    while iterations < opts.max_iterations {
        residual_vec(op, b, &x, &mut r);
        let beta = norm2(&r);
        rel = beta / bnorm;
        if rel <= opts.tol {
            break;
        }
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        // Hessenberg columns, already rotated.
        let mut h: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<Complex64> = Vec::with_capacity(m);
        let mut g = vec![zero; m + 1];
        g[0] = Complex64::from(beta);

        let mut inner_steps = 0;
        for j in 0..m {
            op.apply(&basis[j], &mut w);
            let mut col = vec![zero; j + 2];
            // Modified Gram–Schmidt, applied twice for stability.
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = inner(v, &w);
                    col[i] += c;
                    for (wk, vk) in w.iter_mut().zip(v) {
                        *wk -= c * vk;
                    }
                }
            }
            let hn = norm2(&w);
            col[j + 1] = Complex64::from(hn);
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i].conj() * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let (c, s) = givens(col[j], col[j + 1]);
            col[j] = c * col[j] + s * col[j + 1];
            col[j + 1] = zero;
            g[j + 1] = -s.conj() * g[j];
            g[j] *= c;
            cs.push(c);
            sn.push(s);
            h.push(col);
            iterations += 1;
            inner_steps = j + 1;
            rel = g[j + 1].norm() / bnorm;
            if rel <= opts.tol || hn == 0.0 || iterations >= opts.max_iterations {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }

        // Back substitution on the triangular system.
        let k = inner_steps;
        let mut y = vec![zero; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for l in (i + 1)..k {
                s -= h[l][i] * y[l];
            }
            y[i] = s / h[i][i];
        }
        for (l, yl) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[l]) {
                *xi += yl * vi;
            }
        }
        if rel <= opts.tol {
            // Confirm with the true residual; loop again if it drifted.
            residual_vec(op, b, &x, &mut r);
            rel = norm2(&r) / bnorm;
            if rel <= opts.tol {
                return Ok(GmresSolution {
                    x,
                    residual: rel,
                    iterations,
                });
            }
        }
    }
    residual_vec(op, b, &x, &mut r);
    rel = rel.max(norm2(&r) / bnorm);
    if rel <= opts.tol {
        return Ok(GmresSolution {
            x,
            residual: rel,
            iterations,
        });
    }
    Err(Error::SolverFailure {
        residual: rel,
        tol: opts.tol,
        iterations,
    })
}

/// Complex Givens rotation zeroing `b` in (a, b).
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = (an * an + bn * bn).sqrt();
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Dense matrix wrapper, row-major; used in tests and small systems.
pub struct DenseOperator {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.data[i * self.n..(i + 1) * self.n]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum();
        }
    }
}
