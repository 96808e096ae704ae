//! Red-black SOR for the variable-coefficient pressure equation
//! `sum_f a_f (phi_nb - phi_c) = b_c`.
//!
//! Face coefficients are stored on the staggered face arrays: `ax` has
//! `(nx + 1) * ny` entries, `ay` has `nx * (ny + 1)`. A boundary face with a
//! non-zero coefficient is a Dirichlet face with `phi = 0` outside; a zero
//! coefficient is a no-flux face.

use super::exec::{for_rows, max_rows, sum_rows, Parallelism};
use crate::error::CfdError;

const CHECK_EVERY: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonReport {
    pub iterations: usize,
    /// Max-norm residual at exit.
    pub residual: f64,
}

pub(crate) struct Poisson<'a> {
    pub nx: usize,
    pub ny: usize,
    pub ax: &'a [f64],
    pub ay: &'a [f64],
    pub par: Parallelism,
}

impl Poisson<'_> {
    fn diag(&self, i: usize, j: usize) -> f64 {
        let nx = self.nx;
        self.ax[j * (nx + 1) + i]
            + self.ax[j * (nx + 1) + i + 1]
            + self.ay[j * nx + i]
            + self.ay[(j + 1) * nx + i]
    }

    fn neighbours(&self, phi: &[f64], i: usize, j: usize) -> f64 {
        let (nx, ny) = (self.nx, self.ny);
        let c = j * nx + i;
        let mut s = 0.0;
        if i > 0 {
            s += self.ax[j * (nx + 1) + i] * phi[c - 1];
        }
        if i + 1 < nx {
            s += self.ax[j * (nx + 1) + i + 1] * phi[c + 1];
        }
        if j > 0 {
            s += self.ay[j * nx + i] * phi[c - nx];
        }
        if j + 1 < ny {
            s += self.ay[(j + 1) * nx + i] * phi[c + nx];
        }
        s
    }

    /// `(A phi)_c`.
    pub fn apply_at(&self, phi: &[f64], i: usize, j: usize) -> f64 {
        self.neighbours(phi, i, j) - self.diag(i, j) * phi[j * self.nx + i]
    }

    pub fn residual_max(&self, phi: &[f64], b: &[f64]) -> f64 {
        let nx = self.nx;
        max_rows(self.par, self.ny, |j| {
            (0..nx)
                .map(|i| (b[j * nx + i] - self.apply_at(phi, i, j)).abs())
                .fold(0.0, f64::max)
        })
    }

    /// True when no face carries a Dirichlet value, so the operator has the
    /// constants as its null space.
    pub fn is_singular(&self) -> bool {
        let (nx, ny) = (self.nx, self.ny);
        let x_bound =
            (0..ny).all(|j| self.ax[j * (nx + 1)] == 0.0 && self.ax[j * (nx + 1) + nx] == 0.0);
        let y_bound = (0..nx).all(|i| self.ay[i] == 0.0 && self.ay[ny * nx + i] == 0.0);
        x_bound && y_bound
    }

    fn mean(&self, x: &[f64]) -> f64 {
        let nx = self.nx;
        sum_rows(self.par, self.ny, |j| x[j * nx..(j + 1) * nx].iter().sum()) / x.len() as f64
    }

    fn sweep(&self, phi: &[f64], next: &mut [f64], b: &[f64], colour: usize, omega: f64) {
        let nx = self.nx;
        for_rows(self.par, next, nx, |j, row| {
            for (i, out) in row.iter_mut().enumerate() {
                let c = j * nx + i;
                *out = if (i + j) % 2 == colour {
                    let d = self.diag(i, j);
                    if d > 0.0 {
                        (1.0 - omega) * phi[c] + omega * (self.neighbours(phi, i, j) - b[c]) / d
                    } else {
                        phi[c]
                    }
                } else {
                    phi[c]
                };
            }
        });
    }

    /// Solves in place starting from `phi`. Stops once the max-norm residual
    /// is at most `target`.
    pub fn solve(
        &self,
        b: &mut [f64],
        phi: &mut Vec<f64>,
        target: f64,
        max_iterations: usize,
    ) -> Result<PoissonReport, CfdError> {
        let singular = self.is_singular();
        if singular {
            let m = self.mean(b);
            b.iter_mut().for_each(|x| *x -= m);
        }
        let n = self.nx.max(self.ny) as f64;
        let omega = 2.0 / (1.0 + (std::f64::consts::PI / n).sin());
        let mut residual = self.residual_max(phi, b);
        let mut iterations = 0;
        let mut next = vec![0.0; phi.len()];
        while residual > target {
            if iterations >= max_iterations {
                return Err(CfdError::NonConvergence {
                    iterations,
                    residual,
                    target,
                });
            }
            for colour in 0..2 {
                self.sweep(phi, &mut next, b, colour, omega);
                std::mem::swap(phi, &mut next);
            }
            iterations += 1;
            if iterations % CHECK_EVERY == 0 || iterations >= max_iterations {
                residual = self.residual_max(phi, b);
            }
        }
        if singular {
            let m = self.mean(phi);
            phi.iter_mut().for_each(|x| *x -= m);
        }
        Ok(PoissonReport {
            iterations,
            residual,
        })
    }
}
