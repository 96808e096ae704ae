use super::exec::{sum_rows, Parallelism};
use super::grid::Grid2D;
use crate::error::CfdError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseProps {
    /// kg/m^3.
    pub density: f64,
    /// Pa s.
    pub viscosity: f64,
    /// Diffusion coefficient of the transported scalar.
    pub diffusivity: f64,
}

pub const WATER: PhaseProps = PhaseProps {
    density: 1025.0,
    viscosity: 1.0e-3,
    diffusivity: 0.0,
};

pub const AIR: PhaseProps = PhaseProps {
    density: 1.2,
    viscosity: 1.8e-5,
    diffusivity: 0.0,
};

/// How cell viscosity is formed from the phase fractions. Density is always
/// the volume-weighted mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Blend {
    #[default]
    Arithmetic,
    Harmonic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidProps {
    pub oil: PhaseProps,
    pub water: PhaseProps,
    /// Third phase; `None` runs oil/water only.
    pub air: Option<PhaseProps>,
    /// Body acceleration (x, y), m/s^2.
    pub gravity: (f64, f64),
    pub viscosity_blend: Blend,
}

impl FluidProps {
    pub fn oil_water(oil: PhaseProps, water: PhaseProps, gravity: f64) -> Self {
        Self {
            oil,
            water,
            air: None,
            gravity: (0.0, -gravity),
            viscosity_blend: Blend::Arithmetic,
        }
    }

    pub fn validate(&self) -> Result<(), CfdError> {
        let phases = [Some(self.oil), Some(self.water), self.air];
        for p in phases.iter().flatten() {
            if !(p.density > 0.0 && p.viscosity > 0.0 && p.diffusivity >= 0.0) {
                return Err(CfdError::Config(format!(
                    "phase properties must be positive: {p:?}"
                )));
            }
        }
        Ok(())
    }

    /// Cell density, viscosity and scalar diffusivity for fractions `alpha`
    /// (oil) and `beta` (air).
    pub fn blend(&self, alpha: f64, beta: f64) -> (f64, f64, f64) {
        let air = self.air.unwrap_or(AIR);
        let beta = if self.air.is_some() { beta } else { 0.0 };
        let w = 1.0 - alpha - beta;
        let rho = alpha * self.oil.density + beta * air.density + w * self.water.density;
        let kappa =
            alpha * self.oil.diffusivity + beta * air.diffusivity + w * self.water.diffusivity;
        let mu = match self.viscosity_blend {
            Blend::Arithmetic => {
                alpha * self.oil.viscosity + beta * air.viscosity + w * self.water.viscosity
            }
            Blend::Harmonic => {
                1.0 / (alpha / self.oil.viscosity + beta / air.viscosity + w / self.water.viscosity)
            }
        };
        (rho, mu, kappa)
    }
}

/// Fields on the staggered grid.
///
/// `u` sits on vertical faces, `(nx + 1) * ny` values stored row by row;
/// `v` on horizontal faces, `nx * (ny + 1)`; everything else at cell centres,
/// `nx * ny`, index `j * nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub nx: usize,
    pub ny: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    /// Oil volume fraction.
    pub alpha: Vec<f64>,
    /// Air volume fraction, present when the air phase is enabled.
    pub air: Option<Vec<f64>>,
    pub scalar: Vec<f64>,
    /// Momentum sources on the `u` and `v` faces, N/m^3.
    pub source_u: Vec<f64>,
    pub source_v: Vec<f64>,
    pub source_scalar: Vec<f64>,
    pub rho: Vec<f64>,
    pub mu: Vec<f64>,
    pub time: f64,
    /// Fraction volume removed or added by clipping since the start, m^3
    /// per unit depth.
    pub clipped_volume: f64,
}

impl FlowState {
    /// Still water everywhere at zero pressure.
    pub fn new(grid: &Grid2D, fluid: &FluidProps) -> Self {
        let (nx, ny) = (grid.nx, grid.ny);
        let n = nx * ny;
        let mut s = Self {
            nx,
            ny,
            u: vec![0.0; (nx + 1) * ny],
            v: vec![0.0; nx * (ny + 1)],
            p: vec![0.0; n],
            alpha: vec![0.0; n],
            air: fluid.air.map(|_| vec![0.0; n]),
            scalar: vec![0.0; n],
            source_u: vec![0.0; (nx + 1) * ny],
            source_v: vec![0.0; nx * (ny + 1)],
            source_scalar: vec![0.0; n],
            rho: vec![0.0; n],
            mu: vec![0.0; n],
            time: 0.0,
            clipped_volume: 0.0,
        };
        s.update_properties(fluid);
        s
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn u_at(&self, i: usize, j: usize) -> f64 {
        self.u[j * (self.nx + 1) + i]
    }

    #[inline]
    pub fn v_at(&self, i: usize, j: usize) -> f64 {
        self.v[j * self.nx + i]
    }

    /// Sets the fractions from a function of the cell centre.
    pub fn fill<F>(&mut self, grid: &Grid2D, fluid: &FluidProps, mut f: F)
    where
        F: FnMut(f64, f64) -> (f64, f64),
    {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (x, y) = grid.cell_center(i, j);
                let (a, b) = f(x, y);
                let c = self.cell(i, j);
                self.alpha[c] = a;
                if let Some(air) = self.air.as_mut() {
                    air[c] = b;
                }
            }
        }
        self.update_properties(fluid);
    }

    pub fn update_properties(&mut self, fluid: &FluidProps) {
        for c in 0..self.alpha.len() {
            let beta = self.air.as_ref().map_or(0.0, |a| a[c]);
            let (rho, mu, _) = fluid.blend(self.alpha[c], beta);
            self.rho[c] = rho;
            self.mu[c] = mu;
        }
    }

    /// Total oil volume per unit depth, m^2.
    pub fn oil_volume(&self, grid: &Grid2D) -> f64 {
        self.field_volume(&self.alpha, grid, Parallelism::Sequential)
    }

    pub(crate) fn field_volume(&self, f: &[f64], grid: &Grid2D, par: Parallelism) -> f64 {
        let nx = self.nx;
        sum_rows(par, self.ny, |j| f[j * nx..(j + 1) * nx].iter().sum()) * grid.cell_volume()
    }

    pub fn max_speed(&self) -> (f64, f64) {
        let m = |x: &[f64]| x.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        (m(&self.u), m(&self.v))
    }

    /// Discrete divergence in each cell, 1/s.
    pub fn divergence(&self, grid: &Grid2D) -> Vec<f64> {
        let mut d = vec![0.0; self.nx * self.ny];
        for j in 0..self.ny {
            for i in 0..self.nx {
                d[self.cell(i, j)] = (self.u_at(i + 1, j) - self.u_at(i, j)) / grid.dx
                    + (self.v_at(i, j + 1) - self.v_at(i, j)) / grid.dy;
            }
        }
        d
    }

    pub fn max_divergence(&self, grid: &Grid2D) -> f64 {
        self.divergence(grid)
            .into_iter()
            .fold(0.0, |a, b| a.max(b.abs()))
    }

    /// Velocity averaged to cell centres.
    pub fn cell_velocity(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.nx * self.ny;
        let (mut uc, mut vc) = (vec![0.0; n], vec![0.0; n]);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let c = self.cell(i, j);
                uc[c] = 0.5 * (self.u_at(i, j) + self.u_at(i + 1, j));
                vc[c] = 0.5 * (self.v_at(i, j) + self.v_at(i, j + 1));
            }
        }
        (uc, vc)
    }
}
