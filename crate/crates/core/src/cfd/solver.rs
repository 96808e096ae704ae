use super::exec::{for_rows, map_rows, max_rows, Parallelism};
use super::grid::{Boundary, Composition, FaceRange, Grid2D, Side};
use super::poisson::Poisson;
use super::state::{FlowState, FluidProps};
use crate::error::CfdError;

/// Largest step returned by [`VofSolver::stable_dt`] when nothing else limits
/// it, s.
pub const MAX_DT: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Post-projection divergence target relative to `max|u| / min(dx, dy)`.
    /// The default keeps the fraction clipping of a closed box well under
    /// 1e-10 of the oil volume.
    pub projection_tolerance: f64,
    /// Defaults to `10 * nx * ny`.
    pub max_iterations: Option<usize>,
    pub parallelism: Parallelism,
    pub transport_scalar: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            projection_tolerance: 1e-10,
            max_iterations: None,
            parallelism: Parallelism::default(),
            transport_scalar: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionReport {
    pub iterations: usize,
    /// Max cell divergence after the correction, 1/s.
    pub divergence: f64,
    /// Divergence the solve was asked to reach, 1/s.
    pub target: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub projection: ProjectionReport,
    /// Fraction volume changed by clipping during this step.
    pub clipped: f64,
}

struct Sides {
    left: Vec<Boundary>,
    right: Vec<Boundary>,
    bottom: Vec<Boundary>,
    top: Vec<Boundary>,
}

fn outlet_pressure(b: Boundary) -> Option<f64> {
    match b {
        Boundary::PressureOutlet { pressure, .. } => Some(pressure),
        _ => None,
    }
}

fn inflow(b: Boundary) -> Composition {
    match b {
        Boundary::PressureOutlet { inflow, .. } => inflow,
        _ => Composition::WATER,
    }
}

/// Ghost value across a side for a velocity component tangential to it:
/// mirrored with opposite sign at no-slip walls, copied otherwise.
fn tangential_ghost(value: f64, side: &[Boundary], a: usize, b: usize) -> f64 {
    if side[a] == Boundary::Wall && side[b] == Boundary::Wall {
        -value
    } else {
        value
    }
}

#[inline]
fn upwind(vel: f64, lo: f64, c: f64, hi: f64) -> f64 {
    if vel > 0.0 {
        c - lo
    } else {
        hi - c
    }
}

/// Two-phase (optionally three-phase) incompressible flow solver.
///
/// One step is an explicit predictor (upwind advection, viscous diffusion,
/// gravity, sources and the previous pressure gradient), an incremental
/// pressure projection, conservative upwind transport of the phase
/// fractions, scalar transport, and re-blending of the cell properties.
#[derive(Debug, Clone, PartialEq)]
pub struct VofSolver {
    pub grid: Grid2D,
    pub fluid: FluidProps,
    pub config: SolverConfig,
}

impl VofSolver {
    pub fn new(grid: Grid2D, fluid: FluidProps, config: SolverConfig) -> Result<Self, CfdError> {
        fluid.validate()?;
        if !(config.projection_tolerance > 0.0) {
            return Err(CfdError::Config("projection_tolerance must be > 0".into()));
        }
        Ok(Self {
            grid,
            fluid,
            config,
        })
    }

    fn par(&self) -> Parallelism {
        self.config.parallelism
    }

    fn sides(&self) -> Sides {
        Sides {
            left: self.grid.side_table(Side::Left),
            right: self.grid.side_table(Side::Right),
            bottom: self.grid.side_table(Side::Bottom),
            top: self.grid.side_table(Side::Top),
        }
    }

    fn check_shape(&self, s: &FlowState) -> Result<(), CfdError> {
        if s.nx != self.grid.nx || s.ny != self.grid.ny {
            return Err(CfdError::Config(format!(
                "state is {}x{} but the grid is {}x{}",
                s.nx, s.ny, self.grid.nx, self.grid.ny
            )));
        }
        Ok(())
    }

    /// Hydrostatic pressure for the current densities, integrated down from
    /// the top. Outlet faces on the top fix their column's top pressure;
    /// other columns start from `top_pressure`.
    pub fn init_hydrostatic(&self, s: &mut FlowState, top_pressure: f64) {
        let (nx, ny, dy) = (self.grid.nx, self.grid.ny, self.grid.dy);
        let gy = self.fluid.gravity.1;
        let top = self.grid.side_table(Side::Top);
        for i in 0..nx {
            let p_top = outlet_pressure(top[i]).unwrap_or(top_pressure);
            let c = s.cell(i, ny - 1);
            s.p[c] = p_top - gy * s.rho[c] * 0.5 * dy;
            for j in (0..ny - 1).rev() {
                let (lo, hi) = (s.cell(i, j), s.cell(i, j + 1));
                let rho_f = 0.5 * (s.rho[lo] + s.rho[hi]);
                s.p[lo] = s.p[hi] - rho_f * gy * dy;
            }
        }
    }

    /// Largest explicit step: `cfl` times the smallest of the advective,
    /// viscous and scalar-diffusion limits, capped by `sqrt(h / |g|)` and
    /// [`MAX_DT`].
    pub fn stable_dt(&self, s: &FlowState, cfl: f64) -> f64 {
        let (dx, dy) = (self.grid.dx, self.grid.dy);
        let h = dx.min(dy);
        let (umax, vmax) = s.max_speed();
        let mut limit = MAX_DT;
        if umax > 0.0 {
            limit = limit.min(dx / umax);
        }
        if vmax > 0.0 {
            limit = limit.min(dy / vmax);
        }
        for (c, (&rho, &mu)) in s.rho.iter().zip(&s.mu).enumerate() {
            limit = limit.min(h * h * rho / (4.0 * mu));
            if self.config.transport_scalar {
                let beta = s.air.as_ref().map_or(0.0, |a| a[c]);
                let kappa = self.fluid.blend(s.alpha[c], beta).2;
                if kappa > 0.0 {
                    limit = limit.min(h * h * rho / (4.0 * kappa));
                }
            }
        }
        let g = self.fluid.gravity.0.hypot(self.fluid.gravity.1);
        if g > 0.0 {
            limit = limit.min((h / g).sqrt());
        }
        cfl * limit
    }

    /// Advances `s` by `dt`. On error `s` is left unchanged.
    pub fn step(&self, s: &mut FlowState, dt: f64) -> Result<StepReport, CfdError> {
        self.check_shape(s)?;
        let limit = self.stable_dt(s, 1.0);
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(CfdError::TimeStep { dt, limit });
        }
        let sides = self.sides();
        let mut next = s.clone();
        next.u = self.predict_u(s, &sides, dt);
        next.v = self.predict_v(s, &sides, dt);
        let projection = self.project_with(&mut next, &sides, dt)?;
        let clipped = self.transport_fractions(&mut next, &sides, dt);
        if self.config.transport_scalar {
            next.scalar = self.scalar_update(&next, dt);
        }
        next.update_properties(&self.fluid);
        next.time += dt;
        *s = next;
        Ok(StepReport {
            dt,
            projection,
            clipped,
        })
    }

    fn predict_u(&self, s: &FlowState, sides: &Sides, dt: f64) -> Vec<f64> {
        let (nx, ny, dx, dy) = (self.grid.nx, self.grid.ny, self.grid.dx, self.grid.dy);
        let gx = self.fluid.gravity.0;
        let mut out = vec![0.0; (nx + 1) * ny];
        for_rows(self.par(), &mut out, nx + 1, |j, row| {
            for (i, out) in row.iter_mut().enumerate() {
                let boundary = if i == 0 {
                    Some(sides.left[j])
                } else if i == nx {
                    Some(sides.right[j])
                } else {
                    None
                };
                let pb = match boundary {
                    None => None,
                    Some(b) => match outlet_pressure(b) {
                        Some(p) => Some(p),
                        None => {
                            *out = 0.0;
                            continue;
                        }
                    },
                };
                let cl = i.saturating_sub(1);
                let cr = i.min(nx - 1);
                let uc = s.u_at(i, j);
                let ul = if i > 0 { s.u_at(i - 1, j) } else { uc };
                let ur = if i < nx { s.u_at(i + 1, j) } else { uc };
                let us = if j > 0 {
                    s.u_at(i, j - 1)
                } else {
                    tangential_ghost(uc, &sides.bottom, cl, cr)
                };
                let un = if j + 1 < ny {
                    s.u_at(i, j + 1)
                } else {
                    tangential_ghost(uc, &sides.top, cl, cr)
                };
                let vc =
                    0.25 * (s.v_at(cl, j) + s.v_at(cl, j + 1) + s.v_at(cr, j) + s.v_at(cr, j + 1));
                let adv = uc * upwind(uc, ul, uc, ur) / dx + vc * upwind(vc, us, uc, un) / dy;

                let (w, e) = (s.cell(cl, j), s.cell(cr, j));
                let rho_f = 0.5 * (s.rho[w] + s.rho[e]);
                let (mu_w, mu_e) = (s.mu[w], s.mu[e]);
                let mu_f = 0.5 * (mu_w + mu_e);
                let visc = (mu_e * (ur - uc) - mu_w * (uc - ul)) / (dx * dx)
                    + mu_f * (un - 2.0 * uc + us) / (dy * dy);

                let dp = match pb {
                    None => (s.p[e] - s.p[w]) / dx,
                    Some(pb) if i == 0 => (s.p[e] - pb) / (0.5 * dx),
                    Some(pb) => (pb - s.p[w]) / (0.5 * dx),
                };
                let src = s.source_u[j * (nx + 1) + i];
                *out = uc + dt * (-adv + (visc + src - dp) / rho_f + gx);
            }
        });
        out
    }

    fn predict_v(&self, s: &FlowState, sides: &Sides, dt: f64) -> Vec<f64> {
        let (nx, ny, dx, dy) = (self.grid.nx, self.grid.ny, self.grid.dx, self.grid.dy);
        let gy = self.fluid.gravity.1;
        let mut out = vec![0.0; nx * (ny + 1)];
        for_rows(self.par(), &mut out, nx, |j, row| {
            for (i, out) in row.iter_mut().enumerate() {
                let boundary = if j == 0 {
                    Some(sides.bottom[i])
                } else if j == ny {
                    Some(sides.top[i])
                } else {
                    None
                };
                let pb = match boundary {
                    None => None,
                    Some(b) => match outlet_pressure(b) {
                        Some(p) => Some(p),
                        None => {
                            *out = 0.0;
                            continue;
                        }
                    },
                };
                let cb = j.saturating_sub(1);
                let ct = j.min(ny - 1);
                let vc = s.v_at(i, j);
                let vs = if j > 0 { s.v_at(i, j - 1) } else { vc };
                let vn = if j < ny { s.v_at(i, j + 1) } else { vc };
                let vw = if i > 0 {
                    s.v_at(i - 1, j)
                } else {
                    tangential_ghost(vc, &sides.left, cb, ct)
                };
                let ve = if i + 1 < nx {
                    s.v_at(i + 1, j)
                } else {
                    tangential_ghost(vc, &sides.right, cb, ct)
                };
                let uc =
                    0.25 * (s.u_at(i, cb) + s.u_at(i + 1, cb) + s.u_at(i, ct) + s.u_at(i + 1, ct));
                let adv = uc * upwind(uc, vw, vc, ve) / dx + vc * upwind(vc, vs, vc, vn) / dy;

                let (sc, nc) = (s.cell(i, cb), s.cell(i, ct));
                let rho_f = 0.5 * (s.rho[sc] + s.rho[nc]);
                let (mu_s, mu_n) = (s.mu[sc], s.mu[nc]);
                let mu_f = 0.5 * (mu_s + mu_n);
                let visc = (mu_n * (vn - vc) - mu_s * (vc - vs)) / (dy * dy)
                    + mu_f * (ve - 2.0 * vc + vw) / (dx * dx);

                let dp = match pb {
                    None => (s.p[nc] - s.p[sc]) / dy,
                    Some(pb) if j == 0 => (s.p[nc] - pb) / (0.5 * dy),
                    Some(pb) => (pb - s.p[sc]) / (0.5 * dy),
                };
                let src = s.source_v[j * nx + i];
                *out = vc + dt * (-adv + (visc + src - dp) / rho_f + gy);
            }
        });
        out
    }

    /// Makes the face velocities of `s` discretely divergence-free and adds
    /// the pressure increment to `s.p`.
    pub fn project(&self, s: &mut FlowState, dt: f64) -> Result<ProjectionReport, CfdError> {
        self.check_shape(s)?;
        if !(dt > 0.0) {
            return Err(CfdError::TimeStep { dt, limit: 0.0 });
        }
        let sides = self.sides();
        let mut next = s.clone();
        let report = self.project_with(&mut next, &sides, dt)?;
        *s = next;
        Ok(report)
    }

    fn project_with(
        &self,
        s: &mut FlowState,
        sides: &Sides,
        dt: f64,
    ) -> Result<ProjectionReport, CfdError> {
        let (nx, ny, dx, dy) = (self.grid.nx, self.grid.ny, self.grid.dx, self.grid.dy);
        let par = self.par();

        // Face coefficients 1 / (rho h^2); boundary outlets sit half a cell
        // from the cell centre.
        let mut ax = vec![0.0; (nx + 1) * ny];
        for_rows(par, &mut ax, nx + 1, |j, row| {
            for (i, a) in row.iter_mut().enumerate() {
                *a = if i == 0 || i == nx {
                    let b = if i == 0 {
                        sides.left[j]
                    } else {
                        sides.right[j]
                    };
                    if b.is_outlet() {
                        2.0 / (s.rho[s.cell(i.min(nx - 1), j)] * dx * dx)
                    } else {
                        0.0
                    }
                } else {
                    2.0 / ((s.rho[s.cell(i - 1, j)] + s.rho[s.cell(i, j)]) * dx * dx)
                };
            }
        });
        let mut ay = vec![0.0; nx * (ny + 1)];
        for_rows(par, &mut ay, nx, |j, row| {
            for (i, a) in row.iter_mut().enumerate() {
                *a = if j == 0 || j == ny {
                    let b = if j == 0 {
                        sides.bottom[i]
                    } else {
                        sides.top[i]
                    };
                    if b.is_outlet() {
                        2.0 / (s.rho[s.cell(i, j.min(ny - 1))] * dy * dy)
                    } else {
                        0.0
                    }
                } else {
                    2.0 / ((s.rho[s.cell(i, j - 1)] + s.rho[s.cell(i, j)]) * dy * dy)
                };
            }
        });

        let (umax, vmax) = s.max_speed();
        let target = self.config.projection_tolerance * umax.max(vmax) / dx.min(dy);
        let mut b = s.divergence(&self.grid);
        let initial = b.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        if initial <= target {
            return Ok(ProjectionReport {
                iterations: 0,
                divergence: initial,
                target,
            });
        }

        let poisson = Poisson {
            nx,
            ny,
            ax: &ax,
            ay: &ay,
            par,
        };
        let cap = self.config.max_iterations.unwrap_or(10 * nx * ny);
        let mut psi = vec![0.0; nx * ny];
        let solve = poisson.solve(&mut b, &mut psi, target, cap)?;

        let psi_ref = &psi;
        let (u_old, v_old) = (std::mem::take(&mut s.u), std::mem::take(&mut s.v));
        let mut u = u_old;
        for_rows(par, &mut u, nx + 1, |j, row| {
            for (i, uf) in row.iter_mut().enumerate() {
                let a = ax[j * (nx + 1) + i];
                if a == 0.0 {
                    continue;
                }
                let right = if i < nx { psi_ref[j * nx + i] } else { 0.0 };
                let left = if i > 0 { psi_ref[j * nx + i - 1] } else { 0.0 };
                *uf -= a * dx * (right - left);
            }
        });
        let mut v = v_old;
        for_rows(par, &mut v, nx, |j, row| {
            for (i, vf) in row.iter_mut().enumerate() {
                let a = ay[j * nx + i];
                if a == 0.0 {
                    continue;
                }
                let up = if j < ny { psi_ref[j * nx + i] } else { 0.0 };
                let down = if j > 0 {
                    psi_ref[(j - 1) * nx + i]
                } else {
                    0.0
                };
                *vf -= a * dy * (up - down);
            }
        });
        s.u = u;
        s.v = v;
        for (p, d) in s.p.iter_mut().zip(&psi) {
            *p += d / dt;
        }
        let divergence = max_rows(par, ny, |j| {
            (0..nx)
                .map(|i| {
                    ((s.u_at(i + 1, j) - s.u_at(i, j)) / dx
                        + (s.v_at(i, j + 1) - s.v_at(i, j)) / dy)
                        .abs()
                })
                .fold(0.0, f64::max)
        });
        Ok(ProjectionReport {
            iterations: solve.iterations,
            divergence,
            target,
        })
    }

    /// Conservative upwind update of one fraction field. Returns the new
    /// field and the clipped volume.
    fn transport(
        &self,
        s: &FlowState,
        f: &[f64],
        sides: &Sides,
        entering: fn(Composition) -> f64,
        dt: f64,
    ) -> (Vec<f64>, f64) {
        let (nx, ny, dx, dy) = (self.grid.nx, self.grid.ny, self.grid.dx, self.grid.dy);
        let cell_volume = dx * dy;
        // Volume flux through u-face (i, j) in +x.
        let flux_x = |i: usize, j: usize| {
            let un = s.u_at(i, j);
            if un == 0.0 {
                return 0.0;
            }
            let value = if un > 0.0 {
                if i > 0 {
                    f[j * nx + i - 1]
                } else {
                    entering(inflow(sides.left[j]))
                }
            } else if i < nx {
                f[j * nx + i]
            } else {
                entering(inflow(sides.right[j]))
            };
            un * value * dy
        };
        let flux_y = |i: usize, j: usize| {
            let vn = s.v_at(i, j);
            if vn == 0.0 {
                return 0.0;
            }
            let value = if vn > 0.0 {
                if j > 0 {
                    f[(j - 1) * nx + i]
                } else {
                    entering(inflow(sides.bottom[i]))
                }
            } else if j < ny {
                f[j * nx + i]
            } else {
                entering(inflow(sides.top[i]))
            };
            vn * value * dx
        };
        let rows = map_rows(self.par(), ny, |j| {
            let mut row = Vec::with_capacity(nx);
            let mut clipped = 0.0;
            for i in 0..nx {
                let net = flux_x(i + 1, j) - flux_x(i, j) + flux_y(i, j + 1) - flux_y(i, j);
                let raw = f[j * nx + i] - dt * net / cell_volume;
                let bounded = raw.clamp(0.0, 1.0);
                clipped += (raw - bounded).abs() * cell_volume;
                row.push(bounded);
            }
            (row, clipped)
        });
        let mut out = Vec::with_capacity(nx * ny);
        let mut clipped = 0.0;
        for (row, c) in rows {
            out.extend(row);
            clipped += c;
        }
        (out, clipped)
    }

    fn transport_fractions(&self, s: &mut FlowState, sides: &Sides, dt: f64) -> f64 {
        let (alpha, mut clipped) = self.transport(s, &s.alpha, sides, |c| c.oil, dt);
        let air = s
            .air
            .as_ref()
            .map(|a| self.transport(s, a, sides, |c| c.air, dt));
        s.alpha = alpha;
        if let Some((mut beta, c)) = air {
            clipped += c;
            let cell_volume = self.grid.cell_volume();
            for (a, b) in s.alpha.iter_mut().zip(beta.iter_mut()) {
                let total = *a + *b;
                if total > 1.0 {
                    clipped += (total - 1.0) * cell_volume;
                    *a /= total;
                    *b /= total;
                }
            }
            s.air = Some(beta);
        }
        s.clipped_volume += clipped;
        clipped
    }

    /// Advances the cell scalar by one step with the current velocities:
    /// upwind advection, diffusion with the blended coefficient and the
    /// source `source_scalar / rho`. Boundaries are adiabatic.
    pub fn advect_scalar(&self, s: &mut FlowState, dt: f64) -> Result<(), CfdError> {
        self.check_shape(s)?;
        s.scalar = self.scalar_update(s, dt);
        Ok(())
    }

    fn scalar_update(&self, s: &FlowState, dt: f64) -> Vec<f64> {
        let (nx, ny, dx, dy) = (self.grid.nx, self.grid.ny, self.grid.dx, self.grid.dy);
        let kappa: Vec<f64> = (0..nx * ny)
            .map(|c| {
                let beta = s.air.as_ref().map_or(0.0, |a| a[c]);
                self.fluid.blend(s.alpha[c], beta).2
            })
            .collect();
        let t = &s.scalar;
        let kappa = &kappa;
        let mut out = vec![0.0; nx * ny];
        for_rows(self.par(), &mut out, nx, |j, row| {
            for (i, out) in row.iter_mut().enumerate() {
                let c = j * nx + i;
                let tc = t[c];
                let tw = if i > 0 { t[c - 1] } else { tc };
                let te = if i + 1 < nx { t[c + 1] } else { tc };
                let ts = if j > 0 { t[c - nx] } else { tc };
                let tn = if j + 1 < ny { t[c + nx] } else { tc };
                let uc = 0.5 * (s.u_at(i, j) + s.u_at(i + 1, j));
                let vc = 0.5 * (s.v_at(i, j) + s.v_at(i, j + 1));
                let adv = uc * upwind(uc, tw, tc, te) / dx + vc * upwind(vc, ts, tc, tn) / dy;
                let face = |nb: usize| 0.5 * (kappa[c] + kappa[nb]);
                let mut diff = 0.0;
                if i > 0 {
                    diff += face(c - 1) * (tw - tc) / (dx * dx);
                }
                if i + 1 < nx {
                    diff += face(c + 1) * (te - tc) / (dx * dx);
                }
                if j > 0 {
                    diff += face(c - nx) * (ts - tc) / (dy * dy);
                }
                if j + 1 < ny {
                    diff += face(c + nx) * (tn - tc) / (dy * dy);
                }
                *out = tc + dt * (-adv + (diff + s.source_scalar[c]) / s.rho[c]);
            }
        });
        out
    }

    /// Jet speed through `faces`: the speed `|(u, v)|` at each outflowing
    /// face, weighted by its outward flux. Zero when nothing flows out.
    pub fn breach_jet_speed(&self, s: &FlowState, faces: &FaceRange) -> f64 {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut flux = 0.0;
        let mut weighted = 0.0;
        for k in faces.indices() {
            let (outward, tangential) = match faces.side {
                Side::Left => (-s.u_at(0, k), 0.5 * (s.v_at(0, k) + s.v_at(0, k + 1))),
                Side::Right => (
                    s.u_at(nx, k),
                    0.5 * (s.v_at(nx - 1, k) + s.v_at(nx - 1, k + 1)),
                ),
                Side::Bottom => (-s.v_at(k, 0), 0.5 * (s.u_at(k, 0) + s.u_at(k + 1, 0))),
                Side::Top => (
                    s.v_at(k, ny),
                    0.5 * (s.u_at(k, ny - 1) + s.u_at(k + 1, ny - 1)),
                ),
            };
            if outward > 0.0 {
                flux += outward;
                weighted += outward * outward.hypot(tangential);
            }
        }
        if flux > 0.0 {
            weighted / flux
        } else {
            0.0
        }
    }

    /// Outward volume flux through `faces` per unit depth, m^2/s, as
    /// `(oil, total)`. Oil weights each face by the fraction on its upwind
    /// side.
    pub fn breach_outflow(&self, s: &FlowState, faces: &FaceRange) -> (f64, f64) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut oil = 0.0;
        let mut total = 0.0;
        for k in faces.indices() {
            let (outward, area, cell) = match faces.side {
                Side::Left => (-s.u_at(0, k), self.grid.dy, s.cell(0, k)),
                Side::Right => (s.u_at(nx, k), self.grid.dy, s.cell(nx - 1, k)),
                Side::Bottom => (-s.v_at(k, 0), self.grid.dx, s.cell(k, 0)),
                Side::Top => (s.v_at(k, ny), self.grid.dx, s.cell(k, ny - 1)),
            };
            let upwind_alpha = if outward >= 0.0 {
                s.alpha[cell]
            } else {
                inflow(self.grid.face_boundary(faces.side, k)).oil
            };
            total += outward * area;
            oil += outward * area * upwind_alpha;
        }
        (oil, total)
    }
}
