//! Mapping of a [`Scenario`] tank onto a 2D grid.
//!
//! The grid is a vertical slice of the tank with the keel at `y = 0`. The
//! breach becomes a slot of outlet faces on the right wall centred on the
//! breach height; its size is a resolution choice, not the physical hole
//! size, which only scales the reported leak rate. A grid whose top sits at
//! the liquid level gets a pressure lid that admits oil; a taller grid needs
//! the air phase and gets a pressure top that admits air.

use super::grid::{Boundary, Composition, FaceRange, Grid2D, Side};
use super::solver::{SolverConfig, VofSolver};
use super::state::{FlowState, FluidProps, PhaseProps, AIR, WATER};
use crate::error::CfdError;
use crate::scenario::Scenario;

/// Default breach slot height as a fraction of the grid height.
pub const DEFAULT_SLOT_FRACTION: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TankOptions {
    /// Breach slot height, m; defaults to the grid height times
    /// [`DEFAULT_SLOT_FRACTION`].
    pub slot_height: Option<f64>,
    pub air: bool,
    pub config: SolverConfig,
}

#[derive(Debug, Clone)]
pub struct TankCase {
    pub solver: VofSolver,
    pub state: FlowState,
    /// Outlet faces of the breach.
    pub breach: FaceRange,
    /// Height of the breach faces, m.
    pub slot_height: f64,
    /// Whether the top boundary is a liquid lid rather than a gas boundary.
    pub lid: bool,
}

/// Square slice over the initial liquid column: `level` wide and `level`
/// tall, keel at the origin.
pub fn tank_grid(s: &Scenario, nx: usize, ny: usize) -> Result<Grid2D, CfdError> {
    let level = s.tank.initial_liquid_level;
    Grid2D::with_extent(nx, ny, level, level)
}

pub fn scenario_fluid(s: &Scenario, air: bool) -> FluidProps {
    let oil = PhaseProps {
        density: s.oil.density_oil,
        viscosity: s.oil.dynamic_viscosity,
        diffusivity: 0.0,
    };
    let water = PhaseProps {
        density: s.environment.density_water,
        ..WATER
    };
    let mut fluid = FluidProps::oil_water(oil, water, s.environment.gravity);
    if air {
        fluid.air = Some(AIR);
    }
    fluid
}

/// Pressure at height `top` of a liquid column whose surface is at `level`.
pub fn lid_pressure(s: &Scenario, level: f64, top: f64) -> f64 {
    s.tank.top_pressure_at_level(level) + s.oil.density_oil * s.environment.gravity * (level - top)
}

/// Oil column up to the initial level, hydrostatic pressure, fluid at rest,
/// breach slot opened on the right wall.
pub fn init_from_scenario(
    s: &Scenario,
    grid: &Grid2D,
    options: &TankOptions,
) -> Result<TankCase, CfdError> {
    let mut grid = grid.clone();
    let (y0, height, dy) = (grid.origin.1, grid.height(), grid.dy);
    let level = s.tank.initial_liquid_level;
    let y_top = y0 + height;

    let slot_height = options
        .slot_height
        .unwrap_or(height * DEFAULT_SLOT_FRACTION);
    if !(slot_height > 0.0) || slot_height > height {
        return Err(CfdError::Geometry(format!(
            "breach slot of {slot_height} m does not fit a wall of {height} m"
        )));
    }
    let centre = s.breach.height_above_keel;
    if centre < y0 || centre > y_top {
        return Err(CfdError::Geometry(format!(
            "breach at {centre} m lies outside the grid span {y0}..{y_top} m"
        )));
    }
    let len = ((slot_height / dy).round() as usize).max(1);
    let start = ((centre - y0) / dy - 0.5 * len as f64).round().max(0.0) as usize;
    let start = start.min(grid.ny - len);
    let breach = FaceRange {
        side: Side::Right,
        start,
        len,
    };
    let above_water = centre >= s.environment.draft;
    let inflow = if above_water && options.air {
        Composition::AIR
    } else {
        Composition::WATER
    };
    grid.open(
        breach,
        Boundary::PressureOutlet {
            pressure: s.environment.outside_pressure(centre),
            inflow,
        },
    )?;

    let lid = y_top <= level + 0.5 * dy;
    if lid {
        grid.top = Boundary::PressureOutlet {
            pressure: lid_pressure(s, level, y_top),
            inflow: Composition::OIL,
        };
    } else if options.air {
        grid.top = Boundary::PressureOutlet {
            pressure: s.tank.initial_top_pressure(),
            inflow: Composition::AIR,
        };
    } else {
        return Err(CfdError::Geometry(format!(
            "grid top at {y_top} m is above the liquid level {level} m; enable the air phase"
        )));
    }

    let fluid = scenario_fluid(s, options.air);
    let solver = VofSolver::new(grid, fluid, options.config.clone())?;
    let mut state = FlowState::new(&solver.grid, &solver.fluid);
    let air = options.air;
    state.fill(&solver.grid, &solver.fluid, |_, y| {
        let alpha = ((level - (y - 0.5 * dy)) / dy).clamp(0.0, 1.0);
        (alpha, if air { 1.0 - alpha } else { 0.0 })
    });
    solver.init_hydrostatic(&mut state, s.tank.initial_top_pressure());
    Ok(TankCase {
        solver,
        state,
        breach,
        slot_height: len as f64 * dy,
        lid,
    })
}
