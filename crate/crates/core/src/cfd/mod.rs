//! Two-dimensional incompressible two-phase flow with volume-of-fluid
//! interface capturing.
//!
//! The grid is uniform and staggered: pressure, phase fractions and the
//! transported scalar live at cell centres, velocity components on the cell
//! faces normal to them. Each step advances momentum explicitly, projects the
//! velocity onto a discretely divergence-free field with a variable-density
//! pressure equation, then moves the oil fraction with a conservative bounded
//! upwind scheme. Density and viscosity are blended per cell from the phase
//! fractions; the scalar is passive and does not feed back into the flow.
//!
//! Grid loops run row by row, either on the rayon pool or sequentially (see
//! [`Parallelism`]); both give bit-identical results.

pub(crate) mod exec;
mod grid;
mod poisson;
mod setup;
mod snapshot;
mod solver;
mod state;

pub use exec::Parallelism;
pub use grid::{Boundary, Composition, FaceRange, Grid2D, Opening, Side};
pub use poisson::PoissonReport;
pub use setup::{
    init_from_scenario, lid_pressure, scenario_fluid, tank_grid, TankCase, TankOptions,
    DEFAULT_SLOT_FRACTION,
};
pub use snapshot::Snapshot;
pub use solver::{ProjectionReport, SolverConfig, StepReport, VofSolver, MAX_DT};
pub use state::{Blend, FlowState, FluidProps, PhaseProps, AIR, WATER};
