//! Leak history from the 2D solver.
//!
//! The solver resolves the flow in a slice of the tank towards a breach
//! slot. The slot velocity, not its area, carries over to the real hole: the
//! reported volume rate is `C_D * A_B * V_jet * oil_fraction`, with `V_jet`
//! the flux-weighted jet speed through the slot. The liquid level drops by
//! that volume over the tank's free surface, and the pressure lid on top of
//! the grid follows the level.

use crate::cfd::{
    init_from_scenario, lid_pressure, tank_grid, Boundary, Composition, Snapshot, SolverConfig,
    TankOptions,
};
use crate::error::{CfdError, HarnessError};
use crate::orifice::{scenario_discharge_coefficient, CdSource, RegimeTable};
use crate::scenario::Scenario;
use crate::series::LeakTimeSeries;

/// First step as a fraction of the stability limit; later steps grow by
/// [`DT_GROWTH`] at most.
const START_FRACTION: f64 = 0.01;
const DT_GROWTH: f64 = 1.1;

#[derive(Debug, Clone, PartialEq)]
pub struct CfdOptions {
    pub nx: usize,
    pub ny: usize,
    /// Fraction of the stability limit used for each step.
    pub cfl: f64,
    /// Capture fields every this many steps.
    pub snapshot_every: Option<usize>,
    pub max_steps: Option<usize>,
    /// Breach slot height in metres; the grid default when `None`.
    pub slot_height: Option<f64>,
    pub solver: SolverConfig,
}

impl Default for CfdOptions {
    fn default() -> Self {
        Self {
            nx: 64,
            ny: 64,
            cfl: 0.25,
            snapshot_every: None,
            max_steps: None,
            slot_height: None,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffluxSample {
    pub time: f64,
    /// Flux-weighted speed through the breach slot, m/s.
    pub jet_speed: f64,
    /// Bernoulli speed for the current level and pressures, m/s.
    pub ideal_speed: f64,
}

#[derive(Debug, Clone)]
pub struct CfdRun {
    pub series: LeakTimeSeries,
    pub discharge_coefficient: f64,
    pub cd_source: CdSource,
    pub steps: usize,
    pub snapshots: Vec<(usize, Snapshot)>,
    pub efflux: Vec<EffluxSample>,
    pub slot_height: f64,
    /// Fraction volume lost or gained to clipping, m^2 per unit depth.
    pub clipped_volume: f64,
    pub projection_iterations: usize,
    pub final_level: f64,
}

/// Bernoulli efflux speed for liquid level `level`.
pub fn ideal_speed(s: &Scenario, level: f64) -> f64 {
    let rho = s.oil.density_oil;
    let hole = s.breach.height_above_keel;
    let dp = s.tank.top_pressure_at_level(level) + rho * s.environment.gravity * (level - hole)
        - s.environment.outside_pressure(hole);
    (2.0 * dp.max(0.0) / rho).sqrt()
}

/// Runs the solver from rest until `t_end` or `max_steps`.
pub fn simulate_cfd(
    s: &Scenario,
    options: &CfdOptions,
    regimes: &RegimeTable,
    max_dt: Option<f64>,
    t_end: f64,
) -> Result<CfdRun, HarnessError> {
    if !(options.cfl > 0.0 && options.cfl <= 1.0) {
        return Err(HarnessError::Options(format!(
            "cfl must be in (0, 1], got {}",
            options.cfl
        )));
    }
    if !(t_end > 0.0) || max_dt.is_some_and(|d| !(d > 0.0)) {
        return Err(HarnessError::Options("dt and t_end must be > 0".into()));
    }
    if options.snapshot_every == Some(0) {
        return Err(HarnessError::Options(
            "snapshot interval must be >= 1".into(),
        ));
    }
    let (cd, cd_source) = scenario_discharge_coefficient(s, regimes)?;
    let grid = tank_grid(s, options.nx, options.ny)?;
    let mut case = init_from_scenario(
        s,
        &grid,
        &TankOptions {
            slot_height: options.slot_height,
            air: false,
            config: options.solver.clone(),
        },
    )?;
    let y_top = case.solver.grid.origin.1 + case.solver.grid.height();

    let rho = s.oil.density_oil;
    let area_b = s.breach.area;
    let area_t = s.tank.free_surface_area;
    let hole = s.breach.height_above_keel;
    let mut level = s.tank.initial_liquid_level;

    let mut series = LeakTimeSeries::default();
    series.push(0.0, 0.0, 0.0, 0.0, rho, "cfd");
    let mut efflux = vec![EffluxSample {
        time: 0.0,
        jet_speed: 0.0,
        ideal_speed: ideal_speed(s, level),
    }];
    let mut snapshots = Vec::new();
    let mut volume = 0.0;
    let mut rate_prev = 0.0;
    let mut dt_prev = f64::INFINITY;
    let mut steps = 0usize;
    let mut iterations = 0usize;
    let max_steps = options.max_steps.unwrap_or(usize::MAX);

    while steps < max_steps {
        let remaining = t_end - case.state.time;
        if remaining <= 1e-12 * t_end {
            break;
        }
        let limit = case.solver.stable_dt(&case.state, options.cfl);
        let mut dt = if steps == 0 {
            START_FRACTION * limit
        } else {
            limit.min(DT_GROWTH * dt_prev)
        };
        dt = dt.min(remaining).min(max_dt.unwrap_or(f64::INFINITY));
        let report = case.solver.step(&mut case.state, dt)?;
        iterations += report.projection.iterations;
        dt_prev = dt;
        steps += 1;

        let (oil, total) = case.solver.breach_outflow(&case.state, &case.breach);
        let jet = case.solver.breach_jet_speed(&case.state, &case.breach);
        if !jet.is_finite() || !total.is_finite() {
            return Err(CfdError::Config(format!(
                "non-finite breach flow at t = {}",
                case.state.time
            ))
            .into());
        }
        let oil_fraction = if total > 0.0 {
            (oil / total).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let rate = if total > 0.0 && level > hole {
            cd * area_b * jet * oil_fraction
        } else {
            0.0
        };
        let available = (level - hole).max(0.0) * area_t;
        let dv = (0.5 * (rate + rate_prev) * dt).min(available);
        volume += dv;
        level = if dv == available {
            hole
        } else {
            level - dv / area_t
        };
        rate_prev = rate;
        if case.lid {
            case.solver.grid.top = Boundary::PressureOutlet {
                pressure: lid_pressure(s, level, y_top),
                inflow: Composition::OIL,
            };
        }

        let velocity = if total >= 0.0 {
            jet
        } else {
            total / case.slot_height
        };
        series.push(case.state.time, velocity, rho * rate, volume, rho, "cfd");
        efflux.push(EffluxSample {
            time: case.state.time,
            jet_speed: jet,
            ideal_speed: ideal_speed(s, level),
        });
        if options
            .snapshot_every
            .is_some_and(|n| steps.is_multiple_of(n))
        {
            snapshots.push((steps, Snapshot::capture(&case.solver.grid, &case.state)));
        }
    }

    Ok(CfdRun {
        series,
        discharge_coefficient: cd,
        cd_source,
        steps,
        snapshots,
        efflux,
        slot_height: case.slot_height,
        clipped_volume: case.state.clipped_volume,
        projection_iterations: iterations,
        final_level: level,
    })
}
