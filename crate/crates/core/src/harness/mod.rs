//! Runs a scenario through any model, exports the result, and tabulates a
//! comparison between models.
//!
//! Every model produces a [`RunResult`]: the leak history, both source-term
//! reductions, the measured wall-clock time and a few model-specific notes.
//! [`export`] writes it as `series.csv` plus `summary.toml`, and [`audit`]
//! re-derives the summary from the exported series.

mod cfd_run;
mod compare;
mod export;

pub use cfd_run::{ideal_speed, simulate_cfd, CfdOptions, CfdRun, EffluxSample};
pub use compare::{compare, Comparison, ComparisonRow, ComparisonTable, RowValues};
pub use export::{
    audit, export, read_summary, AuditReport, ExportedFiles, SourceTerms, Summary, Totals,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::cfd::Snapshot;
use crate::error::{HarnessError, ScenarioError, TwoStageError};
use crate::estimators::{
    film_volume, inventory_balance, optical_flux, reduce_to_source_term, FilmObservation,
    ReleaseMode, SourceTerm, ThicknessTable, KG_PER_TONNE,
};
use crate::orifice::{
    drain_with_coefficient, scenario_discharge_coefficient, CdSource, RegimeTable,
};
use crate::scenario::{BreachPosition, Scenario};
use crate::series::LeakTimeSeries;
use crate::two_stage::{scenario_forcing, simulate_two_stage, DecayCoefficient, TwoStageModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    Estimate,
    Jet,
    TwoStage,
    Cfd,
}

impl ModelId {
    pub const ALL: [ModelId; 4] = [Self::Estimate, Self::Jet, Self::TwoStage, Self::Cfd];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Estimate => "estimate",
            Self::Jet => "jet",
            Self::TwoStage => "two_stage",
            Self::Cfd => "cfd",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "estimate" => Ok(Self::Estimate),
            "jet" => Ok(Self::Jet),
            "two_stage" => Ok(Self::TwoStage),
            "cfd" => Ok(Self::Cfd),
            _ => Err(HarnessError::Options(format!(
                "unknown model `{s}` (expected estimate, jet, two_stage or cfd)"
            ))),
        }
    }
}

/// Bunker records, tonnes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InventoryRecord {
    pub stock_before: f64,
    pub consumed_since: f64,
    pub remaining_after: f64,
}

/// A measured outflow speed held for a duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalRecord {
    pub velocity: f64,
    pub duration: f64,
}

/// Observations for the `estimate` model. When several are given, inventory
/// records take precedence over slick observations, which take precedence
/// over the optical measurement; the others are reported in the notes.
#[derive(Debug, Clone, Default)]
pub struct EstimateInputs {
    pub inventory: Option<InventoryRecord>,
    pub films: Vec<FilmObservation>,
    pub thickness: ThicknessTable,
    pub optical: Option<OpticalRecord>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output interval for the ODE models, largest step for the solver.
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub cfd: CfdOptions,
    pub estimate: EstimateInputs,
    pub decay: DecayCoefficient,
    pub regimes: RegimeTable,
}

/// Simulated time for a solver run when none is given, s.
pub const DEFAULT_CFD_DURATION: f64 = 2.0;
/// Output interval for draining runs when none is given, s.
pub const DEFAULT_JET_DT: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct RunResult {
    pub label: String,
    pub model: ModelId,
    pub density_oil: f64,
    pub series: LeakTimeSeries,
    pub instantaneous: SourceTerm,
    /// `None` when the history has no interval with outflow.
    pub continuous: Option<SourceTerm>,
    pub runtime_s: f64,
    pub phase1_duration: Option<f64>,
    pub notes: BTreeMap<String, String>,
    pub snapshots: Vec<(usize, Snapshot)>,
}

impl RunResult {
    pub fn total_mass(&self) -> f64 {
        self.series.final_mass()
    }
}

struct ModelOutput {
    series: LeakTimeSeries,
    phase1_duration: Option<f64>,
    notes: BTreeMap<String, String>,
    snapshots: Vec<(usize, Snapshot)>,
}

impl ModelOutput {
    fn new(series: LeakTimeSeries) -> Self {
        Self {
            series,
            phase1_duration: None,
            notes: BTreeMap::new(),
            snapshots: Vec::new(),
        }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.insert(key.to_string(), value.to_string());
    }
}

/// Runs one model on a scenario.
pub fn run(s: &Scenario, model: ModelId, options: &RunOptions) -> Result<RunResult, HarnessError> {
    let violations = s.validate();
    if !violations.is_empty() {
        return Err(ScenarioError::Invalid(violations).into());
    }
    let started = Instant::now();
    let out = match model {
        ModelId::Estimate => run_estimate(s, &options.estimate)?,
        ModelId::Jet => run_jet(s, options)?,
        ModelId::TwoStage => run_two_stage(s, options)?,
        ModelId::Cfd => run_cfd(s, options)?,
    };
    let runtime_s = started.elapsed().as_secs_f64();

    let instantaneous = reduce_to_source_term(&out.series, ReleaseMode::Instantaneous)?;
    let continuous = reduce_to_source_term(&out.series, ReleaseMode::ContinuousConstant).ok();
    Ok(RunResult {
        label: s.label.clone(),
        model,
        density_oil: s.oil.density_oil,
        series: out.series,
        instantaneous,
        continuous,
        runtime_s,
        phase1_duration: out.phase1_duration,
        notes: out.notes,
        snapshots: out.snapshots,
    })
}

fn cd_note(out: &mut ModelOutput, cd: f64, source: CdSource) {
    out.note("discharge_coefficient", cd);
    match source {
        CdSource::Given => out.note("cd_source", "scenario"),
        CdSource::Regime(r) => {
            let kind = serde_plain(&r.kind);
            out.note("cd_source", format!("regime {kind}"));
            out.note("cavitation_number", r.cavitation_number);
        }
    }
}

fn serde_plain<T: serde::Serialize>(v: &T) -> String {
    toml::Value::try_from(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn run_estimate(s: &Scenario, inputs: &EstimateInputs) -> Result<ModelOutput, HarnessError> {
    let rho = s.oil.density_oil;
    let inventory = inputs
        .inventory
        .map(|r| inventory_balance(r.stock_before, r.consumed_since, r.remaining_after))
        .transpose()?
        .map(|t| t * KG_PER_TONNE);
    let film = if inputs.films.is_empty() {
        None
    } else {
        Some(film_volume(&inputs.films, rho, &inputs.thickness)?)
    };
    let optical = inputs
        .optical
        .map(|o| optical_flux(s.breach.area, o.velocity, rho, o.duration))
        .transpose()?;

    let mut series = LeakTimeSeries::default();
    let method = if let Some(mass) = inventory {
        series.push(0.0, 0.0, 0.0, mass / rho, rho, "estimate");
        "inventory"
    } else if let Some(mass) = film {
        series.push(0.0, 0.0, 0.0, mass / rho, rho, "estimate");
        "film"
    } else if let (Some(mass), Some(o)) = (optical, inputs.optical) {
        let rate = rho * s.breach.area * o.velocity;
        series.push(0.0, o.velocity, rate, 0.0, rho, "estimate");
        if o.duration > 0.0 {
            series.push(o.duration, o.velocity, rate, mass / rho, rho, "estimate");
        }
        "optical"
    } else {
        return Err(HarnessError::Pairing {
            model: ModelId::Estimate.to_string(),
            reason: "no inventory, film or optical observations supplied".into(),
        });
    };
    let mut out = ModelOutput::new(series);
    out.note("method", method);
    if let Some(m) = inventory {
        out.note("inventory_mass_kg", m);
    }
    if let Some(m) = film {
        out.note("film_mass_kg", m);
    }
    if let Some(m) = optical {
        out.note("optical_mass_kg", m);
    }
    Ok(out)
}

/// Time for the level to reach the hole under the initial pressure
/// difference, or to reach the balance level, with a 20% margin. Falls back
/// to one second when nothing flows.
fn default_drain_horizon(s: &Scenario, cd: f64) -> f64 {
    let env = &s.environment;
    let g = env.gravity;
    let rho = s.oil.density_oil;
    let head = s.initial_head().max(0.0);
    let dp_head = (s.tank.initial_top_pressure()
        - env.outside_pressure(s.breach.height_above_keel))
        / (rho * g);
    let k = cd * s.breach.area * (2.0 * g).sqrt() / (2.0 * s.tank.free_surface_area);
    let start = (head + dp_head).max(0.0).sqrt();
    let end = dp_head.max(0.0).sqrt();
    let t = (start - end) / k;
    if t.is_finite() && t > 0.0 {
        1.2 * t
    } else {
        1.0
    }
}

fn run_jet(s: &Scenario, options: &RunOptions) -> Result<ModelOutput, HarnessError> {
    let (cd, source) = scenario_discharge_coefficient(s, &options.regimes)?;
    let dt = options.dt.unwrap_or(DEFAULT_JET_DT);
    let t_end = options
        .t_end
        .unwrap_or_else(|| default_drain_horizon(s, cd));
    let series = drain_with_coefficient(s, cd, dt, t_end)?;
    let mut out = ModelOutput::new(series);
    cd_note(&mut out, cd, source);
    let last = out.series.phase.last().cloned().unwrap_or_default();
    if last == "empty" {
        let t = out.series.times.last().copied().unwrap_or(0.0);
        out.note("empty_time_s", t);
    }
    out.note("end_state", last);
    Ok(out)
}

fn two_stage_pairing(e: TwoStageError) -> HarnessError {
    match e {
        TwoStageError::NotSubmerged => HarnessError::Pairing {
            model: ModelId::TwoStage.to_string(),
            reason: "the breach is above the waterline; use `jet`".into(),
        },
        e => e.into(),
    }
}

fn run_two_stage(s: &Scenario, options: &RunOptions) -> Result<ModelOutput, HarnessError> {
    if s.breach.position != BreachPosition::BelowWaterline {
        return Err(two_stage_pairing(TwoStageError::NotSubmerged));
    }
    let (cd, source) = scenario_discharge_coefficient(s, &options.regimes)?;
    let forcing = scenario_forcing(s);
    let dt = options.dt.unwrap_or((forcing.period / 20.0).min(0.1));
    let t_end = match options.t_end {
        Some(t) => t,
        None => {
            let model = TwoStageModel::new(s, cd).map_err(two_stage_pairing)?;
            let t_star = match model.phase1_duration() {
                Ok(t) => t,
                Err(TwoStageError::AtEquilibrium { .. }) => 0.0,
                Err(e) => return Err(e.into()),
            };
            t_star + 10.0 * forcing.period
        }
    };
    let run = simulate_two_stage(s, cd, dt, t_end, options.decay).map_err(two_stage_pairing)?;
    let mut out = ModelOutput::new(run.series);
    cd_note(&mut out, cd, source);
    out.phase1_duration = Some(run.phase1_duration);
    out.note("initial_velocity_mps", run.initial_velocity);
    out.note("phase1_duration_s", run.phase1_duration);
    out.note("wave_amplitude_m", forcing.amplitude);
    out.note("wave_period_s", forcing.period);
    out.note("wave_source", serde_plain(&forcing.source));
    out.note("decay", serde_plain(&options.decay));
    out.note("water_inside_m3", run.final_state.water_inside);
    Ok(out)
}

fn run_cfd(s: &Scenario, options: &RunOptions) -> Result<ModelOutput, HarnessError> {
    let t_end = options.t_end.unwrap_or(DEFAULT_CFD_DURATION);
    let run = simulate_cfd(s, &options.cfd, &options.regimes, options.dt, t_end)?;
    let mut out = ModelOutput::new(run.series);
    cd_note(&mut out, run.discharge_coefficient, run.cd_source);
    out.snapshots = run.snapshots;
    out.note("grid", format!("{}x{}", options.cfd.nx, options.cfd.ny));
    out.note("steps", run.steps);
    out.note("slot_height_m", run.slot_height);
    out.note("clipped_volume_m2", run.clipped_volume);
    out.note("final_level_m", run.final_level);
    if run.steps > 0 {
        out.note(
            "mean_projection_iterations",
            run.projection_iterations as f64 / run.steps as f64,
        );
    }
    if let Some(last) = run.efflux.last().filter(|e| e.ideal_speed > 0.0) {
        out.note("final_jet_to_ideal", last.jet_speed / last.ideal_speed);
    }
    Ok(out)
}
