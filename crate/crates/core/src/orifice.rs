//! Hydrostatic orifice models: constant-head drain above the waterline,
//! the Bernoulli pressure-head mass rate, its quasi-steady draining
//! transient, and the flow-regime choice of discharge coefficient.

use serde::{Deserialize, Serialize};

use crate::error::OrificeError;
use crate::scenario::Scenario;
use crate::series::LeakTimeSeries;

/// Volume lost through an above-waterline hole when the efflux speed is held
/// at its initial value `sqrt(2 g h0)` for the whole leak duration, m^3.
pub fn above_waterline_volume(
    initial_head: f64,
    hole_area: f64,
    leak_duration: f64,
    gravity: f64,
) -> Result<f64, OrificeError> {
    if [initial_head, hole_area, leak_duration]
        .iter()
        .any(|v| !(*v >= 0.0))
        || !(gravity > 0.0)
    {
        return Err(OrificeError::InvalidInput(
            "head, area and duration must be >= 0 and gravity > 0".into(),
        ));
    }
    Ok((2.0 * gravity * initial_head).sqrt() * hole_area * leak_duration)
}

/// Inputs of the pressure-head orifice equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orifice {
    pub discharge_coefficient: f64,
    pub hole_area: f64,
    pub density_oil: f64,
    pub gravity: f64,
}

impl Orifice {
    /// The bracketed term `2 (P_T - P_out) / rho + 2 g H`, m^2/s^2.
    pub fn radicand(&self, ullage_pressure: f64, outside_pressure: f64, head: f64) -> f64 {
        2.0 * (ullage_pressure - outside_pressure) / self.density_oil + 2.0 * self.gravity * head
    }

    /// Oil mass rate through the hole, kg/s.
    ///
    /// `head` is the liquid surface height above the hole centreline. A
    /// negative radicand means the outside pressure wins and is reported as
    /// [`OrificeError::NoOutflow`].
    pub fn mass_rate(
        &self,
        ullage_pressure: f64,
        outside_pressure: f64,
        head: f64,
    ) -> Result<f64, OrificeError> {
        let r = self.radicand(ullage_pressure, outside_pressure, head);
        if r < 0.0 {
            return Err(OrificeError::NoOutflow { radicand: r });
        }
        Ok(self.discharge_coefficient * self.hole_area * self.density_oil * r.sqrt())
    }
}

pub fn orifice_mass_rate(
    discharge_coefficient: f64,
    hole_area: f64,
    density_oil: f64,
    ullage_pressure: f64,
    outside_pressure: f64,
    head: f64,
    gravity: f64,
) -> Result<f64, OrificeError> {
    Orifice {
        discharge_coefficient,
        hole_area,
        density_oil,
        gravity,
    }
    .mass_rate(ullage_pressure, outside_pressure, head)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    SinglePhase,
    Cavitating,
    HydraulicFlip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowRegime {
    pub kind: RegimeKind,
    pub effective_cd: f64,
    pub cavitation_number: f64,
}

/// Regime thresholds and per-regime discharge coefficients.
///
/// The defaults are engineering values for sharp-edged holes, not measured
/// for any particular hull: `C_D` 0.61 single-phase, 0.70 cavitating, 0.60
/// hydraulic flip, with cavitation below `K = 1.8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeTable {
    pub cavitation_threshold: f64,
    pub cd_single_phase: f64,
    pub cd_cavitating: f64,
    pub cd_hydraulic_flip: f64,
}

impl Default for RegimeTable {
    fn default() -> Self {
        Self {
            cavitation_threshold: 1.8,
            cd_single_phase: 0.61,
            cd_cavitating: 0.70,
            cd_hydraulic_flip: 0.60,
        }
    }
}

impl RegimeTable {
    /// Classifies the hole flow from the cavitation number
    /// `K = (P_up - P_vap) / (P_up - P_down)`.
    pub fn classify(
        &self,
        upstream_pressure: f64,
        downstream_pressure: f64,
        vapor_pressure: f64,
        geometry_flip_prone: bool,
    ) -> Result<FlowRegime, OrificeError> {
        if !(upstream_pressure > downstream_pressure) {
            return Err(OrificeError::NonPhysicalPressures(format!(
                "upstream {upstream_pressure} Pa must exceed downstream {downstream_pressure} Pa"
            )));
        }
        if vapor_pressure > upstream_pressure {
            return Err(OrificeError::NonPhysicalPressures(format!(
                "vapour pressure {vapor_pressure} Pa exceeds upstream {upstream_pressure} Pa"
            )));
        }
        let k = (upstream_pressure - vapor_pressure) / (upstream_pressure - downstream_pressure);
        let (kind, effective_cd) = if geometry_flip_prone {
            (RegimeKind::HydraulicFlip, self.cd_hydraulic_flip)
        } else if k >= self.cavitation_threshold {
            (RegimeKind::SinglePhase, self.cd_single_phase)
        } else {
            (RegimeKind::Cavitating, self.cd_cavitating)
        };
        Ok(FlowRegime {
            kind,
            effective_cd,
            cavitation_number: k,
        })
    }
}

pub fn classify_regime(
    upstream_pressure: f64,
    downstream_pressure: f64,
    vapor_pressure: f64,
    geometry_flip_prone: bool,
) -> Result<FlowRegime, OrificeError> {
    RegimeTable::default().classify(
        upstream_pressure,
        downstream_pressure,
        vapor_pressure,
        geometry_flip_prone,
    )
}

/// How the discharge coefficient for a scenario was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CdSource {
    Given,
    Regime(FlowRegime),
}

/// The breach coefficient from the scenario, or from the regime at t = 0
/// when the scenario leaves it open.
pub fn scenario_discharge_coefficient(
    s: &Scenario,
    table: &RegimeTable,
) -> Result<(f64, CdSource), OrificeError> {
    if let Some(cd) = s.breach.discharge_coefficient {
        return Ok((cd, CdSource::Given));
    }
    let env = &s.environment;
    let upstream =
        s.tank.initial_top_pressure() + s.oil.density_oil * env.gravity * s.initial_head().max(0.0);
    let downstream = env.outside_pressure(s.breach.height_above_keel);
    let regime = table.classify(
        upstream,
        downstream,
        s.oil.vapor_pressure,
        s.breach.flip_prone,
    )?;
    Ok((regime.effective_cd, CdSource::Regime(regime)))
}

/// Quasi-steady draining of the scenario tank through its breach.
///
/// Each step evaluates the orifice rate at the current head and then lowers
/// the level by `rate / rho * dt / A_t` (explicit Euler). Samples are tagged
/// `drain`, `stalled` when the outside pressure holds the oil in, and `empty`
/// on the final sample once the level reaches the hole.
pub fn drain_with_coefficient(
    s: &Scenario,
    discharge_coefficient: f64,
    dt: f64,
    t_end: f64,
) -> Result<LeakTimeSeries, OrificeError> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(OrificeError::InvalidInput(
            "dt and t_end must be > 0".into(),
        ));
    }
    let rho = s.oil.density_oil;
    let area_t = s.tank.free_surface_area;
    let hole = s.breach.height_above_keel;
    let p_out = s.environment.outside_pressure(hole);
    let orifice = Orifice {
        discharge_coefficient,
        hole_area: s.breach.area,
        density_oil: rho,
        gravity: s.environment.gravity,
    };
    let rate_at = |level: f64| -> (f64, &'static str) {
        let head = level - hole;
        if head <= 0.0 {
            return (0.0, "empty");
        }
        match orifice.mass_rate(s.tank.top_pressure_at_level(level), p_out, head) {
            Ok(q) => (q, "drain"),
            Err(_) => (0.0, "stalled"),
        }
    };

    let steps = (t_end / dt).ceil() as usize;
    let mut series = LeakTimeSeries::with_capacity(steps + 1);
    let mut level = s.tank.initial_liquid_level;
    let mut volume = 0.0;
    let (mut rate, mut tag) = rate_at(level);
    series.push(0.0, rate / (rho * s.breach.area), rate, 0.0, rho, tag);
    for i in 1..=steps {
        if tag == "empty" {
            break;
        }
        let t = (i as f64 * dt).min(t_end);
        let step_dt = t - series.times[i - 1];
        let available = (level - hole).max(0.0) * area_t;
        let dv = (rate / rho * step_dt).min(available);
        volume += dv;
        level = if dv == available {
            hole
        } else {
            level - dv / area_t
        };
        (rate, tag) = rate_at(level);
        series.push(t, rate / (rho * s.breach.area), rate, volume, rho, tag);
    }
    Ok(series)
}

/// [`drain_with_coefficient`] with the scenario's discharge coefficient,
/// falling back to the default regime table when the scenario has none.
pub fn drain_transient(s: &Scenario, dt: f64, t_end: f64) -> Result<LeakTimeSeries, OrificeError> {
    let (cd, _) = scenario_discharge_coefficient(s, &RegimeTable::default())?;
    drain_with_coefficient(s, cd, dt, t_end)
}
