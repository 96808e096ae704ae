//! Two-stage discharge through a breach below the waterline.
//!
//! Stage one: the heavier sea water outside and the oil column inside are out
//! of balance, and the outflow velocity decays linearly until the heads match.
//! Stage two: ship motion or waves perturb that balance periodically, pumping
//! oil out and sea water in with velocity
//! `C_D sqrt(2 a g (rho_w / rho_l) sin(2 pi t / T))`, read with the sign of the
//! sine (negative means water ingress).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::TwoStageError;
use crate::scenario::{BreachPosition, Scenario, Ullage};
use crate::series::LeakTimeSeries;

/// Open-sea anchor points (wind knots, amplitude m, period s).
pub const WAVE_ANCHOR_LOW: (f64, f64, f64) = (3.0, 0.3, 1.3);
pub const WAVE_ANCHOR_HIGH: (f64, f64, f64) = (10.0, 0.6, 2.78);
/// Typical coastal ranges; nearshore forcing uses their midpoints.
pub const NEARSHORE_AMPLITUDE: (f64, f64) = (0.01, 0.05);
pub const NEARSHORE_PERIOD: (f64, f64) = (1.0, 2.0);
const MIN_WAVE_PARAMETER: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingSource {
    WindAnchor,
    NearshoreRange,
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveForcing {
    pub amplitude: f64,
    pub period: f64,
    pub source: ForcingSource,
}

/// Wave amplitude and period for a wind speed in knots.
///
/// Open sea interpolates linearly through the 3 kt and 10 kt anchors and
/// extrapolates beyond them; the anchors themselves are returned exactly.
/// Nearshore ignores the wind and returns the midpoint of the coastal ranges.
pub fn wave_parameters(wind_speed: f64, nearshore: bool) -> WaveForcing {
    if nearshore {
        return WaveForcing {
            amplitude: 0.5 * (NEARSHORE_AMPLITUDE.0 + NEARSHORE_AMPLITUDE.1),
            period: 0.5 * (NEARSHORE_PERIOD.0 + NEARSHORE_PERIOD.1),
            source: ForcingSource::NearshoreRange,
        };
    }
    let (w0, a0, t0) = WAVE_ANCHOR_LOW;
    let (w1, a1, t1) = WAVE_ANCHOR_HIGH;
    let s = (wind_speed.max(0.0) - w0) / (w1 - w0);
    let lerp = |lo: f64, hi: f64| (1.0 - s) * lo + s * hi;
    WaveForcing {
        amplitude: lerp(a0, a1).max(MIN_WAVE_PARAMETER),
        period: lerp(t0, t1).max(MIN_WAVE_PARAMETER),
        source: ForcingSource::WindAnchor,
    }
}

/// Forcing for a scenario: explicit override first, then the sea-state rule.
pub fn scenario_forcing(s: &Scenario) -> WaveForcing {
    match s.environment.wave_override {
        Some(w) => WaveForcing {
            amplitude: w.amplitude,
            period: w.period,
            source: ForcingSource::Override,
        },
        None => wave_parameters(s.environment.wind_speed, s.environment.nearshore),
    }
}

/// `sin(2 pi f)` for a period fraction `f` in `[0, 1)`, folded so that the
/// zero crossings at 0 and 1/2 are exact and the two half-periods mirror
/// each other.
fn wave_sine(f: f64) -> f64 {
    let x = 2.0 * f;
    if x < 1.0 {
        (PI * x.min(1.0 - x)).sin()
    } else {
        let y = x - 1.0;
        -(PI * y.min(1.0 - y)).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayCoefficient {
    /// Gas volume frozen at its initial value, giving a straight-line decay.
    #[default]
    Frozen,
    /// Gas volume updated every step; for sensitivity studies.
    Reevaluated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    One,
    Two,
    Done,
}

/// Simulator state between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStageState {
    pub phase: Phase,
    /// Positive is oil out.
    pub velocity: f64,
    pub elapsed_in_phase: f64,
    pub gas_pressure: f64,
    pub gas_volume: Option<f64>,
    pub liquid_level: f64,
    /// Hydrostatic pressure inside the tank at the hole depth; diagnostic only.
    pub hole_pressure: f64,
    /// Sea water that has entered and settled under the oil, m^3.
    pub water_inside: f64,
}

/// Breach-below-waterline discharge model bound to one scenario.
#[derive(Debug, Clone)]
pub struct TwoStageModel<'a> {
    scenario: &'a Scenario,
    cd: f64,
}

impl<'a> TwoStageModel<'a> {
    pub fn new(scenario: &'a Scenario, discharge_coefficient: f64) -> Result<Self, TwoStageError> {
        if scenario.breach.position != BreachPosition::BelowWaterline {
            return Err(TwoStageError::NotSubmerged);
        }
        if !(discharge_coefficient > 0.0 && discharge_coefficient <= 1.0) {
            return Err(TwoStageError::InvalidInput(
                "discharge coefficient must lie in (0, 1]".into(),
            ));
        }
        Ok(Self {
            scenario,
            cd: discharge_coefficient,
        })
    }

    fn density_ratio(&self) -> f64 {
        self.scenario.environment.density_water / self.scenario.oil.density_oil
    }

    /// `2 (L_l - L_B) g - 2 (rho_w / rho_l) (D - L_B) g` at t = 0.
    pub fn initial_radicand(&self) -> f64 {
        let s = self.scenario;
        let g = s.environment.gravity;
        let lb = s.breach.height_above_keel;
        2.0 * (s.tank.initial_liquid_level - lb) * g
            - 2.0 * self.density_ratio() * (s.environment.draft - lb) * g
    }

    /// Outflow velocity at the start of stage one, m/s.
    pub fn initial_velocity(&self) -> Result<f64, TwoStageError> {
        let r = self.initial_radicand();
        if r < 0.0 {
            return Err(TwoStageError::AtEquilibrium { radicand: r });
        }
        Ok(self.cd * r.sqrt())
    }

    /// Deceleration of the stage-one outflow for a given gas volume, m/s^2.
    fn decay_at(&self, gas_volume: Option<f64>) -> f64 {
        let s = self.scenario;
        let ratio = s.breach.area / s.tank.free_surface_area;
        let gas = match (s.tank.ullage, gas_volume) {
            (
                Ullage::Sealed {
                    initial_gas_pressure,
                    initial_gas_volume,
                },
                Some(v),
            ) => {
                initial_gas_pressure * initial_gas_volume / (v * v) * s.breach.area
                    / s.oil.density_oil
            }
            _ => 0.0,
        };
        (s.environment.gravity * ratio + gas) * self.cd * self.cd
    }

    fn initial_gas_volume(&self) -> Option<f64> {
        match self.scenario.tank.ullage {
            Ullage::Sealed {
                initial_gas_volume, ..
            } => Some(initial_gas_volume),
            Ullage::Vented => None,
        }
    }

    /// Slope of the straight-line stage-one decay, m/s^2.
    pub fn decay_coefficient(&self) -> f64 {
        self.decay_at(self.initial_gas_volume())
    }

    /// Stage-one outflow velocity, never negative.
    pub fn phase1_velocity(&self, t: f64) -> Result<f64, TwoStageError> {
        let u0 = self.initial_velocity()?;
        Ok((u0 - self.decay_coefficient() * t).max(0.0))
    }

    /// Time at which the stage-one velocity reaches zero.
    pub fn phase1_duration(&self) -> Result<f64, TwoStageError> {
        let u0 = self.initial_velocity()?;
        let k = self.decay_coefficient();
        if !(k > 0.0) {
            return Err(TwoStageError::DegenerateDecay(k));
        }
        Ok(u0 / k)
    }

    /// Signed stage-two velocity `t2` seconds into stage two.
    pub fn phase2_velocity(&self, t2: f64, forcing: &WaveForcing) -> f64 {
        let s = self.scenario;
        let phase = wave_sine((t2 / forcing.period).rem_euclid(1.0));
        let magnitude = self.cd
            * (2.0
                * forcing.amplitude
                * s.environment.gravity
                * self.density_ratio()
                * phase.abs())
            .sqrt();
        if phase < 0.0 {
            -magnitude
        } else {
            magnitude
        }
    }

    fn state(
        &self,
        phase: Phase,
        velocity: f64,
        elapsed: f64,
        oil_out: f64,
        water: f64,
    ) -> TwoStageState {
        let s = self.scenario;
        let a_t = s.tank.free_surface_area;
        let level = s.tank.initial_liquid_level - oil_out / a_t + water / a_t;
        let gas_volume = self.initial_gas_volume().map(|v| v + oil_out - water);
        let gas_pressure = match (s.tank.ullage, gas_volume) {
            (
                Ullage::Sealed {
                    initial_gas_pressure,
                    initial_gas_volume,
                },
                Some(v),
            ) => initial_gas_pressure * initial_gas_volume / v,
            _ => s.tank.initial_ullage_pressure,
        };
        TwoStageState {
            phase,
            velocity,
            elapsed_in_phase: elapsed,
            gas_pressure,
            gas_volume,
            liquid_level: level,
            hole_pressure: gas_pressure
                + s.oil.density_oil
                    * s.environment.gravity
                    * (level - s.breach.height_above_keel).max(0.0),
            water_inside: water,
        }
    }
}

/// Output of [`simulate_two_stage`].
#[derive(Debug, Clone)]
pub struct TwoStageRun {
    pub series: LeakTimeSeries,
    pub initial_velocity: f64,
    pub phase1_duration: f64,
    pub forcing: WaveForcing,
    pub final_state: TwoStageState,
}

/// Runs stage one to its end and stage two until `t_end`.
///
/// Volumes are trapezoidal integrals of `u_B A_B` (the velocity already
/// contains `C_D`). Stage one samples every `dt` plus the exact end time.
/// In stage two only outflow counts as spilled oil, and only until settled
/// ingress water covers the hole; after that both directions carry water.
pub fn simulate_two_stage(
    s: &Scenario,
    discharge_coefficient: f64,
    dt: f64,
    t_end: f64,
    coefficient: DecayCoefficient,
) -> Result<TwoStageRun, TwoStageError> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(TwoStageError::InvalidInput(
            "dt and t_end must be > 0".into(),
        ));
    }
    let model = TwoStageModel::new(s, discharge_coefficient)?;
    let rho = s.oil.density_oil;
    let area_b = s.breach.area;
    let a_t = s.tank.free_surface_area;
    let oil_volume = s.tank.initial_oil_volume();
    let forcing = scenario_forcing(s);
    let mut series = LeakTimeSeries::default();

    // Stage one.
    let u0 = match model.initial_velocity() {
        Ok(u) => u,
        Err(TwoStageError::AtEquilibrium { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    let mut oil_out = 0.0;
    let mut t_star = 0.0;
    if u0 > 0.0 {
        match coefficient {
            DecayCoefficient::Frozen => {
                t_star = model.phase1_duration()?;
                let k = model.decay_coefficient();
                let steps = (t_star / dt).ceil() as usize;
                let mut prev = (0.0, u0);
                series.push(0.0, u0, rho * u0 * area_b, 0.0, rho, "phase1");
                for i in 1..=steps {
                    let t = (i as f64 * dt).min(t_star);
                    let u = if i == steps {
                        0.0
                    } else {
                        (u0 - k * t).max(0.0)
                    };
                    oil_out += 0.5 * (prev.1 + u) * (t - prev.0) * area_b;
                    series.push(t, u, rho * u * area_b, oil_out, rho, "phase1");
                    prev = (t, u);
                }
            }
            DecayCoefficient::Reevaluated => {
                let mut t = 0.0;
                let mut u = u0;
                series.push(0.0, u0, rho * u0 * area_b, 0.0, rho, "phase1");
                loop {
                    let gas = model.initial_gas_volume().map(|v| v + oil_out);
                    let k = model.decay_at(gas);
                    if !(k > 0.0) {
                        return Err(TwoStageError::DegenerateDecay(k));
                    }
                    let (step, next) = if u - k * dt <= 0.0 {
                        (u / k, 0.0)
                    } else {
                        (dt, u - k * dt)
                    };
                    oil_out += 0.5 * (u + next) * step * area_b;
                    t += step;
                    u = next;
                    series.push(t, u, rho * u * area_b, oil_out, rho, "phase1");
                    if u == 0.0 {
                        break;
                    }
                }
                t_star = t;
            }
        }
    }

    // Stage two.
    let mut water = 0.0;
    let mut spilled = oil_out;
    let hole = s.breach.height_above_keel;
    let mut t = t_star;
    let mut u_prev = model.phase2_velocity(0.0, &forcing);
    if series.is_empty() {
        series.push(
            0.0,
            u_prev,
            rho * u_prev.max(0.0) * area_b,
            0.0,
            rho,
            "phase2",
        );
    }
    let mut k = 1usize;
    while t < t_end {
        let t_next = (t_star + k as f64 * dt).min(t_end);
        let u = model.phase2_velocity(t_next - t_star, &forcing);
        let h = t_next - t;
        let outflow = 0.5 * (u_prev.max(0.0) + u.max(0.0)) * h * area_b;
        let inflow = 0.5 * ((-u_prev).max(0.0) + (-u).max(0.0)) * h * area_b;
        let oil_at_hole = water / a_t < hole && spilled < oil_volume;
        if oil_at_hole {
            spilled = (spilled + outflow).min(oil_volume);
            water += inflow;
        } else {
            water += inflow - outflow;
        }
        let rate = if oil_at_hole {
            rho * u.max(0.0) * area_b
        } else {
            0.0
        };
        series.push(t_next, u, rate, spilled, rho, "phase2");
        u_prev = u;
        t = t_next;
        k += 1;
    }

    let final_phase = if t >= t_end { Phase::Two } else { Phase::Done };
    let final_state = model.state(final_phase, u_prev, t - t_star, spilled, water);
    Ok(TwoStageRun {
        series,
        initial_velocity: u0,
        phase1_duration: t_star,
        forcing,
        final_state,
    })
}
