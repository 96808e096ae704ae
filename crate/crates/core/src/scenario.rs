//! Physical description of a breached tank: oil, tank, breach, and sea state.
//!
//! A [`Scenario`] is the single input shared by every model in the crate. It is
//! read from a TOML document whose keys mirror the field names below:
//!
//! ```toml
//! label = "torricelli-demo"
//!
//! [oil]
//! density_oil = 900.0          # kg/m^3
//! dynamic_viscosity = 0.02     # Pa s (CFD only)
//! vapor_pressure = 1000.0      # Pa (regime classification only)
//!
//! [tank]
//! free_surface_area = 100.0    # m^2
//! tank_height = 6.0            # m
//! initial_liquid_level = 4.5   # m above tank bottom
//! initial_ullage_pressure = 101325.0
//! ullage = { kind = "vented" } # or { kind = "sealed", initial_gas_pressure = .., initial_gas_volume = .. }
//!
//! [breach]
//! area = 0.01                  # m^2
//! height_above_keel = 0.5      # m, hole centreline
//! position = "above_waterline" # or "below_waterline"
//! discharge_coefficient = 0.61 # omit to derive from the flow regime
//!
//! [environment]
//! density_water = 1025.0
//! draft = 0.3                  # waterline height above keel, m
//! atmospheric_pressure = 101325.0
//! gravity = 9.81
//! wind_speed = 10.0            # knots
//! nearshore = false
//! wave_override = { amplitude = 0.6, period = 2.78 }
//! ```
//!
//! The tank bottom is taken to coincide with the keel, so liquid levels and
//! breach heights share one vertical datum. `draft` is the waterline height
//! above the keel; `draft - height_above_keel` is the sea-water head on a
//! submerged breach.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::ScenarioError;

pub const DEFAULT_GRAVITY: f64 = 9.81;
pub const DEFAULT_ATMOSPHERIC_PRESSURE: f64 = 101_325.0;
pub const DEFAULT_WATER_DENSITY: f64 = 1025.0;
/// Used when a document omits the oil viscosity. Medium crude, Pa s.
pub const DEFAULT_OIL_VISCOSITY: f64 = 0.02;
/// Used when a document omits the oil vapour pressure, Pa.
pub const DEFAULT_VAPOR_PRESSURE: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OilProperties {
    pub density_oil: f64,
    pub dynamic_viscosity: f64,
    pub vapor_pressure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ullage {
    /// Gas space open to the atmosphere.
    Vented,
    /// Closed gas space that expands isothermally as liquid leaves.
    Sealed {
        initial_gas_pressure: f64,
        initial_gas_volume: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TankGeometry {
    /// Liquid free-surface (gas/liquid interface) area, m^2.
    pub free_surface_area: f64,
    pub tank_height: f64,
    /// Liquid level above the tank bottom, m.
    pub initial_liquid_level: f64,
    pub ullage: Ullage,
    /// Pressure above the liquid for a vented tank, Pa.
    pub initial_ullage_pressure: f64,
}

impl TankGeometry {
    /// Gas pressure above the liquid at t = 0.
    pub fn initial_top_pressure(&self) -> f64 {
        match self.ullage {
            Ullage::Vented => self.initial_ullage_pressure,
            Ullage::Sealed {
                initial_gas_pressure,
                ..
            } => initial_gas_pressure,
        }
    }

    /// Ullage pressure once the level has fallen from its initial value to
    /// `level`. Sealed gas follows the isothermal law `P V = const`.
    pub fn top_pressure_at_level(&self, level: f64) -> f64 {
        match self.ullage {
            Ullage::Vented => self.initial_ullage_pressure,
            Ullage::Sealed {
                initial_gas_pressure,
                initial_gas_volume,
            } => {
                let volume = initial_gas_volume
                    + self.free_surface_area * (self.initial_liquid_level - level);
                initial_gas_pressure * initial_gas_volume / volume
            }
        }
    }

    pub fn initial_oil_volume(&self) -> f64 {
        self.free_surface_area * self.initial_liquid_level
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreachPosition {
    AboveWaterline,
    BelowWaterline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Breach {
    pub area: f64,
    pub height_above_keel: f64,
    pub position: BreachPosition,
    /// `None` means the coefficient is derived from the orifice flow regime.
    pub discharge_coefficient: Option<f64>,
    /// Breach geometry that tends to detach the jet (hydraulic flip).
    pub flip_prone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveOverride {
    pub amplitude: f64,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub density_water: f64,
    pub draft: f64,
    pub atmospheric_pressure: f64,
    pub gravity: f64,
    /// Knots.
    pub wind_speed: f64,
    pub wave_override: Option<WaveOverride>,
    pub nearshore: bool,
}

impl Environment {
    /// Static pressure outside a hull opening at `height_above_keel`.
    pub fn outside_pressure(&self, height_above_keel: f64) -> f64 {
        let depth = (self.draft - height_above_keel).max(0.0);
        self.atmospheric_pressure + self.density_water * self.gravity * depth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub oil: OilProperties,
    pub tank: TankGeometry,
    pub breach: Breach,
    pub environment: Environment,
}

/// One broken rule, naming the field and the rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_toml_str(source: &str) -> Result<Self, ScenarioError> {
        let doc: ScenarioDoc = toml::from_str(source).map_err(|e| ScenarioError::Parse {
            location: describe_location(source, &e),
            message: e.message().to_string(),
        })?;
        let scenario = doc.into_scenario();
        let violations = scenario.validate();
        if violations.is_empty() {
            Ok(scenario)
        } else {
            Err(ScenarioError::Invalid(violations))
        }
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Writes every field explicitly, so that loading the output yields an
    /// identical scenario.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(&ScenarioDoc::from(self)).expect("scenario documents always serialize")
    }

    /// Lists every broken invariant; empty when the scenario is usable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut check = |ok: bool, field: &str, rule: &str| {
            if !ok {
                out.push(Violation {
                    field: field.to_string(),
                    rule: rule.to_string(),
                });
            }
        };
        let (oil, tank, breach, env) = (&self.oil, &self.tank, &self.breach, &self.environment);

        check(oil.density_oil > 0.0, "oil.density_oil", "density_oil > 0");
        check(
            !(oil.density_oil > 0.0 && env.density_water > 0.0)
                || oil.density_oil < env.density_water,
            "oil.density_oil",
            "density_oil < density_water",
        );
        check(
            oil.dynamic_viscosity >= 0.0,
            "oil.dynamic_viscosity",
            "dynamic_viscosity >= 0",
        );

        check(
            tank.free_surface_area > 0.0,
            "tank.free_surface_area",
            "free_surface_area > 0",
        );
        check(
            tank.initial_liquid_level >= 0.0,
            "tank.initial_liquid_level",
            "initial_liquid_level >= 0",
        );
        check(
            tank.initial_liquid_level <= tank.tank_height,
            "tank.initial_liquid_level",
            "initial_liquid_level <= tank_height",
        );
        if let Ullage::Sealed {
            initial_gas_pressure,
            initial_gas_volume,
        } = tank.ullage
        {
            check(
                initial_gas_volume > 0.0,
                "tank.ullage.initial_gas_volume",
                "sealed requires initial_gas_volume > 0",
            );
            check(
                initial_gas_pressure > 0.0,
                "tank.ullage.initial_gas_pressure",
                "sealed requires initial_gas_pressure > 0",
            );
        }

        check(breach.area > 0.0, "breach.area", "area > 0");
        if let Some(cd) = breach.discharge_coefficient {
            check(
                cd > 0.0 && cd <= 1.0,
                "breach.discharge_coefficient",
                "discharge_coefficient ∈ (0,1]",
            );
        }
        match breach.position {
            BreachPosition::AboveWaterline => check(
                breach.height_above_keel >= env.draft,
                "breach.position",
                "above_waterline requires height_above_keel >= draft",
            ),
            BreachPosition::BelowWaterline => check(
                breach.height_above_keel < env.draft,
                "breach.position",
                "below_waterline requires height_above_keel < draft",
            ),
        }

        check(
            env.density_water > 0.0,
            "environment.density_water",
            "density_water > 0",
        );
        check(env.draft >= 0.0, "environment.draft", "draft >= 0");
        check(env.gravity > 0.0, "environment.gravity", "gravity > 0");
        if let Some(w) = env.wave_override {
            check(
                w.amplitude > 0.0,
                "environment.wave_override.amplitude",
                "wave_override amplitude > 0",
            );
            check(
                w.period > 0.0,
                "environment.wave_override.period",
                "wave_override period > 0",
            );
        }
        out
    }

    /// Liquid head above the breach centreline at t = 0.
    pub fn initial_head(&self) -> f64 {
        self.tank.initial_liquid_level - self.breach.height_above_keel
    }
}

fn describe_location(source: &str, err: &toml::de::Error) -> String {
    match err.span() {
        Some(span) => {
            let before = &source[..span.start.min(source.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
            format!("line {line}, column {column}")
        }
        None => "unknown location".to_string(),
    }
}

// On-disk layout. Optional keys take the documented defaults.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    #[serde(default)]
    label: String,
    oil: OilDoc,
    tank: TankDoc,
    breach: BreachDoc,
    #[serde(default)]
    environment: EnvironmentDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OilDoc {
    density_oil: f64,
    #[serde(default = "default_viscosity")]
    dynamic_viscosity: f64,
    #[serde(default = "default_vapor_pressure")]
    vapor_pressure: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TankDoc {
    free_surface_area: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tank_height: Option<f64>,
    initial_liquid_level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_ullage_pressure: Option<f64>,
    #[serde(default = "default_ullage")]
    ullage: Ullage,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BreachDoc {
    area: f64,
    height_above_keel: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<BreachPosition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    discharge_coefficient: Option<f64>,
    #[serde(default)]
    flip_prone: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvironmentDoc {
    #[serde(default = "default_water_density")]
    density_water: f64,
    #[serde(default)]
    draft: f64,
    #[serde(default = "default_atmospheric")]
    atmospheric_pressure: f64,
    #[serde(default = "default_gravity")]
    gravity: f64,
    #[serde(default)]
    wind_speed: f64,
    #[serde(default)]
    nearshore: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    wave_override: Option<WaveOverride>,
}

impl Default for EnvironmentDoc {
    fn default() -> Self {
        Self {
            density_water: DEFAULT_WATER_DENSITY,
            draft: 0.0,
            atmospheric_pressure: DEFAULT_ATMOSPHERIC_PRESSURE,
            gravity: DEFAULT_GRAVITY,
            wind_speed: 0.0,
            nearshore: false,
            wave_override: None,
        }
    }
}

fn default_viscosity() -> f64 {
    DEFAULT_OIL_VISCOSITY
}
fn default_vapor_pressure() -> f64 {
    DEFAULT_VAPOR_PRESSURE
}
fn default_ullage() -> Ullage {
    Ullage::Vented
}
fn default_water_density() -> f64 {
    DEFAULT_WATER_DENSITY
}
fn default_atmospheric() -> f64 {
    DEFAULT_ATMOSPHERIC_PRESSURE
}
fn default_gravity() -> f64 {
    DEFAULT_GRAVITY
}

impl ScenarioDoc {
    fn into_scenario(self) -> Scenario {
        let env = self.environment;
        let position =
            self.breach
                .position
                .unwrap_or(if self.breach.height_above_keel >= env.draft {
                    BreachPosition::AboveWaterline
                } else {
                    BreachPosition::BelowWaterline
                });
        Scenario {
            label: self.label,
            oil: OilProperties {
                density_oil: self.oil.density_oil,
                dynamic_viscosity: self.oil.dynamic_viscosity,
                vapor_pressure: self.oil.vapor_pressure,
            },
            tank: TankGeometry {
                free_surface_area: self.tank.free_surface_area,
                tank_height: self
                    .tank
                    .tank_height
                    .unwrap_or(self.tank.initial_liquid_level),
                initial_liquid_level: self.tank.initial_liquid_level,
                ullage: self.tank.ullage,
                initial_ullage_pressure: self
                    .tank
                    .initial_ullage_pressure
                    .unwrap_or(env.atmospheric_pressure),
            },
            breach: Breach {
                area: self.breach.area,
                height_above_keel: self.breach.height_above_keel,
                position,
                discharge_coefficient: self.breach.discharge_coefficient,
                flip_prone: self.breach.flip_prone,
            },
            environment: Environment {
                density_water: env.density_water,
                draft: env.draft,
                atmospheric_pressure: env.atmospheric_pressure,
                gravity: env.gravity,
                wind_speed: env.wind_speed,
                wave_override: env.wave_override,
                nearshore: env.nearshore,
            },
        }
    }
}

impl From<&Scenario> for ScenarioDoc {
    fn from(s: &Scenario) -> Self {
        ScenarioDoc {
            label: s.label.clone(),
            oil: OilDoc {
                density_oil: s.oil.density_oil,
                dynamic_viscosity: s.oil.dynamic_viscosity,
                vapor_pressure: s.oil.vapor_pressure,
            },
            tank: TankDoc {
                free_surface_area: s.tank.free_surface_area,
                tank_height: Some(s.tank.tank_height),
                initial_liquid_level: s.tank.initial_liquid_level,
                initial_ullage_pressure: Some(s.tank.initial_ullage_pressure),
                ullage: s.tank.ullage,
            },
            breach: BreachDoc {
                area: s.breach.area,
                height_above_keel: s.breach.height_above_keel,
                position: Some(s.breach.position),
                discharge_coefficient: s.breach.discharge_coefficient,
                flip_prone: s.breach.flip_prone,
            },
            environment: EnvironmentDoc {
                density_water: s.environment.density_water,
                draft: s.environment.draft,
                atmospheric_pressure: s.environment.atmospheric_pressure,
                gravity: s.environment.gravity,
                wind_speed: s.environment.wind_speed,
                nearshore: s.environment.nearshore,
                wave_override: s.environment.wave_override,
            },
        }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = r#"
[oil]
density_oil = 900.0
[tank]
free_surface_area = 100.0
initial_liquid_level = 4.0
[breach]
area = 0.01
height_above_keel = 1.0
"#;

    #[test]
    fn minimal_document_takes_defaults() {
        let s = Scenario::from_toml_str(MINIMAL).unwrap();
        assert_eq!(s.environment.gravity, 9.81);
        assert_eq!(s.environment.atmospheric_pressure, 101_325.0);
        assert_eq!(s.environment.density_water, 1025.0);
        assert_eq!(s.tank.tank_height, 4.0);
        assert_eq!(s.tank.ullage, Ullage::Vented);
        assert_eq!(s.tank.initial_ullage_pressure, 101_325.0);
        assert_eq!(s.breach.position, BreachPosition::AboveWaterline);
        assert_eq!(s.breach.discharge_coefficient, None);
    }

    #[test]
    fn discharge_coefficient_out_of_range_is_reported() {
        let doc = MINIMAL.replace(
            "height_above_keel = 1.0",
            "height_above_keel = 1.0\ndischarge_coefficient = 1.5",
        );
        match Scenario::from_toml_str(&doc) {
            Err(ScenarioError::Invalid(v)) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].rule, "discharge_coefficient ∈ (0,1]");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn above_waterline_below_draft_is_cross_invariant_error() {
        let doc = format!("{MINIMAL}position = \"above_waterline\"\n[environment]\ndraft = 3.0\n");
        let err = Scenario::from_toml_str(&doc).unwrap_err();
        let ScenarioError::Invalid(v) = err else {
            panic!("expected validation error")
        };
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "breach.position");
    }

    #[test]
    fn parse_error_carries_location() {
        let doc = MINIMAL.replace("area = 0.01", "area = \"big\"");
        let err = Scenario::from_toml_str(&doc).unwrap_err();
        let ScenarioError::Parse { location, .. } = &err else {
            panic!("expected parse error, got {err:?}")
        };
        assert!(location.starts_with("line 8"), "{location}");
    }

    #[test]
    fn every_violation_is_listed() {
        let mut s = torricelli();
        s.oil.density_oil = 1100.0;
        s.breach.area = 0.0;
        s.environment.gravity = 0.0;
        let v = s.validate();
        assert_eq!(v.len(), 3, "{v:?}");
    }

    #[test]
    fn validate_examples() {
        assert!(torricelli().validate().is_empty());
        assert!(submerged(true).validate().is_empty());

        let mut heavy = torricelli();
        heavy.oil.density_oil = 1100.0;
        let rules: Vec<_> = heavy.validate().into_iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec!["density_oil < density_water"]);

        let mut s = submerged(true);
        s.tank.ullage = Ullage::Sealed {
            initial_gas_pressure: 101_325.0,
            initial_gas_volume: 0.0,
        };
        let rules: Vec<_> = s.validate().into_iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec!["sealed requires initial_gas_volume > 0"]);
    }

    /// One counterexample per rule; each must be caught on its own.
    #[test]
    fn each_rule_is_caught_individually() {
        type Mutator = fn(&mut Scenario);
        let cases: &[(&str, Mutator)] = &[
            ("density_oil > 0", |s| s.oil.density_oil = -1.0),
            ("density_oil < density_water", |s| {
                s.oil.density_oil = 1030.0
            }),
            ("dynamic_viscosity >= 0", |s| s.oil.dynamic_viscosity = -0.1),
            ("free_surface_area > 0", |s| s.tank.free_surface_area = 0.0),
            ("initial_liquid_level >= 0", |s| {
                s.tank.initial_liquid_level = -0.1;
                s.breach.height_above_keel = 0.5;
            }),
            ("initial_liquid_level <= tank_height", |s| {
                s.tank.initial_liquid_level = 7.0
            }),
            ("sealed requires initial_gas_volume > 0", |s| {
                s.tank.ullage = Ullage::Sealed {
                    initial_gas_pressure: 1e5,
                    initial_gas_volume: 0.0,
                }
            }),
            ("sealed requires initial_gas_pressure > 0", |s| {
                s.tank.ullage = Ullage::Sealed {
                    initial_gas_pressure: 0.0,
                    initial_gas_volume: 1.0,
                }
            }),
            ("area > 0", |s| s.breach.area = -0.01),
            ("discharge_coefficient ∈ (0,1]", |s| {
                s.breach.discharge_coefficient = Some(0.0)
            }),
            ("above_waterline requires height_above_keel >= draft", |s| {
                s.environment.draft = 1.0
            }),
            ("below_waterline requires height_above_keel < draft", |s| {
                s.breach.position = BreachPosition::BelowWaterline
            }),
            ("density_water > 0", |s| s.environment.density_water = 0.0),
            ("draft >= 0", |s| s.environment.draft = -1.0),
            ("gravity > 0", |s| s.environment.gravity = 0.0),
            ("wave_override amplitude > 0", |s| {
                s.environment.wave_override = Some(WaveOverride {
                    amplitude: 0.0,
                    period: 1.0,
                })
            }),
            ("wave_override period > 0", |s| {
                s.environment.wave_override = Some(WaveOverride {
                    amplitude: 0.1,
                    period: -1.0,
                })
            }),
        ];
        for (rule, mutate) in cases {
            let mut s = torricelli();
            mutate(&mut s);
            let rules: Vec<_> = s.validate().into_iter().map(|v| v.rule).collect();
            assert!(
                rules.iter().any(|r| r == rule),
                "{rule} not caught: {rules:?}"
            );
        }
    }

    #[test]
    fn sealed_gas_expands_isothermally() {
        let s = submerged(true);
        // 0.1 m drop over 100 m^2 adds 10 m^3 of gas to 20 m^3.
        let p = s.tank.top_pressure_at_level(7.9);
        assert!((p - 101_325.0 * 20.0 / 30.0).abs() < 1e-9);
    }

    fn arb_scenario() -> impl Strategy<Value = Scenario> {
        (
            (500.0..1000.0f64, 0.0..1.0f64, 0.0..1e5f64),
            (
                0.1..1e3f64,
                0.1..20.0f64,
                0.0..1.0f64,
                any::<bool>(),
                1e4..2e5f64,
                0.1..100.0f64,
            ),
            (
                1e-4..1.0f64,
                0.0..1.0f64,
                prop::option::of(0.05..1.0f64),
                any::<bool>(),
            ),
            (
                0.0..20.0f64,
                0.0..30.0f64,
                prop::option::of((0.01..2.0f64, 0.5..10.0f64)),
                any::<bool>(),
            ),
            "[a-z0-9 _-]{0,12}",
        )
            .prop_map(|(oil, tank, breach, env, label)| {
                let tank_height = tank.1;
                let level = tank.2 * tank_height;
                let draft = env.0;
                let height_above_keel = breach.1 * tank_height;
                Scenario {
                    label,
                    oil: OilProperties {
                        density_oil: oil.0,
                        dynamic_viscosity: oil.1,
                        vapor_pressure: oil.2,
                    },
                    tank: TankGeometry {
                        free_surface_area: tank.0,
                        tank_height,
                        initial_liquid_level: level,
                        ullage: if tank.3 {
                            Ullage::Sealed {
                                initial_gas_pressure: tank.4,
                                initial_gas_volume: tank.5,
                            }
                        } else {
                            Ullage::Vented
                        },
                        initial_ullage_pressure: tank.4,
                    },
                    breach: Breach {
                        area: breach.0,
                        height_above_keel,
                        position: if height_above_keel >= draft {
                            BreachPosition::AboveWaterline
                        } else {
                            BreachPosition::BelowWaterline
                        },
                        discharge_coefficient: breach.2,
                        flip_prone: breach.3,
                    },
                    environment: Environment {
                        density_water: 1025.0,
                        draft,
                        atmospheric_pressure: 101_325.0,
                        gravity: 9.81,
                        wind_speed: env.1,
                        wave_override: env
                            .2
                            .map(|(amplitude, period)| WaveOverride { amplitude, period }),
                        nearshore: env.3,
                    },
                }
            })
    }

    proptest! {
        #[test]
        fn serialize_then_load_is_identity(s in arb_scenario()) {
            prop_assert!(s.validate().is_empty());
            let text = s.to_toml_string();
            let back = Scenario::from_toml_str(&text).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
