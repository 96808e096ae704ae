//! Spill-quantity estimators that ignore the leak dynamics, and the reduction
//! of a computed leak history to the instantaneous or constant-rate source
//! term consumed by drift models.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io;

use crate::error::EstimateError;
use crate::series::LeakTimeSeries;

pub const KG_PER_TONNE: f64 = 1000.0;

/// Spilled oil from bunker inventory records, in tonnes: stock before the
/// casualty minus consumption since the record minus what remains aboard.
pub fn inventory_balance(
    total_stock_before: f64,
    consumed_since_record: f64,
    remaining_after: f64,
) -> Result<f64, EstimateError> {
    for (name, v) in [
        ("total_stock_before", total_stock_before),
        ("consumed_since_record", consumed_since_record),
        ("remaining_after", remaining_after),
    ] {
        if !(v >= 0.0) {
            return Err(EstimateError::InvalidInput(format!("{name} must be >= 0")));
        }
    }
    let spilled = total_stock_before - consumed_since_record - remaining_after;
    if spilled < 0.0 {
        return Err(EstimateError::InconsistentInventory {
            stock: total_stock_before,
            consumed: consumed_since_record,
            remaining: remaining_after,
        });
    }
    Ok(spilled)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Appearance {
    Thickness(f64),
    Code(String),
}

/// One colour region of an observed slick.
#[derive(Debug, Clone, PartialEq)]
pub struct FilmObservation {
    pub area: f64,
    pub appearance: Appearance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThicknessClass {
    /// Thickness used in volume estimates, m.
    pub representative: f64,
    pub min: f64,
    pub max: f64,
}

/// Appearance code to film thickness lookup.
///
/// The default table follows the Bonn Agreement Oil Appearance Code ranges
/// (sheen 0.04-0.3 um, rainbow 0.3-5 um, metallic 5-50 um, discontinuous true
/// colour 50-200 um, continuous true colour > 200 um). The representative
/// value is the range midpoint, except for continuous true colour which has
/// no upper bound and uses its lower bound. These are implementation
/// defaults; load a replacement with [`ThicknessTable::from_toml_str`] or
/// adjust entries with [`ThicknessTable::set`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessTable {
    classes: BTreeMap<String, ThicknessClass>,
}

impl Default for ThicknessTable {
    fn default() -> Self {
        let mut t = Self {
            classes: BTreeMap::new(),
        };
        let class = |min: f64, max: f64, representative: f64| ThicknessClass {
            representative,
            min,
            max,
        };
        let sheen = class(0.04e-6, 0.30e-6, 0.17e-6);
        for code in ["sheen", "silver", "sheen/silver"] {
            t.set(code, sheen);
        }
        t.set("rainbow", class(0.30e-6, 5.0e-6, 2.65e-6));
        t.set("metallic", class(5.0e-6, 50.0e-6, 27.5e-6));
        t.set(
            "discontinuous_true_colour",
            class(50.0e-6, 200.0e-6, 125.0e-6),
        );
        t.set(
            "continuous_true_colour",
            class(200.0e-6, f64::INFINITY, 200.0e-6),
        );
        t
    }
}

impl ThicknessTable {
    fn key(code: &str) -> String {
        code.trim().to_ascii_lowercase()
    }

    pub fn set(&mut self, code: &str, class: ThicknessClass) {
        self.classes.insert(Self::key(code), class);
    }

    pub fn lookup(&self, code: &str) -> Result<ThicknessClass, EstimateError> {
        self.classes
            .get(&Self::key(code))
            .copied()
            .ok_or_else(|| EstimateError::UnknownAppearance(code.to_string()))
    }

    /// Replaces or extends the default table with `[classes.<code>]` entries.
    pub fn from_toml_str(text: &str) -> Result<Self, EstimateError> {
        #[derive(Deserialize)]
        struct Doc {
            classes: BTreeMap<String, ThicknessClass>,
        }
        let doc: Doc =
            toml::from_str(text).map_err(|e| EstimateError::InvalidInput(e.to_string()))?;
        let mut t = Self::default();
        for (code, class) in doc.classes {
            t.set(&code, class);
        }
        Ok(t)
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }
}

pub fn thickness_from_appearance(table: &ThicknessTable, code: &str) -> Result<f64, EstimateError> {
    Ok(table.lookup(code)?.representative)
}

/// Oil mass on the water from slick areas and their thicknesses, kg.
pub fn film_volume(
    observations: &[FilmObservation],
    density_oil: f64,
    table: &ThicknessTable,
) -> Result<f64, EstimateError> {
    if observations.is_empty() {
        return Err(EstimateError::InvalidInput(
            "at least one film observation is required".into(),
        ));
    }
    if !(density_oil > 0.0) {
        return Err(EstimateError::InvalidInput(
            "density_oil must be > 0".into(),
        ));
    }
    let mut total = 0.0;
    for obs in observations {
        let thickness = match &obs.appearance {
            Appearance::Thickness(h) => *h,
            Appearance::Code(code) => thickness_from_appearance(table, code)?,
        };
        if !(obs.area >= 0.0) || !(thickness >= 0.0) {
            return Err(EstimateError::InvalidInput(
                "film area and thickness must be >= 0".into(),
            ));
        }
        total += obs.area * thickness * density_oil;
    }
    Ok(total)
}

/// Reads `area_m2, appearance_or_thickness_m` rows. The second column is a
/// thickness in metres when numeric and an appearance code otherwise.
pub fn read_film_csv<R: io::Read>(reader: R) -> Result<Vec<FilmObservation>, EstimateError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| EstimateError::InvalidInput(e.to_string()))?;
        let row = i + 2;
        if rec.len() != 2 {
            return Err(EstimateError::InvalidInput(format!(
                "row {row}: expected 2 columns, found {}",
                rec.len()
            )));
        }
        let area: f64 = rec[0].parse().map_err(|_| {
            EstimateError::InvalidInput(format!("row {row}: bad area `{}`", &rec[0]))
        })?;
        let appearance = match rec[1].parse::<f64>() {
            Ok(h) => Appearance::Thickness(h),
            Err(_) => Appearance::Code(rec[1].to_string()),
        };
        out.push(FilmObservation { area, appearance });
    }
    Ok(out)
}

/// Spilled mass from a measured outflow velocity held for `duration`, kg.
pub fn optical_flux(
    breach_area: f64,
    mean_velocity: f64,
    density_oil: f64,
    duration: f64,
) -> Result<f64, EstimateError> {
    if [breach_area, mean_velocity, density_oil, duration]
        .iter()
        .any(|v| !(*v >= 0.0))
    {
        return Err(EstimateError::InvalidInput(
            "optical estimate inputs must be >= 0".into(),
        ));
    }
    Ok(breach_area * mean_velocity * density_oil * duration)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReleaseMode {
    Instantaneous,
    ContinuousConstant,
}

/// Release description handed to drift models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceTerm {
    pub mode: ReleaseMode,
    pub total_mass: f64,
    /// kg/s; continuous releases only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// s; continuous releases only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    pub start_time: f64,
}

/// Collapses a leak history into a single release.
///
/// The instantaneous form puts the final cumulative mass at the first sample
/// time. The constant-rate form spreads it evenly between the first and the
/// last sample at which the cumulative mass changes.
pub fn reduce_to_source_term(
    series: &LeakTimeSeries,
    mode: ReleaseMode,
) -> Result<SourceTerm, EstimateError> {
    if series.is_empty() {
        return Err(EstimateError::InvalidInput("series is empty".into()));
    }
    let m = &series.cumulative_mass;
    if m.windows(2).any(|w| w[1] < w[0]) {
        return Err(EstimateError::InvalidInput(
            "cumulative mass must be non-decreasing".into(),
        ));
    }
    let total_mass = series.final_mass();
    match mode {
        ReleaseMode::Instantaneous => Ok(SourceTerm {
            mode,
            total_mass,
            rate: None,
            duration: None,
            start_time: series.times[0],
        }),
        ReleaseMode::ContinuousConstant => {
            // Interval [i-1, i] carries flow when the mass increases across it.
            let first = (1..m.len()).find(|&i| m[i] > m[i - 1]);
            let last = (1..m.len()).rev().find(|&i| m[i] > m[i - 1]);
            let (Some(first), Some(last)) = (first, last) else {
                return Err(EstimateError::NoFlow);
            };
            let start_time = series.times[first - 1];
            let duration = series.times[last] - start_time;
            if !(duration > 0.0) {
                return Err(EstimateError::ZeroDuration);
            }
            Ok(SourceTerm {
                mode,
                total_mass,
                rate: Some(total_mass / duration),
                duration: Some(duration),
                start_time,
            })
        }
    }
}
