use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::RunResult;
use crate::error::HarnessError;
use crate::estimators::{reduce_to_source_term, ReleaseMode, SourceTerm};
use crate::series::LeakTimeSeries;

pub const SERIES_FILE: &str = "series.csv";
pub const SUMMARY_FILE: &str = "summary.toml";
pub const SNAPSHOT_DIR: &str = "snapshots";

/// Relative tolerance of the audit comparisons.
const AUDIT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub samples: usize,
    pub duration_s: f64,
    pub final_mass_kg: f64,
    pub final_volume_m3: f64,
    pub peak_rate_kgps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t50_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t90_s: Option<f64>,
}

impl Totals {
    pub fn from_series(series: &LeakTimeSeries) -> Self {
        Self {
            samples: series.len(),
            duration_s: match (series.times.first(), series.times.last()) {
                (Some(a), Some(b)) => b - a,
                _ => 0.0,
            },
            final_mass_kg: series.final_mass(),
            final_volume_m3: series.final_volume(),
            peak_rate_kgps: series.peak_rate(),
            t50_s: series.time_to_fraction(0.5),
            t90_s: series.time_to_fraction(0.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceTerms {
    pub instantaneous: SourceTerm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuous: Option<SourceTerm>,
}

/// Contents of `summary.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub label: String,
    pub model: String,
    pub density_oil: f64,
    pub runtime_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase1_duration_s: Option<f64>,
    #[serde(default)]
    pub snapshots: Vec<String>,
    pub totals: Totals,
    pub source_term: SourceTerms,
    #[serde(default)]
    pub notes: BTreeMap<String, String>,
}

impl Summary {
    pub fn from_result(r: &RunResult) -> Self {
        Self {
            label: r.label.clone(),
            model: r.model.to_string(),
            density_oil: r.density_oil,
            runtime_s: r.runtime_s,
            phase1_duration_s: r.phase1_duration,
            snapshots: Vec::new(),
            totals: Totals::from_series(&r.series),
            source_term: SourceTerms {
                instantaneous: r.instantaneous.clone(),
                continuous: r.continuous.clone(),
            },
            notes: r.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExportedFiles {
    pub series: PathBuf,
    pub summary: PathBuf,
    pub snapshots: Vec<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

/// Writes `series.csv`, `summary.toml` and any field snapshots into `dir`,
/// creating it if needed.
pub fn export(result: &RunResult, dir: &Path) -> Result<ExportedFiles, HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let series = dir.join(SERIES_FILE);
    result
        .series
        .write_csv(create(&series)?)
        .map_err(|source| HarnessError::Csv {
            path: series.display().to_string(),
            source,
        })?;

    let mut snapshots = Vec::new();
    let mut summary = Summary::from_result(result);
    if !result.snapshots.is_empty() {
        let snap_dir = dir.join(SNAPSHOT_DIR);
        fs::create_dir_all(&snap_dir).map_err(io_err(&snap_dir))?;
        for (step, snap) in &result.snapshots {
            let name = format!("snap_{step:06}.txt");
            let path = snap_dir.join(&name);
            snap.write(create(&path)?).map_err(io_err(&path))?;
            summary.snapshots.push(format!("{SNAPSHOT_DIR}/{name}"));
            snapshots.push(path);
        }
    }

    let path = dir.join(SUMMARY_FILE);
    let text = toml::to_string(&summary).map_err(|e| HarnessError::Summary {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut w = create(&path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err(&path))?;

    Ok(ExportedFiles {
        series,
        summary: path,
        snapshots,
    })
}

pub fn read_summary(path: &Path) -> Result<Summary, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    toml::from_str(&text).map_err(|e| HarnessError::Summary {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    /// Number of summary values compared against the series.
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl AuditReport {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn value(&mut self, name: &str, summary: f64, derived: f64) {
        self.checked += 1;
        let scale = summary.abs().max(derived.abs());
        if !((summary - derived).abs() <= AUDIT_RTOL * scale) {
            self.mismatches
                .push(format!("{name}: summary {summary}, series gives {derived}"));
        }
    }

    fn optional(&mut self, name: &str, summary: Option<f64>, derived: Option<f64>) {
        match (summary, derived) {
            (Some(a), Some(b)) => self.value(name, a, b),
            (None, None) => self.checked += 1,
            _ => {
                self.checked += 1;
                self.mismatches.push(format!(
                    "{name}: summary {summary:?}, series gives {derived:?}"
                ));
            }
        }
    }

    fn source_term(
        &mut self,
        name: &str,
        summary: Option<&SourceTerm>,
        derived: Option<&SourceTerm>,
    ) {
        match (summary, derived) {
            (Some(a), Some(b)) => {
                self.checked += 1;
                if a.mode != b.mode {
                    self.mismatches.push(format!("{name}.mode differs"));
                }
                self.value(&format!("{name}.total_mass"), a.total_mass, b.total_mass);
                self.value(&format!("{name}.start_time"), a.start_time, b.start_time);
                self.optional(&format!("{name}.rate"), a.rate, b.rate);
                self.optional(&format!("{name}.duration"), a.duration, b.duration);
            }
            (None, None) => self.checked += 1,
            _ => {
                self.checked += 1;
                self.mismatches
                    .push(format!("{name}: present in only one of summary and series"));
            }
        }
    }
}

/// End of the first phase: the last sample tagged `phase1`.
fn phase1_end(series: &LeakTimeSeries) -> Option<f64> {
    series
        .phase
        .iter()
        .rposition(|p| p == "phase1")
        .map(|i| series.times[i])
}

/// Re-derives every number in `dir/summary.toml` from `dir/series.csv`.
pub fn audit(dir: &Path) -> Result<AuditReport, HarnessError> {
    let summary = read_summary(&dir.join(SUMMARY_FILE))?;
    let path = dir.join(SERIES_FILE);
    let file = File::open(&path).map_err(io_err(&path))?;
    let series =
        LeakTimeSeries::read_csv(BufReader::new(file)).map_err(|source| HarnessError::Csv {
            path: path.display().to_string(),
            source,
        })?;

    let mut report = AuditReport::default();
    report.checked += 1;
    if let Err(e) = series.check(summary.density_oil) {
        report.mismatches.push(format!("series: {e}"));
    }

    let derived = Totals::from_series(&series);
    let t = &summary.totals;
    report.value("totals.samples", t.samples as f64, derived.samples as f64);
    report.value("totals.duration_s", t.duration_s, derived.duration_s);
    report.value(
        "totals.final_mass_kg",
        t.final_mass_kg,
        derived.final_mass_kg,
    );
    report.value(
        "totals.final_volume_m3",
        t.final_volume_m3,
        derived.final_volume_m3,
    );
    report.value(
        "totals.peak_rate_kgps",
        t.peak_rate_kgps,
        derived.peak_rate_kgps,
    );
    report.optional("totals.t50_s", t.t50_s, derived.t50_s);
    report.optional("totals.t90_s", t.t90_s, derived.t90_s);
    if summary.phase1_duration_s.is_some() {
        report.optional(
            "phase1_duration_s",
            summary.phase1_duration_s,
            Some(phase1_end(&series).unwrap_or(0.0)),
        );
    }

    let inst = reduce_to_source_term(&series, ReleaseMode::Instantaneous).ok();
    let cont = reduce_to_source_term(&series, ReleaseMode::ContinuousConstant).ok();
    report.source_term(
        "source_term.instantaneous",
        Some(&summary.source_term.instantaneous),
        inst.as_ref(),
    );
    report.source_term(
        "source_term.continuous",
        summary.source_term.continuous.as_ref(),
        cont.as_ref(),
    );

    for name in &summary.snapshots {
        report.checked += 1;
        if !dir.join(name).is_file() {
            report.mismatches.push(format!("missing snapshot {name}"));
        }
    }
    Ok(report)
}
