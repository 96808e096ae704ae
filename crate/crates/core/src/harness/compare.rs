use std::fmt::Write as _;
use std::io;

use super::{run, ModelId, RunOptions, RunResult};
use crate::cfd::exec::map_rows;
use crate::cfd::Parallelism;
use crate::error::HarnessError;
use crate::scenario::Scenario;

pub const COMPARISON_HEADER: [&str; 10] = [
    "model",
    "status",
    "total_mass_kg",
    "total_volume_m3",
    "t50_s",
    "t90_s",
    "peak_rate_kgps",
    "phase1_duration_s",
    "runtime_s",
    "error",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RowValues {
    pub total_mass_kg: f64,
    pub total_volume_m3: f64,
    pub t50_s: Option<f64>,
    pub t90_s: Option<f64>,
    pub peak_rate_kgps: f64,
    pub phase1_duration_s: Option<f64>,
    pub runtime_s: f64,
}

impl RowValues {
    pub fn from_result(r: &RunResult) -> Self {
        Self {
            total_mass_kg: r.series.final_mass(),
            total_volume_m3: r.series.final_volume(),
            t50_s: r.series.time_to_fraction(0.5),
            t90_s: r.series.time_to_fraction(0.9),
            peak_rate_kgps: r.series.peak_rate(),
            phase1_duration_s: r.phase1_duration,
            runtime_s: r.runtime_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub model: ModelId,
    /// The failure message when the run failed.
    pub outcome: Result<RowValues, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub label: String,
    pub rows: Vec<ComparisonRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ComparisonTable {
    pub fn from_runs(label: &str, runs: &[(ModelId, Result<RunResult, HarnessError>)]) -> Self {
        let rows = runs
            .iter()
            .map(|(model, r)| ComparisonRow {
                model: *model,
                outcome: r
                    .as_ref()
                    .map(RowValues::from_result)
                    .map_err(|e| e.to_string()),
            })
            .collect();
        Self {
            label: label.to_string(),
            rows,
        }
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    fn records(&self) -> Vec<[String; 10]> {
        self.rows
            .iter()
            .map(|row| {
                let model = row.model.to_string();
                match &row.outcome {
                    Ok(v) => [
                        model,
                        "ok".into(),
                        v.total_mass_kg.to_string(),
                        v.total_volume_m3.to_string(),
                        opt(v.t50_s),
                        opt(v.t90_s),
                        v.peak_rate_kgps.to_string(),
                        opt(v.phase1_duration_s),
                        v.runtime_s.to_string(),
                        String::new(),
                    ],
                    Err(e) => {
                        let mut r: [String; 10] = Default::default();
                        r[0] = model;
                        r[1] = "failed".into();
                        r[9] = e.clone();
                        r
                    }
                }
            })
            .collect()
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(COMPARISON_HEADER)?;
        for r in self.records() {
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Aligned plain-text table for a terminal.
    pub fn render(&self) -> String {
        let head = [
            "model",
            "status",
            "mass kg",
            "volume m3",
            "t50 s",
            "t90 s",
            "peak kg/s",
            "phase1 s",
            "runtime s",
        ];
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        let mut cells: Vec<Vec<String>> = vec![head.iter().map(|s| s.to_string()).collect()];
        let mut errors = Vec::new();
        for row in &self.rows {
            let mut line = vec![row.model.to_string()];
            match &row.outcome {
                Ok(v) => {
                    line.push("ok".into());
                    line.extend([
                        fmt(Some(v.total_mass_kg)),
                        fmt(Some(v.total_volume_m3)),
                        fmt(v.t50_s),
                        fmt(v.t90_s),
                        fmt(Some(v.peak_rate_kgps)),
                        fmt(v.phase1_duration_s),
                        format!("{:.3}", v.runtime_s),
                    ]);
                }
                Err(e) => {
                    line.push("FAILED".into());
                    line.extend(std::iter::repeat_n("-".to_string(), head.len() - 2));
                    errors.push(format!("{}: {e}", row.model));
                }
            }
            cells.push(line);
        }
        let widths: Vec<usize> = (0..head.len())
            .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = format!("scenario: {}\n", self.label);
        for line in &cells {
            let padded: Vec<String> = line
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (s, w))| {
                    if c < 2 {
                        format!("{s:<w$}")
                    } else {
                        format!("{s:>w$}")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        }
        for e in errors {
            let _ = writeln!(out, "{e}");
        }
        out
    }
}

#[derive(Debug)]
pub struct Comparison {
    pub table: ComparisonTable,
    /// One entry per requested model, in request order.
    pub runs: Vec<(ModelId, Result<RunResult, HarnessError>)>,
}

/// Runs every listed model on the scenario, concurrently when `parallelism`
/// allows. A failing member becomes a failure row; the others still run.
pub fn compare(
    s: &Scenario,
    models: &[ModelId],
    options: &RunOptions,
    parallelism: Parallelism,
) -> Result<Comparison, HarnessError> {
    if models.len() < 2 {
        return Err(HarnessError::Options(
            "compare needs at least two models".into(),
        ));
    }
    let results = map_rows(parallelism, models.len(), |i| run(s, models[i], options));
    let runs: Vec<_> = models.iter().copied().zip(results).collect();
    Ok(Comparison {
        table: ComparisonTable::from_runs(&s.label, &runs),
        runs,
    })
}
