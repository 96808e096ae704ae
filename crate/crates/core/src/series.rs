//! Sampled leak history shared by every time-resolved model.

use serde::{Deserialize, Serialize};
use std::io;

/// Column names of the exported table, in order.
pub const CSV_HEADER: [&str; 6] = [
    "t_s",
    "velocity_mps",
    "rate_kgps",
    "cum_volume_m3",
    "cum_mass_kg",
    "phase",
];

/// Leak velocity, mass rate and cumulative spill at increasing sample times.
///
/// All columns have the same length. `cumulative_mass` is always
/// `cumulative_volume * oil_density`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LeakTimeSeries {
    pub times: Vec<f64>,
    pub velocity: Vec<f64>,
    pub mass_rate: Vec<f64>,
    pub cumulative_volume: Vec<f64>,
    pub cumulative_mass: Vec<f64>,
    pub phase: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    t_s: f64,
    velocity_mps: f64,
    rate_kgps: f64,
    cum_volume_m3: f64,
    cum_mass_kg: f64,
    phase: String,
}

impl LeakTimeSeries {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            velocity: Vec::with_capacity(n),
            mass_rate: Vec::with_capacity(n),
            cumulative_volume: Vec::with_capacity(n),
            cumulative_mass: Vec::with_capacity(n),
            phase: Vec::with_capacity(n),
        }
    }

    pub fn push(
        &mut self,
        t: f64,
        velocity: f64,
        mass_rate: f64,
        cumulative_volume: f64,
        density_oil: f64,
        phase: &str,
    ) {
        self.times.push(t);
        self.velocity.push(velocity);
        self.mass_rate.push(mass_rate);
        self.cumulative_volume.push(cumulative_volume);
        self.cumulative_mass.push(cumulative_volume * density_oil);
        self.phase.push(phase.to_string());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_mass(&self) -> f64 {
        self.cumulative_mass.last().copied().unwrap_or(0.0)
    }

    pub fn final_volume(&self) -> f64 {
        self.cumulative_volume.last().copied().unwrap_or(0.0)
    }

    pub fn peak_rate(&self) -> f64 {
        self.mass_rate.iter().copied().fold(0.0, f64::max)
    }

    /// First time the cumulative mass reaches `fraction` of its final value,
    /// linearly interpolated between samples.
    pub fn time_to_fraction(&self, fraction: f64) -> Option<f64> {
        let total = self.final_mass();
        if total <= 0.0 || self.is_empty() {
            return None;
        }
        let target = fraction * total;
        let m = &self.cumulative_mass;
        let idx = m.iter().position(|&v| v >= target)?;
        if idx == 0 {
            return Some(self.times[0]);
        }
        let (m0, m1) = (m[idx - 1], m[idx]);
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        Some(t0 + (t1 - t0) * (target - m0) / (m1 - m0))
    }

    /// Checks the structural invariants; returns a description of the first
    /// failure.
    pub fn check(&self, density_oil: f64) -> Result<(), String> {
        let n = self.times.len();
        if [
            self.velocity.len(),
            self.mass_rate.len(),
            self.cumulative_volume.len(),
            self.cumulative_mass.len(),
            self.phase.len(),
        ]
        .iter()
        .any(|&l| l != n)
        {
            return Err("column lengths differ".into());
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err("times are not strictly increasing".into());
        }
        if self.cumulative_volume.windows(2).any(|w| w[1] < w[0]) {
            return Err("cumulative volume decreases".into());
        }
        for (v, m) in self.cumulative_volume.iter().zip(&self.cumulative_mass) {
            let expected = v * density_oil;
            if (m - expected).abs() > 1e-9 * expected.abs().max(1e-300) {
                return Err(format!("cumulative mass {m} != volume {v} x density"));
            }
        }
        Ok(())
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for i in 0..self.len() {
            w.serialize(Row {
                t_s: self.times[i],
                velocity_mps: self.velocity[i],
                rate_kgps: self.mass_rate[i],
                cum_volume_m3: self.cumulative_volume[i],
                cum_mass_kg: self.cumulative_mass[i],
                phase: self.phase[i].clone(),
            })?;
        }
        if self.is_empty() {
            w.write_record(CSV_HEADER)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(reader: R) -> csv::Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut s = Self::default();
        for row in r.deserialize() {
            let row: Row = row?;
            s.times.push(row.t_s);
            s.velocity.push(row.velocity_mps);
            s.mass_rate.push(row.rate_kgps);
            s.cumulative_volume.push(row.cum_volume_m3);
            s.cumulative_mass.push(row.cum_mass_kg);
            s.phase.push(row.phase);
        }
        Ok(s)
    }
}
