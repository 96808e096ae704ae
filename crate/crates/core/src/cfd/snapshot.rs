//! Plain-text field snapshots.
//!
//! ```text
//! spillsim-snapshot 1
//! nx <nx>
//! ny <ny>
//! dx <dx>
//! dy <dy>
//! time <t>
//! field <name>
//! <ny lines of nx values, bottom row first>
//! field <name>
//! ...
//! ```
//!
//! Fields are cell-centred: `alpha`, `p`, `scalar`, `u`, `v`, plus `air` in
//! three-phase runs. Values are written in shortest round-trip form.

use std::io::{self, BufRead, Write};

use super::grid::Grid2D;
use super::state::FlowState;
use crate::error::CfdError;

const MAGIC: &str = "spillsim-snapshot 1";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub time: f64,
    pub fields: Vec<(String, Vec<f64>)>,
}

impl Snapshot {
    pub fn capture(grid: &Grid2D, state: &FlowState) -> Self {
        let (uc, vc) = state.cell_velocity();
        let mut fields = vec![
            ("alpha".to_string(), state.alpha.clone()),
            ("p".to_string(), state.p.clone()),
            ("scalar".to_string(), state.scalar.clone()),
            ("u".to_string(), uc),
            ("v".to_string(), vc),
        ];
        if let Some(air) = &state.air {
            fields.push(("air".to_string(), air.clone()));
        }
        Self {
            nx: grid.nx,
            ny: grid.ny,
            dx: grid.dx,
            dy: grid.dy,
            time: state.time,
            fields,
        }
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "nx {}", self.nx)?;
        writeln!(w, "ny {}", self.ny)?;
        writeln!(w, "dx {}", self.dx)?;
        writeln!(w, "dy {}", self.dy)?;
        writeln!(w, "time {}", self.time)?;
        for (name, values) in &self.fields {
            writeln!(w, "field {name}")?;
            for row in values.chunks(self.nx) {
                let line: Vec<String> = row.iter().map(f64::to_string).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
        }
        w.flush()
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self, CfdError> {
        let bad = |m: String| CfdError::Snapshot(m);
        let mut lines = r.lines();
        let mut next = || -> Result<String, CfdError> {
            lines
                .next()
                .ok_or_else(|| bad("unexpected end of file".into()))?
                .map_err(CfdError::Io)
        };
        if next()?.trim() != MAGIC {
            return Err(bad("missing snapshot header".into()));
        }
        let mut header = |key: &str| -> Result<String, CfdError> {
            let line = next()?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok(v.trim().to_string()),
                _ => Err(bad(format!("expected `{key}`, found `{line}`"))),
            }
        };
        let parse_usize = |v: String| v.parse::<usize>().map_err(|e| bad(e.to_string()));
        let parse_f64 = |v: String| v.parse::<f64>().map_err(|e| bad(e.to_string()));
        let nx = parse_usize(header("nx")?)?;
        let ny = parse_usize(header("ny")?)?;
        let dx = parse_f64(header("dx")?)?;
        let dy = parse_f64(header("dy")?)?;
        let time = parse_f64(header("time")?)?;
        let mut fields = Vec::new();
        loop {
            let line = match next() {
                Ok(l) => l,
                Err(CfdError::Snapshot(_)) => break,
                Err(e) => return Err(e),
            };
            if line.trim().is_empty() {
                continue;
            }
            let name = line
                .strip_prefix("field ")
                .ok_or_else(|| bad(format!("expected `field`, found `{line}`")))?
                .trim()
                .to_string();
            let mut values = Vec::with_capacity(nx * ny);
            for _ in 0..ny {
                let row = next()?;
                let before = values.len();
                for tok in row.split_whitespace() {
                    values.push(tok.parse::<f64>().map_err(|e| bad(e.to_string()))?);
                }
                if values.len() - before != nx {
                    return Err(bad(format!("field {name}: row does not have {nx} values")));
                }
            }
            fields.push((name, values));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            time,
            fields,
        })
    }
}
