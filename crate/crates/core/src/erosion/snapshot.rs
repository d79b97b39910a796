use serde::{Deserialize, Serialize};
use std::fmt::Write;

use super::{ErosionEvent, ErosionState};
use crate::error::{Error, Result};
use crate::lattice::{CellId, TiledSurface};

pub const SNAPSHOT_SCHEMA: &str = "hslab.snapshot.v1";
pub(super) const EVENT_LOG_HEADER: &str = "time,source,walk_length,outcome,cell_i,cell_j\n";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSource {
    pub cell: CellId,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotDroplet {
    pub sources: Vec<SnapshotSource>,
    /// Runs `[j, first_i, length]` of owned squares, row by row.
    pub cells: Vec<[i64; 3]>,
    pub interface: Vec<[i64; 2]>,
}

impl SnapshotDroplet {
    pub fn cell_list(&self) -> Vec<CellId> {
        self.cells
            .iter()
            .flat_map(|&[j, i0, len]| (i0..i0 + len).map(move |i| CellId::new(i, j)))
            .collect()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(|r| r[2] as usize).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub schema: String,
    pub time: f64,
    pub mesh: f64,
    pub surface: TiledSurface,
    pub droplets: Vec<SnapshotDroplet>,
}

impl Snapshot {
    pub fn capture(state: &ErosionState, time: f64) -> Self {
        let droplets = (0..state.droplet_count())
            .map(|k| {
                let mut runs: Vec<[i64; 3]> = Vec::new();
                for c in state.cells(k).expect("droplet index in range") {
                    match runs.last_mut() {
                        Some(r) if r[0] == c.j && r[1] + r[2] == c.i => r[2] += 1,
                        _ => runs.push([c.j, c.i, 1]),
                    }
                }
                SnapshotDroplet {
                    sources: state
                        .sources
                        .iter()
                        .filter(|s| s.droplet == k)
                        .map(|s| SnapshotSource { cell: s.cell, rate: s.rate })
                        .collect(),
                    cells: runs,
                    interface: state.interfaces[k].iter().map(|v| [v.i, v.j]).collect(),
                }
            })
            .collect();
        Snapshot { schema: SNAPSHOT_SCHEMA.into(), time, mesh: state.surface.mesh(), surface: state.surface.clone(), droplets }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Snapshot = serde_json::from_str(text)?;
        if s.schema != SNAPSHOT_SCHEMA {
            return Err(Error::Config(format!("unknown snapshot schema {}", s.schema)));
        }
        Ok(s)
    }
}

pub(super) fn append_event(log: &mut String, e: &ErosionEvent) {
    let c = e.end_cell();
    let _ = writeln!(log, "{},{},{},{},{},{}", e.time, e.source, e.walk_length, e.outcome_label(), c.i, c.j);
}
