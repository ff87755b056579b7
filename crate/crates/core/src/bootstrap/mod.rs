//! Deterministic 2-neighbour bootstrap percolation.

mod closure;
mod coarse;
mod rectangles;

pub use closure::{closure, closure_unbounded, internally_spanned, DenseGrid};
pub use coarse::{coarse_bootstrap, estimate_pc, percolation_probability, CoarseGrid, CoarseOutcome};
pub use rectangles::{al_witness, rectangles_process, MergeEngine, MergeRecord, RectanglesState};

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{LatticeError, Site, SiteSet};

#[derive(Debug, Error)]
pub enum BootstrapError {
    #[error("site {0} lies outside the box")]
    OutsideBox(Site),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Serialize)]
struct ClosureRecord<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    sites: &'a [[i64; 2]],
}

/// Write one `{"type":"closure","sites":[[x,y],...]}` line, sites sorted.
pub fn write_closure_record<W: Write>(mut w: W, set: &SiteSet) -> io::Result<()> {
    let sites: Vec<[i64; 2]> = set.sorted().into_iter().map(|s| [s.x, s.y]).collect();
    serde_json::to_writer(&mut w, &ClosureRecord { kind: "closure", sites: &sites })?;
    writeln!(w)
}

/// Write a merge log as JSON lines, one `{"type":"merge",...}` record per merge.
pub fn write_merge_log<W: Write>(mut w: W, log: &[MergeRecord]) -> io::Result<()> {
    for rec in log {
        serde_json::to_writer(&mut w, rec)?;
        writeln!(w)?;
    }
    Ok(())
}
