use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::engine::RunEnd;
use super::observers::TraceRecorder;
use super::{Cause, Event, Outcome, ProcessParams, StopRule};
use crate::lattice::Site;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub params: ProcessParams,
    pub seed: u64,
    pub stop: StopRule,
    /// Sites infected at time 0, as `[x, y]` pairs.
    pub initial: Vec<[i64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct EventLine {
    t: f64,
    x: i64,
    y: i64,
    cause: Cause,
}

/// One seeded realization: the header and every infection after time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTrace {
    pub header: TraceHeader,
    pub events: Vec<Event>,
    pub outcome: Outcome,
    pub t_end: f64,
}

impl EventTrace {
    pub(crate) fn new(params: ProcessParams, seed: u64, stop: StopRule, rec: TraceRecorder, end: RunEnd) -> Self {
        EventTrace {
            header: TraceHeader {
                params,
                seed,
                stop,
                initial: rec.initial.iter().map(|s| [s.x, s.y]).collect(),
            },
            events: rec.events,
            outcome: end.outcome,
            t_end: end.t,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Time the origin was infected, if it was (0 if initially infected).
    pub fn origin_time(&self) -> Option<f64> {
        if self.header.initial.contains(&[0, 0]) {
            return Some(0.0);
        }
        self.events.iter().find(|e| e.site == Site::ORIGIN).map(|e| e.t)
    }

    /// Infected sites at time `t` (inclusive).
    pub fn infected_at(&self, t: f64) -> crate::lattice::SiteSet {
        let init = self.header.initial.iter().map(|&[x, y]| Site::new(x, y));
        init.chain(self.events.iter().take_while(|e| e.t <= t).map(|e| e.site)).collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        writeln!(w)?;
        for e in &self.events {
            serde_json::to_writer(&mut w, &EventLine { t: e.t, x: e.site.x, y: e.site.y, cause: e.cause })?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// Parse a trace written by [`write_jsonl`](Self::write_jsonl). The
    /// outcome is not stored in the file and reads back as `Stopped` with
    /// `t_end` the last event time.
    pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Self> {
        let mut lines = r.lines();
        let first = lines.next().ok_or_else(|| io::Error::new(io::ErrorKind::UnexpectedEof, "empty trace"))??;
        let header: TraceHeader = serde_json::from_str(&first)?;
        let mut events = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: EventLine = serde_json::from_str(&line)?;
            events.push(Event { t: e.t, site: Site::new(e.x, e.y), cause: e.cause });
        }
        let t_end = events.last().map_or(0.0, |e| e.t);
        Ok(EventTrace { header, events, outcome: Outcome::Stopped, t_end })
    }

    /// Check the structural invariants: nondecreasing times, no repeated
    /// site, and each cause consistent with the infected-neighbour count at
    /// its event time. Returns a description of the first violation.
    pub fn check(&self) -> Result<(), String> {
        let mut infected: HashMap<Site, ()> = HashMap::new();
        for &[x, y] in &self.header.initial {
            infected.insert(Site::new(x, y), ());
        }
        let mut last = 0.0f64;
        for (i, e) in self.events.iter().enumerate() {
            if e.t < last {
                return Err(format!("event {i}: time {} before {}", e.t, last));
            }
            last = e.t;
            if !self.header.params.bx.contains(e.site) {
                return Err(format!("event {i}: site {} outside box", e.site));
            }
            let nb = e.site.neighbours().filter(|s| infected.contains_key(s)).count();
            let ok = match e.cause {
                Cause::Nucleation => nb == 0,
                Cause::OneNeighbour => nb == 1,
                Cause::TwoNeighbour | Cause::Instantaneous => nb >= 2,
            };
            if !ok {
                return Err(format!("event {i}: cause {} with {nb} infected neighbours", e.cause.as_str()));
            }
            if infected.insert(e.site, ()).is_some() {
                return Err(format!("event {i}: site {} infected twice", e.site));
            }
        }
        Ok(())
    }
}
