use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use super::clocks::{Clocks, IndependentClocks};
use super::observers::{Observer, RectTracker, TraceRecorder};
use super::trace::EventTrace;
use super::{Cause, Event, Flavor, KineticsError, Outcome, ProcessParams, StopRule};
use crate::lattice::{centred_square, BoxIndex, Site, SiteSet};
use crate::rng::{below, exp_sample, rng_from_seed, Rng};

/// Heap entry. Times are nonnegative, so their bit patterns order like the
/// values; ties fall back to the cell index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Pending {
    t_bits: u64,
    cell: u32,
    version: u32,
}

impl Pending {
    #[inline]
    fn t(&self) -> f64 {
        f64::from_bits(self.t_bits)
    }
}

const NOT_POOLED: u32 = u32::MAX;

/// How a successful run ended, the final time and the number of events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunEnd {
    pub outcome: Outcome,
    pub t: f64,
    pub events: u64,
}

/// Event-driven engine with per-site competing clocks on the frontier and
/// one aggregated nucleation stream.
///
/// A healthy site carries a clock once it has an infected neighbour; the
/// clock is redrawn when the site gains its first and second infected
/// neighbour. Stale heap entries are skipped by version.
pub struct Engine<C: Clocks> {
    params: ProcessParams,
    idx: BoxIndex,
    infected: Vec<bool>,
    counts: Vec<u8>,
    version: Vec<u32>,
    heap: BinaryHeap<Reverse<Pending>>,
    // Healthy sites with no infected neighbour, for nucleation.
    pool: Vec<u32>,
    pool_pos: Vec<u32>,
    next_nucleation: f64,
    cascade: VecDeque<u32>,
    rng: Rng,
    clocks: C,
    t: f64,
    events: u64,
    n_infected: usize,
    origin: Option<usize>,
}

impl Engine<IndependentClocks> {
    pub fn new(params: ProcessParams, seed: u64) -> Result<Self, KineticsError> {
        let clocks = IndependentClocks::new(params.one_neighbour_rate());
        Engine::with_clocks(params, seed, clocks)
    }
}

impl<C: Clocks> Engine<C> {
    pub fn with_clocks(params: ProcessParams, seed: u64, clocks: C) -> Result<Self, KineticsError> {
        params.validate()?;
        if params.flavor == Flavor::GenerousHalfPlane {
            return Err(KineticsError::InvalidParams(
                "the generous half-plane process has its own sampler".into(),
            ));
        }
        let idx = BoxIndex::new(params.bx)?;
        let len = idx.len();
        let nucleation = params.flavor == Flavor::Ds;
        let (pool, pool_pos) = if nucleation {
            ((0..len as u32).collect(), (0..len as u32).collect())
        } else {
            (Vec::new(), Vec::new())
        };
        let mut e = Engine {
            params,
            idx,
            infected: vec![false; len],
            counts: vec![0; len],
            version: vec![0; len],
            heap: BinaryHeap::new(),
            pool,
            pool_pos,
            next_nucleation: f64::INFINITY,
            cascade: VecDeque::new(),
            rng: rng_from_seed(seed),
            clocks,
            t: 0.0,
            events: 0,
            n_infected: 0,
            origin: idx.index(Site::ORIGIN),
        };
        e.redraw_nucleation();
        Ok(e)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn infected_count(&self) -> usize {
        self.n_infected
    }

    pub fn index(&self) -> &BoxIndex {
        &self.idx
    }

    pub fn is_infected(&self, s: Site) -> bool {
        self.idx.index(s).is_some_and(|i| self.infected[i])
    }

    pub fn infected_sites(&self) -> SiteSet {
        (0..self.infected.len()).filter(|&i| self.infected[i]).map(|i| self.idx.site(i)).collect()
    }

    fn redraw_nucleation(&mut self) {
        self.next_nucleation = if self.pool.is_empty() {
            f64::INFINITY
        } else {
            self.t + exp_sample(&mut self.rng, self.pool.len() as f64 / self.params.n)
        };
    }

    fn unpool(&mut self, cell: usize) -> bool {
        if self.pool_pos.is_empty() {
            return false;
        }
        let pos = self.pool_pos[cell];
        if pos == NOT_POOLED {
            return false;
        }
        let last = *self.pool.last().expect("pool holds cell");
        self.pool.swap_remove(pos as usize);
        if last as usize != cell {
            self.pool_pos[last as usize] = pos;
        }
        self.pool_pos[cell] = NOT_POOLED;
        true
    }

    fn schedule(&mut self, cell: usize) {
        let site = self.idx.site(cell);
        let t = self.clocks.next(cell, site, self.counts[cell], self.t, &mut self.rng);
        self.version[cell] = self.version[cell].wrapping_add(1);
        self.heap.push(Reverse(Pending { t_bits: t.to_bits(), cell: cell as u32, version: self.version[cell] }));
    }

    /// Mark `cell` infected and update its neighbours. Returns whether the
    /// nucleation pool changed.
    fn mark(&mut self, cell: usize) -> bool {
        self.infected[cell] = true;
        self.n_infected += 1;
        let mut pool_changed = self.unpool(cell);
        let instant = self.params.flavor == Flavor::ModifiedKs;
        let w = self.idx.width();
        let len = self.idx.len();
        let col = cell % w;
        let nbs = [
            (col > 0).then(|| cell - 1),
            (col + 1 < w).then(|| cell + 1),
            (cell >= w).then(|| cell - w),
            (cell + w < len).then(|| cell + w),
        ];
        for nb in nbs.into_iter().flatten() {
            if self.infected[nb] {
                continue;
            }
            self.counts[nb] += 1;
            match self.counts[nb] {
                1 => {
                    pool_changed |= self.unpool(nb);
                    self.schedule(nb);
                }
                2 if instant => self.cascade.push_back(nb as u32),
                2 => self.schedule(nb),
                _ => {}
            }
        }
        pool_changed
    }

    fn infect<O: Observer>(&mut self, cell: usize, cause: Cause, obs: &mut O) {
        let mut pool_changed = self.mark(cell);
        self.events += 1;
        obs.event(&Event { t: self.t, site: self.idx.site(cell), cause });
        while let Some(c) = self.cascade.pop_front() {
            let c = c as usize;
            if self.infected[c] {
                continue;
            }
            pool_changed |= self.mark(c);
            self.events += 1;
            obs.event(&Event { t: self.t, site: self.idx.site(c), cause: Cause::Instantaneous });
        }
        if pool_changed {
            self.redraw_nucleation();
        }
    }

    /// Infect the initial set at time 0. In the modified process its closure
    /// follows at once as instantaneous events.
    pub fn seed_initial<O: Observer>(&mut self, initial: &SiteSet, obs: &mut O) -> Result<(), KineticsError> {
        let mut cells = Vec::with_capacity(initial.len());
        for s in initial.sorted() {
            let c = self
                .idx
                .index(s)
                .ok_or_else(|| KineticsError::InvalidParams(format!("initial site {s} outside the box")))?;
            cells.push(c);
        }
        for &c in &cells {
            if !self.infected[c] {
                self.mark(c);
                obs.initial(self.idx.site(c));
            }
        }
        // Closure of the initial set, for the modified process.
        while let Some(c) = self.cascade.pop_front() {
            let c = c as usize;
            if !self.infected[c] {
                self.mark(c);
                self.events += 1;
                obs.event(&Event { t: 0.0, site: self.idx.site(c), cause: Cause::Instantaneous });
            }
        }
        self.redraw_nucleation();
        Ok(())
    }

    fn next_site_event(&mut self) -> Option<Pending> {
        while let Some(Reverse(p)) = self.heap.peek().copied() {
            let c = p.cell as usize;
            if self.infected[c] || self.version[c] != p.version {
                self.heap.pop();
                continue;
            }
            return Some(p);
        }
        None
    }

    /// Advance until the stop rule or the observer is satisfied.
    pub fn run<O: Observer>(&mut self, stop: StopRule, budget: u64, obs: &mut O) -> Result<RunEnd, KineticsError> {
        let check = StopCheck::new(stop, self)?;
        let mut both = (check, obs);
        loop {
            if both.done() {
                return Ok(self.end(Outcome::Stopped));
            }
            let site_ev = self.next_site_event();
            let t_site = site_ev.map_or(f64::INFINITY, |p| p.t());
            let t_next = t_site.min(self.next_nucleation);
            if let StopRule::TimeHorizon(h) = stop {
                if t_next > h {
                    self.t = self.t.max(h);
                    return Ok(self.end(Outcome::Horizon));
                }
            }
            if t_next.is_infinite() {
                return Ok(self.end(Outcome::Exhausted));
            }
            if self.events >= budget {
                return Err(KineticsError::Budget { budget, t: self.t });
            }
            self.t = t_next;
            if t_site <= self.next_nucleation {
                let p = site_ev.expect("finite site time");
                self.heap.pop();
                let c = p.cell as usize;
                let cause = if self.counts[c] >= 2 { Cause::TwoNeighbour } else { Cause::OneNeighbour };
                self.infect(c, cause, &mut both);
            } else {
                let c = self.pool[below(&mut self.rng, self.pool.len())] as usize;
                self.infect(c, Cause::Nucleation, &mut both);
            }
        }
    }

    fn end(&self, outcome: Outcome) -> RunEnd {
        RunEnd { outcome, t: self.t, events: self.events }
    }
}

/// Incremental evaluation of a [`StopRule`] from the event stream.
struct StopCheck {
    rule: StopRule,
    // infected so far, and target
    count: u64,
    target: u64,
    square: u64,
    rect: Option<RectTracker>,
    origin_hit: bool,
}

impl StopCheck {
    fn new<C: Clocks>(rule: StopRule, e: &Engine<C>) -> Result<Self, KineticsError> {
        let infected = e.infected_sites();
        let mut sc = StopCheck {
            rule,
            count: 0,
            target: 0,
            square: 0,
            rect: None,
            origin_hit: infected.contains(&Site::ORIGIN),
        };
        match rule {
            StopRule::OriginInfected if e.origin.is_none() => {
                return Err(KineticsError::InvalidParams("origin is outside the box".into()));
            }
            StopRule::SquareFilled(m) => {
                let sq = centred_square(m)?;
                if !e.idx.rect().contains_rect(&sq) {
                    return Err(KineticsError::InvalidParams(format!("S({m}) is not inside the box")));
                }
                sc.square = m;
                sc.target = sq.area().expect("inside box");
                sc.count = infected.iter().filter(|s| s.ring() <= m).count() as u64;
            }
            StopRule::RectReached(m) => {
                let mut tr = RectTracker::new(e.idx).with_cap(m);
                for s in infected.sorted() {
                    tr.add(s);
                }
                sc.target = m;
                sc.rect = Some(tr);
            }
            StopRule::BoxFilled => {
                sc.target = e.idx.len() as u64;
                sc.count = infected.len() as u64;
            }
            _ => {}
        }
        Ok(sc)
    }
}

impl Observer for StopCheck {
    fn event(&mut self, ev: &Event) {
        match self.rule {
            StopRule::OriginInfected => self.origin_hit |= ev.site == Site::ORIGIN,
            StopRule::SquareFilled(_) => self.count += (ev.site.ring() <= self.square) as u64,
            StopRule::RectReached(_) => {
                if let Some(tr) = &mut self.rect {
                    tr.add(ev.site);
                }
            }
            StopRule::BoxFilled => self.count += 1,
            StopRule::TimeHorizon(_) => {}
        }
    }

    fn done(&self) -> bool {
        match self.rule {
            StopRule::OriginInfected => self.origin_hit,
            StopRule::SquareFilled(_) | StopRule::BoxFilled => self.count >= self.target,
            StopRule::RectReached(m) => self.rect.as_ref().is_some_and(|tr| tr.best() >= m),
            StopRule::TimeHorizon(_) => false,
        }
    }
}

/// Run with an arbitrary observer and clock source.
pub fn simulate_observed<C: Clocks, O: Observer>(
    params: &ProcessParams,
    initial: &SiteSet,
    stop: StopRule,
    seed: u64,
    budget: u64,
    clocks: C,
    obs: &mut O,
) -> Result<RunEnd, KineticsError> {
    let mut e = Engine::with_clocks(*params, seed, clocks)?;
    e.seed_initial(initial, obs)?;
    e.run(stop, budget, obs)
}

/// Run the chain and record the full trace.
pub fn simulate(
    params: &ProcessParams,
    initial: &SiteSet,
    stop: StopRule,
    seed: u64,
    budget: u64,
) -> Result<EventTrace, KineticsError> {
    let mut rec = TraceRecorder::default();
    let clocks = IndependentClocks::new(params.one_neighbour_rate());
    let end = simulate_observed(params, initial, stop, seed, budget, clocks, &mut rec)?;
    Ok(EventTrace::new(*params, seed, stop, rec, end))
}
