use super::Event;
use crate::lattice::{BoxIndex, Site};

/// Receives infections from an engine run. `done` is polled after each event
/// and its instantaneous cascade have been applied.
pub trait Observer {
    fn initial(&mut self, _site: Site) {}
    fn event(&mut self, ev: &Event);
    fn done(&self) -> bool {
        false
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct NullObserver;

impl Observer for NullObserver {
    fn event(&mut self, _ev: &Event) {}
}

impl<O: Observer + ?Sized> Observer for &mut O {
    fn initial(&mut self, site: Site) {
        (**self).initial(site)
    }
    fn event(&mut self, ev: &Event) {
        (**self).event(ev)
    }
    fn done(&self) -> bool {
        (**self).done()
    }
}

/// Stops when either observer is done.
impl<A: Observer, B: Observer> Observer for (A, B) {
    fn initial(&mut self, site: Site) {
        self.0.initial(site);
        self.1.initial(site);
    }
    fn event(&mut self, ev: &Event) {
        self.0.event(ev);
        self.1.event(ev);
    }
    fn done(&self) -> bool {
        self.0.done() || self.1.done()
    }
}

#[derive(Debug, Default, Clone)]
pub struct TraceRecorder {
    pub initial: Vec<Site>,
    pub events: Vec<Event>,
}

impl Observer for TraceRecorder {
    fn initial(&mut self, site: Site) {
        self.initial.push(site);
    }
    fn event(&mut self, ev: &Event) {
        self.events.push(*ev);
    }
}

const NONE: u32 = u32::MAX;

/// Union-find over the cells of one axis (rows or columns), each root
/// carrying the extent of its run along that axis.
#[derive(Debug, Clone)]
struct Runs {
    parent: Vec<u32>,
    lo: Vec<u32>,
    hi: Vec<u32>,
}

impl Runs {
    fn new(len: usize) -> Self {
        Runs { parent: vec![NONE; len], lo: vec![0; len], hi: vec![0; len] }
    }

    fn find(&mut self, mut c: usize) -> usize {
        while self.parent[c] as usize != c {
            let p = self.parent[c] as usize;
            self.parent[c] = self.parent[p];
            c = p;
        }
        c
    }

    fn make(&mut self, c: usize, pos: u32) {
        self.parent[c] = c as u32;
        self.lo[c] = pos;
        self.hi[c] = pos;
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (lo, hi) = (self.lo[ra].min(self.lo[rb]), self.hi[ra].max(self.hi[rb]));
        self.parent[rb] = ra as u32;
        self.lo[ra] = lo;
        self.hi[ra] = hi;
    }

    fn extent(&mut self, c: usize) -> (u32, u32) {
        let r = self.find(c);
        (self.lo[r], self.hi[r])
    }

    fn present(&self, c: usize) -> bool {
        self.parent[c] != NONE
    }
}

/// Largest semi-perimeter of a fully infected rectangle, maintained per
/// infection. A new maximum must contain the new site, so only rectangles
/// through it are searched, and only when its row and column runs allow an
/// improvement.
#[derive(Debug, Clone)]
pub struct RectTracker {
    idx: BoxIndex,
    rows: Runs,
    cols: Runs,
    best: u64,
    cap: Option<u64>,
    up: Vec<(u32, u32)>,
    down: Vec<(u32, u32)>,
}

impl RectTracker {
    pub fn new(idx: BoxIndex) -> Self {
        RectTracker {
            idx,
            rows: Runs::new(idx.len()),
            cols: Runs::new(idx.len()),
            best: 0,
            cap: None,
            up: Vec::new(),
            down: Vec::new(),
        }
    }

    /// Stop searching once the maximum reaches `cap`.
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn best(&self) -> u64 {
        self.best
    }

    /// Record an infection; returns the new maximum if it increased.
    pub fn add(&mut self, site: Site) -> Option<u64> {
        let c = self.idx.index(site)?;
        let w = self.idx.width();
        let (cx, cy) = ((c % w) as u32, (c / w) as u32);
        self.rows.make(c, cx);
        self.cols.make(c, cy);
        if cx > 0 && self.rows.present(c - 1) {
            self.rows.union(c, c - 1);
        }
        if (cx as usize) + 1 < w && self.rows.present(c + 1) {
            self.rows.union(c, c + 1);
        }
        if c >= w && self.cols.present(c - w) {
            self.cols.union(c, c - w);
        }
        if c + w < self.idx.len() && self.cols.present(c + w) {
            self.cols.union(c, c + w);
        }
        if self.cap.is_some_and(|cap| self.best >= cap) {
            return None;
        }
        let (a, b) = self.rows.extent(c);
        let (y0, y1) = self.cols.extent(c);
        if ((b - a + 1) + (y1 - y0 + 1)) as u64 <= self.best {
            return None;
        }
        // (left reach, right reach) minima going up and going down from c
        let (l0, r0) = (cx - a, b - cx);
        self.up.clear();
        self.down.clear();
        let (mut l, mut r) = (l0, r0);
        self.up.push((l, r));
        for y in cy + 1..=y1 {
            let (a, b) = self.rows.extent(y as usize * w + cx as usize);
            l = l.min(cx - a);
            r = r.min(b - cx);
            self.up.push((l, r));
        }
        let (mut l, mut r) = (l0, r0);
        self.down.push((l, r));
        for y in (y0..cy).rev() {
            let (a, b) = self.rows.extent(y as usize * w + cx as usize);
            l = l.min(cx - a);
            r = r.min(b - cx);
            self.down.push((l, r));
        }
        let mut found = self.best;
        let dmax = self.down.len() as u64;
        for (u, &(lu, ru)) in self.up.iter().enumerate() {
            if (lu + ru + 1) as u64 + u as u64 + dmax <= found {
                continue;
            }
            for (d, &(ld, rd)) in self.down.iter().enumerate() {
                let phi = (lu.min(ld) + ru.min(rd) + 1) as u64 + (u + d + 1) as u64;
                found = found.max(phi);
            }
        }
        if found > self.best {
            self.best = found;
            Some(found)
        } else {
            None
        }
    }
}

/// All droplet observables for `m' = 0..=m` from one growth trace.
#[derive(Debug, Clone)]
pub struct DropletRecorder {
    m: u64,
    t_minus: Vec<Option<f64>>,
    t_plus: Vec<Option<f64>>,
    t_rect: Vec<Option<f64>>,
    ring_counts: Vec<u64>,
    max_ring: i64,
    complete: i64,
    rect: Option<RectTracker>,
    rect_best: u64,
}

impl DropletRecorder {
    /// `rect = None` skips the rectangle observable.
    pub fn new(m: u64, rect: Option<BoxIndex>) -> Self {
        let len = m as usize + 1;
        DropletRecorder {
            m,
            t_minus: vec![None; len],
            t_plus: vec![None; len],
            t_rect: vec![None; len],
            ring_counts: vec![0; len],
            max_ring: -1,
            complete: -1,
            rect: rect.map(|idx| RectTracker::new(idx).with_cap(m)),
            rect_best: 0,
        }
    }

    fn record(&mut self, t: f64, site: Site) {
        let ring = site.ring();
        if ring as i64 > self.max_ring {
            let hi = ring.min(self.m);
            for mm in (self.max_ring + 1) as u64..=hi {
                self.t_minus[mm as usize] = Some(t);
            }
            self.max_ring = ring as i64;
        }
        if ring <= self.m {
            self.ring_counts[ring as usize] += 1;
            while self.complete < self.m as i64 {
                let r = (self.complete + 1) as u64;
                let size = if r == 0 { 1 } else { 8 * r };
                if self.ring_counts[r as usize] < size {
                    break;
                }
                self.complete += 1;
                self.t_plus[r as usize] = Some(t);
            }
        }
        if let Some(tr) = &mut self.rect {
            if let Some(best) = tr.add(site) {
                for mm in self.rect_best + 1..=best.min(self.m) {
                    self.t_rect[mm as usize] = Some(t);
                }
                if self.rect_best == 0 {
                    self.t_rect[0] = Some(t);
                }
                self.rect_best = best;
            }
        }
    }

    pub fn into_times(self) -> super::DropletTimes {
        super::DropletTimes { m: self.m, t_minus: self.t_minus, t_plus: self.t_plus, t_rect: self.t_rect }
    }
}

impl Observer for DropletRecorder {
    fn initial(&mut self, site: Site) {
        self.record(0.0, site);
    }
    fn event(&mut self, ev: &Event) {
        self.record(ev.t, ev.site);
    }
    fn done(&self) -> bool {
        self.t_plus[self.m as usize].is_some()
    }
}

/// Total semi-perimeter of the bounding boxes of the 4-connected infected
/// components. On a bootstrap-closed set the components are exactly the
/// rectangles of its rectangles-process decomposition.
#[derive(Debug, Clone)]
pub struct SemiPerimeterTracker {
    idx: BoxIndex,
    parent: Vec<u32>,
    bbox: Vec<[u32; 4]>,
    total: u64,
    target: u64,
}

fn phi(b: &[u32; 4]) -> u64 {
    (b[1] - b[0] + 1) as u64 + (b[3] - b[2] + 1) as u64
}

impl SemiPerimeterTracker {
    pub fn new(idx: BoxIndex, target: u64) -> Self {
        SemiPerimeterTracker { idx, parent: vec![NONE; idx.len()], bbox: vec![[0; 4]; idx.len()], total: 0, target }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    fn find(&mut self, mut c: usize) -> usize {
        while self.parent[c] as usize != c {
            let p = self.parent[c] as usize;
            self.parent[c] = self.parent[p];
            c = p;
        }
        c
    }

    fn add(&mut self, site: Site) {
        let Some(c) = self.idx.index(site) else { return };
        let w = self.idx.width();
        let (x, y) = ((c % w) as u32, (c / w) as u32);
        self.parent[c] = c as u32;
        self.bbox[c] = [x, x, y, y];
        self.total += 2;
        let nbs: Vec<usize> = self.idx.neighbours(c).filter(|&nb| self.parent[nb] != NONE).collect();
        for nb in nbs {
            let (ra, rb) = (self.find(c), self.find(nb));
            if ra == rb {
                continue;
            }
            let (a, b) = (self.bbox[ra], self.bbox[rb]);
            let m = [a[0].min(b[0]), a[1].max(b[1]), a[2].min(b[2]), a[3].max(b[3])];
            self.total = self.total + phi(&m) - phi(&a) - phi(&b);
            self.parent[rb] = ra as u32;
            self.bbox[ra] = m;
        }
    }
}

impl Observer for SemiPerimeterTracker {
    fn initial(&mut self, site: Site) {
        self.add(site);
    }
    fn event(&mut self, ev: &Event) {
        self.add(ev.site);
    }
    fn done(&self) -> bool {
        self.total >= self.target
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{centred_square, Rect};

    fn brute_best(infected: &[Site], bx: &Rect) -> u64 {
        let set: std::collections::HashSet<Site> = infected.iter().copied().collect();
        let mut best = 0;
        for x0 in bx.x0()..=bx.x1() {
            for x1 in x0..=bx.x1() {
                for y0 in bx.y0()..=bx.y1() {
                    for y1 in y0..=bx.y1() {
                        let r = Rect::new(x0, x1, y0, y1).unwrap();
                        if r.sites().all(|s| set.contains(&s)) {
                            best = best.max(r.width() + r.height());
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn rect_tracker_matches_brute_force() {
        let bx = centred_square(3).unwrap();
        let idx = BoxIndex::new(bx).unwrap();
        let mut rng = crate::rng::rng_from_seed(11);
        for _ in 0..30 {
            let mut order: Vec<Site> = bx.sites().collect();
            for i in (1..order.len()).rev() {
                order.swap(i, crate::rng::below(&mut rng, i + 1));
            }
            let mut tr = RectTracker::new(idx);
            for i in 0..order.len() {
                tr.add(order[i]);
                assert_eq!(tr.best(), brute_best(&order[..=i], &bx));
            }
        }
    }

    #[test]
    fn semi_perimeter_of_components() {
        let idx = BoxIndex::new(centred_square(5).unwrap()).unwrap();
        let mut t = SemiPerimeterTracker::new(idx, 100);
        t.initial(Site::new(0, 0));
        t.initial(Site::new(3, 3));
        assert_eq!(t.total(), 4);
        t.initial(Site::new(1, 0));
        assert_eq!(t.total(), 5);
        t.initial(Site::new(0, 1));
        t.initial(Site::new(1, 1));
        assert_eq!(t.total(), 6);
    }

    #[test]
    fn droplet_recorder_rings() {
        let idx = BoxIndex::new(centred_square(3).unwrap()).unwrap();
        let mut d = DropletRecorder::new(1, Some(idx));
        d.initial(Site::ORIGIN);
        for (i, s) in centred_square(1).unwrap().sites().filter(|s| *s != Site::ORIGIN).enumerate() {
            d.event(&Event { t: 1.0 + i as f64, site: s, cause: super::super::Cause::OneNeighbour });
        }
        assert!(d.done());
        let times = d.into_times();
        assert_eq!(times.t_minus(0), Some(0.0));
        assert_eq!(times.t_minus(1), Some(1.0));
        assert_eq!(times.t_plus(0), Some(0.0));
        assert_eq!(times.t_plus(1), Some(8.0));
    }
}
