use std::collections::HashMap;

use rand::SeedableRng;

use crate::lattice::Site;
use crate::rng::{derive_seed, exp_sample, Rng};

/// Source of growth clocks for healthy sites next to the infected set.
pub trait Clocks {
    /// Absolute time of the next infection of `site` given that it has had
    /// `count` infected neighbours since time `t` (1 or at least 2).
    fn next(&mut self, cell: usize, site: Site, count: u8, t: f64, rng: &mut Rng) -> f64;
}

/// Fresh exponential clocks from the engine's generator. Re-drawing on a
/// rate change is exact by memorylessness.
#[derive(Debug, Clone, Copy)]
pub struct IndependentClocks {
    one_rate: f64,
}

impl IndependentClocks {
    pub fn new(one_rate: f64) -> Self {
        IndependentClocks { one_rate }
    }
}

impl Clocks for IndependentClocks {
    #[inline]
    fn next(&mut self, _cell: usize, _site: Site, count: u8, t: f64, rng: &mut Rng) -> f64 {
        let rate = if count >= 2 { 1.0 } else { self.one_rate };
        t + exp_sample(rng, rate)
    }
}

/// Mean number of points per block of a stream.
const POINTS_PER_BLOCK: f64 = 4.0;

/// A Poisson process on `[0, ∞)` cut into blocks of equal length. Block `j`
/// is drawn from its own generator stream, so any block can be produced on
/// demand and queries cost O(1) blocks regardless of `t`.
#[derive(Debug, Clone)]
struct Stream {
    key: u64,
    rate: f64,
    len: f64,
    block: Option<u64>,
    points: Vec<f64>,
}

impl Stream {
    fn new(key: u64, rate: f64) -> Self {
        Stream { key, rate, len: POINTS_PER_BLOCK / rate, block: None, points: Vec::new() }
    }

    fn load(&mut self, j: u64) {
        if self.block == Some(j) {
            return;
        }
        let mut rng = Rng::seed_from_u64(self.key);
        rng.set_stream(j);
        let (lo, hi) = (j as f64 * self.len, (j + 1) as f64 * self.len);
        self.points.clear();
        let mut x = lo;
        loop {
            x += exp_sample(&mut rng, self.rate);
            if x >= hi {
                break;
            }
            self.points.push(x);
        }
        self.block = Some(j);
    }

    /// First point strictly after `t ≥ 0`.
    fn next_after(&mut self, t: f64) -> f64 {
        if self.rate <= 0.0 {
            return f64::INFINITY;
        }
        let mut j = (t / self.len).floor() as u64;
        loop {
            self.load(j);
            if let Some(&p) = self.points.iter().find(|&&p| p > t) {
                return p;
            }
            j += 1;
        }
    }
}

/// Per-site Poisson processes shared by every engine built with the same
/// seed: `P1` of rate `k/n` and `P2` of rate `1 − k/n`. A site with one
/// infected neighbour is infected at the first `P1` point after it got that
/// neighbour; with two or more, at the first point of `P1 ∪ P2`.
///
/// Streams are keyed by site coordinates, so KS and modified runs on any
/// boxes see the same points and are ordered pathwise.
#[derive(Debug, Clone)]
pub struct CoupledClocks {
    seed: u64,
    one_rate: f64,
    streams: HashMap<Site, [Stream; 2]>,
}

fn pack(site: Site) -> u64 {
    // Zig-zag both coordinates into 32 bits each; coupled runs are small.
    let z = |v: i64| ((v << 1) ^ (v >> 63)) as u64 & 0xFFFF_FFFF;
    (z(site.x) << 32) | z(site.y)
}

impl CoupledClocks {
    pub fn new(seed: u64, one_rate: f64) -> Self {
        CoupledClocks { seed, one_rate, streams: HashMap::new() }
    }

    fn streams(&mut self, site: Site) -> &mut [Stream; 2] {
        let (seed, r1) = (self.seed, self.one_rate);
        self.streams.entry(site).or_insert_with(|| {
            let make = |class: u64, rate: f64| Stream::new(derive_seed(derive_seed(seed, class), pack(site)), rate);
            [make(0, r1), make(1, 1.0 - r1)]
        })
    }
}

impl Clocks for CoupledClocks {
    fn next(&mut self, _cell: usize, site: Site, count: u8, t: f64, _rng: &mut Rng) -> f64 {
        let s = self.streams(site);
        let p1 = s[0].next_after(t);
        if count >= 2 {
            p1.min(s[1].next_after(t))
        } else {
            p1
        }
    }
}
