use super::{Flavor, KineticsError, ProcessParams};
use crate::rng::{below, exp_sample, rng_from_seed, uniform};

/// Window half-width at which lateral truncation stops mattering for level
/// `m`: `⌈m·√(n/k)⌉`.
pub fn recommended_halfwidth(n: f64, k: f64, m: u64) -> u64 {
    (m as f64 * (n / k).sqrt()).ceil() as u64
}

/// Fenwick tree over nonnegative integer weights.
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(len: usize) -> Self {
        Fenwick { tree: vec![0; len + 1] }
    }

    fn add(&mut self, i: usize, delta: i64) {
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] = self.tree[j].wrapping_add(delta as u64);
            j += j & j.wrapping_neg();
        }
    }

    fn total(&self) -> u64 {
        let mut j = self.tree.len() - 1;
        let mut s = 0u64;
        while j > 0 {
            s = s.wrapping_add(self.tree[j]);
            j &= j - 1;
        }
        s
    }

    /// Index `i` with prefix(i) ≤ target < prefix(i + 1), and the offset
    /// of `target` inside weight `i`.
    fn find(&self, mut target: u64) -> (usize, u64) {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        (pos, target)
    }
}

/// Column heights of the generous half-plane process on a periodic window.
/// Column `x` is infected exactly at heights `≤ h[x]`.
struct HalfPlane {
    h: Vec<i64>,
    w: usize,
    weights: Vec<u64>,
    fen: Fenwick,
}

impl HalfPlane {
    fn new(w: usize) -> Self {
        HalfPlane { h: vec![0; w], w, weights: vec![0; w], fen: Fenwick::new(w) }
    }

    fn left(&self, x: usize) -> usize {
        (x + self.w - 1) % self.w
    }

    fn right(&self, x: usize) -> usize {
        (x + 1) % self.w
    }

    fn gaps(&self, x: usize) -> (u64, u64) {
        let hx = self.h[x];
        let gl = (self.h[self.left(x)] - hx).max(0) as u64;
        let gr = (self.h[self.right(x)] - hx).max(0) as u64;
        (gl, gr)
    }

    fn refresh(&mut self, x: usize) {
        let (gl, gr) = self.gaps(x);
        let w = gl + gr;
        let delta = w as i64 - self.weights[x] as i64;
        if delta != 0 {
            self.fen.add(x, delta);
            self.weights[x] = w;
        }
    }

    fn set(&mut self, x: usize, y: i64) {
        self.h[x] = y;
        let (l, r) = (self.left(x), self.right(x));
        self.refresh(x);
        self.refresh(l);
        self.refresh(r);
    }
}

/// First-passage times `X*_j` for `j = 1..=m` (entry `j − 1`) of the
/// generous half-plane process started from `{y ≤ 0}`, on a window of
/// `2·halfwidth + 1` columns with periodic wrap.
///
/// Each infected site infects the site above at rate `k/n` and each
/// horizontal neighbour at rate 1; the site below is infected at once, so the
/// state is a height profile.
pub fn generous_halfplane_levels(
    params: &ProcessParams,
    m: u64,
    halfwidth: u64,
    seed: u64,
    budget: u64,
) -> Result<Vec<f64>, KineticsError> {
    params.validate()?;
    if params.flavor != Flavor::GenerousHalfPlane {
        return Err(KineticsError::InvalidParams("expected flavor GenerousHalfPlane".into()));
    }
    if m == 0 {
        return Err(KineticsError::InvalidParams("m must be at least 1".into()));
    }
    if halfwidth < recommended_halfwidth(params.n, params.k, m) {
        log::warn!(
            "half-plane window {halfwidth} is narrower than m*sqrt(n/k) = {}; lateral truncation may bias X*_m",
            recommended_halfwidth(params.n, params.k, m)
        );
    }
    let w = usize::try_from(2 * halfwidth + 1).map_err(|_| KineticsError::InvalidParams("window too wide".into()))?;
    let up_rate = params.one_neighbour_rate();
    let up_total = w as f64 * up_rate;
    let mut hp = HalfPlane::new(w);
    let mut rng = rng_from_seed(seed);
    let mut levels = Vec::with_capacity(m as usize);
    let mut t = 0.0;
    let mut top = 0i64;
    let mut events = 0u64;
    while (levels.len() as u64) < m {
        if events >= budget {
            return Err(KineticsError::Budget { budget, t });
        }
        let lateral = hp.fen.total();
        let total = up_total + lateral as f64;
        t += exp_sample(&mut rng, total);
        events += 1;
        let (x, y) = if uniform(&mut rng) * total < up_total {
            let x = below(&mut rng, w);
            (x, hp.h[x] + 1)
        } else {
            let (x, off) = hp.fen.find(below(&mut rng, lateral as usize) as u64);
            let (gl, _) = hp.gaps(x);
            let off = if off < gl { off } else { off - gl };
            (x, hp.h[x] + 1 + off as i64)
        };
        hp.set(x, y);
        if y > top {
            for _ in top..y.min(m as i64) {
                levels.push(t);
            }
            top = y;
        }
    }
    Ok(levels)
}

/// `X*_m`: first time a site at height `m` is infected.
pub fn generous_halfplane_time(
    params: &ProcessParams,
    m: u64,
    halfwidth: u64,
    seed: u64,
    budget: u64,
) -> Result<f64, KineticsError> {
    let levels = generous_halfplane_levels(params, m, halfwidth, seed, budget)?;
    Ok(*levels.last().expect("m >= 1 levels"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fenwick_find() {
        let mut f = Fenwick::new(5);
        for (i, w) in [2u64, 0, 3, 1, 0].iter().enumerate() {
            f.add(i, *w as i64);
        }
        assert_eq!(f.total(), 6);
        assert_eq!(f.find(0), (0, 0));
        assert_eq!(f.find(1), (0, 1));
        assert_eq!(f.find(2), (2, 0));
        assert_eq!(f.find(4), (2, 2));
        assert_eq!(f.find(5), (3, 0));
        f.add(2, -3);
        assert_eq!(f.find(2), (3, 0));
    }

    #[test]
    fn levels_nondecreasing() {
        let p = ProcessParams::new(1e4, 100.0, crate::lattice::centred_square(0).unwrap(), Flavor::GenerousHalfPlane).unwrap();
        let lv = generous_halfplane_levels(&p, 20, 200, 3, u64::MAX).unwrap();
        assert_eq!(lv.len(), 20);
        assert!(lv.windows(2).all(|w| w[0] <= w[1]));
    }
}
