use super::closure::DenseGrid;
use super::BootstrapError;
use crate::lattice::{centred_square, BoxIndex, Rect};
use crate::rng::{derive_seed, rng_from_seed, uniform};

/// The box `[−M, M]²` cut into square blocks of side `2m + 1`, starting from
/// the lower-left corner; blocks on the top and right edges may be truncated.
#[derive(Debug, Clone)]
pub struct CoarseGrid {
    big_m: u64,
    small_m: u64,
    p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoarseOutcome {
    pub percolated: bool,
    pub steps: usize,
    pub occupied: usize,
    pub blocks: usize,
}

impl CoarseGrid {
    pub fn new(big_m: u64, small_m: u64, p: f64) -> Result<Self, BootstrapError> {
        if small_m < 1 || big_m < 2 * small_m {
            return Err(BootstrapError::Precondition(format!("need M >= 2m >= 2, got M={big_m}, m={small_m}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(BootstrapError::Precondition(format!("p={p} outside [0,1]")));
        }
        Ok(CoarseGrid { big_m, small_m, p })
    }

    pub fn big_m(&self) -> u64 {
        self.big_m
    }

    pub fn small_m(&self) -> u64 {
        self.small_m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Blocks per side.
    pub fn blocks_per_side(&self) -> u64 {
        (2 * self.big_m + 1).div_ceil(2 * self.small_m + 1)
    }

    /// Site rectangle of block `(i, j)`.
    pub fn block_rect(&self, i: u64, j: u64) -> Rect {
        let side = 2 * self.small_m as i64 + 1;
        let m = self.big_m as i64;
        let x0 = -m + i as i64 * side;
        let y0 = -m + j as i64 * side;
        Rect::new(x0, (x0 + side - 1).min(m), y0, (y0 + side - 1).min(m)).expect("block inside the box")
    }

    fn block_index(&self) -> BoxIndex {
        let b = self.blocks_per_side() as i64;
        BoxIndex::new(Rect::new(0, b - 1, 0, b - 1).expect("at least one block")).expect("block grid fits")
    }

    /// Occupy blocks independently with probability p, in row-major order.
    pub fn sample_occupied(&self, seed: u64) -> Vec<bool> {
        let mut rng = rng_from_seed(seed);
        let n = self.block_index().len();
        (0..n).map(|_| uniform(&mut rng) < self.p).collect()
    }
}

/// Occupy blocks at random, then run synchronous 2-neighbour bootstrap on the
/// block lattice. `steps` counts the rounds that infected at least one block.
pub fn coarse_bootstrap(grid: &CoarseGrid, seed: u64) -> CoarseOutcome {
    let mut g = DenseGrid::new(grid.block_index());
    let occ = grid.sample_occupied(seed);
    let occupied = occ.iter().filter(|o| **o).count();
    g.cells_mut().copy_from_slice(&occ);
    let steps = g.close_synchronous();
    let blocks = g.cells().len();
    CoarseOutcome { percolated: g.count() == blocks, steps, occupied, blocks }
}

/// Fraction of `replicas` site-percolation fills of `S(halfwidth)` at density
/// `p` that span the whole box. Replica `i` draws its site uniforms from
/// `derive_seed(seed, i)`, so results are monotone in `p` for a fixed seed.
pub fn percolation_probability(halfwidth: u64, p: f64, replicas: usize, seed: u64) -> f64 {
    let idx = BoxIndex::new(centred_square(halfwidth).expect("halfwidth fits")).expect("box fits");
    let mut g = DenseGrid::new(idx);
    let mut hits = 0usize;
    for i in 0..replicas {
        let mut rng = rng_from_seed(derive_seed(seed, i as u64));
        for c in g.cells_mut() {
            *c = uniform(&mut rng) < p;
        }
        if g.close() == idx.len() {
            hits += 1;
        }
    }
    hits as f64 / replicas as f64
}

const BISECTION_ROUNDS: usize = 12;

/// Bisection on `p` for the density at which the box percolates with
/// probability one half.
pub fn estimate_pc(halfwidth: u64, replicas: usize, seed: u64) -> Result<f64, BootstrapError> {
    if replicas == 0 {
        return Err(BootstrapError::Precondition("replicas must be at least 1".into()));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_ROUNDS {
        let mid = 0.5 * (lo + hi);
        if percolation_probability(halfwidth, mid, replicas, seed) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_extremes() {
        let full = coarse_bootstrap(&CoarseGrid::new(64, 1, 1.0).unwrap(), 1);
        assert!(full.percolated);
        assert_eq!(full.steps, 0);
        let empty = coarse_bootstrap(&CoarseGrid::new(64, 1, 0.0).unwrap(), 1);
        assert!(!empty.percolated);
        assert_eq!(empty.occupied, 0);
    }

    #[test]
    fn grid_partitions_box() {
        let g = CoarseGrid::new(10, 2, 0.5).unwrap();
        let b = g.blocks_per_side();
        assert_eq!(b, 5);
        let total: u64 = (0..b).flat_map(|i| (0..b).map(move |j| (i, j))).map(|(i, j)| g.block_rect(i, j).area().unwrap()).sum();
        assert_eq!(total, 21 * 21);
        assert!(CoarseGrid::new(3, 2, 0.5).is_err());
        assert!(CoarseGrid::new(4, 2, 1.5).is_err());
    }

    #[test]
    fn single_site_box_gives_half() {
        let p = estimate_pc(0, 2000, 9).unwrap();
        assert!((p - 0.5).abs() < 0.05, "{p}");
    }

    #[test]
    fn coarse_monotone_in_p_with_common_numbers() {
        let mut last = 0;
        for p in [0.02, 0.05, 0.1, 0.2, 0.4] {
            let g = CoarseGrid::new(64, 1, p).unwrap();
            let hits = (0..100).filter(|&i| coarse_bootstrap(&g, derive_seed(3, i)).percolated).count();
            assert!(hits >= last);
            last = hits;
        }
    }
}
