//! Slow reference implementations used to cross-check the fast paths.
//!
//! Nothing here shares code with the engine, the queue-based closure or the
//! Poisson summation.

use crate::lattice::{Rect, Site, SiteSet};
use crate::rng::{exp_sample, rng_from_seed, uniform, Rng};

/// Bootstrap closure by synchronous full sweeps of `bx` until nothing changes.
pub fn brute_closure(a: &SiteSet, bx: &Rect) -> SiteSet {
    let mut cur = a.clone();
    loop {
        let add: Vec<Site> = bx
            .sites()
            .filter(|s| !cur.contains(s) && s.neighbours().filter(|nb| cur.contains(nb)).count() >= 2)
            .collect();
        if add.is_empty() {
            return cur;
        }
        cur.extend(add);
    }
}

/// Relaxation time of the full dynamics on `bx` from the empty state, by a
/// total-rate Gillespie loop that recomputes every hazard at every step.
pub fn naive_gillespie_tau(n: f64, k: f64, bx: &Rect, seed: u64) -> f64 {
    let sites: Vec<Site> = bx.sites().collect();
    let mut infected = vec![false; sites.len()];
    let pos = |s: Site| sites.iter().position(|q| *q == s);
    let origin = pos(Site::ORIGIN).expect("origin in box");
    let mut rng = rng_from_seed(seed);
    let mut t = 0.0;
    let mut rates = vec![0.0; sites.len()];
    while !infected[origin] {
        let mut total = 0.0;
        for (i, s) in sites.iter().enumerate() {
            rates[i] = if infected[i] {
                0.0
            } else {
                let c = s.neighbours().filter(|nb| pos(*nb).is_some_and(|j| infected[j])).count();
                match c {
                    0 => 1.0 / n,
                    1 => k / n,
                    _ => 1.0,
                }
            };
            total += rates[i];
        }
        t += exp_sample(&mut rng, total);
        let mut u = uniform(&mut rng) * total;
        let mut chosen = sites.len() - 1;
        for (i, r) in rates.iter().enumerate() {
            if u < *r {
                chosen = i;
                break;
            }
            u -= r;
        }
        while infected[chosen] {
            chosen -= 1;
        }
        infected[chosen] = true;
    }
    t
}

/// `Σ_{i=from}^{to} Y_i` with independent `Y_i ~ Exp(mean n/(2ki))`.
pub fn sample_y_sum(n: f64, k: f64, from: u64, to: u64, rng: &mut Rng) -> f64 {
    (from..=to).map(|i| exp_sample(rng, 2.0 * k * i as f64 / n)).sum()
}

/// Sum of `count` independent `Exp(1)` variables.
pub fn sample_z_sum(count: u64, rng: &mut Rng) -> f64 {
    (0..count).map(|_| exp_sample(rng, 1.0)).sum()
}

/// Sum of `s` independent exponentials of mean `lambda`.
pub fn sample_exp_sum(s: u64, lambda: f64, rng: &mut Rng) -> f64 {
    (0..s).map(|_| exp_sample(rng, 1.0 / lambda)).sum()
}

/// Internal spanning by the brute-force closure.
pub fn brute_internally_spanned(r: &Rect, a: &SiteSet) -> bool {
    let c = brute_closure(&a.restricted_to(r), r);
    r.sites().all(|s| c.contains(&s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_closure_examples() {
        let bx = Rect::new(-3, 3, -3, 3).unwrap();
        let a: SiteSet = [Site::new(0, 0), Site::new(1, 1)].into_iter().collect();
        assert_eq!(brute_closure(&a, &bx).len(), 4);
        let b: SiteSet = [Site::new(0, 0), Site::new(0, 2)].into_iter().collect();
        assert_eq!(brute_closure(&b, &bx).len(), 3);
    }

    #[test]
    fn naive_single_site_mean() {
        let bx = Rect::new(0, 0, 0, 0).unwrap();
        let reps = 4000;
        let mean = (0..reps).map(|i| naive_gillespie_tau(10.0, 2.0, &bx, i)).sum::<f64>() / reps as f64;
        assert!((mean - 10.0).abs() < 3.0 * 10.0 / (reps as f64).sqrt());
    }
}
