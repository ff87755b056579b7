use crate::bootstrap::{MergeEngine, MergeRecord};
use crate::lattice::{Rect, Site};
use crate::rng::{below, exp_sample, rng_from_seed, uniform, Rng};

use super::{Flavor, KineticsError, ProcessParams};

/// Sites of `bx` nucleating by time `t`, each independently with probability
/// `1 − e^{−t/n}`, in row-major order.
pub fn sample_nucleations(bx: &Rect, n: f64, t: f64, rng: &mut Rng) -> Vec<Site> {
    let p = -(-t / n).exp_m1();
    let mut out = Vec::new();
    if p <= 0.0 {
        return out;
    }
    let area = bx.area().expect("box area fits") as usize;
    if p >= 1.0 {
        return bx.sites().collect();
    }
    // Geometric skips between successes.
    let log_q = (-p).ln_1p();
    let w = bx.width() as usize;
    let mut i = 0usize;
    loop {
        let u = uniform(rng);
        let skip = ((-u).ln_1p() / log_q).floor();
        if skip >= (area - i) as f64 {
            break;
        }
        i += skip as usize;
        out.push(Site::new(bx.x0() + (i % w) as i64, bx.y0() + (i / w) as i64));
        i += 1;
        if i >= area {
            break;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomRectanglesOutput {
    pub nucleations: Vec<Site>,
    pub log: Vec<MergeRecord>,
    /// Every rectangle that appeared, in order of first appearance.
    pub spanned: Vec<Rect>,
    pub final_rects: Vec<Rect>,
    pub one_neighbour_events: usize,
}

/// Outer boundary sites of `r` lying in `bx`, counted side by side.
fn boundary_count(r: &Rect, bx: &Rect) -> u64 {
    let span = |lo: i64, hi: i64, blo: i64, bhi: i64| (hi.min(bhi) - lo.max(blo) + 1).max(0) as u64;
    let mut c = 0;
    if r.y0() - 1 >= bx.y0() {
        c += span(r.x0(), r.x1(), bx.x0(), bx.x1());
    }
    if r.y1() + 1 <= bx.y1() {
        c += span(r.x0(), r.x1(), bx.x0(), bx.x1());
    }
    if r.x0() - 1 >= bx.x0() {
        c += span(r.y0(), r.y1(), bx.y0(), bx.y1());
    }
    if r.x1() + 1 <= bx.x1() {
        c += span(r.y0(), r.y1(), bx.y0(), bx.y1());
    }
    c
}

fn push_unique(spanned: &mut indexmap::IndexSet<Rect>, r: Rect) {
    spanned.insert(r);
}

/// The random rectangles process on a given nucleation set.
///
/// After the rectangles process on `a`, 1-neighbour infections arrive at
/// total rate `(k/n)·#(in-box boundary sites)`; each adds a 1×1 rectangle at
/// a uniform boundary site and the collection is merged again at frozen
/// time, for a total duration `t`.
pub fn random_rectangles_from(params: &ProcessParams, a: &[Site], t: f64, seed: u64) -> RandomRectanglesOutput {
    let bx = params.bx;
    let rate = params.one_neighbour_rate();
    let mut rng = rng_from_seed(seed);
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut spanned = indexmap::IndexSet::new();
    let items: Vec<(Rect, ())> = sorted.iter().map(|s| (Rect::point(*s).expect("valid site"), ())).collect();
    for (r, _) in &items {
        push_unique(&mut spanned, *r);
    }
    let mut engine = MergeEngine::from_items(2, items);
    engine.merge_all(|_, _| ());
    for rec in engine.log() {
        push_unique(&mut spanned, rec.into);
    }
    let mut logged = engine.log().len();
    let mut clock = 0.0;
    let mut arrivals = 0;
    loop {
        let rects: Vec<Rect> = engine.rects().copied().collect();
        let counts: Vec<u64> = rects.iter().map(|r| boundary_count(r, &bx)).collect();
        let total: u64 = counts.iter().sum();
        if total == 0 {
            break;
        }
        clock += exp_sample(&mut rng, total as f64 * rate);
        if clock > t {
            break;
        }
        let mut pick = below(&mut rng, total as usize) as u64;
        let (mut which, mut offset) = (0, 0);
        for (i, &c) in counts.iter().enumerate() {
            if pick < c {
                which = i;
                offset = pick;
                break;
            }
            pick -= c;
        }
        let r = rects[which];
        let site = r.outer_boundary().filter(|s| bx.contains(*s)).nth(offset as usize).expect("offset within boundary");
        let point = Rect::point(site).expect("valid site");
        push_unique(&mut spanned, point);
        engine.push(point, ());
        engine.merge_all(|_, _| ());
        for rec in &engine.log()[logged..] {
            push_unique(&mut spanned, rec.into);
        }
        logged = engine.log().len();
        arrivals += 1;
    }
    RandomRectanglesOutput {
        nucleations: sorted,
        final_rects: engine.rects().copied().collect(),
        log: engine.take_log(),
        spanned: spanned.into_iter().collect(),
        one_neighbour_events: arrivals,
    }
}

/// Draw nucleations in the box up to time `t`, then run
/// [`random_rectangles_from`] for a further duration `t`.
pub fn random_rectangles_process(params: &ProcessParams, t: f64, seed: u64) -> Result<RandomRectanglesOutput, KineticsError> {
    params.validate()?;
    if params.flavor != Flavor::Ds {
        return Err(KineticsError::InvalidParams("expected flavor DS".into()));
    }
    let mut rng = rng_from_seed(seed);
    let a = sample_nucleations(&params.bx, params.n, t, &mut rng);
    Ok(random_rectangles_from(params, &a, t, crate::rng::derive_seed(seed, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::centred_square;

    #[test]
    fn boundary_count_clips() {
        let bx = centred_square(2).unwrap();
        assert_eq!(boundary_count(&Rect::new(0, 0, 0, 0).unwrap(), &bx), 4);
        assert_eq!(boundary_count(&Rect::new(-2, -2, -2, -2).unwrap(), &bx), 2);
        assert_eq!(boundary_count(&bx, &bx), 0);
        let r = Rect::new(-1, 0, 0, 2).unwrap();
        assert_eq!(boundary_count(&r, &bx) as usize, r.outer_boundary().filter(|s| bx.contains(*s)).count());
    }

    #[test]
    fn nucleation_density() {
        let bx = centred_square(50).unwrap();
        let mut rng = rng_from_seed(1);
        let n = 1000.0;
        let t = 100.0;
        let reps = 50;
        let total: usize = (0..reps).map(|_| sample_nucleations(&bx, n, t, &mut rng).len()).sum();
        let p = 1.0 - (-t / n).exp();
        let mean = bx.area().unwrap() as f64 * p;
        let sd = (bx.area().unwrap() as f64 * p * (1.0 - p) / reps as f64).sqrt();
        assert!((total as f64 / reps as f64 - mean).abs() < 4.0 * sd);
    }

    #[test]
    fn empty_and_tiny() {
        let p = ProcessParams::new(100.0, 10.0, centred_square(5).unwrap(), Flavor::Ds).unwrap();
        let out = random_rectangles_from(&p, &[], 10.0, 1);
        assert!(out.spanned.is_empty());
        let one = random_rectangles_from(&p, &[Site::ORIGIN], 1e-12, 1);
        assert_eq!(one.spanned, vec![Rect::point(Site::ORIGIN).unwrap()]);
    }
}
