use nucgrow::harness::commands::couple_replica;
use nucgrow::kinetics::{
    al_analogue_violations, containment_check, droplet_times, generous_halfplane_levels, generous_halfplane_time,
    modified_ks_time, random_rectangles_from, random_rectangles_process, relaxation_time, simulate, Cause, Flavor,
    KineticsError, ProcessParams, StopRule,
};
use nucgrow::lattice::{centred_square, Rect, Site, SiteSet};
use nucgrow::rng::derive_seed;

const BUDGET: u64 = 10_000_000;

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Sample mean within 3 standard errors of `expected`.
fn assert_mean(v: &[f64], expected: f64) {
    let (mean, sd) = mean_sd(v);
    let se = sd / (v.len() as f64).sqrt();
    assert!((mean - expected).abs() <= 3.0 * se, "mean {mean} vs {expected} (se {se})");
}

fn origin() -> SiteSet {
    std::iter::once(Site::ORIGIN).collect()
}

fn params(n: f64, k: f64, h: u64, flavor: Flavor) -> ProcessParams {
    ProcessParams::new(n, k, centred_square(h).unwrap(), flavor).unwrap()
}

#[test]
fn full_box_gives_zero() {
    let p = params(100.0, 5.0, 3, Flavor::Ds);
    let all: SiteSet = p.bx.sites().collect();
    let tr = simulate(&p, &all, StopRule::OriginInfected, 1, BUDGET).unwrap();
    assert_eq!(tr.t_end, 0.0);
    assert_eq!(tr.origin_time(), Some(0.0));
}

#[test]
fn single_site_box_is_exponential_mean_n() {
    let n = 250.0;
    let p = params(n, 1.0, 0, Flavor::Ds);
    let v: Vec<f64> = (0..10_000).map(|i| relaxation_time(&p, derive_seed(11, i), BUDGET).unwrap()).collect();
    assert_mean(&v, n);
}

#[test]
fn ks_first_growth_mean() {
    let (n, k) = (1000.0, 10.0);
    let p = params(n, k, 3, Flavor::Ks);
    let want = n / (4.0 * k);
    let via_droplet: Vec<f64> =
        (0..10_000).map(|i| droplet_times(&p, 1, derive_seed(12, i), BUDGET).unwrap().t_minus(1).unwrap()).collect();
    assert_mean(&via_droplet, want);
    // Second route: a 1×2 rectangle has semi-perimeter 3.
    let via_rect: Vec<f64> = (0..10_000)
        .map(|i| simulate(&p, &origin(), StopRule::RectReached(3), derive_seed(13, i), BUDGET).unwrap().t_end)
        .collect();
    assert_mean(&via_rect, want);
}

#[test]
fn traces_are_deterministic_across_threads() {
    let p = params(400.0, 20.0, 6, Flavor::Ds);
    let render = |seed: u64| {
        let tr = simulate(&p, &SiteSet::new(), StopRule::BoxFilled, seed, BUDGET).unwrap();
        tr.check().unwrap();
        let mut buf = Vec::new();
        tr.write_jsonl(&mut buf).unwrap();
        buf
    };
    let here: Vec<Vec<u8>> = (0..8).map(render).collect();
    let there: Vec<Vec<u8>> = std::thread::scope(|s| {
        let hs: Vec<_> = (0..8).map(|seed| s.spawn(move || render(seed))).collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(here, there);
    assert_ne!(here[0], here[1]);
}

#[test]
fn traces_pass_consistency_check() {
    for (flavor, init) in [(Flavor::Ds, SiteSet::new()), (Flavor::Ks, origin()), (Flavor::ModifiedKs, origin())] {
        let p = params(100.0, 10.0, 5, flavor);
        for seed in 0..20 {
            let tr = simulate(&p, &init, StopRule::BoxFilled, seed, BUDGET).unwrap();
            tr.check().unwrap();
            assert_eq!(tr.len() + init.len(), p.bx.area().unwrap() as usize);
            if flavor != Flavor::Ds {
                assert!(tr.events.iter().all(|e| e.cause != Cause::Nucleation));
            }
            if flavor == Flavor::ModifiedKs {
                assert!(tr.events.iter().all(|e| e.cause != Cause::TwoNeighbour));
            }
        }
    }
}

#[test]
fn budget_is_reported_distinctly() {
    let p = params(10.0, 2.0, 10, Flavor::Ds);
    let err = simulate(&p, &SiteSet::new(), StopRule::BoxFilled, 3, 5).unwrap_err();
    assert!(matches!(err, KineticsError::Budget { budget: 5, .. }));
}

#[test]
fn modified_ks_m3_mean() {
    let (n, k) = (500.0, 5.0);
    let p = params(n, k, 4, Flavor::ModifiedKs);
    let v: Vec<f64> = (0..10_000).map(|i| modified_ks_time(&origin(), &p, 3, derive_seed(14, i), BUDGET).unwrap()).collect();
    assert_mean(&v, n / (4.0 * k));
}

#[test]
fn modified_ks_already_satisfied() {
    let p = params(500.0, 5.0, 10, Flavor::ModifiedKs);
    let a: SiteSet = [Site::new(-6, -6), Site::new(0, 0), Site::new(6, 6)].into_iter().collect();
    for m in 0..=6 {
        assert_eq!(modified_ks_time(&a, &p, m, 1, BUDGET).unwrap(), 0.0);
    }
    assert!(modified_ks_time(&a, &p, 7, 1, BUDGET).unwrap() > 0.0);
}

#[test]
fn coupled_modified_time_below_rect_time() {
    let bx = centred_square(30).unwrap();
    for i in 0..1000 {
        let s = couple_replica(1e4, 10.0, bx, 20, derive_seed(15, i), BUDGET).unwrap();
        assert!(s.t_star <= s.t_rect, "replica {i}: {} > {}", s.t_star, s.t_rect);
    }
}

#[test]
fn droplet_times_ordered() {
    let p = params(1e4, 50.0, 16, Flavor::Ks);
    for seed in 0..30 {
        let d = droplet_times(&p, 15, seed, BUDGET).unwrap();
        let mut prev_rect = 0.0;
        for m in 1..=15 {
            let (lo, hi, r) = (d.t_minus(m).unwrap(), d.t_plus(m).unwrap(), d.t_rect(m).unwrap());
            assert!(lo <= hi);
            assert!(r >= prev_rect);
            prev_rect = r;
        }
    }
}

#[test]
fn halfplane_first_level_mean() {
    let (n, k, h) = (100.0, 10.0, 5u64);
    let p = params(n, k, 0, Flavor::GenerousHalfPlane);
    let v: Vec<f64> =
        (0..10_000).map(|i| generous_halfplane_time(&p, 1, h, derive_seed(16, i), BUDGET).unwrap()).collect();
    assert_mean(&v, n / (k * (2 * h + 1) as f64));
}

#[test]
fn halfplane_levels_nondecreasing_and_rarely_fast() {
    let (n, k, m) = (1e4, 100.0, 40u64);
    let p = params(n, k, 0, Flavor::GenerousHalfPlane);
    let h = (m as f64 * (n / k).sqrt()).round() as u64;
    let fast = m as f64 / 100.0 * (n / k).sqrt();
    let runs = 100;
    let mut early = 0;
    for i in 0..runs {
        let lv = generous_halfplane_levels(&p, m, h, derive_seed(17, i), BUDGET).unwrap();
        assert!(lv.windows(2).all(|w| w[0] <= w[1]));
        if lv[m as usize - 1] < fast {
            early += 1;
        }
    }
    assert!(early as f64 <= 0.05 * runs as f64, "{early} of {runs} runs below {fast}");
}

#[test]
fn random_rectangles_examples() {
    let p = params(1e4, 2e3, 40, Flavor::Ds);
    let empty = random_rectangles_from(&p, &[], 5.0, 1);
    assert!(empty.spanned.is_empty() && empty.one_neighbour_events == 0);
    let single = random_rectangles_from(&p, &[Site::ORIGIN], 1e-12, 1);
    assert_eq!(single.spanned, vec![Rect::point(Site::ORIGIN).unwrap()]);
    for seed in 0..20 {
        let out = random_rectangles_process(&p, 7.85, seed).unwrap();
        assert_eq!(al_analogue_violations(&out.spanned, 0), 0);
    }
}

#[test]
fn containment_trivial_cases() {
    let p = params(1e4, 2e3, 60, Flavor::Ds);
    assert_eq!(containment_check(&p, 0.0, 20, 1, BUDGET).unwrap(), 1.0);
    let q = params(1e4, 1e4, 60, Flavor::Ds);
    assert_eq!(containment_check(&q, 1e-3, 20, 2, BUDGET).unwrap(), 1.0);
}
