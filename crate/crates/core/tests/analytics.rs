use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{Binomial, DiscreteCDF};
use statrs::function::gamma::gamma_lr;

use nucgrow::analytics::{
    dkw_epsilon, dominance_gap, exp_sum_tail, ks_two_sample, nucleation_count_tail, predict_droplet, predict_tau,
    quantile_ci, DropletPhase, Ecdf, Regime,
};

fn exp(rng: &mut ChaCha20Rng, mean: f64) -> f64 {
    -mean * (1.0 - rng.random::<f64>()).ln()
}

/// Empirical frequency within 3 binomial standard errors of `p`.
fn assert_freq(hits: usize, trials: usize, p: f64, what: &str) {
    let f = hits as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt().max(1.0 / trials as f64);
    assert!((f - p).abs() <= 3.0 * se, "{what}: frequency {f} vs {p}");
}

#[test]
fn exp_sum_tail_grid() {
    let mut rng = ChaCha20Rng::seed_from_u64(41);
    let trials = 20_000;
    for s in [1u64, 3, 12] {
        for lambda in [0.2, 1.0, 7.5] {
            for t_over_mean in [0.5, 1.0, 1.5] {
                let t = t_over_mean * s as f64 * lambda;
                let want = exp_sum_tail(s, lambda, t);
                assert!((want - gamma_lr(s as f64, t / lambda)).abs() < 1e-12);
                let hits = (0..trials).filter(|_| (0..s).map(|_| exp(&mut rng, lambda)).sum::<f64>() <= t).count();
                assert_freq(hits, trials, want, &format!("s={s} lambda={lambda} t={t}"));
            }
        }
    }
}

#[test]
fn nucleation_tail_grid() {
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    let trials = 20_000;
    for (area, t, n) in [(25u64, 1.0f64, 10.0f64), (100, 3.0, 500.0), (400, 0.5, 100.0)] {
        let p = 1.0 - (-t / n).exp();
        let law = Binomial::new(p, area).unwrap();
        for ell in [1u64, 2, 5] {
            let got = nucleation_count_tail(area, t, n, ell).unwrap();
            let want = 1.0 - law.cdf(ell - 1);
            assert!((got - want).abs() <= 1e-10 * want.max(1e-300) + 1e-14, "area={area} ell={ell}: {got} vs {want}");
            let hits = (0..trials)
                .filter(|_| (0..area).filter(|_| exp(&mut rng, n) <= t).count() as u64 >= ell)
                .count();
            assert_freq(hits, trials, got, &format!("area={area} ell={ell}"));
        }
    }
}

#[test]
fn median_interval_coverage() {
    let mut rng = ChaCha20Rng::seed_from_u64(43);
    let rounds = 2000;
    let covered = (0..rounds)
        .filter(|_| {
            let v: Vec<f64> = (0..60).map(|_| exp(&mut rng, 1.0)).collect();
            let e = quantile_ci(&v, 0.5).unwrap();
            e.ci_low <= std::f64::consts::LN_2 && std::f64::consts::LN_2 <= e.ci_high
        })
        .count();
    // Exact-rank intervals are conservative.
    assert!(covered as f64 / rounds as f64 >= 0.93, "coverage {covered}/{rounds}");
}

#[test]
fn dominance_gap_on_shifted_samples() {
    let mut rng = ChaCha20Rng::seed_from_u64(44);
    let a: Vec<f64> = (0..4000).map(|_| exp(&mut rng, 1.0)).collect();
    let b: Vec<f64> = a.iter().map(|x| x + 0.3).collect();
    assert!(dominance_gap(&Ecdf::new(&a), &Ecdf::new(&b)) <= 0.0);
    assert!(dominance_gap(&Ecdf::new(&b), &Ecdf::new(&a)) > 0.2);
    let eps = dkw_epsilon(4000, 0.05);
    assert!((eps - ((2.0f64 / 0.05).ln() / 8000.0).sqrt()).abs() < 1e-15);
    let c: Vec<f64> = (0..4000).map(|_| exp(&mut rng, 1.0)).collect();
    assert!(ks_two_sample(&a, &c).p_value > 0.001);
    assert!(ks_two_sample(&a, &b).p_value < 1e-6);
}

#[test]
fn regime_predictions() {
    let b = predict_tau(1e6, 1e3).unwrap();
    assert_eq!(b.regime, Regime::B);
    let want = 0.25 * 1e3 * (1e3 / 1e6f64.ln()).ln();
    assert!((b.tau_predicted - want).abs() < 1e-9 && (b.tau_predicted - 1070.0).abs() < 1.0);
    assert_eq!(predict_tau(1e6, 1.0).unwrap().nominal, Regime::A);
    assert_eq!(predict_tau(1e6, 1e6 / 2.0).unwrap().nominal, Regime::C);
    assert_eq!(predict_tau(1e6, 14.0).unwrap().regime, Regime::Boundary);
    assert!(predict_tau(1e6, 0.5).is_err());
    assert!(predict_tau(1e6, 2e6).is_err());
}

#[test]
fn droplet_phases() {
    let acc = predict_droplet(1e6, 100.0, 100).unwrap();
    assert_eq!(acc.phase, DropletPhase::Accelerating);
    let term = predict_droplet(1e4, 100.0, 1000).unwrap();
    assert_eq!(term.phase, DropletPhase::Terminal);
}
