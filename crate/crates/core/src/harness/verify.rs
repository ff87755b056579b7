//! The `verify` suite: exact oracles, distributional identities, coupling
//! dominance and scaling-band checks at pinned desk-scale parameters.
//!
//! Results go to `<out>/verify/`: `properties.csv` (one row per check),
//! `samples.csv` (replica-level values), `report.json` and `manifest.json`.
//! Only the last two carry wall-clock times.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::commands::{couple_replica, default_generous_halfwidth, generous_replica, CoupleStats, GenerousSample};
use super::config::config_hash;
use super::manifest::{RunManifest, RunRecord};
use super::output::{write_csv, write_samples, SampleRow};
use super::runner::{par_map, run_jobs, Job, RunOptions};
use super::{HarnessError, EXIT_OK, EXIT_PROPERTY};
use crate::analytics::{
    exp_sum_tail, ks_two_sample, nucleation_count_tail, predict_droplet, predict_tau, quantile_ci, Estimate,
};
use crate::bootstrap::{al_witness, rectangles_process};
use crate::kinetics::{droplet_times_with, relaxation_time, Flavor, IndependentClocks, KineticsError, ProcessParams};
use crate::lattice::{centred_square, semi_perimeter, Rect, Site, SiteSet};
use crate::oracle::{brute_closure, brute_internally_spanned, naive_gillespie_tau, sample_exp_sum};
use crate::rng::{below, derive_seed, rng_from_seed};

fn default_budget() -> u64 {
    crate::kinetics::DEFAULT_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureSettings {
    pub instances: usize,
    pub max_seeds: usize,
    pub side: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSettings {
    pub n: f64,
    pub k: f64,
    pub box_halfwidth: u64,
    pub samples: usize,
    pub min_p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonSettings {
    pub draws: usize,
    pub s: Vec<u64>,
    pub lambda: Vec<f64>,
    pub sigmas: f64,
    pub closed_form_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSettings {
    pub n: f64,
    pub k: f64,
    pub m: u64,
    pub box_halfwidth: u64,
    pub replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DropletSettings {
    pub n: f64,
    pub k: f64,
    pub m: u64,
    pub box_halfwidth: u64,
    pub replicas: usize,
    /// Allowed range of median `T⁺(m)` over the prediction.
    pub band: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxationSettings {
    pub n: f64,
    pub k: f64,
    pub box_halfwidth: u64,
    pub replicas: usize,
    pub factor: f64,
    /// Largest relative change of the median when the half-width doubles.
    pub max_shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneSettings {
    pub n: f64,
    pub k: Vec<f64>,
    pub box_halfwidth: u64,
    pub replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainmentSettings {
    pub n: f64,
    pub k: f64,
    pub t: f64,
    #[serde(default)]
    pub box_halfwidth: Option<u64>,
    pub replicas: usize,
    pub min_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NucleationSettings {
    pub accelerating_n: f64,
    pub accelerating_k: f64,
    pub terminal_n: f64,
    pub terminal_k: f64,
    /// Small constant in the terminal-phase time scale.
    pub terminal_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub base_seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Check keys to run; empty runs all of them.
    #[serde(default)]
    pub only: Vec<String>,
    pub closure: ClosureSettings,
    pub engine: EngineSettings,
    pub poisson: PoissonSettings,
    pub coupling: CouplingSettings,
    pub accelerating: DropletSettings,
    pub terminal: DropletSettings,
    pub relaxation: RelaxationSettings,
    pub monotone: MonotoneSettings,
    pub containment: ContainmentSettings,
    pub nucleation: NucleationSettings,
}

/// Keys of every check, in report order.
pub const CHECKS: [&str; 12] = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "rr-al", "11"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub key: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub dir: PathBuf,
    pub results: Vec<CriterionResult>,
    pub manifest: RunManifest,
}

impl VerifyReport {
    pub fn get(&self, key: &str) -> Option<&CriterionResult> {
        self.results.iter().find(|r| r.key == key)
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            EXIT_OK
        } else {
            EXIT_PROPERTY
        }
    }

    /// One line per check.
    pub fn lines(&self) -> Vec<String> {
        self.results
            .iter()
            .map(|r| format!("[{}] {} {}: {}", r.key, if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail))
            .collect()
    }
}

fn result(key: &str, name: &str, pass: bool, detail: String) -> CriterionResult {
    CriterionResult { key: key.into(), name: name.into(), pass, detail, wall_seconds: None }
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    opts: &'a RunOptions,
    rows: Vec<SampleRow>,
    runs: Vec<RunRecord>,
    points: HashMap<u64, usize>,
}

impl Ctx<'_> {
    /// Run `replicas` jobs of stream `stream`; replica `r` gets seed
    /// `derive_seed(derive_seed(base_seed, stream), r)`. Budget exhaustion is
    /// an error here, not a censored value.
    fn fan<T: Send>(
        &mut self,
        stream: u64,
        replicas: usize,
        f: impl Fn(u64) -> Result<T, KineticsError> + Sync + Send,
    ) -> Result<Vec<(Job, T)>, HarnessError> {
        let sub = derive_seed(self.cfg.base_seed, stream);
        let next = self.points.len();
        let point = *self.points.entry(stream).or_insert(next);
        let base = self.runs.len() as u64;
        let js: Vec<Job> = (0..replicas)
            .map(|r| Job { run_id: base + r as u64, point, replica: r, seed: derive_seed(sub, r as u64) })
            .collect();
        let done = run_jobs(self.opts.jobs, &js, |job| f(job.seed).map(Some));
        let mut out = Vec::with_capacity(done.len());
        for c in done {
            self.runs.push(c.record());
            out.push((c.job, c.value?.expect("values are present on success")));
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn push_rows(
        &mut self,
        runs: &[(Job, f64)],
        n: f64,
        k: f64,
        h: u64,
        flavor: Flavor,
        observable: &str,
        m: Option<u64>,
    ) {
        for (job, v) in runs {
            self.rows.push(SampleRow {
                run_id: job.run_id,
                seed: job.seed,
                n: Some(n),
                k: Some(k),
                box_halfwidth: h,
                flavor: flavor.as_str().into(),
                observable: observable.into(),
                m,
                value: Some(*v),
            });
        }
    }
}

fn median_of(values: &[f64]) -> Result<Estimate, HarnessError> {
    Ok(quantile_ci(values, 0.5)?)
}

fn ds(n: f64, k: f64, h: u64) -> Result<ProcessParams, HarnessError> {
    ProcessParams::new(n, k, centred_square(h)?, Flavor::Ds).map_err(|e| HarnessError::Config(e.to_string()))
}

/// Random instance `i` of the closure suite: up to `max_seeds` sites in a
/// `side × side` box.
fn closure_instance(cfg: &ClosureSettings, seed: u64) -> SiteSet {
    let mut rng = rng_from_seed(seed);
    let count = 1 + below(&mut rng, cfg.max_seeds);
    let side = cfg.side as usize;
    (0..count)
        .map(|_| {
            let x = below(&mut rng, side) as i64;
            let y = below(&mut rng, side) as i64;
            Site::new(x, y)
        })
        .collect()
}

#[derive(Debug, Default, Clone, Copy)]
struct ClosureOutcome {
    mismatch: bool,
    rects: usize,
    pairs: usize,
    al_failures: usize,
}

fn check_closure_instance(a: &SiteSet, bx: &Rect) -> Result<ClosureOutcome, HarnessError> {
    let state = rectangles_process(a);
    let mismatch = state.union_sites().sorted() != brute_closure(a, bx).sorted();
    let mut seen: Vec<Rect> = state.appearances(&a.sorted());
    seen.sort();
    seen.dedup();
    let mut spanned_cache: HashMap<Rect, bool> = HashMap::new();
    let mut spanned = |r: &Rect| *spanned_cache.entry(*r).or_insert_with(|| brute_internally_spanned(r, a));
    let mut out = ClosureOutcome { mismatch, rects: seen.len(), ..Default::default() };
    for r in &seen {
        if !spanned(r) {
            out.al_failures += 1;
            continue;
        }
        for ell in 1..=semi_perimeter(r) {
            out.pairs += 1;
            let ok = match al_witness(r, a, ell)? {
                Some(w) => {
                    let phi = semi_perimeter(&w);
                    r.contains_rect(&w) && (ell..=2 * ell).contains(&phi) && spanned(&w)
                }
                None => false,
            };
            if !ok {
                out.al_failures += 1;
            }
        }
    }
    Ok(out)
}

fn closure_checks(ctx: &mut Ctx) -> Result<Vec<CriterionResult>, HarnessError> {
    let c = &ctx.cfg.closure;
    if c.side == 0 || c.max_seeds == 0 {
        return Err(HarnessError::Config("closure.side and closure.max_seeds must be positive".into()));
    }
    let bx = Rect::new(0, c.side as i64 - 1, 0, c.side as i64 - 1)?;
    let sub = derive_seed(ctx.cfg.base_seed, 100);
    let ids: Vec<u64> = (0..c.instances as u64).collect();
    let outcomes = par_map(ctx.opts.jobs, &ids, |&i| check_closure_instance(&closure_instance(c, derive_seed(sub, i)), &bx));
    let outcomes: Vec<ClosureOutcome> = outcomes.into_iter().collect::<Result<_, _>>()?;
    let mismatches = outcomes.iter().filter(|o| o.mismatch).count();
    let rects: usize = outcomes.iter().map(|o| o.rects).sum();
    let pairs: usize = outcomes.iter().map(|o| o.pairs).sum();
    let failures: usize = outcomes.iter().map(|o| o.al_failures).sum();
    Ok(vec![
        result(
            "1",
            "closure oracle equivalence",
            mismatches == 0,
            format!("{mismatches} mismatches over {} instances", c.instances),
        ),
        result(
            "2",
            "AL doubling",
            failures == 0,
            format!("{failures} failures over {rects} spanned rectangles and {pairs} (R, l) pairs"),
        ),
    ])
}

fn engine_check(ctx: &mut Ctx) -> Result<CriterionResult, HarnessError> {
    let e = ctx.cfg.engine.clone();
    let p = ds(e.n, e.k, e.box_halfwidth)?;
    let budget = ctx.cfg.budget;
    let engine = ctx.fan(300, e.samples, |seed| relaxation_time(&p, seed, budget))?;
    let bx = p.bx;
    let oracle_runs = ctx.fan(301, e.samples, |seed| Ok(naive_gillespie_tau(e.n, e.k, &bx, seed)))?;
    ctx.push_rows(&engine, e.n, e.k, e.box_halfwidth, Flavor::Ds, "tau", None);
    ctx.push_rows(&oracle_runs, e.n, e.k, e.box_halfwidth, Flavor::Ds, "tau_reference", None);
    let a: Vec<f64> = engine.iter().map(|(_, v)| *v).collect();
    let oracle: Vec<f64> = oracle_runs.iter().map(|(_, v)| *v).collect();
    let ks = ks_two_sample(&a, &oracle);
    Ok(result(
        "3",
        "engine exactness",
        ks.p_value > e.min_p_value,
        format!("KS D={:.5} p={:.4} (need p > {}), {} samples each", ks.statistic, ks.p_value, e.min_p_value, e.samples),
    ))
}

fn poisson_check(ctx: &mut Ctx) -> Result<CriterionResult, HarnessError> {
    let c = ctx.cfg.poisson.clone();
    let sub = derive_seed(ctx.cfg.base_seed, 400);
    let grid: Vec<(u64, f64)> = c.s.iter().flat_map(|&s| c.lambda.iter().map(move |&l| (s, l))).collect();
    let idx: Vec<usize> = (0..grid.len()).collect();
    // The comparison point is the mean of the sum, where the tail is far
    // from 0 and 1.
    let zs = par_map(ctx.opts.jobs, &idx, |&i| {
        let (s, lambda) = grid[i];
        let t = s as f64 * lambda;
        let mut rng = rng_from_seed(derive_seed(sub, i as u64));
        let hits = (0..c.draws).filter(|_| sample_exp_sum(s, lambda, &mut rng) <= t).count();
        let p = exp_sum_tail(s, lambda, t);
        let sd = (p * (1.0 - p) / c.draws as f64).sqrt();
        (hits as f64 / c.draws as f64 - p) / sd
    });
    let max_z = zs.iter().fold(0.0f64, |a, z| a.max(z.abs()));
    let e1 = (exp_sum_tail(1, 2.0, 2.0) - (1.0 - (-1.0f64).exp())).abs();
    let e2 = (exp_sum_tail(2, 1.0, 1.0) - (1.0 - 2.0 * (-1.0f64).exp())).abs();
    let pass = max_z <= c.sigmas && e1 <= c.closed_form_tol && e2 <= c.closed_form_tol;
    Ok(result(
        "4",
        "Poisson identity",
        pass,
        format!(
            "max |z|={max_z:.3} over {} grid points (need <= {}); closed-form errors {e1:.2e}, {e2:.2e} (need <= {:.0e})",
            grid.len(),
            c.sigmas,
            c.closed_form_tol
        ),
    ))
}

fn coupling_check(ctx: &mut Ctx) -> Result<CriterionResult, HarnessError> {
    let c = ctx.cfg.coupling.clone();
    let bx = centred_square(c.box_halfwidth)?;
    let budget = ctx.cfg.budget;
    let runs = ctx.fan(500, c.replicas, |seed| couple_replica(c.n, c.k, bx, c.m, seed, budget))?;
    let samples: Vec<_> = runs.iter().map(|(_, s)| *s).collect();
    for (name, f, flavor) in [
        ("t_rect", (|s: &super::commands::CoupleSample| s.t_rect) as fn(&_) -> f64, Flavor::Ks),
        ("upper_sum", |s| s.upper, Flavor::Ks),
        ("t_star", |s| s.t_star, Flavor::ModifiedKs),
        ("lower_sum", |s| s.lower, Flavor::ModifiedKs),
    ] {
        let col: Vec<(Job, f64)> = runs.iter().map(|(j, s)| (*j, f(s))).collect();
        ctx.push_rows(&col, c.n, c.k, c.box_halfwidth, flavor, name, Some(c.m));
    }
    let st = CoupleStats::from_samples(&samples);
    Ok(result(
        "5",
        "coupling dominance",
        st.pass(),
        format!(
            "upper gap={:.4}, lower gap={:.4}, band={:.4}, pathwise violations={} over {} replicas",
            st.gap_upper, st.gap_lower, st.band, st.pathwise_violations, c.replicas
        ),
    ))
}

fn droplet_check(ctx: &mut Ctx, key: &str, stream: u64, c: &DropletSettings) -> Result<CriterionResult, HarnessError> {
    let p = ProcessParams::new(c.n, c.k, centred_square(c.box_halfwidth)?, Flavor::Ks)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let budget = ctx.cfg.budget;
    let m = c.m;
    let runs = ctx.fan(stream, c.replicas, |seed| {
        let d = droplet_times_with(&p, m, seed, budget, IndependentClocks::new(p.one_neighbour_rate()), false)?;
        Ok((d.t_minus(m).expect("reached"), d.t_plus(m).expect("reached")))
    })?;
    let t_minus: Vec<(Job, f64)> = runs.iter().map(|(j, v)| (*j, v.0)).collect();
    let t_plus: Vec<(Job, f64)> = runs.iter().map(|(j, v)| (*j, v.1)).collect();
    ctx.push_rows(&t_minus, c.n, c.k, c.box_halfwidth, Flavor::Ks, "t_minus", Some(m));
    ctx.push_rows(&t_plus, c.n, c.k, c.box_halfwidth, Flavor::Ks, "t_plus", Some(m));
    let pred = predict_droplet(c.n, c.k, m)?;
    let (name, target) = if key == "6" {
        ("accelerating-phase droplet law", pred.accelerating)
    } else {
        ("terminal-velocity law", pred.terminal)
    };
    let est = median_of(&t_plus.iter().map(|(_, v)| *v).collect::<Vec<_>>())?;
    let ratio = est.point / target;
    Ok(result(
        key,
        name,
        (c.band[0]..=c.band[1]).contains(&ratio),
        format!(
            "median T+={:.1} (95% CI {:.1}..{:.1}), prediction {:.1}, ratio {:.3} (need {}..{})",
            est.point, est.ci_low, est.ci_high, target, ratio, c.band[0], c.band[1]
        ),
    ))
}

fn tau_runs(ctx: &mut Ctx, stream: u64, n: f64, k: f64, h: u64, replicas: usize) -> Result<Estimate, HarnessError> {
    let p = ds(n, k, h)?;
    let budget = ctx.cfg.budget;
    let runs = ctx.fan(stream, replicas, |seed| relaxation_time(&p, seed, budget))?;
    ctx.push_rows(&runs, n, k, h, Flavor::Ds, "tau", None);
    median_of(&runs.iter().map(|(_, v)| *v).collect::<Vec<_>>())
}

fn relaxation_check(ctx: &mut Ctx) -> Result<CriterionResult, HarnessError> {
    let c = ctx.cfg.relaxation.clone();
    let pred = predict_tau(c.n, c.k)?;
    let small = tau_runs(ctx, 800, c.n, c.k, c.box_halfwidth, c.replicas)?;
    let large = tau_runs(ctx, 801, c.n, c.k, 2 * c.box_halfwidth, c.replicas)?;
    let ratio = small.point / pred.tau_predicted;
    let shift = (large.point - small.point).abs() / small.point;
    let pass = ratio >= 1.0 / c.factor && ratio <= c.factor && shift < c.max_shift;
    Ok(result(
        "8",
        "relaxation time, intermediate regime",
        pass,
        format!(
            "median tau={:.1} at S({}), prediction {:.1} ({}), ratio {:.3} (need within factor {}); median {:.1} at S({}), shift {:.3} (need < {})",
            small.point,
            c.box_halfwidth,
            pred.tau_predicted,
            pred.regime.as_str(),
            ratio,
            c.factor,
            large.point,
            2 * c.box_halfwidth,
            shift,
            c.max_shift
        ),
    ))
}

fn monotone_check(ctx: &mut Ctx) -> Result<CriterionResult, HarnessError> {
    let c = ctx.cfg.monotone.clone();
    let mut ests = Vec::new();
    for (i, &k) in c.k.iter().enumerate() {
        ests.push(tau_runs(ctx, 900 + i as u64, c.n, k, c.box_halfwidth, c.replicas)?);
    }
    let pass = ests.windows(2).all(|w| w[0].point > w[1].point && w[0].ci_low > w[1].ci_high);
    let parts: Vec<String> = c
        .k
        .iter()
        .zip(&ests)
        .map(|(k, e)| format!("k={k}: {:.1} [{:.1}, {:.1}]", e.point, e.ci_low, e.ci_high))
        .collect();
    Ok(result("9", "monotonicity in k", pass, format!("medians {}", parts.join("; "))))
}

fn containment_checks(ctx: &mut Ctx) -> Result<Vec<CriterionResult>, HarnessError> {
    let c = ctx.cfg.containment.clone();
    let h = c.box_halfwidth.unwrap_or_else(|| default_generous_halfwidth(c.t));
    let p = ds(c.n, c.k, h)?;
    let budget = ctx.cfg.budget;
    let runs = ctx.fan(1000, c.replicas, |seed| generous_replica(&p, c.t, seed, budget))?;
    let col = |f: fn(&GenerousSample) -> f64| runs.iter().map(|(j, s)| (*j, f(s))).collect::<Vec<_>>();
    let contained = col(|s| f64::from(u8::from(s.contained)));
    let gen_al = col(|s| s.generous_al_violations as f64);
    let rr_al = col(|s| s.random_al_violations as f64);
    ctx.push_rows(&contained, c.n, c.k, h, Flavor::Ds, "contained", None);
    ctx.push_rows(&gen_al, c.n, c.k, h, Flavor::Ds, "generous_al_violations", None);
    ctx.push_rows(&rr_al, c.n, c.k, h, Flavor::Ds, "random_al_violations", None);
    let fraction = contained.iter().map(|(_, v)| v).sum::<f64>() / c.replicas as f64;
    let gen_bad = gen_al.iter().filter(|(_, v)| *v > 0.0).count();
    let rr_bad = rr_al.iter().filter(|(_, v)| *v > 0.0).count();
    let rr_spanned: usize = runs.iter().map(|(_, s)| s.random_spanned).sum();
    Ok(vec![
        result(
            "10",
            "generous containment",
            fraction >= c.min_fraction && gen_bad == 0,
            format!(
                "contained in {:.3} of {} replicas (need >= {}); AL analogue failed on {gen_bad} runs; t={}, box S({h})",
                fraction, c.replicas, c.min_fraction, c.t
            ),
        ),
        result(
            "rr-al",
            "random rectangles AL analogue",
            rr_bad == 0,
            format!("failed on {rr_bad} of {} runs, {rr_spanned} spanned rectangles", c.replicas),
        ),
    ])
}

/// One `tail < bound` comparison.
#[derive(Debug, Clone, Copy)]
struct BoundCheck {
    tail: f64,
    bound: f64,
}

impl BoundCheck {
    fn holds(&self) -> bool {
        self.tail < self.bound
    }
}

fn nucleation_bounds(c: &NucleationSettings) -> Result<Vec<(&'static str, BoundCheck)>, HarnessError> {
    let mut out = Vec::new();
    // Accelerating phase: a rectangle of semi-perimeter m has at most m²/4
    // sites, and t is the largest admissible time.
    let (n, k) = (c.accelerating_n, c.accelerating_k);
    let l = (k / n.ln()).ln();
    let t = n / (4.0 * k) * l;
    let bound = |m: f64, ell: u64| (m * m * l / (4.0 * ell as f64 * k)).powf(ell as f64);
    let big_m = (k * n.ln()).sqrt().ceil();
    let ell = (big_m * big_m / k * l).ceil() as u64;
    let area = ((big_m / 2.0).floor() as u64).pow(2);
    let tail = nucleation_count_tail(area, t, n, ell)?;
    out.push(("accelerating, large m", BoundCheck { tail, bound: bound(big_m, ell) }));
    out.push(("accelerating, large m, power of n", BoundCheck { tail, bound: n.powf(-l) }));
    let small_m = (k / l).sqrt().floor();
    let ell = k.ln().ceil() as u64;
    let area = ((small_m / 2.0).floor() as u64).pow(2);
    let tail = nucleation_count_tail(area, t, n, ell)?;
    out.push(("accelerating, small m", BoundCheck { tail, bound: bound(small_m, ell) }));
    out.push(("accelerating, small m, power of k", BoundCheck { tail, bound: k.powf(-k.ln().ln()) }));
    // Terminal phase at the pinned small constant.
    let (n, k) = (c.terminal_n, c.terminal_k);
    let lg = (n / k).ln();
    let t = c.terminal_c * (n * n / (k * lg)).cbrt();
    let m = (k * n * lg).powf(1.0 / 6.0);
    let big = m * lg.sqrt();
    let area = |half: f64| (2 * half.round() as u64 + 1).pow(2);
    let tail = nucleation_count_tail(area(big), t, n, lg.ceil() as u64)?;
    out.push(("terminal, S(M)", BoundCheck { tail, bound: (k / n).powi(4) }));
    let tail = nucleation_count_tail(area(m), t, n, lg.cbrt().ceil() as u64)?;
    out.push(("terminal, S(m)", BoundCheck { tail, bound: lg.powi(-4) }));
    Ok(out)
}

fn nucleation_check(ctx: &mut Ctx) -> Result<CriterionResult, HarnessError> {
    let checks = nucleation_bounds(&ctx.cfg.nucleation)?;
    let pass = checks.iter().all(|(_, b)| b.holds());
    let parts: Vec<String> =
        checks.iter().map(|(name, b)| format!("{name}: {:.3e} < {:.3e}", b.tail, b.bound)).collect();
    Ok(result("11", "nucleation-count bounds", pass, parts.join("; ")))
}

/// Run every selected check and write the outputs.
pub fn cmd_verify(cfg: &VerifyConfig, opts: &RunOptions) -> Result<VerifyReport, HarnessError> {
    for key in &cfg.only {
        if !CHECKS.contains(&key.as_str()) {
            return Err(HarnessError::Config(format!("unknown check `{key}`")));
        }
    }
    let selected = |keys: &[&str]| cfg.only.is_empty() || keys.iter().any(|k| cfg.only.iter().any(|o| o == k));
    let dir = opts.out.join("verify");
    fs::create_dir_all(&dir)?;
    let mut ctx = Ctx { cfg, opts, rows: Vec::new(), runs: Vec::new(), points: HashMap::new() };
    let mut results: Vec<CriterionResult> = Vec::new();
    let mut timed = |keys: &[&str],
                     ctx: &mut Ctx,
                     f: &dyn Fn(&mut Ctx) -> Result<Vec<CriterionResult>, HarnessError>|
     -> Result<(), HarnessError> {
        if !selected(keys) {
            return Ok(());
        }
        let start = Instant::now();
        let mut rs = f(ctx)?;
        let wall = start.elapsed().as_secs_f64();
        for r in &mut rs {
            r.wall_seconds = Some(wall);
            log::info!("[{}] {} {}: {} ({wall:.1}s)", r.key, if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
        }
        results.extend(rs.into_iter().filter(|r| cfg.only.is_empty() || cfg.only.contains(&r.key)));
        Ok(())
    };
    timed(&["1", "2"], &mut ctx, &closure_checks)?;
    timed(&["3"], &mut ctx, &|c| engine_check(c).map(|r| vec![r]))?;
    timed(&["4"], &mut ctx, &|c| poisson_check(c).map(|r| vec![r]))?;
    timed(&["5"], &mut ctx, &|c| coupling_check(c).map(|r| vec![r]))?;
    timed(&["6"], &mut ctx, &|c| {
        let s = c.cfg.accelerating.clone();
        droplet_check(c, "6", 600, &s).map(|r| vec![r])
    })?;
    timed(&["7"], &mut ctx, &|c| {
        let s = c.cfg.terminal.clone();
        droplet_check(c, "7", 700, &s).map(|r| vec![r])
    })?;
    timed(&["8"], &mut ctx, &|c| relaxation_check(c).map(|r| vec![r]))?;
    timed(&["9"], &mut ctx, &|c| monotone_check(c).map(|r| vec![r]))?;
    timed(&["10", "rr-al"], &mut ctx, &containment_checks)?;
    timed(&["11"], &mut ctx, &|c| nucleation_check(c).map(|r| vec![r]))?;

    let properties: Vec<CriterionResult> =
        results.iter().map(|r| CriterionResult { wall_seconds: None, ..r.clone() }).collect();
    write_csv(&dir.join("properties.csv"), &properties)?;
    write_samples(&dir.join("samples.csv"), &ctx.rows)?;
    let f = fs::File::create(dir.join("report.json"))?;
    serde_json::to_writer_pretty(f, &results).map_err(std::io::Error::from)?;
    let manifest = RunManifest {
        command: "verify".into(),
        config_hash: config_hash(cfg),
        version: crate::VERSION.into(),
        base_seed: cfg.base_seed,
        runs: ctx.runs,
    };
    manifest.check_seeds()?;
    manifest.write(&dir.join("manifest.json"))?;
    Ok(VerifyReport { dir, results, manifest })
}
