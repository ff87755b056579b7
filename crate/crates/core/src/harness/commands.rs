//! The sweep commands. Each writes `samples.csv`, `summary.csv` and
//! `manifest.json` under `<out>/<command>/`.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{config_hash, ExperimentConfig};
use super::manifest::RunManifest;
use super::output::{write_csv, write_samples, SampleRow};
use super::runner::{jobs, run_jobs, Completed, Job, RunOptions};
use super::HarnessError;
use crate::analytics::{
    dkw_epsilon, dominance_gap, mean_and_sd, predict_droplet, predict_tau, quantile_ci, Ecdf, SampleTable, LAMBDA,
};
use crate::bootstrap::{coarse_bootstrap, estimate_pc, CoarseGrid};
use crate::kinetics::{
    al_analogue_violations, containment_replica, droplet_times_with, ks_rect_time_with, modified_ks_time_with,
    random_rectangles_process, relaxation_time, simulate, CoupledClocks, DropletRecorder, DropletTimes, EventTrace,
    Flavor, IndependentClocks, KineticsError, Observer, ProcessParams, StopRule,
};
use crate::lattice::{centred_square, BoxIndex, Rect, Site, SiteSet};
use crate::oracle::{sample_y_sum, sample_z_sum};
use crate::rng::{derive_seed, rng_from_seed};

/// Two-sided level of the 3σ DKW bands.
pub const THREE_SIGMA_ALPHA: f64 = 0.0027;

/// What a command produced, in memory as well as on disk.
#[derive(Debug, Clone)]
pub struct CommandReport {
    pub dir: PathBuf,
    pub rows: Vec<SampleRow>,
    pub table: SampleTable,
    pub manifest: RunManifest,
}

/// `Ok(None)` for a run that ran out of budget.
pub fn censor<T>(r: Result<T, KineticsError>) -> Result<Option<T>, HarnessError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(KineticsError::Budget { budget, t }) => {
            log::warn!("run censored: budget {budget} exhausted at t={t}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn prepare_dir(opts: &RunOptions, command: &str) -> Result<PathBuf, HarnessError> {
    let dir = opts.out.join(command);
    fs::create_dir_all(&dir)?;
    if opts.trace {
        fs::create_dir_all(dir.join("traces"))?;
    }
    Ok(dir)
}

fn write_trace(dir: &Path, run_id: u64, trace: &EventTrace) -> Result<(), HarnessError> {
    let f = fs::File::create(dir.join("traces").join(format!("run-{run_id}.jsonl")))?;
    trace.write_jsonl(BufWriter::new(f))?;
    Ok(())
}

fn required_halfwidth(cfg: &ExperimentConfig) -> Result<u64, HarnessError> {
    cfg.box_halfwidth.ok_or_else(|| HarnessError::Config("box_halfwidth is required".into()))
}

fn params(n: f64, k: f64, bx: Rect, flavor: Flavor) -> Result<ProcessParams, HarnessError> {
    ProcessParams::new(n, k, bx, flavor).map_err(|e| HarnessError::Config(e.to_string()))
}

fn group(n: f64, k: f64, extra: Option<(&str, String)>) -> String {
    match extra {
        Some((name, v)) => format!("n={n},k={k},{name}={v}"),
        None => format!("n={n},k={k}"),
    }
}

/// Collect results, failing on the first non-censorable error.
fn collect<T>(done: Vec<Completed<T, HarnessError>>) -> Result<(Vec<Job>, Vec<Option<T>>, Vec<super::RunRecord>), HarnessError> {
    let mut js = Vec::with_capacity(done.len());
    let mut vals = Vec::with_capacity(done.len());
    let mut recs = Vec::with_capacity(done.len());
    for c in done {
        recs.push(c.record());
        js.push(c.job);
        vals.push(c.value?);
    }
    Ok((js, vals, recs))
}

fn manifest(command: &str, cfg: &ExperimentConfig, runs: Vec<super::RunRecord>) -> Result<RunManifest, HarnessError> {
    let m = RunManifest {
        command: command.into(),
        config_hash: config_hash(cfg),
        version: crate::VERSION.into(),
        base_seed: cfg.base_seed,
        runs,
    };
    m.check_seeds()?;
    Ok(m)
}

fn finish<S: Serialize>(
    dir: PathBuf,
    rows: Vec<SampleRow>,
    summary: &[S],
    manifest: RunManifest,
) -> Result<CommandReport, HarnessError> {
    write_samples(&dir.join("samples.csv"), &rows)?;
    write_csv(&dir.join("summary.csv"), summary)?;
    manifest.write(&dir.join("manifest.json"))?;
    let mut table = SampleTable::new();
    for r in &rows {
        if let Some(v) = r.value {
            let g = match (r.n, r.k) {
                (Some(n), Some(k)) => group(n, k, r.m.map(|m| ("m", m.to_string()))),
                _ => format!("h={}", r.box_halfwidth),
            };
            table.push(&r.observable, &g, r.seed, v)?;
        }
    }
    Ok(CommandReport { dir, rows, table, manifest })
}

/// Median with its 95% interval, or `None` below the estimator's minimum.
fn median(values: &[f64]) -> Option<(f64, f64, f64)> {
    quantile_ci(values, 0.5).ok().map(|e| (e.point, e.ci_low, e.ci_high))
}

fn grid2(cfg: &ExperimentConfig) -> Vec<(f64, f64)> {
    cfg.n.iter().flat_map(|&n| cfg.k.iter().map(move |&k| (n, k))).collect()
}

#[derive(Debug, Clone, Serialize)]
struct TauSummary {
    n: f64,
    k: f64,
    regime: &'static str,
    formula: &'static str,
    tau_predicted: f64,
    replicas: usize,
    censored: usize,
    median: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    ratio: Option<f64>,
}

/// Relaxation times `τ` over the `n × k` grid, against the regime formulas.
/// A sweep point with censored runs reports no median.
pub fn cmd_tau(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<CommandReport, HarnessError> {
    cfg.validate()?;
    cfg.require_flavor(Flavor::Ds)?;
    cfg.require_axes(&["n", "k"])?;
    let h = required_halfwidth(cfg)?;
    let bx = centred_square(h)?;
    let points = grid2(cfg);
    let ps: Vec<ProcessParams> = points.iter().map(|&(n, k)| params(n, k, bx, Flavor::Ds)).collect::<Result<_, _>>()?;
    let predictions = points.iter().map(|&(n, k)| predict_tau(n, k).ok()).collect::<Vec<_>>();
    let dir = prepare_dir(opts, "tau")?;
    let js = jobs(points.len(), cfg.replicas, cfg.base_seed);
    let done = run_jobs(opts.jobs, &js, |job| {
        let p = &ps[job.point];
        if opts.trace {
            match censor(simulate(p, &SiteSet::new(), StopRule::OriginInfected, job.seed, cfg.budget))? {
                Some(trace) => {
                    write_trace(&dir, job.run_id, &trace)?;
                    Ok(trace.origin_time())
                }
                None => Ok(None),
            }
        } else {
            censor(relaxation_time(p, job.seed, cfg.budget))
        }
    });
    let (js, vals, recs) = collect(done)?;
    let rows: Vec<SampleRow> = js
        .iter()
        .zip(&vals)
        .map(|(job, v)| SampleRow {
            run_id: job.run_id,
            seed: job.seed,
            n: Some(ps[job.point].n),
            k: Some(ps[job.point].k),
            box_halfwidth: h,
            flavor: Flavor::Ds.as_str().into(),
            observable: "tau".into(),
            m: None,
            value: *v,
        })
        .collect();
    let mut summary = Vec::new();
    for (i, &(n, k)) in points.iter().enumerate() {
        let vs: Vec<Option<f64>> = js.iter().zip(&vals).filter(|(j, _)| j.point == i).map(|(_, v)| *v).collect();
        let censored = vs.iter().filter(|v| v.is_none()).count();
        let uncensored: Vec<f64> = vs.iter().flatten().copied().collect();
        let est = if censored == 0 { median(&uncensored) } else { None };
        let pred = predictions[i].as_ref();
        let tau_predicted = pred.map_or(f64::NAN, |p| p.tau_predicted);
        summary.push(TauSummary {
            n,
            k,
            regime: pred.map_or("undefined", |p| p.regime.as_str()),
            formula: pred.map_or("", |p| p.formula),
            tau_predicted,
            replicas: cfg.replicas,
            censored,
            median: est.map(|e| e.0),
            ci_low: est.map(|e| e.1),
            ci_high: est.map(|e| e.2),
            ratio: est.filter(|_| pred.is_some()).map(|e| e.0 / tau_predicted),
        });
    }
    let manifest = manifest("tau", cfg, recs)?;
    finish(dir, rows, &summary, manifest)
}

/// Re-derive droplet observables from a recorded KS trace.
pub fn replay_droplet(trace: &EventTrace, m: u64, track_rect: bool) -> Result<DropletTimes, HarnessError> {
    let idx = BoxIndex::new(trace.header.params.bx)?;
    let mut rec = DropletRecorder::new(m, track_rect.then_some(idx));
    for &[x, y] in &trace.header.initial {
        rec.initial(Site::new(x, y));
    }
    for ev in &trace.events {
        rec.event(ev);
    }
    Ok(rec.into_times())
}

#[derive(Debug, Clone, Serialize)]
struct DropletSummary {
    n: f64,
    k: f64,
    m: u64,
    replicas: usize,
    censored: usize,
    median_t_plus: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    accelerating: Option<f64>,
    terminal: Option<f64>,
    phase: &'static str,
    order_violations: usize,
}

/// KS droplet growth from the origin: `T⁻(m)`, `T⁺(m)` and the rectangle
/// time for every `m` on the axis, one trace per replica.
pub fn cmd_droplet(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<CommandReport, HarnessError> {
    cfg.validate()?;
    cfg.require_flavor(Flavor::Ks)?;
    cfg.require_axes(&["n", "k", "m"])?;
    let mut ms = cfg.m.clone();
    ms.sort_unstable();
    ms.dedup();
    let m_max = *ms.last().expect("axis nonempty");
    if ms[0] == 0 {
        return Err(HarnessError::Config("m values must be positive".into()));
    }
    let h = cfg.box_halfwidth.unwrap_or(m_max + 1);
    if h < m_max + 1 {
        return Err(HarnessError::Config(format!("box_halfwidth must be at least {}", m_max + 1)));
    }
    let bx = centred_square(h)?;
    let points = grid2(cfg);
    let ps: Vec<ProcessParams> = points.iter().map(|&(n, k)| params(n, k, bx, Flavor::Ks)).collect::<Result<_, _>>()?;
    let dir = prepare_dir(opts, "droplet")?;
    let js = jobs(points.len(), cfg.replicas, cfg.base_seed);
    let initial: SiteSet = std::iter::once(Site::ORIGIN).collect();
    let done = run_jobs(opts.jobs, &js, |job| {
        let p = &ps[job.point];
        if opts.trace {
            match censor(simulate(p, &initial, StopRule::SquareFilled(m_max), job.seed, cfg.budget))? {
                Some(trace) => {
                    write_trace(&dir, job.run_id, &trace)?;
                    Ok(Some(replay_droplet(&trace, m_max, cfg.track_rect)?))
                }
                None => Ok(None),
            }
        } else {
            let clocks = IndependentClocks::new(p.one_neighbour_rate());
            censor(droplet_times_with(p, m_max, job.seed, cfg.budget, clocks, cfg.track_rect))
        }
    });
    let (js, vals, recs) = collect(done)?;
    let mut rows = Vec::new();
    for (job, v) in js.iter().zip(&vals) {
        let p = &ps[job.point];
        for &m in &ms {
            let mut obs: Vec<(&str, Option<f64>)> =
                vec![("t_minus", v.as_ref().and_then(|d| d.t_minus(m))), ("t_plus", v.as_ref().and_then(|d| d.t_plus(m)))];
            if cfg.track_rect {
                obs.push(("t_rect", v.as_ref().and_then(|d| d.t_rect(m))));
            }
            for (name, value) in obs {
                rows.push(SampleRow {
                    run_id: job.run_id,
                    seed: job.seed,
                    n: Some(p.n),
                    k: Some(p.k),
                    box_halfwidth: h,
                    flavor: Flavor::Ks.as_str().into(),
                    observable: name.into(),
                    m: Some(m),
                    value,
                });
            }
        }
    }
    let mut summary = Vec::new();
    for (i, &(n, k)) in points.iter().enumerate() {
        let runs: Vec<&Option<DropletTimes>> = js.iter().zip(&vals).filter(|(j, _)| j.point == i).map(|(_, v)| v).collect();
        let censored = runs.iter().filter(|v| v.is_none()).count();
        for &m in &ms {
            let tp: Vec<f64> = runs.iter().filter_map(|v| v.as_ref().and_then(|d| d.t_plus(m))).collect();
            let order_violations = runs
                .iter()
                .filter_map(|v| v.as_ref())
                .filter(|d| matches!((d.t_minus(m), d.t_plus(m)), (Some(a), Some(b)) if a > b))
                .count();
            let est = if censored == 0 { median(&tp) } else { None };
            let pred = predict_droplet(n, k, m).ok();
            summary.push(DropletSummary {
                n,
                k,
                m,
                replicas: cfg.replicas,
                censored,
                median_t_plus: est.map(|e| e.0),
                ci_low: est.map(|e| e.1),
                ci_high: est.map(|e| e.2),
                accelerating: pred.map(|p| p.accelerating),
                terminal: pred.map(|p| p.terminal),
                phase: pred.map_or("degenerate", |p| p.phase.as_str()),
                order_violations,
            });
        }
    }
    let manifest = manifest("droplet", cfg, recs)?;
    finish(dir, rows, &summary, manifest)
}

enum BootstrapJob {
    Pc { halfwidth: u64 },
    Coarse { p: f64 },
}

#[derive(Debug, Clone, Copy)]
enum BootstrapValue {
    Pc(f64),
    Coarse { percolated: bool, steps: usize },
}

#[derive(Debug, Clone, Serialize)]
struct BootstrapSummary {
    experiment: &'static str,
    halfwidth: u64,
    p: Option<f64>,
    replicas: usize,
    mean: f64,
    sd: f64,
    /// `p̂ · ln L` with `L = 2h + 1`, to set against `π²/18`.
    pc_log_l: Option<f64>,
    reference: Option<f64>,
}

/// Critical-density estimates over box sizes and coarse-grained fill
/// probabilities over densities.
pub fn cmd_bootstrap(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<CommandReport, HarnessError> {
    cfg.validate()?;
    cfg.require_axes(&["sizes", "p"])?;
    if cfg.pc_replicas == 0 {
        return Err(HarnessError::Config("pc_replicas must be at least 1".into()));
    }
    let grid0 = CoarseGrid::new(cfg.coarse_big, cfg.coarse_small, 0.5).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut kinds: Vec<BootstrapJob> = cfg.sizes.iter().map(|&h| BootstrapJob::Pc { halfwidth: h }).collect();
    for &p in &cfg.p {
        CoarseGrid::new(grid0.big_m(), grid0.small_m(), p).map_err(|e| HarnessError::Config(e.to_string()))?;
        kinds.push(BootstrapJob::Coarse { p });
    }
    let dir = prepare_dir(opts, "bootstrap")?;
    let js = jobs(kinds.len(), cfg.replicas, cfg.base_seed);
    let done = run_jobs(opts.jobs, &js, |job| -> Result<Option<BootstrapValue>, HarnessError> {
        Ok(Some(match kinds[job.point] {
            BootstrapJob::Pc { halfwidth } => BootstrapValue::Pc(estimate_pc(halfwidth, cfg.pc_replicas, job.seed)?),
            BootstrapJob::Coarse { p } => {
                let g = CoarseGrid::new(grid0.big_m(), grid0.small_m(), p)?;
                let o = coarse_bootstrap(&g, job.seed);
                BootstrapValue::Coarse { percolated: o.percolated, steps: o.steps }
            }
        }))
    });
    let (js, vals, recs) = collect(done)?;
    let mut rows = Vec::new();
    for (job, v) in js.iter().zip(&vals) {
        let base = SampleRow {
            run_id: job.run_id,
            seed: job.seed,
            n: None,
            k: None,
            box_halfwidth: 0,
            flavor: String::new(),
            observable: String::new(),
            m: None,
            value: None,
        };
        match (&kinds[job.point], v.expect("bootstrap runs are never censored")) {
            (BootstrapJob::Pc { halfwidth }, BootstrapValue::Pc(pc)) => rows.push(SampleRow {
                box_halfwidth: *halfwidth,
                flavor: "bootstrap".into(),
                observable: "pc_hat".into(),
                value: Some(pc),
                ..base
            }),
            (BootstrapJob::Coarse { .. }, BootstrapValue::Coarse { percolated, steps }) => {
                let b = SampleRow { box_halfwidth: cfg.coarse_big, flavor: "coarse".into(), ..base };
                rows.push(SampleRow {
                    observable: "coarse_percolated".into(),
                    value: Some(if percolated { 1.0 } else { 0.0 }),
                    ..b.clone()
                });
                rows.push(SampleRow { observable: "coarse_steps".into(), value: Some(steps as f64), ..b });
            }
            _ => unreachable!("job kind and value agree"),
        }
    }
    let mut summary = Vec::new();
    for (i, kind) in kinds.iter().enumerate() {
        let vs: Vec<BootstrapValue> = js.iter().zip(&vals).filter(|(j, _)| j.point == i).filter_map(|(_, v)| *v).collect();
        let xs: Vec<f64> = vs
            .iter()
            .map(|v| match v {
                BootstrapValue::Pc(pc) => *pc,
                BootstrapValue::Coarse { percolated, .. } => f64::from(u8::from(*percolated)),
            })
            .collect();
        let (mean, sd) = mean_and_sd(&xs);
        summary.push(match kind {
            BootstrapJob::Pc { halfwidth } => BootstrapSummary {
                experiment: "pc_hat",
                halfwidth: *halfwidth,
                p: None,
                replicas: xs.len(),
                mean,
                sd,
                pc_log_l: Some(mean * ((2 * halfwidth + 1) as f64).ln()),
                reference: Some(LAMBDA),
            },
            BootstrapJob::Coarse { p } => BootstrapSummary {
                experiment: "coarse_fill",
                halfwidth: cfg.coarse_big,
                p: Some(*p),
                replicas: xs.len(),
                mean,
                sd,
                pc_log_l: None,
                reference: None,
            },
        });
    }
    // The bootstrap runs have no flavor, so the manifest hash is the only
    // record of which grid produced them.
    let manifest = manifest("bootstrap", cfg, recs)?;
    finish(dir, rows, &summary, manifest)
}

/// One paired coupling replica: KS and modified-KS growth from the origin
/// driven by the same Poisson clocks, with the exponential-sum comparators
/// drawn from an independent stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupleSample {
    /// `T_m`: first fully infected rectangle of semi-perimeter `≥ m`.
    pub t_rect: f64,
    /// `T*_m` of the modified process.
    pub t_star: f64,
    /// `Σ_{i=2}^{m} Y_i + Σ_{i=1}^{m²} Z_i`.
    pub upper: f64,
    /// `Σ_{i=2}^{m} Y_i`.
    pub lower: f64,
}

pub fn couple_replica(n: f64, k: f64, bx: Rect, m: u64, seed: u64, budget: u64) -> Result<CoupleSample, KineticsError> {
    let ks = ProcessParams::new(n, k, bx, Flavor::Ks)?;
    let modified = ks.with_flavor(Flavor::ModifiedKs);
    let a: SiteSet = std::iter::once(Site::ORIGIN).collect();
    let rate = ks.one_neighbour_rate();
    let t_rect = ks_rect_time_with(&ks, &a, m, seed, budget, CoupledClocks::new(seed, rate))?;
    let t_star = modified_ks_time_with(&a, &modified, m, seed, budget, CoupledClocks::new(seed, rate))?;
    let mut rng = rng_from_seed(derive_seed(seed, 1));
    let y = sample_y_sum(n, k, 2, m, &mut rng);
    let z = sample_z_sum(m * m, &mut rng);
    Ok(CoupleSample { t_rect, t_star, upper: y + z, lower: sample_y_sum(n, k, 2, m, &mut rng) })
}

/// Dominance statistics over a set of coupling replicas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupleStats {
    /// `sup (F_upper − F_{T_m})`; at most `band` if `T_m` is stochastically
    /// smaller than the upper comparator.
    pub gap_upper: f64,
    /// `sup (F_{T*} − F_lower)`; at most `band` if the lower comparator is
    /// stochastically smaller than `T*_m`.
    pub gap_lower: f64,
    pub band: f64,
    /// Replicas with `T*_m > T_m` under the shared clocks.
    pub pathwise_violations: usize,
}

impl CoupleStats {
    pub fn from_samples(samples: &[CoupleSample]) -> Self {
        let col = |f: fn(&CoupleSample) -> f64| Ecdf::new(&samples.iter().map(f).collect::<Vec<_>>());
        let (t_rect, t_star, upper, lower) = (col(|s| s.t_rect), col(|s| s.t_star), col(|s| s.upper), col(|s| s.lower));
        let eps = dkw_epsilon(samples.len(), THREE_SIGMA_ALPHA);
        CoupleStats {
            gap_upper: dominance_gap(&t_rect, &upper),
            gap_lower: dominance_gap(&lower, &t_star),
            band: 2.0 * eps,
            pathwise_violations: samples.iter().filter(|s| s.t_star > s.t_rect).count(),
        }
    }

    pub fn pass(&self) -> bool {
        self.gap_upper <= self.band && self.gap_lower <= self.band && self.pathwise_violations == 0
    }
}

#[derive(Debug, Clone, Serialize)]
struct CoupleSummary {
    n: f64,
    k: f64,
    m: u64,
    replicas: usize,
    censored: usize,
    gap_upper: Option<f64>,
    gap_lower: Option<f64>,
    band: Option<f64>,
    pathwise_violations: Option<usize>,
    pass: Option<bool>,
}

/// Coupling dominance tests over `n × k × m`.
pub fn cmd_couple(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<CommandReport, HarnessError> {
    cfg.validate()?;
    cfg.require_axes(&["n", "k", "m"])?;
    let h = required_halfwidth(cfg)?;
    let bx = centred_square(h)?;
    let points: Vec<(f64, f64, u64)> =
        grid2(cfg).into_iter().flat_map(|(n, k)| cfg.m.iter().map(move |&m| (n, k, m))).collect();
    for &(n, k, m) in &points {
        params(n, k, bx, Flavor::Ks)?;
        if m < 2 {
            return Err(HarnessError::Config("m must be at least 2".into()));
        }
    }
    let dir = prepare_dir(opts, "couple")?;
    let js = jobs(points.len(), cfg.replicas, cfg.base_seed);
    let done = run_jobs(opts.jobs, &js, |job| {
        let (n, k, m) = points[job.point];
        match couple_replica(n, k, bx, m, job.seed, cfg.budget) {
            Err(KineticsError::InvalidParams(e)) => Err(HarnessError::Config(e)),
            r => censor(r),
        }
    });
    let (js, vals, recs) = collect(done)?;
    let mut rows = Vec::new();
    for (job, v) in js.iter().zip(&vals) {
        let (n, k, m) = points[job.point];
        let obs: [(&str, Option<f64>, Flavor); 4] = [
            ("t_rect", v.map(|s| s.t_rect), Flavor::Ks),
            ("t_star", v.map(|s| s.t_star), Flavor::ModifiedKs),
            ("upper_sum", v.map(|s| s.upper), Flavor::Ks),
            ("lower_sum", v.map(|s| s.lower), Flavor::ModifiedKs),
        ];
        for (name, value, flavor) in obs {
            rows.push(SampleRow {
                run_id: job.run_id,
                seed: job.seed,
                n: Some(n),
                k: Some(k),
                box_halfwidth: h,
                flavor: flavor.as_str().into(),
                observable: name.into(),
                m: Some(m),
                value,
            });
        }
    }
    let mut summary = Vec::new();
    for (i, &(n, k, m)) in points.iter().enumerate() {
        let vs: Vec<Option<CoupleSample>> = js.iter().zip(&vals).filter(|(j, _)| j.point == i).map(|(_, v)| *v).collect();
        let censored = vs.iter().filter(|v| v.is_none()).count();
        let stats = (censored == 0).then(|| CoupleStats::from_samples(&vs.iter().flatten().copied().collect::<Vec<_>>()));
        summary.push(CoupleSummary {
            n,
            k,
            m,
            replicas: cfg.replicas,
            censored,
            gap_upper: stats.map(|s| s.gap_upper),
            gap_lower: stats.map(|s| s.gap_lower),
            band: stats.map(|s| s.band),
            pathwise_violations: stats.map(|s| s.pathwise_violations),
            pass: stats.map(|s| s.pass()),
        });
    }
    let manifest = manifest("couple", cfg, recs)?;
    finish(dir, rows, &summary, manifest)
}

/// Containment of the DS infected set in the generous rectangles, plus the
/// AL analogues of both rectangle processes, for one replica.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerousSample {
    pub contained: bool,
    pub infected: usize,
    pub nucleations: usize,
    pub generous_al_violations: u64,
    pub random_al_violations: u64,
    pub random_spanned: usize,
}

/// Box `S(round(8t))` used when no half-width is configured.
pub fn default_generous_halfwidth(t: f64) -> u64 {
    (8.0 * t).round().max(1.0) as u64
}

pub fn generous_replica(p: &ProcessParams, t: f64, seed: u64, budget: u64) -> Result<GenerousSample, KineticsError> {
    let c = containment_replica(p, t, seed, budget)?;
    let rr = random_rectangles_process(p, t, derive_seed(seed, 1))?;
    Ok(GenerousSample {
        contained: c.contained,
        infected: c.infected,
        nucleations: c.nucleations,
        generous_al_violations: c.al_violations,
        random_al_violations: al_analogue_violations(&rr.spanned, 0),
        random_spanned: rr.spanned.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
struct GenerousSummary {
    n: f64,
    k: f64,
    t: f64,
    box_halfwidth: u64,
    replicas: usize,
    censored: usize,
    contained_fraction: Option<f64>,
    generous_al_violations: u64,
    random_al_violations: u64,
}

/// Generous-rectangle containment and the rectangle-process AL analogues
/// over `n × k × t`.
pub fn cmd_generous(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<CommandReport, HarnessError> {
    cfg.validate()?;
    cfg.require_flavor(Flavor::Ds)?;
    cfg.require_axes(&["n", "k", "t"])?;
    let mut points = Vec::new();
    for (n, k) in grid2(cfg) {
        for &t in &cfg.t {
            if !(t.is_finite() && t >= 0.0) {
                return Err(HarnessError::Config(format!("t={t} must be finite and nonnegative")));
            }
            let h = cfg.box_halfwidth.unwrap_or_else(|| default_generous_halfwidth(t));
            points.push((params(n, k, centred_square(h)?, Flavor::Ds)?, t, h));
        }
    }
    let dir = prepare_dir(opts, "generous")?;
    let js = jobs(points.len(), cfg.replicas, cfg.base_seed);
    let done = run_jobs(opts.jobs, &js, |job| {
        let (p, t, _) = &points[job.point];
        censor(generous_replica(p, *t, job.seed, cfg.budget))
    });
    let (js, vals, recs) = collect(done)?;
    let mut rows = Vec::new();
    for (job, v) in js.iter().zip(&vals) {
        let (p, _, h) = &points[job.point];
        let obs: [(&str, Option<f64>); 6] = [
            ("contained", v.map(|s| f64::from(u8::from(s.contained)))),
            ("infected", v.map(|s| s.infected as f64)),
            ("nucleations", v.map(|s| s.nucleations as f64)),
            ("generous_al_violations", v.map(|s| s.generous_al_violations as f64)),
            ("random_al_violations", v.map(|s| s.random_al_violations as f64)),
            ("random_spanned", v.map(|s| s.random_spanned as f64)),
        ];
        for (name, value) in obs {
            rows.push(SampleRow {
                run_id: job.run_id,
                seed: job.seed,
                n: Some(p.n),
                k: Some(p.k),
                box_halfwidth: *h,
                flavor: Flavor::Ds.as_str().into(),
                observable: name.into(),
                m: None,
                value,
            });
        }
    }
    let mut summary = Vec::new();
    for (i, (p, t, h)) in points.iter().enumerate() {
        let vs: Vec<Option<GenerousSample>> =
            js.iter().zip(&vals).filter(|(j, _)| j.point == i).map(|(_, v)| *v).collect();
        let ok: Vec<GenerousSample> = vs.iter().flatten().copied().collect();
        let censored = vs.len() - ok.len();
        summary.push(GenerousSummary {
            n: p.n,
            k: p.k,
            t: *t,
            box_halfwidth: *h,
            replicas: cfg.replicas,
            censored,
            contained_fraction: (censored == 0)
                .then(|| ok.iter().filter(|s| s.contained).count() as f64 / ok.len() as f64),
            generous_al_violations: ok.iter().map(|s| s.generous_al_violations).sum(),
            random_al_violations: ok.iter().map(|s| s.random_al_violations).sum(),
        });
    }
    let manifest = manifest("generous", cfg, recs)?;
    finish(dir, rows, &summary, manifest)
}
