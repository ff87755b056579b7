use indexmap::IndexSet;
use serde::Serialize;

use crate::bootstrap::{MergeEngine, MergeRecord};
use crate::lattice::{centred_square, enlarge, round_length, semi_perimeter, LatticeError, Rect, Site, SiteSet};
use crate::rng::{derive_seed, rng_from_seed};

use super::engine::simulate;
use super::random_rects::sample_nucleations;
use super::{Cause, Flavor, KineticsError, ProcessParams, StopRule};

/// Integer lengths of the generous rectangles process, each rounded once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenerousConfig {
    /// Half-width of the square placed on each nucleation, `100·n^{1/4}`.
    pub initial_half: u64,
    /// Merge pairs within this ℓ1 distance, `500·n^{1/4}`.
    pub merge_radius: u64,
    /// Side-length increase per round, `200·n^{1/4}`.
    pub enlarge_by: u64,
    /// Number of merge/enlarge rounds, `⌈t·k^{1/2}/n^{3/4}⌉`.
    pub iterations: u64,
}

impl GenerousConfig {
    pub fn new(n: f64, k: f64, t: f64) -> Self {
        let q = n.powf(0.25);
        GenerousConfig {
            initial_half: round_length(100.0 * q),
            merge_radius: round_length(500.0 * q),
            enlarge_by: round_length(200.0 * q),
            iterations: (t * k.sqrt() / n.powf(0.75)).ceil().max(0.0) as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenerousState {
    pub iteration: u64,
    /// Collection after the merge phase of this round (empty for round 0).
    pub merged: Vec<Rect>,
    /// Collection at the end of the round.
    pub rectangles: Vec<Rect>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerousOutput {
    pub config: GenerousConfig,
    pub nucleations: Vec<Site>,
    pub states: Vec<GenerousState>,
    /// Generously spanned rectangles, in order of first appearance.
    pub spanned: Vec<Rect>,
    pub log: Vec<MergeRecord>,
}

impl GenerousOutput {
    pub fn final_rects(&self) -> &[Rect] {
        &self.states.last().expect("at least the initial state").rectangles
    }

    pub fn covers(&self, s: Site) -> bool {
        self.final_rects().iter().any(|r| r.contains(s))
    }
}

fn translate(s: Site, r: &Rect) -> Result<Rect, LatticeError> {
    let add = |a: i64, b: i64| a.checked_add(b).ok_or(LatticeError::Overflow);
    Rect::new(add(s.x, r.x0())?, add(s.x, r.x1())?, add(s.y, r.y0())?, add(s.y, r.y1())?)
}

/// The generous rectangles process on a given nucleation set.
pub fn generous_rectangles_from(a: &[Site], config: GenerousConfig) -> Result<GenerousOutput, KineticsError> {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let sq = centred_square(config.initial_half)?;
    let mut rects = sorted.iter().map(|s| translate(*s, &sq)).collect::<Result<Vec<_>, _>>()?;
    let mut spanned: IndexSet<Rect> = rects.iter().copied().collect();
    let mut states = vec![GenerousState { iteration: 0, merged: Vec::new(), rectangles: rects.clone() }];
    let mut log = Vec::new();
    for it in 1..=config.iterations {
        let mut engine = MergeEngine::from_items(config.merge_radius, rects.iter().map(|r| (*r, ())));
        engine.merge_all(|_, _| ());
        let merged: Vec<Rect> = engine.rects().copied().collect();
        for rec in engine.log() {
            spanned.insert(rec.into);
        }
        log.extend(engine.take_log());
        rects = merged.iter().map(|r| enlarge(r, config.enlarge_by)).collect::<Result<Vec<_>, _>>()?;
        spanned.extend(rects.iter().copied());
        states.push(GenerousState { iteration: it, merged, rectangles: rects.clone() });
    }
    Ok(GenerousOutput { config, nucleations: sorted, states, spanned: spanned.into_iter().collect(), log })
}

/// Sample the nucleations in `params.bx` by time `t` and run the generous
/// rectangles process on them.
pub fn generous_rectangles_process(params: &ProcessParams, t: f64, seed: u64) -> Result<GenerousOutput, KineticsError> {
    params.validate()?;
    if params.flavor != Flavor::Ds {
        return Err(KineticsError::InvalidParams("expected flavor DS".into()));
    }
    let mut rng = rng_from_seed(seed);
    let a = sample_nucleations(&params.bx, params.n, t, &mut rng);
    generous_rectangles_from(&a, GenerousConfig::new(params.n, params.k, t))
}

/// Number of `(R, ℓ)` pairs, `R` in `spanned` and `1 ≤ ℓ ≤ φ(R)`, with no
/// `R' ⊆ R` in `spanned` such that `ℓ ≤ φ(R') ≤ 2ℓ + slack`.
pub fn al_analogue_violations(spanned: &[Rect], slack: u64) -> u64 {
    let mut violations = 0;
    for r in spanned {
        let mut phis: Vec<u64> = spanned.iter().filter(|q| r.contains_rect(q)).map(semi_perimeter).collect();
        phis.sort_unstable();
        for ell in 1..=semi_perimeter(r) {
            let i = phis.partition_point(|&p| p < ell);
            if i == phis.len() || phis[i] > 2 * ell + slack {
                violations += 1;
            }
        }
    }
    violations
}

/// One containment replica: the DS process on `params.bx` up to time `t`,
/// and the generous process on the same nucleations.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReplica {
    pub contained: bool,
    pub infected: usize,
    pub nucleations: usize,
    pub al_violations: u64,
}

pub fn containment_replica(params: &ProcessParams, t: f64, seed: u64, budget: u64) -> Result<ContainmentReplica, KineticsError> {
    if params.flavor != Flavor::Ds {
        return Err(KineticsError::InvalidParams("expected flavor DS".into()));
    }
    let trace = simulate(params, &SiteSet::new(), StopRule::TimeHorizon(t), seed, budget)?;
    let a: Vec<Site> = trace.events.iter().filter(|e| e.cause == Cause::Nucleation).map(|e| e.site).collect();
    let out = generous_rectangles_from(&a, GenerousConfig::new(params.n, params.k, t))?;
    let slack = out.config.merge_radius;
    Ok(ContainmentReplica {
        contained: trace.events.iter().all(|e| out.covers(e.site)),
        infected: trace.events.len(),
        nucleations: a.len(),
        al_violations: al_analogue_violations(&out.spanned, slack),
    })
}

/// Fraction of replicas whose time-`t` infected set lies inside the union of
/// the final generous rectangles.
pub fn containment_check(
    params: &ProcessParams,
    t: f64,
    replicas: usize,
    seed: u64,
    budget: u64,
) -> Result<f64, KineticsError> {
    if replicas == 0 {
        return Err(KineticsError::InvalidParams("replicas must be at least 1".into()));
    }
    let mut hits = 0;
    for i in 0..replicas {
        if containment_replica(params, t, derive_seed(seed, i as u64), budget)?.contained {
            hits += 1;
        }
    }
    Ok(hits as f64 / replicas as f64)
}
