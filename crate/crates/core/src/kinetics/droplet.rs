use super::clocks::{Clocks, IndependentClocks};
use super::engine::{simulate_observed, RunEnd};
use super::observers::{DropletRecorder, NullObserver, SemiPerimeterTracker};
use super::{Flavor, KineticsError, Outcome, ProcessParams, StopRule};
use crate::lattice::{centred_square, BoxIndex, Site, SiteSet};

/// Droplet observables for every `m' ≤ m` from one trace. Entries are `None`
/// when the run ended before they were reached.
#[derive(Debug, Clone, PartialEq)]
pub struct DropletTimes {
    pub m: u64,
    pub t_minus: Vec<Option<f64>>,
    pub t_plus: Vec<Option<f64>>,
    pub t_rect: Vec<Option<f64>>,
}

impl DropletTimes {
    /// First time a site outside `S(m' − 1)` is infected (`S(−1) = ∅`).
    pub fn t_minus(&self, m: u64) -> Option<f64> {
        self.t_minus.get(m as usize).copied().flatten()
    }

    /// First time all of `S(m')` is infected.
    pub fn t_plus(&self, m: u64) -> Option<f64> {
        self.t_plus.get(m as usize).copied().flatten()
    }

    /// First time some fully infected rectangle has semi-perimeter ≥ `m'`.
    pub fn t_rect(&self, m: u64) -> Option<f64> {
        self.t_rect.get(m as usize).copied().flatten()
    }
}

fn require(flavor: Flavor, params: &ProcessParams) -> Result<(), KineticsError> {
    if params.flavor != flavor {
        return Err(KineticsError::InvalidParams(format!(
            "expected flavor {}, got {}",
            flavor.as_str(),
            params.flavor.as_str()
        )));
    }
    Ok(())
}

fn stopped(end: RunEnd, what: &str) -> Result<f64, KineticsError> {
    match end.outcome {
        Outcome::Stopped => Ok(end.t),
        _ => Err(KineticsError::InvalidParams(format!("{what} is unreachable inside the box"))),
    }
}

/// Time the origin is first infected, from the all-healthy state.
pub fn relaxation_time(params: &ProcessParams, seed: u64, budget: u64) -> Result<f64, KineticsError> {
    require(Flavor::Ds, params)?;
    let clocks = IndependentClocks::new(params.one_neighbour_rate());
    let end = simulate_observed(params, &SiteSet::new(), StopRule::OriginInfected, seed, budget, clocks, &mut NullObserver)?;
    stopped(end, "the origin")
}

/// KS growth from the origin until `S(m)` is full, recording `T⁻`, `T⁺` and
/// the rectangle time for every `m' ≤ m`.
pub fn droplet_times(params: &ProcessParams, m: u64, seed: u64, budget: u64) -> Result<DropletTimes, KineticsError> {
    let clocks = IndependentClocks::new(params.one_neighbour_rate());
    droplet_times_with(params, m, seed, budget, clocks, true)
}

/// [`droplet_times`] with a chosen clock source; `track_rect = false` skips
/// the rectangle observable, which needs extra memory per site.
pub fn droplet_times_with<C: Clocks>(
    params: &ProcessParams,
    m: u64,
    seed: u64,
    budget: u64,
    clocks: C,
    track_rect: bool,
) -> Result<DropletTimes, KineticsError> {
    require(Flavor::Ks, params)?;
    if m == 0 {
        return Err(KineticsError::InvalidParams("m must be positive".into()));
    }
    if !params.bx.contains_rect(&centred_square(m + 1)?) {
        return Err(KineticsError::InvalidParams(format!("box must contain S({})", m + 1)));
    }
    let idx = BoxIndex::new(params.bx)?;
    let mut rec = DropletRecorder::new(m, track_rect.then_some(idx));
    let initial: SiteSet = std::iter::once(Site::ORIGIN).collect();
    simulate_observed(params, &initial, StopRule::SquareFilled(m), seed, budget, clocks, &mut rec)?;
    Ok(rec.into_times())
}

/// `T_m` for KS growth from `initial`: first time a fully infected rectangle
/// has semi-perimeter at least `m`.
pub fn ks_rect_time_with<C: Clocks>(
    params: &ProcessParams,
    initial: &SiteSet,
    m: u64,
    seed: u64,
    budget: u64,
    clocks: C,
) -> Result<f64, KineticsError> {
    require(Flavor::Ks, params)?;
    let end = simulate_observed(params, initial, StopRule::RectReached(m), seed, budget, clocks, &mut NullObserver)?;
    stopped(end, "the target rectangle")
}

/// `T*_m(A)`: first time the total semi-perimeter of the modified process
/// started from `a` reaches `m`. Zero if the closure of `a` already has it.
pub fn modified_ks_time(
    a: &SiteSet,
    params: &ProcessParams,
    m: u64,
    seed: u64,
    budget: u64,
) -> Result<f64, KineticsError> {
    let clocks = IndependentClocks::new(params.one_neighbour_rate());
    modified_ks_time_with(a, params, m, seed, budget, clocks)
}

pub fn modified_ks_time_with<C: Clocks>(
    a: &SiteSet,
    params: &ProcessParams,
    m: u64,
    seed: u64,
    budget: u64,
    clocks: C,
) -> Result<f64, KineticsError> {
    require(Flavor::ModifiedKs, params)?;
    if a.is_empty() {
        return Err(KineticsError::InvalidParams("initial set must be nonempty".into()));
    }
    let idx = BoxIndex::new(params.bx)?;
    let mut tracker = SemiPerimeterTracker::new(idx, m);
    // The time horizon never binds; the tracker decides when to stop.
    let end = simulate_observed(params, a, StopRule::TimeHorizon(f64::INFINITY), seed, budget, clocks, &mut tracker)?;
    stopped(end, "the target semi-perimeter")
}
