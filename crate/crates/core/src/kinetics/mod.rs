//! Continuous-time nucleation-and-growth dynamics on a box of Z².
//!
//! A healthy site with no infected neighbours is infected at rate `1/n`
//! (only under [`Flavor::Ds`]), with one infected neighbour at rate `k/n`,
//! and with two or more at rate 1. Sites outside the box never change.

mod clocks;
mod droplet;
mod engine;
mod generous;
mod halfplane;
mod observers;
mod random_rects;
mod trace;

pub use clocks::{Clocks, CoupledClocks, IndependentClocks};
pub use droplet::{droplet_times, droplet_times_with, ks_rect_time_with, modified_ks_time, modified_ks_time_with, relaxation_time, DropletTimes};
pub use engine::{simulate, simulate_observed, Engine, RunEnd};
pub use generous::{
    al_analogue_violations, containment_check, containment_replica, ContainmentReplica, generous_rectangles_from, generous_rectangles_process,
    GenerousConfig, GenerousOutput, GenerousState,
};
pub use halfplane::{generous_halfplane_levels, generous_halfplane_time, recommended_halfwidth};
pub use observers::{DropletRecorder, NullObserver, Observer, RectTracker, SemiPerimeterTracker, TraceRecorder};
pub use random_rects::{random_rectangles_from, random_rectangles_process, sample_nucleations, RandomRectanglesOutput};
pub use trace::{EventTrace, TraceHeader};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeError, Rect, Site};

/// Default cap on infection events per trace.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error)]
pub enum KineticsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("event budget of {budget} exhausted at t={t}")]
    Budget { budget: u64, t: f64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    /// Full dynamics with nucleation.
    #[serde(rename = "DS")]
    Ds,
    /// Growth from the initial set; no nucleation.
    #[serde(rename = "KS")]
    Ks,
    /// As `Ks`, with every 2-neighbour infection instantaneous.
    #[serde(rename = "ModifiedKS")]
    ModifiedKs,
    /// Upward/lateral growth from the lower half-plane.
    #[serde(rename = "GenerousHalfPlane")]
    GenerousHalfPlane,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Ds => "DS",
            Flavor::Ks => "KS",
            Flavor::ModifiedKs => "ModifiedKS",
            Flavor::GenerousHalfPlane => "GenerousHalfPlane",
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "DS" => Ok(Flavor::Ds),
            "KS" => Ok(Flavor::Ks),
            "ModifiedKS" => Ok(Flavor::ModifiedKs),
            "GenerousHalfPlane" => Ok(Flavor::GenerousHalfPlane),
            other => Err(format!("unknown flavor {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    pub n: f64,
    pub k: f64,
    #[serde(rename = "box")]
    pub bx: Rect,
    pub flavor: Flavor,
}

impl ProcessParams {
    pub fn new(n: f64, k: f64, bx: Rect, flavor: Flavor) -> Result<Self, KineticsError> {
        let p = ProcessParams { n, k, bx, flavor };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), KineticsError> {
        if !(self.n.is_finite() && self.n > 0.0) {
            return Err(KineticsError::InvalidParams(format!("n must be positive, got {}", self.n)));
        }
        if !(self.k.is_finite() && self.k >= 1.0 && self.k <= self.n) {
            return Err(KineticsError::InvalidParams(format!("need 1 <= k <= n, got k={} n={}", self.k, self.n)));
        }
        Ok(())
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }

    pub fn one_neighbour_rate(&self) -> f64 {
        self.k / self.n
    }

    pub fn nucleation_rate(&self) -> f64 {
        1.0 / self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "arg", rename_all = "snake_case")]
pub enum StopRule {
    OriginInfected,
    SquareFilled(u64),
    RectReached(u64),
    TimeHorizon(f64),
    BoxFilled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cause {
    Nucleation,
    OneNeighbour,
    TwoNeighbour,
    Instantaneous,
}

impl Cause {
    pub fn as_str(self) -> &'static str {
        match self {
            Cause::Nucleation => "nucleation",
            Cause::OneNeighbour => "one_neighbour",
            Cause::TwoNeighbour => "two_neighbour",
            Cause::Instantaneous => "instantaneous",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub site: Site,
    pub cause: Cause,
}

/// How a run ended without error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// The stop rule (or an observer) was satisfied.
    Stopped,
    /// The time horizon passed before the next event.
    Horizon,
    /// No further event can occur.
    Exhausted,
}
