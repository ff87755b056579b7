use std::collections::HashSet;

use serde::Serialize;

use super::binomial::binomial_pmf;
use super::AnalyticsError;

const MIN_SAMPLES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub observable: String,
    /// Parameter group, e.g. `"n=1e6,k=1000,m=100"`.
    pub group: String,
    pub seed: u64,
    pub value: f64,
}

/// Replicated measurements; `(observable, group, seed)` is unique.
#[derive(Debug, Clone, Default)]
pub struct SampleTable {
    rows: Vec<Sample>,
    keys: HashSet<(String, String, u64)>,
}

impl SampleTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, observable: &str, group: &str, seed: u64, value: f64) -> Result<(), AnalyticsError> {
        let key = (observable.to_string(), group.to_string(), seed);
        if !self.keys.insert(key) {
            return Err(AnalyticsError::Duplicate(format!("{observable}/{group}/seed={seed}")));
        }
        self.rows.push(Sample { observable: observable.into(), group: group.into(), seed, value });
        Ok(())
    }

    pub fn rows(&self) -> &[Sample] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn values(&self, observable: &str, group: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.observable == observable && r.group == group).map(|r| r.value).collect()
    }

    /// Groups in order of first appearance.
    pub fn groups(&self, observable: &str) -> Vec<String> {
        let mut seen = indexmap::IndexSet::new();
        for r in self.rows.iter().filter(|r| r.observable == observable) {
            seen.insert(r.group.clone());
        }
        seen.into_iter().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
}

/// Sample quantile `x_(⌈qN⌉)` with a distribution-free 95% interval
/// `[x_(l), x_(u)]` whose ranks come from the exact `Bin(N, q)` law.
pub fn quantile_ci(values: &[f64], q: f64) -> Result<Estimate, AnalyticsError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(AnalyticsError::InvalidInput(format!("quantile {q} outside (0,1)")));
    }
    let n = values.len();
    if n < MIN_SAMPLES {
        return Err(AnalyticsError::InsufficientSamples { need: MIN_SAMPLES, have: n });
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(AnalyticsError::InvalidInput("NaN sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    let alpha = 0.05;
    // cdf[r] = P(B ≤ r − 1) = P(B < r)
    let mut cdf = Vec::with_capacity(n + 2);
    let mut acc = 0.0;
    cdf.push(0.0);
    for j in 0..=n as u64 {
        acc += binomial_pmf(j, n as u64, q);
        cdf.push(acc);
    }
    // largest l with P(B < l) ≤ α/2, smallest u with P(B < u) ≥ 1 − α/2
    let lo = (1..=n).rev().find(|&l| cdf[l] <= alpha / 2.0).unwrap_or(1);
    let hi = (1..=n).find(|&u| cdf[u] >= 1.0 - alpha / 2.0).unwrap_or(n);
    Ok(Estimate { point: v[rank - 1], ci_low: v[lo - 1], ci_high: v[hi.max(lo) - 1], samples: n })
}

/// Quantile estimate for one observable and group of a table.
pub fn estimate(table: &SampleTable, observable: &str, group: &str, q: f64) -> Result<Estimate, AnalyticsError> {
    quantile_ci(&table.values(observable, group), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{exp_sample, rng_from_seed};

    #[test]
    fn constant_samples() {
        let e = quantile_ci(&[5.0; 30], 0.5).unwrap();
        assert_eq!((e.point, e.ci_low, e.ci_high), (5.0, 5.0, 5.0));
    }

    #[test]
    fn symmetric_ranks() {
        let v: Vec<f64> = (1..=99).map(f64::from).collect();
        let e = quantile_ci(&v, 0.5).unwrap();
        assert_eq!(e.point, 50.0);
        assert!(e.ci_low <= 50.0 && e.ci_high >= 50.0);
        assert_eq!(50.0 - e.ci_low, e.ci_high - 50.0);
    }

    #[test]
    fn exponential_median() {
        let mut rng = rng_from_seed(3);
        let v: Vec<f64> = (0..10_000).map(|_| exp_sample(&mut rng, 1.0)).collect();
        let e = quantile_ci(&v, 0.5).unwrap();
        // asymptotic sd of the median: 1/(2 f(m) sqrt(N)) with f(m) = 1/2
        let sd = 1.0 / (10_000f64).sqrt();
        assert!((e.point - 2f64.ln()).abs() < 3.0 * sd);
        assert!(e.ci_low < 2f64.ln() && 2f64.ln() < e.ci_high);
    }

    #[test]
    fn too_few() {
        assert!(matches!(quantile_ci(&[1.0; 19], 0.5), Err(AnalyticsError::InsufficientSamples { .. })));
    }

    #[test]
    fn table_rejects_duplicates() {
        let mut t = SampleTable::new();
        t.push("tau", "g", 1, 2.0).unwrap();
        assert!(t.push("tau", "g", 1, 3.0).is_err());
        t.push("tau", "g", 2, 3.0).unwrap();
        assert_eq!(t.values("tau", "g"), vec![2.0, 3.0]);
    }
}
