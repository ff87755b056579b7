use std::f64::consts::PI;

use serde::Serialize;

use super::AnalyticsError;

/// Critical constant `π²/18` of two-neighbour bootstrap percolation.
pub const LAMBDA: f64 = PI * PI / 18.0;

/// Distance, as a multiplicative factor, within which a regime threshold
/// is flagged as ambiguous.
const BOUNDARY_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    A,
    B,
    C,
    Boundary,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::A => "a",
            Regime::B => "b",
            Regime::C => "c",
            Regime::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimePrediction {
    /// `Boundary` when `k` is within a factor 4 of a threshold.
    pub regime: Regime,
    /// The regime a sharp cut at the thresholds would pick.
    pub nominal: Regime,
    pub tau_predicted: f64,
    pub formula: &'static str,
    /// Predictions of the neighbouring regime(s) when on a boundary and the
    /// formula is defined there.
    pub alternatives: Vec<(Regime, f64)>,
}

const FORMULA_A: &str = "(pi^2/18) n / ln n";
const FORMULA_B: &str = "(1/4)(n/k) ln(k / ln n)";
const FORMULA_C: &str = "(n^2 / (k ln(n/k)))^(1/3)";

fn tau_a(n: f64) -> f64 {
    LAMBDA * n / n.ln()
}

fn tau_b(n: f64, k: f64) -> Option<f64> {
    let v = 0.25 * (n / k) * (k / n.ln()).ln();
    (v.is_finite() && v > 0.0).then_some(v)
}

fn tau_c(n: f64, k: f64) -> Option<f64> {
    let v = (n * n / (k * (n / k).ln())).cbrt();
    (v.is_finite() && v > 0.0).then_some(v)
}

/// Lower and upper thresholds in `k`: `ln n` and `√n (ln n)²`.
pub fn regime_thresholds(n: f64) -> (f64, f64) {
    let l = n.ln();
    (l, n.sqrt() * l * l)
}

/// Relaxation-time prediction with regime classification.
pub fn predict_tau(n: f64, k: f64) -> Result<RegimePrediction, AnalyticsError> {
    if !(n.is_finite() && n > 1.0) {
        return Err(AnalyticsError::InvalidInput(format!("need n > 1, got {n}")));
    }
    if !(k >= 1.0 && k <= n) {
        return Err(AnalyticsError::InvalidInput(format!("need 1 <= k <= n, got k={k}")));
    }
    let (lo, hi) = regime_thresholds(n);
    let invalid = |r: &str| AnalyticsError::InvalidInput(format!("regime {r} formula undefined at n={n}, k={k}"));
    let (nominal, tau, formula) = if k <= lo {
        (Regime::A, tau_a(n), FORMULA_A)
    } else if k >= hi {
        (Regime::C, tau_c(n, k).ok_or_else(|| invalid("c"))?, FORMULA_C)
    } else {
        (Regime::B, tau_b(n, k).ok_or_else(|| invalid("b"))?, FORMULA_B)
    };
    let near = |th: f64| k >= th / BOUNDARY_FACTOR && k <= th * BOUNDARY_FACTOR;
    let mut alternatives = Vec::new();
    if near(lo) {
        match nominal {
            Regime::A => alternatives.extend(tau_b(n, k).map(|v| (Regime::B, v))),
            _ => alternatives.push((Regime::A, tau_a(n))),
        }
    }
    if near(hi) {
        match nominal {
            Regime::C => alternatives.extend(tau_b(n, k).map(|v| (Regime::B, v))),
            _ => alternatives.extend(tau_c(n, k).map(|v| (Regime::C, v))),
        }
    }
    let regime = if near(lo) || near(hi) { Regime::Boundary } else { nominal };
    Ok(RegimePrediction { regime, nominal, tau_predicted: tau, formula, alternatives })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DropletPhase {
    Degenerate,
    Accelerating,
    Crossover,
    Terminal,
}

impl DropletPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            DropletPhase::Degenerate => "degenerate",
            DropletPhase::Accelerating => "accelerating",
            DropletPhase::Crossover => "crossover",
            DropletPhase::Terminal => "terminal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DropletPrediction {
    /// `(n/2k) ln m`.
    pub accelerating: f64,
    /// `m √(n/k) / √2`.
    pub terminal: f64,
    pub phase: DropletPhase,
}

/// Droplet growth-time predictions for both phases; the phase label uses
/// `√((n/k) ln(n/k))` and `√(n/k) ln(n/k)` as the two crossover scales.
pub fn predict_droplet(n: f64, k: f64, m: u64) -> Result<DropletPrediction, AnalyticsError> {
    if m < 2 {
        return Err(AnalyticsError::InvalidInput(format!("need m >= 2, got {m}")));
    }
    if !(n > 0.0 && k > 0.0 && k <= n) {
        return Err(AnalyticsError::InvalidInput(format!("need 0 < k <= n, got n={n} k={k}")));
    }
    let r = n / k;
    let mf = m as f64;
    let accelerating = 0.5 * r * mf.ln();
    let terminal = mf * r.sqrt() / std::f64::consts::SQRT_2;
    let s1 = (r * r.ln()).sqrt();
    let s2 = r.sqrt() * r.ln();
    let phase = if m == 2 {
        DropletPhase::Degenerate
    } else if mf <= s1.min(s2) {
        DropletPhase::Accelerating
    } else if mf >= s1.max(s2) {
        DropletPhase::Terminal
    } else {
        DropletPhase::Crossover
    };
    Ok(DropletPrediction { accelerating, terminal, phase })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() < rel
    }

    #[test]
    fn tau_examples() {
        let a = predict_tau(1e6, 1.0).unwrap();
        assert_eq!(a.regime, Regime::A);
        assert!(close(a.tau_predicted, 3.969e4, 1e-3));
        let b = predict_tau(1e6, 1e3).unwrap();
        assert_eq!(b.regime, Regime::B);
        assert!(close(b.tau_predicted, 250.0 * (1e3 / 1e6f64.ln()).ln(), 1e-12));
        assert!(close(b.tau_predicted, 1.070e3, 1e-3));
        let c = predict_tau(1e6, 9e5).unwrap();
        assert_eq!(c.regime, Regime::C);
        assert!(close(c.tau_predicted, 2.19e2, 5e-3));
    }

    #[test]
    fn boundary_band() {
        let n = 1e6;
        let (lo, hi) = regime_thresholds(n);
        let p = predict_tau(n, lo * 2.0).unwrap();
        assert_eq!(p.regime, Regime::Boundary);
        assert_eq!(p.nominal, Regime::B);
        assert_eq!(p.alternatives[0].0, Regime::A);
        let q = predict_tau(n, hi / 2.0).unwrap();
        assert_eq!(q.regime, Regime::Boundary);
        assert_eq!(q.alternatives, vec![(Regime::C, tau_c(n, hi / 2.0).unwrap())]);
        assert!(predict_tau(n, 0.5).is_err());
    }

    #[test]
    fn finite_over_grid() {
        for n in [1e3, 1e4, 1e5, 1e6, 1e8] {
            let mut k = 2.0;
            while k <= n / 2.0 {
                let p = predict_tau(n, k).unwrap();
                assert!(p.tau_predicted.is_finite() && p.tau_predicted > 0.0, "n={n} k={k}");
                k *= 1.37;
            }
        }
    }

    #[test]
    fn droplet_examples() {
        let d = predict_droplet(1e6, 100.0, 100).unwrap();
        assert!(close(d.accelerating, 2.303e4, 1e-3));
        assert_eq!(d.phase, DropletPhase::Accelerating);
        let t = predict_droplet(1e4, 100.0, 1000).unwrap();
        assert!(close(t.terminal, 7.071e3, 1e-3));
        assert_eq!(t.phase, DropletPhase::Terminal);
        let g = predict_droplet(1e4, 100.0, 2).unwrap();
        assert_eq!(g.phase, DropletPhase::Degenerate);
        assert!(close(g.accelerating, 50.0 * 2f64.ln(), 1e-12));
        assert!(predict_droplet(1e4, 100.0, 1).is_err());
    }
}
