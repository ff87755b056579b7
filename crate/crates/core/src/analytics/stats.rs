/// Empirical distribution function.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ecdf { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of samples `≤ x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }
}

/// Dvoretzky–Kiefer–Wolfowitz half-width: with probability `1 − alpha` the
/// ECDF of `n` samples is uniformly within this distance of the true CDF.
pub fn dkw_epsilon(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// `sup_x (F_upper(x) − F_lower(x))` over all sample points. Nonpositive
/// when `lower`'s samples are stochastically smaller, in the sense that its
/// ECDF lies above `upper`'s everywhere.
pub fn dominance_gap(lower: &Ecdf, upper: &Ecdf) -> f64 {
    lower
        .values()
        .iter()
        .chain(upper.values())
        .map(|&x| upper.eval(x) - lower.eval(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kolmogorov distribution tail `Q(λ) = 2 Σ (−1)^{j−1} e^{−2 j² λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value and the
/// usual small-sample correction of the scaling.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let (fa, fb) = (Ecdf::new(a), Ecdf::new(b));
    let d = fa
        .values()
        .iter()
        .chain(fb.values())
        .map(|&x| (fa.eval(x) - fb.eval(x)).abs())
        .fold(0.0, f64::max);
    let ne = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    let s = ne.sqrt();
    KsResult { statistic: d, p_value: kolmogorov_q((s + 0.12 + 0.11 / s) * d) }
}

/// Sample mean and standard deviation (n − 1 denominator).
pub fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}
