use super::special::{bd0, ln_2pi, stirlerr, Compensated};
use super::AnalyticsError;

/// Probability that a site nucleates by time `t`: `1 − e^{−t/n}`.
pub fn nucleation_probability(t: f64, n: f64) -> f64 {
    -(-t / n).exp_m1()
}

/// `ln P(Bin(size, p) = x)` with `ln q` passed separately so that
/// `q = e^{−t/n}` stays exact.
fn ln_binomial_pmf(x: u64, size: u64, p: f64, ln_q: f64) -> f64 {
    if x > size {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if x == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let q = ln_q.exp();
    if x == 0 {
        return size as f64 * ln_q;
    }
    if x == size {
        return size as f64 * p.ln();
    }
    if q == 0.0 {
        return f64::NEG_INFINITY;
    }
    let (xf, nf) = (x as f64, size as f64);
    let rest = nf - xf;
    stirlerr(nf) - stirlerr(xf) - stirlerr(rest) - bd0(xf, nf * p) - bd0(rest, nf * q)
        + 0.5 * (nf.ln() - ln_2pi() - xf.ln() - rest.ln())
}

pub fn binomial_pmf(x: u64, size: u64, p: f64) -> f64 {
    ln_binomial_pmf(x, size, p, (-p).ln_1p()).exp()
}

fn check(area: u64, t: f64, n: f64) -> Result<(), AnalyticsError> {
    if area == 0 {
        return Err(AnalyticsError::InvalidInput("area must be positive".into()));
    }
    if !(t >= 0.0 && n > 0.0) {
        return Err(AnalyticsError::InvalidInput(format!("need t >= 0 and n > 0, got t={t} n={n}")));
    }
    Ok(())
}

/// Probability of exactly `ell` nucleations among `area` sites by time `t`:
/// the `Bin(area, 1 − e^{−t/n})` mass at `ell`.
pub fn nucleation_count_pmf(area: u64, t: f64, n: f64, ell: u64) -> Result<f64, AnalyticsError> {
    check(area, t, n)?;
    if ell > area {
        return Err(AnalyticsError::InvalidInput(format!("ell={ell} exceeds area={area}")));
    }
    Ok(ln_binomial_pmf(ell, area, nucleation_probability(t, n), -t / n).exp())
}

/// Probability of at least `ell` nucleations among `area` sites by time `t`.
pub fn nucleation_count_tail(area: u64, t: f64, n: f64, ell: u64) -> Result<f64, AnalyticsError> {
    check(area, t, n)?;
    if ell == 0 {
        return Ok(1.0);
    }
    if ell > area {
        return Ok(0.0);
    }
    let p = nucleation_probability(t, n);
    let ln_q = -t / n;
    let mean = area as f64 * p;
    let mut acc = Compensated::default();
    if ell as f64 > mean {
        for j in ell..=area {
            let term = ln_binomial_pmf(j, area, p, ln_q).exp();
            acc.add(term);
            if term <= 1e-18 * acc.value() {
                break;
            }
        }
        Ok(acc.value().min(1.0))
    } else {
        for j in (0..ell).rev() {
            let term = ln_binomial_pmf(j, area, p, ln_q).exp();
            acc.add(term);
            if term <= 1e-18 * acc.value() {
                break;
            }
        }
        Ok((1.0 - acc.value()).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(nucleation_count_pmf(10, 0.0, 5.0, 0).unwrap(), 1.0);
        assert_eq!(nucleation_count_pmf(10, 0.0, 5.0, 3).unwrap(), 0.0);
        let e4 = nucleation_count_pmf(4, 7.0, 7.0, 0).unwrap();
        assert!((e4 - (-4.0f64).exp()).abs() < 1e-15);
        assert!(nucleation_count_pmf(4, 1.0, 1.0, 5).is_err());
    }

    #[test]
    fn sums_to_one() {
        for (area, t, n) in [(1u64, 0.3, 1.0), (50, 2.0, 10.0), (2000, 1.0, 1e3), (40_000, 100.0, 1e6)] {
            let s: f64 = (0..=area).map(|l| nucleation_count_pmf(area, t, n, l).unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-9, "area={area}: {s}");
        }
    }

    #[test]
    fn against_direct_product() {
        // C(12, 5) p^5 q^7
        let p: f64 = 0.3;
        let direct = 792.0 * p.powi(5) * (1.0 - p).powi(7);
        assert!((binomial_pmf(5, 12, p) / direct - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tail_consistency() {
        let (area, t, n) = (500u64, 30.0, 1000.0);
        for ell in [0u64, 1, 5, 15, 40, 500] {
            let tail = nucleation_count_tail(area, t, n, ell).unwrap();
            let direct: f64 = (ell..=area).map(|j| nucleation_count_pmf(area, t, n, j).unwrap()).sum();
            assert!((tail - direct).abs() <= 1e-12 * direct.max(1e-300) + 1e-15, "ell={ell}");
        }
    }
}
