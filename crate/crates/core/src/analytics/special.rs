//! Saddle-point pieces for accurate Poisson and binomial masses.

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln Γ(n+1) − (n + ½) ln n + n − ½ ln 2π` for integer `n ≥ 1`.
pub(crate) fn stirlerr(n: f64) -> f64 {
    if n <= 15.0 {
        let mut ln_fact = 0.0;
        let mut i = 2.0;
        while i <= n {
            ln_fact += f64::ln(i);
            i += 1.0;
        }
        return ln_fact - (n + 0.5) * n.ln() + n - LN_SQRT_2PI;
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let nn = n * n;
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
}

/// Deviance term `x ln(x/m) + m − x`, accurate when `x ≈ m`.
pub(crate) fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let mut v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

pub(crate) fn ln_2pi() -> f64 {
    (2.0 * PI).ln()
}

/// Kahan–Babuška summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirlerr_continuity() {
        // the series and the direct form agree around the switch
        let direct = |n: f64| statrs::function::gamma::ln_gamma(n + 1.0) - (n + 0.5) * n.ln() + n - LN_SQRT_2PI;
        for n in [16.0, 20.0, 40.0] {
            assert!((stirlerr(n) - direct(n)).abs() < 1e-13);
        }
        assert!((stirlerr(1.0) - (1.0 - LN_SQRT_2PI)).abs() < 1e-15);
    }

    #[test]
    fn bd0_branches_agree() {
        for (x, m) in [(10.0, 10.5), (100.0, 99.0), (7.0, 7.0)] {
            let naive: f64 = x * (x / m as f64).ln() + m - x;
            assert!((bd0(x, m) - naive).abs() < 1e-10);
        }
        assert_eq!(bd0(5.0, 5.0), 0.0);
    }
}
