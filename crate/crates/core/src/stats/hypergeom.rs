use super::StatsError;

/// `ln C(n, k)`, accumulated as `Σ_{i=1..k} ln(1 + (n-k)/i)` with
/// `k <= n-k`. Stays accurate to a few ulps of the result for the
/// population sizes seen in journal sets (up to ~10⁴), where factorials
/// overflow.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let rest = (n - k) as f64;
    (1..=k).map(|i| (rest / i as f64).ln_1p()).sum()
}

/// Number of successes among `draws` items taken without replacement from
/// `population` items of which `successes` are successes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hypergeometric {
    population: u64,
    successes: u64,
    draws: u64,
    ln_total: f64,
}

impl Hypergeometric {
    pub fn new(population: u64, successes: u64, draws: u64) -> Result<Self, StatsError> {
        if successes > population || draws > population {
            return Err(StatsError::InvalidHypergeometric {
                population,
                successes,
                draws,
            });
        }
        Ok(Self {
            population,
            successes,
            draws,
            ln_total: ln_binomial(population, draws),
        })
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    pub fn successes(&self) -> u64 {
        self.successes
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Smallest and largest attainable count.
    pub fn support(&self) -> (u64, u64) {
        let lo = (self.draws + self.successes).saturating_sub(self.population);
        (lo, self.draws.min(self.successes))
    }

    pub fn mean(&self) -> f64 {
        if self.population == 0 {
            return 0.0;
        }
        self.draws as f64 * self.successes as f64 / self.population as f64
    }

    pub fn ln_pmf(&self, m: u64) -> f64 {
        let (lo, hi) = self.support();
        if m < lo || m > hi {
            return f64::NEG_INFINITY;
        }
        ln_binomial(self.successes, m)
            + ln_binomial(self.population - self.successes, self.draws - m)
            - self.ln_total
    }

    /// `C(K, m) C(N-K, n-m) / C(N, n)`; zero outside the support.
    pub fn pmf(&self, m: u64) -> f64 {
        let (lo, hi) = self.support();
        if m < lo || m > hi {
            return 0.0;
        }
        self.ln_pmf(m).exp()
    }

    /// Probabilities over the support, starting at `support().0`.
    pub fn pmf_support(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        (lo..=hi).map(|m| self.pmf(m)).collect()
    }

    pub fn cdf(&self, m: u64) -> f64 {
        let (lo, hi) = self.support();
        if m < lo {
            return 0.0;
        }
        (lo..=m.min(hi)).map(|k| self.pmf(k)).sum::<f64>().min(1.0)
    }

    /// Probability that the count lands in `[lo, hi]`.
    pub fn interval_mass(&self, lo: u64, hi: u64) -> f64 {
        (lo..=hi).map(|m| self.pmf(m)).sum()
    }

    /// Equal-tail interval `[m_lo, m_hi]` on the count: `m_lo` is the
    /// smallest `m` with `CDF(m) > α/2` and `m_hi` the smallest `m` with
    /// `CDF(m) >= 1 - α/2`, where `α = 1 - level`. Each excluded tail holds
    /// at most `α/2`, so the interval covers at least `level`.
    pub fn central_interval(&self, level: f64) -> Result<(u64, u64), StatsError> {
        if !(level > 0.0 && level < 1.0) {
            return Err(StatsError::InvalidLevel(level));
        }
        let tail = (1.0 - level) / 2.0;
        let (lo, hi) = self.support();
        let mut m_lo = None;
        let mut cum = 0.0;
        for (m, p) in (lo..=hi).zip(self.pmf_support()) {
            cum += p;
            if m_lo.is_none() && cum > tail {
                m_lo = Some(m);
            }
            if cum >= 1.0 - tail {
                return Ok((m_lo.unwrap_or(m), m));
            }
        }
        Ok((m_lo.unwrap_or(hi), hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact binomial coefficient.
    fn choose(n: u64, k: u64) -> u128 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }

    #[test]
    fn five_choose_two() {
        // Ten equally likely 2-subsets of {S, S, F, F, F}; six hold one S.
        let h = Hypergeometric::new(5, 2, 2).unwrap();
        assert!((h.pmf(1) - 0.6).abs() < 1e-15);
        assert!((h.pmf(0) - 0.3).abs() < 1e-15);
        assert!((h.pmf(2) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn no_successes() {
        let h = Hypergeometric::new(10, 0, 4).unwrap();
        assert_eq!(h.pmf(0), 1.0);
        assert_eq!(h.pmf(1), 0.0);
        assert_eq!(h.central_interval(0.9).unwrap(), (0, 0));
    }

    #[test]
    fn whole_population_is_deterministic() {
        let h = Hypergeometric::new(3695, 3695, 369).unwrap();
        assert_eq!(h.support(), (369, 369));
        assert_eq!(h.pmf(369), 1.0);
        assert_eq!(h.central_interval(0.9).unwrap(), (369, 369));
    }

    #[test]
    fn ln_binomial_is_exact_for_small_arguments() {
        for n in 0..=60u64 {
            for k in 0..=n {
                let exact = (choose(n, k) as f64).ln();
                assert!((ln_binomial(n, k) - exact).abs() <= 1e-13 * exact.max(1.0), "{n} {k}");
            }
        }
        assert_eq!(ln_binomial(3, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn invalid_parameters() {
        assert!(Hypergeometric::new(5, 6, 1).is_err());
        assert!(Hypergeometric::new(5, 1, 6).is_err());
        let h = Hypergeometric::new(5, 1, 1).unwrap();
        assert!(h.central_interval(1.0).is_err());
        assert!(h.central_interval(0.0).is_err());
    }

    #[test]
    fn interval_against_brute_force_cdf() {
        // N=20, K=10, n=10, level 0.90; CDF from exact integer counts.
        let h = Hypergeometric::new(20, 10, 10).unwrap();
        let total = choose(20, 10) as f64;
        let cdf: Vec<f64> = (0..=10u64)
            .scan(0u128, |acc, m| {
                *acc += choose(10, m) * choose(10, 10 - m);
                Some(*acc as f64 / total)
            })
            .collect();
        let lo = (0..=10).find(|&m| cdf[m] > 0.05).unwrap() as u64;
        let hi = (0..=10).find(|&m| cdf[m] >= 0.95).unwrap() as u64;
        assert_eq!((lo, hi), (3, 7));
        assert_eq!(h.central_interval(0.9).unwrap(), (lo, hi));
        assert!(h.interval_mass(lo, hi) >= 0.9);
    }
}
