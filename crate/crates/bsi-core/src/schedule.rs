//! Precision schedules and per-channel prior parameters.
//!
//! A schedule controls how much measurement precision has been accumulated by
//! time `t` via the exponential parameterization
//!
//! ```text
//! beta(t) = beta_start * (exp(t * ln(beta_end / beta_start)) - 1)
//! ```
//!
//! so `beta(0) = 0` and `beta(1) = beta_end - beta_start`. The prior over
//! initial logits is `N(mu0, beta0 * I)`; the prior precision lives entirely
//! in `beta0`, never in `beta(t)`.

use crate::error::{BsiError, Result};

/// Floor applied to class probabilities before taking logs for `mu0`.
pub const MU0_PROB_FLOOR: f64 = 1e-6;

/// How the prior mean logits are chosen for a channel.
#[derive(Clone, Debug, PartialEq)]
pub enum Mu0Mode {
    /// `log(1/c)` in every class.
    Uniform,
    /// Log of the dataset's marginal class distribution, floored at
    /// [`MU0_PROB_FLOOR`].
    Marginal,
    /// Caller-provided logits.
    Explicit(Vec<f64>),
}

/// Precision schedule plus prior parameters for one channel (nodes or edges).
#[derive(Clone, Debug)]
pub struct PrecisionSchedule {
    beta_start: f64,
    beta_end: f64,
    log_rate: f64,
    beta0: f64,
    mu0: Vec<f64>,
}

impl PrecisionSchedule {
    pub fn new(beta_start: f64, beta_end: f64, beta0: f64, mu0: Vec<f64>) -> Result<Self> {
        if !(beta_start > 0.0 && beta_end > beta_start) {
            return Err(BsiError::Config(format!(
                "need beta_end > beta_start > 0, got beta_start={beta_start}, beta_end={beta_end}"
            )));
        }
        if !(beta0 >= 0.0) {
            return Err(BsiError::Config(format!("need beta0 >= 0, got {beta0}")));
        }
        if mu0.is_empty() || mu0.iter().any(|v| !v.is_finite()) {
            return Err(BsiError::Config("mu0 must be nonempty and finite".into()));
        }
        Ok(Self {
            beta_start,
            beta_end,
            log_rate: (beta_end / beta_start).ln(),
            beta0,
            mu0,
        })
    }

    /// Schedule with `mu0 = log(1/c)` per class.
    pub fn uniform_prior(beta_start: f64, beta_end: f64, beta0: f64, c: usize) -> Result<Self> {
        Self::new(beta_start, beta_end, beta0, mu0_uniform(c))
    }

    pub fn beta_start(&self) -> f64 {
        self.beta_start
    }

    pub fn beta_end(&self) -> f64 {
        self.beta_end
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    /// Prior mean logits; length is the channel's class count.
    pub fn mu0(&self) -> &[f64] {
        &self.mu0
    }

    pub fn n_classes(&self) -> usize {
        self.mu0.len()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&t) {
            return Err(BsiError::Domain(format!("t={t} outside [0, 1]")));
        }
        Ok(())
    }

    /// Cumulative precision at time `t`.
    pub fn beta(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.beta_start * ((t * self.log_rate).exp() - 1.0))
    }

    /// Analytic derivative of [`Self::beta`].
    pub fn beta_prime(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.beta_start * self.log_rate * (t * self.log_rate).exp())
    }

    /// Measurement precision accumulated over `[t_lo, t_hi]`:
    /// `beta(t_hi) - beta(t_lo)`.
    pub fn alpha(&self, t_lo: f64, t_hi: f64) -> Result<f64> {
        if !(t_lo < t_hi) {
            return Err(BsiError::Domain(format!(
                "need t_lo < t_hi, got ({t_lo}, {t_hi})"
            )));
        }
        Ok(self.beta(t_hi)? - self.beta(t_lo)?)
    }

    /// Total variance of the encoding marginal at time `t`: `beta0 + beta(t)`.
    pub fn total_variance(&self, t: f64) -> Result<f64> {
        Ok(self.beta0 + self.beta(t)?)
    }
}

/// Uniform prior mean logits: `log(1/c)` repeated.
pub fn mu0_uniform(c: usize) -> Vec<f64> {
    vec![(1.0 / c as f64).ln(); c]
}

/// Prior mean logits from a marginal class distribution, floored before log.
pub fn mu0_from_marginal(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .map(|&p| p.max(MU0_PROB_FLOOR).ln())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::KeyedRng;

    fn moses(beta0: f64) -> PrecisionSchedule {
        PrecisionSchedule::uniform_prior(3.0, 12.0, beta0, 3).unwrap()
    }

    #[test]
    fn beta_endpoint_values() {
        let s = moses(1.0);
        assert_eq!(s.beta(0.0).unwrap(), 0.0);
        assert!((s.beta(1.0).unwrap() - 9.0).abs() < 1e-12);
        assert!((s.beta(0.5).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn beta_rejects_out_of_range_time() {
        let s = moses(1.0);
        assert!(s.beta(-0.01).is_err());
        assert!(s.beta(1.01).is_err());
        assert!(s.beta_prime(2.0).is_err());
    }

    #[test]
    fn beta_prime_analytic_values() {
        let s = moses(1.0);
        let b = 4.0f64.ln();
        assert!((s.beta_prime(0.0).unwrap() - 3.0 * b).abs() < 1e-12);
        assert!((s.beta_prime(1.0).unwrap() - 12.0 * b).abs() < 1e-12);
    }

    #[test]
    fn beta_prime_matches_central_difference() {
        let s = moses(0.5);
        let h = 1e-6;
        for i in 1..100 {
            let t = i as f64 / 100.0;
            let fd = (s.beta(t + h).unwrap() - s.beta(t - h).unwrap()) / (2.0 * h);
            let an = s.beta_prime(t).unwrap();
            assert!((an - fd).abs() < 1e-6 * (1.0 + an.abs()), "t={t}: {an} vs {fd}");
        }
    }

    #[test]
    fn alpha_positive_and_rejects_bad_interval() {
        let s = moses(1.0);
        assert!((s.alpha(0.0, 1.0).unwrap() - 9.0).abs() < 1e-12);
        assert!(s.alpha(0.3, 0.3).is_err());
        assert!(s.alpha(0.5, 0.2).is_err());
    }

    #[test]
    fn alpha_partition_additivity() {
        let s = moses(1.0);
        let lhs = s.alpha(0.0, 0.3).unwrap() + s.alpha(0.3, 1.0).unwrap();
        let rhs = s.alpha(0.0, 1.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn monotone_on_random_pairs() {
        let s = moses(0.0);
        let mut lane = KeyedRng::new(11).lane(0, 0);
        for _ in 0..1000 {
            let (a, b) = (lane.uniform(), lane.uniform());
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if lo < hi {
                assert!(s.beta(lo).unwrap() < s.beta(hi).unwrap());
            }
        }
    }

    #[test]
    fn telescoping_over_grid() {
        let s = moses(1.0);
        let k = 37;
        let mut sum = 0.0;
        for i in 0..k {
            sum += s.alpha(i as f64 / k as f64, (i + 1) as f64 / k as f64).unwrap();
        }
        let total = s.beta(1.0).unwrap();
        assert!((sum - total).abs() < 1e-12 * total);
    }

    #[test]
    fn mu0_helpers() {
        let u = mu0_uniform(4);
        assert_eq!(u.len(), 4);
        assert!((u[0] - 0.25f64.ln()).abs() < 1e-15);
        let m = mu0_from_marginal(&[0.5, 0.5, 0.0]);
        assert!((m[2] - MU0_PROB_FLOOR.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PrecisionSchedule::uniform_prior(0.0, 12.0, 1.0, 3).is_err());
        assert!(PrecisionSchedule::uniform_prior(3.0, 3.0, 1.0, 3).is_err());
        assert!(PrecisionSchedule::uniform_prior(3.0, 12.0, -1.0, 3).is_err());
    }
}
