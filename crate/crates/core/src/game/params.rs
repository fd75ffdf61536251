use crate::scenario::Scenario;
use crate::{Error, Result};

/// Boltzmann constant times 290 K, in dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;
pub const DEFAULT_NOISE_FIGURE_DB: f64 = 9.0;

/// Utility, cost and dynamics parameters shared by all teams.
#[derive(Debug, Clone, PartialEq)]
pub struct GameParams {
    /// Sigmoid steepness.
    pub alpha: f64,
    /// Sigmoid centre, linear SINR.
    pub beta: f64,
    /// Price per unit fraction of unserved users.
    pub delta: f64,
    /// Price weight, `0 < k <= 1/4`.
    pub k: f64,
    /// Linear SINR at or below which a user counts as unserved.
    pub gamma_min: f64,
    /// Noise power (W) per carrier index.
    pub noise_power_w: Vec<f64>,
    /// Relative payoff tolerance under which two strategies tie.
    pub tie_tolerance: f64,
    pub max_rounds: usize,
    /// Recompute the playing team's prices before every best reply instead
    /// of once per game.
    pub update_prices_each_iteration: bool,
}

impl GameParams {
    /// alpha = beta = 1, delta = 0.6, k = 0.25, gamma_min = -10 dB and thermal
    /// noise over each carrier's bandwidth.
    pub fn defaults_for(scenario: &Scenario) -> Self {
        let noise = scenario
            .carriers()
            .iter()
            .map(|c| thermal_noise_w(c.bandwidth_hz, DEFAULT_NOISE_FIGURE_DB))
            .collect();
        Self::with_noise(noise)
    }

    pub fn with_noise(noise_power_w: Vec<f64>) -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            delta: 0.6,
            k: 0.25,
            gamma_min: 0.1,
            noise_power_w,
            tie_tolerance: 1e-9,
            max_rounds: 50,
            update_prices_each_iteration: false,
        }
    }

    pub fn check(&self, carriers: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if !(self.alpha > 0.0) || !self.beta.is_finite() {
            return bad("alpha must be > 0 and beta finite");
        }
        if !(self.delta >= 0.0) {
            return bad("delta must be >= 0");
        }
        if !(self.k > 0.0 && self.k <= 0.25) {
            return bad("k must lie in (0, 1/4]");
        }
        if !(self.gamma_min > 0.0) {
            return bad("gamma_min must be > 0 (linear)");
        }
        if self.noise_power_w.len() != carriers || self.noise_power_w.iter().any(|n| !(*n > 0.0)) {
            return bad("noise_power_w needs one positive entry per carrier");
        }
        if !(self.tie_tolerance >= 0.0) || self.max_rounds == 0 {
            return bad("tie_tolerance must be >= 0 and max_rounds >= 1");
        }
        Ok(())
    }

    /// `true` when `value` is within the tie tolerance of `best`.
    #[inline]
    pub fn ties_with(&self, value: f64, best: f64) -> bool {
        value >= best - self.tie_tolerance * best.abs().max(1.0)
    }
}

/// Thermal noise power (W) over `bandwidth_hz` with a receiver noise figure.
pub fn thermal_noise_w(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    let dbm = THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db;
    10f64.powf((dbm - 30.0) / 10.0)
}
