use crate::game::sigmoid;
use crate::scenario::PowerLevelSet;
use crate::{Error, Result};

/// One location, one tile, one carrier with a continuous power choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousGameParams {
    pub alpha: f64,
    pub beta: f64,
    /// Gain from the location to the tile.
    pub a: f64,
    pub noise_w: f64,
    /// Price per received watt.
    pub xi: f64,
    pub s_max: f64,
}

/// Best reply to interference `I` in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormReply {
    /// Stationary point of the payoff clamped to `[0, s_max]`; 0 when degenerate.
    pub watts: f64,
    /// Payoff maximizer over `[0, s_max]`: the better of 0, `watts` and `s_max`.
    pub global_watts: f64,
    /// No real stationary point exists (price above the bound).
    pub degenerate: bool,
}

/// Largest price that still admits a real stationary point.
pub fn price_bound(interference: f64, p: &ContinuousGameParams) -> f64 {
    p.alpha / (4.0 * (interference + p.noise_w))
}

/// `sigmoid(alpha (a s / (I + N) - beta)) - xi a s`.
pub fn scalar_payoff(s: f64, interference: f64, p: &ContinuousGameParams) -> f64 {
    let sinr = p.a * s / (interference + p.noise_w);
    sigmoid(p.alpha, p.beta, sinr) - p.xi * p.a * s
}

/// Relative rounding slack within which a price counts as exactly on the bound.
const BOUND_SLACK: f64 = 1e-12;

fn radicand(interference: f64, p: &ContinuousGameParams) -> f64 {
    let r = p.alpha * (p.alpha - 4.0 * p.xi * (interference + p.noise_w));
    if r.abs() <= BOUND_SLACK * p.alpha * p.alpha {
        0.0
    } else {
        r
    }
}

fn log_root(interference: f64, p: &ContinuousGameParams) -> Result<(f64, f64)> {
    let j = interference + p.noise_w;
    let mut x = p.alpha / (2.0 * p.xi * j) - 1.0;
    if (x - 1.0).abs() <= BOUND_SLACK {
        x = 1.0;
    }
    if !(x >= 1.0) {
        return Err(Error::Domain(format!(
            "price {} exceeds the bound {} at interference {interference}",
            p.xi,
            price_bound(interference, p)
        )));
    }
    // ln(x - sqrt(x^2 - 1)) without the cancellation for large x.
    Ok((-x.acosh(), j))
}

/// Unclamped stationary point of the payoff (the local maximum).
pub fn stationary_point(interference: f64, p: &ContinuousGameParams) -> Result<f64> {
    let (ln_y, j) = log_root(interference, p)?;
    Ok(-j / (p.alpha * p.a) * (ln_y - p.alpha * p.beta))
}

pub fn closed_form_best_reply(interference: f64, p: &ContinuousGameParams) -> ClosedFormReply {
    let (watts, degenerate) = match stationary_point(interference, p) {
        Ok(s) => (s.clamp(0.0, p.s_max), false),
        Err(_) => (0.0, true),
    };
    let mut global_watts = 0.0;
    let mut best = scalar_payoff(0.0, interference, p);
    for s in [watts, p.s_max] {
        let w = scalar_payoff(s, interference, p);
        if w > best {
            best = w;
            global_watts = s;
        }
    }
    ClosedFormReply {
        watts,
        global_watts,
        degenerate,
    }
}

/// Slope of the stationary point with respect to interference.
///
/// Returns negative infinity exactly at the price bound.
pub fn best_reply_derivative(interference: f64, p: &ContinuousGameParams) -> Result<f64> {
    let radicand = radicand(interference, p);
    if radicand < 0.0 {
        return Err(Error::Domain(format!("negative radicand {radicand}")));
    }
    if radicand == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let (ln_y, _) = log_root(interference, p)?;
    Ok(p.beta / p.a - 1.0 / (p.a * radicand.sqrt()) - ln_y / (p.alpha * p.a))
}

/// Utility and payoff obtained when playing the stationary point.
pub fn payoff_along_best_reply(interference: f64, p: &ContinuousGameParams) -> Result<(f64, f64)> {
    let j = interference + p.noise_w;
    let radicand = radicand(interference, p);
    if radicand < 0.0 {
        return Err(Error::Domain(format!("negative radicand {radicand}")));
    }
    let u = 2.0 * p.xi * j / (p.alpha - radicand.sqrt());
    let s = stationary_point(interference, p)?;
    Ok((u, u - p.xi * p.a * s))
}

/// Maximizer of the scalar payoff over `points` uniform samples of `[0, s_max]`.
pub fn grid_best_reply(interference: f64, p: &ContinuousGameParams, points: usize) -> f64 {
    let step = p.s_max / (points - 1) as f64;
    let (mut arg, mut best) = (0.0, f64::NEG_INFINITY);
    for i in 0..points {
        let s = i as f64 * step;
        let w = scalar_payoff(s, interference, p);
        if w > best {
            best = w;
            arg = s;
        }
    }
    arg
}

/// Best discrete power (watts) for the scalar game including the unserved
/// penalty; among payoffs within a relative 1e-9 of the maximum the lowest
/// power wins.
pub fn discrete_best_reply(
    interference: f64,
    p: &ContinuousGameParams,
    levels: &PowerLevelSet,
    delta: f64,
    gamma_min: f64,
) -> f64 {
    let j = interference + p.noise_w;
    let values: Vec<(f64, f64)> = levels
        .fractions()
        .iter()
        .map(|&f| {
            let s = f * p.s_max;
            let unserved = if p.a * s / j <= gamma_min { delta } else { 0.0 };
            (s, scalar_payoff(s, interference, p) - unserved)
        })
        .collect();
    let best = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .find(|(_, w)| *w >= best - 1e-9 * best.abs().max(1.0))
        .map_or(0.0, |(s, _)| *s)
}
