use rand::Rng;

use crate::game::{Game, PriceTable, StrategyProfile};
use crate::rng::{stream, Stream};
use crate::{Error, Result};

/// A sampled pair where more interference led to a larger best reply.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutesViolation {
    pub team: usize,
    /// Frobenius norms of the interference matrices, lower then higher.
    pub interference_norms: (f64, f64),
    /// Frobenius norms (watts) of the best replies to each.
    pub reply_norms: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubstitutesReport {
    pub pairs_checked: usize,
    /// Pairs whose interference matrices were not element-wise ordered.
    pub skipped_incomparable: usize,
    pub violations: Vec<SubstitutesViolation>,
}

/// Largest joint strategy set a team may have for this check.
const REPLY_LIMIT: u128 = 1_000_000;

/// Samples pairs of opponent profiles and tests whether a team's joint best
/// reply shrinks (in Frobenius norm) when the interference it faces grows
/// element-wise.
///
/// Half of the pairs raise the first profile's opponent levels, which makes
/// them comparable by construction; the other half are independent draws and
/// are skipped unless they happen to be ordered.
pub fn check_strategic_substitutes(
    game: &Game,
    prices: &PriceTable,
    sample_count: usize,
    seed: u64,
) -> Result<SubstitutesReport> {
    let s = game.scenario();
    if prices.as_slice().iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidInput("strategic substitutes require every price > 0".into()));
    }
    let teams = game.active_teams();
    if teams.is_empty() {
        return Ok(SubstitutesReport::default());
    }
    let np = s.power_levels().len();
    let nc = s.carriers().len();
    let mut rng = stream(seed, Stream::Analysis);
    let mut report = SubstitutesReport::default();
    for k in 0..sample_count {
        let team = teams[k % teams.len()];
        let others: Vec<usize> = s
            .locations()
            .iter()
            .filter(|l| l.team_id != team)
            .map(|l| l.id)
            .collect();
        let mut low = StrategyProfile::zeros(s);
        for &l in &others {
            for c in 0..nc {
                low.set_level(l, c, rng.random_range(0..np));
            }
        }
        let mut high = low.clone();
        for &l in &others {
            for c in 0..nc {
                let level = if k % 2 == 0 {
                    if rng.random_bool(0.5) {
                        rng.random_range(low.level(l, c)..np)
                    } else {
                        low.level(l, c)
                    }
                } else {
                    rng.random_range(0..np)
                };
                high.set_level(l, c, level);
            }
        }
        let i_low = interference_matrix(game, &low, team);
        let i_high = interference_matrix(game, &high, team);
        let (i_low, i_high, low, high) = if i_low.iter().zip(&i_high).all(|(a, b)| a <= b) {
            (i_low, i_high, low, high)
        } else if i_low.iter().zip(&i_high).all(|(a, b)| a >= b) {
            (i_high, i_low, high, low)
        } else {
            report.skipped_incomparable += 1;
            continue;
        };
        let (n_low, n_high) = (frobenius(&i_low), frobenius(&i_high));
        if !(n_high > n_low) {
            report.skipped_incomparable += 1;
            continue;
        }
        report.pairs_checked += 1;
        let r_low = frobenius(&joint_best_reply_watts(game, &low, team, prices)?);
        let r_high = frobenius(&joint_best_reply_watts(game, &high, team, prices)?);
        if r_high > r_low * (1.0 + 1e-12) {
            report.violations.push(SubstitutesViolation {
                team,
                interference_norms: (n_low, n_high),
                reply_norms: (r_low, r_high),
            });
        }
    }
    Ok(report)
}

fn interference_matrix(game: &Game, profile: &StrategyProfile, team: usize) -> Vec<f64> {
    let s = game.scenario();
    s.team(team)
        .tiles
        .iter()
        .flat_map(|&z| (0..s.carriers().len()).map(move |c| (z, c)))
        .map(|(z, c)| game.interference(profile, team, z, c).expect("team tile"))
        .collect()
}

fn frobenius(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Radiated watts of the payoff-maximizing `L x C` matrix, lowest total
/// power first among ties.
fn joint_best_reply_watts(game: &Game, profile: &StrategyProfile, team: usize, prices: &PriceTable) -> Result<Vec<f64>> {
    let s = game.scenario();
    let np = s.power_levels().len();
    let vars: Vec<(usize, usize)> = s
        .team(team)
        .members
        .iter()
        .flat_map(|&l| (0..s.carriers().len()).map(move |c| (l, c)))
        .collect();
    let count = (np as u128).pow(vars.len() as u32);
    if count > REPLY_LIMIT {
        return Err(Error::TooLarge {
            count,
            limit: REPLY_LIMIT,
        });
    }
    let mut trial = profile.clone();
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for idx in 0..count as usize {
        let mut rest = idx;
        for &(l, c) in vars.iter().rev() {
            trial.set_level(l, c, rest % np);
            rest /= np;
        }
        let w = game.team_payoff(&trial, team, prices)?.payoff;
        let watts: Vec<f64> = vars.iter().map(|&(l, c)| trial.radiated_w(s, l, c)).collect();
        let total: f64 = watts.iter().sum();
        let better = match &best {
            None => true,
            Some((bw, bt, _)) => {
                w > bw + game.params().tie_tolerance * bw.abs().max(1.0)
                    || (game.params().ties_with(w, *bw) && total < *bt)
            }
        };
        if better {
            best = Some((w, total, watts));
        }
    }
    Ok(best.expect("non-empty strategy set").2)
}
