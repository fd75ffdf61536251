use crate::game::{Game, PriceTable, StrategyProfile};
use crate::{Error, Result};

/// Which unilateral changes count as deviations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationScope {
    /// One carrier at a time, scored on that carrier plus every carrier of
    /// higher frequency, as in the carrier-by-carrier game.
    PerCarrier,
    /// One carrier at a time, scored on all carriers.
    SingleCarrier,
    /// The team's whole `L x C` matrix, scored on all carriers.
    Joint,
}

/// A unilateral change that improves a team's payoff beyond the tie tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub team: usize,
    /// Carrier changed, or `None` for a joint deviation.
    pub carrier: Option<usize>,
    /// Member-major `L x C` levels of the deviating strategy.
    pub levels: Vec<u16>,
    pub gain: f64,
}

/// Largest per-team candidate set the check will enumerate.
pub const DEVIATION_LIMIT: u128 = 1_000_000;

/// Every improving unilateral deviation from `profile`, using the plain
/// payoff functions. An empty result certifies a pure equilibrium.
pub fn deviation_check(
    game: &Game,
    profile: &StrategyProfile,
    prices: &PriceTable,
    scope: DeviationScope,
) -> Result<Vec<Deviation>> {
    let s = game.scenario();
    let np = s.power_levels().len();
    let order = s.carriers_by_descending_frequency();
    let mut found = Vec::new();
    for team in game.active_teams() {
        let members = &s.team(team).members;
        // (carrier changed, variables, payoff scope)
        let blocks: Vec<(Option<usize>, Vec<(usize, usize)>, Vec<usize>)> = match scope {
            DeviationScope::PerCarrier => order
                .iter()
                .enumerate()
                .map(|(k, &c)| (Some(c), members.iter().map(|&l| (l, c)).collect(), order[..=k].to_vec()))
                .collect(),
            DeviationScope::SingleCarrier => order
                .iter()
                .map(|&c| (Some(c), members.iter().map(|&l| (l, c)).collect(), game.all_carriers()))
                .collect(),
            DeviationScope::Joint => vec![(
                None,
                members.iter().flat_map(|&l| (0..s.carriers().len()).map(move |c| (l, c))).collect(),
                game.all_carriers(),
            )],
        };
        for (carrier, vars, payoff_scope) in blocks {
            let count = (np as u128).pow(vars.len() as u32);
            if count > DEVIATION_LIMIT {
                return Err(Error::TooLarge {
                    count,
                    limit: DEVIATION_LIMIT,
                });
            }
            let current = game.team_payoff_scoped(profile, team, prices, &payoff_scope)?.payoff;
            let slack = game.params().tie_tolerance * current.abs().max(1.0);
            let mut trial = profile.clone();
            for idx in 0..count as usize {
                let mut rest = idx;
                for &(l, c) in vars.iter().rev() {
                    trial.set_level(l, c, rest % np);
                    rest /= np;
                }
                let w = game.team_payoff_scoped(&trial, team, prices, &payoff_scope)?.payoff;
                if w > current + slack {
                    found.push(Deviation {
                        team,
                        carrier,
                        levels: trial.team_levels(s, team),
                        gain: w - current,
                    });
                }
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameParams;
    use crate::scenario::{random_toy, ToySpec};

    #[test]
    fn bps_outcomes_pass_per_carrier_check() {
        for seed in 0..4 {
            let spec = ToySpec {
                carriers: 2,
                ..ToySpec::default()
            };
            let (s, t) = random_toy(&spec, seed).unwrap();
            let mut params = GameParams::defaults_for(&s);
            params.k = 0.002;
            let g = Game::new(&s, &t, params).unwrap();
            let out = g.run_multi_carrier_game().unwrap();
            assert!(out.converged);
            let dev = deviation_check(&g, &out.profile, &out.prices, DeviationScope::PerCarrier).unwrap();
            assert!(dev.is_empty(), "seed {seed}: {dev:?}");
        }
    }

    #[test]
    fn zero_profile_is_not_an_equilibrium_when_power_pays() {
        let spec = ToySpec::default();
        let (s, t) = random_toy(&spec, 1).unwrap();
        let mut params = GameParams::defaults_for(&s);
        params.k = 1e-4;
        let g = Game::new(&s, &t, params).unwrap();
        let prices = g.compute_prices(&g.min_power_profile()).unwrap();
        let zero = StrategyProfile::zeros(&s);
        let dev = deviation_check(&g, &zero, &prices, DeviationScope::Joint).unwrap();
        assert!(!dev.is_empty());
        assert!(dev.iter().all(|d| d.gain > 0.0 && d.carrier.is_none()));
    }
}
