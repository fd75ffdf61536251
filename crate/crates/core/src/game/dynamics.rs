use std::io::Write;

use crate::game::{Game, PriceTable, StrategyProfile};
use crate::{Error, Result};

/// One best-reply move.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// 1-based iteration count across the whole run.
    pub iteration: usize,
    pub team: usize,
    pub carrier: usize,
    /// Scoped payoff terms of the moving team after its move.
    pub payoff: f64,
    pub utility: f64,
    pub cost: f64,
    pub e_t: f64,
    /// Network-wide radiated watts after the move.
    pub total_watts: f64,
    pub changed: bool,
    pub evaluations: u64,
}

/// Result of one carrier's game.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierOutcome {
    pub carrier: usize,
    pub iterations: usize,
    /// Full rounds started, `ceil(iterations / active teams)`.
    pub rounds: usize,
    pub converged: bool,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameOutcome {
    pub profile: StrategyProfile,
    pub prices: PriceTable,
    pub trace: Vec<TraceRow>,
    pub iterations: usize,
    /// Every carrier game converged.
    pub converged: bool,
    /// Carrier games in the order played.
    pub carriers: Vec<CarrierOutcome>,
}

impl GameOutcome {
    pub fn evaluations(&self) -> u64 {
        self.carriers.iter().map(|c| c.evaluations).sum()
    }
}

impl Game<'_> {
    /// Best-reply dynamics on one carrier from all-zero power.
    pub fn run_single_carrier_game(
        &self,
        carrier: usize,
        team_order: &[usize],
        prices: &PriceTable,
    ) -> Result<GameOutcome> {
        self.check_order(team_order)?;
        let mut profile = StrategyProfile::zeros(self.scenario);
        let mut prices = prices.clone();
        let mut trace = Vec::new();
        let outcome = self.play_carrier(&mut profile, carrier, &[], team_order, &mut prices, &mut trace)?;
        Ok(GameOutcome {
            iterations: outcome.iterations,
            converged: outcome.converged,
            carriers: vec![outcome],
            profile,
            prices,
            trace,
        })
    }

    /// Carrier games in descending frequency order with prices set once
    /// against the min-power profile and teams moving in ascending id order.
    pub fn run_multi_carrier_game(&self) -> Result<GameOutcome> {
        let prices = self.compute_prices(&self.min_power_profile())?;
        let order: Vec<usize> = (0..self.scenario.teams().len()).collect();
        self.run_multi_carrier_game_with(&prices, &order)
    }

    pub fn run_multi_carrier_game_with(&self, prices: &PriceTable, team_order: &[usize]) -> Result<GameOutcome> {
        self.check_order(team_order)?;
        let mut profile = StrategyProfile::zeros(self.scenario);
        let mut prices = prices.clone();
        let mut trace = Vec::new();
        let mut settled = Vec::new();
        let mut carriers = Vec::new();
        for c in self.scenario.carriers_by_descending_frequency() {
            carriers.push(self.play_carrier(&mut profile, c, &settled, team_order, &mut prices, &mut trace)?);
            settled.push(c);
        }
        Ok(GameOutcome {
            iterations: carriers.iter().map(|c| c.iterations).sum(),
            converged: carriers.iter().all(|c| c.converged),
            carriers,
            profile,
            prices,
            trace,
        })
    }

    fn check_order(&self, order: &[usize]) -> Result<()> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.scenario.teams().len()).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("team order must be a permutation of all teams".into()));
        }
        Ok(())
    }

    /// Teams without users keep zero power and do not take turns. Converged
    /// once every active team has replied in a row without changing.
    fn play_carrier(
        &self,
        profile: &mut StrategyProfile,
        carrier: usize,
        settled: &[usize],
        order: &[usize],
        prices: &mut PriceTable,
        trace: &mut Vec<TraceRow>,
    ) -> Result<CarrierOutcome> {
        let active: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&t| self.scenario.team(t).ue_count > 0)
            .collect();
        let mut scope = settled.to_vec();
        scope.push(carrier);
        let n = active.len();
        let limit = self.params.max_rounds * n;
        let offset = trace.last().map_or(0, |r| r.iteration);
        let (mut iterations, mut unchanged, mut evaluations) = (0, 0, 0u64);
        while unchanged < n && iterations < limit {
            let team = active[iterations % n];
            if self.params.update_prices_each_iteration {
                let xi = self.update_prices(profile, team, carrier)?;
                for (&l, x) in self.scenario.team(team).members.iter().zip(xi) {
                    prices.set(l, carrier, x)?;
                }
            }
            let reply = self.best_reply(profile, team, carrier, prices, settled)?;
            evaluations += reply.evaluations;
            let members = &self.scenario.team(team).members;
            let changed = members
                .iter()
                .zip(&reply.levels)
                .any(|(&l, &p)| profile.level(l, carrier) != p as usize);
            if changed {
                for (&l, &p) in members.iter().zip(&reply.levels) {
                    profile.set_level(l, carrier, p as usize);
                }
                unchanged = 0;
            } else {
                unchanged += 1;
            }
            iterations += 1;
            let w = self.team_payoff_scoped(profile, team, prices, &scope)?;
            trace.push(TraceRow {
                iteration: offset + iterations,
                team,
                carrier,
                payoff: w.payoff,
                utility: w.utility,
                cost: w.cost,
                e_t: w.e_t,
                total_watts: profile.total_radiated_w(self.scenario),
                changed,
                evaluations: reply.evaluations,
            });
        }
        Ok(CarrierOutcome {
            carrier,
            iterations,
            rounds: if n == 0 { 0 } else { iterations.div_ceil(n) },
            converged: unchanged >= n,
            evaluations,
        })
    }
}

/// CSV with columns `iteration,team,payoff,utility,cost,e_t,total_watts,carrier`.
pub fn write_trace_csv<W: Write>(trace: &[TraceRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["iteration", "team", "payoff", "utility", "cost", "e_t", "total_watts", "carrier"])?;
    for r in trace {
        w.write_record(&[
            r.iteration.to_string(),
            r.team.to_string(),
            r.payoff.to_string(),
            r.utility.to_string(),
            r.cost.to_string(),
            r.e_t.to_string(),
            r.total_watts.to_string(),
            r.carrier.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameParams;
    use crate::propagation::AttenuationTensor;
    use crate::scenario::{Point, PowerLevelSet, Scenario, ScenarioBuilder};

    fn lone_team() -> (Scenario, AttenuationTensor) {
        let s = ScenarioBuilder::new(2, 1, 40.0)
            .carrier(2e9, 10e6)
            .levels(PowerLevelSet::tenths())
            .team(Point::new(20.0, 20.0), 0.01)
            .micro(Point::new(60.0, 20.0), 0.01)
            .ues_everywhere(2)
            .build()
            .unwrap();
        // no cross gain, so prices fall back to the noise floor
        let t = AttenuationTensor::from_vec(2, 2, 1, vec![1e-3, 0.0, 0.0, 1e-3]).unwrap();
        (s, t)
    }

    #[test]
    fn single_team_converges_in_two_iterations() {
        let (s, t) = lone_team();
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-6])).unwrap();
        let prices = g.compute_prices(&g.min_power_profile()).unwrap();
        let out = g.run_single_carrier_game(0, &[0], &prices).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 2);
        assert!(out.trace[0].changed && !out.trace[1].changed);
    }

    #[test]
    fn single_carrier_multi_equals_single() {
        let (s, t) = lone_team();
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-6])).unwrap();
        let prices = g.compute_prices(&g.min_power_profile()).unwrap();
        let a = g.run_single_carrier_game(0, &[0], &prices).unwrap();
        let b = g.run_multi_carrier_game().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn symmetric_teams_end_identical() {
        let s = ScenarioBuilder::new(2, 1, 40.0)
            .carrier(2e9, 10e6)
            .levels(PowerLevelSet::tenths())
            .team(Point::new(20.0, 20.0), 1.0)
            .team(Point::new(60.0, 20.0), 1.0)
            .ues_everywhere(3)
            .build()
            .unwrap();
        let t = AttenuationTensor::from_vec(2, 2, 1, vec![1e-3, 5e-4, 5e-4, 1e-3]).unwrap();
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-9])).unwrap();
        let out = g.run_multi_carrier_game().unwrap();
        assert!(out.converged);
        assert_eq!(out.profile.level(0, 0), out.profile.level(1, 0));
        assert!(out.profile.level(0, 0) > 0);
    }

    #[test]
    fn bad_order_rejected() {
        let (s, t) = lone_team();
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-6])).unwrap();
        let prices = PriceTable::uniform(&s, 1.0);
        assert!(g.run_single_carrier_game(0, &[0, 0], &prices).is_err());
    }

    #[test]
    fn trace_csv_header() {
        let (s, t) = lone_team();
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-6])).unwrap();
        let out = g.run_multi_carrier_game().unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&out.trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iteration,team,payoff,utility,cost,e_t,total_watts,carrier\n"));
        assert_eq!(text.lines().count(), out.trace.len() + 1);
    }
}
