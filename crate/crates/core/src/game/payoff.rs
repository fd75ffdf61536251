use crate::game::{Game, PriceTable, StrategyProfile};
use crate::{Error, Result};

/// Logistic utility of a linear SINR.
#[inline]
pub fn sigmoid(alpha: f64, beta: f64, sinr: f64) -> f64 {
    let x = alpha * (sinr - beta);
    // 1 / (1 + e^-x) rounds to exactly 1.0 beyond this point
    if x > 40.0 {
        1.0
    } else {
        1.0 / (1.0 + (-x).exp())
    }
}

/// Utility, cost and payoff of one team.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Payoff {
    pub utility: f64,
    /// Priced received-power term of the cost.
    pub power_cost: f64,
    /// Fraction of team users at or below the SINR threshold on every in-scope carrier.
    pub e_t: f64,
    pub cost: f64,
    pub payoff: f64,
}

impl Game<'_> {
    fn check_team(&self, team: usize) -> Result<()> {
        if team >= self.scenario.teams().len() {
            return Err(Error::Index(format!("team {team} does not exist")));
        }
        Ok(())
    }

    fn check_carrier(&self, carrier: usize) -> Result<()> {
        if carrier >= self.scenario.carriers().len() {
            return Err(Error::Index(format!("carrier {carrier} does not exist")));
        }
        Ok(())
    }

    /// Power received in tile `z` on `carrier` from every location outside `team`.
    pub fn interference(&self, profile: &StrategyProfile, team: usize, z: usize, carrier: usize) -> Result<f64> {
        self.check_team(team)?;
        self.check_carrier(carrier)?;
        if z >= self.scenario.tiles().len() {
            return Err(Error::Index(format!("tile {z} does not exist")));
        }
        let serving = self.scenario.tile(z).serving_location;
        if self.scenario.location(serving).team_id != team {
            return Err(Error::Index(format!("tile {z} is not served by team {team}")));
        }
        Ok(self.external(profile, team, z, carrier))
    }

    pub(crate) fn external(&self, profile: &StrategyProfile, team: usize, z: usize, carrier: usize) -> f64 {
        let mut sum = 0.0;
        for loc in self.scenario.locations() {
            if loc.team_id != team {
                sum += profile.radiated_w(self.scenario, loc.id, carrier) * self.tensor.get(loc.id, z, carrier);
            }
        }
        sum
    }

    /// Power received in tile `z` from the other members of `location`'s team.
    pub(crate) fn intra(&self, profile: &StrategyProfile, location: usize, z: usize, carrier: usize) -> f64 {
        let team = self.scenario.location(location).team_id;
        let mut sum = 0.0;
        for &l in &self.scenario.team(team).members {
            if l != location {
                sum += profile.radiated_w(self.scenario, l, carrier) * self.tensor.get(l, z, carrier);
            }
        }
        sum
    }

    /// Downlink SINR of tile `z` served by `location` of `team`.
    pub fn sinr(
        &self,
        profile: &StrategyProfile,
        team: usize,
        location: usize,
        z: usize,
        carrier: usize,
    ) -> Result<f64> {
        self.check_team(team)?;
        self.check_carrier(carrier)?;
        if location >= self.scenario.locations().len() || self.scenario.location(location).team_id != team {
            return Err(Error::Index(format!("location {location} is not in team {team}")));
        }
        if z >= self.scenario.tiles().len() || self.scenario.tile(z).serving_location != location {
            return Err(Error::Index(format!("tile {z} is not served by location {location}")));
        }
        Ok(self.serving_sinr(profile, z, carrier))
    }

    /// SINR of tile `z` from its serving location.
    pub(crate) fn serving_sinr(&self, profile: &StrategyProfile, z: usize, carrier: usize) -> f64 {
        let l = self.scenario.tile(z).serving_location;
        let team = self.scenario.location(l).team_id;
        let own = profile.radiated_w(self.scenario, l, carrier) * self.tensor.get(l, z, carrier);
        own / (self.params.noise_power_w[carrier] + self.intra(profile, l, z, carrier) + self.external(profile, team, z, carrier))
    }

    /// `true` when tile `z` is above the SINR threshold on some carrier of `scope`.
    pub(crate) fn tile_served(&self, profile: &StrategyProfile, z: usize, scope: &[usize]) -> bool {
        scope
            .iter()
            .any(|&c| self.serving_sinr(profile, z, c) > self.params.gamma_min)
    }

    pub fn team_utility(&self, profile: &StrategyProfile, team: usize) -> Result<f64> {
        self.team_utility_scoped(profile, team, &self.all_carriers())
    }

    /// Utility summed over the carriers in `scope` only.
    pub fn team_utility_scoped(&self, profile: &StrategyProfile, team: usize, scope: &[usize]) -> Result<f64> {
        self.check_team(team)?;
        let t = self.scenario.team(team);
        if t.ue_count == 0 {
            return Err(Error::NoUsers(team));
        }
        let e_t = t.ue_count as f64;
        let mut u = 0.0;
        for &l in &t.members {
            for &z in self.scenario.served_tiles(l) {
                let w = self.scenario.tile(z).ue_count() as f64 / e_t;
                for &c in scope {
                    u += w * sigmoid(self.params.alpha, self.params.beta, self.serving_sinr(profile, z, c));
                }
            }
        }
        Ok(u)
    }

    /// Returns `(cost, e_t)`.
    pub fn team_cost(&self, profile: &StrategyProfile, team: usize, prices: &PriceTable) -> Result<(f64, f64)> {
        let (pc, e) = self.cost_terms(profile, team, prices, &self.all_carriers())?;
        Ok((pc + self.params.delta * e, e))
    }

    /// Priced power term and unserved fraction over the carriers in `scope`.
    pub(crate) fn cost_terms(
        &self,
        profile: &StrategyProfile,
        team: usize,
        prices: &PriceTable,
        scope: &[usize],
    ) -> Result<(f64, f64)> {
        self.check_team(team)?;
        let t = self.scenario.team(team);
        let mut pc = 0.0;
        for &l in &t.members {
            for &c in scope {
                pc += prices.get(l, c) * self.average_gain(l, c) * profile.radiated_w(self.scenario, l, c);
            }
        }
        let mut e = 0.0;
        if t.ue_count > 0 {
            let e_t = t.ue_count as f64;
            for &z in &t.tiles {
                let n = self.scenario.tile(z).ue_count();
                if n > 0 && !self.tile_served(profile, z, scope) {
                    e += n as f64 / e_t;
                }
            }
        }
        Ok((pc, e))
    }

    pub fn team_payoff(&self, profile: &StrategyProfile, team: usize, prices: &PriceTable) -> Result<Payoff> {
        self.team_payoff_scoped(profile, team, prices, &self.all_carriers())
    }

    /// Payoff restricted to the carriers in `scope`, as seen while a carrier
    /// game is played with earlier carriers settled.
    pub fn team_payoff_scoped(
        &self,
        profile: &StrategyProfile,
        team: usize,
        prices: &PriceTable,
        scope: &[usize],
    ) -> Result<Payoff> {
        let utility = self.team_utility_scoped(profile, team, scope)?;
        let (power_cost, e_t) = self.cost_terms(profile, team, prices, scope)?;
        let cost = power_cost + self.params.delta * e_t;
        Ok(Payoff {
            utility,
            power_cost,
            e_t,
            cost,
            payoff: utility - cost,
        })
    }

    /// Sum of payoffs of all teams with users.
    pub fn welfare(&self, profile: &StrategyProfile, prices: &PriceTable) -> Result<f64> {
        self.active_teams()
            .into_iter()
            .map(|t| self.team_payoff(profile, t, prices).map(|p| p.payoff))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameParams;
    use crate::propagation::AttenuationTensor;
    use crate::scenario::{Point, PowerLevelSet, Scenario, ScenarioBuilder};

    /// Two teams of one location each on a 2x1 grid; team 0 serves tile 0.
    fn two_teams() -> Scenario {
        ScenarioBuilder::new(2, 1, 40.0)
            .carrier(2e9, 10e6)
            .levels(PowerLevelSet::new(vec![0.0, 0.5, 1.0]).unwrap())
            .team(Point::new(20.0, 20.0), 2.0)
            .team(Point::new(60.0, 20.0), 2.0)
            .ues(0, 1, 0)
            .ues(1, 3, 0)
            .build()
            .unwrap()
    }

    fn tensor(data: Vec<f64>) -> AttenuationTensor {
        AttenuationTensor::from_vec(2, 2, 1, data).unwrap()
    }

    #[test]
    fn external_interference_is_a_linear_sum() {
        let s = ScenarioBuilder::new(3, 1, 40.0)
            .carrier(2e9, 10e6)
            .levels(PowerLevelSet::new(vec![0.0, 1.0]).unwrap())
            .team(Point::new(20.0, 20.0), 1.0)
            .team(Point::new(60.0, 20.0), 1.0)
            .team(Point::new(100.0, 20.0), 1.0)
            .ues_everywhere(1)
            .build()
            .unwrap();
        let data = vec![0.9, 0.0, 0.0, 0.01, 0.9, 0.0, 0.02, 0.0, 0.9];
        let t = AttenuationTensor::from_vec(3, 3, 1, data).unwrap();
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-3])).unwrap();
        let p = StrategyProfile::uniform(&s, 1);
        assert!((g.interference(&p, 0, 0, 0).unwrap() - 0.03).abs() < 1e-15);
        assert_eq!(g.interference(&StrategyProfile::zeros(&s), 0, 0, 0).unwrap(), 0.0);
        assert!(matches!(g.interference(&p, 0, 1, 0), Err(Error::Index(_))));
    }

    #[test]
    fn sinr_by_substitution() {
        let s = two_teams();
        let t = tensor(vec![0.5, 0.0, 0.0, 0.5]);
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-3])).unwrap();
        let mut p = StrategyProfile::zeros(&s);
        p.set_level(0, 0, 2);
        assert!((g.sinr(&p, 0, 0, 0, 0).unwrap() - 1000.0).abs() < 1e-9);
        assert_eq!(g.sinr(&StrategyProfile::zeros(&s), 0, 0, 0, 0).unwrap(), 0.0);
        assert!(g.sinr(&p, 1, 0, 0, 0).is_err());
    }

    #[test]
    fn sinr_hand_expanded_three_locations() {
        // one team: macro + micro, and an outside macro; 3x1 tiles
        let s = ScenarioBuilder::new(3, 1, 40.0)
            .carrier(2e9, 10e6)
            .levels(PowerLevelSet::new(vec![0.0, 0.5, 1.0]).unwrap())
            .team(Point::new(20.0, 20.0), 4.0)
            .micro(Point::new(60.0, 20.0), 1.0)
            .team(Point::new(100.0, 20.0), 2.0)
            .ues_everywhere(2)
            .build()
            .unwrap();
        // tile 0 is served by location 0
        assert_eq!(s.tile(0).serving_location, 0);
        #[rustfmt::skip]
        let data = vec![
            0.30, 0.02, 0.001,
            0.05, 0.40, 0.01,
            0.004, 0.03, 0.50,
        ];
        let t = AttenuationTensor::from_vec(3, 3, 1, data).unwrap();
        let g = Game::new(&s, &t, GameParams::with_noise(vec![0.01])).unwrap();
        let p = StrategyProfile::from_levels(&s, vec![1, 2, 2]).unwrap();
        // serving 0.5*4 W * 0.30, micro 1 W * 0.05, outside 2 W * 0.004
        let expected = 0.6 / (0.01 + 0.05 + 0.008);
        assert!((g.sinr(&p, 0, 0, 0, 0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn utility_weighted_sum() {
        // one location serving tiles with 1 and 3 users; gains chosen so the
        // sigmoid reads 0.2 and 0.6 with alpha = 1, beta = 3, N = 0.1, 1 W
        let s = ScenarioBuilder::new(2, 1, 40.0)
            .carrier(2e9, 10e6)
            .levels(PowerLevelSet::new(vec![0.0, 1.0]).unwrap())
            .team(Point::new(20.0, 20.0), 1.0)
            .ues(0, 1, 0)
            .ues(1, 3, 0)
            .build()
            .unwrap();
        let gain = |p: f64| 0.1 * (3.0 + (p / (1.0 - p)).ln());
        let t = AttenuationTensor::from_vec(1, 2, 1, vec![gain(0.2), gain(0.6)]).unwrap();
        let mut params = GameParams::with_noise(vec![0.1]);
        params.beta = 3.0;
        let g = Game::new(&s, &t, params).unwrap();
        let u = g.team_utility(&StrategyProfile::uniform(&s, 1), 0).unwrap();
        assert!((u - 0.5).abs() < 1e-12);
    }

    #[test]
    fn utility_saturates_at_carrier_count() {
        let s = ScenarioBuilder::new(1, 1, 40.0)
            .carrier(2.6e9, 10e6)
            .carrier(1.8e9, 10e6)
            .carrier(0.8e9, 10e6)
            .levels(PowerLevelSet::new(vec![0.0, 1.0]).unwrap())
            .team(Point::new(20.0, 20.0), 40.0)
            .ues(0, 2, 0)
            .build()
            .unwrap();
        let t = AttenuationTensor::from_vec(1, 1, 3, vec![1.0; 3]).unwrap();
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-12; 3])).unwrap();
        let u = g.team_utility(&StrategyProfile::uniform(&s, 1), 0).unwrap();
        assert_eq!(u, 3.0);
    }

    #[test]
    fn midpoint_and_zero_strategy_closed_form() {
        let s = two_teams();
        let t = tensor(vec![0.5, 0.0, 0.0, 0.5]);
        let params = GameParams::with_noise(vec![1.0]);
        let g = Game::new(&s, &t, params.clone()).unwrap();
        let mut p = StrategyProfile::zeros(&s);
        // radiated 2 W * 0.5 / N(1) = 1 = beta
        p.set_level(0, 0, 2);
        assert!((g.team_utility(&p, 0).unwrap() - 0.5).abs() < 1e-15);
        let zero = StrategyProfile::zeros(&s);
        let expected = 1.0 / (1.0 + 1f64.exp());
        let mut q = params;
        q.delta = 0.0;
        let g0 = Game::new(&s, &t, q).unwrap();
        let prices = PriceTable::uniform(&s, 1.0);
        let w = g0.team_payoff(&zero, 0, &prices).unwrap();
        assert!((w.payoff - expected).abs() < 1e-15);
        assert_eq!(w.cost, 0.0);
    }

    #[test]
    fn unserved_penalty_and_price_product() {
        let s = two_teams();
        let t = tensor(vec![0.2, 0.0, 0.0, 0.5]);
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-3])).unwrap();
        let prices = PriceTable::uniform(&s, 0.5);
        let (cost, e) = g.team_cost(&StrategyProfile::zeros(&s), 0, &prices).unwrap();
        assert_eq!(e, 1.0);
        assert!((cost - 0.6).abs() < 1e-15);

        let s10 = ScenarioBuilder::new(1, 1, 40.0)
            .carrier(2e9, 10e6)
            .levels(PowerLevelSet::new(vec![0.0, 1.0]).unwrap())
            .team(Point::new(20.0, 20.0), 10.0)
            .ues(0, 1, 0)
            .build()
            .unwrap();
        let t10 = AttenuationTensor::from_vec(1, 1, 1, vec![0.2]).unwrap();
        let mut params = GameParams::with_noise(vec![1e-3]);
        params.delta = 0.0;
        let g10 = Game::new(&s10, &t10, params).unwrap();
        let p = StrategyProfile::uniform(&s10, 1);
        let (cost, e) = g10.team_cost(&p, 0, &PriceTable::uniform(&s10, 0.5)).unwrap();
        assert_eq!(e, 0.0);
        assert!((cost - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_teams_have_equal_payoffs() {
        let s = ScenarioBuilder::new(2, 1, 40.0)
            .carrier(2e9, 10e6)
            .levels(PowerLevelSet::new(vec![0.0, 0.5, 1.0]).unwrap())
            .team(Point::new(20.0, 20.0), 2.0)
            .team(Point::new(60.0, 20.0), 2.0)
            .ues_everywhere(3)
            .build()
            .unwrap();
        let t = tensor(vec![0.5, 0.1, 0.1, 0.5]);
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-2])).unwrap();
        let p = StrategyProfile::uniform(&s, 1);
        let prices = PriceTable::uniform(&s, 0.3);
        let a = g.team_payoff(&p, 0, &prices).unwrap();
        let b = g.team_payoff(&p, 1, &prices).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn no_users_is_an_error() {
        let s = ScenarioBuilder::new(2, 1, 40.0)
            .carrier(2e9, 10e6)
            .team(Point::new(20.0, 20.0), 2.0)
            .team(Point::new(60.0, 20.0), 2.0)
            .ues(0, 1, 0)
            .build()
            .unwrap();
        let t = tensor(vec![0.5, 0.1, 0.1, 0.5]);
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-2])).unwrap();
        let p = StrategyProfile::zeros(&s);
        assert!(matches!(g.team_utility(&p, 1), Err(Error::NoUsers(1))));
    }
}
