use crate::game::{Game, StrategyProfile};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Per-watt price for every `(location, carrier)`; the owning team is implied
/// by the location.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    carriers: usize,
    xi: Vec<f64>,
}

impl PriceTable {
    pub fn uniform(scenario: &Scenario, xi: f64) -> Self {
        let carriers = scenario.carriers().len();
        Self {
            carriers,
            xi: vec![xi; scenario.locations().len() * carriers],
        }
    }

    #[inline]
    pub fn get(&self, location: usize, carrier: usize) -> f64 {
        self.xi[location * self.carriers + carrier]
    }

    pub fn set(&mut self, location: usize, carrier: usize, xi: f64) -> Result<()> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::InvalidInput(format!("price {xi} must be finite and >= 0")));
        }
        self.xi[location * self.carriers + carrier] = xi;
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.xi
    }
}

impl Game<'_> {
    /// Interference-aware prices of `team` on `carrier` computed against a
    /// fixed reference profile; one entry per team member, leader first.
    ///
    /// The mean interference over a location's served tiles (user-weighted)
    /// sets `xi = k * alpha / I`. A location seeing no interference falls back
    /// to `k * alpha / (4 N)`.
    pub fn update_prices(&self, reference: &StrategyProfile, team: usize, carrier: usize) -> Result<Vec<f64>> {
        if team >= self.scenario.teams().len() || carrier >= self.scenario.carriers().len() {
            return Err(Error::Index(format!("team {team} / carrier {carrier} out of range")));
        }
        let ka = self.params.k * self.params.alpha;
        let fallback = ka / (4.0 * self.params.noise_power_w[carrier]);
        Ok(self
            .scenario
            .team(team)
            .members
            .iter()
            .map(|&l| {
                let i_bar = self.mean_interference(reference, team, l, carrier);
                if i_bar > 0.0 {
                    ka / i_bar
                } else {
                    fallback
                }
            })
            .collect())
    }

    /// Mean of external plus intra-team interference over the tiles of `l`.
    pub(crate) fn mean_interference(&self, reference: &StrategyProfile, team: usize, l: usize, carrier: usize) -> f64 {
        let tiles = self.scenario.served_tiles(l);
        if tiles.is_empty() {
            return 0.0;
        }
        let e_l = self.scenario.location_ues(l) as f64;
        let mut sum = 0.0;
        for &z in tiles {
            let w = if e_l > 0.0 {
                self.scenario.tile(z).ue_count() as f64 / e_l
            } else {
                1.0 / tiles.len() as f64
            };
            sum += w * (self.external(reference, team, z, carrier) + self.intra(reference, l, z, carrier));
        }
        sum
    }

    /// Prices for every team and carrier against `reference`.
    pub fn compute_prices(&self, reference: &StrategyProfile) -> Result<PriceTable> {
        let mut table = PriceTable::uniform(self.scenario, 0.0);
        for team in self.scenario.teams() {
            for c in 0..self.scenario.carriers().len() {
                for (&l, xi) in team.members.iter().zip(self.update_prices(reference, team.id, c)?) {
                    table.set(l, c, xi)?;
                }
            }
        }
        Ok(table)
    }
}
