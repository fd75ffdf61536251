//! Downlink power game between macrocell teams.
//!
//! Each team (a macro and the micros inside its cell) picks a discrete power
//! level per location and carrier. Its payoff is a user-weighted sigmoid of
//! SINR minus an interference-aware power price and a penalty for unserved
//! users. Best-reply dynamics run one carrier at a time, highest frequency
//! first.

mod best_reply;
mod dynamics;
mod params;
mod payoff;
mod price;
mod profile;
mod tiebreak;

pub use best_reply::BestReply;
pub use dynamics::{write_trace_csv, CarrierOutcome, GameOutcome, TraceRow};
pub use params::{thermal_noise_w, GameParams, DEFAULT_NOISE_FIGURE_DB, THERMAL_NOISE_DBM_PER_HZ};
pub use payoff::{sigmoid, Payoff};
pub use price::PriceTable;
pub use profile::StrategyProfile;
pub use tiebreak::{preference, StrategyKey};

use crate::propagation::{average_attenuation, AttenuationTensor};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Immutable game context: scenario, attenuation tensor, parameters and the
/// cached served-area average gains.
#[derive(Debug, Clone)]
pub struct Game<'a> {
    scenario: &'a Scenario,
    tensor: &'a AttenuationTensor,
    params: GameParams,
    avg_gain: Vec<f64>,
}

impl<'a> Game<'a> {
    pub fn new(scenario: &'a Scenario, tensor: &'a AttenuationTensor, params: GameParams) -> Result<Self> {
        let nc = scenario.carriers().len();
        params.check(nc)?;
        if !tensor.matches(scenario) {
            return Err(Error::InvalidInput(
                "attenuation tensor dimensions do not match the scenario".into(),
            ));
        }
        let mut avg_gain = vec![0.0; scenario.locations().len() * nc];
        for l in 0..scenario.locations().len() {
            let tiles = scenario.served_tiles(l);
            if tiles.is_empty() {
                continue;
            }
            for c in 0..nc {
                avg_gain[l * nc + c] = average_attenuation(scenario, tensor, l, c, tiles)?;
            }
        }
        Ok(Self {
            scenario,
            tensor,
            params,
            avg_gain,
        })
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    pub fn tensor(&self) -> &'a AttenuationTensor {
        self.tensor
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    /// UE-weighted mean gain from `location` over its served tiles on `carrier`.
    #[inline]
    pub fn average_gain(&self, location: usize, carrier: usize) -> f64 {
        self.avg_gain[location * self.scenario.carriers().len() + carrier]
    }

    pub fn all_carriers(&self) -> Vec<usize> {
        (0..self.scenario.carriers().len()).collect()
    }

    /// Every location at the lowest positive power level.
    pub fn min_power_profile(&self) -> StrategyProfile {
        StrategyProfile::uniform(self.scenario, self.scenario.power_levels().min_positive())
    }

    pub fn max_power_profile(&self) -> StrategyProfile {
        StrategyProfile::uniform(self.scenario, self.scenario.power_levels().max_level())
    }

    /// Teams with at least one user, ascending id.
    pub fn active_teams(&self) -> Vec<usize> {
        self.scenario
            .teams()
            .iter()
            .filter(|t| t.ue_count > 0)
            .map(|t| t.id)
            .collect()
    }
}
