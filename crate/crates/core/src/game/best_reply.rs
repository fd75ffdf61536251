use rayon::prelude::*;

use crate::game::tiebreak::{preference, StrategyKey};
use crate::game::{sigmoid, Game, PriceTable, StrategyProfile};
use crate::{Error, Result};

/// A team's best reply on one carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct BestReply {
    /// Chosen level per team member, leader first.
    pub levels: Vec<u16>,
    /// Scoped payoff of the chosen levels.
    pub payoff: f64,
    /// Number of candidate strategies evaluated.
    pub evaluations: u64,
}

/// Per-tile data that does not depend on the team's own choice.
struct TileTerm {
    weight: f64,
    serving: usize,
    external: f64,
    served_elsewhere: bool,
}

impl Game<'_> {
    /// Exhaustive best reply of `team` on `carrier` with everything else in
    /// `profile` held fixed.
    ///
    /// `settled` lists carriers already fixed; their utility and power cost
    /// enter the payoff as constants and a user above threshold on any of them
    /// counts as served. Every one of the `|P|^L` candidates is evaluated.
    pub fn best_reply(
        &self,
        profile: &StrategyProfile,
        team: usize,
        carrier: usize,
        prices: &PriceTable,
        settled: &[usize],
    ) -> Result<BestReply> {
        let scenario = self.scenario;
        if team >= scenario.teams().len() || carrier >= scenario.carriers().len() {
            return Err(Error::Index(format!("team {team} / carrier {carrier} out of range")));
        }
        if settled.contains(&carrier) {
            return Err(Error::InvalidInput(format!("carrier {carrier} is already settled")));
        }
        let t = scenario.team(team);
        if t.ue_count == 0 {
            return Err(Error::NoUsers(team));
        }
        let members = &t.members;
        let nl = members.len();
        let levels = scenario.power_levels();
        let np = levels.len();
        let candidates = (np as u128).pow(nl as u32);
        const LIMIT: u128 = 1 << 28;
        if candidates > LIMIT {
            return Err(Error::TooLarge {
                count: candidates,
                limit: LIMIT,
            });
        }
        let candidates = candidates as usize;
        let e_t = t.ue_count as f64;
        let noise = self.params.noise_power_w[carrier];
        let (alpha, beta, gamma_min) = (self.params.alpha, self.params.beta, self.params.gamma_min);

        // tiles in member order, skipping empty ones
        let mut terms = Vec::new();
        let mut rx = Vec::new();
        for (j, &l) in members.iter().enumerate() {
            for &z in scenario.served_tiles(l) {
                let n = scenario.tile(z).ue_count();
                if n == 0 {
                    continue;
                }
                terms.push(TileTerm {
                    weight: n as f64 / e_t,
                    serving: j,
                    external: self.external(profile, team, z, carrier),
                    served_elsewhere: self.tile_served(profile, z, settled),
                });
                for &m in members {
                    let g = self.tensor.get(m, z, carrier);
                    let pmax = scenario.location(m).max_power_w;
                    rx.extend(levels.fractions().iter().map(|f| f * pmax * g));
                }
            }
        }
        let rx_at = |ti: usize, j: usize, p: usize| rx[(ti * nl + j) * np + p];

        let power_cost: Vec<f64> = members
            .iter()
            .flat_map(|&l| {
                let unit = prices.get(l, carrier) * self.average_gain(l, carrier) * scenario.location(l).max_power_w;
                levels.fractions().iter().map(move |f| unit * f)
            })
            .collect();

        let (const_utility, const_power) = if settled.is_empty() {
            (0.0, 0.0)
        } else {
            let u = self.team_utility_scoped(profile, team, settled)?;
            let mut pc = 0.0;
            for &l in members {
                for &c in settled {
                    pc += prices.get(l, c) * self.average_gain(l, c) * profile.radiated_w(scenario, l, c);
                }
            }
            (u, pc)
        };

        let last = nl - 1;
        let nt = terms.len();
        let mut payoffs = vec![0.0; candidates];
        payoffs.par_chunks_mut(np).enumerate().for_each_init(
            || (vec![0usize; nl], vec![0.0; nt], vec![0.0; nt]),
            |(digits, base, own), (prefix, chunk)| {
                let mut rest = prefix;
                for j in (0..last).rev() {
                    digits[j] = rest % np;
                    rest /= np;
                }
                let mut prefix_cost = 0.0;
                for j in 0..last {
                    prefix_cost += power_cost[j * np + digits[j]];
                }
                for (ti, term) in terms.iter().enumerate() {
                    let mut sum = 0.0;
                    for j in 0..last {
                        if j != term.serving {
                            sum += rx_at(ti, j, digits[j]);
                        }
                    }
                    base[ti] = sum;
                    own[ti] = if term.serving < last {
                        rx_at(ti, term.serving, digits[term.serving])
                    } else {
                        0.0
                    };
                }
                for (p, out) in chunk.iter_mut().enumerate() {
                    let mut utility = 0.0;
                    let mut unserved = 0.0;
                    for (ti, term) in terms.iter().enumerate() {
                        let last_rx = rx_at(ti, last, p);
                        let (signal, intra) = if term.serving == last {
                            (last_rx, base[ti])
                        } else {
                            (own[ti], base[ti] + last_rx)
                        };
                        let gamma = signal / (noise + intra + term.external);
                        utility += term.weight * sigmoid(alpha, beta, gamma);
                        if !term.served_elsewhere && gamma <= gamma_min {
                            unserved += term.weight;
                        }
                    }
                    let cost = prefix_cost + power_cost[last * np + p] + const_power + self.params.delta * unserved;
                    *out = utility + const_utility - cost;
                }
            },
        );

        let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let nc = scenario.carriers().len();
        let current = profile.team_levels(scenario, team);
        let decode = |mut idx: usize| {
            let mut m = current.clone();
            for j in (0..nl).rev() {
                m[j * nc + carrier] = (idx % np) as u16;
                idx /= np;
            }
            m
        };
        let chosen = payoffs
            .iter()
            .enumerate()
            .filter(|(_, &w)| self.params.ties_with(w, best))
            .map(|(i, &w)| (StrategyKey::new(scenario, team, &decode(i)), w))
            .min_by(|a, b| preference(&a.0, &b.0))
            .expect("at least one candidate");
        Ok(BestReply {
            levels: (0..nl).map(|j| chosen.0.levels[j * nc + carrier]).collect(),
            payoff: chosen.1,
            evaluations: candidates as u64,
        })
    }
}
