use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, Normal};

use crate::game::{Game, GameParams, StrategyProfile};
use crate::propagation::{db_to_linear, AttenuationTensor};
use crate::rng::{stream, Stream};
use crate::scenario::{AreaType, PoaKind, Scenario};
use crate::simulate::metrics::{jain_index, MetricsReport, TierMetrics};
use crate::simulate::pf::{pf_schedule, PfUser, PF_TIME_CONSTANT};
use crate::simulate::traffic::{generate_traffic, ContentKind};
use crate::simulate::{EnergyModel, RateTable};
use crate::{Error, Result};

/// How transmit powers are chosen during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Team best-reply power setting.
    Bps,
    MaxPower,
    /// Every location at the lowest positive level.
    MinPower,
    /// Max power, micro association bias and macro muting on almost-blank subframes.
    EicicLite,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Bps, Policy::MaxPower, Policy::MinPower, Policy::EicicLite];

    pub fn as_str(&self) -> &'static str {
        match self {
            Policy::Bps => "bps",
            Policy::MaxPower => "max",
            Policy::MinPower => "min",
            Policy::EicicLite => "eicic",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bps" => Ok(Policy::Bps),
            "max" | "maxpower" | "max_power" => Ok(Policy::MaxPower),
            "min" | "minpower" | "min_power" => Ok(Policy::MinPower),
            "eicic" | "eiciclite" | "eicic_lite" => Ok(Policy::EicicLite),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub duration_s: f64,
    pub tti_s: f64,
    pub update_period_s: f64,
    pub rate_table: RateTable,
    pub energy: EnergyModel,
    /// Game parameters for BPS; scenario defaults when `None`.
    pub game: Option<GameParams>,
    /// Users whose serving-to-best-neighbour reference ratio is below this are edge users.
    pub edge_threshold_db: f64,
    pub cre_bias_db: f64,
    /// One TTI in this many is almost blank for macros.
    pub abs_period: u64,
}

impl SimConfig {
    pub fn new(duration_s: f64) -> Self {
        Self {
            duration_s,
            tti_s: 1e-3,
            update_period_s: 0.1,
            rate_table: RateTable::default(),
            energy: EnergyModel::default(),
            game: None,
            edge_threshold_db: 3.0,
            cre_bias_db: 8.0,
            abs_period: 4,
        }
    }
}

/// Power profile a fixed policy or BPS plays on `scenario`, plus the game's
/// convergence flag when one was played.
pub fn policy_profile(
    scenario: &Scenario,
    tensor: &AttenuationTensor,
    policy: Policy,
    game: Option<&GameParams>,
) -> Result<(StrategyProfile, Option<bool>)> {
    let levels = scenario.power_levels();
    match policy {
        Policy::MaxPower | Policy::EicicLite => Ok((StrategyProfile::uniform(scenario, levels.max_level()), None)),
        Policy::MinPower => Ok((StrategyProfile::uniform(scenario, levels.min_positive()), None)),
        Policy::Bps => {
            let params = match game {
                Some(p) => p.clone(),
                None => GameParams::defaults_for(scenario),
            };
            let g = Game::new(scenario, tensor, params)?;
            let out = g.run_multi_carrier_game()?;
            Ok((out.profile, Some(out.converged)))
        }
    }
}

struct Active {
    req: usize,
    tile: usize,
    loc: usize,
    kind: ContentKind,
    deadline_s: f64,
    remaining: f64,
    mean_rate: f64,
}

#[derive(Default)]
struct UeStat {
    bits: f64,
    active_ttis: u64,
    last_tti: Option<u64>,
}

/// Downlink SINR of every tile on every carrier from its associated location.
fn sinr_table(scenario: &Scenario, tensor: &AttenuationTensor, assoc: &[usize], watts: &[f64], noise: &[f64]) -> Vec<f64> {
    let nc = scenario.carriers().len();
    let nl = scenario.locations().len();
    let mut out = vec![0.0; assoc.len() * nc];
    for (z, &serving) in assoc.iter().enumerate() {
        for c in 0..nc {
            let mut own = 0.0;
            let mut other = 0.0;
            for l in 0..nl {
                let rx = watts[l * nc + c] * tensor.get(l, z, c);
                if l == serving {
                    own = rx;
                } else {
                    other += rx;
                }
            }
            out[z * nc + c] = own / (other + noise[c]);
        }
    }
    out
}

/// Runs the TTI-level downlink simulation of one policy.
///
/// Powers are frozen between update periods. The scenario is a static
/// snapshot, so the BPS profile is identical at every update and is computed
/// once. Deterministic for the same inputs and seed.
pub fn run_simulation(
    scenario: &Scenario,
    tensor: &AttenuationTensor,
    policy: Policy,
    config: &SimConfig,
    seed: u64,
) -> Result<MetricsReport> {
    if !(config.tti_s > 0.0) || !(config.update_period_s >= config.tti_s) {
        return Err(Error::InvalidInput("TTI and update period must be positive with period >= TTI".into()));
    }
    if !(config.duration_s >= config.update_period_s) {
        return Err(Error::InvalidInput(format!(
            "duration {} s is shorter than one update period",
            config.duration_s
        )));
    }
    if !tensor.matches(scenario) {
        return Err(Error::InvalidInput("attenuation tensor does not match the scenario".into()));
    }
    let nc = scenario.carriers().len();
    let nl = scenario.locations().len();
    let nz = scenario.tiles().len();
    let params = match &config.game {
        Some(p) => p.clone(),
        None => GameParams::defaults_for(scenario),
    };
    let (profile, game_converged) = policy_profile(scenario, tensor, policy, Some(&params))?;

    let assoc: Vec<usize> = (0..nz)
        .map(|z| {
            if policy == Policy::EicicLite {
                scenario.strongest_location(z, config.cre_bias_db)
            } else {
                scenario.tile(z).serving_location
            }
        })
        .collect();
    let watts: Vec<f64> = (0..nl)
        .flat_map(|l| (0..nc).map(move |c| (l, c)))
        .map(|(l, c)| profile.radiated_w(scenario, l, c))
        .collect();
    let mut abs_watts = watts.clone();
    for loc in scenario.locations() {
        if loc.kind == PoaKind::Macro {
            abs_watts[loc.id * nc..(loc.id + 1) * nc].fill(0.0);
        }
    }
    let noise = &params.noise_power_w;
    let normal_sinr = sinr_table(scenario, tensor, &assoc, &watts, noise);
    let abs_sinr = sinr_table(scenario, tensor, &assoc, &abs_watts, noise);

    let edge: Vec<bool> = (0..nz)
        .map(|z| {
            let serving = scenario.reference_power(assoc[z], z);
            let neighbour = (0..nl)
                .filter(|&l| l != assoc[z])
                .map(|l| scenario.reference_power(l, z))
                .fold(0.0, f64::max);
            neighbour > 0.0 && serving < neighbour * db_to_linear(config.edge_threshold_db)
        })
        .collect();

    let requests = generate_traffic(scenario, config.duration_s, seed)?;
    let fading_std = scenario.propagation().vehicular_fading_std_db;
    let fading = if fading_std > 0.0 {
        Some(Normal::new(0.0, fading_std).map_err(|e| Error::InvalidInput(e.to_string()))?)
    } else {
        None
    };
    let mut fading_rng = stream(seed, Stream::Fading);
    let mut fade_db = vec![0.0; nz * nc];

    let n_tti = (config.duration_s / config.tti_s).round() as u64;
    let tti_per_update = ((config.update_period_s / config.tti_s).round() as u64).max(1);
    let mut tier = [TierMetrics::default(), TierMetrics::default()];
    let tier_of = |l: usize| match scenario.location(l).kind {
        PoaKind::Macro => 0,
        PoaKind::Micro => 1,
    };
    let mut active: Vec<Active> = Vec::new();
    let mut next_req = 0usize;
    let mut completed = 0usize;
    let mut failed = [0usize; 2];
    let mut by_kind = [0usize; 2];
    let mut delivered = 0.0;
    let mut ue_stats: HashMap<(usize, u32), UeStat> = HashMap::new();
    let kind_ix = |k: ContentKind| match k {
        ContentKind::Video => 0,
        ContentKind::Generic => 1,
    };
    let energy_normal: Vec<f64> = (0..nl)
        .map(|l| {
            let w: f64 = watts[l * nc..(l + 1) * nc].iter().sum();
            config.energy.energy_consumed(scenario.location(l).kind, w, config.tti_s)
        })
        .collect();
    let energy_abs: Vec<f64> = (0..nl)
        .map(|l| {
            let w: f64 = abs_watts[l * nc..(l + 1) * nc].iter().sum();
            config.energy.energy_consumed(scenario.location(l).kind, w, config.tti_s)
        })
        .collect();

    for k in 0..n_tti {
        let now = k as f64 * config.tti_s;
        let end = now + config.tti_s;
        if k % tti_per_update == 0 {
            if let Some(dist) = &fading {
                for z in 0..nz {
                    let vehicular = scenario.tile(z).ue_vehicular > 0;
                    for c in 0..nc {
                        fade_db[z * nc + c] = if vehicular { dist.sample(&mut fading_rng) } else { 0.0 };
                    }
                }
            }
        }
        active.retain(|a| {
            if now >= a.deadline_s {
                failed[kind_ix(a.kind)] += 1;
                false
            } else {
                true
            }
        });
        while next_req < requests.len() && requests[next_req].arrival_s < end {
            let r = &requests[next_req];
            by_kind[kind_ix(r.kind)] += 1;
            active.push(Active {
                req: next_req,
                tile: r.tile,
                loc: assoc[r.tile],
                kind: r.kind,
                deadline_s: r.arrival_s + r.kind.deadline_s(),
                remaining: r.kind.size_bits(),
                mean_rate: 0.0,
            });
            next_req += 1;
        }
        let muted = policy == Policy::EicicLite && config.abs_period > 0 && k % config.abs_period == 0;
        let (sinr, tx, energy) = if muted {
            (&abs_sinr, &abs_watts, &energy_abs)
        } else {
            (&normal_sinr, &watts, &energy_normal)
        };
        for l in 0..nl {
            tier[tier_of(l)].energy_j += energy[l];
        }

        let mut served = vec![0.0; active.len()];
        for l in 0..nl {
            let members: Vec<usize> = (0..active.len()).filter(|&i| active[i].loc == l).collect();
            if members.is_empty() {
                continue;
            }
            for c in 0..nc {
                if tx[l * nc + c] <= 0.0 {
                    continue;
                }
                let users: Vec<PfUser> = members
                    .iter()
                    .map(|&i| {
                        let a = &active[i];
                        let gamma = sinr[a.tile * nc + c] * db_to_linear(fade_db[a.tile * nc + c]);
                        PfUser {
                            bits_per_rb: config.rate_table.bits_per_rb(gamma, config.tti_s),
                            mean_rate: a.mean_rate,
                            remaining_bits: (a.remaining - served[i]).max(0.0),
                        }
                    })
                    .collect();
                let grants = pf_schedule(&users, scenario.carriers()[c].rb_count());
                for (j, &g) in grants.iter().enumerate() {
                    if g == 0 {
                        continue;
                    }
                    let bits = (g as f64 * users[j].bits_per_rb).min(users[j].remaining_bits);
                    served[members[j]] += bits;
                    let t = &mut tier[tier_of(l)];
                    t.bits += bits;
                    t.rbs_used += g as u64;
                }
            }
        }

        let mut idx = 0;
        active.retain_mut(|a| {
            let bits = served[idx];
            idx += 1;
            let r = &requests[a.req];
            let stat = ue_stats.entry((r.tile, r.ue)).or_default();
            if stat.last_tti != Some(k) {
                stat.active_ttis += 1;
                stat.last_tti = Some(k);
            }
            stat.bits += bits;
            delivered += bits;
            a.remaining -= bits;
            a.mean_rate = (1.0 - 1.0 / PF_TIME_CONSTANT) * a.mean_rate + bits / PF_TIME_CONSTANT;
            if a.remaining <= 1e-9 {
                completed += 1;
                false
            } else {
                true
            }
        });
    }

    let horizon = n_tti as f64 * config.tti_s;
    let mut requested_bits = 0.0;
    let mut issued = 0usize;
    for r in &requests[..next_req] {
        requested_bits += r.kind.size_bits();
        issued += 1;
    }
    let demand_met = if requested_bits > 0.0 { (delivered / requested_bits).min(1.0) } else { 1.0 };
    let frac = |i: usize| if by_kind[i] > 0 { failed[i] as f64 / by_kind[i] as f64 } else { 0.0 };

    let mut keys: Vec<&(usize, u32)> = ue_stats.keys().collect();
    keys.sort();
    let mut all = Vec::new();
    let mut inner = Vec::new();
    let mut edge_tp = Vec::new();
    let mut per_area: HashMap<AreaType, Vec<f64>> = HashMap::new();
    for key in keys {
        let s = &ue_stats[key];
        let tp = s.bits / (s.active_ttis as f64 * config.tti_s);
        all.push(tp);
        if edge[key.0] {
            edge_tp.push(tp);
        } else {
            inner.push(tp);
        }
        per_area.entry(scenario.tile(key.0).area_type).or_default().push(tp);
    }
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let mut area_throughput_bps: Vec<(AreaType, f64)> = per_area.iter().map(|(a, v)| (*a, mean(v))).collect();
    area_throughput_bps.sort_by_key(|(a, _)| *a);

    Ok(MetricsReport {
        policy,
        time_of_day: scenario.time_of_day(),
        duration_s: horizon,
        requests: issued,
        completed,
        failed: failed[0] + failed[1],
        in_flight: active.len(),
        requested_bits,
        delivered_bits: delivered,
        demand_met,
        failed_fraction_video: frac(0),
        failed_fraction_generic: frac(1),
        macro_tier: tier[0],
        micro_tier: tier[1],
        mean_ue_throughput_bps: mean(&all),
        mean_ue_throughput_inner_bps: mean(&inner),
        mean_ue_throughput_edge_bps: mean(&edge_tp),
        jain_all: jain_index(&all).ok(),
        jain_inner: jain_index(&inner).ok(),
        jain_edge: jain_index(&edge_tp).ok(),
        area_throughput_bps,
        game_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::build_attenuation_tensor;
    use crate::scenario::{random_toy, Point, ScenarioBuilder, ToySpec, TrafficProfile};

    fn lone_cell(rate: f64) -> (Scenario, AttenuationTensor) {
        let mut traffic = TrafficProfile::default();
        traffic.city_centre.arrival_rate = [rate; 3];
        let s = ScenarioBuilder::new(1, 1, 40.0)
            .carrier(2e9, 10e6)
            .team(Point::new(20.0, 20.0), 20.0)
            .ues(0, 1, 0)
            .area_type_everywhere(AreaType::CityCentre)
            .traffic(traffic)
            .build()
            .unwrap();
        let t = build_attenuation_tensor(&s, s.propagation(), 1).unwrap();
        (s, t)
    }

    #[test]
    fn no_traffic_counts_only_power_draw() {
        let (s, t) = lone_cell(0.0);
        let cfg = SimConfig::new(1.0);
        let r = run_simulation(&s, &t, Policy::MaxPower, &cfg, 3).unwrap();
        assert_eq!(r.requests, 0);
        assert_eq!(r.demand_met, 1.0);
        let expected = cfg.energy.energy_consumed(PoaKind::Macro, 20.0, 1.0);
        assert!((r.energy_j() - expected).abs() < 1e-9 * expected);
        assert!(r.jain_all.is_none());
    }

    #[test]
    fn strong_lone_user_finishes_every_download() {
        let (s, t) = lone_cell(2.0);
        let r = run_simulation(&s, &t, Policy::MaxPower, &SimConfig::new(5.0), 11).unwrap();
        assert!(r.requests > 0);
        assert_eq!(r.failed, 0);
        assert_eq!(r.completed + r.in_flight, r.requests);
        if r.in_flight == 0 {
            assert!((r.demand_met - 1.0).abs() < 1e-12);
        }
        assert_eq!(r.jain_all, Some(1.0));
    }

    #[test]
    fn short_duration_rejected() {
        let (s, t) = lone_cell(1.0);
        assert!(run_simulation(&s, &t, Policy::MaxPower, &SimConfig::new(0.0), 1).is_err());
        assert!(run_simulation(&s, &t, Policy::MaxPower, &SimConfig::new(0.05), 1).is_err());
    }

    #[test]
    fn accounting_and_determinism_on_toy() {
        let spec = ToySpec {
            teams: 2,
            micros_per_team: 2,
            ..ToySpec::default()
        };
        let (s, t) = random_toy(&spec, 5).unwrap();
        let cfg = SimConfig::new(2.0);
        for policy in Policy::ALL {
            let a = run_simulation(&s, &t, policy, &cfg, 9).unwrap();
            let b = run_simulation(&s, &t, policy, &cfg, 9).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.completed + a.failed + a.in_flight, a.requests);
            assert!((0.0..=1.0).contains(&a.demand_met));
            assert!(a.delivered_bits <= a.requested_bits + 1e-6);
            assert!((a.macro_tier.bits + a.micro_tier.bits - a.delivered_bits).abs() < 1e-6);
        }
    }

    #[test]
    fn policy_names_round_trip() {
        for p in Policy::ALL {
            assert_eq!(p.as_str().parse::<Policy>().unwrap(), p);
        }
        assert!("nope".parse::<Policy>().is_err());
    }
}
