use std::io::Write;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::game::{Game, PriceTable, StrategyProfile};
use crate::{Error, Result};

/// Largest number of joint profiles `enumerate_pure_ne` will scan.
pub const JOINT_PROFILE_LIMIT: u128 = 10_000_000;

/// All pure equilibria of a small game together with their welfare.
#[derive(Debug, Clone, PartialEq)]
pub struct NEReport {
    /// Equilibria in enumeration order.
    pub profiles: Vec<StrategyProfile>,
    /// Sum of team payoffs, one per equilibrium.
    pub welfare: Vec<f64>,
    /// Index of the welfare-maximizing equilibrium (first on ties).
    pub best: Option<usize>,
    /// Profile being compared, usually the best-reply dynamics outcome.
    pub candidate: Option<StrategyProfile>,
    pub candidate_welfare: Option<f64>,
    /// Position of the candidate in `profiles`, if it is an equilibrium.
    pub candidate_index: Option<usize>,
}

impl NEReport {
    pub fn max_welfare(&self) -> Option<f64> {
        self.best.map(|i| self.welfare[i])
    }

    /// CSV with columns `ne_index,welfare,is_bps_outcome,profile_hash`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["ne_index", "welfare", "is_bps_outcome", "profile_hash"])?;
        for (i, (p, welfare)) in self.profiles.iter().zip(&self.welfare).enumerate() {
            w.write_record(&[
                i.to_string(),
                welfare.to_string(),
                (self.candidate_index == Some(i)).to_string(),
                profile_hash(p),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Short stable hash of a profile's level indices.
pub fn profile_hash(profile: &StrategyProfile) -> String {
    let mut h = Sha256::new();
    for &l in profile.levels() {
        h.update(l.to_le_bytes());
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Scans every joint profile of the teams with users and keeps those where
/// no team gains from changing its whole `L x C` matrix. Teams without users
/// stay at zero power.
pub fn enumerate_pure_ne(game: &Game, prices: &PriceTable, candidate: Option<&StrategyProfile>) -> Result<NEReport> {
    let s = game.scenario();
    let np = s.power_levels().len();
    let nc = s.carriers().len();
    let teams = game.active_teams();
    // free variables grouped by team, team blocks contiguous
    let mut vars = Vec::new();
    let mut blocks = Vec::new();
    for &t in &teams {
        let start = vars.len();
        for &l in &s.team(t).members {
            for c in 0..nc {
                vars.push((l, c));
            }
        }
        blocks.push((t, start, vars.len()));
    }
    if blocks.len() > 8 {
        return Err(Error::InvalidInput("enumeration supports at most 8 teams with users".into()));
    }
    let total = (np as u128).checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
    if total > JOINT_PROFILE_LIMIT {
        return Err(Error::TooLarge {
            count: total,
            limit: JOINT_PROFILE_LIMIT,
        });
    }
    let total = total as usize;
    let nv = vars.len();
    let zero = StrategyProfile::zeros(s);
    let apply = |p: &mut StrategyProfile, mut idx: usize| {
        for &(l, c) in vars.iter().rev() {
            p.set_level(l, c, idx % np);
            idx /= np;
        }
    };

    // bit k set when team k's strategy is a best reply inside the profile
    let mut best_for = vec![0u8; total];
    let mut mask_all = 0u8;
    for (k, &(team, start, end)) in blocks.iter().enumerate() {
        mask_all |= 1 << k;
        let lo = np.pow((nv - end) as u32);
        let block = np.pow((end - start) as u32);
        let groups = total / block;
        let hits: Vec<Vec<usize>> = (0..groups)
            .into_par_iter()
            .map_init(
                || zero.clone(),
                |p, g| {
                    let (hi, low) = (g / lo, g % lo);
                    let index = |m: usize| (hi * block + m) * lo + low;
                    let mut values = Vec::with_capacity(block);
                    for m in 0..block {
                        apply(p, index(m));
                        values.push(game.team_payoff(p, team, prices).map(|w| w.payoff));
                    }
                    let values: Result<Vec<f64>> = values.into_iter().collect();
                    let values = values.expect("payoff of a team with users");
                    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    (0..block)
                        .filter(|&m| game.params().ties_with(values[m], top))
                        .map(index)
                        .collect()
                },
            )
            .collect();
        for idx in hits.into_iter().flatten() {
            best_for[idx] |= 1 << k;
        }
    }

    let mut profiles = Vec::new();
    let mut welfare = Vec::new();
    for (idx, &mask) in best_for.iter().enumerate() {
        if mask == mask_all {
            let mut p = zero.clone();
            apply(&mut p, idx);
            welfare.push(game.welfare(&p, prices)?);
            profiles.push(p);
        }
    }
    let mut best = None;
    for (i, &w) in welfare.iter().enumerate() {
        if best.is_none_or(|b: usize| w > welfare[b]) {
            best = Some(i);
        }
    }
    let candidate_welfare = candidate.map(|c| game.welfare(c, prices)).transpose()?;
    let candidate_index = candidate.and_then(|c| profiles.iter().position(|p| p == c));
    Ok(NEReport {
        profiles,
        welfare,
        best,
        candidate: candidate.cloned(),
        candidate_welfare,
        candidate_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameParams;
    use crate::propagation::AttenuationTensor;
    use crate::scenario::{Point, PowerLevelSet, ScenarioBuilder};

    #[test]
    fn lone_team_has_its_argmax_as_unique_equilibrium() {
        let s = ScenarioBuilder::new(2, 1, 40.0)
            .carrier(2e9, 10e6)
            .levels(PowerLevelSet::tenths())
            .team(Point::new(20.0, 20.0), 0.01)
            .micro(Point::new(60.0, 20.0), 0.01)
            .ues(0, 1, 0)
            .ues(1, 2, 0)
            .build()
            .unwrap();
        let t = AttenuationTensor::from_vec(2, 2, 1, vec![1e-3, 2e-4, 1e-4, 1e-3]).unwrap();
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-6])).unwrap();
        let prices = g.compute_prices(&g.min_power_profile()).unwrap();
        let out = g.run_multi_carrier_game().unwrap();
        let report = enumerate_pure_ne(&g, &prices, Some(&out.profile)).unwrap();
        assert_eq!(report.profiles.len(), 1);
        assert_eq!(report.candidate_index, Some(0));
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("ne_index,welfare,is_bps_outcome,profile_hash\n0,"));
        assert!(text.contains(",true,"));
    }

    #[test]
    fn symmetric_teams_give_a_swap_symmetric_set() {
        let s = ScenarioBuilder::new(2, 1, 40.0)
            .carrier(2e9, 10e6)
            .levels(PowerLevelSet::new(vec![0.0, 0.3, 0.6, 1.0]).unwrap())
            .team(Point::new(20.0, 20.0), 1.0)
            .team(Point::new(60.0, 20.0), 1.0)
            .ues_everywhere(2)
            .build()
            .unwrap();
        let t = AttenuationTensor::from_vec(2, 2, 1, vec![1e-3, 6e-4, 6e-4, 1e-3]).unwrap();
        let mut params = GameParams::with_noise(vec![1e-7]);
        params.k = 0.05;
        let g = Game::new(&s, &t, params).unwrap();
        let prices = g.compute_prices(&g.min_power_profile()).unwrap();
        let report = enumerate_pure_ne(&g, &prices, None).unwrap();
        assert!(!report.profiles.is_empty());
        for p in &report.profiles {
            let swapped = StrategyProfile::from_levels(&s, vec![p.levels()[1], p.levels()[0]]).unwrap();
            assert!(report.profiles.contains(&swapped));
        }
    }

    #[test]
    fn too_many_profiles_rejected() {
        let mut b = ScenarioBuilder::new(8, 1, 40.0).carrier(2e9, 10e6);
        for i in 0..8 {
            b = b.team(Point::new(20.0 + 40.0 * i as f64, 20.0), 1.0);
        }
        let s = b.ues_everywhere(1).build().unwrap();
        let t = AttenuationTensor::from_vec(8, 8, 1, vec![1e-4; 64]).unwrap();
        let g = Game::new(&s, &t, GameParams::with_noise(vec![1e-7])).unwrap();
        let prices = PriceTable::uniform(&s, 1.0);
        assert!(matches!(enumerate_pure_ne(&g, &prices, None), Err(Error::TooLarge { .. })));
    }
}
