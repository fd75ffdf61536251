use std::io::Write;

use crate::scenario::Scenario;
use crate::{Error, Result};

/// Power level index for every `(location, carrier)` pair.
///
/// A team's strategy is the `L x C` block of its member rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyProfile {
    carriers: usize,
    levels: Vec<u16>,
}

impl StrategyProfile {
    pub fn zeros(scenario: &Scenario) -> Self {
        Self::uniform(scenario, 0)
    }

    pub fn uniform(scenario: &Scenario, level: usize) -> Self {
        let carriers = scenario.carriers().len();
        Self {
            carriers,
            levels: vec![level as u16; scenario.locations().len() * carriers],
        }
    }

    pub fn from_levels(scenario: &Scenario, levels: Vec<u16>) -> Result<Self> {
        let carriers = scenario.carriers().len();
        if levels.len() != scenario.locations().len() * carriers {
            return Err(Error::InvalidInput(format!(
                "profile has {} entries, expected {}",
                levels.len(),
                scenario.locations().len() * carriers
            )));
        }
        let max = scenario.power_levels().max_level();
        if levels.iter().any(|&l| l as usize > max) {
            return Err(Error::InvalidInput("profile level outside the power level set".into()));
        }
        Ok(Self { carriers, levels })
    }

    pub fn carriers(&self) -> usize {
        self.carriers
    }

    pub fn levels(&self) -> &[u16] {
        &self.levels
    }

    #[inline]
    pub fn level(&self, location: usize, carrier: usize) -> usize {
        self.levels[location * self.carriers + carrier] as usize
    }

    #[inline]
    pub fn set_level(&mut self, location: usize, carrier: usize, level: usize) {
        self.levels[location * self.carriers + carrier] = level as u16;
    }

    pub fn fraction(&self, scenario: &Scenario, location: usize, carrier: usize) -> f64 {
        scenario.power_levels().fraction(self.level(location, carrier))
    }

    /// Radiated watts at `(location, carrier)`.
    #[inline]
    pub fn radiated_w(&self, scenario: &Scenario, location: usize, carrier: usize) -> f64 {
        self.fraction(scenario, location, carrier) * scenario.location(location).max_power_w
    }

    pub fn total_radiated_w(&self, scenario: &Scenario) -> f64 {
        (0..scenario.locations().len())
            .flat_map(|l| (0..self.carriers).map(move |c| (l, c)))
            .map(|(l, c)| self.radiated_w(scenario, l, c))
            .sum()
    }

    pub fn team_radiated_w(&self, scenario: &Scenario, team: usize) -> f64 {
        scenario
            .team(team)
            .members
            .iter()
            .flat_map(|&l| (0..self.carriers).map(move |c| (l, c)))
            .map(|(l, c)| self.radiated_w(scenario, l, c))
            .sum()
    }

    /// Team strategy as an `L x C` matrix of power fractions.
    pub fn team_matrix(&self, scenario: &Scenario, team: usize) -> Vec<Vec<f64>> {
        scenario
            .team(team)
            .members
            .iter()
            .map(|&l| (0..self.carriers).map(|c| self.fraction(scenario, l, c)).collect())
            .collect()
    }

    /// Member-major level indices of a team's matrix.
    pub fn team_levels(&self, scenario: &Scenario, team: usize) -> Vec<u16> {
        scenario
            .team(team)
            .members
            .iter()
            .flat_map(|&l| (0..self.carriers).map(move |c| self.level(l, c) as u16))
            .collect()
    }

    pub fn set_team_levels(&mut self, scenario: &Scenario, team: usize, levels: &[u16]) {
        for (i, &l) in scenario.team(team).members.iter().enumerate() {
            for c in 0..self.carriers {
                self.set_level(l, c, levels[i * self.carriers + c] as usize);
            }
        }
    }

    /// CSV with columns `team_id,location_id,carrier_id,fraction,watts`.
    pub fn write_csv<W: Write>(&self, scenario: &Scenario, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["team_id", "location_id", "carrier_id", "fraction", "watts"])?;
        for loc in scenario.locations() {
            for c in 0..self.carriers {
                w.write_record(&[
                    loc.team_id.to_string(),
                    loc.id.to_string(),
                    c.to_string(),
                    self.fraction(scenario, loc.id, c).to_string(),
                    self.radiated_w(scenario, loc.id, c).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(scenario: &Scenario, reader: R) -> Result<Self> {
        let mut profile = Self::zeros(scenario);
        let mut rdr = csv::Reader::from_reader(reader);
        let perr = |m: String| Error::Parse {
            file: "strategy.csv".into(),
            message: m,
        };
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let loc: usize = rec[1].parse().map_err(|e| perr(format!("row {row}: {e}")))?;
            let c: usize = rec[2].parse().map_err(|e| perr(format!("row {row}: {e}")))?;
            let f: f64 = rec[3].parse().map_err(|e| perr(format!("row {row}: {e}")))?;
            if loc >= scenario.locations().len() || c >= profile.carriers {
                return Err(perr(format!("row {row}: index out of range")));
            }
            let level = scenario
                .power_levels()
                .index_of(f)
                .ok_or_else(|| perr(format!("row {row}: {f} is not a power level")))?;
            profile.set_level(loc, c, level);
        }
        Ok(profile)
    }
}
