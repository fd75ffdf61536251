use super::build::associate;
use super::{
    validate_scenario, AreaType, Carrier, Location, PoaKind, Point, PowerLevelSet, Rect, Scenario,
    ScenarioParts, Team, Tile, TimeOfDay, TrafficProfile,
};
use crate::propagation::PropagationModel;
use crate::{Error, Result};

/// Hand-assembled scenarios for tests, examples and small experiments.
///
/// Tiles form a `cols x rows` grid anchored at the origin; association is
/// always by strongest reference power.
#[derive(Debug, Clone)]
pub struct ScenarioBuilder {
    cols: usize,
    rows: usize,
    side: f64,
    carriers: Vec<(f64, f64)>,
    levels: PowerLevelSet,
    teams: Vec<(Point, f64, Vec<(Point, f64)>)>,
    ues: Vec<(u32, u32)>,
    areas: Vec<AreaType>,
    propagation: PropagationModel,
    traffic: TrafficProfile,
    micro_radius: f64,
    max_ues: u32,
    time_of_day: TimeOfDay,
}

impl ScenarioBuilder {
    pub fn new(cols: usize, rows: usize, side_m: f64) -> Self {
        Self {
            cols,
            rows,
            side: side_m,
            carriers: Vec::new(),
            levels: PowerLevelSet::tenths(),
            teams: Vec::new(),
            ues: vec![(0, 0); cols * rows],
            areas: vec![AreaType::Residential; cols * rows],
            propagation: PropagationModel::default(),
            traffic: TrafficProfile::default(),
            micro_radius: 60.0,
            max_ues: 10,
            time_of_day: TimeOfDay::default(),
        }
    }

    pub fn carrier(mut self, freq_hz: f64, bandwidth_hz: f64) -> Self {
        self.carriers.push((freq_hz, bandwidth_hz));
        self
    }

    pub fn levels(mut self, levels: PowerLevelSet) -> Self {
        self.levels = levels;
        self
    }

    /// Adds a team led by a macro at `position`.
    pub fn team(mut self, position: Point, max_power_w: f64) -> Self {
        self.teams.push((position, max_power_w, Vec::new()));
        self
    }

    /// Adds a micro to the most recently added team.
    pub fn micro(mut self, position: Point, max_power_w: f64) -> Self {
        self.teams
            .last_mut()
            .expect("micro() needs a team")
            .2
            .push((position, max_power_w));
        self
    }

    pub fn ues(mut self, tile: usize, pedestrian: u32, vehicular: u32) -> Self {
        self.ues[tile] = (pedestrian, vehicular);
        self
    }

    pub fn ues_everywhere(mut self, pedestrian: u32) -> Self {
        self.ues.iter_mut().for_each(|u| *u = (pedestrian, 0));
        self
    }

    pub fn area_type(mut self, tile: usize, area: AreaType) -> Self {
        self.areas[tile] = area;
        self
    }

    pub fn area_type_everywhere(mut self, area: AreaType) -> Self {
        self.areas.iter_mut().for_each(|a| *a = area);
        self
    }

    pub fn propagation(mut self, model: PropagationModel) -> Self {
        self.propagation = model;
        self
    }

    pub fn traffic(mut self, traffic: TrafficProfile) -> Self {
        self.traffic = traffic;
        self
    }

    pub fn max_ues_per_tile(mut self, max: u32) -> Self {
        self.max_ues = max;
        self
    }

    pub fn time_of_day(mut self, tod: TimeOfDay) -> Self {
        self.time_of_day = tod;
        self
    }

    pub fn build(self) -> Result<Scenario> {
        if self.carriers.is_empty() || self.teams.is_empty() {
            return Err(Error::InvalidInput(
                "a scenario needs at least one carrier and one team".into(),
            ));
        }
        let mut locations = Vec::new();
        let mut teams = Vec::new();
        for (t, (pos, max_w, micros)) in self.teams.iter().enumerate() {
            let leader = locations.len();
            locations.push(Location {
                id: leader,
                kind: PoaKind::Macro,
                position: *pos,
                max_power_w: *max_w,
                team_id: t,
            });
            let mut members = vec![leader];
            for (p, w) in micros {
                members.push(locations.len());
                locations.push(Location {
                    id: locations.len(),
                    kind: PoaKind::Micro,
                    position: *p,
                    max_power_w: *w,
                    team_id: t,
                });
            }
            teams.push(Team {
                id: t,
                leader,
                members,
                tiles: Vec::new(),
                ue_count: 0,
            });
        }
        let mut tiles = Vec::with_capacity(self.cols * self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let id = tiles.len();
                tiles.push(Tile {
                    id,
                    origin: Point::new(c as f64 * self.side, r as f64 * self.side),
                    side_m: self.side,
                    serving_location: 0,
                    ue_pedestrian: self.ues[id].0,
                    ue_vehicular: self.ues[id].1,
                    area_type: self.areas[id],
                });
            }
        }
        let parts = ScenarioParts {
            carriers: self
                .carriers
                .iter()
                .enumerate()
                .map(|(id, &(f, bw))| Carrier {
                    id,
                    center_frequency_hz: f,
                    bandwidth_hz: bw,
                })
                .collect(),
            locations,
            tiles,
            teams,
            power_levels: self.levels,
            area: Rect {
                min: Point::new(0.0, 0.0),
                max: Point::new(self.cols as f64 * self.side, self.rows as f64 * self.side),
            },
            grid: (self.cols, self.rows),
            tile_side_m: self.side,
            micro_radius_m: self.micro_radius,
            max_ues_per_tile: self.max_ues,
            propagation: self.propagation,
            traffic: self.traffic,
            time_of_day: self.time_of_day,
        };
        let scenario = associate(parts);
        let violations = validate_scenario(&scenario);
        if violations.is_empty() {
            Ok(scenario)
        } else {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidInput(msg.join("; ")))
        }
    }
}
