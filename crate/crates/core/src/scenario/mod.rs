//! Immutable network snapshots: carriers, access-point locations, teams, the
//! tile grid and per-tile user populations.

mod build;
mod builder;
mod config;
mod io;
mod populate;
mod toy;
mod validate;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::propagation::PropagationModel;

pub use build::build_scenario;
pub use builder::ScenarioBuilder;
pub use config::{
    AreaConfig, CarrierConfig, GeometryConfig, PowerConfig, ScenarioConfig, TileConfig,
};
pub use io::{export_scenario, import_scenario, read_locations_csv, read_tiles_csv};
pub use populate::{expected_tile_ues, populate_ues};
pub use toy::{random_toy, ToySpec};
pub use validate::{validate_scenario, Violation};

/// Width of one LTE resource block.
pub const RB_BANDWIDTH_HZ: f64 = 180e3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle, `min` inclusive and `max` exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

/// A component carrier. Its index in [`Scenario::carriers`] is its id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Carrier {
    pub id: usize,
    pub center_frequency_hz: f64,
    pub bandwidth_hz: f64,
}

impl Carrier {
    /// Number of whole 180 kHz resource blocks that fit in the bandwidth.
    pub fn rb_count(&self) -> u32 {
        (self.bandwidth_hz / RB_BANDWIDTH_HZ).floor() as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoaKind {
    Macro,
    Micro,
}

impl fmt::Display for PoaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoaKind::Macro => "macro",
            PoaKind::Micro => "micro",
        })
    }
}

impl FromStr for PoaKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "macro" => Ok(PoaKind::Macro),
            "micro" => Ok(PoaKind::Micro),
            other => Err(format!("unknown PoA kind `{other}`")),
        }
    }
}

/// A point of access (macro or micro base station).
#[derive(Debug, Clone, PartialEq)]
pub struct Location {
    pub id: usize,
    pub kind: PoaKind,
    pub position: Point,
    pub max_power_w: f64,
    pub team_id: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaType {
    CityCentre,
    Commercial,
    School,
    Park,
    Residential,
}

impl AreaType {
    pub const ALL: [AreaType; 5] = [
        AreaType::CityCentre,
        AreaType::Commercial,
        AreaType::School,
        AreaType::Park,
        AreaType::Residential,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AreaType::CityCentre => "city_centre",
            AreaType::Commercial => "commercial",
            AreaType::School => "school",
            AreaType::Park => "park",
            AreaType::Residential => "residential",
        }
    }
}

impl fmt::Display for AreaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AreaType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AreaType::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown area type `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeOfDay {
    #[default]
    Morning,
    Afternoon,
    Evening,
}

impl TimeOfDay {
    pub fn index(&self) -> usize {
        match self {
            TimeOfDay::Morning => 0,
            TimeOfDay::Afternoon => 1,
            TimeOfDay::Evening => 2,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TimeOfDay::Morning => "morning",
            TimeOfDay::Afternoon => "afternoon",
            TimeOfDay::Evening => "evening",
        }
    }
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimeOfDay {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "morning" => Ok(TimeOfDay::Morning),
            "afternoon" => Ok(TimeOfDay::Afternoon),
            "evening" => Ok(TimeOfDay::Evening),
            other => Err(format!("unknown time of day `{other}`")),
        }
    }
}

/// A square tile; `origin` is its lower-left corner.
#[derive(Debug, Clone, PartialEq)]
pub struct Tile {
    pub id: usize,
    pub origin: Point,
    pub side_m: f64,
    pub serving_location: usize,
    pub ue_pedestrian: u32,
    pub ue_vehicular: u32,
    pub area_type: AreaType,
}

impl Tile {
    pub fn center(&self) -> Point {
        Point::new(self.origin.x + self.side_m / 2.0, self.origin.y + self.side_m / 2.0)
    }

    pub fn ue_count(&self) -> u32 {
        self.ue_pedestrian + self.ue_vehicular
    }

    pub fn area_m2(&self) -> f64 {
        self.side_m * self.side_m
    }
}

/// One player of the game: a macro leader and the micros in its macrocell.
#[derive(Debug, Clone, PartialEq)]
pub struct Team {
    pub id: usize,
    pub leader: usize,
    /// Member location ids, leader first.
    pub members: Vec<usize>,
    /// Tiles served by any member, ascending.
    pub tiles: Vec<usize>,
    /// Cached E_t; must equal the sum of member tile populations.
    pub ue_count: u32,
}

/// Discrete transmit power levels as fractions of a location's maximum power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PowerLevelSet {
    fractions: Vec<f64>,
}

impl PowerLevelSet {
    pub fn new(fractions: Vec<f64>) -> crate::Result<Self> {
        use crate::Error;
        if fractions.first() != Some(&0.0) {
            return Err(Error::InvalidConfig(
                "power.levels must start with 0 (carrier switched off)".into(),
            ));
        }
        if fractions.iter().any(|f| !f.is_finite() || *f > 1.0) {
            return Err(Error::InvalidConfig("power.levels must lie in [0, 1]".into()));
        }
        if fractions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "power.levels must be strictly ascending without duplicates".into(),
            ));
        }
        Ok(Self { fractions })
    }

    /// `{0, 0.1, ..., 1.0}`.
    pub fn tenths() -> Self {
        Self::uniform(10)
    }

    /// `steps + 1` evenly spaced levels from 0 to 1.
    pub fn uniform(steps: usize) -> Self {
        let fractions = (0..=steps).map(|i| i as f64 / steps as f64).collect();
        Self { fractions }
    }

    pub fn len(&self) -> usize {
        self.fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractions.is_empty()
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn fraction(&self, level: usize) -> f64 {
        self.fractions[level]
    }

    /// Index of the lowest positive level (the min-power strategy).
    pub fn min_positive(&self) -> usize {
        1.min(self.fractions.len() - 1)
    }

    pub fn max_level(&self) -> usize {
        self.fractions.len() - 1
    }

    pub fn index_of(&self, fraction: f64) -> Option<usize> {
        self.fractions
            .iter()
            .position(|f| (f - fraction).abs() <= 1e-12)
    }
}

impl TryFrom<Vec<f64>> for PowerLevelSet {
    type Error = crate::Error;

    fn try_from(value: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<PowerLevelSet> for Vec<f64> {
    fn from(value: PowerLevelSet) -> Self {
        value.fractions
    }
}

/// Per-area traffic and population parameters, indexed by [`TimeOfDay::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaTraffic {
    /// UEs per square metre before time-of-day weighting.
    pub baseline_density: f64,
    pub vehicle_fraction: f64,
    pub density_weight: [f64; 3],
    /// Download requests per cell per second.
    pub arrival_rate: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrafficProfile {
    pub city_centre: AreaTraffic,
    pub commercial: AreaTraffic,
    pub school: AreaTraffic,
    pub park: AreaTraffic,
    pub residential: AreaTraffic,
    /// Density multiplier inside a micro coverage radius.
    pub micro_densification: f64,
}

impl Default for TrafficProfile {
    fn default() -> Self {
        let area = |d, v, w: [f64; 3], l: [f64; 3]| AreaTraffic {
            baseline_density: d,
            vehicle_fraction: v,
            density_weight: w,
            arrival_rate: l,
        };
        Self {
            city_centre: area(0.0245, 0.30, [0.5, 1.0, 0.08], [0.75, 1.5, 0.12]),
            commercial: area(0.0147, 0.05, [0.6, 0.95, 0.5], [0.54, 0.9, 0.45]),
            school: area(0.0074, 0.05, [0.6, 0.95, 0.01], [0.27, 0.4, 0.005]),
            park: area(0.0009, 0.05, [0.8, 0.7, 0.5], [0.04, 0.03, 0.02]),
            residential: area(0.0009, 0.50, [0.8, 1.0, 0.6], [0.04, 0.05, 0.03]),
            micro_densification: 4.0,
        }
    }
}

impl TrafficProfile {
    pub fn area(&self, area: AreaType) -> &AreaTraffic {
        match area {
            AreaType::CityCentre => &self.city_centre,
            AreaType::Commercial => &self.commercial,
            AreaType::School => &self.school,
            AreaType::Park => &self.park,
            AreaType::Residential => &self.residential,
        }
    }

    /// Expected UE density (UE/m²) for an area at a time of day.
    pub fn density(&self, area: AreaType, tod: TimeOfDay) -> f64 {
        let a = self.area(area);
        a.baseline_density * a.density_weight[tod.index()]
    }

    pub fn arrival_rate(&self, area: AreaType, tod: TimeOfDay) -> f64 {
        self.area(area).arrival_rate[tod.index()]
    }

    pub(crate) fn check(&self) -> crate::Result<()> {
        for area in AreaType::ALL {
            let a = self.area(area);
            let ok = a.baseline_density >= 0.0
                && (0.0..=1.0).contains(&a.vehicle_fraction)
                && a.density_weight.iter().all(|w| *w >= 0.0)
                && a.arrival_rate.iter().all(|l| *l >= 0.0);
            if !ok {
                return Err(crate::Error::InvalidConfig(format!(
                    "traffic.{area}: densities, weights and rates must be >= 0, vehicle_fraction in [0,1]"
                )));
            }
        }
        if self.micro_densification < 0.0 {
            return Err(crate::Error::InvalidConfig(
                "traffic.micro_densification must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Everything needed to assemble a [`Scenario`].
#[derive(Debug, Clone)]
pub struct ScenarioParts {
    pub carriers: Vec<Carrier>,
    pub locations: Vec<Location>,
    pub tiles: Vec<Tile>,
    pub teams: Vec<Team>,
    pub power_levels: PowerLevelSet,
    pub area: Rect,
    pub grid: (usize, usize),
    pub tile_side_m: f64,
    pub micro_radius_m: f64,
    pub max_ues_per_tile: u32,
    pub propagation: PropagationModel,
    pub traffic: TrafficProfile,
    pub time_of_day: TimeOfDay,
}

/// An immutable network snapshot.
///
/// Ids of carriers, locations, tiles and teams equal their vector indices.
#[derive(Debug, Clone)]
pub struct Scenario {
    parts: ScenarioParts,
    location_tiles: Vec<Vec<usize>>,
    location_ues: Vec<u32>,
}

impl Scenario {
    /// Assemble and validate a scenario; fails with every violated invariant.
    pub fn from_parts(parts: ScenarioParts) -> crate::Result<Self> {
        let scenario = Self::from_parts_unchecked(parts);
        let violations = validate_scenario(&scenario);
        if violations.is_empty() {
            Ok(scenario)
        } else {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            Err(crate::Error::InvalidInput(msg.join("; ")))
        }
    }

    /// Assemble without validation. Used to inspect malformed inputs.
    pub fn from_parts_unchecked(parts: ScenarioParts) -> Self {
        let mut location_tiles = vec![Vec::new(); parts.locations.len()];
        let mut location_ues = vec![0u32; parts.locations.len()];
        for tile in &parts.tiles {
            if let Some(list) = location_tiles.get_mut(tile.serving_location) {
                list.push(tile.id);
                location_ues[tile.serving_location] += tile.ue_count();
            }
        }
        Self {
            parts,
            location_tiles,
            location_ues,
        }
    }

    pub fn into_parts(self) -> ScenarioParts {
        self.parts
    }

    pub fn parts(&self) -> &ScenarioParts {
        &self.parts
    }

    pub fn carriers(&self) -> &[Carrier] {
        &self.parts.carriers
    }

    pub fn locations(&self) -> &[Location] {
        &self.parts.locations
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.parts.tiles
    }

    pub fn teams(&self) -> &[Team] {
        &self.parts.teams
    }

    pub fn power_levels(&self) -> &PowerLevelSet {
        &self.parts.power_levels
    }

    pub fn area(&self) -> Rect {
        self.parts.area
    }

    pub fn grid(&self) -> (usize, usize) {
        self.parts.grid
    }

    pub fn tile_side_m(&self) -> f64 {
        self.parts.tile_side_m
    }

    pub fn micro_radius_m(&self) -> f64 {
        self.parts.micro_radius_m
    }

    pub fn propagation(&self) -> &PropagationModel {
        &self.parts.propagation
    }

    pub fn traffic(&self) -> &TrafficProfile {
        &self.parts.traffic
    }

    pub fn time_of_day(&self) -> TimeOfDay {
        self.parts.time_of_day
    }

    pub fn location(&self, id: usize) -> &Location {
        &self.parts.locations[id]
    }

    pub fn tile(&self, id: usize) -> &Tile {
        &self.parts.tiles[id]
    }

    pub fn team(&self, id: usize) -> &Team {
        &self.parts.teams[id]
    }

    /// Tiles served by a location (Z_l).
    pub fn served_tiles(&self, location: usize) -> &[usize] {
        &self.location_tiles[location]
    }

    /// Users served by a location (E_l).
    pub fn location_ues(&self, location: usize) -> u32 {
        self.location_ues[location]
    }

    pub fn total_ues(&self) -> u64 {
        self.parts.tiles.iter().map(|t| t.ue_count() as u64).sum()
    }

    /// Index of the lowest-frequency carrier, used for reference-signal association.
    pub fn reference_carrier(&self) -> usize {
        self.parts
            .carriers
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.center_frequency_hz.total_cmp(&b.1.center_frequency_hz))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Carrier indices in strictly descending center-frequency order.
    pub fn carriers_by_descending_frequency(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.parts.carriers.len()).collect();
        order.sort_by(|&a, &b| {
            self.parts.carriers[b]
                .center_frequency_hz
                .total_cmp(&self.parts.carriers[a].center_frequency_hz)
        });
        order
    }

    /// Received reference power (W) from `location` at the centre of `tile`
    /// on the reference carrier, at maximum power and without shadowing.
    pub fn reference_power(&self, location: usize, tile: usize) -> f64 {
        let loc = &self.parts.locations[location];
        let c = &self.parts.carriers[self.reference_carrier()];
        let d = loc.position.distance(&self.parts.tiles[tile].center());
        let gain = self
            .parts
            .propagation
            .path_gain(loc.kind, d.max(f64::MIN_POSITIVE), c.center_frequency_hz, 0.0)
            .unwrap_or(0.0);
        loc.max_power_w * gain
    }

    /// Location with the strongest reference power at `tile` (ties: lower id),
    /// with an optional dB bias added to micro locations.
    pub fn strongest_location(&self, tile: usize, micro_bias_db: f64) -> usize {
        let bias = 10f64.powf(micro_bias_db / 10.0);
        let mut best = 0;
        let mut best_power = f64::NEG_INFINITY;
        for loc in &self.parts.locations {
            let mut p = self.reference_power(loc.id, tile);
            if loc.kind == PoaKind::Micro {
                p *= bias;
            }
            if p > best_power {
                best_power = p;
                best = loc.id;
            }
        }
        best
    }

    /// Micros of a team sorted by ascending distance to the team's macro
    /// (ties: lower id).
    pub fn micros_by_distance(&self, team: usize) -> Vec<usize> {
        let t = &self.parts.teams[team];
        let leader = self.parts.locations[t.leader].position;
        let mut micros: Vec<usize> = t
            .members
            .iter()
            .copied()
            .filter(|&l| self.parts.locations[l].kind == PoaKind::Micro)
            .collect();
        micros.sort_by(|&a, &b| {
            let da = self.parts.locations[a].position.distance(&leader);
            let db = self.parts.locations[b].position.distance(&leader);
            da.total_cmp(&db).then(a.cmp(&b))
        });
        micros
    }

    /// Replace tile populations and refresh the cached team totals.
    pub(crate) fn with_populations(&self, counts: &[(u32, u32)], tod: TimeOfDay) -> Scenario {
        let mut parts = self.parts.clone();
        for (tile, &(ped, veh)) in parts.tiles.iter_mut().zip(counts) {
            tile.ue_pedestrian = ped;
            tile.ue_vehicular = veh;
        }
        for team in &mut parts.teams {
            team.ue_count = team.tiles.iter().map(|&z| parts.tiles[z].ue_count()).sum();
        }
        parts.time_of_day = tod;
        Scenario::from_parts_unchecked(parts)
    }
}
