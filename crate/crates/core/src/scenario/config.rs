use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{AreaType, PowerLevelSet, TrafficProfile};
use crate::propagation::PropagationModel;
use crate::{Error, Result};

/// Scenario configuration document (TOML).
///
/// Unknown keys are rejected so that typos surface as errors naming the key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub geometry: GeometryConfig,
    pub tiles: TileConfig,
    pub carriers: Vec<CarrierConfig>,
    pub power: PowerConfig,
    pub propagation: PropagationModel,
    pub traffic: TrafficProfile,
    pub areas: AreaConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub inter_site_distance_m: f64,
    pub macro_count: Option<usize>,
    pub micros_per_cell: usize,
    /// Micro coverage radius; micros of one cell keep twice this apart.
    pub micro_radius_m: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            inter_site_distance_m: 500.0,
            macro_count: None,
            micros_per_cell: 4,
            micro_radius_m: 60.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TileConfig {
    pub side_m: Option<f64>,
    /// Explicit `[columns, rows]`; otherwise the grid covers the macro
    /// lattice plus half an inter-site distance of margin.
    pub grid: Option<[usize; 2]>,
    /// Upper bound on users drawn into a single tile.
    pub max_ues: u32,
}

impl Default for TileConfig {
    fn default() -> Self {
        Self {
            side_m: None,
            grid: None,
            max_ues: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierConfig {
    pub freq_hz: f64,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerConfig {
    pub levels: PowerLevelSet,
    pub macro_max_w: f64,
    pub micro_max_w: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            levels: PowerLevelSet::tenths(),
            macro_max_w: 20.0,
            micro_max_w: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AreaConfig {
    /// One area type per macrocell, in lattice order. When absent a ring
    /// pattern is used: city centre in the middle, commercial-heavy first
    /// ring, residential-heavy beyond.
    pub cell_types: Option<Vec<AreaType>>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            tiles: TileConfig::default(),
            carriers: vec![
                CarrierConfig {
                    freq_hz: 2.6e9,
                    bandwidth_hz: 10e6,
                },
                CarrierConfig {
                    freq_hz: 1.8e9,
                    bandwidth_hz: 10e6,
                },
                CarrierConfig {
                    freq_hz: 0.8e9,
                    bandwidth_hz: 10e6,
                },
            ],
            power: PowerConfig::default(),
            propagation: PropagationModel::default(),
            traffic: TrafficProfile::default(),
            areas: AreaConfig::default(),
        }
    }
}

impl ScenarioConfig {
    /// The 57-cell, 4560-tile (80 x 57 tiles of 62 m) layout with
    /// five-location teams.
    pub fn paper_default() -> Self {
        let mut cfg = Self::default();
        cfg.geometry.macro_count = Some(57);
        cfg.tiles.side_m = Some(62.0);
        cfg.tiles.grid = Some([80, 57]);
        cfg
    }

    /// A small hexagonal cluster of `teams` cells for desk-scale runs.
    pub fn desk(teams: usize, tile_side_m: f64) -> Self {
        let mut cfg = Self::default();
        cfg.geometry.macro_count = Some(teams);
        cfg.tiles.side_m = Some(tile_side_m);
        cfg
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn macro_count(&self) -> Result<usize> {
        self.geometry
            .macro_count
            .ok_or_else(|| Error::InvalidConfig("geometry.macro_count is required".into()))
    }

    pub fn tile_side(&self) -> Result<f64> {
        self.tiles
            .side_m
            .ok_or_else(|| Error::InvalidConfig("tiles.side_m is required".into()))
    }

    /// Range checks on every field.
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        let g = &self.geometry;
        if !(g.inter_site_distance_m > 0.0) {
            return bad("geometry.inter_site_distance_m must be > 0");
        }
        let macros = self.macro_count()?;
        if macros == 0 {
            return bad("geometry.macro_count must be >= 1");
        }
        if !(g.micro_radius_m > 0.0) {
            return bad("geometry.micro_radius_m must be > 0");
        }
        let side = self.tile_side()?;
        if !(side > 0.0) || !side.is_finite() {
            return bad("tiles.side_m must be > 0");
        }
        if let Some([c, r]) = self.tiles.grid {
            if c == 0 || r == 0 {
                return bad("tiles.grid entries must be >= 1");
            }
        }
        if self.carriers.is_empty() {
            return bad("carriers must list at least one carrier");
        }
        for (i, c) in self.carriers.iter().enumerate() {
            if !(c.freq_hz > 0.0) || !(c.bandwidth_hz > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "carriers[{i}]: freq_hz and bandwidth_hz must be > 0"
                )));
            }
        }
        for i in 0..self.carriers.len() {
            for j in i + 1..self.carriers.len() {
                if self.carriers[i].freq_hz == self.carriers[j].freq_hz {
                    return Err(Error::InvalidConfig(format!(
                        "carriers[{i}] and carriers[{j}] share a center frequency"
                    )));
                }
            }
        }
        if !(self.power.macro_max_w > 0.0) || !(self.power.micro_max_w > 0.0) {
            return bad("power.macro_max_w and power.micro_max_w must be > 0");
        }
        if let Some(types) = &self.areas.cell_types {
            if types.len() != macros {
                return Err(Error::InvalidConfig(format!(
                    "areas.cell_types has {} entries, expected geometry.macro_count = {macros}",
                    types.len()
                )));
            }
        }
        self.propagation.check()?;
        self.traffic.check()?;
        Ok(())
    }
}
