use rand::seq::SliceRandom;
use rand::Rng;

use super::{Point, PowerLevelSet, Scenario, ScenarioBuilder};
use crate::propagation::{build_attenuation_tensor, AttenuationTensor};
use crate::rng::{stream, Stream};
use crate::Result;

/// Shape of a small random two-tier instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ToySpec {
    pub teams: usize,
    pub micros_per_team: usize,
    /// Taken from 2.6, 1.8 and 0.8 GHz in that order.
    pub carriers: usize,
    pub levels: PowerLevelSet,
    /// Tile columns per team; every team spans 4 rows.
    pub cols_per_team: usize,
    pub tile_side_m: f64,
    /// Micros sit on tile centres at least this far from their macro.
    pub micro_min_distance_m: f64,
    pub max_ues_per_tile: u32,
}

impl Default for ToySpec {
    fn default() -> Self {
        Self {
            teams: 2,
            micros_per_team: 1,
            carriers: 1,
            levels: PowerLevelSet::new(vec![0.0, 0.1, 0.5, 1.0]).expect("valid levels"),
            cols_per_team: 8,
            tile_side_m: 25.0,
            micro_min_distance_m: 85.0,
            max_ues_per_tile: 3,
        }
    }
}

const TOY_CARRIERS: [f64; 3] = [2.6e9, 1.8e9, 0.8e9];
const TOY_ROWS: usize = 4;

/// Macros (20 W) in a row, micros (1 W) towards each cell edge, 0 to
/// `max_ues_per_tile` users per tile, and a shadowed attenuation tensor.
/// Everything is drawn from `seed`.
pub fn random_toy(spec: &ToySpec, seed: u64) -> Result<(Scenario, AttenuationTensor)> {
    let mut rng = stream(seed, Stream::Population);
    let side = spec.tile_side_m;
    let cols = spec.teams * spec.cols_per_team;
    let cell = spec.cols_per_team as f64 * side;
    let height = TOY_ROWS as f64 * side;
    let mut b = ScenarioBuilder::new(cols, TOY_ROWS, side)
        .levels(spec.levels.clone())
        .max_ues_per_tile(spec.max_ues_per_tile.max(1));
    for &f in TOY_CARRIERS.iter().take(spec.carriers) {
        b = b.carrier(f, 10e6);
    }
    for t in 0..spec.teams {
        let macro_at = Point::new(cell * (t as f64 + 0.5), height / 2.0);
        b = b.team(macro_at, 20.0);
        let mut spots: Vec<Point> = (0..spec.cols_per_team)
            .flat_map(|c| (0..TOY_ROWS).map(move |r| (c, r)))
            .map(|(c, r)| Point::new(t as f64 * cell + (c as f64 + 0.5) * side, (r as f64 + 0.5) * side))
            .filter(|p| p.distance(&macro_at) >= spec.micro_min_distance_m)
            .collect();
        spots.shuffle(&mut rng);
        for p in spots.into_iter().take(spec.micros_per_team) {
            b = b.micro(p, 1.0);
        }
    }
    for z in 0..cols * TOY_ROWS {
        b = b.ues(z, rng.random_range(0..=spec.max_ues_per_tile), 0);
    }
    let scenario = b.build()?;
    let tensor = build_attenuation_tensor(&scenario, scenario.propagation(), seed)?;
    Ok((scenario, tensor))
}
