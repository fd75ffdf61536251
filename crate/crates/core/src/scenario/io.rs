//! CSV export/import: `tiles.csv`, `locations.csv`, plus `scenario.toml`
//! holding carriers, power levels, grid geometry and model parameters.

use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{
    Carrier, Location, PoaKind, Point, PowerLevelSet, Rect, Scenario, ScenarioParts, Team, Tile,
    TimeOfDay, TrafficProfile,
};
use crate::propagation::PropagationModel;
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioMeta {
    time_of_day: TimeOfDay,
    grid: [usize; 2],
    tile_side_m: f64,
    micro_radius_m: f64,
    max_ues_per_tile: u32,
    area: Rect,
    power_levels: PowerLevelSet,
    carriers: Vec<Carrier>,
    propagation: PropagationModel,
    traffic: TrafficProfile,
}

fn parse_err(file: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.to_string(),
        message: message.into(),
    }
}

pub fn write_tiles_csv<W: Write>(scenario: &Scenario, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "id",
        "x",
        "y",
        "side",
        "area_type",
        "serving_location",
        "ue_ped",
        "ue_veh",
    ])?;
    for t in scenario.tiles() {
        w.write_record(&[
            t.id.to_string(),
            t.origin.x.to_string(),
            t.origin.y.to_string(),
            t.side_m.to_string(),
            t.area_type.to_string(),
            t.serving_location.to_string(),
            t.ue_pedestrian.to_string(),
            t.ue_vehicular.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_locations_csv<W: Write>(scenario: &Scenario, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "kind", "x", "y", "max_w", "team"])?;
    for l in scenario.locations() {
        w.write_record(&[
            l.id.to_string(),
            l.kind.to_string(),
            l.position.x.to_string(),
            l.position.y.to_string(),
            l.max_power_w.to_string(),
            l.team_id.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, file: &str, row: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    record
        .get(i)
        .ok_or_else(|| parse_err(file, format!("row {row}: missing column {i}")))?
        .parse::<T>()
        .map_err(|e| parse_err(file, format!("row {row}, column {i}: {e}")))
}

pub fn read_tiles_csv<R: Read>(reader: R) -> Result<Vec<Tile>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut tiles = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let f = "tiles.csv";
        tiles.push(Tile {
            id: field(&rec, 0, f, row)?,
            origin: Point::new(field(&rec, 1, f, row)?, field(&rec, 2, f, row)?),
            side_m: field(&rec, 3, f, row)?,
            area_type: field(&rec, 4, f, row)?,
            serving_location: field(&rec, 5, f, row)?,
            ue_pedestrian: field(&rec, 6, f, row)?,
            ue_vehicular: field(&rec, 7, f, row)?,
        });
    }
    Ok(tiles)
}

pub fn read_locations_csv<R: Read>(reader: R) -> Result<Vec<Location>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let f = "locations.csv";
        let kind: PoaKind = field(&rec, 1, f, row)?;
        out.push(Location {
            id: field(&rec, 0, f, row)?,
            kind,
            position: Point::new(field(&rec, 2, f, row)?, field(&rec, 3, f, row)?),
            max_power_w: field(&rec, 4, f, row)?,
            team_id: field(&rec, 5, f, row)?,
        });
    }
    Ok(out)
}

/// Write `tiles.csv`, `locations.csv` and `scenario.toml` into `dir`.
pub fn export_scenario(scenario: &Scenario, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_tiles_csv(scenario, File::create(dir.join("tiles.csv"))?)?;
    write_locations_csv(scenario, File::create(dir.join("locations.csv"))?)?;
    let p = scenario.parts();
    let meta = ScenarioMeta {
        time_of_day: p.time_of_day,
        grid: [p.grid.0, p.grid.1],
        tile_side_m: p.tile_side_m,
        micro_radius_m: p.micro_radius_m,
        max_ues_per_tile: p.max_ues_per_tile,
        area: p.area,
        power_levels: p.power_levels.clone(),
        carriers: p.carriers.clone(),
        propagation: p.propagation.clone(),
        traffic: p.traffic.clone(),
    };
    let text = toml::to_string(&meta).map_err(|e| parse_err("scenario.toml", e.to_string()))?;
    std::fs::write(dir.join("scenario.toml"), text)?;
    Ok(())
}

/// Read a scenario written by [`export_scenario`], rebuilding teams from the
/// location and tile tables and validating the result.
pub fn import_scenario(dir: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(dir.join("scenario.toml"))?;
    let meta: ScenarioMeta =
        toml::from_str(&text).map_err(|e| parse_err("scenario.toml", e.to_string()))?;
    let tiles = read_tiles_csv(File::open(dir.join("tiles.csv"))?)?;
    let locations = read_locations_csv(File::open(dir.join("locations.csv"))?)?;

    let n_teams = locations.iter().map(|l| l.team_id + 1).max().unwrap_or(0);
    let mut teams = Vec::with_capacity(n_teams);
    for t in 0..n_teams {
        let mut members: Vec<usize> = locations
            .iter()
            .filter(|l| l.team_id == t)
            .map(|l| l.id)
            .collect();
        let leader = members
            .iter()
            .copied()
            .find(|&l| locations[l].kind == PoaKind::Macro)
            .ok_or_else(|| parse_err("locations.csv", format!("team {t} has no macro")))?;
        members.retain(|&l| l != leader);
        members.insert(0, leader);
        let team_tiles: Vec<usize> = tiles
            .iter()
            .filter(|z| locations.get(z.serving_location).map(|l| l.team_id) == Some(t))
            .map(|z| z.id)
            .collect();
        let ue_count = team_tiles.iter().map(|&z| tiles[z].ue_count()).sum();
        teams.push(Team {
            id: t,
            leader,
            members,
            tiles: team_tiles,
            ue_count,
        });
    }
    Scenario::from_parts(ScenarioParts {
        carriers: meta.carriers,
        locations,
        tiles,
        teams,
        power_levels: meta.power_levels,
        area: meta.area,
        grid: (meta.grid[0], meta.grid[1]),
        tile_side_m: meta.tile_side_m,
        micro_radius_m: meta.micro_radius_m,
        max_ues_per_tile: meta.max_ues_per_tile,
        propagation: meta.propagation,
        traffic: meta.traffic,
        time_of_day: meta.time_of_day,
    })
}
