use rand::Rng;

use super::{
    AreaType, Carrier, Location, PoaKind, Point, Rect, Scenario, ScenarioConfig, ScenarioParts,
    Team, Tile, TimeOfDay,
};
use crate::rng::{self, Stream};
use crate::{Error, Result};

const PLACEMENT_RETRIES: usize = 1000;

/// Build a scenario from a validated configuration. Pure in `(config, seed)`.
pub fn build_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    config.check()?;
    let isd = config.geometry.inter_site_distance_m;
    let macros = hex_spiral(config.macro_count()?, isd);
    let side = config.tile_side()?;
    let (area, grid) = tile_area(&macros, isd, side, config.tiles.grid);
    for (i, m) in macros.iter().enumerate() {
        if !area.contains(m) {
            return Err(Error::Geometry(format!(
                "macro {i} at ({:.1}, {:.1}) lies outside the tile grid",
                m.x, m.y
            )));
        }
    }

    let cell_types = match &config.areas.cell_types {
        Some(types) => types.clone(),
        None => default_cell_types(macros.len(), isd),
    };

    let mut placement = rng::stream(seed, Stream::MicroPlacement);
    let mut locations = Vec::new();
    let mut teams = Vec::new();
    for (t, &center) in macros.iter().enumerate() {
        let leader = locations.len();
        locations.push(Location {
            id: leader,
            kind: PoaKind::Macro,
            position: center,
            max_power_w: config.power.macro_max_w,
            team_id: t,
        });
        let micros = place_micros(
            &mut placement,
            center,
            isd / 2.0,
            config.geometry.micro_radius_m,
            config.geometry.micros_per_cell,
            &area,
        )
        .map_err(|e| match e {
            Error::Geometry(m) => Error::Geometry(format!("cell {t}: {m}")),
            other => other,
        })?;
        let mut members = vec![leader];
        for p in micros {
            let id = locations.len();
            locations.push(Location {
                id,
                kind: PoaKind::Micro,
                position: p,
                max_power_w: config.power.micro_max_w,
                team_id: t,
            });
            members.push(id);
        }
        teams.push(Team {
            id: t,
            leader,
            members,
            tiles: Vec::new(),
            ue_count: 0,
        });
    }

    let carriers: Vec<Carrier> = config
        .carriers
        .iter()
        .enumerate()
        .map(|(id, c)| Carrier {
            id,
            center_frequency_hz: c.freq_hz,
            bandwidth_hz: c.bandwidth_hz,
        })
        .collect();

    let (cols, rows) = grid;
    let mut tiles = Vec::with_capacity(cols * rows);
    for r in 0..rows {
        for c in 0..cols {
            let origin = Point::new(area.min.x + c as f64 * side, area.min.y + r as f64 * side);
            let center = Point::new(origin.x + side / 2.0, origin.y + side / 2.0);
            let cell = nearest(&macros, &center);
            tiles.push(Tile {
                id: tiles.len(),
                origin,
                side_m: side,
                serving_location: 0,
                ue_pedestrian: 0,
                ue_vehicular: 0,
                area_type: cell_types[cell],
            });
        }
    }

    let parts = ScenarioParts {
        carriers,
        locations,
        tiles,
        teams,
        power_levels: config.power.levels.clone(),
        area,
        grid,
        tile_side_m: side,
        micro_radius_m: config.geometry.micro_radius_m,
        max_ues_per_tile: config.tiles.max_ues,
        propagation: config.propagation.clone(),
        traffic: config.traffic.clone(),
        time_of_day: TimeOfDay::default(),
    };
    Ok(associate(parts))
}

/// Assign every tile to its strongest reference location and rebuild the
/// team tile lists.
pub(super) fn associate(mut parts: ScenarioParts) -> Scenario {
    let probe = Scenario::from_parts_unchecked(parts.clone());
    for tile in &mut parts.tiles {
        tile.serving_location = probe.strongest_location(tile.id, 0.0);
    }
    for team in &mut parts.teams {
        team.tiles.clear();
    }
    for tile in &parts.tiles {
        let team = parts.locations[tile.serving_location].team_id;
        parts.teams[team].tiles.push(tile.id);
    }
    for team in &mut parts.teams {
        team.ue_count = team.tiles.iter().map(|&z| parts.tiles[z].ue_count()).sum();
    }
    Scenario::from_parts_unchecked(parts)
}

/// The first `count` points of a hexagonal lattice, ring by ring.
pub(crate) fn hex_spiral(count: usize, spacing: f64) -> Vec<Point> {
    const DIRS: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];
    let to_point = |q: i64, r: i64| {
        Point::new(
            spacing * (q as f64 + r as f64 / 2.0),
            spacing * (3f64.sqrt() / 2.0) * r as f64,
        )
    };
    let mut out = vec![to_point(0, 0)];
    let mut ring = 1i64;
    while out.len() < count {
        let (mut q, mut r) = (-ring, ring);
        'ring: for (dq, dr) in DIRS {
            for _ in 0..ring {
                out.push(to_point(q, r));
                if out.len() == count {
                    break 'ring;
                }
                q += dq;
                r += dr;
            }
        }
        ring += 1;
    }
    out.truncate(count);
    out
}

fn hex_ring(p: &Point, spacing: f64) -> usize {
    // Axial distance from the origin.
    let r = (p.y / (spacing * 3f64.sqrt() / 2.0)).round() as i64;
    let q = (p.x / spacing - r as f64 / 2.0).round() as i64;
    ((q.abs() + r.abs() + (q + r).abs()) / 2) as usize
}

fn default_cell_types(count: usize, spacing: f64) -> Vec<AreaType> {
    use AreaType::*;
    const FIRST: [AreaType; 6] = [Commercial, Commercial, School, Commercial, Park, Residential];
    const OUTER: [AreaType; 6] = [Residential, Residential, Park, Residential, School, Residential];
    let points = hex_spiral(count, spacing);
    let mut seen_in_ring = std::collections::HashMap::new();
    points
        .iter()
        .map(|p| {
            let ring = hex_ring(p, spacing);
            let k = seen_in_ring.entry(ring).or_insert(0usize);
            let idx = *k;
            *k += 1;
            match ring {
                0 => CityCentre,
                1 => FIRST[idx % 6],
                _ => OUTER[idx % 6],
            }
        })
        .collect()
}

fn tile_area(
    macros: &[Point],
    isd: f64,
    side: f64,
    grid: Option<[usize; 2]>,
) -> (Rect, (usize, usize)) {
    let min_x = macros.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let max_x = macros.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let min_y = macros.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_y = macros.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let (cx, cy) = ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0);
    let (cols, rows) = match grid {
        Some([c, r]) => (c, r),
        None => {
            let w = max_x - min_x + isd;
            let h = max_y - min_y + isd;
            ((w / side).ceil().max(1.0) as usize, (h / side).ceil().max(1.0) as usize)
        }
    };
    let w = cols as f64 * side;
    let h = rows as f64 * side;
    let min = Point::new(cx - w / 2.0, cy - h / 2.0);
    (
        Rect {
            min,
            max: Point::new(min.x + w, min.y + h),
        },
        (cols, rows),
    )
}

fn nearest(points: &[Point], p: &Point) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, q) in points.iter().enumerate() {
        let d = q.distance(p);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

fn place_micros<R: Rng>(
    rng: &mut R,
    center: Point,
    cell_radius: f64,
    micro_radius: f64,
    count: usize,
    area: &Rect,
) -> Result<Vec<Point>> {
    let mut placed: Vec<Point> = Vec::with_capacity(count);
    for _ in 0..count {
        let mut ok = None;
        for _ in 0..PLACEMENT_RETRIES {
            // Uniform in the disk inscribed in the hexagonal cell.
            let r = cell_radius * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            let p = Point::new(center.x + r * theta.cos(), center.y + r * theta.sin());
            if area.contains(&p) && placed.iter().all(|q| q.distance(&p) >= 2.0 * micro_radius) {
                ok = Some(p);
                break;
            }
        }
        match ok {
            Some(p) => placed.push(p),
            None => {
                return Err(Error::Geometry(format!(
                    "could not place micro {} without overlap after {PLACEMENT_RETRIES} tries",
                    placed.len()
                )))
            }
        }
    }
    Ok(placed)
}
