use std::collections::HashSet;
use std::fmt;

use super::{PoaKind, Scenario};

/// One broken invariant, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub entity: String,
    pub invariant: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.invariant)
    }
}

/// Check every scenario invariant. An empty list means the scenario is sound.
pub fn validate_scenario(scenario: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |entity: String, invariant: &str| {
        out.push(Violation {
            entity,
            invariant: invariant.to_string(),
        })
    };
    let parts = scenario.parts();

    for (i, c) in parts.carriers.iter().enumerate() {
        let name = format!("carrier {i}");
        if c.id != i {
            push(name.clone(), "id equals index");
        }
        if !(c.center_frequency_hz > 0.0) || !(c.bandwidth_hz > 0.0) {
            push(name.clone(), "positive frequency and bandwidth");
        }
        if parts.carriers[..i]
            .iter()
            .any(|o| o.center_frequency_hz == c.center_frequency_hz)
        {
            push(name, "distinct center frequencies");
        }
    }
    if parts.carriers.is_empty() {
        push("scenario".into(), "at least one carrier");
    }

    let levels = parts.power_levels.fractions();
    if levels.first() != Some(&0.0)
        || levels.windows(2).any(|w| w[1] <= w[0])
        || levels.iter().any(|f| *f > 1.0)
    {
        push("power levels".into(), "ascending fractions in [0, 1] starting at 0");
    }

    let n_teams = parts.teams.len();
    for (i, l) in parts.locations.iter().enumerate() {
        let name = format!("location {i}");
        if l.id != i {
            push(name.clone(), "id equals index");
        }
        if !(l.max_power_w > 0.0) {
            push(name.clone(), "positive max power");
        }
        if !parts.area.contains(&l.position) {
            push(name.clone(), "position inside network area");
        }
        if l.team_id >= n_teams {
            push(name, "belongs to an existing team");
        }
    }

    let mut member_of = vec![0usize; parts.locations.len()];
    for (t, team) in parts.teams.iter().enumerate() {
        let name = format!("team {t}");
        if team.id != t {
            push(name.clone(), "id equals index");
        }
        let macros = team
            .members
            .iter()
            .filter(|&&l| parts.locations.get(l).map(|x| x.kind) == Some(PoaKind::Macro))
            .count();
        if macros != 1 {
            push(name.clone(), "one Macro per team");
        }
        match parts.locations.get(team.leader) {
            Some(l) if l.kind == PoaKind::Macro => {}
            _ => push(name.clone(), "leader is a Macro"),
        }
        if team.members.first() != Some(&team.leader) {
            push(name.clone(), "leader listed first among members");
        }
        for &l in &team.members {
            match parts.locations.get(l) {
                Some(loc) if loc.team_id == t => member_of[l] += 1,
                _ => push(name.clone(), "members reference locations of this team"),
            }
        }
        let served: Vec<usize> = {
            let mut v: Vec<usize> = team
                .members
                .iter()
                .filter(|&&l| l < parts.locations.len())
                .flat_map(|&l| scenario.served_tiles(l).iter().copied())
                .collect();
            v.sort_unstable();
            v
        };
        if served != team.tiles {
            push(name.clone(), "tiles are the union of members' served tiles");
        }
        let by_tiles: u64 = team
            .tiles
            .iter()
            .filter_map(|&z| parts.tiles.get(z))
            .map(|z| z.ue_count() as u64)
            .sum();
        let by_locations: u64 = team
            .members
            .iter()
            .filter(|&&l| l < parts.locations.len())
            .map(|&l| scenario.location_ues(l) as u64)
            .sum();
        if team.ue_count as u64 != by_tiles || by_tiles != by_locations {
            push(name, "UE accounting (E_t = sum of tile UEs = sum of location UEs)");
        }
    }
    for (l, count) in member_of.iter().enumerate() {
        if *count != 1 {
            push(format!("location {l}"), "member of exactly one team");
        }
    }

    let (cols, rows) = parts.grid;
    let side = parts.tile_side_m;
    let mut cells = HashSet::new();
    for (i, tile) in parts.tiles.iter().enumerate() {
        let name = format!("tile {i}");
        if tile.id != i {
            push(name.clone(), "id equals index");
        }
        if tile.side_m != side {
            push(name.clone(), "identical tile side length");
        }
        let fx = (tile.origin.x - parts.area.min.x) / side;
        let fy = (tile.origin.y - parts.area.min.y) / side;
        let (cx, cy) = (fx.round(), fy.round());
        let aligned = (fx - cx).abs() < 1e-6 && (fy - cy).abs() < 1e-6;
        if !aligned || cx < 0.0 || cy < 0.0 || cx as usize >= cols || cy as usize >= rows {
            push(name.clone(), "tile lies on the network grid");
        } else if !cells.insert((cx as usize, cy as usize)) {
            push(name.clone(), "tiles do not overlap");
        }
        if tile.serving_location >= parts.locations.len() {
            push(name.clone(), "served by an existing location");
        } else if scenario.strongest_location(i, 0.0) != tile.serving_location {
            push(name.clone(), "served by the strongest reference location");
        }
        if tile.ue_count() > parts.max_ues_per_tile {
            push(name, "at most the per-tile user maximum");
        }
    }
    if cells.len() != cols * rows {
        push("tile grid".into(), "tiles partition the network area");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{build_scenario, populate_ues, PoaKind, Point, Scenario, ScenarioConfig, TimeOfDay};

    fn base() -> Scenario {
        let s = build_scenario(&ScenarioConfig::desk(3, 50.0), 2).unwrap();
        populate_ues(&s, TimeOfDay::Morning, 2)
    }

    #[test]
    fn well_formed_is_clean() {
        assert!(validate_scenario(&base()).is_empty());
    }

    #[test]
    fn two_macros_in_one_team() {
        let mut parts = base().into_parts();
        let micro = parts.teams[0].members[1];
        parts.locations[micro].kind = PoaKind::Macro;
        let v = validate_scenario(&Scenario::from_parts_unchecked(parts));
        assert!(v.iter().any(|v| v.invariant == "one Macro per team"), "{v:?}");
    }

    #[test]
    fn ue_accounting_mismatch() {
        let mut parts = base().into_parts();
        parts.teams[1].ue_count += 1;
        let v = validate_scenario(&Scenario::from_parts_unchecked(parts));
        assert_eq!(v.len(), 1);
        assert!(v[0].invariant.contains("UE accounting"));
        assert_eq!(v[0].entity, "team 1");
    }

    #[test]
    fn missing_tile_breaks_partition() {
        let mut parts = base().into_parts();
        let last = parts.tiles.len() - 1;
        parts.tiles[last].origin = Point::new(parts.area.min.x, parts.area.min.y);
        let v = validate_scenario(&Scenario::from_parts_unchecked(parts));
        assert!(v.iter().any(|v| v.invariant == "tiles do not overlap"));
        assert!(v.iter().any(|v| v.invariant.contains("partition")));
    }

    #[test]
    fn wrong_association_is_flagged() {
        let mut parts = base().into_parts();
        let z = parts.teams[0].tiles[0];
        parts.tiles[z].serving_location = parts.teams[2].leader;
        let v = validate_scenario(&Scenario::from_parts_unchecked(parts));
        assert!(v.iter().any(|v| v.invariant.contains("strongest")));
    }
}
