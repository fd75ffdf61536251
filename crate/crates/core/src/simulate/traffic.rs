use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::rng::{stream, Stream};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// What a request downloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContentKind {
    /// 1 Mb within 0.5 s.
    Video,
    /// 500 kb within 1 s.
    Generic,
}

impl ContentKind {
    pub const ALL: [ContentKind; 2] = [ContentKind::Video, ContentKind::Generic];

    pub fn size_bits(self) -> f64 {
        match self {
            ContentKind::Video => 1e6,
            ContentKind::Generic => 5e5,
        }
    }

    pub fn deadline_s(self) -> f64 {
        match self {
            ContentKind::Video => 0.5,
            ContentKind::Generic => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ContentKind::Video => "video",
            ContentKind::Generic => "generic",
        }
    }
}

/// One download issued by a user in a tile.
#[derive(Debug, Clone, PartialEq)]
pub struct DownloadRequest {
    pub id: usize,
    pub tile: usize,
    /// Index of the requesting user inside its tile; pedestrians come first.
    pub ue: u32,
    pub kind: ContentKind,
    pub arrival_s: f64,
}

/// Per-cell Poisson arrivals over `[0, duration_s)`.
///
/// A cell is a team; its rate comes from the area type of the tile under the
/// macro and the scenario's time of day. The requesting tile is drawn in
/// proportion to its users and the kind is a fair coin. Requests are sorted by
/// arrival time and numbered in that order.
pub fn generate_traffic(scenario: &Scenario, duration_s: f64, seed: u64) -> Result<Vec<DownloadRequest>> {
    if !(duration_s > 0.0) {
        return Err(Error::InvalidInput("traffic duration must be > 0".into()));
    }
    let mut rng = stream(seed, Stream::Traffic);
    let tod = scenario.time_of_day();
    let mut out = Vec::new();
    for team in scenario.teams() {
        let rate = scenario
            .traffic()
            .arrival_rate(cell_area_type(scenario, team.id), tod);
        if rate <= 0.0 || team.ue_count == 0 {
            continue;
        }
        let weights: Vec<u32> = team.tiles.iter().map(|&z| scenario.tile(z).ue_count()).collect();
        let pick = WeightedIndex::new(&weights).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let gap = Exp::new(rate).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let mut t = gap.sample(&mut rng);
        while t < duration_s {
            let tile = team.tiles[pick.sample(&mut rng)];
            let ue = rng.random_range(0..scenario.tile(tile).ue_count());
            let kind = if rng.random_bool(0.5) {
                ContentKind::Video
            } else {
                ContentKind::Generic
            };
            out.push(DownloadRequest {
                id: 0,
                tile,
                ue,
                kind,
                arrival_s: t,
            });
            t += gap.sample(&mut rng);
        }
    }
    out.sort_by(|a, b| a.arrival_s.total_cmp(&b.arrival_s).then(a.tile.cmp(&b.tile)));
    for (i, r) in out.iter_mut().enumerate() {
        r.id = i;
    }
    Ok(out)
}

/// Area type of the tile holding the team's macro, or of its first tile.
pub fn cell_area_type(scenario: &Scenario, team: usize) -> crate::scenario::AreaType {
    let t = scenario.team(team);
    let leader = scenario.location(t.leader).position;
    scenario
        .tiles()
        .iter()
        .find(|z| {
            leader.x >= z.origin.x
                && leader.x < z.origin.x + z.side_m
                && leader.y >= z.origin.y
                && leader.y < z.origin.y + z.side_m
        })
        .or_else(|| t.tiles.first().map(|&z| scenario.tile(z)))
        .map_or(crate::scenario::AreaType::Residential, |z| z.area_type)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{AreaType, Point, ScenarioBuilder, TimeOfDay, TrafficProfile};

    fn city(tod: TimeOfDay) -> Scenario {
        ScenarioBuilder::new(2, 2, 10.0)
            .carrier(2e9, 10e6)
            .team(Point::new(5.0, 5.0), 20.0)
            .ues(0, 1, 0)
            .ues(3, 3, 0)
            .area_type_everywhere(AreaType::CityCentre)
            .time_of_day(tod)
            .build()
            .unwrap()
    }

    #[test]
    fn zero_rate_gives_no_requests() {
        let mut traffic = TrafficProfile::default();
        traffic.city_centre.arrival_rate = [0.0; 3];
        let s = ScenarioBuilder::new(1, 1, 10.0)
            .carrier(2e9, 10e6)
            .team(Point::new(5.0, 5.0), 20.0)
            .ues(0, 2, 0)
            .area_type_everywhere(AreaType::CityCentre)
            .traffic(traffic)
            .build()
            .unwrap();
        assert!(generate_traffic(&s, 100.0, 1).unwrap().is_empty());
    }

    #[test]
    fn poisson_mean_and_fair_kinds() {
        let s = city(TimeOfDay::Afternoon);
        let seeds = 1000;
        let mut total = 0usize;
        let mut video = 0usize;
        for seed in 0..seeds {
            let r = generate_traffic(&s, 100.0, seed).unwrap();
            total += r.len();
            video += r.iter().filter(|d| d.kind == ContentKind::Video).count();
            assert!(r.windows(2).all(|w| w[0].arrival_s <= w[1].arrival_s));
            assert!(r.iter().all(|d| d.tile == 0 || d.tile == 3));
        }
        let mean = total as f64 / seeds as f64;
        assert!((mean - 150.0).abs() / 150.0 < 0.03, "{mean}");
        // 99.9% binomial interval on the video share
        let p = video as f64 / total as f64;
        let sd = (0.25 / total as f64).sqrt();
        assert!((p - 0.5).abs() < 3.3 * sd, "{p}");
    }

    #[test]
    fn tiles_drawn_by_population() {
        let s = city(TimeOfDay::Afternoon);
        let r = generate_traffic(&s, 2000.0, 7).unwrap();
        let share = r.iter().filter(|d| d.tile == 3).count() as f64 / r.len() as f64;
        assert!((share - 0.75).abs() < 0.03, "{share}");
    }

    #[test]
    fn zero_duration_rejected() {
        assert!(generate_traffic(&city(TimeOfDay::Morning), 0.0, 1).is_err());
    }
}
