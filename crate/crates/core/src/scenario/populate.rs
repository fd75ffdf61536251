use rand_distr::{Binomial, Distribution, Poisson};

use super::{PoaKind, Scenario, TimeOfDay};
use crate::rng::{self, Stream};

/// Expected number of users in a tile: area density, time-of-day weight and
/// tile area, densified near micro locations.
pub fn expected_tile_ues(scenario: &Scenario, tile: usize, tod: TimeOfDay) -> f64 {
    let t = scenario.tile(tile);
    let traffic = scenario.traffic();
    let mut expected = traffic.density(t.area_type, tod) * t.area_m2();
    let center = t.center();
    let near_micro = scenario.locations().iter().any(|l| {
        l.kind == PoaKind::Micro && l.position.distance(&center) <= scenario.micro_radius_m()
    });
    if near_micro {
        expected *= traffic.micro_densification;
    }
    expected
}

/// Draw per-tile pedestrian and vehicular users. Pure in `(scenario, tod, seed)`.
///
/// Counts are Poisson around [`expected_tile_ues`], capped at the scenario's
/// per-tile maximum, then split by the area's vehicle fraction.
pub fn populate_ues(scenario: &Scenario, tod: TimeOfDay, seed: u64) -> Scenario {
    let mut rng = rng::stream(seed, Stream::Population);
    let cap = scenario.parts().max_ues_per_tile;
    let counts: Vec<(u32, u32)> = scenario
        .tiles()
        .iter()
        .map(|tile| {
            let expected = expected_tile_ues(scenario, tile.id, tod);
            let n = if expected > 0.0 {
                let draw: f64 = Poisson::new(expected)
                    .expect("positive finite mean")
                    .sample(&mut rng);
                (draw.max(0.0) as u32).min(cap)
            } else {
                0
            };
            let p_veh = scenario.traffic().area(tile.area_type).vehicle_fraction;
            let veh = if n > 0 {
                Binomial::new(n as u64, p_veh)
                    .expect("fraction in [0, 1]")
                    .sample(&mut rng) as u32
            } else {
                0
            };
            (n - veh, veh)
        })
        .collect();
    scenario.with_populations(&counts, tod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{AreaType, Point, ScenarioBuilder};

    fn far_tile(area: AreaType) -> Scenario {
        // One 10 m x 10 m tile, no micros anywhere.
        ScenarioBuilder::new(1, 1, 10.0)
            .carrier(2e9, 10e6)
            .team(Point::new(5.0, 5.0), 20.0)
            .area_type(0, area)
            .build()
            .unwrap()
    }

    #[test]
    fn park_morning_density() {
        let s = far_tile(AreaType::Park);
        let d = s.traffic().density(AreaType::Park, TimeOfDay::Morning);
        assert!((d - 0.0009 * 0.8).abs() < 1e-15);
        assert!((expected_tile_ues(&s, 0, TimeOfDay::Morning) - d * 100.0).abs() < 1e-12);
    }

    #[test]
    fn zero_weight_means_empty() {
        let mut traffic = crate::scenario::TrafficProfile::default();
        traffic.park.density_weight = [0.0; 3];
        let s = ScenarioBuilder::new(3, 3, 10.0)
            .carrier(2e9, 10e6)
            .team(Point::new(15.0, 15.0), 20.0)
            .area_type_everywhere(AreaType::Park)
            .traffic(traffic)
            .build()
            .unwrap();
        let p = populate_ues(&s, TimeOfDay::Evening, 9);
        assert_eq!(p.total_ues(), 0);
    }

    #[test]
    fn densification_near_micros() {
        let s = ScenarioBuilder::new(2, 1, 10.0)
            .carrier(2e9, 10e6)
            .team(Point::new(-500.0, 5.0), 20.0)
            .micro(Point::new(5.0, 5.0), 1.0)
            .area_type_everywhere(AreaType::CityCentre)
            .build();
        // The macro lies outside the grid, which is a violation.
        assert!(s.is_err());
        let s = ScenarioBuilder::new(20, 1, 10.0)
            .carrier(2e9, 10e6)
            .team(Point::new(195.0, 5.0), 20.0)
            .micro(Point::new(5.0, 5.0), 1.0)
            .area_type_everywhere(AreaType::CityCentre)
            .build()
            .unwrap();
        let near = expected_tile_ues(&s, 0, TimeOfDay::Afternoon);
        let far = expected_tile_ues(&s, 19, TimeOfDay::Afternoon);
        assert!((near / far - 4.0).abs() < 1e-12);
    }

    #[test]
    fn city_centre_afternoon_mean_matches_expectation() {
        let s = far_tile(AreaType::CityCentre);
        let expected = expected_tile_ues(&s, 0, TimeOfDay::Afternoon);
        assert!((expected - 2.45).abs() < 1e-12);
        let n = 10_000u64;
        let total: u64 = (0..n)
            .map(|seed| populate_ues(&s, TimeOfDay::Afternoon, seed).total_ues())
            .sum();
        let mean = total as f64 / n as f64;
        assert!((mean - expected).abs() / expected < 0.05, "mean {mean}");
    }

    #[test]
    fn deterministic_per_seed() {
        let s = crate::scenario::build_scenario(&crate::scenario::ScenarioConfig::desk(3, 50.0), 1)
            .unwrap();
        let a = populate_ues(&s, TimeOfDay::Morning, 5);
        let b = populate_ues(&s, TimeOfDay::Morning, 5);
        assert_eq!(a.tiles(), b.tiles());
        assert!(a.tiles().iter().all(|t| t.ue_count() <= 10));
        assert!(crate::scenario::validate_scenario(&a).is_empty());
    }
}
