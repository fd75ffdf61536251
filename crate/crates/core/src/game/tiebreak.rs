//! Composite preference order used to break payoff ties between team strategies.

use std::cmp::Ordering;

use crate::scenario::Scenario;

/// Quantized summary of a team strategy; comparing two keys is a total order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyKey {
    /// Total radiated nanowatts.
    pub total_nw: i64,
    /// Per-micro summed fractions (scaled by 1e12), nearest micro first.
    pub micro_fractions: Vec<i64>,
    /// Per-carrier radiated nanowatts, highest carrier frequency first.
    pub carrier_nw: Vec<i64>,
    /// Member-major level indices.
    pub levels: Vec<u16>,
}

#[inline]
fn nanowatts(w: f64) -> i64 {
    (w * 1e9).round() as i64
}

#[inline]
fn fraction_units(f: f64) -> i64 {
    (f * 1e12).round() as i64
}

impl StrategyKey {
    /// `levels` is the team's member-major `L x C` level matrix.
    pub fn new(scenario: &Scenario, team: usize, levels: &[u16]) -> Self {
        let t = scenario.team(team);
        let nc = scenario.carriers().len();
        let p = scenario.power_levels();
        let watts = |i: usize, c: usize| {
            p.fraction(levels[i * nc + c] as usize) * scenario.location(t.members[i]).max_power_w
        };
        let mut total_nw = 0i64;
        for i in 0..t.members.len() {
            for c in 0..nc {
                total_nw += nanowatts(watts(i, c));
            }
        }
        let micro_fractions = scenario
            .micros_by_distance(team)
            .into_iter()
            .map(|l| {
                let i = t.members.iter().position(|&m| m == l).expect("member");
                (0..nc)
                    .map(|c| fraction_units(p.fraction(levels[i * nc + c] as usize)))
                    .sum()
            })
            .collect();
        let carrier_nw = scenario
            .carriers_by_descending_frequency()
            .into_iter()
            .map(|c| (0..t.members.len()).map(|i| nanowatts(watts(i, c))).sum())
            .collect();
        Self {
            total_nw,
            micro_fractions,
            carrier_nw,
            levels: levels.to_vec(),
        }
    }
}

/// `Ordering::Less` means `a` is preferred over `b`.
pub fn preference(a: &StrategyKey, b: &StrategyKey) -> Ordering {
    a.total_nw
        .cmp(&b.total_nw)
        .then_with(|| b.micro_fractions.cmp(&a.micro_fractions))
        .then_with(|| b.carrier_nw.cmp(&a.carrier_nw))
        .then_with(|| a.levels.cmp(&b.levels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Point, PowerLevelSet, ScenarioBuilder};
    use proptest::prelude::*;

    fn scenario() -> Scenario {
        ScenarioBuilder::new(4, 1, 10.0)
            .carrier(2.6e9, 10e6)
            .carrier(0.8e9, 10e6)
            .levels(PowerLevelSet::new(vec![0.0, 0.5, 1.0]).unwrap())
            .team(Point::new(5.0, 5.0), 2.0)
            .micro(Point::new(35.0, 5.0), 1.0)
            .micro(Point::new(15.0, 5.0), 1.0)
            .ues_everywhere(1)
            .build()
            .unwrap()
    }

    #[test]
    fn nearer_micro_wins_at_equal_power() {
        let s = scenario();
        // members: macro, far micro (id 1), near micro (id 2); carriers [2.6, 0.8]
        let far = StrategyKey::new(&s, 0, &[0, 0, 2, 0, 0, 0]);
        let near = StrategyKey::new(&s, 0, &[0, 0, 0, 0, 2, 0]);
        assert_eq!(far.total_nw, near.total_nw);
        assert_eq!(preference(&near, &far), Ordering::Less);
    }

    #[test]
    fn lower_power_beats_everything() {
        let s = scenario();
        let low = StrategyKey::new(&s, 0, &[1, 0, 0, 0, 0, 0]);
        let high = StrategyKey::new(&s, 0, &[0, 0, 2, 2, 2, 2]);
        assert_eq!(preference(&low, &high), Ordering::Less);
    }

    #[test]
    fn higher_carrier_preferred() {
        let s = scenario();
        let hi = StrategyKey::new(&s, 0, &[2, 0, 0, 0, 0, 0]);
        let lo = StrategyKey::new(&s, 0, &[0, 2, 0, 0, 0, 0]);
        assert_eq!(preference(&hi, &lo), Ordering::Less);
    }

    proptest! {
        #[test]
        fn comparator_is_a_total_order(
            a in proptest::collection::vec(0u16..3, 6),
            b in proptest::collection::vec(0u16..3, 6),
            c in proptest::collection::vec(0u16..3, 6),
        ) {
            let s = scenario();
            let (ka, kb, kc) = (
                StrategyKey::new(&s, 0, &a),
                StrategyKey::new(&s, 0, &b),
                StrategyKey::new(&s, 0, &c),
            );
            // antisymmetry and totality
            prop_assert_eq!(preference(&ka, &kb), preference(&kb, &ka).reverse());
            prop_assert_eq!(preference(&ka, &kb) == Ordering::Equal, a == b);
            // transitivity
            if preference(&ka, &kb) != Ordering::Greater && preference(&kb, &kc) != Ordering::Greater {
                prop_assert_ne!(preference(&ka, &kc), Ordering::Greater);
            }
        }
    }
}
