use bps_core::analysis::{
    best_reply_derivative, payoff_along_best_reply, price_bound, scalar_payoff, stationary_point,
    ContinuousGameParams,
};
use bps_core::game::{Game, GameParams, PriceTable, StrategyProfile};
use bps_core::propagation::AttenuationTensor;
use bps_core::runner::random_toy_game;
use bps_core::scenario::{random_toy, AreaType, Point, PowerLevelSet, ScenarioBuilder, ToySpec};
use proptest::prelude::*;

/// One location serving one tile with one user: the team payoff must reduce
/// to the scalar payoff used by the closed-form analysis.
#[test]
fn lone_tile_game_matches_scalar_payoff() {
    let levels = PowerLevelSet::new((0..=20).map(|k| k as f64 / 20.0).collect()).unwrap();
    let s = ScenarioBuilder::new(1, 1, 40.0)
        .carrier(2e9, 10e6)
        .levels(levels)
        .team(Point::new(20.0, 20.0), 2.0)
        .ues(0, 1, 0)
        .area_type_everywhere(AreaType::Residential)
        .build()
        .unwrap();
    let gain = 0.3;
    let noise = 0.05;
    let t = AttenuationTensor::from_vec(1, 1, 1, vec![gain]).unwrap();
    let mut params = GameParams::defaults_for(&s);
    params.noise_power_w = vec![noise];
    params.delta = 0.0;
    params.alpha = 1.7;
    params.beta = 1.2;
    let g = Game::new(&s, &t, params.clone()).unwrap();
    let xi = 0.4;
    let prices = PriceTable::uniform(&s, xi);
    let cp = ContinuousGameParams {
        alpha: params.alpha,
        beta: params.beta,
        a: gain,
        noise_w: noise,
        xi,
        s_max: 2.0,
    };
    for level in 0..=20 {
        let profile = StrategyProfile::uniform(&s, level);
        let w = g.team_payoff(&profile, 0, &prices).unwrap().payoff;
        let watts = profile.radiated_w(&s, 0, 0);
        assert!((w - scalar_payoff(watts, 0.0, &cp)).abs() < 1e-12, "level {level}");
    }
}

fn continuous() -> impl Strategy<Value = (ContinuousGameParams, f64)> {
    (0.5f64..3.0, 0.5f64..3.0, -3f64..0.0, -3f64..-1.0, 0.0f64..1.0, 0.01f64..0.99).prop_map(
        |(alpha, beta, la, ln, i, frac)| {
            let mut p = ContinuousGameParams {
                alpha,
                beta,
                a: 10f64.powf(la),
                noise_w: 10f64.powf(ln),
                xi: 0.0,
                s_max: 1e9,
            };
            p.xi = frac * price_bound(i, &p);
            (p, i)
        },
    )
}

proptest! {
    #[test]
    fn payoff_along_best_reply_matches_scalar_payoff((p, i) in continuous()) {
        let s = stationary_point(i, &p).unwrap();
        let (u, w) = payoff_along_best_reply(i, &p).unwrap();
        let direct = scalar_payoff(s, i, &p);
        prop_assert!((w - direct).abs() <= 1e-9 * direct.abs().max(1.0));
        prop_assert!((u - (direct + p.xi * p.a * s)).abs() <= 1e-9);
    }

    /// The slope of the stationary point changes sign exactly once, from
    /// positive to negative, over the interference range the price allows.
    #[test]
    fn derivative_changes_sign_once((p0, _) in continuous()) {
        let mut p = p0;
        p.xi = 0.5 * p.alpha / (4.0 * p.noise_w);
        let i_max = p.alpha / (4.0 * p.xi) - p.noise_w;
        let signs: Vec<bool> = (0..2000)
            .map(|k| i_max * k as f64 / 2000.0)
            .map(|i| best_reply_derivative(i, &p).unwrap() > 0.0)
            .collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        prop_assert!(changes <= 1);
        prop_assert!(!*signs.last().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn payoff_components_stay_in_range(seed in 0u64..10_000, raw in proptest::collection::vec(0u16..4, 24)) {
        let spec = ToySpec { teams: 2, micros_per_team: 1, carriers: 3, ..ToySpec::default() };
        let (s, t) = random_toy(&spec, seed).unwrap();
        let g = Game::new(&s, &t, GameParams::defaults_for(&s)).unwrap();
        let n = s.locations().len() * s.carriers().len();
        let profile = StrategyProfile::from_levels(&s, raw[..n].to_vec()).unwrap();
        let prices = g.compute_prices(&g.min_power_profile()).unwrap();
        for team in g.active_teams() {
            let p = g.team_payoff(&profile, team, &prices).unwrap();
            prop_assert!((0.0..=1.0).contains(&p.e_t));
            prop_assert!(p.utility >= 0.0 && p.utility <= s.carriers().len() as f64 + 1e-12);
            prop_assert!(p.cost >= 0.0);
        }
    }

    #[test]
    fn each_best_reply_scores_every_member_combination(case in 0usize..500) {
        let (s, t, params) = random_toy_game(11, case).unwrap();
        let g = Game::new(&s, &t, params).unwrap();
        let prices = g.compute_prices(&g.min_power_profile()).unwrap();
        let profile = StrategyProfile::zeros(&s);
        let np = s.power_levels().len() as u64;
        for team in g.active_teams() {
            let l = s.team(team).members.len() as u32;
            for c in 0..s.carriers().len() {
                let br = g.best_reply(&profile, team, c, &prices, &[]).unwrap();
                prop_assert_eq!(br.evaluations, np.pow(l));
            }
        }
    }
}

/// Total radiated power along single-carrier dynamics, checked for being
/// non-decreasing until the first full round without changes.
#[test]
#[ignore = "known FAIL: a team's best reply can lower its power when interference rises (toy seed 21, case 45)"]
fn aggregate_power_rises_until_the_dynamics_settle() {
    let mut checked = 0;
    let mut drops = Vec::new();
    for case in 0..60 {
        let (s, t, params) = random_toy_game(21, case).unwrap();
        let g = Game::new(&s, &t, params).unwrap();
        let order = g.active_teams();
        let prices = g.compute_prices(&g.min_power_profile()).unwrap();
        let c = s.carriers_by_descending_frequency()[0];
        let out = g.run_single_carrier_game(c, &order, &prices).unwrap();
        let n = order.len();
        let mut quiet = 0;
        let mut last = 0.0;
        for row in &out.trace {
            if quiet >= n {
                break;
            }
            if row.total_watts < last - 1e-12 {
                drops.push((case, row.iteration));
            }
            last = row.total_watts;
            quiet = if row.changed { 0 } else { quiet + 1 };
        }
        checked += 1;
    }
    assert_eq!(checked, 60);
    assert!(drops.is_empty(), "aggregate power fell at (case, iteration) {drops:?}");
}
