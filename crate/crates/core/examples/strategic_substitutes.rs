//! Best replies along rising interference, scalar and team-level.

use bps_core::analysis::{check_strategic_substitutes, discrete_best_reply, ContinuousGameParams};
use bps_core::game::{Game, GameParams};
use bps_core::scenario::{random_toy, PowerLevelSet, ToySpec};

fn main() -> bps_core::Result<()> {
    let levels = PowerLevelSet::tenths();
    let mut p = ContinuousGameParams {
        alpha: 1.0,
        beta: 1.0,
        a: 0.5,
        noise_w: 0.01,
        xi: 0.0,
        s_max: 10.0,
    };
    p.xi = 0.02 * p.alpha / (4.0 * p.noise_w);
    println!("interference,priced_reply_w,free_reply_w");
    let free = ContinuousGameParams { xi: 0.0, ..p };
    for k in 0..=10 {
        let i = 0.05 * k as f64;
        let priced = discrete_best_reply(i, &p, &levels, 0.0, 0.1);
        let unpriced = discrete_best_reply(i, &free, &levels, 0.0, 0.1);
        println!("{i:.2},{priced:.1},{unpriced:.1}");
    }

    let (scenario, tensor) = random_toy(&ToySpec { teams: 3, ..ToySpec::default() }, 2)?;
    let mut params = GameParams::defaults_for(&scenario);
    params.k = 0.01;
    let game = Game::new(&scenario, &tensor, params)?;
    let prices = game.compute_prices(&game.min_power_profile())?;
    let report = check_strategic_substitutes(&game, &prices, 50, 2)?;
    println!(
        "team-level check: {} pairs, {} incomparable skipped, {} violations",
        report.pairs_checked,
        report.skipped_incomparable,
        report.violations.len()
    );
    Ok(())
}
