//! Best-reply dynamics on one carrier, printing the per-iteration trace.

use bps_core::game::{Game, GameParams};
use bps_core::scenario::{random_toy, ToySpec};

fn main() -> bps_core::Result<()> {
    let spec = ToySpec {
        teams: 3,
        ..ToySpec::default()
    };
    let (scenario, tensor) = random_toy(&spec, 11)?;
    let mut params = GameParams::defaults_for(&scenario);
    params.k = 0.002;
    let game = Game::new(&scenario, &tensor, params)?;
    let prices = game.compute_prices(&game.min_power_profile())?;
    let order: Vec<usize> = game.active_teams();
    let out = game.run_single_carrier_game(0, &order, &prices)?;
    println!("iteration,team,payoff,total_watts,changed");
    for row in &out.trace {
        println!("{},{},{:.6},{:.3},{}", row.iteration, row.team, row.payoff, row.total_watts, row.changed);
    }
    println!("converged={} after {} iterations", out.converged, out.iterations);
    println!("levels {:?}", out.profile.levels());
    Ok(())
}
