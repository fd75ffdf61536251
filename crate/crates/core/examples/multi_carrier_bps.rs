//! The multi-carrier game played from the highest carrier down, with the
//! search-space counter per carrier.

use bps_core::game::{Game, GameParams};
use bps_core::scenario::{random_toy, ToySpec};

fn main() -> bps_core::Result<()> {
    let spec = ToySpec {
        teams: 3,
        micros_per_team: 2,
        carriers: 3,
        ..ToySpec::default()
    };
    let (scenario, tensor) = random_toy(&spec, 3)?;
    let mut params = GameParams::defaults_for(&scenario);
    params.k = 0.001;
    let game = Game::new(&scenario, &tensor, params)?;
    let out = game.run_multi_carrier_game()?;
    for c in &out.carriers {
        let f = scenario.carriers()[c.carrier].center_frequency_hz / 1e9;
        println!(
            "carrier {} ({f} GHz): {} iterations, {} rounds, converged {}, {} evaluations",
            c.carrier, c.iterations, c.rounds, c.converged, c.evaluations
        );
    }
    let per_reply = (scenario.power_levels().len() as u64).pow(scenario.team(0).members.len() as u32);
    println!("evaluations per best reply: {per_reply}");
    for team in scenario.teams() {
        let p = game.team_payoff(&out.profile, team.id, &out.prices)?;
        println!("team {}: payoff {:.4}, unserved {:.3}, radiated {:.2} W", team.id, p.payoff, p.e_t, out.profile.team_radiated_w(&scenario, team.id));
    }
    Ok(())
}
