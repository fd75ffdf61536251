//! Enumerate every pure equilibrium of a small game and locate the BPS outcome.

use bps_core::analysis::{deviation_check, enumerate_pure_ne, profile_hash, DeviationScope};
use bps_core::game::{Game, GameParams};
use bps_core::scenario::{random_toy, ToySpec};

fn main() -> bps_core::Result<()> {
    let spec = ToySpec {
        teams: 3,
        micros_per_team: 0,
        ..ToySpec::default()
    };
    let (scenario, tensor) = random_toy(&spec, 34)?;
    let mut params = GameParams::defaults_for(&scenario);
    params.k = 0.001;
    let game = Game::new(&scenario, &tensor, params)?;
    let out = game.run_multi_carrier_game()?;
    let report = enumerate_pure_ne(&game, &out.prices, Some(&out.profile))?;
    for (i, (p, w)) in report.profiles.iter().zip(&report.welfare).enumerate() {
        println!("NE {i}: {} levels {:?} welfare {w:.6}", profile_hash(p), p.levels());
    }
    println!("BPS outcome is NE #{:?}, welfare {:?}", report.candidate_index, report.candidate_welfare);
    println!("max NE welfare {:?}", report.max_welfare());
    let dev = deviation_check(&game, &out.profile, &out.prices, DeviationScope::PerCarrier)?;
    println!("improving per-carrier deviations from the BPS outcome: {}", dev.len());
    Ok(())
}
