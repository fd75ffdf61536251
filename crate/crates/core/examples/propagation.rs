//! Path loss by distance and carrier, and the averaged attenuation a team sees.

use bps_core::propagation::{average_attenuation, build_attenuation_tensor, linear_to_db, PropagationModel};
use bps_core::scenario::{random_toy, PoaKind, ToySpec};

fn main() -> bps_core::Result<()> {
    let model = PropagationModel::default();
    println!("distance_m,kind,freq_ghz,path_loss_db");
    for d in [20.0, 50.0, 100.0, 250.0, 500.0] {
        for kind in [PoaKind::Macro, PoaKind::Micro] {
            for f in [0.8e9, 1.8e9, 2.6e9] {
                println!("{d},{kind},{},{:.1}", f / 1e9, model.path_loss_db(kind, d, f));
            }
        }
    }

    let (scenario, _) = random_toy(&ToySpec::default(), 7)?;
    let tensor = build_attenuation_tensor(&scenario, &model.without_shadowing(), 7)?;
    for loc in scenario.locations() {
        let tiles = scenario.served_tiles(loc.id);
        for c in 0..scenario.carriers().len() {
            let a = average_attenuation(&scenario, &tensor, loc.id, c, tiles)?;
            println!(
                "location {} ({}) carrier {c}: {} tiles, mean gain {:.1} dB",
                loc.id,
                loc.kind,
                tiles.len(),
                linear_to_db(a)
            );
        }
    }
    Ok(())
}
