//! Build the desk layout, populate users for the evening and export it.

use bps_core::scenario::{build_scenario, export_scenario, populate_ues, validate_scenario, ScenarioConfig, TimeOfDay};

fn main() -> bps_core::Result<()> {
    let config = ScenarioConfig::desk(7, 50.0);
    let scenario = build_scenario(&config, 42)?;
    let scenario = populate_ues(&scenario, TimeOfDay::Evening, 42);
    println!(
        "{} teams, {} locations, {} tiles, {} users",
        scenario.teams().len(),
        scenario.locations().len(),
        scenario.tiles().len(),
        scenario.total_ues()
    );
    for team in scenario.teams().iter().take(3) {
        println!("team {}: members {:?}, {} tiles, {} users", team.id, team.members, team.tiles.len(), team.ue_count);
    }
    println!("violations: {}", validate_scenario(&scenario).len());
    let dir = std::env::temp_dir().join("bps_example_scenario");
    export_scenario(&scenario, &dir)?;
    println!("exported to {}", dir.display());
    Ok(())
}
