//! Simulate all four power policies on one small scenario.

use bps_core::runner::generate_scenario;
use bps_core::scenario::{ScenarioConfig, TimeOfDay};
use bps_core::simulate::{run_simulation, write_metrics_csv, Policy, SimConfig};

fn main() -> bps_core::Result<()> {
    let (scenario, tensor) = generate_scenario(&ScenarioConfig::desk(3, 50.0), TimeOfDay::Afternoon, 5)?;
    let config = SimConfig::new(5.0);
    let mut reports = Vec::new();
    for policy in Policy::ALL {
        let r = run_simulation(&scenario, &tensor, policy, &config, 5)?;
        println!(
            "{policy:>5}: {} requests, demand met {:.3}, mean throughput {:.2} Mb/s, micro {:.1} b/J, energy {:.0} J",
            r.requests,
            r.demand_met,
            r.mean_ue_throughput_bps / 1e6,
            r.micro_tier.energy_efficiency(),
            r.energy_j()
        );
        reports.push(r);
    }
    write_metrics_csv(&reports, std::io::stdout().lock())
}
