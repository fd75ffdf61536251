//! Downlink traffic, proportional-fair scheduling, energy accounting and
//! the metrics that compare power policies.

mod energy;
mod engine;
mod metrics;
mod pf;
mod rate;
mod traffic;

pub use energy::EnergyModel;
pub use engine::{policy_profile, run_simulation, Policy, SimConfig};
pub use metrics::{jain_index, write_metrics_csv, MetricsReport, TierMetrics};
pub use pf::{pf_schedule, PfUser, PF_EPSILON, PF_TIME_CONSTANT};
pub use rate::{sinr_to_rate, RateTable};
pub use traffic::{cell_area_type, generate_traffic, ContentKind, DownloadRequest};
