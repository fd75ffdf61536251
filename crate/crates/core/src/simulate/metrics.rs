use std::io::Write;

use crate::scenario::{AreaType, TimeOfDay};
use crate::simulate::Policy;
use crate::{Error, Result};

/// `(sum x)^2 / (n sum x^2)` over non-negative values.
pub fn jain_index(values: &[f64]) -> Result<f64> {
    if values.is_empty() || values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidInput("Jain index needs at least one non-negative value".into()));
    }
    let sum: f64 = values.iter().sum();
    let sq: f64 = values.iter().map(|v| v * v).sum();
    if sq == 0.0 {
        return Err(Error::AllZero);
    }
    Ok(sum * sum / (values.len() as f64 * sq))
}

/// Totals for one PoA tier.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TierMetrics {
    pub bits: f64,
    pub energy_j: f64,
    pub rbs_used: u64,
}

impl TierMetrics {
    /// Bits per joule.
    pub fn energy_efficiency(&self) -> f64 {
        if self.energy_j > 0.0 {
            self.bits / self.energy_j
        } else {
            0.0
        }
    }

    /// Kilobits per resource block used.
    pub fn rb_efficiency_kb(&self) -> f64 {
        if self.rbs_used > 0 {
            self.bits / 1e3 / self.rbs_used as f64
        } else {
            0.0
        }
    }
}

/// Outcome of one simulated policy run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub policy: Policy,
    pub time_of_day: TimeOfDay,
    pub duration_s: f64,
    pub requests: usize,
    pub completed: usize,
    pub failed: usize,
    /// Still downloading at the horizon.
    pub in_flight: usize,
    pub requested_bits: f64,
    pub delivered_bits: f64,
    /// Delivered over requested bits; 1 when nothing was requested.
    pub demand_met: f64,
    pub failed_fraction_video: f64,
    pub failed_fraction_generic: f64,
    pub macro_tier: TierMetrics,
    pub micro_tier: TierMetrics,
    /// Mean over users with traffic of bits received per second of activity.
    pub mean_ue_throughput_bps: f64,
    pub mean_ue_throughput_inner_bps: f64,
    pub mean_ue_throughput_edge_bps: f64,
    pub jain_all: Option<f64>,
    pub jain_inner: Option<f64>,
    pub jain_edge: Option<f64>,
    /// Mean user throughput per area type with traffic.
    pub area_throughput_bps: Vec<(AreaType, f64)>,
    /// Convergence of the power game, when the policy plays it.
    pub game_converged: Option<bool>,
}

impl MetricsReport {
    pub fn energy_j(&self) -> f64 {
        self.macro_tier.energy_j + self.micro_tier.energy_j
    }

    /// `(metric, poa_kind, value)` rows.
    pub fn rows(&self) -> Vec<(String, &'static str, f64)> {
        let mut rows: Vec<(String, &'static str, f64)> = vec![
            ("requests".into(), "all", self.requests as f64),
            ("completed".into(), "all", self.completed as f64),
            ("failed".into(), "all", self.failed as f64),
            ("in_flight".into(), "all", self.in_flight as f64),
            ("requested_bits".into(), "all", self.requested_bits),
            ("delivered_bits".into(), "all", self.delivered_bits),
            ("demand_met".into(), "all", self.demand_met),
            ("failed_fraction_video".into(), "all", self.failed_fraction_video),
            ("failed_fraction_generic".into(), "all", self.failed_fraction_generic),
            ("mean_ue_throughput_bps".into(), "all", self.mean_ue_throughput_bps),
            ("mean_ue_throughput_inner_bps".into(), "all", self.mean_ue_throughput_inner_bps),
            ("mean_ue_throughput_edge_bps".into(), "all", self.mean_ue_throughput_edge_bps),
            ("energy_j".into(), "all", self.energy_j()),
        ];
        for (name, value) in [
            ("jain_all", self.jain_all),
            ("jain_inner", self.jain_inner),
            ("jain_edge", self.jain_edge),
        ] {
            if let Some(v) = value {
                rows.push((name.into(), "all", v));
            }
        }
        for (kind, tier) in [("macro", &self.macro_tier), ("micro", &self.micro_tier)] {
            rows.push(("bits".into(), kind, tier.bits));
            rows.push(("energy_j".into(), kind, tier.energy_j));
            rows.push(("rbs_used".into(), kind, tier.rbs_used as f64));
            rows.push(("energy_efficiency_bits_per_j".into(), kind, tier.energy_efficiency()));
            rows.push(("rb_efficiency_kb_per_rb".into(), kind, tier.rb_efficiency_kb()));
        }
        for (area, v) in &self.area_throughput_bps {
            rows.push((format!("mean_ue_throughput_bps_{area}"), "all", *v));
        }
        if let Some(c) = self.game_converged {
            rows.push(("game_converged".into(), "all", if c { 1.0 } else { 0.0 }));
        }
        rows
    }
}

/// CSV with columns `policy,time_of_day,metric,poa_kind,value`.
pub fn write_metrics_csv<W: Write>(reports: &[MetricsReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["policy", "time_of_day", "metric", "poa_kind", "value"])?;
    for r in reports {
        for (metric, kind, value) in r.rows() {
            w.write_record(&[
                r.policy.as_str().to_string(),
                r.time_of_day.as_str().to_string(),
                metric,
                kind.to_string(),
                value.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn jain_examples() {
        assert_eq!(jain_index(&[2.0, 2.0, 2.0]).unwrap(), 1.0);
        assert!((jain_index(&[0.0, 0.0, 5.0, 0.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!((jain_index(&[1.0, 2.0, 3.0]).unwrap() - 36.0 / 42.0).abs() < 1e-15);
        assert!(matches!(jain_index(&[0.0, 0.0]), Err(Error::AllZero)));
    }

    proptest! {
        #[test]
        fn jain_bounds(v in proptest::collection::vec(0.0f64..1e6, 1..50)) {
            if let Ok(j) = jain_index(&v) {
                let n = v.len() as f64;
                prop_assert!(j <= 1.0 + 1e-12 && j >= 1.0 / n - 1e-12);
            }
        }
    }
}
