use crate::propagation::linear_to_db;
use crate::scenario::RB_BANDWIDTH_HZ;
use crate::{Error, Result};

/// Step map from SINR to spectral efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    /// Ascending SINR breakpoints in dB.
    pub thresholds_db: Vec<f64>,
    /// Spectral efficiency (b/s/Hz) reached at each breakpoint.
    pub efficiency: Vec<f64>,
}

impl Default for RateTable {
    /// 15-step CQI-like table from -6.5 dB to 19.8 dB.
    fn default() -> Self {
        let efficiency = vec![
            0.15, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141, 2.4063, 2.7305, 3.3223, 3.9023, 4.5234,
            5.1152, 5.55,
        ];
        let thresholds_db = (0..15).map(|i| -6.5 + i as f64 * (19.8 + 6.5) / 14.0).collect();
        Self {
            thresholds_db,
            efficiency,
        }
    }
}

impl RateTable {
    pub fn new(thresholds_db: Vec<f64>, efficiency: Vec<f64>) -> Result<Self> {
        let ok = !thresholds_db.is_empty()
            && thresholds_db.len() == efficiency.len()
            && thresholds_db.windows(2).all(|w| w[0] < w[1])
            && efficiency.windows(2).all(|w| w[0] <= w[1])
            && efficiency.iter().all(|e| *e >= 0.0);
        if !ok {
            return Err(Error::InvalidInput(
                "rate table needs ascending thresholds and non-decreasing efficiencies of equal length".into(),
            ));
        }
        Ok(Self {
            thresholds_db,
            efficiency,
        })
    }

    /// Spectral efficiency at linear SINR `sinr`; 0 below the first breakpoint.
    pub fn efficiency_at(&self, sinr: f64) -> f64 {
        if !(sinr > 0.0) {
            return 0.0;
        }
        let db = linear_to_db(sinr);
        match self.thresholds_db.partition_point(|&t| t <= db) {
            0 => 0.0,
            k => self.efficiency[k - 1],
        }
    }

    /// Bits carried by one resource block in one TTI.
    pub fn bits_per_rb(&self, sinr: f64, tti_s: f64) -> f64 {
        self.efficiency_at(sinr) * RB_BANDWIDTH_HZ * tti_s
    }
}

/// Bits per resource block per 1 ms TTI at linear SINR `sinr`.
pub fn sinr_to_rate(sinr: f64, table: &RateTable) -> f64 {
    table.bits_per_rb(sinr, 1e-3)
}
