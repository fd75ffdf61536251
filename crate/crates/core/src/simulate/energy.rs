use crate::scenario::PoaKind;

/// Linear load-dependent power draw per location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    pub macro_static_w: f64,
    pub macro_slope: f64,
    pub micro_static_w: f64,
    pub micro_slope: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            macro_static_w: 130.0,
            macro_slope: 4.7,
            micro_static_w: 6.8,
            micro_slope: 4.0,
        }
    }
}

impl EnergyModel {
    /// Joules drawn over `duration_s` while radiating `radiated_w` in total
    /// over all carriers.
    pub fn energy_consumed(&self, kind: PoaKind, radiated_w: f64, duration_s: f64) -> f64 {
        let (p0, dp) = match kind {
            PoaKind::Macro => (self.macro_static_w, self.macro_slope),
            PoaKind::Micro => (self.micro_static_w, self.micro_slope),
        };
        (p0 + dp * radiated_w) * duration_s
    }
}
