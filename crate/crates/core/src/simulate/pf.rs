/// A download competing for resource blocks in one TTI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfUser {
    /// Bits one RB would carry for this user now.
    pub bits_per_rb: f64,
    /// Smoothed served rate in bits per TTI.
    pub mean_rate: f64,
    /// Bits still owed; the user stops competing once covered.
    pub remaining_bits: f64,
}

/// PF history time constant in TTIs.
pub const PF_TIME_CONSTANT: f64 = 100.0;
pub const PF_EPSILON: f64 = 1e-9;

/// Assigns `rbs` resource blocks one at a time to the user with the highest
/// `rate / max(eps, mean + granted / Tc)`. Users with zero rate or nothing
/// left to receive get nothing; ties go to the lower index.
pub fn pf_schedule(users: &[PfUser], rbs: u32) -> Vec<u32> {
    let mut grant = vec![0u32; users.len()];
    let mut granted_bits = vec![0.0; users.len()];
    for _ in 0..rbs {
        let mut best: Option<(usize, f64)> = None;
        for (i, u) in users.iter().enumerate() {
            if u.bits_per_rb <= 0.0 || granted_bits[i] >= u.remaining_bits {
                continue;
            }
            let metric = u.bits_per_rb / (u.mean_rate + granted_bits[i] / PF_TIME_CONSTANT).max(PF_EPSILON);
            if best.is_none_or(|(_, m)| metric > m) {
                best = Some((i, metric));
            }
        }
        let Some((i, _)) = best else { break };
        grant[i] += 1;
        granted_bits[i] += users[i].bits_per_rb;
    }
    grant
}
