//! Independent checks of the game engine: the continuous single-tile best
//! reply, exhaustive Nash equilibrium enumeration, unilateral deviation
//! checks and strategic-substitutes sampling.

mod continuous;
mod deviation;
mod ne;
mod substitutes;

pub use continuous::{
    best_reply_derivative, closed_form_best_reply, discrete_best_reply, grid_best_reply, payoff_along_best_reply,
    price_bound, scalar_payoff, stationary_point, ClosedFormReply, ContinuousGameParams,
};
pub use deviation::{deviation_check, Deviation, DeviationScope};
pub use ne::{enumerate_pure_ne, profile_hash, NEReport, JOINT_PROFILE_LIMIT};
pub use substitutes::{check_strategic_substitutes, SubstitutesReport, SubstitutesViolation};
