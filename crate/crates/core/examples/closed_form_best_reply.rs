//! Continuous best reply against interference next to a grid search.

use bps_core::analysis::{
    best_reply_derivative, closed_form_best_reply, grid_best_reply, payoff_along_best_reply, price_bound,
    ContinuousGameParams,
};

fn main() {
    let mut p = ContinuousGameParams {
        alpha: 1.0,
        beta: 1.0,
        a: 1.0,
        noise_w: 0.1,
        xi: 0.0,
        s_max: 5.0,
    };
    p.xi = 0.5 * price_bound(0.0, &p);
    println!("interference,closed_form,grid,slope,utility,payoff");
    for k in 0..=10 {
        let i = 0.0095 * k as f64;
        let cf = closed_form_best_reply(i, &p);
        let grid = grid_best_reply(i, &p, 100_000);
        let slope = best_reply_derivative(i, &p).unwrap_or(f64::NAN);
        let (u, w) = payoff_along_best_reply(i, &p).unwrap_or((f64::NAN, f64::NAN));
        println!("{i:.4},{:.5},{grid:.5},{slope:.4},{u:.4},{w:.4}", cf.global_watts);
    }
}
