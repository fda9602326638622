//! Exact q-expansion engine and certified complex evaluation for eta, E2,
//! E2*, E4, E6, F, j, and the level-6 Hauptmodul.

pub mod eval;
pub mod hauptmodul;
pub mod series;
pub mod standard;

pub use eval::{eval_e2_star, eval_f, eval_p, evaluate, exp_2pi_i, im_lower_bound, EvalContext};
pub use hauptmodul::{j_in_t6, select_hauptmodul, t6_series};
pub use series::QSeries;
pub use standard::{
    delta_series, e2_scaled, e2_series, e4_series, e6_series, eta_series, f_derivative_series,
    f_series, j_series,
};
