//! Complex special functions: log Γ and Kummer's 1F1.

mod dd;
mod gamma;
mod hyp1f1;

pub use gamma::log_gamma;
pub use hyp1f1::{
    hyp1f1, hyp1f1_asymptotic, hyp1f1_asymptotic_optimal, hyp1f1_series, hyp1f1_with,
    AsymptoticTruncation, Hyp1F1Config, Hyp1F1Params, ASYMPTOTIC_MIN_RADIUS,
    DEFAULT_ASYMPTOTIC_ORDER, DEFAULT_SERIES_TOL, SERIES_SWITCH_RADIUS, SERIES_TERM_CAP,
};
