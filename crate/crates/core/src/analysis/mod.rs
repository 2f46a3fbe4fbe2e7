//! Feasibility arithmetic for chaotic dynamics (decay depth, effective
//! volume and area scaling) and exponential fits of simulated decays.

mod fit;
mod model;
mod series;

pub(crate) use fit::linear_fit;
pub use fit::{fit_decay, steps_to_decay, DecayFit, FitOptions};
pub use model::{
    predict_observable_decay, scaling_predictors, solve_t_delta, ChaoticModel, Geometry, ScalingPrediction, TDelta,
    TDeltaBranch, LARGE_ERROR_RATIO,
};
pub use series::floquet_series;
