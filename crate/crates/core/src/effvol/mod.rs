//! Light cones, pruning, effective volume and the effective-fidelity
//! arithmetic `F_eff = exp(-ε·V_eff)`.

mod fidelity;
mod lightcone;
mod refine;

pub use fidelity::{
    chi_lower_bound, effective_fidelity, max_feasible_volume, mitigate, mitigate_with_floor, veff_from_ratio,
    ChiBound, FidelityModel, VolumeEstimate, MITIGATION_FLOOR,
};
pub use lightcone::{backward_lightcone, effective_volume, prune_to_lightcone, LightCone};
pub use refine::{refine_effective_volume, RefinedVolume};
