use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default smallest effective fidelity accepted by [`mitigate`].
pub const MITIGATION_FLOOR: f64 = 1e-6;

/// Error rate per two-qubit gate and effective gate count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityModel {
    pub epsilon: f64,
    pub v_eff: f64,
}

impl FidelityModel {
    pub fn new(epsilon: f64, v_eff: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::validation(format!("epsilon must be non-negative, got {epsilon}")));
        }
        if !(v_eff >= 0.0 && v_eff.is_finite()) {
            return Err(Error::validation(format!("V_eff must be non-negative, got {v_eff}")));
        }
        Ok(FidelityModel { epsilon, v_eff })
    }
}

/// `F_eff = exp(-ε·V_eff)`.
pub fn effective_fidelity(model: &FidelityModel) -> f64 {
    (-model.epsilon * model.v_eff).exp()
}

/// `raw / F_eff`, refusing fidelities at or below [`MITIGATION_FLOOR`].
pub fn mitigate(raw: f64, f_eff: f64) -> Result<f64> {
    mitigate_with_floor(raw, f_eff, MITIGATION_FLOOR)
}

pub fn mitigate_with_floor(raw: f64, f_eff: f64, floor: f64) -> Result<f64> {
    if !(f_eff > 0.0) || f_eff < floor {
        return Err(Error::validation(format!(
            "effective fidelity {f_eff} is below the mitigation floor {floor}"
        )));
    }
    Ok(raw / f_eff)
}

/// Effective volume inferred from an unmitigated/mitigated ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub rounded: u64,
    pub raw: f64,
}

/// `ln(1/ratio)/ε`.
pub fn veff_from_ratio(ratio: f64, epsilon: f64) -> Result<VolumeEstimate> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::validation(format!("ratio must lie in (0, 1], got {ratio}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::validation(format!("epsilon must be positive, got {epsilon}")));
    }
    let raw = (1.0 / ratio).ln() / epsilon;
    Ok(VolumeEstimate { rounded: raw.round() as u64, raw })
}

/// Largest volume whose signal `|⟨O⟩|·e^{-εV}` still exceeds the statistical
/// error `δ`: `(1/ε)·ln(|⟨O⟩|/δ)`.
pub fn max_feasible_volume(epsilon: f64, ideal_magnitude: f64, delta: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::validation(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta > 0.0) {
        return Err(Error::validation(format!("delta must be positive, got {delta}")));
    }
    if delta >= ideal_magnitude.abs() {
        return Err(Error::validation(format!(
            "delta {delta} is not below the ideal magnitude {}: the observable is unmeasurable",
            ideal_magnitude.abs()
        )));
    }
    Ok((ideal_magnitude.abs() / delta).ln() / epsilon)
}

/// Lower bound on MPS bond dimension, `χ ≥ F / ⟨Tr ρ_A²⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiBound {
    pub chi: f64,
    pub log2: f64,
}

pub fn chi_lower_bound(fidelity: f64, mean_purity: f64) -> Result<ChiBound> {
    if !(fidelity > 0.0 && fidelity <= 1.0) {
        return Err(Error::validation(format!("fidelity must lie in (0, 1], got {fidelity}")));
    }
    if !(mean_purity > 0.0 && mean_purity <= 1.0) {
        return Err(Error::validation(format!("purity must lie in (0, 1], got {mean_purity}")));
    }
    let chi = fidelity / mean_purity;
    Ok(ChiBound { chi, log2: chi.log2() })
}
