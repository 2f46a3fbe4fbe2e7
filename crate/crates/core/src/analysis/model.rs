use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Lattice geometry of the ballistic-spreading model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    #[default]
    Square2d,
    Chain1d,
}

impl FromStr for Geometry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "square_2d" | "2d" => Ok(Geometry::Square2d),
            "chain_1d" | "1d" => Ok(Geometry::Chain1d),
            other => Err(Error::validation(format!("unknown geometry '{other}'"))),
        }
    }
}

/// Chaotic dynamics with ballistic operator spreading.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChaoticModel {
    /// Butterfly velocity in sites per step.
    pub v: f64,
    /// Error per entangling gate.
    pub epsilon: f64,
    /// Target precision.
    pub delta: f64,
    pub geometry: Geometry,
}

impl ChaoticModel {
    pub fn new(v: f64, epsilon: f64, delta: f64, geometry: Geometry) -> Result<Self> {
        let m = ChaoticModel { v, epsilon, delta, geometry };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::validation(format!("velocity must be positive, got {}", self.v)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::validation(format!("epsilon must be non-negative, got {}", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::validation(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        Ok(())
    }
}

/// Order-of-magnitude decay of a local observable: `2^{-(π/2)(vt)²}` on a
/// square lattice, `2^{-vt}` on a chain.
pub fn predict_observable_decay(model: &ChaoticModel, t: f64) -> f64 {
    let vt = model.v * t;
    match model.geometry {
        Geometry::Square2d => (-FRAC_PI_2 * vt * vt).exp2(),
        Geometry::Chain1d => (-vt).exp2(),
    }
}

/// Regime that governs a feasible-depth solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TDeltaBranch {
    /// Numerical root of the full cubic.
    ExactRoot,
    /// `ε = 0`: `t = (1/v)·sqrt((2/π) ln(1/δ))`.
    ZeroErrorFormula,
    /// `ln(1/δ) ≫ v²/ε²`: `t = ((3/(π ε v²)) ln(1/δ))^{1/3}`. The reported
    /// depth is still the exact root.
    LargeErrorAsymptote,
}

/// Largest feasible depth and its closed-form limits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TDelta {
    pub t_delta: f64,
    pub branch: TDeltaBranch,
    /// `|lhs - rhs|` of the defining equation at `t_delta`.
    pub residual: f64,
    pub zero_error_limit: f64,
    /// `None` when `ε = 0`.
    pub large_error_limit: Option<f64>,
}

/// `ln(1/δ) / (v²/ε²)` above which the large-error asymptote is reported.
pub const LARGE_ERROR_RATIO: f64 = 100.0;

/// Solves `ε(π/3)v²t³ + (π/2)(vt)² = ln(1/δ)` for `t > 0`.
///
/// The left side increases on `t > 0`, so bisection on `[0, T]`, with `T`
/// doubled until it brackets the root, converges to the unique root.
pub fn solve_t_delta(model: &ChaoticModel) -> Result<TDelta> {
    model.validate()?;
    let (v, eps) = (model.v, model.epsilon);
    let target = (1.0 / model.delta).ln();
    let lhs = |t: f64| eps * PI / 3.0 * v * v * t.powi(3) + FRAC_PI_2 * (v * t).powi(2);
    let zero_error_limit = (2.0 / PI * target).sqrt() / v;
    let large_error_limit = (eps > 0.0).then(|| (3.0 / (PI * eps * v * v) * target).cbrt());

    let (t_delta, branch) = if eps == 0.0 {
        (zero_error_limit, TDeltaBranch::ZeroErrorFormula)
    } else {
        let mut hi = zero_error_limit.min(large_error_limit.unwrap_or(f64::INFINITY)).max(f64::MIN_POSITIVE);
        while lhs(hi) < target {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if lhs(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        let root = 0.5 * (lo + hi);
        let branch = if target * eps * eps >= LARGE_ERROR_RATIO * v * v {
            TDeltaBranch::LargeErrorAsymptote
        } else {
            TDeltaBranch::ExactRoot
        };
        (root, branch)
    };
    let residual = (lhs(t_delta) - target).abs();
    Ok(TDelta { t_delta, branch, residual, zero_error_limit, large_error_limit })
}

/// Order-of-magnitude size estimates at depth `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPrediction {
    pub v_eff: f64,
    pub a_eff: f64,
    /// `2β·A_eff`; equals `2β(vt)²` before saturation on a square lattice.
    pub cost_log2: f64,
}

/// Effective volume, effective area and contraction-cost exponent of a
/// ballistically spreading observable on `n` qubits.
pub fn scaling_predictors(v_b: f64, t: f64, n: f64, geometry: Geometry, beta: f64) -> ScalingPrediction {
    let vt = v_b * t;
    let a_eff = match geometry {
        Geometry::Square2d => (vt * vt).min(n),
        Geometry::Chain1d => (2.0 * vt).min(n),
    };
    ScalingPrediction { v_eff: a_eff * t, a_eff, cost_log2: 2.0 * beta * a_eff }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(v: f64, epsilon: f64, delta: f64) -> ChaoticModel {
        ChaoticModel::new(v, epsilon, delta, Geometry::Square2d).unwrap()
    }

    #[test]
    fn decay_closed_forms() {
        let m = model(1.0, 0.0, 0.5);
        assert_eq!(predict_observable_decay(&m, 0.0), 1.0);
        assert!((predict_observable_decay(&m, 2.0) - (-2.0 * PI).exp2()).abs() < 1e-15);
        let chain = ChaoticModel { geometry: Geometry::Chain1d, ..m };
        assert_eq!(predict_observable_decay(&chain, 0.0), 1.0);
        assert_eq!(predict_observable_decay(&chain, 10.0), 2f64.powi(-10));
    }

    #[test]
    fn zero_error_root() {
        let r = solve_t_delta(&model(1.0, 0.0, (-FRAC_PI_2).exp())).unwrap();
        assert_eq!(r.branch, TDeltaBranch::ZeroErrorFormula);
        assert!((r.t_delta - 1.0).abs() < 1e-12);
        assert!(r.residual < 1e-9);
        assert!(r.large_error_limit.is_none());
    }

    #[test]
    fn large_error_asymptote() {
        let r = solve_t_delta(&model(1.0, 10.0, (-700.0f64).exp())).unwrap();
        assert_eq!(r.branch, TDeltaBranch::LargeErrorAsymptote);
        let asym = (3.0 * 700.0 / (PI * 10.0)).cbrt();
        assert!((r.t_delta / asym - 1.0).abs() < 0.05);
        assert!(r.residual < 1e-9);
    }

    #[test]
    fn delta_near_one() {
        let r = solve_t_delta(&model(1.0, 0.1, 1.0 - 1e-9)).unwrap();
        assert!(r.t_delta < 1e-4);
        assert!(ChaoticModel::new(1.0, 0.1, 1.0, Geometry::Square2d).is_err());
    }

    #[test]
    fn predictor_branches() {
        let p = scaling_predictors(1.0, 3.0, 1000.0, Geometry::Square2d, 1.0);
        assert_eq!(p.cost_log2, 18.0);
        assert_eq!(p.a_eff, 9.0);
        assert_eq!(p.v_eff, 27.0);
        let big = scaling_predictors(1.0, 100.0, 1000.0, Geometry::Square2d, 1.0);
        assert_eq!(big.a_eff, 1000.0);
        assert_eq!(big.v_eff, 1000.0 * 100.0);
        let chain = scaling_predictors(0.5, 4.0, 100.0, Geometry::Chain1d, 1.0);
        assert_eq!(chain.a_eff, 4.0);
        // Continuous at the crossover (v t)² = n.
        let below = scaling_predictors(1.0, 10.0 - 1e-9, 100.0, Geometry::Square2d, 1.0);
        let above = scaling_predictors(1.0, 10.0 + 1e-9, 100.0, Geometry::Square2d, 1.0);
        assert!((below.v_eff - above.v_eff).abs() < 1e-6 && (below.a_eff - above.a_eff).abs() < 1e-6);
    }
}
