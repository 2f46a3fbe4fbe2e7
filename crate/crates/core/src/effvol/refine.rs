use serde::{Deserialize, Serialize};

use super::lightcone::{backward_lightcone, prune_to_lightcone};
use crate::circuits::{Circuit, PauliString};
use crate::statevector::StateVector;
use crate::{MemoryBudget, Result};

/// Result of greedy effective-volume refinement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinedVolume {
    /// Two-qubit gates that could not be removed.
    pub volume: usize,
    /// Two-qubit gates in the light cone (the unrefined bound).
    pub cone_volume: usize,
    /// Removed op indices, relative to the original circuit.
    pub removed: Vec<usize>,
    pub evaluations: usize,
    /// True when the evaluation budget ran out before every gate was tested;
    /// `volume` is then only an upper bound.
    pub budget_exhausted: bool,
}

/// Greedily removes two-qubit gates whose removal keeps `⟨obs⟩` within
/// `delta` of its exact value.
///
/// Gates are visited from the latest layer backward; a removed gate stays
/// removed. Each test is a full re-simulation of the pruned circuit, so the
/// pruned cone must fit in `memory`. At most `max_evaluations` simulations
/// are run.
pub fn refine_effective_volume(
    circuit: &Circuit,
    obs: &PauliString,
    delta: f64,
    max_evaluations: usize,
    memory: MemoryBudget,
) -> Result<RefinedVolume> {
    let cone = backward_lightcone(circuit, obs)?;
    let pruned = prune_to_lightcone(circuit, &cone)?;
    let original_ids: Vec<usize> = cone.gate_ids.iter().copied().collect();
    let labels = pruned.graph().nodes().to_vec();
    let ops = pruned.ops();

    let mut state = StateVector::<f64>::zero_state(&labels, memory)?;
    let evaluate = |keep: &[bool], state: &mut StateVector<f64>| -> Result<f64> {
        *state = StateVector::zero_state(&labels, memory)?;
        let kept: Vec<_> = ops.iter().zip(keep).filter(|(_, &k)| k).map(|(op, _)| op.clone()).collect();
        state.apply_fused(&kept)?;
        state.expectation(obs)
    };
    let mut keep = vec![true; ops.len()];
    let reference = evaluate(&keep, &mut state)?;
    let mut evaluations = 1;
    let mut removed = Vec::new();
    let mut budget_exhausted = false;
    for i in (0..ops.len()).rev() {
        if ops[i].kind.arity() != 2 {
            continue;
        }
        if evaluations >= max_evaluations {
            budget_exhausted = true;
            break;
        }
        keep[i] = false;
        let value = evaluate(&keep, &mut state)?;
        evaluations += 1;
        if (value - reference).abs() < delta {
            removed.push(original_ids[i]);
        } else {
            keep[i] = true;
        }
    }
    removed.reverse();
    Ok(RefinedVolume {
        volume: cone.two_qubit_gates - removed.len(),
        cone_volume: cone.two_qubit_gates,
        removed,
        evaluations,
        budget_exhausted,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::circuits::{build_floquet, DeviceGraph};

    #[test]
    fn diagonal_circuit_has_zero_volume() {
        let g = Arc::new(DeviceGraph::grid(2, 3).unwrap());
        let c = build_floquet(g, 3, 0.0);
        let r = refine_effective_volume(&c, &"Z1".parse().unwrap(), 1e-6, 1000, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(r.volume, 0);
        assert!(r.cone_volume > 0);
        assert!(!r.budget_exhausted);
    }

    #[test]
    fn refinement_never_exceeds_cone() {
        let g = Arc::new(DeviceGraph::chain(6).unwrap());
        let c = build_floquet(g, 4, 0.9);
        let r = refine_effective_volume(&c, &"Z2".parse().unwrap(), 1e-3, 1000, MemoryBudget::DEFAULT).unwrap();
        assert!(r.volume <= r.cone_volume);
        assert!(r.volume > 0);
        let cut = refine_effective_volume(&c, &"Z2".parse().unwrap(), 1e-3, 3, MemoryBudget::DEFAULT).unwrap();
        assert!(cut.budget_exhausted);
        assert!(cut.volume >= r.volume);
    }

    #[test]
    fn zero_steps() {
        let g = Arc::new(DeviceGraph::chain(2).unwrap());
        let c = build_floquet(g, 0, 0.9);
        let r = refine_effective_volume(&c, &"Z0".parse().unwrap(), 1e-3, 10, MemoryBudget::DEFAULT).unwrap();
        assert_eq!(r.volume, 0);
    }
}
