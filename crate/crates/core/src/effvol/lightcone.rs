use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuits::{Circuit, Label, PauliString};
use crate::{Error, Result};

/// Backward causal cone of an observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightCone {
    pub observable: PauliString,
    /// Frontier at each step boundary, from measurement time back to `t = 0`.
    /// Steps are Floquet steps when the circuit records `layers_per_step`,
    /// otherwise single layers.
    pub frontiers: Vec<BTreeSet<Label>>,
    /// Indices of the circuit ops inside the cone.
    pub gate_ids: BTreeSet<usize>,
    /// Number of two-qubit gates inside the cone.
    pub two_qubit_gates: usize,
    /// Fingerprint of the circuit the cone was computed from.
    pub circuit_fingerprint: u64,
}

impl LightCone {
    /// Qubits the cone reaches at `t = 0`.
    pub fn qubits(&self) -> &BTreeSet<Label> {
        self.frontiers.last().expect("at least the measurement frontier")
    }

    /// Frontier sizes from measurement time back to `t = 0`.
    pub fn sizes(&self) -> Vec<usize> {
        self.frontiers.iter().map(BTreeSet::len).collect()
    }
}

/// Exact backward light cone.
///
/// Ops are swept from last to first. A non-diagonal gate joins the cone when
/// it touches the current frontier, and its qubits join the frontier. Runs of
/// consecutive diagonal gates commute with each other, so inside such a run
/// a gate joins only if it touches the frontier as it stood when the sweep
/// reached the run; gates that miss it cancel against their inverses.
pub fn backward_lightcone(circuit: &Circuit, obs: &PauliString) -> Result<LightCone> {
    obs.require_nonempty()?;
    for q in obs.support() {
        if !circuit.graph().contains(q) {
            return Err(Error::validation(format!("observable qubit {q} not in circuit device")));
        }
    }
    let ops = circuit.ops();
    let step_of = |layer: usize| match circuit.meta().layers_per_step {
        Some(lps) if lps > 0 => layer / lps,
        _ => layer,
    };
    let mut frontier: BTreeSet<Label> = obs.support().into_iter().collect();
    let mut frontiers = vec![frontier.clone()];
    let mut gate_ids = BTreeSet::new();
    let mut two_qubit_gates = 0;
    let mut current_step = ops.last().map(|op| step_of(op.layer));

    let mut end = ops.len();
    while end > 0 {
        let diagonal_run = ops[end - 1].kind.is_diagonal();
        let start = if diagonal_run {
            end - ops[..end].iter().rev().take_while(|op| op.kind.is_diagonal()).count()
        } else {
            end - 1
        };
        // Record frontiers at every step boundary crossed by this block.
        for op in ops[start..end].iter().rev() {
            let s = step_of(op.layer);
            while let Some(cs) = current_step.filter(|&cs| cs > s) {
                frontiers.push(frontier.clone());
                current_step = Some(cs - 1);
            }
        }
        let snapshot = frontier.clone();
        for i in (start..end).rev() {
            let op = &ops[i];
            let reference = if diagonal_run { &snapshot } else { &frontier };
            if op.qubits.iter().any(|q| reference.contains(q)) {
                gate_ids.insert(i);
                two_qubit_gates += (op.kind.arity() == 2) as usize;
                frontier.extend(op.qubits.iter().copied());
            }
        }
        end = start;
    }
    if let Some(cs) = current_step {
        for _ in 0..=cs {
            frontiers.push(frontier.clone());
        }
    }
    Ok(LightCone {
        observable: obs.clone(),
        frontiers,
        gate_ids,
        two_qubit_gates,
        circuit_fingerprint: circuit.fingerprint(),
    })
}

/// Keeps exactly the cone's gates, on the induced subgraph of its qubits.
pub fn prune_to_lightcone(circuit: &Circuit, cone: &LightCone) -> Result<Circuit> {
    if circuit.fingerprint() != cone.circuit_fingerprint {
        return Err(Error::validation("stale light cone: circuit fingerprint differs"));
    }
    let qubits: Vec<Label> = cone.qubits().iter().copied().collect();
    circuit.sub_circuit(&cone.gate_ids, &qubits)
}

/// Upper bound on the effective volume: two-qubit gates inside the cone.
pub fn effective_volume(cone: &LightCone) -> usize {
    cone.two_qubit_gates
}
