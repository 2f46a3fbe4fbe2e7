use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::StateVector;
use crate::circuits::{Circuit, GateKind, GateOp, Pauli, PauliString};
use crate::{Error, MemoryBudget, Result};

/// Per-two-qubit-gate Pauli error model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub epsilon: f64,
    pub seed: u64,
    pub shots: usize,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::validation(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if self.shots == 0 {
            return Err(Error::validation("shots must be at least 1"));
        }
        Ok(())
    }
}

/// Trajectory average of a noisy expectation value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Noiseless value of the same observable.
    pub ideal: f64,
    pub shots: usize,
}

/// The 15 non-identity two-qubit Paulis.
fn two_qubit_paulis() -> [(Pauli, Pauli); 15] {
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    std::array::from_fn(|k| (all[(k + 1) / 4], all[(k + 1) % 4]))
}

/// Errors of one trajectory: `(two-qubit gate ordinal, Pauli pair)`.
fn sample_errors(noise: &NoiseSpec, trajectory: u64, n_gates: usize) -> Vec<(usize, (Pauli, Pauli))> {
    let table = two_qubit_paulis();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    rng.set_stream(trajectory);
    let mut out = Vec::new();
    for g in 0..n_gates {
        if rng.gen::<f64>() < noise.epsilon {
            out.push((g, table[rng.gen_range(0..15)]));
        }
    }
    out
}

/// Monte-Carlo Pauli-noise estimate of `⟨obs⟩` after `circuit` on `|0…0⟩`.
///
/// Each trajectory inserts, after every two-qubit gate and with probability
/// `ε`, a uniformly random non-identity two-qubit Pauli on that gate's
/// qubits. Trajectories are seeded by `(seed, index)`. The mean is formed as
/// the ideal value plus the mean deviation, so error-free trajectories
/// contribute exactly zero deviation.
pub fn noisy_expectation(
    circuit: &Circuit,
    obs: &PauliString,
    noise: &NoiseSpec,
    budget: MemoryBudget,
) -> Result<NoisyEstimate> {
    noise.validate()?;
    let labels = circuit.graph().nodes();
    let ops = circuit.ops();
    let two_q: Vec<usize> = ops.iter().enumerate().filter(|(_, op)| op.kind.arity() == 2).map(|(i, _)| i).collect();

    let mut state = StateVector::<f64>::zero_state(labels, budget)?;
    let per_state = StateVector::<f64>::required_bytes(labels.len());
    // Ideal prefixes after each two-qubit gate, when they fit in half the budget.
    let keep_checkpoints = per_state.saturating_mul(two_q.len() as u128 + 2) <= budget.0 / 2;
    let mut checkpoints: Vec<StateVector<f64>> = Vec::new();
    let mut done = 0;
    for &g in &two_q {
        state.apply_ops(&ops[done..=g])?;
        done = g + 1;
        if keep_checkpoints {
            checkpoints.push(state.clone());
        }
    }
    state.apply_ops(&ops[done..])?;
    let ideal = state.expectation(obs)?;

    let run = |t: usize, buf: &mut StateVector<f64>| -> Result<f64> {
        let errors = sample_errors(noise, t as u64, two_q.len());
        let Some(&(first, _)) = errors.first() else { return Ok(0.0) };
        let mut pos = if keep_checkpoints {
            buf.copy_from(&checkpoints[first]);
            two_q[first] + 1
        } else {
            *buf = StateVector::zero_state(labels, budget)?;
            0
        };
        for &(g, (pa, pb)) in &errors {
            let at = two_q[g];
            buf.apply_ops(&ops[pos..=at])?;
            pos = at + 1;
            let q = &ops[at].qubits;
            buf.apply_op(&GateOp { kind: GateKind::Pauli(vec![pa, pb]), qubits: q.clone(), layer: ops[at].layer })?;
        }
        buf.apply_ops(&ops[pos..])?;
        Ok(buf.expectation(obs)? - ideal)
    };

    let deviations: Vec<f64> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..noise.shots)
                .into_par_iter()
                .map_init(|| state.clone(), |buf, t| run(t, buf))
                .collect::<Result<_>>()?
        }
        #[cfg(not(feature = "parallel"))]
        {
            let mut buf = state.clone();
            (0..noise.shots).map(|t| run(t, &mut buf)).collect::<Result<_>>()?
        }
    };
    let shots = noise.shots as f64;
    let mean_dev = deviations.iter().sum::<f64>() / shots;
    let var = if noise.shots > 1 {
        deviations.iter().map(|d| (d - mean_dev).powi(2)).sum::<f64>() / (shots - 1.0)
    } else {
        0.0
    };
    Ok(NoisyEstimate { mean: ideal + mean_dev, stderr: (var / shots).sqrt(), ideal, shots: noise.shots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_distinct_non_identity() {
        let t = two_qubit_paulis();
        let set: std::collections::BTreeSet<_> = t.iter().collect();
        assert_eq!(set.len(), 15);
        assert!(!set.contains(&(Pauli::I, Pauli::I)));
    }

    #[test]
    fn trajectories_are_seeded() {
        let spec = NoiseSpec { epsilon: 0.3, seed: 7, shots: 1 };
        assert_eq!(sample_errors(&spec, 4, 50), sample_errors(&spec, 4, 50));
        assert_ne!(sample_errors(&spec, 4, 50), sample_errors(&spec, 5, 50));
    }
}
