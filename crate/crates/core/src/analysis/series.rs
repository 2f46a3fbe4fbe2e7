use std::sync::Arc;

use crate::circuits::{build_floquet, DeviceGraph, PauliString};
use crate::statevector::{Precision, StateVector};
use crate::{MemoryBudget, Result};

/// `⟨obs⟩` after each of `0..=steps` Floquet steps at `theta_h`, from one
/// dense simulation over every qubit of `graph`.
pub fn floquet_series(
    graph: Arc<DeviceGraph>,
    obs: &PauliString,
    theta_h: f64,
    steps: usize,
    precision: Precision,
    budget: MemoryBudget,
) -> Result<Vec<(f64, f64)>> {
    let step = build_floquet(graph.clone(), 1, theta_h);
    match precision {
        Precision::F64 => run::<f64>(graph.nodes(), &step, obs, steps, budget),
        Precision::F32 => run::<f32>(graph.nodes(), &step, obs, steps, budget),
    }
}

fn run<T: crate::statevector::Real>(
    labels: &[u32],
    step: &crate::circuits::Circuit,
    obs: &PauliString,
    steps: usize,
    budget: MemoryBudget,
) -> Result<Vec<(f64, f64)>> {
    let mut state = StateVector::<T>::zero_state(labels, budget)?;
    let mut out = vec![(0.0, state.expectation(obs)?)];
    for t in 1..=steps {
        state.apply(step)?;
        out.push((t as f64, state.expectation(obs)?));
    }
    Ok(out)
}
