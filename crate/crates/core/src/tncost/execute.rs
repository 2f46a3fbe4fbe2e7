use serde::{Deserialize, Serialize};

use super::network::{Tensor, TensorNetwork, TensorRole};
use super::plan::ContractionPlan;
use crate::circuits::{Label, C64};
use crate::{Error, MemoryBudget, Result};

/// Result of a full contraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contracted {
    /// Open output qubits, ascending. Empty for a closed network.
    pub open_qubits: Vec<Label>,
    /// Amplitudes over the open outputs; bit `k` of the position is the
    /// value of `open_qubits[k]`. A single entry for a closed network.
    pub values: Vec<C64>,
}

impl Contracted {
    /// The scalar of a closed contraction.
    pub fn scalar(&self) -> Option<C64> {
        self.open_qubits.is_empty().then(|| self.values[0])
    }
}

fn contract(a: &Tensor, b: &Tensor) -> Tensor {
    let mut union: Vec<u32> = a.indices.iter().chain(&b.indices).copied().collect();
    union.sort_unstable();
    union.dedup();
    let indices: Vec<u32> = union.iter().copied().filter(|i| a.indices.contains(i) != b.indices.contains(i)).collect();
    let bit_in = |list: &[u32], i: u32| list.iter().position(|&x| x == i).map_or(0, |k| 1usize << k);
    let (ma, mb, mr): (Vec<usize>, Vec<usize>, Vec<usize>) = (
        union.iter().map(|&i| bit_in(&a.indices, i)).collect(),
        union.iter().map(|&i| bit_in(&b.indices, i)).collect(),
        union.iter().map(|&i| bit_in(&indices, i)).collect(),
    );
    let mut data = vec![C64::new(0.0, 0.0); 1 << indices.len()];
    for u in 0..1usize << union.len() {
        let (mut ia, mut ib, mut ir) = (0, 0, 0);
        for p in 0..union.len() {
            if (u >> p) & 1 == 1 {
                ia |= ma[p];
                ib |= mb[p];
                ir |= mr[p];
            }
        }
        data[ir] += a.data[ia] * b.data[ib];
    }
    Tensor { indices, data, role: TensorRole::Gate(usize::MAX) }
}

/// Contracts `network` numerically following `plan`.
///
/// Fails with a resource error before allocating any intermediate larger
/// than `budget`.
pub fn execute_plan(network: &TensorNetwork, plan: &ContractionPlan, budget: MemoryBudget) -> Result<Contracted> {
    if plan.n_tensors != network.len() {
        return Err(Error::validation(format!(
            "plan covers {} tensors, network has {}",
            plan.n_tensors,
            network.len()
        )));
    }
    plan.validate()?;
    let open_qubits = network.open_qubits();
    if network.is_empty() {
        return Ok(Contracted { open_qubits, values: vec![C64::new(1.0, 0.0)] });
    }
    let mut live: Vec<Option<Tensor>> = network.tensors().iter().cloned().map(Some).collect();
    for &(a, b) in &plan.merges {
        let (ta, tb) = (live[a].take().expect("valid plan"), live[b].take().expect("valid plan"));
        let rank = ta.indices.iter().filter(|i| !tb.indices.contains(i)).count()
            + tb.indices.iter().filter(|i| !ta.indices.contains(i)).count();
        budget.check(format!("rank-{rank} intermediate tensor"), (std::mem::size_of::<C64>() as u128) << rank)?;
        live.push(Some(contract(&ta, &tb)));
    }
    let last = live.pop().flatten().expect("full tree has a root");
    let mut values = vec![C64::new(0.0, 0.0); last.data.len()];
    let positions: Vec<usize> = network
        .open
        .iter()
        .map(|&(_, idx)| last.indices.iter().position(|&i| i == idx).expect("open index survives"))
        .collect();
    for (off, v) in last.data.iter().enumerate() {
        let target = positions.iter().enumerate().fold(0, |acc, (k, &p)| acc | (((off >> p) & 1) << k));
        values[target] = *v;
    }
    Ok(Contracted { open_qubits, values })
}
