use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::network::{TensorNetwork, TensorRole};
use crate::{Error, Result};

/// Pairwise merge tree over the tensors of a network.
///
/// Leaves are tensor ids `0..n_tensors`; merge `k` creates id `n_tensors + k`
/// from two earlier ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionPlan {
    pub n_tensors: usize,
    pub merges: Vec<(usize, usize)>,
    /// Total scalar multiplications.
    pub mults: f64,
    /// Largest rank of any intermediate tensor.
    pub peak_rank: usize,
}

impl ContractionPlan {
    /// `log2` of the multiplication count; `-inf` for a plan without merges.
    pub fn cost_log2(&self) -> f64 {
        self.mults.log2()
    }

    /// The merge tree as nested pairs, e.g. `[[0, 1], 2]`.
    pub fn nested(&self) -> serde_json::Value {
        let mut nodes: Vec<Option<serde_json::Value>> = (0..self.n_tensors).map(|i| Some(i.into())).collect();
        for &(a, b) in &self.merges {
            let l = nodes[a].take().unwrap_or(serde_json::Value::Null);
            let r = nodes[b].take().unwrap_or(serde_json::Value::Null);
            nodes.push(Some(serde_json::Value::Array(vec![l, r])));
        }
        nodes.pop().flatten().unwrap_or(serde_json::Value::Null)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let n = self.n_tensors;
        let expected = n.saturating_sub(1);
        if self.merges.len() != expected {
            return Err(Error::validation(format!(
                "plan has {} merges, a full tree over {n} tensors needs {expected}",
                self.merges.len()
            )));
        }
        let mut used = vec![false; n + self.merges.len()];
        for (k, &(a, b)) in self.merges.iter().enumerate() {
            for id in [a, b] {
                if a == b || id >= n + k || std::mem::replace(&mut used[id], true) {
                    return Err(Error::validation(format!("merge {k} ({a}, {b}) is not a valid tree step")));
                }
            }
        }
        Ok(())
    }
}

/// Index set of every tensor as a bitset over the network's indices.
pub(crate) fn index_sets(network: &TensorNetwork) -> Vec<FixedBitSet> {
    network
        .tensors()
        .iter()
        .map(|t| {
            let mut s = FixedBitSet::with_capacity(network.n_indices());
            for &i in &t.indices {
                s.insert(i as usize);
            }
            s
        })
        .collect()
}

/// True for a leaf that projects a wire on a basis value. Merging it (or a
/// product of such leaves) only selects a slice of its partner and costs no
/// multiplications.
pub(crate) fn is_slice(network: &TensorNetwork, id: usize) -> bool {
    network.tensors().get(id).is_some_and(|t| matches!(t.role, TensorRole::Input(_) | TensorRole::Output(_)))
}

/// Multiplications of merging two nodes: `2^|A ∪ B|`, or zero for a slice.
#[inline]
pub(crate) fn pair_cost(slice_a: bool, slice_b: bool, sa: &FixedBitSet, sb: &FixedBitSet) -> f64 {
    if slice_a || slice_b {
        0.0
    } else {
        merge_cost(sa, sb)
    }
}

/// Multiplications of one pairwise merge: `2^|A ∪ B|`.
#[inline]
pub(crate) fn merge_cost(a: &FixedBitSet, b: &FixedBitSet) -> f64 {
    (a.union_count(b) as f64).exp2()
}

/// Index set of a merge result: indices shared by the operands are summed.
pub(crate) fn merged(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut c = a.clone();
    c.symmetric_difference_with(b);
    c
}

/// Replays a plan and returns `(multiplications, peak rank)`.
pub(crate) fn replay(network: &TensorNetwork, merges: &[(usize, usize)]) -> (f64, usize) {
    let mut sets: Vec<Option<FixedBitSet>> = index_sets(network).into_iter().map(Some).collect();
    let mut slice: Vec<bool> = (0..network.len()).map(|i| is_slice(network, i)).collect();
    let mut mults = 0.0;
    let mut peak = 0;
    for &(a, b) in merges {
        let (sa, sb) = (sets[a].take().expect("valid plan"), sets[b].take().expect("valid plan"));
        mults += pair_cost(slice[a], slice[b], &sa, &sb);
        slice.push(slice[a] && slice[b]);
        let c = merged(&sa, &sb);
        peak = peak.max(c.count_ones(..));
        sets.push(Some(c));
    }
    (mults, peak)
}

/// Recomputes `(log2 multiplications, peak rank)` of a plan on `network`.
///
/// A merge costs `2^|A ∪ B|` multiplications; merging a basis projection
/// is a slice and costs nothing.
pub fn contraction_cost(network: &TensorNetwork, plan: &ContractionPlan) -> Result<(f64, usize)> {
    if plan.n_tensors != network.len() {
        return Err(Error::validation(format!(
            "plan covers {} tensors, network has {}",
            plan.n_tensors,
            network.len()
        )));
    }
    plan.validate()?;
    let (mults, peak) = replay(network, &plan.merges);
    Ok((mults.log2(), peak))
}

pub(crate) fn make_plan(network: &TensorNetwork, merges: Vec<(usize, usize)>) -> ContractionPlan {
    let (mults, peak_rank) = replay(network, &merges);
    ContractionPlan { n_tensors: network.len(), merges, mults, peak_rank }
}
