use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuits::{Circuit, GateMatrix, Label, PauliString, C64};
use crate::{Error, Result};

/// Treatment of the output end of each qubit wire.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputSpec {
    /// Every output projected on a basis value. An empty string means all
    /// zeros; otherwise character `k` is the value of the k-th smallest label.
    Closed(String),
    /// The listed outputs stay free; the rest are projected on `0`.
    Open(Vec<Label>),
    /// Every output stays free.
    #[default]
    OpenAll,
}

impl OutputSpec {
    pub fn closed_zeros() -> Self {
        OutputSpec::Closed(String::new())
    }

    /// Outputs on the observable's support stay free.
    pub fn open_on(obs: &PauliString) -> Self {
        OutputSpec::Open(obs.support())
    }
}

/// Representation choices for [`network_from_circuit_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkOptions {
    /// Represent each diagonal two-qubit gate `Σ_ab d(a,b)|ab⟩⟨ab|` as two
    /// rank-3 tensors joined by one bond (its operator-Schmidt form) instead
    /// of one rank-4 tensor.
    pub split_diagonal: bool,
}

/// What a tensor stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TensorRole {
    /// Gate `op` of the source circuit.
    Gate(usize),
    /// Projection of an input wire on a basis value.
    Input(Label),
    /// Projection of an output wire on a basis value.
    Output(Label),
}

/// Dense tensor with dimension-2 indices. Bit `k` of a data offset is the
/// value of `indices[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub indices: Vec<u32>,
    pub data: Vec<C64>,
    pub role: TensorRole,
}

impl Tensor {
    pub fn rank(&self) -> usize {
        self.indices.len()
    }
}

/// Tensor network of a circuit applied to `|0…0⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorNetwork {
    pub(crate) tensors: Vec<Tensor>,
    pub(crate) n_indices: usize,
    /// Free output indices, in ascending label order.
    pub(crate) open: Vec<(Label, u32)>,
    /// Creation order of the tensors that belong to each qubit wire.
    pub(crate) time_order: Vec<usize>,
}

impl TensorNetwork {
    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn n_indices(&self) -> usize {
        self.n_indices
    }

    /// Open output qubits, ascending.
    pub fn open_qubits(&self) -> Vec<Label> {
        self.open.iter().map(|&(q, _)| q).collect()
    }

    /// The same network with every output projection removed and its wire
    /// left open.
    pub(crate) fn relaxed(&self) -> Option<TensorNetwork> {
        let outputs: Vec<(Label, u32)> = self
            .tensors
            .iter()
            .filter_map(|t| match t.role {
                TensorRole::Output(q) => Some((q, t.indices[0])),
                _ => None,
            })
            .collect();
        if outputs.is_empty() {
            return None;
        }
        let keep: Vec<usize> = (0..self.tensors.len()).filter(|&i| !matches!(self.tensors[i].role, TensorRole::Output(_))).collect();
        let mut new_id = vec![usize::MAX; self.tensors.len()];
        for (k, &i) in keep.iter().enumerate() {
            new_id[i] = k;
        }
        let mut open = self.open.clone();
        open.extend(outputs);
        open.sort_unstable();
        let relaxed = TensorNetwork {
            tensors: keep.iter().map(|&i| self.tensors[i].clone()).collect(),
            n_indices: self.n_indices,
            open,
            time_order: self.time_order.iter().map(|&i| new_id[i]).filter(|&i| i != usize::MAX).collect(),
        };
        Some(relaxed)
    }

    /// Tensors ordered as a statevector simulation would consume them.
    pub(crate) fn time_order(&self) -> &[usize] {
        &self.time_order
    }
}

fn basis_vector(value: bool) -> Vec<C64> {
    let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    if value {
        vec![zero, one]
    } else {
        vec![one, zero]
    }
}

/// One tensor per gate, a projection on `|0⟩` per input wire and, for
/// closed outputs, a projection per output wire.
pub fn network_from_circuit(circuit: &Circuit, outputs: &OutputSpec) -> Result<TensorNetwork> {
    network_from_circuit_with(circuit, outputs, NetworkOptions::default())
}

pub fn network_from_circuit_with(
    circuit: &Circuit,
    outputs: &OutputSpec,
    options: NetworkOptions,
) -> Result<TensorNetwork> {
    let labels = circuit.graph().nodes().to_vec();
    let closed: BTreeMap<Label, bool> = match outputs {
        OutputSpec::Closed(bits) if bits.is_empty() => labels.iter().map(|&q| (q, false)).collect(),
        OutputSpec::Closed(bits) => {
            if bits.chars().count() != labels.len() {
                return Err(Error::validation(format!(
                    "bitstring '{bits}' has length {}, expected {}",
                    bits.chars().count(),
                    labels.len()
                )));
            }
            labels
                .iter()
                .zip(bits.chars())
                .map(|(&q, c)| match c {
                    '0' => Ok((q, false)),
                    '1' => Ok((q, true)),
                    other => Err(Error::validation(format!("bitstring character '{other}'"))),
                })
                .collect::<Result<_>>()?
        }
        OutputSpec::Open(open) => {
            for q in open {
                if !circuit.graph().contains(*q) {
                    return Err(Error::validation(format!("open qubit {q} not in circuit device")));
                }
            }
            labels.iter().filter(|q| !open.contains(q)).map(|&q| (q, false)).collect()
        }
        OutputSpec::OpenAll => BTreeMap::new(),
    };

    let mut n_indices = 0u32;
    let mut fresh = || {
        n_indices += 1;
        n_indices - 1
    };
    let mut tensors = Vec::new();
    let mut wire: BTreeMap<Label, u32> = BTreeMap::new();
    let mut input_of: BTreeMap<Label, usize> = BTreeMap::new();
    for &q in &labels {
        let i = fresh();
        wire.insert(q, i);
        input_of.insert(q, tensors.len());
        tensors.push(Tensor { indices: vec![i], data: basis_vector(false), role: TensorRole::Input(q) });
    }
    let mut time_order = Vec::new();
    let mut started = std::collections::BTreeSet::new();
    for (k, op) in circuit.ops().iter().enumerate() {
        for q in &op.qubits {
            if started.insert(*q) {
                time_order.push(input_of[q]);
            }
        }
        let ins: Vec<u32> = op.qubits.iter().map(|q| wire[q]).collect();
        let outs: Vec<u32> = op.qubits.iter().map(|_| fresh()).collect();
        for (q, &o) in op.qubits.iter().zip(&outs) {
            wire.insert(*q, o);
        }
        let matrix = op.kind.matrix();
        if let (true, GateMatrix::Two(m), true) = (options.split_diagonal, matrix, op.kind.is_diagonal()) {
            // A[i, o, k] = δ(i,o) δ(i,k) on the first qubit,
            // B[i, o, k] = δ(i,o) d(k, i) on the second.
            let bond = fresh();
            let zero = C64::new(0.0, 0.0);
            let a = (0..8).map(|off| {
                let (i, o, k) = (off & 1, (off >> 1) & 1, off >> 2);
                if i == o && i == k { C64::new(1.0, 0.0) } else { zero }
            });
            let b = (0..8).map(|off| {
                let (i, o, k) = (off & 1, (off >> 1) & 1, off >> 2);
                if i == o { m[2 * k + i][2 * k + i] } else { zero }
            });
            for (j, data) in [a.collect::<Vec<_>>(), b.collect()].into_iter().enumerate() {
                time_order.push(tensors.len());
                tensors.push(Tensor { indices: vec![ins[j], outs[j], bond], data, role: TensorRole::Gate(k) });
            }
            continue;
        }
        let data = match matrix {
            GateMatrix::One(m) => (0..4).map(|off| m[off >> 1][off & 1]).collect(),
            GateMatrix::Two(m) => (0..16)
                .map(|off| {
                    let (ia, ib, oa, ob) = (off & 1, (off >> 1) & 1, (off >> 2) & 1, (off >> 3) & 1);
                    m[2 * oa + ob][2 * ia + ib]
                })
                .collect(),
        };
        time_order.push(tensors.len());
        tensors.push(Tensor { indices: ins.into_iter().chain(outs).collect(), data, role: TensorRole::Gate(k) });
    }
    for &q in &labels {
        if !started.contains(&q) {
            time_order.push(input_of[&q]);
        }
    }
    let mut open = Vec::new();
    for &q in &labels {
        match closed.get(&q) {
            Some(&v) => {
                time_order.push(tensors.len());
                tensors.push(Tensor { indices: vec![wire[&q]], data: basis_vector(v), role: TensorRole::Output(q) });
            }
            None => open.push((q, wire[&q])),
        }
    }
    Ok(TensorNetwork { tensors, n_indices: n_indices as usize, open, time_order })
}
