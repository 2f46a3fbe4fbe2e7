use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::device::{DeviceDoc, DeviceGraph, Label, LayoutSpec};
use super::gate::{GateKind, GateOp, Pauli, C64};
use crate::{Error, Result};

/// Builder provenance carried with a circuit.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CircuitMeta {
    pub builder: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Layers emitted per Floquet step, when the circuit is periodic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers_per_step: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Ordered gate list over a device graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    graph: Arc<DeviceGraph>,
    ops: Vec<GateOp>,
    meta: CircuitMeta,
}

impl Circuit {
    /// Validates qubit membership, edge support for two-qubit ops, layer
    /// monotonicity and per-layer disjointness.
    pub fn new(graph: Arc<DeviceGraph>, ops: Vec<GateOp>, meta: CircuitMeta) -> Result<Self> {
        let mut current_layer = 0usize;
        let mut busy: HashSet<Label> = HashSet::new();
        for (i, op) in ops.iter().enumerate() {
            if op.kind.arity() != op.qubits.len() {
                return Err(Error::validation(format!("op {i}: arity mismatch")));
            }
            for &q in &op.qubits {
                if !graph.contains(q) {
                    return Err(Error::validation(format!("op {i}: qubit {q} not in device")));
                }
            }
            if op.qubits.len() == 2 && !graph.has_edge(op.qubits[0], op.qubits[1]) {
                return Err(Error::validation(format!(
                    "op {i}: ({}, {}) is not a device edge",
                    op.qubits[0], op.qubits[1]
                )));
            }
            if i > 0 && op.layer < current_layer {
                return Err(Error::validation(format!("op {i}: layer index decreases")));
            }
            if i == 0 || op.layer != current_layer {
                current_layer = op.layer;
                busy.clear();
            }
            for &q in &op.qubits {
                if !busy.insert(q) {
                    return Err(Error::validation(format!(
                        "op {i}: qubit {q} used twice in layer {}",
                        op.layer
                    )));
                }
            }
        }
        Ok(Circuit { graph, ops, meta })
    }

    pub fn empty(graph: Arc<DeviceGraph>) -> Self {
        Circuit { graph, ops: Vec::new(), meta: CircuitMeta::default() }
    }

    pub fn graph(&self) -> &DeviceGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> Arc<DeviceGraph> {
        Arc::clone(&self.graph)
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn meta(&self) -> &CircuitMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut CircuitMeta {
        &mut self.meta
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Qubits touched by at least one op, ascending.
    pub fn touched_qubits(&self) -> Vec<Label> {
        let set: BTreeSet<Label> = self.ops.iter().flat_map(|op| op.qubits.iter().copied()).collect();
        set.into_iter().collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.touched_qubits().len()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.ops.iter().filter(|op| op.kind.is_entangling()).count()
    }

    pub fn one_qubit_count(&self) -> usize {
        self.ops.iter().filter(|op| op.qubits.len() == 1).count()
    }

    /// Number of distinct layers holding at least one entangling gate.
    pub fn two_qubit_layer_count(&self) -> usize {
        let layers: BTreeSet<usize> =
            self.ops.iter().filter(|op| op.kind.is_entangling()).map(|op| op.layer).collect();
        layers.len()
    }

    /// Content hash over ops and graph; used to detect stale light cones.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.graph.nodes().hash(&mut h);
        self.graph.edges().hash(&mut h);
        for op in &self.ops {
            op.layer.hash(&mut h);
            op.qubits.hash(&mut h);
            op.kind.name().hash(&mut h);
            match &op.kind {
                GateKind::Rx(t) | GateKind::Rzz(t) => t.to_bits().hash(&mut h),
                GateKind::Unitary1(m) => m.iter().flatten().for_each(|c| hash_c64(c, &mut h)),
                GateKind::Unitary2(m) => m.iter().flatten().for_each(|c| hash_c64(c, &mut h)),
                GateKind::Pauli(p) => p.hash(&mut h),
            }
        }
        h.finish()
    }

    /// Keeps ops whose index is in `keep`, on the induced subgraph over `qubits`.
    pub(crate) fn sub_circuit(&self, keep: &BTreeSet<usize>, qubits: &[Label]) -> Result<Circuit> {
        let graph = if qubits.len() == self.graph.len() {
            Arc::clone(&self.graph)
        } else {
            Arc::new(self.graph.induced_subgraph(qubits)?)
        };
        let ops = keep.iter().map(|&i| self.ops[i].clone()).collect();
        let mut meta = self.meta.clone();
        meta.builder = format!("{}+pruned", meta.builder);
        Circuit::new(graph, ops, meta)
    }

    /// Same ops re-homed on `graph`, which must contain every touched qubit and edge.
    pub fn on_graph(&self, graph: Arc<DeviceGraph>) -> Result<Circuit> {
        Circuit::new(graph, self.ops.clone(), self.meta.clone())
    }

    /// Drops the op at `index`, keeping everything else.
    pub fn without_op(&self, index: usize) -> Circuit {
        let mut ops = self.ops.clone();
        ops.remove(index);
        Circuit { graph: Arc::clone(&self.graph), ops, meta: self.meta.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitDoc::from(self)).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CircuitDoc = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        doc.try_into()
    }
}

fn hash_c64(c: &C64, h: &mut DefaultHasher) {
    c.re.to_bits().hash(h);
    c.im.to_bits().hash(h);
}

/// Either a named layout or an inline device document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum DeviceRef {
    Named(String),
    Inline(DeviceDoc),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct OpDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    paulis: Option<String>,
    qubits: Vec<Label>,
    layer: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CircuitDoc {
    device_ref: DeviceRef,
    ops: Vec<OpDoc>,
    meta: CircuitMeta,
}

impl From<&Circuit> for CircuitDoc {
    fn from(c: &Circuit) -> Self {
        // A named builtin is referenced by name only if the graph is unmodified.
        let device_ref = match c.graph.name().and_then(|n| n.parse::<LayoutSpec>().ok()) {
            Some(spec)
                if super::device::build_device(&spec).map(|g| g == *c.graph).unwrap_or(false) =>
            {
                DeviceRef::Named(spec.to_string())
            }
            _ => DeviceRef::Inline(DeviceDoc::from(c.graph.as_ref())),
        };
        let ops = c
            .ops
            .iter()
            .map(|op| {
                let (params, paulis) = match &op.kind {
                    GateKind::Rx(t) | GateKind::Rzz(t) => (vec![*t], None),
                    GateKind::Unitary1(m) => (m.iter().flatten().flat_map(|z| [z.re, z.im]).collect(), None),
                    GateKind::Unitary2(m) => (m.iter().flatten().flat_map(|z| [z.re, z.im]).collect(), None),
                    GateKind::Pauli(p) => (Vec::new(), Some(p.iter().map(|q| q.as_char()).collect())),
                };
                OpDoc { kind: op.kind.name().into(), params, paulis, qubits: op.qubits.clone(), layer: op.layer }
            })
            .collect();
        CircuitDoc { device_ref, ops, meta: c.meta.clone() }
    }
}

impl TryFrom<CircuitDoc> for Circuit {
    type Error = Error;

    fn try_from(doc: CircuitDoc) -> Result<Self> {
        let graph = match doc.device_ref {
            DeviceRef::Named(name) => {
                let spec: LayoutSpec = name.parse().map_err(|e: Error| Error::parse("device_ref", e.to_string()))?;
                super::device::build_device(&spec)?
            }
            DeviceRef::Inline(d) => DeviceGraph::try_from(d)?,
        };
        let mut ops = Vec::with_capacity(doc.ops.len());
        for (i, od) in doc.ops.into_iter().enumerate() {
            let loc = format!("ops[{i}]");
            let need = |n: usize| -> Result<()> {
                if od.params.len() == n {
                    Ok(())
                } else {
                    Err(Error::parse(&loc, format!("{} expects {n} params, got {}", od.kind, od.params.len())))
                }
            };
            let kind = match od.kind.as_str() {
                "rx" => {
                    need(1)?;
                    GateKind::Rx(od.params[0])
                }
                "rzz" => {
                    need(1)?;
                    GateKind::Rzz(od.params[0])
                }
                "u1" => {
                    need(8)?;
                    let z: Vec<C64> = od.params.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
                    GateKind::Unitary1([[z[0], z[1]], [z[2], z[3]]])
                }
                "u2" => {
                    need(32)?;
                    let z: Vec<C64> = od.params.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
                    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
                    for (k, v) in z.into_iter().enumerate() {
                        m[k / 4][k % 4] = v;
                    }
                    GateKind::Unitary2(m)
                }
                "pauli" => {
                    let text = od.paulis.as_deref().ok_or_else(|| Error::parse(&loc, "pauli op needs 'paulis'"))?;
                    let ps: Option<Vec<Pauli>> = text.chars().map(Pauli::from_char).collect();
                    GateKind::Pauli(ps.ok_or_else(|| Error::parse(&loc, format!("bad paulis '{text}'")))?)
                }
                other => return Err(Error::parse(&loc, format!("unknown gate kind '{other}'"))),
            };
            let op = GateOp::new(kind, od.qubits, od.layer).map_err(|e| Error::parse(&loc, e.to_string()))?;
            ops.push(op);
        }
        Circuit::new(Arc::new(graph), ops, doc.meta).map_err(|e| match e {
            Error::Validation(msg) => Error::parse("ops", msg),
            other => other,
        })
    }
}

/// Compact per-kind gate counts, handy for reports.
pub fn gate_histogram(c: &Circuit) -> BTreeMap<&'static str, usize> {
    let mut h = BTreeMap::new();
    for op in c.ops() {
        *h.entry(op.kind.name()).or_insert(0) += 1;
    }
    h
}
