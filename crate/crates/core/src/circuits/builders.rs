use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::circuit::{Circuit, CircuitMeta};
use super::device::{DeviceGraph, Label};
use super::gate::{dagger2, dagger4, iswap, single_qubit_cliffords, GateKind, GateOp, Pauli};
use crate::{Error, Result};

/// ZZ angle of the kicked-Ising step, `exp(+i π/4 ZZ)`.
pub const FLOQUET_ZZ_ANGLE: f64 = FRAC_PI_4;

/// Floquet transverse-field Ising circuit: each step is one layer of
/// `RX(θ_h)` on every qubit followed by `RZZ(π/4)` on every edge, the edges
/// split into parallel layers by the graph's greedy edge coloring.
pub fn build_floquet(graph: Arc<DeviceGraph>, steps: usize, theta_h: f64) -> Circuit {
    let layers = graph.edge_layers();
    let per_step = 1 + layers.len();
    let mut ops = Vec::with_capacity(steps * (graph.len() + graph.edges().len()));
    for step in 0..steps {
        let base = step * per_step;
        for &q in graph.nodes() {
            ops.push(GateOp::rx(q, theta_h, base));
        }
        for (k, layer) in layers.iter().enumerate() {
            for &(a, b) in layer {
                ops.push(GateOp::rzz(a, b, FLOQUET_ZZ_ANGLE, base + 1 + k));
            }
        }
    }
    let mut warnings = Vec::new();
    if !(0.0..=FRAC_PI_2).contains(&theta_h) {
        warnings.push(format!("theta_h = {theta_h} outside [0, pi/2]"));
    }
    let meta = CircuitMeta {
        builder: "floquet".into(),
        steps: Some(steps),
        theta_h: Some(theta_h),
        seed: None,
        layers_per_step: Some(per_step),
        warnings,
    };
    Circuit::new(graph, ops, meta).expect("floquet layering is valid by construction")
}

/// How the second half of an OTOC ensemble circuit is generated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OtocStyle {
    /// Fresh random cycles continue after the butterfly.
    #[default]
    Forward,
    /// After the butterfly the forward gates are undone in reverse order
    /// (`U† B U` structure), truncated at the entangling-gate total.
    Echo,
}

/// Random Clifford OTOC circuit: cycles of uniformly random single-qubit
/// Cliffords followed by one edge-color layer of iSWAPs, stopped after
/// `n_entangling` iSWAPs, with the butterfly Pauli applied right after
/// iSWAP number `ceil(n_entangling / 2)`.
pub fn build_otoc_clifford_ensemble(
    graph: Arc<DeviceGraph>,
    n_entangling: usize,
    butterfly: (Label, Pauli),
    seed: u64,
    style: OtocStyle,
) -> Result<Circuit> {
    let (bq, bp) = butterfly;
    if !graph.contains(bq) {
        return Err(Error::validation(format!("butterfly qubit {bq} not in device")));
    }
    if bp == Pauli::I {
        return Err(Error::validation("butterfly operator must be a non-identity Pauli"));
    }
    let colors = graph.edge_layers();
    if n_entangling > 0 && colors.is_empty() {
        return Err(Error::validation("device has no edges for entangling gates"));
    }
    let cliffords = single_qubit_cliffords();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = n_entangling.div_ceil(2);
    let forward_total = match style {
        OtocStyle::Forward => n_entangling,
        OtocStyle::Echo => half,
    };

    let mut ops: Vec<GateOp> = Vec::new();
    let mut layer = 0usize;
    let push_singles = |ops: &mut Vec<GateOp>, layer: &mut usize, rng: &mut ChaCha8Rng| {
        for &q in graph.nodes() {
            let m = cliffords[rng.gen_range(0..cliffords.len())];
            ops.push(GateOp { kind: GateKind::Unitary1(m), qubits: vec![q], layer: *layer });
        }
        *layer += 1;
    };
    let butterfly_op = |layer: usize| GateOp { kind: GateKind::Pauli(vec![bp]), qubits: vec![bq], layer };

    push_singles(&mut ops, &mut layer, &mut rng);
    let mut count = 0usize;
    let mut butterfly_done = false;
    if half == 0 {
        ops.push(butterfly_op(layer));
        layer += 1;
        butterfly_done = true;
    }
    let mut cycle = 0usize;
    while count < forward_total {
        let mut open_layer = false;
        for &(a, b) in &colors[cycle % colors.len()] {
            ops.push(GateOp { kind: GateKind::Unitary2(iswap()), qubits: vec![a, b], layer });
            open_layer = true;
            count += 1;
            if count == half && !butterfly_done {
                layer += 1;
                ops.push(butterfly_op(layer));
                layer += 1;
                butterfly_done = true;
                open_layer = false;
            }
            if count == forward_total {
                break;
            }
        }
        if open_layer {
            layer += 1;
        }
        cycle += 1;
        if count < forward_total {
            push_singles(&mut ops, &mut layer, &mut rng);
        }
    }

    if style == OtocStyle::Echo {
        // Undo the forward gates (everything before the butterfly) in reverse.
        let forward: Vec<GateOp> = ops.iter().take(ops.len() - 1).cloned().collect();
        let mut undone = 0usize;
        let mut prev_layer = None;
        for op in forward.iter().rev() {
            if op.kind.is_entangling() {
                if undone == n_entangling - half {
                    break;
                }
                undone += 1;
            }
            if prev_layer != Some(op.layer) {
                layer += 1;
                prev_layer = Some(op.layer);
            }
            let kind = match &op.kind {
                GateKind::Unitary1(m) => GateKind::Unitary1(dagger2(m)),
                GateKind::Unitary2(m) => GateKind::Unitary2(dagger4(m)),
                other => other.clone(),
            };
            ops.push(GateOp { kind, qubits: op.qubits.clone(), layer });
        }
    }

    let meta = CircuitMeta {
        builder: match style {
            OtocStyle::Forward => "otoc_clifford".into(),
            OtocStyle::Echo => "otoc_clifford_echo".into(),
        },
        steps: None,
        theta_h: None,
        seed: Some(seed),
        layers_per_step: None,
        warnings: Vec::new(),
    };
    Circuit::new(graph, ops, meta)
}
