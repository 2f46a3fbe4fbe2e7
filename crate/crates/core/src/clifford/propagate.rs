use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use super::table::{code, from_code, table_for, ConjTable};
use crate::circuits::{build_floquet, Circuit, DeviceGraph, GateOp, Label, Pauli, PauliString};
use crate::{Error, Result};

/// Picture in which a Pauli string is carried through a circuit `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Direction {
    /// `U† P U`: gates visited last to first, each conjugated by its inverse.
    #[default]
    Heisenberg,
    /// `U P U†`: gates visited first to last.
    Schrodinger,
}

/// Conjugates a single Pauli string by a Clifford circuit, tracking the sign.
pub fn propagate_pauli(circuit: &Circuit, p: &PauliString, direction: Direction) -> Result<PauliString> {
    for (q, _) in p.iter() {
        if !circuit.graph().contains(q) {
            return Err(Error::validation(format!("observable qubit {q} not in device")));
        }
    }
    let mut out = p.clone();
    let ops = circuit.ops();
    match direction {
        Direction::Schrodinger => {
            for (i, op) in ops.iter().enumerate() {
                conjugate(&mut out, op, i, false)?;
            }
        }
        Direction::Heisenberg => {
            for (i, op) in ops.iter().enumerate().rev() {
                conjugate(&mut out, op, i, true)?;
            }
        }
    }
    Ok(out)
}

/// Conjugates `p` in place by one gate.
pub(crate) fn conjugate(p: &mut PauliString, op: &GateOp, index: usize, inverse: bool) -> Result<()> {
    if op.qubits.iter().all(|&q| p.get(q) == Pauli::I) {
        return Ok(());
    }
    let table = table_for(op, index, inverse)?;
    apply_table(p, &table, &op.qubits);
    Ok(())
}

pub(crate) fn apply_table(p: &mut PauliString, table: &ConjTable, qubits: &[Label]) {
    let (img, flip) = match table {
        ConjTable::One(t) => t[code(p.get(qubits[0])) as usize],
        ConjTable::Two(t) => t[(code(p.get(qubits[0])) + 4 * code(p.get(qubits[1]))) as usize],
    };
    p.set(qubits[0], from_code(img & 3));
    if qubits.len() == 2 {
        p.set(qubits[1], from_code(img >> 2));
    }
    let neg = p.is_negative() ^ flip;
    p.set_negative(neg);
}

/// The `θ_h = π/2` Floquet image `U P U†` of a single-qubit Pauli: a
/// stabilizer of the Clifford state `U|0…0⟩` when `start` is a `Z`.
pub fn derive_stabilizer_observable(
    graph: Arc<DeviceGraph>,
    steps: usize,
    start: (Label, Pauli),
) -> Result<PauliString> {
    if !graph.contains(start.0) {
        return Err(Error::validation(format!("start qubit {} not in device", start.0)));
    }
    let circuit = build_floquet(graph, steps, FRAC_PI_2);
    propagate_pauli(&circuit, &PauliString::single(start.0, start.1), Direction::Schrodinger)
}
