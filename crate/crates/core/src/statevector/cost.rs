use crate::circuits::Circuit;

/// `log2(4·2^n·G2 + 2·2^n·G1)`: complex multiplications for a full
/// state-vector evolution, counting 4 per amplitude for a two-qubit gate and
/// 2 per amplitude for a single-qubit gate.
pub fn sv_cost_counts(n: usize, g2: usize, g1: usize) -> f64 {
    let mults = 4.0 * g2 as f64 + 2.0 * g1 as f64;
    if mults == 0.0 {
        return 0.0;
    }
    n as f64 + mults.log2()
}

/// [`sv_cost_counts`] over the circuit's touched qubits and gate counts.
pub fn sv_cost(circuit: &Circuit) -> f64 {
    sv_cost_counts(circuit.n_qubits(), circuit.two_qubit_count(), circuit.one_qubit_count())
}
