//! Naive dense reference simulator shared by the integration tests.
#![allow(dead_code)]

use effvol::circuits::{Circuit, GateMatrix, Label, Pauli, PauliString, C64};

pub struct Dense {
    pub labels: Vec<Label>,
    pub amps: Vec<C64>,
}

impl Dense {
    pub fn zero(labels: &[Label]) -> Dense {
        let mut labels = labels.to_vec();
        labels.sort_unstable();
        let mut amps = vec![C64::new(0.0, 0.0); 1 << labels.len()];
        amps[0] = C64::new(1.0, 0.0);
        Dense { labels, amps }
    }

    pub fn bit(&self, q: Label) -> usize {
        self.labels.iter().position(|&l| l == q).expect("qubit in state")
    }

    pub fn run(circuit: &Circuit) -> Dense {
        let mut s = Dense::zero(circuit.graph().nodes());
        for op in circuit.ops() {
            let bits: Vec<usize> = op.qubits.iter().map(|&q| s.bit(q)).collect();
            match op.kind.matrix() {
                GateMatrix::One(m) => {
                    let b = 1 << bits[0];
                    for i in 0..s.amps.len() {
                        if i & b == 0 {
                            let (x, y) = (s.amps[i], s.amps[i | b]);
                            s.amps[i] = m[0][0] * x + m[0][1] * y;
                            s.amps[i | b] = m[1][0] * x + m[1][1] * y;
                        }
                    }
                }
                GateMatrix::Two(m) => {
                    let (ba, bb) = (1 << bits[0], 1 << bits[1]);
                    for i in 0..s.amps.len() {
                        if i & ba == 0 && i & bb == 0 {
                            let idx = [i, i | bb, i | ba, i | ba | bb];
                            let v: Vec<C64> = idx.iter().map(|&k| s.amps[k]).collect();
                            for r in 0..4 {
                                s.amps[idx[r]] = (0..4).map(|c| m[r][c] * v[c]).sum();
                            }
                        }
                    }
                }
            }
        }
        s
    }

    /// `⟨ψ|P|ψ⟩`, built by applying each Pauli factor.
    pub fn expectation(&self, obs: &PauliString) -> C64 {
        let mut phi = self.amps.clone();
        for (q, p) in obs.iter() {
            let b = 1 << self.bit(q);
            let m = p.matrix();
            for i in 0..phi.len() {
                if i & b == 0 {
                    let (x, y) = (phi[i], phi[i | b]);
                    phi[i] = m[0][0] * x + m[0][1] * y;
                    phi[i | b] = m[1][0] * x + m[1][1] * y;
                }
            }
        }
        let v: C64 = self.amps.iter().zip(&phi).map(|(a, b)| a.conj() * b).sum();
        v * obs.sign() as f64
    }

    /// `Tr ρ_A²` via the reduced density matrix.
    pub fn purity(&self, region: &[Label]) -> f64 {
        let a_bits: Vec<usize> = region.iter().map(|&q| self.bit(q)).collect();
        let b_bits: Vec<usize> = (0..self.labels.len()).filter(|b| !a_bits.contains(b)).collect();
        let compose = |ia: usize, ib: usize| {
            let mut i = 0;
            for (k, &b) in a_bits.iter().enumerate() {
                i |= ((ia >> k) & 1) << b;
            }
            for (k, &b) in b_bits.iter().enumerate() {
                i |= ((ib >> k) & 1) << b;
            }
            i
        };
        let (da, db) = (1 << a_bits.len(), 1 << b_bits.len());
        let mut total = 0.0;
        for i in 0..da {
            for j in 0..da {
                let rho: C64 = (0..db).map(|k| self.amps[compose(i, k)] * self.amps[compose(j, k)].conj()).sum();
                total += rho.norm_sqr();
            }
        }
        total
    }
}

pub fn pauli_from_index(i: usize) -> Pauli {
    [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][i % 4]
}

/// Random circuit of RX, RZZ, iSWAP, CZ and random single-qubit unitaries on
/// `graph`, one gate per layer.
pub fn random_circuit(
    graph: std::sync::Arc<effvol::circuits::DeviceGraph>,
    len: usize,
    rng: &mut impl rand::Rng,
) -> Circuit {
    use effvol::circuits::{cz, iswap, rx, CircuitMeta, GateKind, GateOp};
    let nodes = graph.nodes().to_vec();
    let edges = graph.edges().to_vec();
    let ops = (0..len)
        .map(|layer| {
            let pick = rng.gen_range(0..6);
            if pick < 2 || edges.is_empty() {
                let q = nodes[rng.gen_range(0..nodes.len())];
                let kind = if pick == 0 {
                    GateKind::Rx(rng.gen_range(-3.0..3.0))
                } else {
                    let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                    let m = rx(a);
                    let phase = C64::from_polar(1.0, b);
                    GateKind::Unitary1([[m[0][0], m[0][1] * phase], [m[1][0], m[1][1] * phase]])
                };
                GateOp { kind, qubits: vec![q], layer }
            } else {
                let (a, b) = edges[rng.gen_range(0..edges.len())];
                let kind = match pick {
                    2 | 3 => GateKind::Rzz(rng.gen_range(-3.0..3.0)),
                    4 => GateKind::Unitary2(iswap()),
                    _ => GateKind::Unitary2(cz()),
                };
                GateOp { kind, qubits: vec![a, b], layer }
            }
        })
        .collect();
    Circuit::new(graph, ops, CircuitMeta::default()).unwrap()
}
