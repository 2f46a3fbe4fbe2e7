use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fused::FusionConfig;
use super::*;
use crate::circuits::{build_floquet, single_qubit_cliffords, iswap, DeviceGraph, GateKind, GateOp, Pauli};

fn random_circuit(graph: &Arc<DeviceGraph>, n_ops: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = graph.edges();
    let nodes = graph.nodes();
    let ops = (0..n_ops)
        .map(|layer| match rng.gen_range(0..4) {
            0 => GateOp::rx(nodes[rng.gen_range(0..nodes.len())], rng.gen_range(-PI..PI), layer),
            1 => {
                let (a, b) = edges[rng.gen_range(0..edges.len())];
                GateOp::rzz(a, b, rng.gen_range(-PI..PI), layer)
            }
            2 => {
                let (a, b) = edges[rng.gen_range(0..edges.len())];
                GateOp { kind: GateKind::Unitary2(iswap()), qubits: vec![b, a], layer }
            }
            _ => {
                let c = single_qubit_cliffords();
                GateOp { kind: GateKind::Unitary1(c[rng.gen_range(0..c.len())]), qubits: vec![nodes[rng.gen_range(0..nodes.len())]], layer }
            }
        })
        .collect();
    Circuit::new(graph.clone(), ops, Default::default()).unwrap()
}

fn max_diff(a: &StateVector<f64>, b: &StateVector<f64>) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn basis_states() {
    let s = StateVector::<f64>::init_basis(&[0], "0", MemoryBudget::DEFAULT).unwrap();
    assert_eq!(s.amplitudes(), &[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
    let s = StateVector::<f64>::init_basis(&[4, 9], "10", MemoryBudget::DEFAULT).unwrap();
    assert_eq!(s.amplitudes()[1], Complex::new(1.0, 0.0));
    assert!(matches!(
        StateVector::<f64>::zero_state(&(0..30).collect::<Vec<_>>(), MemoryBudget(1 << 20)),
        Err(crate::Error::Resource { .. })
    ));
    assert!(StateVector::<f64>::init_basis(&[0, 1], "1", MemoryBudget::DEFAULT).is_err());
}

#[test]
fn rx_pi_flips() {
    let mut s = StateVector::<f64>::zero_state(&[0], MemoryBudget::DEFAULT).unwrap();
    s.apply_op(&GateOp::rx(0, PI, 0)).unwrap();
    assert!((s.amplitudes()[1] - Complex::new(0.0, -1.0)).norm() < 1e-15);
    assert!(s.apply_op(&GateOp::rx(3, PI, 0)).is_err());
}

#[test]
fn fused_matches_per_gate_kernels() {
    let g = Arc::new(DeviceGraph::grid(3, 4).unwrap());
    let configs = [
        FusionConfig::default(),
        FusionConfig { low_bits: 4, group_bits: 3, run_bits: 2, max_cross: 12 },
        FusionConfig { low_bits: 5, group_bits: 2, run_bits: 1, max_cross: 1 },
    ];
    for seed in 0..6 {
        let c = random_circuit(&g, 80, seed);
        let mut plain = StateVector::<f64>::zero_state(g.nodes(), MemoryBudget::DEFAULT).unwrap();
        plain.apply_ops(c.ops()).unwrap();
        for cfg in configs {
            let mut fused = StateVector::<f64>::zero_state(g.nodes(), MemoryBudget::DEFAULT).unwrap();
            fused.set_fusion(cfg);
            fused.apply(&c).unwrap();
            assert!(max_diff(&plain, &fused) < 1e-12, "seed {seed} {cfg:?}");
        }
        assert!((plain.norm_sqr() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn floquet_fused_small_blocks() {
    let g = Arc::new(DeviceGraph::heavy_hex_127().induced_subgraph(&(0..19).collect::<Vec<_>>()).unwrap());
    let c = build_floquet(g.clone(), 3, 0.37);
    let mut plain = StateVector::<f64>::zero_state(g.nodes(), MemoryBudget::DEFAULT).unwrap();
    plain.apply_ops(c.ops()).unwrap();
    let mut fused = StateVector::<f64>::zero_state(g.nodes(), MemoryBudget::DEFAULT).unwrap();
    fused.set_fusion(FusionConfig { low_bits: 7, group_bits: 4, run_bits: 3, max_cross: 12 });
    fused.apply(&c).unwrap();
    assert!(max_diff(&plain, &fused) < 1e-12);
}

#[test]
fn theta_zero_keeps_z() {
    let g = Arc::new(DeviceGraph::grid(3, 3).unwrap());
    let c = build_floquet(g.clone(), 7, 0.0);
    let mut s = StateVector::<f64>::zero_state(g.nodes(), MemoryBudget::DEFAULT).unwrap();
    s.apply(&c).unwrap();
    for &q in g.nodes() {
        assert!((s.expectation(&PauliString::single(q, Pauli::Z)).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn ising_flip_symmetry() {
    let g = Arc::new(DeviceGraph::grid(2, 4).unwrap());
    let c = build_floquet(g.clone(), 4, 0.6);
    let mut up = StateVector::<f64>::zero_state(g.nodes(), MemoryBudget::DEFAULT).unwrap();
    let mut down = StateVector::<f64>::init_basis(g.nodes(), "11111111", MemoryBudget::DEFAULT).unwrap();
    up.apply(&c).unwrap();
    down.apply(&c).unwrap();
    for &q in g.nodes() {
        let z = PauliString::single(q, Pauli::Z);
        assert!((up.expectation(&z).unwrap() + down.expectation(&z).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn pauli_expectations_on_simple_states() {
    let mut s = StateVector::<f64>::zero_state(&[0, 1], MemoryBudget::DEFAULT).unwrap();
    s.apply_op(&GateOp::rx(0, FRAC_PI_2, 0)).unwrap();
    // RX(π/2)|0⟩ has ⟨Y⟩ = -1.
    assert!((s.expectation(&"Y0".parse().unwrap()).unwrap() + 1.0).abs() < 1e-12);
    assert!((s.expectation(&"-Y0 Z1".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
    assert!(s.expectation(&"X0".parse().unwrap()).unwrap().abs() < 1e-12);
    assert!(s.expectation(&"Z5".parse().unwrap()).is_err());
}

#[test]
fn single_precision_tracks_double() {
    let g = Arc::new(DeviceGraph::grid(3, 3).unwrap());
    let c = build_floquet(g.clone(), 5, 0.5);
    let obs: PauliString = "Z4".parse().unwrap();
    let a = simulate_expectation(&c, &obs, Precision::F64, MemoryBudget::DEFAULT).unwrap();
    let b = simulate_expectation(&c, &obs, Precision::F32, MemoryBudget::DEFAULT).unwrap();
    assert!((a - b).abs() < 1e-5);
}

#[test]
fn noise_free_is_exact() {
    let g = Arc::new(DeviceGraph::chain(6).unwrap());
    let c = build_floquet(g, 3, 0.4);
    let obs: PauliString = "Z2".parse().unwrap();
    let ideal = simulate_expectation(&c, &obs, Precision::F64, MemoryBudget::DEFAULT).unwrap();
    let est = noisy_expectation(&c, &obs, &NoiseSpec { epsilon: 0.0, seed: 1, shots: 10 }, MemoryBudget::DEFAULT).unwrap();
    assert_eq!(est.stderr, 0.0);
    let mut s = StateVector::<f64>::zero_state(c.graph().nodes(), MemoryBudget::DEFAULT).unwrap();
    s.apply_ops(c.ops()).unwrap();
    assert_eq!(est.mean, s.expectation(&obs).unwrap());
    assert!((est.mean - ideal).abs() < 1e-12);
    assert!(noisy_expectation(&c, &obs, &NoiseSpec { epsilon: 0.0, seed: 1, shots: 0 }, MemoryBudget::DEFAULT).is_err());
}

#[test]
fn full_depolarizing_limit() {
    let g = Arc::new(DeviceGraph::chain(5).unwrap());
    let c = build_floquet(g, 4, 0.3);
    let obs: PauliString = "Z2".parse().unwrap();
    let est = noisy_expectation(&c, &obs, &NoiseSpec { epsilon: 1.0, seed: 3, shots: 4000 }, MemoryBudget::DEFAULT).unwrap();
    assert!(est.mean.abs() < 4.0 * est.stderr.max(1e-3), "{est:?}");
}
