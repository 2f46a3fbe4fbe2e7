//! Device lattices, qubit subsets, the circuit IR and circuit builders.

mod builders;
mod circuit;
mod device;
mod gate;
mod pauli;
mod subgraph;

pub use builders::{build_floquet, build_otoc_clifford_ensemble, OtocStyle, FLOQUET_ZZ_ANGLE};
pub use circuit::{gate_histogram, Circuit, CircuitMeta};
pub use device::{build_device, DeviceGraph, Label, LayoutSpec};
pub use gate::{
    cz, dagger2, dagger4, hadamard, is_unitary2, is_unitary4, iswap, kron, matmul2, matmul4, phase_s, rx, rzz,
    single_qubit_cliffords, GateKind, GateMatrix, GateOp, Mat2, Mat4, Pauli, C64, UNITARY_TOL,
};
pub use pauli::PauliString;
pub use subgraph::{select_subgraph, BoundaryMode};
