//! Effective circuit volume toolkit.
//!
//! Quantifies the tradeoff between the signal an observable retains on a noisy
//! device (its effective fidelity) and the classical cost of computing it
//! (contraction cost of the gates inside its effective volume). The crate is
//! organised bottom-up:
//!
//! - [`circuits`]: device lattices, qubit subsets, the circuit IR and builders
//!   for the Floquet transverse-field Ising circuit and Clifford OTOC ensembles.
//! - [`statevector`]: dense simulation, Pauli expectations, Pauli-noise
//!   trajectories and state-vector cost accounting.
//! - [`clifford`]: stabilizer tableaux, Heisenberg propagation of Pauli strings,
//!   reduced purity and butterfly-velocity estimation.
//! - [`effvol`]: backward light cones, pruning, effective volume and the
//!   fidelity / mitigation arithmetic built on `F_eff = exp(-eps * V_eff)`.
//! - [`tncost`]: tensor networks built from circuits, contraction-order search
//!   and exact contraction for small networks.
//! - [`analysis`]: decay-time root solving, scaling predictors and exponential
//!   decay fits.

pub mod analysis;
pub mod circuits;
pub mod clifford;
pub mod effvol;
mod budget;
mod error;
pub mod report;
pub mod statevector;
pub mod tncost;

pub use budget::MemoryBudget;
pub use error::{Error, Result};
