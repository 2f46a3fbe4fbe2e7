//! Tensor networks of circuits, contraction-order search and contraction
//! cost in scalar multiplications.

mod execute;
mod network;
mod optimize;
mod plan;

pub use execute::{execute_plan, Contracted};
pub use network::{network_from_circuit, network_from_circuit_with, NetworkOptions, OutputSpec, Tensor, TensorNetwork, TensorRole};
pub use optimize::{optimize_order, transfer_plan, OptimizerConfig};
pub use plan::{contraction_cost, ContractionPlan};
