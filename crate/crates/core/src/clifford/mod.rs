//! Stabilizer simulation: Pauli propagation through Clifford circuits,
//! stabilizer expectations, reduced purity and operator spreading.

mod propagate;
mod spread;
mod table;
mod tableau;

pub use propagate::{derive_stabilizer_observable, propagate_pauli, Direction};
pub use spread::{
    estimate_butterfly_velocity, haar_purity, purity_curve, ButterflyEstimate, CurvePoint, GateFamily, OtocEnsemble,
    SpreadSample,
};
pub use table::ANGLE_TOL;
pub use tableau::StabilizerTableau;
