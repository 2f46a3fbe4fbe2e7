//! Dense state-vector simulation.

mod cost;
mod fused;
mod kernels;
mod noise;
mod state;

use std::fmt;
use std::str::FromStr;

pub use cost::{sv_cost, sv_cost_counts};
pub use noise::{noisy_expectation, NoiseSpec, NoisyEstimate};
pub use state::StateVector;

use crate::circuits::{Circuit, PauliString};
use crate::{Error, MemoryBudget, Result};

/// Floating-point component type of a state vector.
pub trait Real: num_traits::Float + Default + Send + Sync + fmt::Debug + 'static {
    /// Largest imaginary residue tolerated in an expectation value.
    const IMAG_TOL: f64;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Real for f64 {
    const IMAG_TOL: f64 = 1e-8;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    const IMAG_TOL: f64 = 1e-4;
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    F32,
    #[default]
    F64,
}

impl Precision {
    pub fn bytes_per_amplitude(self) -> u128 {
        match self {
            Precision::F32 => 8,
            Precision::F64 => 16,
        }
    }
}

impl FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "32" | "f32" | "single" => Ok(Precision::F32),
            "64" | "f64" | "double" => Ok(Precision::F64),
            other => Err(Error::validation(format!("unknown precision '{other}'"))),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        })
    }
}

/// Runs `circuit` on `|0…0⟩` over its device nodes and returns `⟨obs⟩`.
pub fn simulate_expectation(
    circuit: &Circuit,
    obs: &PauliString,
    precision: Precision,
    budget: MemoryBudget,
) -> Result<f64> {
    simulate_expectations(circuit, std::slice::from_ref(obs), precision, budget).map(|v| v[0])
}

/// Like [`simulate_expectation`] for several observables of one final state.
pub fn simulate_expectations(
    circuit: &Circuit,
    observables: &[PauliString],
    precision: Precision,
    budget: MemoryBudget,
) -> Result<Vec<f64>> {
    fn go<T: Real>(c: &Circuit, obs: &[PauliString], budget: MemoryBudget) -> Result<Vec<f64>> {
        let mut s = StateVector::<T>::zero_state(c.graph().nodes(), budget)?;
        s.apply(c)?;
        obs.iter().map(|o| s.expectation(o)).collect()
    }
    match precision {
        Precision::F32 => go::<f32>(circuit, observables, budget),
        Precision::F64 => go::<f64>(circuit, observables, budget),
    }
}

#[cfg(test)]
mod tests;
