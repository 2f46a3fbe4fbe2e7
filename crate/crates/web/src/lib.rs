//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic
//! and are plain Rust so they can be tested natively.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::Arc;

use effvol::analysis::{solve_t_delta, ChaoticModel, Geometry};
use effvol::circuits::{build_device, build_floquet, DeviceGraph, LayoutSpec, PauliString};
use effvol::effvol::{backward_lightcone, effective_fidelity, prune_to_lightcone, FidelityModel};
use effvol::statevector::StateVector;
use effvol::{Error, MemoryBudget, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest light cone simulated in the browser.
pub const MAX_DEMO_QUBITS: usize = 16;

fn device(spec: &str) -> Result<Arc<DeviceGraph>> {
    Ok(Arc::new(build_device(&spec.parse::<LayoutSpec>()?)?))
}

fn layout(g: &DeviceGraph) -> Value {
    let nodes: Vec<Value> = g
        .nodes()
        .iter()
        .map(|&q| {
            let (x, y) = g.coords().and_then(|c| c.get(&q).copied()).unwrap_or((q as f64, 0.0));
            json!({"label": q, "x": x, "y": y})
        })
        .collect();
    json!({"nodes": nodes, "edges": g.edges()})
}

/// Device drawing data plus the backward light cone of `observable`.
pub fn light_cone_json(device_spec: &str, steps: usize, observable: &str) -> Result<String> {
    let g = device(device_spec)?;
    let obs: PauliString = observable.parse()?;
    let circuit = build_floquet(g.clone(), steps, FRAC_PI_4);
    let cone = backward_lightcone(&circuit, &obs)?;
    let out = json!({
        "device": layout(&g),
        "frontiers": cone.frontiers,
        "cone_two_qubit_gates": cone.two_qubit_gates,
        "circuit_two_qubit_gates": circuit.two_qubit_count(),
    });
    Ok(out.to_string())
}

/// `⟨obs⟩` after `steps` Floquet steps at `points` evenly spaced angles in
/// `[0, π/2]`, simulated on the observable's light cone.
pub fn magnetization_json(device_spec: &str, steps: usize, observable: &str, points: usize) -> Result<String> {
    if points < 2 {
        return Err(Error::Validation("need at least two angles".into()));
    }
    let g = device(device_spec)?;
    let obs: PauliString = observable.parse()?;
    let cone = backward_lightcone(&build_floquet(g.clone(), steps, 0.5), &obs)?;
    let n = cone.qubits().len();
    if n > MAX_DEMO_QUBITS {
        return Err(Error::Resource {
            what: format!("{n}-qubit light cone in the browser"),
            needed: if n < 120 { 16u128 << n } else { u128::MAX },
            budget: 16u128 << MAX_DEMO_QUBITS,
        });
    }
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let theta = FRAC_PI_2 * k as f64 / (points - 1) as f64;
        let circuit = build_floquet(g.clone(), steps, theta);
        let pruned = prune_to_lightcone(&circuit, &backward_lightcone(&circuit, &obs)?)?;
        let mut s = StateVector::<f64>::zero_state(pruned.graph().nodes(), MemoryBudget::DEFAULT)?;
        s.apply(&pruned)?;
        rows.push(json!({"theta": theta, "value": s.expectation(&obs)?}));
    }
    Ok(json!({"cone_qubits": cone.qubits().len(), "points": rows}).to_string())
}

/// Effective fidelity `exp(-εV)` and the feasible depth `t_δ`.
pub fn feasibility_json(epsilon: f64, v_eff: f64, velocity: f64, delta: f64, chain: bool) -> Result<String> {
    let f_eff = effective_fidelity(&FidelityModel::new(epsilon, v_eff)?);
    let geometry = if chain { Geometry::Chain1d } else { Geometry::Square2d };
    let t = solve_t_delta(&ChaoticModel::new(velocity, epsilon, delta, geometry)?)?;
    Ok(json!({"f_eff": f_eff, "log10_f_eff": f_eff.log10(), "t_delta": t}).to_string())
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn light_cone(device: &str, steps: usize, observable: &str) -> std::result::Result<String, JsError> {
    js(light_cone_json(device, steps, observable))
}

#[wasm_bindgen]
pub fn magnetization(device: &str, steps: usize, observable: &str, points: usize) -> std::result::Result<String, JsError> {
    js(magnetization_json(device, steps, observable, points))
}

#[wasm_bindgen]
pub fn feasibility(epsilon: f64, v_eff: f64, velocity: f64, delta: f64, chain: bool) -> std::result::Result<String, JsError> {
    js(feasibility_json(epsilon, v_eff, velocity, delta, chain))
}
