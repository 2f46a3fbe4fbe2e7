use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::propagate::conjugate;
use super::tableau::StabilizerTableau;
use crate::circuits::{
    build_otoc_clifford_ensemble, cz, iswap, single_qubit_cliffords, DeviceGraph, GateKind, GateOp, Label, OtocStyle,
    Pauli, PauliString,
};
use crate::analysis::linear_fit;
use crate::{Error, Result};

/// Random Clifford OTOC circuits, one per sample.
#[derive(Clone, Debug)]
pub struct OtocEnsemble {
    pub graph: Arc<DeviceGraph>,
    pub n_entangling: usize,
    pub butterfly: (Label, Pauli),
    pub style: OtocStyle,
}

/// Ensemble statistics at one point of a curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Entangling gates applied (purity) or steps taken (spreading).
    pub x: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Independent RNG for sample `index` of a run rooted at `seed`.
pub(crate) fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_samples<T: Send>(samples: usize, f: impl Fn(usize) -> Result<T> + Send + Sync) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..samples).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..samples).map(f).collect()
    }
}

/// Ensemble-averaged reduced purity of `cut` after each entangling gate.
///
/// Point `k` holds the purity right after the `k`-th entangling gate; point 0
/// is the state before any entangling gate. The result has
/// `n_entangling + 1` points.
pub fn purity_curve(ensemble: &OtocEnsemble, cut: &[Label], samples: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    if samples == 0 {
        return Err(Error::validation("samples must be at least 1"));
    }
    for &q in cut {
        if !ensemble.graph.contains(q) {
            return Err(Error::validation(format!("cut qubit {q} not in device")));
        }
    }
    let traces = run_samples(samples, |i| {
        let circuit_seed = sample_rng(seed, i).gen::<u64>();
        let circuit = build_otoc_clifford_ensemble(
            ensemble.graph.clone(),
            ensemble.n_entangling,
            ensemble.butterfly,
            circuit_seed,
            ensemble.style,
        )?;
        let mut tableau = StabilizerTableau::zero_state(ensemble.graph.nodes());
        let mut trace = Vec::with_capacity(ensemble.n_entangling + 1);
        trace.push(1.0);
        for (k, op) in circuit.ops().iter().enumerate() {
            tableau.apply_op(op, k)?;
            if op.kind.is_entangling() {
                trace.push(tableau.reduced_purity(cut)?);
            }
        }
        Ok(trace)
    })?;
    Ok((0..=ensemble.n_entangling)
        .map(|k| {
            let column: Vec<f64> = traces.iter().map(|t| t[k]).collect();
            let (mean, stderr) = mean_stderr(&column);
            CurvePoint { x: k, mean, stderr }
        })
        .collect())
}

/// Average purity `(d_A + d_B) / (d_A d_B + 1)` of a Haar-random pure state.
pub fn haar_purity(region: usize, total: usize) -> f64 {
    let da = (region as f64).exp2();
    let db = ((total - region) as f64).exp2();
    (da + db) / (da * db + 1.0)
}

/// Entangling gate used between random single-qubit Clifford layers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateFamily {
    #[default]
    ISwap,
    Cz,
    /// Single-qubit Cliffords only.
    None,
}

impl FromStr for GateFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iswap" => Ok(GateFamily::ISwap),
            "cz" => Ok(GateFamily::Cz),
            "none" => Ok(GateFamily::None),
            other => Err(Error::validation(format!("unknown gate family '{other}'"))),
        }
    }
}

/// Support of one propagated Pauli after `t` steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadSample {
    pub t: usize,
    pub support_size: usize,
    /// Largest graph distance from the origin qubit within the support.
    pub radius: usize,
}

/// Butterfly-velocity estimate from the mean support radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ButterflyEstimate {
    /// Sites per step.
    pub velocity: f64,
    /// Root-mean-square deviation of the fitted line.
    pub residual: f64,
    pub origin: Label,
    /// Steps `[first, last]` used in the fit.
    pub window: (usize, usize),
    /// Mean radius per step.
    pub radius: Vec<CurvePoint>,
    /// Mean support size per step.
    pub support: Vec<CurvePoint>,
}

/// Graph center: smallest eccentricity, ties to the smallest label.
fn center(graph: &DeviceGraph) -> (Label, usize) {
    graph
        .nodes()
        .iter()
        .map(|&q| (q, graph.distances_from(q).values().copied().max().unwrap_or(0)))
        .min_by_key(|&(q, ecc)| (ecc, q))
        .expect("non-empty graph")
}

/// Spreads a single-qubit Pauli from the graph center through `steps`
/// steps, each a layer of random single-qubit Cliffords followed by one
/// edge-color layer of the family's entangling gate.
///
/// The velocity is the least-squares slope of the mean radius over the
/// ballistic window: from the last step before the radius first grows to the
/// last step at which no sample has reached the graph boundary.
pub fn estimate_butterfly_velocity(
    graph: Arc<DeviceGraph>,
    family: GateFamily,
    steps: usize,
    samples: usize,
    seed: u64,
) -> Result<ButterflyEstimate> {
    if samples == 0 {
        return Err(Error::validation("samples must be at least 1"));
    }
    if graph.is_empty() {
        return Err(Error::validation("empty device"));
    }
    let (origin, eccentricity) = center(&graph);
    let dist = graph.distances_from(origin);
    let colors = graph.edge_layers();
    let entangler = match family {
        GateFamily::ISwap => Some(iswap()),
        GateFamily::Cz => Some(cz()),
        GateFamily::None => None,
    };
    if entangler.is_some() && colors.is_empty() {
        return Err(Error::validation("device has no edges for entangling gates"));
    }
    let cliffords = single_qubit_cliffords();

    let traces: Vec<Vec<SpreadSample>> = run_samples(samples, |i| {
        let mut rng = sample_rng(seed, i);
        let mut p = PauliString::single(origin, [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)]);
        let measure = |t: usize, p: &PauliString| SpreadSample {
            t,
            support_size: p.weight(),
            radius: p.support().iter().map(|q| dist[q]).max().unwrap_or(0),
        };
        let mut trace = vec![measure(0, &p)];
        for t in 0..steps {
            for &q in graph.nodes() {
                let m = cliffords[rng.gen_range(0..cliffords.len())];
                conjugate(&mut p, &GateOp { kind: GateKind::Unitary1(m), qubits: vec![q], layer: 0 }, 0, false)?;
            }
            if let Some(u) = entangler {
                for &(a, b) in &colors[t % colors.len()] {
                    conjugate(&mut p, &GateOp { kind: GateKind::Unitary2(u), qubits: vec![a, b], layer: 0 }, 0, false)?;
                }
            }
            trace.push(measure(t + 1, &p));
        }
        Ok(trace)
    })?;

    let stats = |f: &dyn Fn(&SpreadSample) -> f64| -> Vec<CurvePoint> {
        (0..=steps)
            .map(|t| {
                let column: Vec<f64> = traces.iter().map(|tr| f(&tr[t])).collect();
                let (mean, stderr) = mean_stderr(&column);
                CurvePoint { x: t, mean, stderr }
            })
            .collect()
    };
    let radius = stats(&|s| s.radius as f64);
    let support = stats(&|s| s.support_size as f64);

    let max_radius = |t: usize| traces.iter().map(|tr| tr[t].radius).max().unwrap_or(0);
    let Some(first_growth) = (1..=steps).find(|&t| radius[t].mean > radius[0].mean) else {
        return Ok(ButterflyEstimate { velocity: 0.0, residual: 0.0, origin, window: (0, steps), radius, support });
    };
    let start = first_growth - 1;
    let end = (start..=steps).take_while(|&t| max_radius(t) < eccentricity).last().unwrap_or(start);
    if end < start + 2 {
        return Err(Error::validation(format!(
            "ballistic window [{start}, {end}] has fewer than 3 points; use a larger device or more steps"
        )));
    }
    let xs: Vec<f64> = (start..=end).map(|t| t as f64).collect();
    let ys: Vec<f64> = (start..=end).map(|t| radius[t].mean).collect();
    let (slope, intercept) = linear_fit(&xs, &ys);
    let residual =
        (xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    Ok(ButterflyEstimate { velocity: slope, residual, origin, window: (start, end), radius, support })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iswap_chain_is_ballistic() {
        let g = Arc::new(DeviceGraph::chain(21).unwrap());
        let est = estimate_butterfly_velocity(g, GateFamily::ISwap, 14, 8, 3).unwrap();
        assert_eq!(est.origin, 10);
        assert_eq!(est.velocity, 1.0);
        assert!(est.residual < 1e-12);
        assert_eq!(est.window, (0, 9));
    }

    #[test]
    fn cz_is_slower() {
        let g = Arc::new(DeviceGraph::chain(41).unwrap());
        let est = estimate_butterfly_velocity(g, GateFamily::Cz, 20, 200, 5).unwrap();
        assert!(est.velocity > 0.1 && est.velocity < 1.0, "{}", est.velocity);
        assert!(est.residual.is_finite());
    }

    #[test]
    fn no_entanglers_no_spread() {
        let g = Arc::new(DeviceGraph::grid(3, 3).unwrap());
        let est = estimate_butterfly_velocity(g, GateFamily::None, 5, 4, 1).unwrap();
        assert_eq!(est.velocity, 0.0);
        assert!(est.radius.iter().all(|p| p.mean == 0.0));
        assert!(est.support.iter().all(|p| p.mean == 1.0));
    }

    #[test]
    fn short_window_is_an_error() {
        let g = Arc::new(DeviceGraph::chain(5).unwrap());
        assert!(estimate_butterfly_velocity(g, GateFamily::ISwap, 6, 2, 1).is_err());
    }

    #[test]
    fn purity_without_entanglers() {
        let g = Arc::new(DeviceGraph::grid(2, 3).unwrap());
        let ens = OtocEnsemble { graph: g, n_entangling: 0, butterfly: (0, Pauli::X), style: OtocStyle::Forward };
        let curve = purity_curve(&ens, &[0, 1, 2], 5, 9).unwrap();
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0].mean, 1.0);
    }

    #[test]
    fn haar_values() {
        assert!((haar_purity(1, 2) - 4.0 / 5.0).abs() < 1e-15);
        assert!((haar_purity(10, 20) - 2048.0 / 1048577.0).abs() < 1e-18);
    }
}
