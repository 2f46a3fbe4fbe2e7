use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use effvol::analysis::{
    fit_decay, floquet_series, solve_t_delta, ChaoticModel, FitOptions, Geometry,
};
use effvol::circuits::{
    build_floquet, select_subgraph, BoundaryMode, Circuit, DeviceGraph, Label, OtocStyle, PauliString,
};
use effvol::clifford::{derive_stabilizer_observable, haar_purity, purity_curve, OtocEnsemble};
use effvol::effvol::{backward_lightcone, effective_fidelity, mitigate_with_floor, prune_to_lightcone, FidelityModel};
use effvol::report::{read_series, Report};
use effvol::statevector::{sv_cost, Precision, Real, StateVector};
use effvol::tncost::{
    network_from_circuit_with, optimize_order, transfer_plan, NetworkOptions, OptimizerConfig, OutputSpec,
};
use effvol::{Error, MemoryBudget, Result};
use serde_json::{json, Value};

use crate::parse::{self, ObservableSpec};
use crate::Common;

fn budget(c: &Common) -> Result<MemoryBudget> {
    c.mem_budget.as_deref().map_or(Ok(MemoryBudget::DEFAULT), str::parse)
}

fn precision(c: &Common) -> Result<Precision> {
    c.precision.as_deref().map_or(Ok(Precision::F64), str::parse)
}

fn device(c: &Common, default: &str) -> Result<Arc<DeviceGraph>> {
    Ok(Arc::new(parse::device(c.device.as_deref().unwrap_or(default))?))
}

fn observable(spec: &ObservableSpec, graph: &Arc<DeviceGraph>, steps: usize) -> Result<PauliString> {
    match spec {
        ObservableSpec::Inline(p) => Ok(p.clone()),
        ObservableSpec::Stabilizer { start, steps: s } => {
            derive_stabilizer_observable(graph.clone(), s.unwrap_or(steps), *start)
        }
    }
}

fn subset(graph: &Arc<DeviceGraph>, center: Label, n: usize, mode: BoundaryMode) -> Result<Arc<DeviceGraph>> {
    if n == graph.len() {
        Ok(graph.clone())
    } else {
        Ok(Arc::new(select_subgraph(graph, center, n, mode)?))
    }
}

fn emit_text(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit(report: &Report, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => report.save(path),
        None => report.write_to(std::io::stdout().lock()),
    }
}

fn emit_json(value: &Value, out: &Option<PathBuf>) -> Result<()> {
    emit_text(&format!("{}\n", serde_json::to_string_pretty(value).expect("json values serialize")), out)
}

fn light_cone_circuit(circuit: &Circuit, obs: &PauliString) -> Result<Circuit> {
    prune_to_lightcone(circuit, &backward_lightcone(circuit, obs)?)
}

fn dense_value<T: Real>(circuit: &Circuit, obs: &PauliString, budget: MemoryBudget) -> Result<f64> {
    let mut s = StateVector::<T>::zero_state(circuit.graph().nodes(), budget)?;
    s.apply(circuit)?;
    s.expectation(obs)
}

fn expectation(circuit: &Circuit, obs: &PauliString, precision: Precision, budget: MemoryBudget) -> Result<f64> {
    match precision {
        Precision::F64 => dense_value::<f64>(circuit, obs, budget),
        Precision::F32 => dense_value::<f32>(circuit, obs, budget),
    }
}

struct SweepDefaults {
    steps: usize,
    theta_grid: &'static str,
    qubits: &'static str,
    observable: &'static str,
    boundary: BoundaryMode,
}

/// `⟨obs⟩` on light-cone-pruned Floquet circuits over subsets × θ grid.
fn sweep(c: &Common, command: &str, d: SweepDefaults) -> Result<()> {
    let graph = device(c, "heavy_hex_127")?;
    let steps = c.steps.unwrap_or(d.steps);
    let thetas = parse::theta_grid(c.theta_grid.as_deref().unwrap_or(d.theta_grid))?;
    let sizes = parse::sizes(c.qubits.as_deref().unwrap_or(d.qubits))?;
    let spec = ObservableSpec::parse(c.observable.as_deref().unwrap_or(d.observable))?;
    let obs = observable(&spec, &graph, steps)?;
    let (precision, budget) = (precision(c)?, budget(c)?);

    // Validate every subset and its memory need before any simulation.
    let mut regions = Vec::new();
    for &n in &sizes {
        let region = subset(&graph, spec.center(), n, d.boundary)?;
        for q in obs.support() {
            if !region.contains(q) {
                return Err(Error::Validation(format!("observable qubit {q} outside the {n}-qubit subset")));
            }
        }
        let cone = backward_lightcone(&build_floquet(region.clone(), steps, FRAC_PI_4), &obs)?;
        let needed = precision.bytes_per_amplitude() << cone.qubits().len();
        budget.check(format!("{n}-qubit subset ({} qubits in the light cone)", cone.qubits().len()), needed)?;
        regions.push((n, region));
    }

    let provenance = json!({
        "command": command,
        "device": c.device.as_deref().unwrap_or("heavy_hex_127"),
        "steps": steps,
        "theta_grid": thetas,
        "qubits": sizes,
        "observable": obs.to_string(),
        "boundary": format!("{:?}", d.boundary),
        "precision": precision.to_string(),
        "mem_budget": budget.bytes().to_string(),
    });
    let mut report = Report::new(provenance, &["theta_h", "n", "cone_qubits", "value", "delta_prev_n", "delta_largest_n"])?;
    for &theta in &thetas {
        let mut values = Vec::new();
        for (n, region) in &regions {
            let pruned = light_cone_circuit(&build_floquet(region.clone(), steps, theta), &obs)?;
            let value = expectation(&pruned, &obs, precision, budget)?;
            values.push((*n, pruned.graph().len(), value));
        }
        let largest = values.last().map(|v| v.2).unwrap_or(f64::NAN);
        for (k, &(n, cone, value)) in values.iter().enumerate() {
            let prev = if k == 0 { String::new() } else { format!("{:e}", value - values[k - 1].2) };
            report.push([
                format!("{theta}"),
                n.to_string(),
                cone.to_string(),
                format!("{value}"),
                prev,
                format!("{:e}", value - largest),
            ])?;
        }
    }
    emit(&report, &c.out)
}

pub fn fig4b(c: &Common) -> Result<()> {
    sweep(
        c,
        "fig4b",
        SweepDefaults {
            steps: 20,
            theta_grid: "0:pi/2:17",
            qubits: "20,25,28",
            observable: "Z62",
            boundary: BoundaryMode::ClosedLoops,
        },
    )
}

pub fn fig4a(c: &Common) -> Result<()> {
    sweep(
        c,
        "fig4a",
        SweepDefaults {
            steps: 5,
            theta_grid: "0:pi/2:17",
            qubits: "20,25",
            observable: "stabilizer:Z58",
            boundary: BoundaryMode::ClosedLoops,
        },
    )
}

pub fn convergence(c: &Common) -> Result<()> {
    sweep(
        c,
        "convergence",
        SweepDefaults {
            steps: 5,
            theta_grid: "0:pi/4:5",
            qubits: "7:25",
            observable: "Z62",
            boundary: BoundaryMode::Open,
        },
    )
}

#[derive(Args, Debug, Clone)]
pub struct CostArgs {
    /// Transverse-field angle of the costed circuit.
    #[arg(long, default_value = "pi/4")]
    theta: String,
    /// Cost evaluations spent by the order search per mode.
    #[arg(long, default_value_t = 1_000_000)]
    evaluations: u64,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Keep every two-qubit gate as a single four-index tensor.
    #[arg(long)]
    no_split: bool,
}

pub fn cost(c: &Common, a: &CostArgs) -> Result<()> {
    if a.evaluations == 0 || a.restarts == 0 {
        return Err(Error::Validation("optimizer needs positive evaluations and restarts".into()));
    }
    let graph = device(c, "heavy_hex_127")?;
    let steps = c.steps.unwrap_or(20);
    let theta = parse::angle(&a.theta)?;
    let spec = ObservableSpec::parse(c.observable.as_deref().unwrap_or("Z62"))?;
    let obs = observable(&spec, &graph, steps)?;
    let region = match c.qubits.as_deref() {
        Some(q) => match parse::sizes(q)?.as_slice() {
            [n] => subset(&graph, spec.center(), *n, BoundaryMode::ClosedLoops)?,
            _ => return Err(Error::Validation("cost takes a single subset size".into())),
        },
        None => graph.clone(),
    };
    let pruned = light_cone_circuit(&build_floquet(region.clone(), steps, theta), &obs)?;
    let options = NetworkOptions { split_diagonal: !a.no_split };
    let config = OptimizerConfig { evaluations: a.evaluations, restarts: a.restarts, seed: c.seed.unwrap_or(1) };

    let open_net = network_from_circuit_with(&pruned, &OutputSpec::open_on(&obs), options)?;
    let open = optimize_order(&open_net, &config);
    let closed_net = network_from_circuit_with(&pruned, &OutputSpec::closed_zeros(), options)?;
    let searched = optimize_order(&closed_net, &config);
    let carried = transfer_plan(&open_net, &open, &closed_net)?;
    let closed = if carried.mults < searched.mults { &carried } else { &searched };
    // No multiplications at all is reported as the 2^0 baseline.
    let log2 = |m: f64| if m > 0.0 { m.log2() } else { 0.0 };

    let provenance = json!({
        "command": "cost",
        "device": c.device.as_deref().unwrap_or("heavy_hex_127"),
        "qubits": region.len(),
        "steps": steps,
        "theta_h": theta,
        "observable": obs.to_string(),
        "evaluations": a.evaluations,
        "restarts": a.restarts,
        "seed": config.seed,
        "split_diagonal": options.split_diagonal,
    });
    let mut report = Report::new(provenance, &["quantity", "value"])?;
    let rows: [(&str, String); 9] = [
        ("cone_qubits", pruned.graph().len().to_string()),
        ("two_qubit_gates", pruned.two_qubit_count().to_string()),
        ("open_log2", format!("{:.4}", log2(open.mults))),
        ("open_peak_rank", open.peak_rank.to_string()),
        ("closed_log2", format!("{:.4}", log2(closed.mults))),
        ("closed_peak_rank", closed.peak_rank.to_string()),
        ("closed_search_log2", format!("{:.4}", log2(searched.mults))),
        ("closed_from_open_log2", format!("{:.4}", log2(carried.mults))),
        ("sv_log2", format!("{:.4}", sv_cost(&pruned))),
    ];
    for (k, v) in rows {
        report.push([k.to_string(), v])?;
    }
    emit(&report, &c.out)
}

#[derive(Args, Debug, Clone)]
pub struct PurityArgs {
    /// Entangling gates per circuit.
    #[arg(long, default_value_t = 251)]
    gates: usize,
    /// Comma list of cut qubits; the first half of the device when absent.
    #[arg(long)]
    cut: Option<String>,
    #[arg(long, default_value = "X7")]
    butterfly: String,
    /// `forward` or `echo`.
    #[arg(long, default_value = "forward")]
    style: String,
}

pub fn purity(c: &Common, a: &PurityArgs) -> Result<()> {
    let graph = device(c, "grid:4x5")?;
    let cut = match &a.cut {
        Some(s) => parse::labels(s)?,
        None => graph.nodes()[..graph.len() / 2].to_vec(),
    };
    let style = match a.style.as_str() {
        "forward" => OtocStyle::Forward,
        "echo" => OtocStyle::Echo,
        other => return Err(Error::Validation(format!("unknown OTOC style '{other}'"))),
    };
    let butterfly = parse::single_pauli(&a.butterfly)?;
    let (samples, seed) = (c.shots.unwrap_or(200), c.seed.unwrap_or(0));
    let ensemble = OtocEnsemble { graph: graph.clone(), n_entangling: a.gates, butterfly, style };
    let curve = purity_curve(&ensemble, &cut, samples, seed)?;
    let haar = haar_purity(cut.len(), graph.len());
    let provenance = json!({
        "command": "purity",
        "device": c.device.as_deref().unwrap_or("grid:4x5"),
        "gates": a.gates,
        "cut": cut,
        "butterfly": a.butterfly,
        "butterfly_index": a.gates.div_ceil(2),
        "style": a.style,
        "samples": samples,
        "seed": seed,
        "haar_purity": haar,
    });
    let mut report = Report::new(provenance, &["entangling_gates", "mean_purity", "stderr", "haar_purity"])?;
    for p in curve {
        report.push([p.x.to_string(), format!("{}", p.mean), format!("{}", p.stderr), format!("{haar}")])?;
    }
    emit(&report, &c.out)
}

#[derive(Args, Debug, Clone)]
pub struct DecayArgs {
    /// Fit an existing CSV with columns `theta_h`, `t`, `value` instead of
    /// simulating.
    #[arg(long)]
    input: Option<PathBuf>,
    /// `|value|` below which the magnetization counts as decayed.
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    /// Fit results as JSON lines; standard error when absent.
    #[arg(long)]
    fits: Option<PathBuf>,
}

pub fn decay(c: &Common, a: &DecayArgs) -> Result<()> {
    if !(a.threshold > 0.0 && a.threshold < 1.0) {
        return Err(Error::Validation(format!("threshold must lie in (0, 1), got {}", a.threshold)));
    }
    let options = FitOptions { threshold: a.threshold, ..FitOptions::default() };
    let (series, provenance) = match &a.input {
        Some(path) => {
            let input = Report::parse(&std::fs::read_to_string(path)?)?;
            let thetas = input.column_f64("theta_h")?;
            let points = read_series(&input, "t", "value")?;
            let mut grouped: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
            for (theta, p) in thetas.into_iter().zip(points) {
                match grouped.last_mut() {
                    Some((th, s)) if *th == theta => s.push(p),
                    _ => grouped.push((theta, vec![p])),
                }
            }
            (grouped, json!({"command": "decay", "input": path, "source": input.provenance}))
        }
        None => {
            let graph = device(c, "heavy_hex_127")?;
            let steps = c.steps.unwrap_or(40);
            let thetas = parse::theta_grid(c.theta_grid.as_deref().unwrap_or("16pi/64:28pi/64:7"))?;
            let spec = ObservableSpec::parse(c.observable.as_deref().unwrap_or("Z62"))?;
            let obs = observable(&spec, &graph, steps)?;
            let n = match parse::sizes(c.qubits.as_deref().unwrap_or("20"))?.as_slice() {
                [n] => *n,
                _ => return Err(Error::Validation("decay takes a single subset size".into())),
            };
            let region = subset(&graph, spec.center(), n, BoundaryMode::ClosedLoops)?;
            let (precision, budget) = (precision(c)?, budget(c)?);
            budget.check(format!("{n}-qubit state vector"), precision.bytes_per_amplitude() << n)?;
            let series = thetas
                .iter()
                .map(|&th| Ok((th, floquet_series(region.clone(), &obs, th, steps, precision, budget)?)))
                .collect::<Result<Vec<_>>>()?;
            let provenance = json!({
                "command": "decay",
                "device": c.device.as_deref().unwrap_or("heavy_hex_127"),
                "qubits": n,
                "steps": steps,
                "theta_grid": thetas,
                "observable": obs.to_string(),
                "precision": precision.to_string(),
                "threshold": a.threshold,
            });
            (series, provenance)
        }
    };

    let mut report = Report::new(provenance.clone(), &["theta_h", "t", "value"])?;
    let mut fits = String::new();
    for (theta, s) in &series {
        for &(t, v) in s {
            report.push([format!("{theta}"), format!("{t}"), format!("{v}")])?;
        }
        let row = match fit_decay(s, &options) {
            Ok(f) => json!({
                "theta_h": theta,
                "rate": f.rate,
                "intercept": f.intercept,
                "r2": f.r_squared,
                "window": [f.window.0, f.window.1],
                "steps_to_decay": if f.steps_to_decay.is_finite() { json!(f.steps_to_decay) } else { json!("inf") },
                "threshold": f.threshold,
            }),
            Err(e) => json!({"theta_h": theta, "error": e.to_string()}),
        };
        fits.push_str(&format!("{row}\n"));
    }
    emit(&report, &c.out)?;
    let fits = format!("# {provenance}\n{fits}");
    match &a.fits {
        Some(path) => std::fs::write(path, fits)?,
        None => eprint!("{fits}"),
    }
    Ok(())
}

#[derive(Args, Debug, Clone)]
pub struct TDeltaArgs {
    /// Butterfly velocity in sites per step.
    #[arg(long, default_value_t = 1.0)]
    v: f64,
    /// Target precision.
    #[arg(long)]
    delta: f64,
    /// `square_2d` or `chain_1d`.
    #[arg(long, default_value = "square_2d")]
    geometry: String,
}

pub fn tdelta(c: &Common, a: &TDeltaArgs) -> Result<()> {
    let geometry: Geometry = a.geometry.parse()?;
    let model = ChaoticModel::new(a.v, c.epsilon.unwrap_or(0.0), a.delta, geometry)?;
    let r = solve_t_delta(&model)?;
    emit_json(&json!({"config": {"command": "tdelta", "model": model}, "result": r}), &c.out)
}

#[derive(Args, Debug, Clone)]
pub struct MitigateArgs {
    /// Noisy expectation value.
    #[arg(long, allow_hyphen_values = true)]
    raw: f64,
    /// Effective fidelity; computed as `exp(-epsilon * volume)` when absent.
    #[arg(long)]
    f_eff: Option<f64>,
    /// Effective volume used with `--epsilon`.
    #[arg(long)]
    volume: Option<f64>,
    /// Smallest fidelity accepted.
    #[arg(long, default_value_t = 1e-6)]
    floor: f64,
}

pub fn mitigate(c: &Common, a: &MitigateArgs) -> Result<()> {
    let f_eff = match (a.f_eff, c.epsilon, a.volume) {
        (Some(f), _, _) => f,
        (None, Some(eps), Some(v)) => effective_fidelity(&FidelityModel::new(eps, v)?),
        _ => return Err(Error::Validation("give --f-eff, or both --epsilon and --volume".into())),
    };
    let value = mitigate_with_floor(a.raw, f_eff, a.floor)?;
    emit_json(
        &json!({
            "config": {"command": "mitigate", "raw": a.raw, "f_eff": a.f_eff, "epsilon": c.epsilon, "volume": a.volume, "floor": a.floor},
            "result": {"f_eff": f_eff, "mitigated": value},
        }),
        &c.out,
    )
}
