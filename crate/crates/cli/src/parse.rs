//! Value parsers for command-line flags.

use std::f64::consts::PI;
use std::path::Path;

use effvol::circuits::{build_device, DeviceGraph, Label, LayoutSpec, Pauli, PauliString};
use effvol::{Error, Result};

/// Angle such as `0.3`, `pi`, `3pi/8`, `3*pi/8` or `-pi/4`.
pub fn angle(s: &str) -> Result<f64> {
    let bad = || Error::Validation(format!("invalid angle '{s}'"));
    let t: String = s.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().map_err(|_| bad())?),
        None => (t.clone(), 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let v = value / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// `start:stop:count` (inclusive, evenly spaced) or a comma list of angles.
pub fn theta_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (angle(a)?, angle(b)?);
            let n: usize = n.trim().parse().map_err(|_| Error::Validation(format!("invalid grid count in '{s}'")))?;
            match n {
                0 => Err(Error::Validation("theta grid needs at least one point".into())),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
            }
        }
        [_] => s.split(',').map(angle).collect(),
        _ => Err(Error::Validation(format!("invalid theta grid '{s}'"))),
    }
}

/// Comma list of sizes; `a:b` expands to every size in `a..=b`.
pub fn sizes(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Validation(format!("invalid qubit list '{s}'"));
    let mut out = Vec::new();
    for part in s.split(',') {
        match part.split_once(':') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.trim().parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

pub fn labels(s: &str) -> Result<Vec<Label>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Validation(format!("invalid qubit label '{t}'"))))
        .collect()
}

/// Named layout or path to a device JSON file.
pub fn device(s: &str) -> Result<DeviceGraph> {
    if Path::new(s).is_file() {
        return DeviceGraph::from_json(&std::fs::read_to_string(s)?);
    }
    build_device(&s.parse::<LayoutSpec>()?)
}

/// Single-qubit Pauli with label, e.g. `Z58` or `X7`.
pub fn single_pauli(s: &str) -> Result<(Label, Pauli)> {
    let p: PauliString = s.parse()?;
    match p.iter().collect::<Vec<_>>().as_slice() {
        [(q, pauli)] => Ok((*q, *pauli)),
        _ => Err(Error::Validation(format!("expected a single-qubit Pauli, got '{s}'"))),
    }
}

/// Observable flag: an inline Pauli string, or `stabilizer:Z58` /
/// `stabilizer:Z58@5` for the Clifford image of a single-qubit Pauli.
#[derive(Clone, Debug, PartialEq)]
pub enum ObservableSpec {
    Inline(PauliString),
    Stabilizer { start: (Label, Pauli), steps: Option<usize> },
}

impl ObservableSpec {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().strip_prefix("stabilizer:") {
            Some(rest) => {
                let (p, steps) = match rest.split_once('@') {
                    Some((p, k)) => {
                        let k = k.trim().parse().map_err(|_| Error::Validation(format!("invalid step count in '{s}'")))?;
                        (p, Some(k))
                    }
                    None => (rest, None),
                };
                Ok(ObservableSpec::Stabilizer { start: single_pauli(p)?, steps })
            }
            None => {
                let p: PauliString = s.parse()?;
                p.require_nonempty()?;
                Ok(ObservableSpec::Inline(p))
            }
        }
    }

    /// Qubit the subsets are grown around.
    pub fn center(&self) -> Label {
        match self {
            ObservableSpec::Inline(p) => p.support()[0],
            ObservableSpec::Stabilizer { start, .. } => start.0,
        }
    }
}
