use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::str::FromStr;

use super::device::{DeviceGraph, Label};
use crate::{Error, Result};

/// Growth rule for [`select_subgraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    /// Prefer nodes that close loops: first the nodes on the shortest cycles
    /// through the center, then any node with two or more neighbors already
    /// selected, then plain breadth-first order.
    #[default]
    ClosedLoops,
    /// Breadth-first distance only, ties broken by label.
    Open,
}

impl FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "closed" | "closed_loops" => Ok(BoundaryMode::ClosedLoops),
            "open" => Ok(BoundaryMode::Open),
            other => Err(Error::validation(format!("unknown boundary mode '{other}'"))),
        }
    }
}

/// Connected induced subgraph of `target_n` nodes grown around `center`.
///
/// Candidates are nodes adjacent to the current selection, ranked
/// lexicographically by (loop tier, distance from center, label).
pub fn select_subgraph(
    graph: &DeviceGraph,
    center: Label,
    target_n: usize,
    mode: BoundaryMode,
) -> Result<DeviceGraph> {
    if !graph.contains(center) {
        return Err(Error::validation(format!("center {center} not in device")));
    }
    let dist = graph.distances_from(center);
    if target_n == 0 || target_n > dist.len() {
        return Err(Error::validation(format!(
            "target size {target_n} outside 1..={} (component of {center})",
            dist.len()
        )));
    }
    let on_center_cycle = match mode {
        BoundaryMode::ClosedLoops => shortest_cycle_nodes(graph, center),
        BoundaryMode::Open => BTreeSet::new(),
    };

    let mut selected: BTreeSet<Label> = BTreeSet::from([center]);
    while selected.len() < target_n {
        let best = selected
            .iter()
            .flat_map(|&s| graph.neighbors(s))
            .filter(|n| !selected.contains(n))
            .map(|n| {
                let tier = match mode {
                    BoundaryMode::Open => 0,
                    BoundaryMode::ClosedLoops => {
                        if on_center_cycle.contains(&n) {
                            0
                        } else if graph.neighbors(n).filter(|m| selected.contains(m)).count() >= 2 {
                            1
                        } else {
                            2
                        }
                    }
                };
                (tier, dist[&n], n)
            })
            .min()
            .expect("component has room");
        selected.insert(best.2);
    }
    let nodes: Vec<Label> = selected.into_iter().collect();
    let sub = graph.induced_subgraph(&nodes)?;
    Ok(match graph.name() {
        Some(name) => sub.with_name(format!("{name}[{center};{target_n}]")),
        None => sub,
    })
}

/// Nodes lying on any minimum-length cycle through `center`.
fn shortest_cycle_nodes(graph: &DeviceGraph, center: Label) -> BTreeSet<Label> {
    let nbrs: Vec<Label> = graph.neighbors(center).collect();
    // Distances avoiding `center`, from each neighbor.
    let dists: Vec<BTreeMap<Label, usize>> = nbrs.iter().map(|&a| bfs_avoiding(graph, a, center)).collect();
    let mut best = usize::MAX;
    let mut pairs = Vec::new();
    for i in 0..nbrs.len() {
        for j in i + 1..nbrs.len() {
            if let Some(&d) = dists[i].get(&nbrs[j]) {
                match d.cmp(&best) {
                    std::cmp::Ordering::Less => {
                        best = d;
                        pairs = vec![(i, j)];
                    }
                    std::cmp::Ordering::Equal => pairs.push((i, j)),
                    std::cmp::Ordering::Greater => {}
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for (i, j) in pairs {
        out.insert(center);
        for (&v, &di) in &dists[i] {
            if let Some(&dj) = dists[j].get(&v) {
                if di + dj == best {
                    out.insert(v);
                }
            }
        }
    }
    out
}

fn bfs_avoiding(graph: &DeviceGraph, start: Label, banned: Label) -> BTreeMap<Label, usize> {
    let mut dist = BTreeMap::from([(start, 0usize)]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for n in graph.neighbors(v) {
            if n != banned && !dist.contains_key(&n) {
                dist.insert(n, d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}
