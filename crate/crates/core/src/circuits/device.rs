use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Qubit label as used on the device drawing.
pub type Label = u32;

const HEAVY_HEX_127: &str = include_str!("../../data/heavy_hex_127.json");

/// Qubit lattice with labeled nodes and nearest-neighbor couplers.
///
/// Nodes are kept sorted by label and edges are stored as `(low, high)` pairs
/// in ascending order, so two graphs with the same content compare equal
/// regardless of how they were built.
#[derive(Clone, Debug)]
pub struct DeviceGraph {
    name: Option<String>,
    nodes: Vec<Label>,
    edges: Vec<(Label, Label)>,
    coords: Option<BTreeMap<Label, (f64, f64)>>,
    adjacency: Vec<Vec<usize>>,
}

impl PartialEq for DeviceGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges && self.coords == other.coords
    }
}

/// Named layouts understood by [`build_device`].
#[derive(Clone, Debug, PartialEq)]
pub enum LayoutSpec {
    HeavyHex127,
    Chain(usize),
    Grid { rows: usize, cols: usize },
    Custom {
        nodes: Vec<Label>,
        edges: Vec<(Label, Label)>,
    },
}

impl FromStr for LayoutSpec {
    type Err = Error;

    /// Accepts `heavy_hex_127`, `chain:N`, `chain(N)`, `grid:RxC` and `grid(R,C)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::validation(format!("unknown device layout '{s}'"));
        if s == "heavy_hex_127" || s == "heavy-hex-127" {
            return Ok(LayoutSpec::HeavyHex127);
        }
        let (head, args) = if let Some(rest) = s.strip_suffix(')') {
            let open = rest.find('(').ok_or_else(bad)?;
            (&rest[..open], &rest[open + 1..])
        } else if let Some((h, a)) = s.split_once(':') {
            (h, a)
        } else {
            return Err(bad());
        };
        let nums: Vec<usize> = args
            .split([',', 'x', 'X'])
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match (head.trim(), nums.as_slice()) {
            ("chain", [n]) => Ok(LayoutSpec::Chain(*n)),
            ("grid", [r, c]) => Ok(LayoutSpec::Grid { rows: *r, cols: *c }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for LayoutSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutSpec::HeavyHex127 => write!(f, "heavy_hex_127"),
            LayoutSpec::Chain(n) => write!(f, "chain:{n}"),
            LayoutSpec::Grid { rows, cols } => write!(f, "grid:{rows}x{cols}"),
            LayoutSpec::Custom { nodes, edges } => {
                write!(f, "custom({} nodes, {} edges)", nodes.len(), edges.len())
            }
        }
    }
}

/// Builds and validates a device graph from a layout name or explicit spec.
pub fn build_device(spec: &LayoutSpec) -> Result<DeviceGraph> {
    match spec {
        LayoutSpec::HeavyHex127 => Ok(DeviceGraph::heavy_hex_127()),
        LayoutSpec::Chain(n) => DeviceGraph::chain(*n),
        LayoutSpec::Grid { rows, cols } => DeviceGraph::grid(*rows, *cols),
        LayoutSpec::Custom { nodes, edges } => DeviceGraph::new(nodes.clone(), edges.clone(), None),
    }
}

impl DeviceGraph {
    /// Validates and builds a graph. Duplicate nodes, self loops, dangling
    /// endpoints and duplicate edges are rejected with the offending element
    /// named in the error.
    pub fn new(
        nodes: Vec<Label>,
        edges: Vec<(Label, Label)>,
        coords: Option<BTreeMap<Label, (f64, f64)>>,
    ) -> Result<Self> {
        let mut sorted = nodes;
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::validation(format!("duplicate node {}", w[0])));
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a == b {
                return Err(Error::validation(format!("self-loop edge ({a}, {b})")));
            }
            for end in [a, b] {
                if sorted.binary_search(&end).is_err() {
                    return Err(Error::validation(format!(
                        "edge ({a}, {b}) references unknown node {end}"
                    )));
                }
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::validation(format!("duplicate edge ({a}, {b})")));
            }
        }
        if let Some(c) = &coords {
            if let Some(l) = c.keys().find(|l| sorted.binary_search(l).is_err()) {
                return Err(Error::validation(format!("coordinate for unknown node {l}")));
            }
        }
        let edges: Vec<(Label, Label)> = seen.into_iter().collect();
        let mut adjacency = vec![Vec::new(); sorted.len()];
        for &(a, b) in &edges {
            let ia = sorted.binary_search(&a).unwrap();
            let ib = sorted.binary_search(&b).unwrap();
            adjacency[ia].push(ib);
            adjacency[ib].push(ia);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(DeviceGraph {
            name: None,
            nodes: sorted,
            edges,
            coords,
            adjacency,
        })
    }

    /// The 127-qubit heavy-hex device. Labels run row by row from the top:
    /// long rows of 14/15 qubits alternate with bridge rows of 4, which puts
    /// label 62 at the center of the lattice.
    pub fn heavy_hex_127() -> Self {
        let mut g = DeviceGraph::from_json(HEAVY_HEX_127).expect("bundled heavy-hex layout is valid");
        g.name = Some("heavy_hex_127".into());
        g
    }

    pub fn chain(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("chain needs at least one qubit"));
        }
        let nodes: Vec<Label> = (0..n as Label).collect();
        let edges = (1..n as Label).map(|i| (i - 1, i)).collect();
        let coords = nodes.iter().map(|&i| (i, (i as f64, 0.0))).collect();
        let mut g = DeviceGraph::new(nodes, edges, Some(coords))?;
        g.name = Some(format!("chain:{n}"));
        Ok(g)
    }

    /// Row-major grid: label `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::validation("grid dimensions must be positive"));
        }
        let label = |r: usize, c: usize| (r * cols + c) as Label;
        let mut edges = Vec::new();
        let mut coords = BTreeMap::new();
        for r in 0..rows {
            for c in 0..cols {
                coords.insert(label(r, c), (c as f64, -(r as f64)));
                if c + 1 < cols {
                    edges.push((label(r, c), label(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((label(r, c), label(r + 1, c)));
                }
            }
        }
        let mut g = DeviceGraph::new((0..(rows * cols) as Label).collect(), edges, Some(coords))?;
        g.name = Some(format!("grid:{rows}x{cols}"));
        Ok(g)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn nodes(&self) -> &[Label] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(Label, Label)] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&BTreeMap<Label, (f64, f64)>> {
        self.coords.as_ref()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, label: Label) -> bool {
        self.index_of(label).is_some()
    }

    /// Position of `label` in the sorted node list.
    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.nodes.binary_search(&label).ok()
    }

    pub fn has_edge(&self, a: Label, b: Label) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn neighbors(&self, label: Label) -> impl Iterator<Item = Label> + '_ {
        let list = self
            .index_of(label)
            .map(|i| self.adjacency[i].as_slice())
            .unwrap_or(&[]);
        list.iter().map(|&j| self.nodes[j])
    }

    pub fn degree(&self, label: Label) -> usize {
        self.index_of(label).map_or(0, |i| self.adjacency[i].len())
    }

    /// Number of nodes per degree.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for list in &self.adjacency {
            *h.entry(list.len()).or_insert(0) += 1;
        }
        h
    }

    /// Breadth-first graph distances from `origin`; unreachable nodes are absent.
    pub fn distances_from(&self, origin: Label) -> BTreeMap<Label, usize> {
        let mut dist = BTreeMap::new();
        let Some(start) = self.index_of(origin) else {
            return dist;
        };
        let mut d = vec![usize::MAX; self.nodes.len()];
        d[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for &j in &self.adjacency[i] {
                if d[j] == usize::MAX {
                    d[j] = d[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        for (i, &di) in d.iter().enumerate() {
            if di != usize::MAX {
                dist.insert(self.nodes[i], di);
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.nodes.is_empty() || self.distances_from(self.nodes[0]).len() == self.nodes.len()
    }

    /// Induced subgraph on `keep` (labels not in the graph are an error).
    pub fn induced_subgraph(&self, keep: &[Label]) -> Result<DeviceGraph> {
        let set: BTreeSet<Label> = keep.iter().copied().collect();
        if let Some(l) = set.iter().find(|&&l| !self.contains(l)) {
            return Err(Error::validation(format!("node {l} is not in the device")));
        }
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| set.contains(a) && set.contains(b))
            .copied()
            .collect();
        let coords = self
            .coords
            .as_ref()
            .map(|c| c.iter().filter(|(l, _)| set.contains(l)).map(|(&l, &p)| (l, p)).collect());
        DeviceGraph::new(set.into_iter().collect(), edges, coords)
    }

    /// Greedy edge coloring over edges in ascending label order; returns one
    /// color per entry of [`DeviceGraph::edges`]. Deterministic for a given graph.
    pub fn edge_coloring(&self) -> Vec<usize> {
        let mut used: Vec<u64> = vec![0; self.nodes.len()];
        let mut colors = Vec::with_capacity(self.edges.len());
        for &(a, b) in &self.edges {
            let ia = self.index_of(a).unwrap();
            let ib = self.index_of(b).unwrap();
            let taken = used[ia] | used[ib];
            let c = (!taken).trailing_zeros() as usize;
            used[ia] |= 1 << c;
            used[ib] |= 1 << c;
            colors.push(c);
        }
        colors
    }

    /// Edges grouped into parallel layers by [`DeviceGraph::edge_coloring`].
    pub fn edge_layers(&self) -> Vec<Vec<(Label, Label)>> {
        let colors = self.edge_coloring();
        let n = colors.iter().max().map_or(0, |c| c + 1);
        let mut layers = vec![Vec::new(); n];
        for (e, c) in self.edges.iter().zip(colors) {
            layers[c].push(*e);
        }
        layers
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DeviceDoc::from(self)).expect("device serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DeviceDoc = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        doc.try_into()
    }
}

/// Structured-text form of a device: `{name?, nodes, edges, coords?}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct DeviceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub nodes: Vec<Label>,
    pub edges: Vec<[Label; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<BTreeMap<String, [f64; 2]>>,
}

impl From<&DeviceGraph> for DeviceDoc {
    fn from(g: &DeviceGraph) -> Self {
        DeviceDoc {
            name: g.name.clone(),
            nodes: g.nodes.clone(),
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            coords: g
                .coords
                .as_ref()
                .map(|c| c.iter().map(|(l, &(x, y))| (l.to_string(), [x, y])).collect()),
        }
    }
}

impl TryFrom<DeviceDoc> for DeviceGraph {
    type Error = Error;

    fn try_from(doc: DeviceDoc) -> Result<Self> {
        let coords = match doc.coords {
            None => None,
            Some(map) => {
                let mut out = BTreeMap::new();
                for (k, [x, y]) in map {
                    let l: Label = k
                        .parse()
                        .map_err(|_| Error::parse(format!("coords.{k}"), "label is not an integer"))?;
                    out.insert(l, (x, y));
                }
                Some(out)
            }
        };
        let edges = doc.edges.iter().map(|&[a, b]| (a, b)).collect();
        let mut g = DeviceGraph::new(doc.nodes, edges, coords)
            .map_err(|e| Error::parse("device", e.to_string()))?;
        g.name = doc.name;
        Ok(g)
    }
}
