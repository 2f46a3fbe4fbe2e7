use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{Tensor, TensorNetwork, TensorRole};
use crate::{Error, Result};
use super::plan::{index_sets, is_slice, make_plan, merged, pair_cost, ContractionPlan};

/// Search budget of [`optimize_order`]. Results are deterministic for a
/// fixed configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Candidate merges scored by greedy restarts plus tree moves tried by
    /// annealing.
    pub evaluations: u64,
    /// Greedy restarts; restart 0 is the plain greedy order.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { evaluations: 1_000_000, restarts: 8, seed: 0 }
    }
}

const NONE: usize = usize::MAX;

/// Partially contracted network: live ids and their index sets.
#[derive(Clone)]
struct Forest {
    sets: Vec<Option<FixedBitSet>>,
    merges: Vec<(usize, usize)>,
    /// Up to two live owners of each index.
    owners: Vec<[usize; 2]>,
    /// Id that absorbed each id, or itself while live.
    alias: Vec<usize>,
}

impl Forest {
    fn new(network: &TensorNetwork) -> Self {
        let sets: Vec<Option<FixedBitSet>> = index_sets(network).into_iter().map(Some).collect();
        let mut owners = vec![[NONE; 2]; network.n_indices()];
        for (id, s) in sets.iter().enumerate() {
            for i in s.as_ref().expect("leaf").ones() {
                let slot = if owners[i][0] == NONE { 0 } else { 1 };
                owners[i][slot] = id;
            }
        }
        let alias = (0..sets.len()).collect();
        Forest { sets, merges: Vec::new(), owners, alias }
    }

    fn live(&self) -> Vec<usize> {
        (0..self.sets.len()).filter(|&i| self.sets[i].is_some()).collect()
    }

    fn set(&self, id: usize) -> &FixedBitSet {
        self.sets[id].as_ref().expect("live id")
    }

    fn merge(&mut self, a: usize, b: usize) -> usize {
        let sa = self.sets[a].take().expect("live id");
        let sb = self.sets[b].take().expect("live id");
        let c = merged(&sa, &sb);
        let id = self.sets.len();
        for i in sa.union(&sb) {
            let o = &mut self.owners[i];
            if c.contains(i) {
                for slot in o.iter_mut() {
                    if *slot == a || *slot == b {
                        *slot = id;
                    }
                }
            } else {
                *o = [NONE; 2];
            }
        }
        self.sets.push(Some(c));
        self.merges.push((a, b));
        self.alias.push(id);
        self.alias[a] = id;
        self.alias[b] = id;
        id
    }

    /// Live id that contains `id`.
    fn find(&self, mut id: usize) -> usize {
        while self.alias[id] != id {
            id = self.alias[id];
        }
        id
    }

    fn neighbors(&self, id: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .set(id)
            .ones()
            .flat_map(|i| self.owners[i])
            .filter(|&o| o != NONE && o != id)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Merges every basis projection into the tensor it touches.
    fn absorb_terminals(&mut self, network: &TensorNetwork) {
        let terminals = (0..network.len()).filter(|&i| {
            matches!(network.tensors()[i].role, TensorRole::Input(_) | TensorRole::Output(_))
        });
        self.absorb_terminals_at(network, terminals);
    }

    fn absorb_terminals_at(&mut self, network: &TensorNetwork, ids: impl Iterator<Item = usize>) {
        for t in ids.collect::<Vec<_>>() {
            let index = network.tensors()[t].indices[0] as usize;
            let a = self.find(t);
            if let Some(b) = self.owners[index].iter().copied().find(|&o| o != NONE && o != a) {
                self.merge(a, b);
            }
        }
    }

    /// Merges remaining components, smallest first.
    fn finish(&mut self) {
        let mut live = self.live();
        while live.len() > 1 {
            live.sort_by_key(|&id| (self.set(id).count_ones(..), id));
            let c = self.merge(live[0], live[1]);
            live.drain(..2);
            live.push(c);
        }
    }
}

struct Candidate {
    key: f64,
    a: usize,
    b: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    // Reversed: the heap pops the smallest key.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then(other.a.cmp(&self.a)).then(other.b.cmp(&self.b))
    }
}

/// Greedy pairwise contraction by smallest `size(AB) - α(size(A) + size(B))`,
/// with Gumbel noise of scale `temperature` on a signed-log score.
fn greedy(mut forest: Forest, alpha: f64, temperature: f64, rng: &mut ChaCha8Rng) -> (Forest, u64) {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0u64;
    let mut score = |f: &Forest, a: usize, b: usize, rng: &mut ChaCha8Rng| {
        evaluations += 1;
        let (sa, sb) = (f.set(a), f.set(b));
        let size = |s: &FixedBitSet| (s.count_ones(..) as f64).exp2();
        let rc = (sa.union_count(sb) - sa.intersection_count(sb)) as f64;
        let raw = rc.exp2() - alpha * (size(sa) + size(sb));
        let mut key = raw.signum() * raw.abs().ln_1p();
        if temperature > 0.0 {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            key -= temperature * -(-u.ln()).ln();
        }
        Candidate { key, a: a.min(b), b: a.max(b) }
    };
    for a in forest.live() {
        for b in forest.neighbors(a) {
            if a < b {
                heap.push(score(&forest, a, b, rng));
            }
        }
    }
    while let Some(Candidate { a, b, .. }) = heap.pop() {
        if forest.sets[a].is_none() || forest.sets[b].is_none() {
            continue;
        }
        let c = forest.merge(a, b);
        for nb in forest.neighbors(c) {
            heap.push(score(&forest, c, nb, rng));
        }
    }
    forest.finish();
    (forest, evaluations)
}

/// Folds tensors into one growing tensor in circuit time order.
fn time_ordered(mut forest: Forest, network: &TensorNetwork) -> Forest {
    let mut order: Vec<usize> = Vec::new();
    for &leaf in network.time_order() {
        let r = forest.find(leaf);
        if !order.contains(&r) {
            order.push(r);
        }
    }
    for id in forest.live() {
        if !order.contains(&id) {
            order.push(id);
        }
    }
    let mut acc = None;
    for id in order {
        acc = Some(match acc {
            None => id,
            Some(a) => forest.merge(a, id),
        });
    }
    forest
}

/// Merge tree with parent links for local rotations.
struct Tree {
    n_leaves: usize,
    children: Vec<(usize, usize)>,
    parent: Vec<usize>,
    sets: Vec<FixedBitSet>,
    slice: Vec<bool>,
    cost: Vec<f64>,
}

impl Tree {
    fn new(network: &TensorNetwork, merges: &[(usize, usize)]) -> Self {
        let n = network.len();
        let mut sets = index_sets(network);
        let mut parent = vec![NONE; n + merges.len()];
        let mut slice: Vec<bool> = (0..n).map(|i| is_slice(network, i)).collect();
        let mut cost = Vec::with_capacity(merges.len());
        for (k, &(a, b)) in merges.iter().enumerate() {
            parent[a] = n + k;
            parent[b] = n + k;
            cost.push(pair_cost(slice[a], slice[b], &sets[a], &sets[b]));
            let c = merged(&sets[a], &sets[b]);
            sets.push(c);
            slice.push(slice[a] && slice[b]);
        }
        Tree { n_leaves: n, children: merges.to_vec(), parent, sets, slice, cost }
    }

    fn is_internal(&self, id: usize) -> bool {
        id >= self.n_leaves
    }

    /// Re-emits the tree bottom-up as a merge list.
    fn merges(&self) -> Vec<(usize, usize)> {
        if self.children.is_empty() {
            return Vec::new();
        }
        let root = (self.n_leaves..self.n_leaves + self.children.len())
            .find(|&id| self.parent[id] == NONE)
            .expect("tree has a root");
        let mut new_id = vec![NONE; self.parent.len()];
        let mut out = Vec::with_capacity(self.children.len());
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if !self.is_internal(id) {
                new_id[id] = id;
                continue;
            }
            let (l, r) = self.children[id - self.n_leaves];
            if expanded {
                out.push((new_id[l], new_id[r]));
                new_id[id] = self.n_leaves + out.len() - 1;
            } else {
                stack.push((id, true));
                stack.push((r, false));
                stack.push((l, false));
            }
        }
        out
    }
}

/// Simulated annealing over subtree rotations `((A,B),C) → ((C,B),A)`.
fn anneal(network: &TensorNetwork, merges: &[(usize, usize)], moves: u64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if merges.len() < 2 || moves == 0 {
        return merges.to_vec();
    }
    let mut tree = Tree::new(network, merges);
    let n = tree.n_leaves;
    let mut total: f64 = tree.cost.iter().sum();
    let (t_start, t_end) = (0.3f64, 0.003f64);
    for step in 0..moves {
        let temperature = t_start * (t_end / t_start).powf(step as f64 / moves as f64);
        let x = n + rng.gen_range(0..tree.children.len());
        let (l, r) = tree.children[x - n];
        let (y, c, y_left) = if rng.gen() { (l, r, true) } else { (r, l, false) };
        if !tree.is_internal(y) {
            continue;
        }
        let (a, b) = tree.children[y - n];
        let (moved, kept) = if rng.gen() { (a, b) } else { (b, a) };
        let new_y_set = merged(&tree.sets[c], &tree.sets[kept]);
        let new_y_slice = tree.slice[c] && tree.slice[kept];
        let new_y_cost = pair_cost(tree.slice[c], tree.slice[kept], &tree.sets[c], &tree.sets[kept]);
        let new_x_cost = pair_cost(new_y_slice, tree.slice[moved], &new_y_set, &tree.sets[moved]);
        let delta = new_y_cost + new_x_cost - tree.cost[y - n] - tree.cost[x - n];
        let candidate = total + delta;
        let accept = delta <= 0.0 || rng.gen::<f64>() < (-(candidate.log2() - total.log2()) / temperature).exp();
        if !accept {
            continue;
        }
        total = candidate;
        tree.children[y - n] = (c, kept);
        tree.children[x - n] = if y_left { (y, moved) } else { (moved, y) };
        tree.parent[c] = y;
        tree.parent[moved] = x;
        tree.sets[y] = new_y_set;
        tree.slice[y] = new_y_slice;
        tree.cost[y - n] = new_y_cost;
        tree.cost[x - n] = new_x_cost;
    }
    tree.merges()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn par_map<T: Send, R: Send>(items: Vec<T>, f: impl Fn(T) -> R + Send + Sync) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Searches for a cheap contraction order.
///
/// Basis projections are first merged into their neighbours. Candidates
/// come from greedy restarts (the first one noise-free) and from folding in
/// circuit time order. The best few are refined by annealing with the
/// evaluations the restarts left over. When outputs are projected, the same
/// search also runs on the network with every output left open and its plan
/// is carried over, so projecting outputs never makes the result worse.
/// Disconnected components are contracted separately and joined last.
pub fn optimize_order(network: &TensorNetwork, config: &OptimizerConfig) -> ContractionPlan {
    let plan = search(network, config);
    let Some(relaxed) = network.relaxed() else { return plan };
    let carried = transfer_plan(&relaxed, &search(&relaxed, config), network).expect("relaxation matches");
    if carried.mults < plan.mults {
        carried
    } else {
        plan
    }
}

/// Carries a plan of `from` over to `to`, a network of the same circuit with
/// more outputs projected. The extra projections are sliced into their
/// neighbours first, so the result never costs more than `plan`.
pub fn transfer_plan(from: &TensorNetwork, plan: &ContractionPlan, to: &TensorNetwork) -> Result<ContractionPlan> {
    if plan.n_tensors != from.len() {
        return Err(Error::validation("plan does not belong to the source network"));
    }
    plan.validate()?;
    let key = |t: &Tensor| (t.role, t.indices.clone());
    let position: HashMap<_, usize> = to.tensors().iter().enumerate().map(|(i, t)| (key(t), i)).collect();
    let leaf_map: Vec<usize> = from
        .tensors()
        .iter()
        .map(|t| position.get(&key(t)).copied())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::validation("target network is not a projection of the source network"))?;
    let mapped: HashSet<usize> = leaf_map.iter().copied().collect();
    if to.tensors().iter().enumerate().any(|(i, t)| !mapped.contains(&i) && !matches!(t.role, TensorRole::Output(_))) {
        return Err(Error::validation("target network has tensors beyond extra output projections"));
    }
    let mut forest = Forest::new(to);
    forest.absorb_terminals_at(to, (0..to.len()).filter(|i| !mapped.contains(i)));
    let mut ids: Vec<usize> = leaf_map.iter().map(|&leaf| forest.find(leaf)).collect();
    for &(a, b) in &plan.merges {
        let c = forest.merge(ids[a], ids[b]);
        ids.push(c);
    }
    forest.finish();
    Ok(make_plan(to, forest.merges))
}

fn search(network: &TensorNetwork, config: &OptimizerConfig) -> ContractionPlan {
    let mut base = Forest::new(network);
    base.absorb_terminals(network);

    let restarts = config.restarts.max(1);
    let greedy_runs = par_map((0..restarts).collect(), |r| {
        let mut rng = rng_for(config.seed, r as u64);
        let (alpha, temperature) = if r == 0 { (1.0, 0.0) } else { (rng.gen_range(0.5..1.5), rng.gen_range(0.02..1.0)) };
        let (forest, evals) = greedy(base.clone(), alpha, temperature, &mut rng);
        (make_plan(network, forest.merges), evals)
    });
    let used: u64 = greedy_runs.iter().map(|(_, e)| e).sum();
    let mut candidates: Vec<ContractionPlan> = greedy_runs.into_iter().map(|(p, _)| p).collect();
    candidates.push(make_plan(network, time_ordered(base.clone(), network).merges));
    candidates.sort_by(|a, b| a.mults.total_cmp(&b.mults));
    candidates.dedup_by(|a, b| a.merges == b.merges);

    let keep = candidates.len().min(4);
    let moves = config.evaluations.saturating_sub(used) / keep as u64;
    let refined = par_map(candidates.drain(..keep).enumerate().collect(), |(k, plan)| {
        let mut rng = rng_for(config.seed, (restarts + k) as u64);
        let merges = anneal(network, &plan.merges, moves, &mut rng);
        let annealed = make_plan(network, merges);
        if annealed.mults < plan.mults {
            annealed
        } else {
            plan
        }
    });
    refined.into_iter().min_by(|a, b| a.mults.total_cmp(&b.mults)).expect("at least one candidate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::C64;

    fn network_of(index_lists: &[&[u32]]) -> TensorNetwork {
        let n_indices = index_lists.iter().flat_map(|l| l.iter()).max().map_or(0, |m| m + 1) as usize;
        let tensors = index_lists
            .iter()
            .enumerate()
            .map(|(k, l)| Tensor {
                indices: l.to_vec(),
                data: vec![C64::new(1.0, 0.0); 1 << l.len()],
                role: TensorRole::Gate(k),
            })
            .collect();
        TensorNetwork { tensors, n_indices, open: Vec::new(), time_order: (0..index_lists.len()).collect() }
    }

    #[test]
    fn trivial_networks() {
        let single = network_of(&[&[0, 1]]);
        let plan = optimize_order(&single, &OptimizerConfig::default());
        assert!(plan.merges.is_empty());
        assert_eq!(plan.mults, 0.0);
        let pair = network_of(&[&[0], &[0]]);
        let plan = optimize_order(&pair, &OptimizerConfig::default());
        assert_eq!(plan.cost_log2(), 1.0);
    }

    #[test]
    fn disconnected_components_are_joined() {
        let net = network_of(&[&[0, 1], &[1, 2], &[3, 4], &[4, 5]]);
        let plan = optimize_order(&net, &OptimizerConfig::default());
        assert_eq!(plan.merges.len(), 3);
        assert_eq!(plan.mults, 8.0 + 8.0 + 16.0);
    }

    #[test]
    fn rotations_keep_a_valid_tree() {
        let net = network_of(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[4, 5], &[5, 0]]);
        let mut rng = rng_for(1, 0);
        let chain: Vec<(usize, usize)> = vec![(0, 1), (6, 2), (7, 3), (8, 4), (9, 5)];
        let merges = anneal(&net, &chain, 500, &mut rng);
        let plan = make_plan(&net, merges);
        plan.validate().unwrap();
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let net = network_of(&[&[0, 1, 2], &[1, 3], &[2, 3, 4], &[4, 5], &[5, 0, 6], &[6]]);
        let cfg = OptimizerConfig { evaluations: 5000, restarts: 4, seed: 11 };
        assert_eq!(optimize_order(&net, &cfg), optimize_order(&net, &cfg));
    }

    /// Exact matrix-chain optimum for dimensions `2^bits[i]`.
    fn chain_optimum(bits: &[u32]) -> f64 {
        let n = bits.len() - 1;
        let dim = |i: usize| (bits[i] as f64).exp2();
        let mut best = vec![vec![0.0f64; n]; n];
        for len in 1..n {
            for i in 0..n - len {
                let j = i + len;
                best[i][j] = (i..j)
                    .map(|k| best[i][k] + best[k + 1][j] + dim(i) * dim(k + 1) * dim(j + 1))
                    .fold(f64::INFINITY, f64::min);
            }
        }
        best[0][n - 1]
    }

    #[test]
    fn matrix_chains_reach_the_optimum() {
        let mut rng = rng_for(99, 0);
        for trial in 0..40 {
            let n = rng.gen_range(2..=12);
            let bits: Vec<u32> = (0..=n).map(|_| rng.gen_range(1..=5)).collect();
            let mut next = 0u32;
            let bonds: Vec<Vec<u32>> = bits
                .iter()
                .map(|&b| {
                    let v: Vec<u32> = (next..next + b).collect();
                    next += b;
                    v
                })
                .collect();
            let lists: Vec<Vec<u32>> = (0..n).map(|i| bonds[i].iter().chain(&bonds[i + 1]).copied().collect()).collect();
            let refs: Vec<&[u32]> = lists.iter().map(Vec::as_slice).collect();
            let net = network_of(&refs);
            let plan = optimize_order(&net, &OptimizerConfig { evaluations: 200_000, restarts: 8, seed: trial });
            assert_eq!(plan.mults, chain_optimum(&bits), "trial {trial}: bits {bits:?}");
        }
    }
}
