//! Breadth-first exploration of the exchange graph with exact fingerprints.

use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ClusterError, Result};
use crate::positive::{base_a_points, base_x_points, MutationStep, BASE_POINTS};
use crate::scalar::{format_rational, height_bits};
use crate::seed::{seed_isomorphisms, Seed, SeedIso};
use crate::word::{MappingClassWord, Step};

/// Exact identity of an unlabeled cluster: exchange matrix, A-values and
/// X-values at the base points, with mutable vertices sorted by their
/// A-values. Frozen vertices keep their positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub epsilon: Vec<Vec<BigRational>>,
    pub a: Vec<Vec<BigRational>>,
    pub x: Vec<Vec<BigRational>>,
}

impl Fingerprint {
    /// Stable hex digest of the exact values.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (tag, rows) in [("e", &self.epsilon), ("a", &self.a), ("x", &self.x)] {
            h.update(tag.as_bytes());
            for row in rows.iter() {
                h.update(b"[");
                for v in row {
                    h.update(format_rational(v).as_bytes());
                    h.update(b",");
                }
            }
        }
        hex::encode(h.finalize())
    }
}

/// Digest of one cluster variable, from its values at the base points.
pub fn vertex_digest(values: &[BigRational]) -> String {
    let mut h = Sha256::new();
    for v in values {
        h.update(format_rational(v).as_bytes());
        h.update(b",");
    }
    hex::encode(h.finalize())
}

/// A labeled seed with the exact coordinates of the base points in its
/// chart: `a[p][i]` and `x[p][j]` for base point `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartState {
    pub seed: Seed,
    pub a: Vec<Vec<BigRational>>,
    pub x: Vec<Vec<BigRational>>,
}

impl ChartState {
    pub fn base(seed: &Seed) -> Self {
        ChartState {
            seed: seed.clone(),
            a: base_a_points(seed, BASE_POINTS),
            x: base_x_points(seed, BASE_POINTS),
        }
    }

    pub fn mutate(&self, k: usize) -> Result<Self> {
        let step = MutationStep::new(&self.seed, k)?;
        let mut a = self.a.clone();
        let mut x = self.x.clone();
        for p in a.iter_mut() {
            step.apply_a(p);
        }
        for p in x.iter_mut() {
            step.apply_x(p);
        }
        Ok(ChartState { seed: self.seed.mutate(k)?, a, x })
    }

    /// Relabels the chart by `sigma` (old vertex `i` becomes `sigma(i)`).
    pub fn relabel(&self, sigma: &SeedIso) -> Result<Self> {
        if !sigma.fixes_frozen(&self.seed) || sigma.len() != self.seed.rank() {
            return Err(ClusterError::InvalidStep { step: 0, reason: "permutation must fix frozen vertices".into() });
        }
        let seed = self.seed.relabel(sigma);
        let a = self
            .a
            .iter()
            .map(|p| {
                let mut q = p.clone();
                for (i, v) in p.iter().enumerate() {
                    q[sigma.apply(i)] = v.clone();
                }
                q
            })
            .collect();
        let mutable = self.seed.mutable_indices();
        let x = self
            .x
            .iter()
            .map(|p| {
                let mut q = p.clone();
                for (pos, &i) in mutable.iter().enumerate() {
                    q[self.seed.mutable_position(sigma.apply(i)).expect("frozen fixed")] = p[pos].clone();
                }
                q
            })
            .collect();
        Ok(ChartState { seed, a, x })
    }

    /// Fingerprint in the chart's own labelling, without sorting.
    pub fn labeled_fingerprint(&self) -> Fingerprint {
        Fingerprint { epsilon: self.seed.epsilon().to_vec(), a: self.a.clone(), x: self.x.clone() }
    }

    /// Values of vertex `i` at every base point.
    pub fn vertex_values(&self, i: usize) -> Vec<BigRational> {
        self.a.iter().map(|p| p[i].clone()).collect()
    }

    /// Labels in canonical order: frozen vertices in place, then mutable
    /// vertices sorted by their A-values.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut order = self.seed.frozen_indices();
        let mut mutable = self.seed.mutable_indices();
        mutable.sort_by_cached_key(|&i| self.vertex_values(i));
        order.extend(mutable);
        order
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let order = self.canonical_order();
        let epsilon = order
            .iter()
            .map(|&i| order.iter().map(|&j| self.seed.eps(i, j).clone()).collect())
            .collect();
        let a = order.iter().map(|&i| self.vertex_values(i)).collect();
        let x = order
            .iter()
            .filter_map(|&i| self.seed.mutable_position(i))
            .map(|pos| self.x.iter().map(|p| p[pos].clone()).collect())
            .collect();
        Fingerprint { epsilon, a, x }
    }

    pub fn max_height(&self) -> u64 {
        self.a.iter().chain(self.x.iter()).flat_map(|p| p.iter().map(height_bits)).max().unwrap_or(0)
    }

    /// Same chart with `labels` frozen; their X-coordinates are dropped.
    pub fn freeze(&self, labels: &[usize]) -> Result<Self> {
        let seed = self.seed.freeze(labels)?;
        let keep: Vec<usize> = self
            .seed
            .mutable_indices()
            .into_iter()
            .filter(|i| !labels.contains(i))
            .map(|i| self.seed.mutable_position(i).expect("mutable"))
            .collect();
        let x = self.x.iter().map(|p| keep.iter().map(|&j| p[j].clone()).collect()).collect();
        Ok(ChartState { seed, a: self.a.clone(), x })
    }
}

#[derive(Debug, Clone)]
pub struct ClusterNode {
    pub id: usize,
    pub depth: usize,
    /// Mutation labels leading from the base cluster, in order.
    pub path: Vec<usize>,
    pub parent: Option<(usize, usize)>,
    pub state: ChartState,
    /// Vertex-table id of the cluster variable at each label.
    pub vertex_ids: Vec<usize>,
    pub digest: String,
}

impl ClusterNode {
    pub fn seed(&self) -> &Seed {
        &self.state.seed
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.state.fingerprint()
    }

    pub fn label_of_vertex(&self, vertex: usize) -> Option<usize> {
        self.vertex_ids.iter().position(|&v| v == vertex)
    }
}

/// Mutation edge: label `from_label` in node `from` leads to node `to`, where
/// the new cluster variable sits at `to_label`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: usize,
    pub from_label: usize,
    pub to: usize,
    pub to_label: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: usize,
    pub digest: String,
    pub frozen: bool,
    /// Nodes whose cluster contains this variable.
    pub clusters: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ExploreOptions {
    pub max_depth: usize,
    pub node_cap: usize,
    /// Largest bit height of any exact coordinate before giving up.
    pub height_cap: u64,
}

impl ExploreOptions {
    pub const DEFAULT_NODE_CAP: usize = 100_000;
    pub const DEFAULT_HEIGHT_CAP: u64 = 1 << 18;

    pub fn depth(max_depth: usize) -> Self {
        ExploreOptions { max_depth, node_cap: Self::DEFAULT_NODE_CAP, height_cap: Self::DEFAULT_HEIGHT_CAP }
    }

    pub fn nodes(node_cap: usize) -> Self {
        ExploreOptions { max_depth: usize::MAX, node_cap, height_cap: Self::DEFAULT_HEIGHT_CAP }
    }
}

/// Why exploration stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// Every mutation of every node leads to a known node.
    Closed,
    /// The depth cap was reached with unexplored mutations left.
    DepthCap,
    NodeCap,
    HeightCap,
}

#[derive(Debug, Clone)]
pub struct ExchangeGraph {
    pub nodes: Vec<ClusterNode>,
    pub edges: Vec<GraphEdge>,
    pub vertices: Vec<VertexEntry>,
    pub closure: Closure,
    node_index: HashMap<String, Vec<usize>>,
    vertex_index: HashMap<String, usize>,
    edge_keys: HashSet<(usize, usize)>,
}

impl ExchangeGraph {
    pub fn base(&self) -> &ClusterNode {
        &self.nodes[0]
    }

    pub fn is_closed(&self) -> bool {
        self.closure == Closure::Closed
    }

    pub fn node_by_digest(&self, digest: &str) -> Option<&ClusterNode> {
        self.node_index.get(digest).and_then(|ids| ids.first()).map(|&i| &self.nodes[i])
    }

    pub fn vertex_by_digest(&self, digest: &str) -> Option<usize> {
        self.vertex_index.get(digest).copied()
    }

    pub fn neighbor(&self, node: usize, label: usize) -> Option<&GraphEdge> {
        self.edges.iter().find(|e| e.from == node && e.from_label == label)
    }

    fn find_node(&self, state: &ChartState, digest: &str) -> Option<usize> {
        let ids = self.node_index.get(digest)?;
        let fp = state.fingerprint();
        ids.iter().copied().find(|&i| self.nodes[i].fingerprint() == fp)
    }

    fn intern_vertex(&mut self, values: Vec<BigRational>, frozen: bool) -> usize {
        let digest = vertex_digest(&values);
        if let Some(&id) = self.vertex_index.get(&digest) {
            return id;
        }
        let id = self.vertices.len();
        self.vertices.push(VertexEntry { id, digest: digest.clone(), frozen, clusters: Vec::new() });
        self.vertex_index.insert(digest, id);
        id
    }

    fn add_node(&mut self, state: ChartState, depth: usize, path: Vec<usize>, parent: Option<(usize, usize)>, digest: String) -> usize {
        let id = self.nodes.len();
        let vertex_ids: Vec<usize> = (0..state.seed.rank())
            .map(|i| self.intern_vertex(state.vertex_values(i), state.seed.is_frozen(i)))
            .collect();
        for &v in &vertex_ids {
            self.vertices[v].clusters.push(id);
        }
        self.node_index.entry(digest.clone()).or_default().push(id);
        self.nodes.push(ClusterNode { id, depth, path, parent, state, vertex_ids, digest });
        id
    }

    fn add_edge(&mut self, e: GraphEdge) {
        if self.edge_keys.insert((e.from, e.from_label)) {
            self.edges.push(e);
        }
        let back = GraphEdge { from: e.to, from_label: e.to_label, to: e.from, to_label: e.from_label };
        if self.edge_keys.insert((back.from, back.from_label)) {
            self.edges.push(back);
        }
    }

    /// Mutation word (interleaved with nothing) reaching `node` from the
    /// base along the BFS tree.
    pub fn path_word(&self, node: usize) -> MappingClassWord {
        let rank = self.base().seed().rank();
        MappingClassWord::from_steps(rank, &self.nodes[node].path.iter().map(|&k| Step::Mu(k)).collect::<Vec<_>>())
            .expect("labels within rank")
    }
}

/// Explores from the base seed.
pub fn explore(seed: &Seed, depth: usize) -> Result<ExchangeGraph> {
    let g = explore_with(ChartState::base(seed), &ExploreOptions::depth(depth))?;
    match g.closure {
        Closure::NodeCap => Err(ClusterError::BudgetExceeded(format!(
            "node cap {} reached before depth {depth}",
            ExploreOptions::DEFAULT_NODE_CAP
        ))),
        Closure::HeightCap => Err(ClusterError::BudgetExceeded(format!(
            "coordinate heights exceeded {} bits before depth {depth}",
            ExploreOptions::DEFAULT_HEIGHT_CAP
        ))),
        _ => Ok(g),
    }
}

/// Breadth-first exploration from `start`. Each BFS level is expanded in
/// parallel and merged in (node, label) order, so the result does not depend
/// on scheduling.
pub fn explore_with(start: ChartState, opts: &ExploreOptions) -> Result<ExchangeGraph> {
    let mut g = ExchangeGraph {
        nodes: Vec::new(),
        edges: Vec::new(),
        vertices: Vec::new(),
        closure: Closure::Closed,
        node_index: HashMap::new(),
        vertex_index: HashMap::new(),
        edge_keys: HashSet::new(),
    };
    let digest = start.fingerprint().digest();
    g.add_node(start, 0, Vec::new(), None, digest);
    let mut frontier: VecDeque<usize> = VecDeque::from([0]);
    let mut depth = 0;
    while !frontier.is_empty() {
        let level: Vec<usize> = frontier.drain(..).collect();
        let tasks: Vec<(usize, usize)> = level
            .iter()
            .flat_map(|&u| g.nodes[u].seed().mutable_indices().into_iter().map(move |k| (u, k)))
            .filter(|key| !g.edge_keys.contains(key))
            .collect();
        if tasks.is_empty() {
            break;
        }
        if depth >= opts.max_depth {
            g.closure = Closure::DepthCap;
            break;
        }
        let children: Vec<(usize, usize, ChartState, String)> = tasks
            .par_iter()
            .map(|&(u, k)| {
                let child = g.nodes[u].state.mutate(k).expect("mutable label");
                let digest = child.fingerprint().digest();
                (u, k, child, digest)
            })
            .collect();
        for (u, k, child, digest) in children {
            if g.edge_keys.contains(&(u, k)) {
                continue;
            }
            if child.max_height() > opts.height_cap {
                g.closure = Closure::HeightCap;
                return Ok(g);
            }
            let new_vertex = child.vertex_values(k);
            let v = match g.find_node(&child, &digest) {
                Some(v) => v,
                None => {
                    if g.nodes.len() >= opts.node_cap {
                        g.closure = Closure::NodeCap;
                        return Ok(g);
                    }
                    let mut path = g.nodes[u].path.clone();
                    path.push(k);
                    let v = g.add_node(child, depth + 1, path, Some((u, k)), digest);
                    frontier.push_back(v);
                    v
                }
            };
            let to_label = (0..g.nodes[v].seed().rank())
                .find(|&i| g.nodes[v].state.vertex_values(i) == new_vertex)
                .expect("merged cluster contains the new variable");
            g.add_edge(GraphEdge { from: u, from_label: k, to: v, to_label });
        }
        depth += 1;
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FiniteTypeVerdict {
    Finite { clusters: usize },
    NotClosedWithinBudget { explored: usize, reason: Closure },
}

impl FiniteTypeVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, FiniteTypeVerdict::Finite { .. })
    }
}

fn verdict_of(g: &ExchangeGraph) -> FiniteTypeVerdict {
    if g.is_closed() {
        FiniteTypeVerdict::Finite { clusters: g.nodes.len() }
    } else {
        FiniteTypeVerdict::NotClosedWithinBudget { explored: g.nodes.len(), reason: g.closure.clone() }
    }
}

/// Finite iff exploration closes within `budget` nodes.
pub fn is_finite_type(seed: &Seed, budget: usize) -> Result<FiniteTypeVerdict> {
    let g = explore_with(ChartState::base(seed), &ExploreOptions::nodes(budget))?;
    Ok(verdict_of(&g))
}

/// Explores the star of `cell` (mutations avoiding its vertices) from an
/// explored cluster containing it.
pub fn cell_is_finite_type(graph: &ExchangeGraph, cell: &[usize], budget: usize) -> Result<FiniteTypeVerdict> {
    let node = graph
        .nodes
        .iter()
        .find(|n| cell.iter().all(|v| n.vertex_ids.contains(v)))
        .ok_or(ClusterError::CellNotFound)?;
    let labels: Vec<usize> = cell
        .iter()
        .map(|&v| node.label_of_vertex(v).expect("contained"))
        .filter(|&i| !node.seed().is_frozen(i))
        .collect();
    let start = node.state.freeze(&labels)?;
    let g = explore_with(start, &ExploreOptions::nodes(budget))?;
    Ok(verdict_of(&g))
}

/// Words `σ ∘ (path)` for every explored node within `max_len` mutations of
/// the base whose seed is isomorphic to the base seed; words equal in the
/// cluster modular group are listed once, the trivial class never.
pub fn find_returning_words(graph: &ExchangeGraph, max_len: usize) -> Result<Vec<MappingClassWord>> {
    let base = graph.base().seed().clone();
    let mut found: Vec<MappingClassWord> = Vec::new();
    for node in graph.nodes.iter().filter(|n| n.depth <= max_len) {
        for sigma in seed_isomorphisms(&base, node.seed()) {
            let w = MappingClassWord::new(node.path.clone(), sigma);
            if crate::positive::word_is_trivial(&base, &w, BASE_POINTS)? {
                continue;
            }
            let mut duplicate = false;
            for prev in &found {
                let q = w.then(&prev.inverse_unchecked());
                if crate::positive::word_is_trivial(&base, &q, BASE_POINTS)? {
                    duplicate = true;
                    break;
                }
            }
            if !duplicate {
                found.push(w);
            }
        }
    }
    found.sort_by(|a, b| a.mutations.len().cmp(&b.mutations.len()).then_with(|| a.mutations.cmp(&b.mutations)));
    Ok(found)
}
