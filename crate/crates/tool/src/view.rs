//! Structured views shared by the CLI and the service.

use clustermod::doc::SeedDocument;
use clustermod::explorer::{ChartState, ExchangeGraph};
use clustermod::scalar::format_rational;
use clustermod::Seed;
use num_traits::Signed;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct QuiverVertex {
    pub label: String,
    pub frozen: bool,
}

/// Arrows for every positive entry; `weight` is `ε_ij` and `back` is
/// `-ε_ji`, which differ only for skew-symmetrizable seeds.
#[derive(Debug, Serialize)]
pub struct QuiverArrow {
    pub from: String,
    pub to: String,
    pub weight: String,
    pub back: String,
}

#[derive(Debug, Serialize)]
pub struct QuiverView {
    pub vertices: Vec<QuiverVertex>,
    pub arrows: Vec<QuiverArrow>,
}

pub fn quiver(seed: &Seed) -> QuiverView {
    let n = seed.rank();
    let vertices = (0..n).map(|i| QuiverVertex { label: seed.label(i).to_string(), frozen: seed.is_frozen(i) }).collect();
    let mut arrows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if seed.eps(i, j).is_positive() {
                arrows.push(QuiverArrow {
                    from: seed.label(i).to_string(),
                    to: seed.label(j).to_string(),
                    weight: format_rational(seed.eps(i, j)),
                    back: format_rational(&-seed.eps(j, i).clone()),
                });
            }
        }
    }
    QuiverView { vertices, arrows }
}

#[derive(Debug, Serialize)]
pub struct NodeView {
    pub id: usize,
    pub depth: usize,
    pub path: Vec<String>,
    pub digest: String,
    /// `(label, node)` for every explored mutation.
    pub neighbors: Vec<(String, usize)>,
}

#[derive(Debug, Serialize)]
pub struct GraphView {
    pub closed: bool,
    pub closure: String,
    pub clusters: usize,
    pub nodes: Vec<NodeView>,
}

pub fn graph(g: &ExchangeGraph) -> GraphView {
    let seed = g.base().state.seed.clone();
    let mut nodes: Vec<NodeView> = g
        .nodes
        .iter()
        .map(|n| NodeView {
            id: n.id,
            depth: n.depth,
            path: n.path.iter().map(|&k| seed.label(k).to_string()).collect(),
            digest: n.digest.clone(),
            neighbors: Vec::new(),
        })
        .collect();
    for e in &g.edges {
        nodes[e.from].neighbors.push((seed.label(e.from_label).to_string(), e.to));
    }
    GraphView { closed: g.is_closed(), closure: format!("{:?}", g.closure), clusters: g.nodes.len(), nodes }
}

/// Exact coordinates of the chart at its first base point.
pub fn values(chart: &ChartState) -> (Vec<String>, Vec<String>) {
    let fmt = |v: &[num_rational::BigRational]| v.iter().map(format_rational).collect();
    (fmt(&chart.a[0]), fmt(&chart.x[0]))
}

#[derive(Debug, Serialize)]
pub struct SeedView {
    pub seed: SeedDocument,
    pub quiver: QuiverView,
}

pub fn seed_view(seed: &Seed) -> SeedView {
    SeedView { seed: SeedDocument::from_seed(seed), quiver: quiver(seed) }
}
