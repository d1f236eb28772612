//! The non-negative part of the tropical X-space: witnesses, zero
//! subclusters, the map Ψ and the definiteness check.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::explorer::{explore, Closure};
use crate::positive::Flavor;
use crate::scalar::TropicalScalar;
use crate::seed::Seed;
use crate::tropical::{sup_norm, trop_x_mutate, ProjectiveClass, TropicalPoint};

/// A chart in which a tropical X-point has only non-negative coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegWitness<T> {
    /// Mutation labels leading from the base chart.
    pub chart: Vec<usize>,
    pub seed: Seed,
    pub coords: Vec<T>,
    /// Labels whose coordinate vanishes (the zero subcluster).
    pub zero_set: Vec<usize>,
    /// Exchange-graph node and vertex ids when found by enumeration.
    pub node: Option<usize>,
    pub zero_vertices: Vec<usize>,
}

fn require_x<T: TropicalScalar>(seed: &Seed, t: &TropicalPoint<T>) -> Result<()> {
    if t.flavor != Flavor::X {
        return Err(ClusterError::FlavorMismatch("the non-negative part lives in the tropical X-space".into()));
    }
    t.check(seed)
}

/// Labels of negative coordinates, or `None` if there are none. Zero labels
/// are returned alongside.
fn signs<T: TropicalScalar>(seed: &Seed, coords: &[T], slack: &T) -> (Vec<(usize, T)>, Vec<usize>) {
    let mut negative = Vec::new();
    let mut zero = Vec::new();
    for (pos, label) in seed.mutable_indices().into_iter().enumerate() {
        let c = &coords[pos];
        if c.abs() <= *slack {
            zero.push(label);
        } else if *c < T::zero() {
            negative.push((label, c.clone()));
        }
    }
    (negative, zero)
}

/// Breadth-first search over charts along non-backtracking mutation paths.
/// Negative coordinates are tried first (most negative first, ties by
/// smallest label), then the remaining labels, so the first witness found
/// is a shallowest one. `None` means "not found up to `max_depth`", not
/// absence.
pub fn nonneg_membership<T: TropicalScalar>(
    seed: &Seed,
    t: &TropicalPoint<T>,
    max_depth: usize,
) -> Result<Option<NonNegWitness<T>>> {
    const NODE_CAP: usize = 200_000;
    require_x(seed, t)?;
    let slack = T::sign_slack(&sup_norm(&t.coords));
    let mut queue = VecDeque::from([(seed.clone(), t.coords.clone(), Vec::<usize>::new())]);
    let mut visited = 0;
    while let Some((s, coords, path)) = queue.pop_front() {
        visited += 1;
        let (mut negative, zero) = signs(&s, &coords, &slack);
        if negative.is_empty() {
            return Ok(Some(NonNegWitness { chart: path, seed: s, coords, zero_set: zero, node: None, zero_vertices: Vec::new() }));
        }
        if path.len() >= max_depth || visited + queue.len() >= NODE_CAP {
            continue;
        }
        negative.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("ordered").then(a.0.cmp(&b.0)));
        let mut order: Vec<usize> = negative.into_iter().map(|(k, _)| k).collect();
        for k in s.mutable_indices() {
            if !order.contains(&k) {
                order.push(k);
            }
        }
        for k in order {
            if path.last() == Some(&k) {
                continue;
            }
            let next = trop_x_mutate(&s, k, &TropicalPoint::x(coords.clone()))?;
            let mut p = path.clone();
            p.push(k);
            queue.push_back((s.mutate(k)?, next.coords, p));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonNegEnumeration<T> {
    pub witnesses: Vec<NonNegWitness<T>>,
    /// All witnesses are joined by mutations directed into zero subclusters.
    pub equivalent: bool,
    pub components: usize,
    /// Mutating inside a zero subcluster kept the zero subcluster.
    pub zero_sets_coherent: bool,
    pub explored: usize,
    pub closure: Closure,
}

/// Lists every non-negative chart among the clusters within `depth`
/// mutations and checks that they are Z(L)-equivalent.
pub fn enumerate_nonneg_clusters<T: TropicalScalar>(
    seed: &Seed,
    t: &TropicalPoint<T>,
    depth: usize,
) -> Result<NonNegEnumeration<T>> {
    require_x(seed, t)?;
    let graph = explore(seed, depth)?;
    let slack = T::sign_slack(&sup_norm(&t.coords));
    let mut coords: Vec<Vec<T>> = Vec::with_capacity(graph.nodes.len());
    for node in &graph.nodes {
        let c = match node.parent {
            None => t.coords.clone(),
            Some((u, k)) => trop_x_mutate(graph.nodes[u].seed(), k, &TropicalPoint::x(coords[u].clone()))?.coords,
        };
        coords.push(c);
    }
    let mut witness_of = vec![None; graph.nodes.len()];
    let mut witnesses = Vec::new();
    for node in &graph.nodes {
        let (negative, zero) = signs(node.seed(), &coords[node.id], &slack);
        if negative.is_empty() {
            witness_of[node.id] = Some(witnesses.len());
            let mut zero_vertices: Vec<usize> = zero.iter().map(|&l| node.vertex_ids[l]).collect();
            zero_vertices.sort_unstable();
            witnesses.push(NonNegWitness {
                chart: node.path.clone(),
                seed: node.seed().clone(),
                coords: coords[node.id].clone(),
                zero_set: zero,
                node: Some(node.id),
                zero_vertices,
            });
        }
    }
    if witnesses.is_empty() {
        return Err(ClusterError::NoWitness);
    }
    let mut parent: Vec<usize> = (0..witnesses.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut coherent = true;
    for e in &graph.edges {
        let Some(wu) = witness_of[e.from] else { continue };
        if !witnesses[wu].zero_set.contains(&e.from_label) {
            continue;
        }
        match witness_of[e.to] {
            Some(wv) => {
                // the mutated variable is replaced by the new one at `to_label`
                let old = graph.nodes[e.from].vertex_ids[e.from_label];
                let new = graph.nodes[e.to].vertex_ids[e.to_label];
                let mut carried: Vec<usize> =
                    witnesses[wu].zero_vertices.iter().map(|&v| if v == old { new } else { v }).collect();
                carried.sort_unstable();
                if carried != witnesses[wv].zero_vertices {
                    coherent = false;
                }
                let (a, b) = (root(&mut parent, wu), root(&mut parent, wv));
                parent[a] = b;
            }
            None => coherent = false,
        }
    }
    let components = (0..witnesses.len()).filter(|&i| root(&mut parent, i) == i).count();
    Ok(NonNegEnumeration {
        witnesses,
        equivalent: components == 1,
        components,
        zero_sets_coherent: coherent,
        explored: graph.nodes.len(),
        closure: graph.closure.clone(),
    })
}

/// Ψ on the chart reached by `chart`: the class of the tropical X-point
/// whose coordinates in that chart are `weights`, expressed in the base
/// chart.
pub fn psi_map<T: TropicalScalar>(seed: &Seed, chart: &[usize], weights: &[T]) -> Result<ProjectiveClass> {
    if weights.len() != seed.mutable_rank() {
        return Err(ClusterError::BadWeights(format!(
            "{} weights for {} mutable vertices",
            weights.len(),
            seed.mutable_rank()
        )));
    }
    if weights.iter().any(|w| *w < T::zero()) {
        return Err(ClusterError::BadWeights("weights must be non-negative".into()));
    }
    if weights.iter().all(|w| w.is_zero()) {
        return Err(ClusterError::BadWeights("weights must not all vanish".into()));
    }
    let mut seeds = vec![seed.clone()];
    for &k in chart {
        let next = seeds.last().expect("non-empty").mutate(k)?;
        seeds.push(next);
    }
    let mut t = TropicalPoint::x(weights.to_vec());
    for (i, &k) in chart.iter().enumerate().rev() {
        t = trop_x_mutate(&seeds[i + 1], k, &t)?;
    }
    ProjectiveClass::of(&t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefiniteVerdict {
    /// Every sampled direction has a non-negative chart within `depth`.
    pub definite: bool,
    pub samples: usize,
    pub depth: usize,
    pub uncovered: Vec<Vec<f64>>,
}

fn sample_directions(n: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    match n {
        0 => Err(ClusterError::UnsupportedRank("no mutable vertex".into())),
        1 => Ok(vec![vec![1.0], vec![-1.0]]),
        2 => Ok((0..count)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect()),
        3 | 4 => {
            // grid on the faces of the cube [-1,1]^n
            let faces = 2 * n;
            let per_face = (count as f64 / faces as f64).max(1.0);
            let r = (per_face.powf(1.0 / (n - 1) as f64).round() as usize).max(2);
            let mut out = Vec::new();
            for axis in 0..n {
                for sign in [1.0, -1.0] {
                    let total = r.pow((n - 1) as u32);
                    for idx in 0..total {
                        let mut v = vec![0.0; n];
                        v[axis] = sign;
                        let mut rest = idx;
                        for j in (0..n).filter(|&j| j != axis) {
                            let g = rest % r;
                            rest /= r;
                            v[j] = -1.0 + 2.0 * (g as f64 + 0.5) / r as f64;
                        }
                        out.push(v);
                    }
                }
            }
            Ok(out)
        }
        _ => Err(ClusterError::UnsupportedRank(format!("direction sampling supports up to 4 mutable vertices, got {n}"))),
    }
}

/// Samples directions of the tropical X-space and asks for a non-negative
/// chart for each. "Definite" holds at this resolution only.
pub fn check_definite(seed: &Seed, directions: usize, depth: usize) -> Result<DefiniteVerdict> {
    let dirs = sample_directions(seed.mutable_rank(), directions)?;
    let covered: Vec<bool> = dirs
        .par_iter()
        .map(|d| nonneg_membership(seed, &TropicalPoint::x(d.clone()), depth).map(|w| w.is_some()))
        .collect::<Result<Vec<_>>>()?;
    let uncovered: Vec<Vec<f64>> = dirs.iter().zip(&covered).filter(|(_, c)| !**c).map(|(d, _)| d.clone()).collect();
    Ok(DefiniteVerdict { definite: uncovered.is_empty(), samples: dirs.len(), depth, uncovered })
}
