//! Seeds of ideal triangulations of marked surfaces and flips.

use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::scalar::integer;
use crate::seed::Seed;

/// Genus, boundary components, punctures and marked boundary points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceTopology {
    pub genus: u32,
    pub boundary_components: u32,
    pub punctures: u32,
    pub boundary_points: u32,
}

impl SurfaceTopology {
    /// Number of arcs of an ideal triangulation: 6g - 6 + 3b + 3p + D.
    pub fn arc_count(&self) -> i64 {
        6 * self.genus as i64 - 6 + 3 * self.boundary_components as i64 + 3 * self.punctures as i64
            + self.boundary_points as i64
    }
}

/// A purely combinatorial ideal triangulation. Labels are arcs followed by
/// boundary segments; each triangle lists its sides in clockwise order. A
/// triangle with a repeated side `(l, a, a)` is self-folded with inner arc
/// `a` enclosed by the loop `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    pub arcs: Vec<String>,
    pub boundary: Vec<String>,
    pub triangles: Vec<[usize; 3]>,
    pub topology: Option<SurfaceTopology>,
}

impl Triangulation {
    pub fn new(
        arcs: Vec<String>,
        boundary: Vec<String>,
        triangles: Vec<[usize; 3]>,
        topology: Option<SurfaceTopology>,
    ) -> Result<Self> {
        let t = Triangulation { arcs, boundary, triangles, topology };
        t.validate()?;
        Ok(t)
    }

    pub fn labels(&self) -> Vec<String> {
        self.arcs.iter().chain(self.boundary.iter()).cloned().collect()
    }

    pub fn size(&self) -> usize {
        self.arcs.len() + self.boundary.len()
    }

    pub fn is_arc(&self, i: usize) -> bool {
        i < self.arcs.len()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels()
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| ClusterError::UnknownVertex(label.to_string()))
    }

    /// For a self-folded triangle, `(loop, inner)`.
    pub fn self_folded(tri: &[usize; 3]) -> Option<(usize, usize)> {
        let [a, b, c] = *tri;
        if a == b {
            Some((c, a))
        } else if b == c {
            Some((a, b))
        } else if c == a {
            Some((b, c))
        } else {
            None
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.size();
        let labels = self.labels();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ClusterError::InvalidTriangulation(format!("duplicate label {l:?}")));
            }
        }
        let mut count = vec![0usize; n];
        for tri in &self.triangles {
            for &s in tri {
                if s >= n {
                    return Err(ClusterError::InvalidTriangulation(format!("side index {s} out of range")));
                }
                count[s] += 1;
            }
            if tri[0] == tri[1] && tri[1] == tri[2] {
                return Err(ClusterError::InvalidTriangulation("triangle with three equal sides".into()));
            }
            if let Some((l, inner)) = Self::self_folded(tri) {
                if !self.is_arc(l) || !self.is_arc(inner) {
                    return Err(ClusterError::InvalidTriangulation(
                        "self-folded triangles are bounded by arcs".into(),
                    ));
                }
            }
        }
        for (i, &c) in count.iter().enumerate() {
            let expected = if self.is_arc(i) { 2 } else { 1 };
            if c != expected {
                return Err(ClusterError::InvalidTriangulation(format!(
                    "{} {:?} lies in {c} triangle sides, expected {expected}",
                    if self.is_arc(i) { "arc" } else { "boundary segment" },
                    labels[i]
                )));
            }
        }
        if let Some(top) = self.topology {
            if top.arc_count() != self.arcs.len() as i64 || top.boundary_points as usize != self.boundary.len() {
                return Err(ClusterError::InvalidTriangulation(format!(
                    "surface needs {} arcs and {} boundary segments, found {} and {}",
                    top.arc_count(),
                    top.boundary_points,
                    self.arcs.len(),
                    self.boundary.len()
                )));
            }
        }
        Ok(())
    }

    /// π_Δ: inner arcs of self-folded triangles go to their loops.
    fn pi(&self) -> Vec<usize> {
        let mut pi: Vec<usize> = (0..self.size()).collect();
        for tri in &self.triangles {
            if let Some((l, inner)) = Self::self_folded(tri) {
                pi[inner] = l;
            }
        }
        pi
    }
}

/// ε_ij = Σ_τ ε^τ_{π(i)π(j)} over non-self-folded triangles τ, where
/// ε^τ_ab = 1 when b follows a clockwise in τ and -1 when a follows b.
pub fn fst_seed(t: &Triangulation) -> Result<Seed> {
    t.validate()?;
    let n = t.size();
    let mut b = vec![vec![0i64; n]; n];
    for tri in t.triangles.iter().filter(|tri| Triangulation::self_folded(tri).is_none()) {
        for s in 0..3 {
            let (x, y) = (tri[s], tri[(s + 1) % 3]);
            b[x][y] += 1;
            b[y][x] -= 1;
        }
    }
    let pi = t.pi();
    let epsilon = (0..n).map(|i| (0..n).map(|j| integer(b[pi[i]][pi[j]])).collect()).collect();
    let frozen = (0..n).map(|i| !t.is_arc(i)).collect();
    Seed::allow_fully_frozen(t.labels(), frozen, epsilon, vec![1; n])
}

/// Replaces `arc` by the other diagonal of the quadrilateral formed by its
/// two triangles; the new arc keeps the label.
pub fn flip(t: &Triangulation, arc: usize) -> Result<Triangulation> {
    let labels = t.labels();
    if arc >= t.size() {
        return Err(ClusterError::UnknownVertex(arc.to_string()));
    }
    if !t.is_arc(arc) {
        return Err(ClusterError::NotFlippable(format!("{:?} is a boundary segment", labels[arc])));
    }
    let holders: Vec<usize> = (0..t.triangles.len()).filter(|&i| t.triangles[i].contains(&arc)).collect();
    if holders.len() != 2 {
        return Err(ClusterError::NotFlippable(format!(
            "arc {:?} is the inner arc of a self-folded triangle",
            labels[arc]
        )));
    }
    let rotate = |tri: [usize; 3]| -> [usize; 3] {
        let p = tri.iter().position(|&s| s == arc).expect("contains arc");
        [tri[p], tri[(p + 1) % 3], tri[(p + 2) % 3]]
    };
    let [_, a, b] = rotate(t.triangles[holders[0]]);
    let [_, c, d] = rotate(t.triangles[holders[1]]);
    let mut triangles = t.triangles.clone();
    triangles[holders[0]] = [arc, b, c];
    triangles[holders[1]] = [arc, d, a];
    Triangulation::new(t.arcs.clone(), t.boundary.clone(), triangles, t.topology)
}

/// Whether flipping `arc` and mutating at `arc` give the same seed.
pub fn verify_commutation(t: &Triangulation, arc: usize) -> Result<bool> {
    let flipped = fst_seed(&flip(t, arc)?)?;
    let mutated = fst_seed(t)?.mutate(arc)?;
    Ok(flipped == mutated)
}

/// Arcs that can be flipped.
pub fn flippable_arcs(t: &Triangulation) -> Vec<usize> {
    (0..t.arcs.len()).filter(|&a| flip(t, a).is_ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(r: std::ops::Range<usize>) -> Vec<String> {
        r.map(|i| i.to_string()).collect()
    }

    fn annulus() -> Triangulation {
        Triangulation::new(
            names(0..2),
            names(2..4),
            vec![[0, 1, 2], [0, 1, 3]],
            Some(SurfaceTopology { genus: 0, boundary_components: 2, punctures: 0, boundary_points: 2 }),
        )
        .unwrap()
    }

    fn digon() -> Triangulation {
        Triangulation::new(
            names(0..2),
            names(2..4),
            vec![[0, 1, 1], [0, 2, 3]],
            Some(SurfaceTopology { genus: 0, boundary_components: 1, punctures: 1, boundary_points: 2 }),
        )
        .unwrap()
    }

    #[test]
    fn annulus_exchange_matrix() {
        let s = fst_seed(&annulus()).unwrap();
        let m: Vec<Vec<i64>> = (0..4).map(|i| (0..4).map(|j| s.eps_int(i, j)).collect()).collect();
        assert_eq!(m, vec![vec![0, 2, -1, -1], vec![-2, 0, 1, 1], vec![1, -1, 0, 0], vec![1, -1, 0, 0]]);
        assert_eq!(s.frozen_indices(), vec![2, 3]);
    }

    #[test]
    fn flips_are_involutive_and_commute() {
        for t in [annulus(), digon()] {
            for arc in flippable_arcs(&t) {
                assert_eq!(flip(&flip(&t, arc).unwrap(), arc).unwrap().triangles.len(), t.triangles.len());
                assert!(verify_commutation(&t, arc).unwrap());
                let back = flip(&flip(&t, arc).unwrap(), arc).unwrap();
                assert_eq!(fst_seed(&back).unwrap(), fst_seed(&t).unwrap());
            }
        }
    }

    #[test]
    fn self_folded_inner_arc_is_not_flippable() {
        assert!(matches!(flip(&digon(), 1), Err(ClusterError::NotFlippable(_))));
        assert_eq!(flippable_arcs(&digon()), vec![0]);
        let s = fst_seed(&digon()).unwrap();
        assert_eq!(s.eps_int(1, 2), 1);
        assert_eq!(s.eps_int(1, 3), -1);
        assert_eq!(s.eps_int(0, 1), 0);
    }

    #[test]
    fn invalid_triangulations() {
        let bad = Triangulation::new(names(0..2), names(2..4), vec![[0, 1, 2], [0, 2, 3]], None);
        assert!(matches!(bad, Err(ClusterError::InvalidTriangulation(_))));
        let wrong_topology = Triangulation::new(
            names(0..2),
            names(2..4),
            vec![[0, 1, 2], [0, 1, 3]],
            Some(SurfaceTopology { genus: 1, boundary_components: 0, punctures: 1, boundary_points: 0 }),
        );
        assert!(wrong_topology.is_err());
    }
}
