//! Built-in seeds, triangulations and mapping classes.

use crate::error::{ClusterError, Result};
use crate::seed::Seed;
use crate::surface::{fst_seed, SurfaceTopology, Triangulation};
use crate::word::MappingClassWord;

#[derive(Debug, Clone)]
pub struct NamedWord {
    pub name: String,
    pub word: MappingClassWord,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub seed: Seed,
    pub triangulation: Option<Triangulation>,
    pub words: Vec<NamedWord>,
}

impl CatalogEntry {
    pub fn word(&self, name: &str) -> Option<&MappingClassWord> {
        self.words.iter().find(|w| w.name == name).map(|w| &w.word)
    }
}

/// Names accepted by [`catalog`]; `lk:<k>` takes any positive integer.
pub fn catalog_names() -> Vec<&'static str> {
    vec!["a2", "lk:<k>", "x7", "markov", "annulus-dehn", "punctured-torus", "pentagon-disk", "punctured-digon"]
}

fn named(name: &str, word: MappingClassWord) -> NamedWord {
    NamedWord { name: name.to_string(), word }
}

fn labels(r: std::ops::Range<usize>) -> Vec<String> {
    r.map(|i| i.to_string()).collect()
}

fn lk(k: i64) -> Result<CatalogEntry> {
    let seed = Seed::skew_symmetric(&[vec![0, k], vec![-k, 0]], &[])?;
    let name = if k == 1 { "a2".to_string() } else { format!("lk:{k}") };
    Ok(CatalogEntry {
        name,
        seed,
        triangulation: None,
        words: vec![named("phi", MappingClassWord::from_cycles(2, &[0], &[vec![0, 1]])?)],
    })
}

fn x7() -> Result<CatalogEntry> {
    let mut m = vec![vec![0i64; 7]; 7];
    for (i, j, w) in [(0, 1, 1), (2, 0, 1), (0, 3, 1), (4, 0, 1), (0, 5, 1), (6, 0, 1), (1, 2, 2), (3, 4, 2), (5, 6, 2)] {
        m[i][j] = w;
        m[j][i] = -w;
    }
    Ok(CatalogEntry {
        name: "x7".into(),
        seed: Seed::skew_symmetric(&m, &[])?,
        triangulation: None,
        words: vec![
            named("phi1", MappingClassWord::from_cycles(7, &[1], &[vec![1, 2]])?),
            named("psi1", MappingClassWord::from_cycles(7, &[0, 1, 2], &[vec![0, 1, 2], vec![3, 4, 5, 6]])?),
        ],
    })
}

fn markov() -> Result<CatalogEntry> {
    let seed = Seed::skew_symmetric(&[vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]], &[])?;
    Ok(CatalogEntry {
        name: "markov".into(),
        seed,
        triangulation: None,
        words: vec![named("rho", MappingClassWord::from_cycles(3, &[0], &[vec![0, 1]])?)],
    })
}

fn surface(name: &str, t: Triangulation, words: Vec<NamedWord>) -> Result<CatalogEntry> {
    let seed = fst_seed(&t)?;
    Ok(CatalogEntry { name: name.into(), seed, triangulation: Some(t), words })
}

pub fn annulus_triangulation() -> Triangulation {
    Triangulation::new(
        labels(0..2),
        labels(2..4),
        vec![[0, 1, 2], [0, 1, 3]],
        Some(SurfaceTopology { genus: 0, boundary_components: 2, punctures: 0, boundary_points: 2 }),
    )
    .expect("annulus triangulation is valid")
}

pub fn punctured_torus_triangulation() -> Triangulation {
    Triangulation::new(
        labels(0..3),
        Vec::new(),
        vec![[0, 1, 2], [0, 1, 2]],
        Some(SurfaceTopology { genus: 1, boundary_components: 0, punctures: 1, boundary_points: 0 }),
    )
    .expect("torus triangulation is valid")
}

/// Marked points V0..V4 in order; arc 0 = V0V3, arc 1 = V0V2, boundary
/// segment `2 + i` joins Vi and Vi+1.
pub fn pentagon_triangulation() -> Triangulation {
    Triangulation::new(
        labels(0..2),
        labels(2..7),
        vec![[2, 3, 1], [1, 4, 0], [0, 5, 6]],
        Some(SurfaceTopology { genus: 0, boundary_components: 1, punctures: 0, boundary_points: 5 }),
    )
    .expect("pentagon triangulation is valid")
}

/// Once-punctured digon: a self-folded triangle (loop 0 around inner arc 1)
/// and one ordinary triangle on the two boundary segments.
pub fn punctured_digon_triangulation() -> Triangulation {
    Triangulation::new(
        labels(0..2),
        labels(2..4),
        vec![[0, 1, 1], [0, 2, 3]],
        Some(SurfaceTopology { genus: 0, boundary_components: 1, punctures: 1, boundary_points: 2 }),
    )
    .expect("digon triangulation is valid")
}

pub fn catalog(name: &str) -> Result<CatalogEntry> {
    match name {
        "a2" => lk(1),
        "x7" => x7(),
        "markov" => markov(),
        "annulus-dehn" => surface(
            name,
            annulus_triangulation(),
            vec![named("t_c", MappingClassWord::from_cycles(4, &[0], &[vec![0, 1]])?)],
        ),
        "punctured-torus" => surface(
            name,
            punctured_torus_triangulation(),
            vec![named("rho", MappingClassWord::from_cycles(3, &[0], &[vec![0, 1]])?)],
        ),
        "pentagon-disk" => surface(name, pentagon_triangulation(), Vec::new()),
        "punctured-digon" => surface(name, punctured_digon_triangulation(), Vec::new()),
        _ => {
            if let Some(k) = name.strip_prefix("lk:").and_then(|k| k.parse::<i64>().ok()) {
                if k >= 1 {
                    return lk(k);
                }
            }
            Err(ClusterError::UnknownName(name.to_string()))
        }
    }
}
