//! Mapping-class words: mutations in application order plus one trailing
//! vertex permutation.

use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::seed::{Seed, SeedIso};

/// One step of an unnormalized word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    Mu(usize),
    Perm(SeedIso),
}

/// `σ ∘ μ_{i_k} ⋯ μ_{i_1}`, stored as `mutations = [i_1, …, i_k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MappingClassWord {
    pub mutations: Vec<usize>,
    pub sigma: SeedIso,
}

impl MappingClassWord {
    pub fn new(mutations: Vec<usize>, sigma: SeedIso) -> Self {
        MappingClassWord { mutations, sigma }
    }

    pub fn identity(n: usize) -> Self {
        MappingClassWord { mutations: Vec::new(), sigma: SeedIso::identity(n) }
    }

    /// Word given by mutations followed by a permutation in cycle notation.
    pub fn from_cycles(n: usize, mutations: &[usize], cycles: &[Vec<usize>]) -> Result<Self> {
        Ok(MappingClassWord { mutations: mutations.to_vec(), sigma: SeedIso::from_cycles(n, cycles)? })
    }

    /// Folds interleaved permutations to the end. A permutation `τ` followed
    /// by `μ_k` equals `μ_{τ⁻¹(k)}` followed by `τ`.
    pub fn from_steps(n: usize, steps: &[Step]) -> Result<Self> {
        let mut acc = SeedIso::identity(n);
        let mut mutations = Vec::new();
        for step in steps {
            match step {
                Step::Mu(k) => {
                    if *k >= n {
                        return Err(ClusterError::UnknownVertex(k.to_string()));
                    }
                    mutations.push(acc.inverse().apply(*k));
                }
                Step::Perm(tau) => {
                    if tau.len() != n {
                        return Err(ClusterError::ShapeMismatch("permutation size differs from seed rank".into()));
                    }
                    acc = tau.compose(&acc);
                }
            }
        }
        Ok(MappingClassWord { mutations, sigma: acc })
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn len(&self) -> usize {
        self.mutations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mutations.is_empty() && self.sigma.is_identity()
    }

    pub fn steps(&self) -> Vec<Step> {
        let mut out: Vec<Step> = self.mutations.iter().map(|&k| Step::Mu(k)).collect();
        if !self.sigma.is_identity() {
            out.push(Step::Perm(self.sigma.clone()));
        }
        out
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &MappingClassWord) -> MappingClassWord {
        let mut steps = self.steps();
        steps.extend(other.steps());
        MappingClassWord::from_steps(self.rank(), &steps).expect("words share a rank")
    }

    pub fn power(&self, p: usize) -> MappingClassWord {
        let mut out = MappingClassWord::identity(self.rank());
        for _ in 0..p {
            out = out.then(self);
        }
        out
    }

    /// `σ⁻¹ ∘ μ_{σ(i_1)} ⋯ μ_{σ(i_k)}` without checking the mapping-class
    /// condition.
    pub fn inverse_unchecked(&self) -> MappingClassWord {
        let mutations = self.mutations.iter().rev().map(|&k| self.sigma.apply(k)).collect();
        MappingClassWord { mutations, sigma: self.sigma.inverse() }
    }

    /// Same word with every index renamed by `tau`; conjugation by `tau`.
    pub fn conjugate(&self, tau: &SeedIso) -> MappingClassWord {
        let inv = tau.inverse();
        let mut steps = vec![Step::Perm(inv.clone())];
        steps.extend(self.steps());
        steps.push(Step::Perm(tau.clone()));
        MappingClassWord::from_steps(self.rank(), &steps).expect("ranks agree")
    }
}

/// Runs the mutations of `w` and relabels by its permutation.
pub fn apply_word_to_seed(seed: &Seed, w: &MappingClassWord) -> Result<Seed> {
    check_word(seed, w)?;
    let mut cur = seed.clone();
    for &k in &w.mutations {
        cur = cur.mutate(k).expect("checked");
    }
    Ok(cur.relabel(&w.sigma))
}

/// Checks indices, mutability and that the permutation fixes frozen
/// vertices.
pub fn check_word(seed: &Seed, w: &MappingClassWord) -> Result<()> {
    if w.rank() != seed.rank() {
        return Err(ClusterError::ShapeMismatch(format!(
            "word acts on {} vertices, seed has {}",
            w.rank(),
            seed.rank()
        )));
    }
    for (step, &k) in w.mutations.iter().enumerate() {
        if k >= seed.rank() {
            return Err(ClusterError::InvalidStep { step, reason: format!("no vertex with index {k}") });
        }
        if seed.is_frozen(k) {
            return Err(ClusterError::InvalidStep {
                step,
                reason: format!("vertex {} is frozen", seed.label(k)),
            });
        }
    }
    if !w.sigma.fixes_frozen(seed) {
        return Err(ClusterError::InvalidStep {
            step: w.mutations.len(),
            reason: "permutation moves a frozen vertex".into(),
        });
    }
    Ok(())
}

pub fn is_mapping_class(seed: &Seed, w: &MappingClassWord) -> Result<bool> {
    let image = apply_word_to_seed(seed, w)?;
    Ok(image == *seed)
}

/// Errors with the list of differing entries when `w` does not preserve the
/// seed.
pub fn require_mapping_class(seed: &Seed, w: &MappingClassWord) -> Result<()> {
    let image = apply_word_to_seed(seed, w)?;
    if image == *seed {
        return Ok(());
    }
    let diff = seed.epsilon_diff(&image);
    let cells: Vec<String> = diff
        .iter()
        .take(8)
        .map(|&(i, j)| {
            format!(
                "({},{}): {} vs {}",
                seed.label(i),
                seed.label(j),
                crate::scalar::format_rational(seed.eps(i, j)),
                crate::scalar::format_rational(image.eps(i, j))
            )
        })
        .collect();
    Err(ClusterError::NotMappingClass(format!(
        "exchange matrix changes at {} entries: {}",
        diff.len(),
        cells.join(", ")
    )))
}

pub fn invert_word(seed: &Seed, w: &MappingClassWord) -> Result<MappingClassWord> {
    require_mapping_class(seed, w)?;
    Ok(w.inverse_unchecked())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Seed {
        Seed::skew_symmetric(&[vec![0, 1], vec![-1, 0]], &[]).unwrap()
    }

    #[test]
    fn a2_generator_preserves_seed() {
        let phi = MappingClassWord::from_cycles(2, &[0], &[vec![0, 1]]).unwrap();
        assert!(is_mapping_class(&a2(), &phi).unwrap());
        assert_eq!(apply_word_to_seed(&a2(), &MappingClassWord::identity(2)).unwrap(), a2());
    }

    #[test]
    fn normalizer_moves_permutations_to_the_end() {
        let tau = SeedIso::from_cycles(2, &[vec![0, 1]]).unwrap();
        let w = MappingClassWord::from_steps(2, &[Step::Mu(0), Step::Perm(tau.clone()), Step::Mu(0)]).unwrap();
        assert_eq!(w.mutations, vec![0, 1]);
        assert_eq!(w.sigma, tau);
        let seed = a2();
        let direct = seed.mutate(0).unwrap().relabel(&tau).mutate(0).unwrap();
        assert_eq!(apply_word_to_seed(&seed, &w).unwrap(), direct);
    }

    #[test]
    fn inverse_of_a2_generator() {
        let phi = MappingClassWord::from_cycles(2, &[0], &[vec![0, 1]]).unwrap();
        let inv = invert_word(&a2(), &phi).unwrap();
        assert_eq!(inv, MappingClassWord::from_cycles(2, &[1], &[vec![0, 1]]).unwrap());
        assert_eq!(invert_word(&a2(), &MappingClassWord::identity(2)).unwrap(), MappingClassWord::identity(2));
    }

    #[test]
    fn non_mapping_class_is_rejected() {
        let w = MappingClassWord::new(vec![0], SeedIso::identity(2));
        assert!(matches!(invert_word(&a2(), &w), Err(ClusterError::NotMappingClass(_))));
    }

    #[test]
    fn invalid_steps_are_reported_with_index() {
        let framed = Seed::skew_symmetric(&[vec![0, 1], vec![-1, 0]], &[1]).unwrap();
        let w = MappingClassWord::new(vec![0, 1], SeedIso::identity(2));
        assert_eq!(
            apply_word_to_seed(&framed, &w).unwrap_err(),
            ClusterError::InvalidStep { step: 1, reason: "vertex 1 is frozen".into() }
        );
    }

    #[test]
    fn power_concatenates() {
        let phi = MappingClassWord::from_cycles(2, &[0], &[vec![0, 1]]).unwrap();
        let p2 = phi.power(2);
        assert_eq!(p2.mutations, vec![0, 1]);
        assert!(p2.sigma.is_identity());
        assert_eq!(phi.power(0), MappingClassWord::identity(2));
    }
}
