//! A- and X-cluster transformations evaluated on points.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::scalar::{height_bits, integer, LogMagnitude, LogReal, ModP, Semifield, M61, P61B};
use crate::seed::{Seed, SeedIso};
use crate::word::{check_word, require_mapping_class, MappingClassWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    A,
    X,
}

/// Coordinates of a point of the positive A- or X-space in the base chart.
/// A-points have one entry per vertex, X-points one per mutable vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivePoint<T> {
    pub flavor: Flavor,
    pub coords: Vec<T>,
}

impl<T: Semifield> PositivePoint<T> {
    pub fn a(coords: Vec<T>) -> Self {
        PositivePoint { flavor: Flavor::A, coords }
    }

    pub fn x(coords: Vec<T>) -> Self {
        PositivePoint { flavor: Flavor::X, coords }
    }

    /// Checks length against `seed` and that every coordinate is admissible.
    pub fn check(&self, seed: &Seed) -> Result<()> {
        let expected = expected_len(seed, self.flavor);
        if self.coords.len() != expected {
            return Err(ClusterError::ShapeMismatch(format!(
                "{:?}-point has {} coordinates, expected {expected}",
                self.flavor,
                self.coords.len()
            )));
        }
        if let Some(i) = self.coords.iter().position(|c| !c.is_admissible()) {
            return Err(ClusterError::ShapeMismatch(format!("coordinate {i} is not positive")));
        }
        Ok(())
    }
}

pub fn expected_len(seed: &Seed, flavor: Flavor) -> usize {
    match flavor {
        Flavor::A => seed.rank(),
        Flavor::X => seed.mutable_rank(),
    }
}

/// Exponent data of a single mutation, read off the seed it acts on.
#[derive(Debug, Clone)]
pub struct MutationStep {
    k: usize,
    k_pos: usize,
    a_pos: Vec<(usize, i64)>,
    a_neg: Vec<(usize, i64)>,
    x_terms: Vec<(usize, i64)>,
}

impl MutationStep {
    pub fn new(seed: &Seed, k: usize) -> Result<Self> {
        seed.check_mutable(k)?;
        let mut a_pos = Vec::new();
        let mut a_neg = Vec::new();
        for j in 0..seed.rank() {
            let e = seed.eps_int(k, j);
            if e > 0 {
                a_pos.push((j, e));
            } else if e < 0 {
                a_neg.push((j, -e));
            }
        }
        // -ε_ik equals ε_ki on skew-symmetric seeds; with a nontrivial
        // symmetrizer only -ε_ik keeps the p-map compatible with mutation
        let mut x_terms = Vec::new();
        for (pos, i) in seed.mutable_indices().into_iter().enumerate() {
            let e = -seed.eps_int(i, k);
            if i != k && e != 0 {
                x_terms.push((pos, e));
            }
        }
        let k_pos = seed.mutable_position(k).expect("k is mutable");
        Ok(MutationStep { k, k_pos, a_pos, a_neg, x_terms })
    }

    pub fn vertex(&self) -> usize {
        self.k
    }

    /// Exchange relation: `A'_k = (Π_{ε_kj>0} A_j^{ε_kj} + Π_{ε_kj<0} A_j^{-ε_kj}) / A_k`.
    pub fn apply_a<S: Semifield>(&self, a: &mut [S]) {
        let prod = |terms: &[(usize, i64)]| {
            terms.iter().fold(S::one(), |acc, &(j, e)| acc.times(&a[j].powi(e)))
        };
        let p = prod(&self.a_pos);
        let q = prod(&self.a_neg);
        a[self.k] = p.plus(&q).over(&a[self.k]);
    }

    /// `X'_k = X_k^{-1}`, `X'_i = X_i (1 + X_k^{-sgn ε_ik})^{-ε_ik}`.
    pub fn apply_x<S: Semifield>(&self, x: &mut [S]) {
        let xk = x[self.k_pos].clone();
        let up = S::one().plus(&xk);
        let down = S::one().plus(&xk.recip());
        for &(i, e) in &self.x_terms {
            let factor = if e > 0 { up.powi(e) } else { down.powi(e) };
            x[i] = x[i].times(&factor);
        }
        x[self.k_pos] = xk.recip();
    }
}

/// A word compiled against a seed: the exponent data of every step and the
/// trailing permutation on A- and X-indices.
#[derive(Debug, Clone)]
pub struct WordMap {
    steps: Vec<MutationStep>,
    sigma: SeedIso,
    sigma_x: Vec<usize>,
    rank: usize,
    mutable_rank: usize,
}

impl WordMap {
    pub fn new(seed: &Seed, w: &MappingClassWord) -> Result<Self> {
        check_word(seed, w)?;
        let mut cur = seed.clone();
        let mut steps = Vec::with_capacity(w.mutations.len());
        for &k in &w.mutations {
            steps.push(MutationStep::new(&cur, k)?);
            cur = cur.mutate(k)?;
        }
        let sigma_x = seed
            .mutable_indices()
            .into_iter()
            .map(|i| seed.mutable_position(w.sigma.apply(i)).expect("sigma fixes frozen vertices"))
            .collect();
        Ok(WordMap {
            steps,
            sigma: w.sigma.clone(),
            sigma_x,
            rank: seed.rank(),
            mutable_rank: seed.mutable_rank(),
        })
    }

    pub fn len(&self, flavor: Flavor) -> usize {
        match flavor {
            Flavor::A => self.rank,
            Flavor::X => self.mutable_rank,
        }
    }

    pub fn apply_a<S: Semifield>(&self, a: &[S]) -> Vec<S> {
        let mut cur = a.to_vec();
        for step in &self.steps {
            step.apply_a(&mut cur);
        }
        let mut out = cur.clone();
        for (i, v) in cur.into_iter().enumerate() {
            out[self.sigma.apply(i)] = v;
        }
        out
    }

    pub fn apply_x<S: Semifield>(&self, x: &[S]) -> Vec<S> {
        let mut cur = x.to_vec();
        for step in &self.steps {
            step.apply_x(&mut cur);
        }
        let mut out = cur.clone();
        for (i, v) in cur.into_iter().enumerate() {
            out[self.sigma_x[i]] = v;
        }
        out
    }

    pub fn apply<S: Semifield>(&self, flavor: Flavor, coords: &[S]) -> Vec<S> {
        match flavor {
            Flavor::A => self.apply_a(coords),
            Flavor::X => self.apply_x(coords),
        }
    }
}

fn single_step<T: Semifield>(seed: &Seed, k: usize, p: &PositivePoint<T>, flavor: Flavor) -> Result<PositivePoint<T>> {
    if p.flavor != flavor {
        return Err(ClusterError::FlavorMismatch(format!("expected an {flavor:?}-point")));
    }
    let step = MutationStep::new(seed, k)?;
    p.check(seed)?;
    let mut coords = p.coords.clone();
    match flavor {
        Flavor::A => step.apply_a(&mut coords),
        Flavor::X => step.apply_x(&mut coords),
    }
    Ok(PositivePoint { flavor, coords })
}

pub fn x_mutate_point<T: Semifield>(seed: &Seed, k: usize, p: &PositivePoint<T>) -> Result<PositivePoint<T>> {
    single_step(seed, k, p, Flavor::X)
}

pub fn a_mutate_point<T: Semifield>(seed: &Seed, k: usize, p: &PositivePoint<T>) -> Result<PositivePoint<T>> {
    single_step(seed, k, p, Flavor::A)
}

/// Applies the mutations of `w` in order, then permutes coordinates by σ
/// (old coordinate `i` lands at `σ(i)`).
pub fn apply_word<T: Semifield>(seed: &Seed, w: &MappingClassWord, p: &PositivePoint<T>) -> Result<PositivePoint<T>> {
    p.check(seed)?;
    let map = WordMap::new(seed, w)?;
    Ok(PositivePoint { flavor: p.flavor, coords: map.apply(p.flavor, &p.coords) })
}

/// `X_i = Π_k A_k^{ε_ik}` for every mutable `i`.
pub fn p_map<T: Semifield>(seed: &Seed, a: &PositivePoint<T>) -> Result<PositivePoint<T>> {
    if a.flavor != Flavor::A {
        return Err(ClusterError::FlavorMismatch("p-map takes an A-point".into()));
    }
    a.check(seed)?;
    let coords = seed
        .mutable_indices()
        .into_iter()
        .map(|i| {
            (0..seed.rank()).fold(T::one(), |acc, k| {
                let e = seed.eps_int(i, k);
                if e == 0 {
                    acc
                } else {
                    acc.times(&a.coords[k].powi(e))
                }
            })
        })
        .collect();
    Ok(PositivePoint::x(coords))
}

/// Number of base points per flavor used by triviality tests and
/// fingerprints.
pub const BASE_POINTS: usize = 3;

/// The first `count` primes.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Deterministic A-points: coordinate `i` of point `j` is the prime with
/// index `trials·i + j`.
pub fn base_a_points(seed: &Seed, trials: usize) -> Vec<Vec<BigRational>> {
    let n = seed.rank();
    let ps = primes(trials * n);
    (0..trials)
        .map(|j| (0..n).map(|i| integer(ps[trials * i + j] as i64)).collect())
        .collect()
}

/// Deterministic X-points drawn from primes after those used by
/// [`base_a_points`].
pub fn base_x_points(seed: &Seed, trials: usize) -> Vec<Vec<BigRational>> {
    let n_all = seed.rank();
    let n = seed.mutable_rank();
    let offset = trials * n_all;
    let ps = primes(offset + trials * n);
    (0..trials)
        .map(|j| (0..n).map(|i| integer(ps[offset + trials * i + j] as i64)).collect())
        .collect()
}

/// Randomized exact identity test: `w` preserves ε and fixes `trials`
/// deterministic A- and X-points.
pub fn word_is_trivial(seed: &Seed, w: &MappingClassWord, trials: usize) -> Result<bool> {
    let image = crate::word::apply_word_to_seed(seed, w)?;
    if image != *seed {
        return Ok(false);
    }
    let map = WordMap::new(seed, w)?;
    for a in base_a_points(seed, trials) {
        if map.apply_a(&a) != a {
            return Ok(false);
        }
    }
    for x in base_x_points(seed, trials) {
        if map.apply_x(&x) != x {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Base-point state reduced modulo two primes, used to screen powers of a
/// word cheaply before exact confirmation.
#[derive(Clone, PartialEq)]
pub(crate) struct ModularState {
    a1: Vec<Vec<ModP<M61>>>,
    a2: Vec<Vec<ModP<P61B>>>,
    x1: Vec<Vec<ModP<M61>>>,
    x2: Vec<Vec<ModP<P61B>>>,
}

impl ModularState {
    pub(crate) fn base(seed: &Seed, trials: usize) -> Self {
        let a = base_a_points(seed, trials);
        let x = base_x_points(seed, trials);
        let red1 = |pts: &Vec<Vec<BigRational>>| -> Vec<Vec<ModP<M61>>> {
            pts.iter().map(|p| p.iter().map(ModP::from_rational).collect()).collect()
        };
        let red2 = |pts: &Vec<Vec<BigRational>>| -> Vec<Vec<ModP<P61B>>> {
            pts.iter().map(|p| p.iter().map(ModP::from_rational).collect()).collect()
        };
        ModularState { a1: red1(&a), a2: red2(&a), x1: red1(&x), x2: red2(&x) }
    }

    pub(crate) fn step(&self, map: &WordMap) -> Self {
        ModularState {
            a1: self.a1.iter().map(|p| map.apply_a(p)).collect(),
            a2: self.a2.iter().map(|p| map.apply_a(p)).collect(),
            x1: self.x1.iter().map(|p| map.apply_x(p)).collect(),
            x2: self.x2.iter().map(|p| map.apply_x(p)).collect(),
        }
    }

    /// False only when the states provably differ: a residue mismatch
    /// implies the rational values differ; poisoned residues prove nothing.
    pub(crate) fn may_equal(&self, other: &Self) -> bool {
        fn agree<const P: u64>(u: &[Vec<ModP<P>>], v: &[Vec<ModP<P>>]) -> bool {
            u.iter().zip(v).all(|(p, q)| {
                p.iter().zip(q).all(|(a, b)| a.is_poisoned() || b.is_poisoned() || a == b)
            })
        }
        agree(&self.a1, &other.a1) && agree(&self.a2, &other.a2) && agree(&self.x1, &other.x1) && agree(&self.x2, &other.x2)
    }

    /// Residues of A-coordinate `i` at every base point, or `None` if any is
    /// poisoned.
    pub(crate) fn a_key(&self, i: usize) -> Option<Vec<(u64, u64)>> {
        self.a1
            .iter()
            .zip(&self.a2)
            .map(|(p, q)| Some((p[i].residue()?, q[i].residue()?)))
            .collect()
    }
}

/// Smallest `p ≤ max_order` with `w^p` trivial. Powers are screened modulo
/// two primes and confirmed by [`word_is_trivial`].
pub fn word_order(seed: &Seed, w: &MappingClassWord, max_order: usize) -> Result<Option<usize>> {
    require_mapping_class(seed, w)?;
    let map = WordMap::new(seed, w)?;
    let base = ModularState::base(seed, BASE_POINTS);
    let mut cur = base.clone();
    for p in 1..=max_order {
        cur = cur.step(&map);
        if cur.may_equal(&base) && word_is_trivial(seed, &w.power(p), BASE_POINTS)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// An orbit with the largest absolute log-coordinate at every step.
#[derive(Debug, Clone)]
pub struct OrbitRecord<T> {
    pub points: Vec<PositivePoint<T>>,
    pub logs: Vec<f64>,
}

pub fn max_abs_log<T: LogMagnitude>(coords: &[T]) -> f64 {
    coords.iter().map(|c| c.ln_value().abs()).fold(0.0, f64::max)
}

/// Iterates `w` `steps` times starting from `p`.
pub fn orbit<T: Semifield + LogMagnitude>(
    seed: &Seed,
    w: &MappingClassWord,
    p: &PositivePoint<T>,
    steps: usize,
) -> Result<OrbitRecord<T>> {
    p.check(seed)?;
    let map = WordMap::new(seed, w)?;
    let mut points = vec![p.clone()];
    let mut logs = vec![max_abs_log(&p.coords)];
    for _ in 0..steps {
        let next = map.apply(p.flavor, &points.last().expect("non-empty").coords);
        logs.push(max_abs_log(&next));
        points.push(PositivePoint { flavor: p.flavor, coords: next });
    }
    Ok(OrbitRecord { points, logs })
}

/// Evidence that an orbit leaves every compact set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceCertificate {
    pub flavor: Flavor,
    /// First step whose largest coordinate magnitude exceeds the threshold.
    pub step: usize,
    pub threshold: f64,
    pub max_abs_log: f64,
    /// Steps `[start, step]` over which the largest absolute log-coordinate
    /// increases strictly.
    pub monotone_from: usize,
    pub log_norms: Vec<f64>,
}

/// Iterates `w` in log form and reports the first step at which some
/// coordinate has moved beyond the factor `threshold` (relative to the
/// largest starting magnitude), i.e. `max_i |log Z_i| > ln threshold + m_0`.
pub fn divergence_certificate<T: LogMagnitude>(
    seed: &Seed,
    w: &MappingClassWord,
    p: &PositivePoint<T>,
    threshold: f64,
    max_steps: usize,
) -> Result<Option<DivergenceCertificate>> {
    if threshold <= 1.0 {
        return Err(ClusterError::ShapeMismatch("threshold must exceed 1".into()));
    }
    let coords: Vec<LogReal> = p.coords.iter().map(|c| LogReal(c.ln_value())).collect();
    let lp = PositivePoint { flavor: p.flavor, coords };
    lp.check(seed)?;
    let map = WordMap::new(seed, w)?;
    let m0 = max_abs_log(&lp.coords);
    let bound = threshold.ln() + m0;
    let mut norms = vec![m0];
    let mut cur = lp.coords;
    for step in 1..=max_steps {
        cur = map.apply(p.flavor, &cur);
        let m = max_abs_log(&cur);
        if !m.is_finite() {
            return Ok(None);
        }
        norms.push(m);
        if m > bound {
            let mut start = step;
            while start > 0 && norms[start - 1] < norms[start] {
                start -= 1;
            }
            return Ok(Some(DivergenceCertificate {
                flavor: p.flavor,
                step,
                threshold,
                max_abs_log: m,
                monotone_from: start,
                log_norms: norms,
            }));
        }
    }
    Ok(None)
}

/// Largest bit height among exact coordinates.
pub fn max_height(points: &[Vec<BigRational>]) -> u64 {
    points.iter().flat_map(|p| p.iter().map(height_bits)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn a2() -> Seed {
        Seed::skew_symmetric(&[vec![0, 1], vec![-1, 0]], &[]).unwrap()
    }

    fn lk(k: i64) -> Seed {
        Seed::skew_symmetric(&[vec![0, k], vec![-k, 0]], &[]).unwrap()
    }

    fn phi() -> MappingClassWord {
        MappingClassWord::from_cycles(2, &[0], &[vec![0, 1]]).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    #[test]
    fn x_mutation_examples() {
        let p = PositivePoint::x(vec![q(1, 1), q(1, 1)]);
        assert_eq!(x_mutate_point(&a2(), 0, &p).unwrap().coords, vec![q(1, 1), q(2, 1)]);
        assert_eq!(x_mutate_point(&lk(3), 0, &p).unwrap().coords, vec![q(1, 1), q(8, 1)]);
        let generic = PositivePoint::x(vec![q(3, 7), q(5, 2)]);
        let once = x_mutate_point(&lk(3), 0, &generic).unwrap();
        let twice = x_mutate_point(&lk(3).mutate(0).unwrap(), 0, &once).unwrap();
        assert_eq!(twice, generic);
    }

    #[test]
    fn a_mutation_examples() {
        let p = PositivePoint::a(vec![q(1, 1), q(1, 1)]);
        assert_eq!(a_mutate_point(&a2(), 0, &p).unwrap().coords, vec![q(2, 1), q(1, 1)]);
        let rank1 = Seed::skew_symmetric(&[vec![0]], &[]).unwrap();
        let p = PositivePoint::a(vec![q(3, 1)]);
        assert_eq!(a_mutate_point(&rank1, 0, &p).unwrap().coords, vec![q(2, 3)]);
    }

    #[test]
    fn frozen_mutation_is_rejected() {
        let s = Seed::skew_symmetric(&[vec![0, 1], vec![-1, 0]], &[1]).unwrap();
        let p = PositivePoint::a(vec![q(1, 1), q(1, 1)]);
        assert!(matches!(a_mutate_point(&s, 1, &p), Err(ClusterError::FrozenVertex(_))));
    }

    #[test]
    fn a2_orbits_close_after_five_steps() {
        let x = orbit(&a2(), &phi(), &PositivePoint::x(vec![q(1, 1), q(1, 1)]), 5).unwrap();
        let got: Vec<Vec<BigRational>> = x.points.iter().map(|p| p.coords.clone()).collect();
        assert_eq!(
            got,
            vec![
                vec![q(1, 1), q(1, 1)],
                vec![q(2, 1), q(1, 1)],
                vec![q(3, 1), q(1, 2)],
                vec![q(2, 1), q(1, 3)],
                vec![q(1, 1), q(1, 2)],
                vec![q(1, 1), q(1, 1)],
            ]
        );
        let a = orbit(&a2(), &phi(), &PositivePoint::a(vec![q(1, 1), q(1, 1)]), 5).unwrap();
        let got: Vec<Vec<BigRational>> = a.points.iter().map(|p| p.coords.clone()).collect();
        assert_eq!(
            got,
            vec![
                vec![q(1, 1), q(1, 1)],
                vec![q(1, 1), q(2, 1)],
                vec![q(2, 1), q(3, 1)],
                vec![q(3, 1), q(2, 1)],
                vec![q(2, 1), q(1, 1)],
                vec![q(1, 1), q(1, 1)],
            ]
        );
    }

    #[test]
    fn golden_point_is_fixed_in_float_mode() {
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        let out = apply_word(&a2(), &phi(), &PositivePoint::a(vec![g, g])).unwrap();
        assert!((out.coords[0] - g).abs() < 1e-12 && (out.coords[1] - g).abs() < 1e-12);
    }

    #[test]
    fn p_map_examples() {
        let x = p_map(&a2(), &PositivePoint::a(vec![q(2, 1), q(3, 1)])).unwrap();
        assert_eq!(x.coords, vec![q(3, 1), q(1, 2)]);
        let ones = p_map(&lk(4), &PositivePoint::a(vec![q(1, 1), q(1, 1)])).unwrap();
        assert_eq!(ones.coords, vec![q(1, 1), q(1, 1)]);
    }

    #[test]
    fn triviality_and_order() {
        assert!(word_is_trivial(&a2(), &phi().power(5), 3).unwrap());
        assert!(!word_is_trivial(&a2(), &phi().power(3), 3).unwrap());
        assert!(word_is_trivial(&a2(), &MappingClassWord::identity(2), 3).unwrap());
        assert_eq!(word_order(&a2(), &phi(), 1024).unwrap(), Some(5));
        assert_eq!(word_order(&a2(), &MappingClassWord::identity(2), 10).unwrap(), Some(1));
        assert_eq!(word_order(&lk(2), &phi(), 1024).unwrap(), None);
    }

    #[test]
    fn divergence_examples() {
        let ones = PositivePoint::a(vec![q(1, 1), q(1, 1)]);
        let cert = divergence_certificate(&lk(2), &phi(), &ones, 1e3, 60).unwrap().expect("diverges");
        assert!(cert.step <= 60);
        assert_eq!(cert.monotone_from, 0);
        assert!(divergence_certificate(&a2(), &phi(), &ones, 1e3, 200).unwrap().is_none());
        assert!(divergence_certificate(&a2(), &MappingClassWord::identity(2), &ones, 1e3, 50)
            .unwrap()
            .is_none());
    }

    #[test]
    fn base_points_use_distinct_primes() {
        let s = lk(2);
        assert_eq!(base_a_points(&s, 3)[0], vec![q(2, 1), q(7, 1)]);
        let rank1 = Seed::skew_symmetric(&[vec![0]], &[]).unwrap();
        let a: Vec<BigRational> = base_a_points(&rank1, 3).into_iter().map(|p| p[0].clone()).collect();
        assert_eq!(a, vec![q(2, 1), q(3, 1), q(5, 1)]);
        assert_eq!(base_x_points(&rank1, 3)[0], vec![q(7, 1)]);
    }
}
