//! Random seeds and the property checks shared by the property suite and
//! the acceptance run. Every check returns a description of the first
//! counterexample.

#![allow(dead_code)]

use clustermod::positive::{a_mutate_point, p_map, x_mutate_point, WordMap};
use clustermod::scalar::{integer, rational, LogReal};
use clustermod::tropical::{trop_a_mutate, trop_x_mutate, TropicalPoint};
use clustermod::{Flavor, MappingClassWord, PositivePoint, Seed, SeedIso};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

pub type Check = Result<(), String>;

/// Rank 1..=5 with frozen vertices last; `ε_ij = s_ij d_i` for an
/// antisymmetric integer `s`, which is skew-symmetrizable by `d`.
pub fn random_seed<R: Rng>(rng: &mut R) -> Seed {
    let n = rng.random_range(1..=5usize);
    let frozen = rng.random_range(0..n);
    let mut d: Vec<u64> = (0..n).map(|_| rng.random_range(1..=2)).collect();
    d[rng.random_range(0..n)] = 1;
    let mut eps = vec![vec![integer(0); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let s: i64 = rng.random_range(-2..=2);
            eps[i][j] = integer(s * d[i] as i64);
            eps[j][i] = integer(-s * d[j] as i64);
        }
    }
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let flags = (0..n).map(|i| i >= n - frozen).collect();
    Seed::new(labels, flags, eps, d).expect("generated seeds are valid")
}

pub fn positive_rational<R: Rng>(rng: &mut R) -> BigRational {
    rational(rng.random_range(1..=40), rng.random_range(1..=40))
}

pub fn signed_rational<R: Rng>(rng: &mut R) -> BigRational {
    rational(rng.random_range(-40..=40), rng.random_range(1..=12))
}

pub fn random_a<R: Rng>(rng: &mut R, seed: &Seed) -> PositivePoint<BigRational> {
    PositivePoint::a((0..seed.rank()).map(|_| positive_rational(rng)).collect())
}

pub fn random_x<R: Rng>(rng: &mut R, seed: &Seed) -> PositivePoint<BigRational> {
    PositivePoint::x((0..seed.mutable_rank()).map(|_| positive_rational(rng)).collect())
}

pub fn random_trop<R: Rng>(rng: &mut R, seed: &Seed, flavor: Flavor) -> TropicalPoint<BigRational> {
    let n = match flavor {
        Flavor::A => seed.rank(),
        Flavor::X => seed.mutable_rank(),
    };
    TropicalPoint { flavor, coords: (0..n).map(|_| signed_rational(rng)).collect() }
}

pub fn random_vertex<R: Rng>(rng: &mut R, seed: &Seed) -> usize {
    *seed.mutable_indices().choose(rng).expect("a mutable vertex")
}

/// Permutation of the mutable vertices fixing the frozen ones.
pub fn random_iso<R: Rng>(rng: &mut R, seed: &Seed) -> SeedIso {
    let mutable = seed.mutable_indices();
    let mut image = mutable.clone();
    image.shuffle(rng);
    let mut perm: Vec<usize> = (0..seed.rank()).collect();
    for (&i, &j) in mutable.iter().zip(&image) {
        perm[i] = j;
    }
    SeedIso::from_vec(perm).expect("a permutation")
}

pub fn random_word<R: Rng>(rng: &mut R, seed: &Seed, len: usize) -> MappingClassWord {
    let mutations = (0..len).map(|_| random_vertex(rng, seed)).collect();
    MappingClassWord::new(mutations, random_iso(rng, seed))
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok { Ok(()) } else { Err(what()) }
}

pub fn seed_involution(seed: &Seed, k: usize) -> Check {
    let back = seed.mutate(k).unwrap().mutate(k).unwrap();
    ensure(back == *seed, || format!("mu_{k} twice changed {seed:?}"))
}

pub fn a_involution(seed: &Seed, k: usize, a: &PositivePoint<BigRational>) -> Check {
    let once = a_mutate_point(seed, k, a).unwrap();
    let twice = a_mutate_point(&seed.mutate(k).unwrap(), k, &once).unwrap();
    ensure(twice == *a, || format!("A-mutation at {k} not involutive at {a:?}"))
}

pub fn x_involution(seed: &Seed, k: usize, x: &PositivePoint<BigRational>) -> Check {
    let once = x_mutate_point(seed, k, x).unwrap();
    let twice = x_mutate_point(&seed.mutate(k).unwrap(), k, &once).unwrap();
    ensure(twice == *x, || format!("X-mutation at {k} not involutive at {x:?}"))
}

pub fn trop_involution(seed: &Seed, k: usize, t: &TropicalPoint<BigRational>) -> Check {
    let mutate = |s: &Seed, p: &TropicalPoint<BigRational>| match p.flavor {
        Flavor::A => trop_a_mutate(s, k, p).unwrap(),
        Flavor::X => trop_x_mutate(s, k, p).unwrap(),
    };
    let twice = mutate(&seed.mutate(k).unwrap(), &mutate(seed, t));
    ensure(twice == *t, || format!("tropical mutation at {k} not involutive at {t:?}"))
}

/// `p ∘ μ_k = μ_k ∘ p`.
pub fn p_naturality(seed: &Seed, k: usize, a: &PositivePoint<BigRational>) -> Check {
    let lhs = p_map(&seed.mutate(k).unwrap(), &a_mutate_point(seed, k, a).unwrap()).unwrap();
    let rhs = x_mutate_point(seed, k, &p_map(seed, a).unwrap()).unwrap();
    ensure(lhs == rhs, || format!("p-map does not commute with mu_{k} at {a:?}"))
}

fn relabel_coords<T: Clone>(seed: &Seed, sigma: &SeedIso, flavor: Flavor, v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    match flavor {
        Flavor::A => {
            for (i, c) in v.iter().enumerate() {
                out[sigma.apply(i)] = c.clone();
            }
        }
        Flavor::X => {
            for (pos, i) in seed.mutable_indices().into_iter().enumerate() {
                out[seed.mutable_position(sigma.apply(i)).unwrap()] = v[pos].clone();
            }
        }
    }
    out
}

/// Relabelling commutes with mutation on seeds and on A- and X-points.
pub fn sigma_equivariance(
    seed: &Seed,
    k: usize,
    sigma: &SeedIso,
    a: &PositivePoint<BigRational>,
    x: &PositivePoint<BigRational>,
) -> Check {
    let moved = seed.relabel(sigma);
    let sk = sigma.apply(k);
    ensure(moved.mutate(sk).unwrap() == seed.mutate(k).unwrap().relabel(sigma), || {
        format!("seed mutation not equivariant under {sigma:?}")
    })?;
    for p in [a, x] {
        let mutate = |s: &Seed, v: usize, q: &PositivePoint<BigRational>| match q.flavor {
            Flavor::A => a_mutate_point(s, v, q).unwrap(),
            Flavor::X => x_mutate_point(s, v, q).unwrap(),
        };
        let lhs = mutate(&moved, sk, &PositivePoint { flavor: p.flavor, coords: relabel_coords(seed, sigma, p.flavor, &p.coords) });
        let rhs = relabel_coords(seed, sigma, p.flavor, &mutate(seed, k, p).coords);
        ensure(lhs.coords == rhs, || format!("{:?}-mutation not equivariant under {sigma:?}", p.flavor))?;
    }
    Ok(())
}

/// `μ_k(λ t) = λ μ_k(t)` for `λ > 0`.
pub fn homogeneity(seed: &Seed, k: usize, t: &TropicalPoint<BigRational>, lambda: &BigRational) -> Check {
    let mutate = |p: &TropicalPoint<BigRational>| match p.flavor {
        Flavor::A => trop_a_mutate(seed, k, p).unwrap(),
        Flavor::X => trop_x_mutate(seed, k, p).unwrap(),
    };
    ensure(mutate(&t.scale(lambda)) == mutate(t).scale(lambda), || format!("not homogeneous at {t:?}, {lambda}"))
}

/// Largest gap between `ε log w(exp(t/ε))` and the tropical image of `t`.
pub fn finite_eps_gap(seed: &Seed, w: &MappingClassWord, t: &TropicalPoint<BigRational>, eps: f64) -> f64 {
    let map = WordMap::new(seed, w).unwrap();
    let coords: Vec<f64> = t.coords.iter().map(|c| c.to_f64().unwrap()).collect();
    let logs: Vec<LogReal> = coords.iter().map(|&c| LogReal(c / eps)).collect();
    let image = map.apply(t.flavor, &logs);
    let trop = map.apply_tropical(t.flavor, &coords);
    image.iter().zip(&trop).map(|(u, v)| (eps * u.0 - v).abs()).fold(0.0, f64::max)
}

/// `w` followed by its inverse fixes the seed and exact A- and X-points.
pub fn word_inverse(seed: &Seed, w: &MappingClassWord, a: &PositivePoint<BigRational>, x: &PositivePoint<BigRational>) -> Check {
    let image = clustermod::word::apply_word_to_seed(seed, w).unwrap();
    let inv = w.inverse_unchecked();
    ensure(clustermod::word::apply_word_to_seed(&image, &inv).unwrap() == *seed, || format!("inverse of {w:?} misses the seed"))?;
    let (fw, bw) = (WordMap::new(seed, w).unwrap(), WordMap::new(&image, &inv).unwrap());
    for p in [a, x] {
        let back = bw.apply(p.flavor, &fw.apply(p.flavor, &p.coords));
        ensure(back == p.coords, || format!("inverse of {w:?} moves {p:?}"))?;
    }
    Ok(())
}
