//! Tropical limits of the cluster transformations and their projective
//! dynamics.
//!
//! The tropical maps are obtained by running the positive formulas over the
//! max-plus semifield, which is exactly the limit `ε log f(e^{x/ε})`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::positive::{expected_len, Flavor, MutationStep, WordMap};
use crate::scalar::{Tropical, TropicalScalar};
use crate::seed::Seed;
use crate::word::{require_mapping_class, MappingClassWord};

/// A point of the tropical A- or X-space in the base chart.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalPoint<T> {
    pub flavor: Flavor,
    pub coords: Vec<T>,
}

impl<T: TropicalScalar> TropicalPoint<T> {
    pub fn a(coords: Vec<T>) -> Self {
        TropicalPoint { flavor: Flavor::A, coords }
    }

    pub fn x(coords: Vec<T>) -> Self {
        TropicalPoint { flavor: Flavor::X, coords }
    }

    pub fn check(&self, seed: &Seed) -> Result<()> {
        let expected = expected_len(seed, self.flavor);
        if self.coords.len() != expected {
            return Err(ClusterError::ShapeMismatch(format!(
                "tropical {:?}-point has {} coordinates, expected {expected}",
                self.flavor,
                self.coords.len()
            )));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, lambda: &T) -> Self {
        TropicalPoint { flavor: self.flavor, coords: self.coords.iter().map(|c| c.clone() * lambda.clone()).collect() }
    }

    pub fn sup_norm(&self) -> T {
        sup_norm(&self.coords)
    }
}

pub(crate) fn sup_norm<T: TropicalScalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, c| {
        let a = c.abs();
        if a > m {
            a
        } else {
            m
        }
    })
}

pub(crate) fn wrap<T: Clone>(v: &[T]) -> Vec<Tropical<T>> {
    v.iter().cloned().map(Tropical).collect()
}

pub(crate) fn unwrap<T>(v: Vec<Tropical<T>>) -> Vec<T> {
    v.into_iter().map(|t| t.0).collect()
}

fn trop_step<T: TropicalScalar>(seed: &Seed, k: usize, t: &TropicalPoint<T>, flavor: Flavor) -> Result<TropicalPoint<T>> {
    if t.flavor != flavor {
        return Err(ClusterError::FlavorMismatch(format!("expected a tropical {flavor:?}-point")));
    }
    let step = MutationStep::new(seed, k)?;
    t.check(seed)?;
    let mut coords = wrap(&t.coords);
    match flavor {
        Flavor::A => step.apply_a(&mut coords),
        Flavor::X => step.apply_x(&mut coords),
    }
    Ok(TropicalPoint { flavor, coords: unwrap(coords) })
}

/// `x'_k = -x_k`, `x'_i = x_i - ε_ik · max(0, -sgn(ε_ik) x_k)`.
pub fn trop_x_mutate<T: TropicalScalar>(seed: &Seed, k: usize, t: &TropicalPoint<T>) -> Result<TropicalPoint<T>> {
    trop_step(seed, k, t, Flavor::X)
}

/// `a'_k = -a_k + max(Σ_{ε_kj>0} ε_kj a_j, Σ_{ε_kj<0} -ε_kj a_j)`.
pub fn trop_a_mutate<T: TropicalScalar>(seed: &Seed, k: usize, t: &TropicalPoint<T>) -> Result<TropicalPoint<T>> {
    trop_step(seed, k, t, Flavor::A)
}

impl WordMap {
    pub fn apply_tropical<T: TropicalScalar>(&self, flavor: Flavor, coords: &[T]) -> Vec<T> {
        unwrap(self.apply(flavor, &wrap(coords)))
    }
}

pub fn apply_word_tropical<T: TropicalScalar>(
    seed: &Seed,
    w: &MappingClassWord,
    t: &TropicalPoint<T>,
) -> Result<TropicalPoint<T>> {
    t.check(seed)?;
    let map = WordMap::new(seed, w)?;
    Ok(TropicalPoint { flavor: t.flavor, coords: map.apply_tropical(t.flavor, &t.coords) })
}

/// A ray of a tropical space, represented with sup-norm 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveClass {
    pub flavor: Flavor,
    pub coords: Vec<f64>,
}

impl ProjectiveClass {
    pub fn of<T: TropicalScalar>(t: &TropicalPoint<T>) -> Result<Self> {
        let coords = normalize(&t.coords).ok_or(ClusterError::ZeroPoint)?;
        Ok(ProjectiveClass { flavor: t.flavor, coords })
    }

    /// Class of a float vector; `None` for the zero vector.
    pub fn from_f64(flavor: Flavor, v: &[f64]) -> Option<Self> {
        let n = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        (n > 0.0 && n.is_finite()).then(|| ProjectiveClass { flavor, coords: v.iter().map(|x| x / n).collect() })
    }

    /// Sup-norm distance between normalized representatives.
    pub fn distance(&self, other: &ProjectiveClass) -> f64 {
        sup_distance(&self.coords, &other.coords)
    }
}

pub(crate) fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Divides by the sup-norm in `T` before converting, so exact inputs give
/// exactly rounded outputs.
pub(crate) fn normalize<T: TropicalScalar>(v: &[T]) -> Option<Vec<f64>> {
    let n = sup_norm(v);
    if n.is_zero() {
        return None;
    }
    Some(v.iter().map(|c| (c.clone() / n.clone()).to_f64_lossy()).collect())
}

/// Which sequence satisfied the convergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMethod {
    /// Consecutive normalized iterates agreed.
    Iterates,
    /// Consecutive normalized increments `z(m) - z(m-1)` agreed after the
    /// orbit escaped. Limits that are approached only like `1/m` (parabolic
    /// dynamics) are resolved this way.
    Increments,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub class: Vec<f64>,
    pub steps: usize,
    pub method: LimitMethod,
    /// Sup distance between the last two normalized iterates, reported
    /// whatever the method.
    pub iterate_gap: f64,
}

/// Consecutive-agreement test over normalized iterates and increments.
pub(crate) struct LimitTracker {
    tol: f64,
    window: usize,
    prev_iter: Option<Vec<f64>>,
    prev_inc: Option<Vec<f64>>,
    close_iter: usize,
    close_inc: usize,
}

impl LimitTracker {
    pub(crate) const WINDOW: usize = 5;

    pub(crate) fn new(tol: f64) -> Self {
        LimitTracker { tol, window: Self::WINDOW, prev_iter: None, prev_inc: None, close_iter: 0, close_inc: 0 }
    }

    /// Feeds step `step`; `inc` is the normalized increment (None when the
    /// increment vanished) and `escaped` tells whether the orbit has moved
    /// far enough for increments to be meaningful.
    pub(crate) fn push(&mut self, step: usize, iter: Vec<f64>, inc: Option<Vec<f64>>, escaped: bool) -> Option<LimitReport> {
        let gap = self.prev_iter.as_ref().map_or(f64::INFINITY, |p| sup_distance(p, &iter));
        self.close_iter = if gap < self.tol { self.close_iter + 1 } else { 0 };
        match (&self.prev_inc, &inc) {
            (Some(p), Some(c)) if sup_distance(p, c) < self.tol => self.close_inc += 1,
            _ => self.close_inc = 0,
        }
        self.prev_iter = Some(iter.clone());
        self.prev_inc = inc.clone();
        if escaped && self.close_inc >= self.window {
            return Some(LimitReport { class: inc.expect("counted"), steps: step, method: LimitMethod::Increments, iterate_gap: gap });
        }
        if self.close_iter >= self.window {
            return Some(LimitReport { class: iter, steps: step, method: LimitMethod::Iterates, iterate_gap: gap });
        }
        None
    }
}

/// Iterates `w` on `start` and reports the limiting ray, or `None` when
/// neither normalized iterates nor normalized increments settle within
/// `max_iters` (for instance on periodic orbits).
pub fn projective_limit<T: TropicalScalar>(
    seed: &Seed,
    w: &MappingClassWord,
    start: &TropicalPoint<T>,
    max_iters: usize,
    tol: f64,
) -> Result<Option<LimitReport>> {
    start.check(seed)?;
    if start.is_zero() {
        return Err(ClusterError::ZeroPoint);
    }
    require_mapping_class(seed, w)?;
    let map = WordMap::new(seed, w)?;
    let flavor = start.flavor;
    let mut cur = start.coords.clone();
    let mut reference = start.sup_norm();
    let mut tracker = LimitTracker::new(tol);
    for step in 1..=max_iters {
        let mut next = map.apply_tropical(flavor, &cur);
        let inc: Vec<T> = next.iter().zip(&cur).map(|(a, b)| a.clone() - b.clone()).collect();
        let norm = sup_norm(&next);
        if norm.is_zero() {
            return Ok(None);
        }
        let escaped = norm >= reference.clone() * T::from_i64(10).expect("small integer");
        let report = tracker.push(step, normalize(&next).expect("nonzero"), normalize(&inc), escaped);
        if report.is_some() {
            return Ok(report);
        }
        // float iterates are rescaled to stay in range; the map is homogeneous
        if norm.to_f64_lossy() > 1e100 && !T::sign_slack(&norm).is_zero() {
            let s = norm.clone();
            next = next.into_iter().map(|c| c / s.clone()).collect();
            reference = reference / s;
        }
        cur = next;
    }
    Ok(None)
}

/// Convenience for the exact case.
pub type ExactTropicalPoint = TropicalPoint<BigRational>;
