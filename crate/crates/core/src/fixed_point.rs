//! Multistart Gauss-Newton search for positive fixed points of a mapping
//! class, carried out in logarithmic coordinates.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::positive::{divergence_certificate, DivergenceCertificate, Flavor, PositivePoint, WordMap};
use crate::scalar::{LogReal, Semifield};
use crate::seed::Seed;
use crate::word::{require_mapping_class, MappingClassWord};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub box_radius: f64,
    pub escape_radius: f64,
    pub rng_seed: u64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            restarts: 50,
            max_iterations: 200,
            tolerance: 1e-10,
            box_radius: 2.0,
            escape_radius: 50.0,
            rng_seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub flavor: Flavor,
    /// The fixed point, when the residual fell below tolerance.
    pub point: Option<Vec<f64>>,
    /// Smallest sup-norm residual `|log φ(e^u) - u|` seen over all restarts.
    pub best_residual: f64,
    pub restarts_used: usize,
    pub certificate: Option<DivergenceCertificate>,
}

impl FixedPointResult {
    pub fn found(&self) -> bool {
        self.point.is_some()
    }
}

fn residual(map: &WordMap, flavor: Flavor, u: &DVector<f64>) -> DVector<f64> {
    let pt: Vec<LogReal> = u.iter().map(|&x| LogReal(x)).collect();
    let image = map.apply(flavor, &pt);
    DVector::from_iterator(u.len(), image.iter().zip(u.iter()).map(|(v, x)| v.0 - x))
}

fn sup(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

/// A log-domain value carrying its gradient, so Jacobians of the log-map
/// are exact up to rounding.
#[derive(Debug, Clone, PartialEq)]
struct LogDual {
    v: f64,
    d: Vec<f64>,
}

impl LogDual {
    fn combine(a: &[f64], wa: f64, b: &[f64], wb: f64) -> Vec<f64> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| wa * a.get(i).copied().unwrap_or(0.0) + wb * b.get(i).copied().unwrap_or(0.0))
            .collect()
    }
}

impl Semifield for LogDual {
    fn one() -> Self {
        LogDual { v: 0.0, d: Vec::new() }
    }

    fn plus(&self, rhs: &Self) -> Self {
        let v = LogReal(self.v).plus(&LogReal(rhs.v)).0;
        let wa = (self.v - v).exp();
        let wb = (rhs.v - v).exp();
        LogDual { v, d: Self::combine(&self.d, wa, &rhs.d, wb) }
    }

    fn times(&self, rhs: &Self) -> Self {
        LogDual { v: self.v + rhs.v, d: Self::combine(&self.d, 1.0, &rhs.d, 1.0) }
    }

    fn over(&self, rhs: &Self) -> Self {
        LogDual { v: self.v - rhs.v, d: Self::combine(&self.d, 1.0, &rhs.d, -1.0) }
    }

    fn powi(&self, e: i64) -> Self {
        LogDual { v: self.v * e as f64, d: self.d.iter().map(|x| x * e as f64).collect() }
    }

    fn is_admissible(&self) -> bool {
        self.v.is_finite()
    }
}

/// Jacobian of the residual `u ↦ log φ(e^u) - u`.
fn jacobian(map: &WordMap, flavor: Flavor, u: &DVector<f64>) -> DMatrix<f64> {
    let n = u.len();
    let seeded: Vec<LogDual> = (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            LogDual { v: u[i], d }
        })
        .collect();
    let image = map.apply(flavor, &seeded);
    DMatrix::from_fn(n, n, |i, j| image[i].d.get(j).copied().unwrap_or(0.0) - if i == j { 1.0 } else { 0.0 })
}

fn gauss_newton_step(map: &WordMap, flavor: Flavor, u: &DVector<f64>, r: &DVector<f64>) -> Option<DVector<f64>> {
    let jac = jacobian(map, flavor, u);
    jac.svd(true, true).solve(&(-r), 1e-12).ok()
}

/// Runs Gauss-Newton from one start; returns the final iterate, its
/// residual and the size of the next step.
///
/// Near infinity the residual of an infinite-order class can decay without
/// a fixed point (the log-map becomes linear with eigenvalue 1 there); the
/// next Newton step stays of order one in that case, while at a genuine
/// fixed point it is as small as the residual.
fn descend(map: &WordMap, flavor: Flavor, start: DVector<f64>, opts: &FixedPointOptions) -> (DVector<f64>, f64, f64) {
    let mut u = start;
    let mut r = residual(map, flavor, &u);
    let mut norm = sup(&r);
    for _ in 0..opts.max_iterations {
        if norm < opts.tolerance {
            break;
        }
        let delta = match gauss_newton_step(map, flavor, &u, &r) {
            Some(d) => d,
            None => break,
        };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let cand = &u + &delta * lambda;
            let rc = residual(map, flavor, &cand);
            let nc = sup(&rc);
            if nc < norm {
                u = cand;
                r = rc;
                norm = nc;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved || sup(&u) > opts.escape_radius {
            break;
        }
    }
    let next = gauss_newton_step(map, flavor, &u, &r).map_or(f64::INFINITY, |d| sup(&d));
    (u, norm, next)
}

/// Searches for `u` with `log φ(e^u) = u`. Not finding one is evidence of
/// absence, not proof; the result then carries the best residual and, if
/// available, a divergence certificate for the orbit of the all-ones point.
pub fn find_fixed_point(seed: &Seed, w: &MappingClassWord, flavor: Flavor) -> Result<FixedPointResult> {
    find_fixed_point_with(seed, w, flavor, &FixedPointOptions::default())
}

pub fn find_fixed_point_with(
    seed: &Seed,
    w: &MappingClassWord,
    flavor: Flavor,
    opts: &FixedPointOptions,
) -> Result<FixedPointResult> {
    require_mapping_class(seed, w)?;
    let map = WordMap::new(seed, w)?;
    let dim = map.len(flavor);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut best = f64::INFINITY;
    for attempt in 0..opts.restarts {
        let start = DVector::from_fn(dim, |_, _| rng.random_range(-opts.box_radius..=opts.box_radius));
        let (u, norm, next_step) = descend(&map, flavor, start, opts);
        if sup(&u) <= opts.escape_radius {
            best = best.min(norm);
        }
        if norm < opts.tolerance && next_step < 1e-6 && sup(&u) <= opts.escape_radius {
            return Ok(FixedPointResult {
                flavor,
                point: Some(u.iter().map(|x| x.exp()).collect()),
                best_residual: norm,
                restarts_used: attempt + 1,
                certificate: None,
            });
        }
    }
    let ones = PositivePoint { flavor, coords: vec![1.0f64; dim] };
    let certificate = divergence_certificate(seed, w, &ones, 1e3, 200)?;
    Ok(FixedPointResult { flavor, point: None, best_residual: best, restarts_used: opts.restarts, certificate })
}
