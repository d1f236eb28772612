//! Nielsen-Thurston types of mapping classes: periodic, cluster-reducible
//! and cluster-pA, plus reduction and cluster Dehn twists.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::fixed_point::{find_fixed_point_with, FixedPointOptions, FixedPointResult};
use crate::positive::{
    base_a_points, max_height, word_order, DivergenceCertificate, Flavor, ModularState, PositivePoint, WordMap,
    BASE_POINTS,
};
use crate::scalar::{integer, LogReal};
use crate::seed::Seed;
use crate::tropical::{normalize, projective_limit, LimitMethod, LimitTracker, ProjectiveClass, TropicalPoint};
use crate::word::{invert_word, require_mapping_class, MappingClassWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    pub max_order: usize,
    pub max_power: usize,
    pub tropical_iters: usize,
    /// Bit height above which exact confirmation is abandoned.
    pub height_bits: u64,
    /// Seed of the multistart fixed-point search.
    pub rng_seed: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_order: 1024,
            max_power: 64,
            tropical_iters: 500,
            height_bits: 1 << 16,
            rng_seed: FixedPointOptions::default().rng_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub power: usize,
    pub vertices: Vec<usize>,
    /// Every vertex is fixed, not just the set.
    pub pointwise: bool,
    /// Confirmed in exact arithmetic; otherwise only modular evidence.
    pub verified: bool,
}

/// `f[i] = Some(j)` when coordinate `i` of `w^m(A)` equals `A_j` at every
/// base point, modulo both primes.
fn vertex_maps(seed: &Seed, w: &MappingClassWord, max_power: usize) -> Result<Vec<Vec<Option<usize>>>> {
    let map = WordMap::new(seed, w)?;
    let base = ModularState::base(seed, BASE_POINTS);
    let n = seed.rank();
    let index: HashMap<_, usize> = (0..n).filter_map(|j| Some((base.a_key(j)?, j))).collect();
    let mut cur = base.clone();
    let mut out = Vec::with_capacity(max_power);
    for _ in 0..max_power {
        cur = cur.step(&map);
        out.push((0..n).map(|i| cur.a_key(i).and_then(|k| index.get(&k).copied())).collect());
    }
    Ok(out)
}

/// Mutable vertices lying on cycles of the partial map `f`.
fn cycles_of(seed: &Seed, f: &[Option<usize>]) -> Vec<usize> {
    seed.mutable_indices()
        .into_iter()
        .filter(|&i| {
            let mut j = i;
            for _ in 0..f.len() {
                match f[j] {
                    Some(k) if !seed.is_frozen(k) => j = k,
                    _ => return false,
                }
                if j == i {
                    return true;
                }
            }
            false
        })
        .collect()
}

/// Exact `w^m` at the base A-points, or `None` past the height budget.
fn exact_power(seed: &Seed, w: &MappingClassWord, m: usize, height: u64) -> Result<Option<Vec<Vec<BigRational>>>> {
    exact_power_at(seed, w, m, height, base_a_points(seed, BASE_POINTS))
}

fn exact_power_at(
    seed: &Seed,
    w: &MappingClassWord,
    m: usize,
    height: u64,
    mut pts: Vec<Vec<BigRational>>,
) -> Result<Option<Vec<Vec<BigRational>>>> {
    let map = WordMap::new(seed, w)?;
    for _ in 0..m {
        pts = pts.iter().map(|p| map.apply_a(p)).collect();
        if max_height(&pts) > height {
            return Ok(None);
        }
    }
    Ok(Some(pts))
}

fn holds_exactly(out: &[Vec<BigRational>], base: &[Vec<BigRational>], f: &[Option<usize>], set: &[usize]) -> bool {
    set.iter().all(|&i| out.iter().zip(base).all(|(o, b)| f[i].is_some_and(|j| o[i] == b[j])))
}

/// Subsets of the base cluster preserved by `w^m`, `m ≤ max_power`. For each
/// power the maximal invariant set and the fixed vertices are reported, each
/// the first time it appears.
pub fn find_invariant_vertex_sets(seed: &Seed, w: &MappingClassWord, max_power: usize) -> Result<Vec<InvariantSet>> {
    invariant_sets(seed, w, max_power, Budgets::default().height_bits)
}

fn invariant_sets(seed: &Seed, w: &MappingClassWord, max_power: usize, height: u64) -> Result<Vec<InvariantSet>> {
    require_mapping_class(seed, w)?;
    let maps = vertex_maps(seed, w, max_power)?;
    let base = base_a_points(seed, BASE_POINTS);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (idx, f) in maps.iter().enumerate() {
        let m = idx + 1;
        let setwise = cycles_of(seed, f);
        let fixed: Vec<usize> = setwise.iter().copied().filter(|&i| f[i] == Some(i)).collect();
        let mut found = Vec::new();
        if !fixed.is_empty() {
            found.push((fixed.clone(), true));
        }
        if !setwise.is_empty() && setwise != fixed {
            found.push((setwise, false));
        }
        found.retain(|c| seen.insert(c.clone()));
        if found.is_empty() {
            continue;
        }
        let exact = exact_power(seed, w, m, height)?;
        for (vertices, pointwise) in found {
            let verified = exact.as_ref().is_some_and(|e| holds_exactly(e, &base, f, &vertices));
            out.push(InvariantSet { power: m, vertices, pointwise, verified });
        }
    }
    Ok(out)
}

pub fn cluster_reduce(seed: &Seed, set: &[usize]) -> Result<Seed> {
    seed.freeze(set)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionData {
    pub frozen_added: Vec<usize>,
    pub reduced_seed: Seed,
    pub reduced_word: MappingClassWord,
}

/// Reinterprets `w` on the seed with `set` frozen. Every vertex of `set` must
/// be fixed by `w` itself and no mutation may touch it.
pub fn reduce(seed: &Seed, w: &MappingClassWord, set: &[usize]) -> Result<ReductionData> {
    require_mapping_class(seed, w)?;
    if !set.is_empty() {
        let f = &vertex_maps(seed, w, 1)?[0];
        let moved: Vec<String> = set.iter().filter(|&&i| f.get(i) != Some(&Some(i))).map(|&i| seed.label(i).to_string()).collect();
        if !moved.is_empty() {
            return Err(ClusterError::NotPointwiseFixed(format!("vertices {} are moved", moved.join(", "))));
        }
        let exact = exact_power(seed, w, 1, u64::MAX)?.expect("unbounded height");
        if !holds_exactly(&exact, &base_a_points(seed, BASE_POINTS), f, set) {
            return Err(ClusterError::NotPointwiseFixed("exact check failed".into()));
        }
    }
    if let Some((step, &k)) = w.mutations.iter().enumerate().find(|(_, k)| set.contains(k)) {
        return Err(ClusterError::InvalidStep {
            step,
            reason: format!("mutation at {} which is being frozen", seed.label(k)),
        });
    }
    let reduced_seed = cluster_reduce(seed, set)?;
    let reduced_word = w.clone();
    require_mapping_class(&reduced_seed, &reduced_word)?;
    let mut frozen_added = set.to_vec();
    frozen_added.sort_unstable();
    Ok(ReductionData { frozen_added, reduced_seed, reduced_word })
}

pub fn reduce_word(seed: &Seed, w: &MappingClassWord, set: &[usize]) -> Result<MappingClassWord> {
    Ok(reduce(seed, w, set)?.reduced_word)
}

/// `w^power` fixes every vertex outside `active` and acts on the active pair
/// as `(A_r0, A_r1) ↦ (A_r1, (C + A_r1²)/A_r0)` with `C = Π A_v^e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnTwist {
    pub power: usize,
    pub fixed: Vec<usize>,
    pub active: (usize, usize),
    /// Exponents of the coefficient monomial, zero entries omitted.
    pub coefficient: Vec<(usize, u32)>,
}

impl DehnTwist {
    pub fn coefficient_text(&self, seed: &Seed) -> String {
        if self.coefficient.is_empty() {
            return "1".into();
        }
        self.coefficient
            .iter()
            .map(|&(v, e)| if e == 1 { format!("A{}", seed.label(v)) } else { format!("A{}^{e}", seed.label(v)) })
            .collect::<Vec<_>>()
            .join("·")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum DehnDetection {
    Yes(DehnTwist),
    No { reason: String },
    Inconclusive { reason: String },
}

fn power_of_two(r: &BigRational) -> Option<u32> {
    if !r.denom().is_one() || !r.is_positive() {
        return None;
    }
    let n = r.numer().magnitude();
    (n.count_ones() == 1).then(|| (n.bits() - 1) as u32)
}

/// Exponents of a monomial in the A-coordinates.
type Monomial = Vec<(usize, u32)>;

/// Tests the twist form for the pair `(r0, r1)` at power `m`; `None` when it
/// does not hold, `Err` only for arithmetic set-up failures.
fn twist_form(seed: &Seed, w: &MappingClassWord, m: usize, r0: usize, r1: usize, height: u64) -> Result<Option<Option<Monomial>>> {
    let base = base_a_points(seed, BASE_POINTS);
    let Some(out) = exact_power(seed, w, m, height)? else { return Ok(Some(None)) };
    let n = seed.rank();
    let coef = |b: &[BigRational], o: &[BigRational]| &b[r0] * &o[r1] - &b[r1] * &b[r1];
    for (b, o) in base.iter().zip(&out) {
        if o[r0] != b[r1] || (0..n).any(|v| v != r0 && v != r1 && o[v] != b[v]) {
            return Ok(None);
        }
    }
    let c0: Vec<BigRational> = base.iter().zip(&out).map(|(b, o)| coef(b, o)).collect();
    if c0.iter().any(|c| !c.is_positive()) {
        return Ok(None);
    }
    // exponent of A_v read off from doubling A_v at the first base point
    let mut exps = Vec::new();
    for v in 0..n {
        let mut p = base[0].clone();
        p[v] = &p[v] * integer(2);
        let Some(o) = exact_power_at(seed, w, m, height, vec![p.clone()])? else { return Ok(Some(None)) };
        let Some(e) = power_of_two(&(coef(&p, &o[0]) / &c0[0])) else { return Ok(None) };
        if e > 0 {
            if v == r0 || v == r1 {
                return Ok(None);
            }
            exps.push((v, e));
        }
    }
    let monomial = |b: &[BigRational]| {
        exps.iter().fold(BigRational::one(), |acc, &(v, e)| acc * num_traits::pow(b[v].clone(), e as usize))
    };
    if base.iter().zip(&c0).all(|(b, c)| monomial(b) == *c) {
        Ok(Some(Some(exps)))
    } else {
        Ok(None)
    }
}

pub fn detect_cluster_dehn_twist(seed: &Seed, w: &MappingClassWord, budgets: &Budgets) -> Result<DehnDetection> {
    require_mapping_class(seed, w)?;
    if let Some(p) = word_order(seed, w, budgets.max_order)? {
        return Ok(DehnDetection::No { reason: format!("finite order {p}") });
    }
    let maps = vertex_maps(seed, w, budgets.max_power)?;
    let mutable = seed.mutable_indices();
    let mut unsure = false;
    for (idx, f) in maps.iter().enumerate() {
        let m = idx + 1;
        let fixed: Vec<usize> = mutable.iter().copied().filter(|&i| f[i] == Some(i)).collect();
        if mutable.len() != fixed.len() + 2 {
            continue;
        }
        let pair: Vec<usize> = mutable.iter().copied().filter(|i| !fixed.contains(i)).collect();
        let (a, b) = (pair[0], pair[1]);
        if seed.eps(a, b).clone() * seed.eps(b, a).clone() != integer(-4) {
            continue;
        }
        for (r0, r1) in [(a, b), (b, a)] {
            if f[r0] != Some(r1) {
                continue;
            }
            match twist_form(seed, w, m, r0, r1, budgets.height_bits)? {
                Some(Some(coefficient)) => {
                    return Ok(DehnDetection::Yes(DehnTwist { power: m, fixed, active: (r0, r1), coefficient }))
                }
                Some(None) => unsure = true,
                None => {}
            }
        }
    }
    if unsure {
        Ok(DehnDetection::Inconclusive { reason: "exact check exceeded the height budget".into() })
    } else {
        Ok(DehnDetection::No { reason: format!("no rank-2 twist form up to power {}", budgets.max_power) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DehnLimit {
    pub twist: DehnTwist,
    pub forward: ProjectiveClass,
    pub forward_steps: usize,
    pub backward: ProjectiveClass,
    pub backward_steps: usize,
}

fn log_limit(seed: &Seed, w: &MappingClassWord, start: &[LogReal], max_steps: usize, tol: f64) -> Result<Option<(Vec<f64>, usize)>> {
    let map = WordMap::new(seed, w)?;
    let logs = |p: &[LogReal]| p.iter().map(|c| c.0).collect::<Vec<f64>>();
    let reference = logs(start).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut tracker = LimitTracker::new(tol);
    let mut cur = start.to_vec();
    for step in 1..=max_steps {
        let next = map.apply_a(&cur);
        let (u, v) = (logs(&cur), logs(&next));
        if v.iter().any(|x| !x.is_finite()) {
            return Ok(None);
        }
        let inc: Vec<f64> = v.iter().zip(&u).map(|(a, b)| a - b).collect();
        let norm = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let Some(iter) = normalize(&v) else {
            cur = next;
            continue;
        };
        if let Some(r) = tracker.push(step, iter, normalize(&inc), norm >= 10.0 * reference) {
            return Ok(Some((r.class, r.steps)));
        }
        cur = next;
    }
    Ok(None)
}

/// Limit of `[log w^{±ml}(p)]` for a detected cluster Dehn twist, where `l`
/// is the twist power. Both directions must converge within `max_steps`.
pub fn dehn_twist_limit(
    seed: &Seed,
    w: &MappingClassWord,
    p: &PositivePoint<f64>,
    max_steps: usize,
    tol: f64,
) -> Result<DehnLimit> {
    if p.flavor != Flavor::A {
        return Err(ClusterError::FlavorMismatch("Dehn twist limits live in the A-space".into()));
    }
    p.check(seed)?;
    let twist = match detect_cluster_dehn_twist(seed, w, &Budgets::default())? {
        DehnDetection::Yes(t) => t,
        DehnDetection::No { reason } | DehnDetection::Inconclusive { reason } => {
            return Err(ClusterError::NoConvergence(format!("not a cluster Dehn twist: {reason}")))
        }
    };
    let start: Vec<LogReal> = p.coords.iter().map(|c| LogReal(c.ln())).collect();
    let fw = w.power(twist.power);
    let bw = invert_word(seed, &fw)?;
    let run = |word: &MappingClassWord, dir: &str| -> Result<(ProjectiveClass, usize)> {
        let (coords, steps) = log_limit(seed, word, &start, max_steps, tol)?
            .ok_or_else(|| ClusterError::NoConvergence(format!("{dir} orbit did not settle in {max_steps} steps")))?;
        Ok((ProjectiveClass { flavor: Flavor::A, coords }, steps))
    };
    let (forward, forward_steps) = run(&fw, "forward")?;
    let (backward, backward_steps) = run(&bw, "backward")?;
    Ok(DehnLimit { twist, forward, forward_steps, backward, backward_steps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TropicalLimit {
    pub direction: Direction,
    pub start: Vec<f64>,
    pub class: ProjectiveClass,
    pub steps: usize,
    pub method: LimitMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Verdict {
    Periodic { order: usize },
    ClusterReducible { sets: Vec<InvariantSet>, proper: bool },
    ClusterPa,
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Evidence {
    pub budgets: Budgets,
    pub fixed_points: Vec<FixedPointResult>,
    pub divergence: Vec<DivergenceCertificate>,
    pub tropical_limits: Vec<TropicalLimit>,
    /// Invariant-set candidates that could not be confirmed exactly.
    pub unverified_sets: Vec<InvariantSet>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NTReport {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

impl NTReport {
    /// Exit status used by the command line tool.
    pub fn is_inconclusive(&self) -> bool {
        matches!(self.verdict, Verdict::Inconclusive { .. })
    }
}

pub(crate) fn fmt_num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn fmt_vec(v: &[f64]) -> String {
    format!("({})", v.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(", "))
}

fn fmt_set(v: &[usize]) -> String {
    format!("{{{}}}", v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
}

impl fmt::Display for NTReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = &self.evidence.budgets;
        match &self.verdict {
            Verdict::Periodic { order } => write!(f, "Periodic, order {order}")?,
            Verdict::ClusterReducible { sets, proper } => {
                write!(f, "ClusterReducible{}", if *proper { " (proper)" } else { "" })?;
                for s in sets {
                    let kind = if s.pointwise { "pointwise fixed" } else { "invariant" };
                    write!(f, "\n  {kind} set {} at power {}", fmt_set(&s.vertices), s.power)?;
                }
            }
            Verdict::ClusterPa => write!(
                f,
                "cluster-pA (evidence at budget order {}, power {}, tropical {})",
                b.max_order, b.max_power, b.tropical_iters
            )?,
            Verdict::Inconclusive { reason } => write!(f, "Inconclusive: {reason}")?,
        }
        for p in &self.evidence.fixed_points {
            if let Some(pt) = &p.point {
                write!(f, "\n  fixed point {:?}: {}", p.flavor, fmt_vec(pt))?;
            }
        }
        for c in &self.evidence.divergence {
            write!(f, "\n  {:?}-orbit diverges: step {}, max |log| {}", c.flavor, c.step, fmt_num(c.max_abs_log))?;
        }
        for t in &self.evidence.tropical_limits {
            write!(f, "\n  ray {:?} {:?}: {} after {} steps", t.class.flavor, t.direction, fmt_vec(&t.class.coords), t.steps)?;
        }
        Ok(())
    }
}

fn unit_starts(seed: &Seed, flavor: Flavor) -> Vec<Vec<f64>> {
    let n = crate::positive::expected_len(seed, flavor);
    let first = match flavor {
        Flavor::A => seed.mutable_indices().first().copied(),
        Flavor::X => (n > 0).then_some(0),
    };
    first
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        })
        .into_iter()
        .collect()
}

fn tropical_limits(seed: &Seed, w: &MappingClassWord, iters: usize) -> Result<Vec<TropicalLimit>> {
    let inv = invert_word(seed, w)?;
    let mut out = Vec::new();
    for flavor in [Flavor::X, Flavor::A] {
        for start in unit_starts(seed, flavor) {
            for (direction, word) in [(Direction::Forward, w), (Direction::Backward, &inv)] {
                let t = TropicalPoint { flavor, coords: start.clone() };
                if let Some(r) = projective_limit(seed, word, &t, iters, 1e-9)? {
                    out.push(TropicalLimit {
                        direction,
                        start: start.clone(),
                        class: ProjectiveClass { flavor, coords: r.class },
                        steps: r.steps,
                        method: r.method,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn fixed_points(seed: &Seed, w: &MappingClassWord, rng_seed: u64) -> Result<Vec<FixedPointResult>> {
    let opts = FixedPointOptions { rng_seed, ..FixedPointOptions::default() };
    let mut out = Vec::new();
    for flavor in [Flavor::A, Flavor::X] {
        if crate::positive::expected_len(seed, flavor) > 0 {
            out.push(find_fixed_point_with(seed, w, flavor, &opts)?);
        }
    }
    Ok(out)
}

/// Runs the classification pipeline: finite order, then invariant vertex
/// sets of powers, then orbit evidence for cluster-pA.
pub fn classify(seed: &Seed, w: &MappingClassWord, budgets: &Budgets) -> Result<NTReport> {
    require_mapping_class(seed, w)?;
    let mut evidence = Evidence { budgets: *budgets, ..Evidence::default() };
    if let Some(order) = word_order(seed, w, budgets.max_order)? {
        evidence.fixed_points = fixed_points(seed, w, budgets.rng_seed)?;
        for p in &mut evidence.fixed_points {
            p.certificate = None;
        }
        return Ok(NTReport { verdict: Verdict::Periodic { order }, evidence });
    }
    let (sets, unverified): (Vec<_>, Vec<_>) =
        invariant_sets(seed, w, budgets.max_power, budgets.height_bits)?.into_iter().partition(|s| s.verified);
    evidence.unverified_sets = unverified;
    if !sets.is_empty() {
        let proper = sets.iter().any(|s| s.power == 1 && s.pointwise);
        return Ok(NTReport { verdict: Verdict::ClusterReducible { sets, proper }, evidence });
    }
    if !evidence.unverified_sets.is_empty() {
        let reason = "invariant set candidates could not be confirmed within the height budget".to_string();
        return Ok(NTReport { verdict: Verdict::Inconclusive { reason }, evidence });
    }
    evidence.fixed_points = fixed_points(seed, w, budgets.rng_seed)?;
    evidence.divergence = evidence.fixed_points.iter().filter_map(|p| p.certificate.clone()).collect();
    evidence.tropical_limits = tropical_limits(seed, w, budgets.tropical_iters)?;
    let verdict = if evidence.divergence.is_empty() && evidence.tropical_limits.is_empty() {
        Verdict::Inconclusive { reason: "no divergence and no tropical limit within budget".into() }
    } else {
        Verdict::ClusterPa
    };
    Ok(NTReport { verdict, evidence })
}

/// Exponents of `C` indexed by vertex.
pub fn coefficient_vector(seed: &Seed, t: &DehnTwist) -> Vec<i64> {
    let mut v = vec![0i64; seed.rank()];
    for &(i, e) in &t.coefficient {
        v[i] = e as i64;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;

    fn entry(name: &str, word: &str) -> (Seed, MappingClassWord) {
        let e = catalog(name).unwrap();
        let w = e.word(word).unwrap().clone();
        (e.seed, w)
    }

    #[test]
    fn x7_phi1_fixes_five_vertices() {
        let (s, w) = entry("x7", "phi1");
        let sets = find_invariant_vertex_sets(&s, &w, 4).unwrap();
        assert_eq!(sets[0], InvariantSet { power: 1, vertices: vec![0, 3, 4, 5, 6], pointwise: true, verified: true });
    }

    #[test]
    fn x7_psi1_sets() {
        let (s, w) = entry("x7", "psi1");
        let sets = find_invariant_vertex_sets(&s, &w, 2).unwrap();
        assert!(sets.iter().any(|x| x.power == 1 && x.vertices == [3, 4, 5, 6] && !x.pointwise && x.verified));
        assert!(sets.iter().any(|x| x.power == 2 && x.vertices == [0] && x.pointwise && x.verified), "{sets:?}");
        assert!(!sets.iter().any(|x| x.power == 1 && x.pointwise));
    }

    #[test]
    fn a2_has_no_invariant_sets_below_order() {
        let (s, w) = entry("a2", "phi");
        assert!(find_invariant_vertex_sets(&s, &w, 4).unwrap().is_empty());
    }

    #[test]
    fn reductions() {
        let (s, w) = entry("x7", "phi1");
        let r = reduce(&s, &w, &[0, 3, 4, 5, 6]).unwrap();
        assert_eq!(r.reduced_seed.mutable_indices(), vec![1, 2]);
        assert_eq!(r.reduced_seed.eps_int(1, 2), 2);
        let (p, q) = entry("x7", "psi1");
        assert!(matches!(reduce(&p, &q, &[3, 4, 5, 6]), Err(ClusterError::NotPointwiseFixed(_))));
        let (a, t) = entry("annulus-dehn", "t_c");
        assert_eq!(reduce_word(&a, &t, &[]).unwrap(), t);
        assert_eq!(cluster_reduce(&a, &[0]).unwrap().mutable_rank(), 1);
        assert!(matches!(cluster_reduce(&a, &[2]), Err(ClusterError::NotMutable(_))));
    }

    #[test]
    fn dehn_twists_detected() {
        let b = Budgets::default();
        let (a, t) = entry("annulus-dehn", "t_c");
        let DehnDetection::Yes(d) = detect_cluster_dehn_twist(&a, &t, &b).unwrap() else { panic!() };
        assert_eq!((d.power, d.active), (1, (0, 1)));
        assert_eq!(d.coefficient_text(&a), "A2·A3");
        let (x, p) = entry("x7", "phi1");
        let DehnDetection::Yes(d) = detect_cluster_dehn_twist(&x, &p, &b).unwrap() else { panic!() };
        assert_eq!((d.active, d.coefficient_text(&x)), ((1, 2), "A0".to_string()));
        let (s, w) = entry("a2", "phi");
        assert!(matches!(detect_cluster_dehn_twist(&s, &w, &b).unwrap(), DehnDetection::No { .. }));
        let (l3, w3) = entry("lk:3", "phi");
        assert!(matches!(detect_cluster_dehn_twist(&l3, &w3, &b).unwrap(), DehnDetection::No { .. }));
    }

    #[test]
    fn annulus_limit_both_ways() {
        let (a, t) = entry("annulus-dehn", "t_c");
        let r = dehn_twist_limit(&a, &t, &PositivePoint::a(vec![1.0; 4]), 300, 1e-4).unwrap();
        for c in [&r.forward, &r.backward] {
            assert!(crate::tropical::sup_distance(&c.coords, &[1.0, 1.0, 0.0, 0.0]) < 1e-4, "{r:?}");
        }
    }

    #[test]
    fn l2_limit_is_diagonal() {
        let (s, w) = entry("lk:2", "phi");
        let r = dehn_twist_limit(&s, &w, &PositivePoint::a(vec![1.0, 1.0]), 300, 1e-6).unwrap();
        assert!(crate::tropical::sup_distance(&r.forward.coords, &[1.0, 1.0]) < 1e-6);
    }

    #[test]
    fn classify_examples() {
        let b = Budgets::default();
        let (s, w) = entry("a2", "phi");
        let r = classify(&s, &w, &b).unwrap();
        assert_eq!(r.verdict, Verdict::Periodic { order: 5 });
        assert!(r.to_string().starts_with("Periodic, order 5"));
        assert!(r.evidence.fixed_points.iter().all(|p| p.found()));
        assert!(r.to_string().contains("fixed point A: (1.618034, 1.618034)"), "{r}");

        let (x, p) = entry("x7", "phi1");
        let Verdict::ClusterReducible { sets, proper } = classify(&x, &p, &b).unwrap().verdict else { panic!() };
        assert!(proper);
        assert_eq!(sets[0].vertices, vec![0, 3, 4, 5, 6]);

        let (l2, w2) = entry("lk:2", "phi");
        let r = classify(&l2, &w2, &b).unwrap();
        assert_eq!(r.verdict, Verdict::ClusterPa);
        assert!(!r.evidence.divergence.is_empty());
        assert!(r.evidence.fixed_points.iter().all(|p| !p.found()));
        let ray = r.evidence.tropical_limits.iter().find(|t| t.class.flavor == Flavor::X && t.direction == Direction::Forward).unwrap();
        assert!(crate::tropical::sup_distance(&ray.class.coords, &[1.0, -1.0]) < 1e-6);
        assert!(r.to_string().contains("ray X Forward: (1, -1)"), "{r}");
    }
}
