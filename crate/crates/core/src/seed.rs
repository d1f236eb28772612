//! Seeds, seed mutations, seed isomorphisms and quivers.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::scalar::integer;

/// The combinatorial data `(I, I0, ε, d)`.
///
/// Vertices carry stable string labels; everything internal is indexed by
/// position in `labels`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Seed {
    labels: Vec<String>,
    frozen: Vec<bool>,
    epsilon: Vec<Vec<BigRational>>,
    d: Vec<u64>,
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Seed {{ labels: {:?}, frozen: {:?}, d: {:?}", self.labels, self.frozen, self.d)?;
        for row in &self.epsilon {
            let cells: Vec<String> = row.iter().map(crate::scalar::format_rational).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Shape { detail: String },
    NonIntegerEntry { i: usize, j: usize },
    NonPositiveSymmetrizer { i: usize },
    SymmetrizerGcd { gcd: u64 },
    SkewSymmetrizability { i: usize, j: usize },
    NoMutableVertex,
    DuplicateLabel { label: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { detail } => write!(f, "shape: {detail}"),
            Violation::NonIntegerEntry { i, j } => {
                write!(f, "epsilon[{i}][{j}] must be an integer outside frozen x frozen")
            }
            Violation::NonPositiveSymmetrizer { i } => write!(f, "d[{i}] must be positive"),
            Violation::SymmetrizerGcd { gcd } => write!(f, "gcd of d is {gcd}, expected 1"),
            Violation::SkewSymmetrizability { i, j } => {
                write!(f, "skew-symmetrizability fails at ({i},{j}): epsilon[i][j]*d[j] != -epsilon[j][i]*d[i]")
            }
            Violation::NoMutableVertex => write!(f, "seed has no mutable vertex"),
            Violation::DuplicateLabel { label } => write!(f, "duplicate vertex label {label:?}"),
        }
    }
}

/// Outcome of [`validate`]: violations are data, not failures.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks every seed invariant and reports each violation with indices.
///
/// A seed without mutable vertices is reported; [`Seed::new`] tolerates it
/// only through [`Seed::allow_fully_frozen`] since cluster reduction can
/// legitimately produce one.
pub fn validate(seed: &Seed) -> ValidationReport {
    let mut report = validate_structure(seed);
    if seed.mutable_rank() == 0 {
        report.violations.push(Violation::NoMutableVertex);
    }
    report
}

fn validate_structure(seed: &Seed) -> ValidationReport {
    let n = seed.labels.len();
    let mut violations = Vec::new();
    if seed.frozen.len() != n || seed.d.len() != n || seed.epsilon.len() != n {
        violations.push(Violation::Shape {
            detail: format!(
                "{} labels, {} frozen flags, {} symmetrizer entries, {} matrix rows",
                n,
                seed.frozen.len(),
                seed.d.len(),
                seed.epsilon.len()
            ),
        });
        return ValidationReport { violations };
    }
    if let Some(row) = seed.epsilon.iter().position(|r| r.len() != n) {
        violations.push(Violation::Shape {
            detail: format!("row {row} has {} entries, expected {n}", seed.epsilon[row].len()),
        });
        return ValidationReport { violations };
    }
    let mut seen = HashMap::new();
    for label in &seed.labels {
        if seen.insert(label.as_str(), ()).is_some() {
            violations.push(Violation::DuplicateLabel { label: label.clone() });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let both_frozen = seed.frozen[i] && seed.frozen[j];
            if !both_frozen && !seed.epsilon[i][j].is_integer() {
                violations.push(Violation::NonIntegerEntry { i, j });
            }
        }
    }
    for (i, &di) in seed.d.iter().enumerate() {
        if di == 0 {
            violations.push(Violation::NonPositiveSymmetrizer { i });
        }
    }
    let gcd = seed.d.iter().fold(0u64, |g, &x| g.gcd(&x));
    if n > 0 && gcd != 1 {
        violations.push(Violation::SymmetrizerGcd { gcd });
    }
    for i in 0..n {
        for j in i..n {
            let lhs = &seed.epsilon[i][j] * integer(seed.d[j] as i64);
            let rhs = -(&seed.epsilon[j][i] * integer(seed.d[i] as i64));
            if lhs != rhs {
                violations.push(Violation::SkewSymmetrizability { i, j });
            }
        }
    }
    ValidationReport { violations }
}

impl Seed {
    /// Builds a seed and rejects it if any invariant fails.
    pub fn new(
        labels: Vec<String>,
        frozen: Vec<bool>,
        epsilon: Vec<Vec<BigRational>>,
        d: Vec<u64>,
    ) -> Result<Self> {
        let seed = Self::new_unchecked(labels, frozen, epsilon, d);
        let report = validate(&seed);
        if report.is_ok() {
            Ok(seed)
        } else {
            Err(ClusterError::Validation(report))
        }
    }

    /// Builds a seed without checking invariants; pair with [`validate`].
    pub fn new_unchecked(
        labels: Vec<String>,
        frozen: Vec<bool>,
        epsilon: Vec<Vec<BigRational>>,
        d: Vec<u64>,
    ) -> Self {
        Seed { labels, frozen, epsilon, d }
    }

    /// Like [`Seed::new`] but accepts a seed with no mutable vertex.
    pub fn allow_fully_frozen(
        labels: Vec<String>,
        frozen: Vec<bool>,
        epsilon: Vec<Vec<BigRational>>,
        d: Vec<u64>,
    ) -> Result<Self> {
        let seed = Self::new_unchecked(labels, frozen, epsilon, d);
        let report = validate_structure(&seed);
        if report.is_ok() {
            Ok(seed)
        } else {
            Err(ClusterError::Validation(report))
        }
    }

    /// Skew-symmetric seed with vertices labelled `0..N` and the given frozen
    /// indices.
    pub fn skew_symmetric(matrix: &[Vec<i64>], frozen: &[usize]) -> Result<Self> {
        let n = matrix.len();
        let labels = (0..n).map(|i| i.to_string()).collect();
        let mut flags = vec![false; n];
        for &f in frozen {
            if f >= n {
                return Err(ClusterError::UnknownVertex(f.to_string()));
            }
            flags[f] = true;
        }
        let epsilon = matrix
            .iter()
            .map(|row| row.iter().map(|&x| integer(x)).collect())
            .collect();
        Seed::new(labels, flags, epsilon, vec![1; n])
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn mutable_rank(&self) -> usize {
        self.frozen.iter().filter(|f| !**f).count()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| ClusterError::UnknownVertex(label.to_string()))
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn frozen_flags(&self) -> &[bool] {
        &self.frozen
    }

    /// Indices of mutable vertices in increasing order; X-points are indexed
    /// by position in this list.
    pub fn mutable_indices(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| !self.frozen[i]).collect()
    }

    pub fn frozen_indices(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.frozen[i]).collect()
    }

    /// Position of vertex `i` among the mutable vertices.
    pub fn mutable_position(&self, i: usize) -> Option<usize> {
        if self.frozen[i] {
            return None;
        }
        Some(self.frozen[..i].iter().filter(|f| !**f).count())
    }

    pub fn epsilon(&self) -> &[Vec<BigRational>] {
        &self.epsilon
    }

    pub fn eps(&self, i: usize, j: usize) -> &BigRational {
        &self.epsilon[i][j]
    }

    /// Integer entry; valid whenever `i` or `j` is mutable.
    pub fn eps_int(&self, i: usize, j: usize) -> i64 {
        self.epsilon[i][j]
            .to_integer()
            .to_i64()
            .expect("exchange matrix entry fits in i64")
    }

    pub fn symmetrizer(&self) -> &[u64] {
        &self.d
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.d.iter().all(|&x| x == 1)
    }

    pub fn check_mutable(&self, k: usize) -> Result<()> {
        if k >= self.rank() {
            return Err(ClusterError::UnknownVertex(k.to_string()));
        }
        if self.frozen[k] {
            return Err(ClusterError::FrozenVertex(self.labels[k].clone()));
        }
        Ok(())
    }

    /// Seed mutation at the mutable vertex `k`.
    pub fn mutate(&self, k: usize) -> Result<Seed> {
        self.check_mutable(k)?;
        let two = BigInt::from(2);
        let mut eps = self.epsilon.clone();
        for (i, row) in eps.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                if i == k || j == k {
                    *e = -&self.epsilon[i][j];
                } else {
                    let ik = &self.epsilon[i][k];
                    let kj = &self.epsilon[k][j];
                    if ik.is_zero() || kj.is_zero() {
                        continue;
                    }
                    let corr = (ik.abs() * kj + ik * kj.abs()) / BigRational::from_integer(two.clone());
                    *e = &self.epsilon[i][j] + corr;
                }
            }
        }
        Ok(Seed { labels: self.labels.clone(), frozen: self.frozen.clone(), epsilon: eps, d: self.d.clone() })
    }

    /// Relabels by `sigma`: old vertex `i` becomes vertex `sigma(i)`.
    pub fn relabel(&self, sigma: &SeedIso) -> Seed {
        let n = self.rank();
        let mut eps = vec![vec![BigRational::zero(); n]; n];
        let mut d = vec![0; n];
        let mut frozen = vec![false; n];
        for i in 0..n {
            let si = sigma.apply(i);
            d[si] = self.d[i];
            frozen[si] = self.frozen[i];
            for j in 0..n {
                eps[si][sigma.apply(j)] = self.epsilon[i][j].clone();
            }
        }
        Seed { labels: self.labels.clone(), frozen, epsilon: eps, d }
    }

    /// Same seed with the vertices in `extra` frozen as well.
    pub fn freeze(&self, extra: &[usize]) -> Result<Seed> {
        let mut frozen = self.frozen.clone();
        for &i in extra {
            self.check_mutable(i).map_err(|_| ClusterError::NotMutable(self.describe(i)))?;
            frozen[i] = true;
        }
        Ok(Seed { labels: self.labels.clone(), frozen, epsilon: self.epsilon.clone(), d: self.d.clone() })
    }

    fn describe(&self, i: usize) -> String {
        self.labels.get(i).cloned().unwrap_or_else(|| i.to_string())
    }

    /// Whether `other` has the same labels, frozen set and symmetrizer.
    pub fn same_shape(&self, other: &Seed) -> bool {
        self.labels == other.labels && self.frozen == other.frozen
    }

    /// Entries where the exchange matrices differ, for error reporting.
    pub fn epsilon_diff(&self, other: &Seed) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rank().min(other.rank()) {
            for j in 0..self.rank().min(other.rank()) {
                if self.epsilon[i][j] != other.epsilon[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// A permutation of the vertex set, stored as `perm[i] = σ(i)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedIso {
    perm: Vec<usize>,
}

impl fmt::Debug for SeedIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeedIso{:?}", self.cycles())
    }
}

impl SeedIso {
    pub fn identity(n: usize) -> Self {
        SeedIso { perm: (0..n).collect() }
    }

    pub fn from_vec(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(ClusterError::ShapeMismatch(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(SeedIso { perm })
    }

    /// Builds a permutation of `0..n` from disjoint cycles; `(a b c)` sends
    /// a to b, b to c and c to a.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (pos, &a) in cycle.iter().enumerate() {
                if a >= n {
                    return Err(ClusterError::UnknownVertex(a.to_string()));
                }
                if touched[a] {
                    return Err(ClusterError::ShapeMismatch(format!("vertex {a} repeated in cycles")));
                }
                touched[a] = true;
                perm[a] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Ok(SeedIso { perm })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        SeedIso { perm: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SeedIso) -> Self {
        SeedIso { perm: other.perm.iter().map(|&i| self.perm[i]).collect() }
    }

    pub fn fixes_frozen(&self, seed: &Seed) -> bool {
        (0..seed.rank()).all(|i| !seed.is_frozen(i) || self.perm[i] == i)
    }

    /// Disjoint cycle decomposition, fixed points omitted.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.perm.len()];
        let mut out = Vec::new();
        for start in 0..self.perm.len() {
            if seen[start] || self.perm[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.perm[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.perm[cur];
            }
            out.push(cycle);
        }
        out
    }
}

/// True iff `sigma` fixes the frozen vertices and relabelling `b` by `sigma`
/// gives exactly `a`.
pub fn is_seed_isomorphism(a: &Seed, b: &Seed, sigma: &SeedIso) -> Result<bool> {
    if !a.same_shape(b) || sigma.len() != a.rank() {
        return Err(ClusterError::ShapeMismatch(
            "seeds must share vertex labels and frozen subset".into(),
        ));
    }
    if !sigma.fixes_frozen(a) {
        return Ok(false);
    }
    let n = a.rank();
    for i in 0..n {
        let si = sigma.apply(i);
        if a.d[si] != b.d[i] {
            return Ok(false);
        }
        for j in 0..n {
            if a.epsilon[si][sigma.apply(j)] != b.epsilon[i][j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All seed isomorphisms taking `b` onto `a`, found by backtracking over
/// mutable vertices.
pub fn seed_isomorphisms(a: &Seed, b: &Seed) -> Vec<SeedIso> {
    if !a.same_shape(b) {
        return Vec::new();
    }
    let n = a.rank();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in 0..n {
        if a.is_frozen(i) {
            perm[i] = i;
            used[i] = true;
        }
    }
    let order: Vec<usize> = a.mutable_indices();
    let mut out = Vec::new();
    search_isos(a, b, &order, 0, &mut perm, &mut used, &mut out);
    out
}

fn search_isos(
    a: &Seed,
    b: &Seed,
    order: &[usize],
    depth: usize,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<SeedIso>,
) {
    if depth == order.len() {
        out.push(SeedIso { perm: perm.clone() });
        return;
    }
    let i = order[depth];
    for target in 0..a.rank() {
        if used[target] || a.is_frozen(target) || a.d[target] != b.d[i] {
            continue;
        }
        perm[i] = target;
        // every pair with an already-assigned vertex must match
        let consistent = (0..a.rank()).all(|j| {
            let pj = perm[j];
            pj == usize::MAX
                || (a.epsilon[target][pj] == b.epsilon[i][j] && a.epsilon[pj][target] == b.epsilon[j][i])
        });
        if consistent {
            used[target] = true;
            search_isos(a, b, order, depth + 1, perm, used, out);
            used[target] = false;
        }
        perm[i] = usize::MAX;
    }
}

/// One arrow bundle of a quiver: `weight` arrows from `from` to `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub from: usize,
    pub to: usize,
    pub weight: u64,
}

/// A quiver without loops or 2-cycles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub frozen: Vec<bool>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, frozen: Vec<bool>, arrows: Vec<Arrow>) -> Result<Self> {
        let n = vertices.len();
        if frozen.len() != n {
            return Err(ClusterError::ShapeMismatch("frozen flags do not match vertices".into()));
        }
        let mut dir = HashMap::new();
        for a in &arrows {
            if a.from >= n || a.to >= n {
                return Err(ClusterError::UnknownVertex(a.from.max(a.to).to_string()));
            }
            if a.from == a.to {
                return Err(ClusterError::ShapeMismatch(format!("loop at vertex {}", a.from)));
            }
            if dir.contains_key(&(a.to, a.from)) {
                return Err(ClusterError::ShapeMismatch(format!("2-cycle between {} and {}", a.from, a.to)));
            }
            dir.insert((a.from, a.to), ());
        }
        Ok(Quiver { vertices, frozen, arrows })
    }

    pub fn from_seed(seed: &Seed) -> Result<Self> {
        if !seed.is_skew_symmetric() {
            return Err(ClusterError::NotSkewSymmetric);
        }
        let mut arrows = Vec::new();
        for i in 0..seed.rank() {
            for j in (i + 1)..seed.rank() {
                let e = seed.eps(i, j);
                if !e.is_integer() {
                    return Err(ClusterError::ShapeMismatch(format!(
                        "fractional entry at ({i},{j}) has no arrow representation"
                    )));
                }
                let w = e.to_integer().abs().to_u64().expect("weight fits in u64");
                if w == 0 {
                    continue;
                }
                let (from, to) = if e.is_positive() { (i, j) } else { (j, i) };
                arrows.push(Arrow { from, to, weight: w });
            }
        }
        Ok(Quiver { vertices: seed.labels.clone(), frozen: seed.frozen.clone(), arrows })
    }

    pub fn to_seed(&self) -> Result<Seed> {
        let n = self.vertices.len();
        let mut eps = vec![vec![BigRational::zero(); n]; n];
        for a in &self.arrows {
            let w = integer(a.weight as i64);
            eps[a.from][a.to] = &eps[a.from][a.to] + &w;
            eps[a.to][a.from] = &eps[a.to][a.from] - &w;
        }
        Seed::allow_fully_frozen(self.vertices.clone(), self.frozen.clone(), eps, vec![1; n])
    }
}
