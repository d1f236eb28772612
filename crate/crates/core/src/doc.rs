//! Text formats: seed and triangulation documents and the word grammar
//! `mu LABEL; perm (a b)(c d)`.

use serde::{Deserialize, Serialize};

use crate::error::{ClusterError, Result};
use crate::scalar::{format_rational, parse_rational};
use crate::seed::{Seed, SeedIso};
use crate::surface::{SurfaceTopology, Triangulation};
use crate::word::{MappingClassWord, Step};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedDocument {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub frozen: Vec<String>,
    /// Row-major, each entry `"p/q"` or `"p"`.
    pub epsilon: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<u64>>,
}

/// 1-based line and column of byte offset `at` in `text`.
fn position(text: &str, at: usize) -> (usize, usize) {
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_error(text: &str, needle: &str, message: String) -> ClusterError {
    let (line, column) = text.find(needle).map_or((0, 0), |at| position(text, at));
    ClusterError::Parse { line, column, message }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| ClusterError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn label_index(labels: &[String], text: &str, label: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| parse_error(text, &format!("\"{label}\""), format!("unknown label {label:?}")))
}

impl SeedDocument {
    pub fn from_seed(seed: &Seed) -> Self {
        let n = seed.rank();
        let d = seed.symmetrizer().to_vec();
        SeedDocument {
            vertices: seed.labels().to_vec(),
            frozen: seed.frozen_indices().into_iter().map(|i| seed.label(i).to_string()).collect(),
            epsilon: (0..n).map(|i| (0..n).map(|j| format_rational(seed.eps(i, j))).collect()).collect(),
            d: d.iter().any(|&x| x != 1).then_some(d),
        }
    }

    /// `text` is the source the document came from, used to locate errors.
    pub fn to_seed(&self, text: &str) -> Result<Seed> {
        let n = self.vertices.len();
        let mut frozen = vec![false; n];
        for f in &self.frozen {
            frozen[label_index(&self.vertices, text, f)?] = true;
        }
        if self.epsilon.len() != n || self.epsilon.iter().any(|r| r.len() != n) {
            return Err(parse_error(text, "\"epsilon\"", format!("epsilon must be {n}x{n}")));
        }
        let mut epsilon = Vec::with_capacity(n);
        for row in &self.epsilon {
            let mut out = Vec::with_capacity(n);
            for cell in row {
                let q = parse_rational(cell)
                    .ok_or_else(|| parse_error(text, &format!("\"{cell}\""), format!("malformed rational {cell:?}")))?;
                out.push(q);
            }
            epsilon.push(out);
        }
        let d = self.d.clone().unwrap_or_else(|| vec![1; n]);
        Seed::new(self.vertices.clone(), frozen, epsilon, d)
    }
}

pub fn parse_seed(text: &str) -> Result<Seed> {
    from_json::<SeedDocument>(text)?.to_seed(text)
}

pub fn emit_seed(seed: &Seed) -> String {
    serde_json::to_string_pretty(&SeedDocument::from_seed(seed)).expect("documents serialize")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangulationDocument {
    pub arcs: Vec<String>,
    #[serde(default)]
    pub boundary: Vec<String>,
    /// Sides of each triangle in clockwise order, by label.
    pub triangles: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<SurfaceTopology>,
}

pub fn parse_triangulation(text: &str) -> Result<Triangulation> {
    let doc: TriangulationDocument = from_json(text)?;
    let labels: Vec<String> = doc.arcs.iter().chain(&doc.boundary).cloned().collect();
    let mut triangles = Vec::with_capacity(doc.triangles.len());
    for t in &doc.triangles {
        let mut out = [0; 3];
        for (slot, l) in out.iter_mut().zip(t) {
            *slot = label_index(&labels, text, l)?;
        }
        triangles.push(out);
    }
    Triangulation::new(doc.arcs, doc.boundary, triangles, doc.topology)
}

pub fn emit_triangulation(t: &Triangulation) -> String {
    let labels = t.labels();
    let doc = TriangulationDocument {
        arcs: t.arcs.clone(),
        boundary: t.boundary.clone(),
        triangles: t.triangles.iter().map(|tri| tri.map(|i| labels[i].clone())).collect(),
        topology: t.topology,
    };
    serde_json::to_string_pretty(&doc).expect("documents serialize")
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn error(&self, message: impl Into<String>) -> ClusterError {
        let (line, column) = position(self.text, self.pos);
        ClusterError::Parse { line, column, message: message.into() }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// A run of characters that are not whitespace, `;`, `(` or `)`.
    fn token(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| c.is_whitespace() || ";()".contains(c)).unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }
}

/// Parses a word over `seed`'s labels and normalizes it so that all
/// permutations are folded into one trailing permutation.
pub fn parse_word(text: &str, seed: &Seed) -> Result<MappingClassWord> {
    let n = seed.rank();
    let mut lx = Lexer { text, pos: 0 };
    let mut steps = Vec::new();
    if lx.peek().is_none() {
        return Ok(MappingClassWord::identity(n));
    }
    loop {
        let index = steps.len();
        let start = lx.pos;
        match lx.token() {
            Some("mu") => {
                let label = lx.token().ok_or_else(|| lx.error("expected a vertex label after 'mu'"))?;
                let k = seed.index_of(label).map_err(|_| ClusterError::InvalidStep {
                    step: index,
                    reason: format!("unknown vertex {label}"),
                })?;
                if seed.is_frozen(k) {
                    return Err(ClusterError::InvalidStep { step: index, reason: format!("vertex {label} is frozen") });
                }
                steps.push(Step::Mu(k));
            }
            Some("perm") => {
                let mut cycles = Vec::new();
                while lx.eat('(') {
                    let mut cycle = Vec::new();
                    while let Some(label) = lx.token() {
                        let v = seed.index_of(label).map_err(|_| ClusterError::InvalidStep {
                            step: index,
                            reason: format!("unknown vertex {label}"),
                        })?;
                        cycle.push(v);
                    }
                    if !lx.eat(')') {
                        return Err(lx.error("expected ')'"));
                    }
                    cycles.push(cycle);
                }
                let tau = SeedIso::from_cycles(n, &cycles)
                    .map_err(|e| ClusterError::InvalidStep { step: index, reason: e.to_string() })?;
                if !tau.fixes_frozen(seed) {
                    return Err(ClusterError::InvalidStep { step: index, reason: "permutation moves a frozen vertex".into() });
                }
                steps.push(Step::Perm(tau));
            }
            _ => {
                lx.pos = start;
                lx.skip_ws();
                return Err(lx.error("expected 'mu' or 'perm'"));
            }
        }
        match lx.peek() {
            None => break,
            Some(';') => {
                lx.eat(';');
                if lx.peek().is_none() {
                    break;
                }
            }
            Some(_) => return Err(lx.error("expected ';'")),
        }
    }
    MappingClassWord::from_steps(n, &steps)
}

pub fn emit_word(w: &MappingClassWord, seed: &Seed) -> String {
    let mut parts: Vec<String> = w.mutations.iter().map(|&k| format!("mu {}", seed.label(k))).collect();
    let cycles = w.sigma.cycles();
    if !cycles.is_empty() {
        let text: String = cycles
            .iter()
            .map(|c| format!("({})", c.iter().map(|&v| seed.label(v)).collect::<Vec<_>>().join(" ")))
            .collect();
        parts.push(format!("perm {text}"));
    }
    parts.join("; ")
}
