//! The `clustermod` command line.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clustermod::catalog::{catalog, catalog_names, CatalogEntry};
use clustermod::classify::{classify, reduce, Budgets};
use clustermod::doc::{emit_seed, emit_triangulation, emit_word, parse_seed, parse_word, SeedDocument};
use clustermod::explorer::{explore_with, ChartState, ExploreOptions};
use clustermod::positive::orbit;
use clustermod::scalar::{format_rational, parse_rational};
use clustermod::tropical::{apply_word_tropical, TropicalPoint};
use clustermod::word::{apply_word_to_seed, require_mapping_class};
use clustermod::positive::expected_len;
use clustermod::{ClusterError, Flavor, MappingClassWord, PositivePoint, Seed};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "clustermod", version, about = "Mutation dynamics and Nielsen-Thurston types of cluster modular group elements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    A,
    X,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::A => Flavor::A,
            FlavorArg::X => Flavor::X,
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SeedSource {
    /// Seed document to load.
    #[arg(long)]
    pub seed: Option<PathBuf>,
    /// Built-in seed; see `clustermod catalog`.
    #[arg(long)]
    pub catalog: Option<String>,
}

#[derive(Debug, Args)]
pub struct Common {
    #[command(flatten)]
    pub source: SeedSource,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct WordArg {
    /// Word such as "mu 0; perm (0 1)", or the name of a catalog word.
    /// Defaults to the first word of a catalog entry.
    #[arg(long)]
    pub word: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a seed document.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Apply a word to the seed and print the resulting seed.
    Mutate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
    },
    /// Iterate a mapping class on a positive point.
    Orbit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "a")]
        flavor: FlavorArg,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Comma-separated coordinates; all ones by default.
        #[arg(long)]
        point: Option<String>,
    },
    /// Iterate a mapping class on a tropical point.
    TropicalOrbit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "x")]
        flavor: FlavorArg,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Comma-separated coordinates; the first unit vector by default.
        #[arg(long)]
        point: Option<String>,
    },
    /// Nielsen-Thurston type of a mapping class.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        /// Largest order and power searched.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        rng_seed: Option<u64>,
    },
    /// Explore the exchange graph.
    Explore {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Largest number of clusters.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Freeze vertices fixed by a mapping class.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        /// Comma-separated vertex labels.
        #[arg(long)]
        set: String,
    },
    /// List built-in seeds, or show one.
    Catalog {
        name: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<ClusterError> for Failure {
    fn from(e: ClusterError) -> Self {
        let code = if matches!(e, ClusterError::BudgetExceeded(_)) { EXIT_INCONCLUSIVE } else { EXIT_INVALID };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INVALID, message: message.into() }
}

pub struct Loaded {
    pub seed: Seed,
    pub entry: Option<CatalogEntry>,
}

pub fn load(source: &SeedSource) -> Result<Loaded, Failure> {
    if let Some(name) = &source.catalog {
        let entry = catalog(name)?;
        return Ok(Loaded { seed: entry.seed.clone(), entry: Some(entry) });
    }
    let path = source.seed.as_ref().expect("clap requires a source");
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    Ok(Loaded { seed: parse_seed(&text)?, entry: None })
}

fn load_word(loaded: &Loaded, arg: &WordArg) -> Result<MappingClassWord, Failure> {
    let named = |name: &str| loaded.entry.as_ref().and_then(|e| e.word(name)).cloned();
    match &arg.word {
        Some(text) => match named(text) {
            Some(w) => Ok(w),
            None => Ok(parse_word(text, &loaded.seed)?),
        },
        None => loaded
            .entry
            .as_ref()
            .and_then(|e| e.words.first())
            .map(|w| w.word.clone())
            .ok_or_else(|| invalid("--word is required")),
    }
}

fn coords(text: &str) -> Result<Vec<BigRational>, Failure> {
    text.split(',').map(|c| parse_rational(c).ok_or_else(|| invalid(format!("bad coordinate {c:?}")))).collect()
}

fn float_coords(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .ok()
                .or_else(|| parse_rational(c).and_then(|q| q.to_f64()))
                .ok_or_else(|| invalid(format!("bad coordinate {c:?}")))
        })
        .collect()
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("views serialize")
}

/// Seventeen significant digits, enough to round-trip binary64.
fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct OrbitTable {
    flavor: Flavor,
    mode: &'static str,
    rows: Vec<OrbitRow>,
}

#[derive(Serialize)]
struct OrbitRow {
    step: usize,
    coords: Vec<String>,
    max_abs_log: f64,
}

fn print_table(t: &OrbitTable, format: Format) -> String {
    match format {
        Format::Structured => json(t),
        Format::Text => t
            .rows
            .iter()
            .map(|r| format!("{}\t{}", r.step, r.coords.join("\t")))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn run_command(command: Command) -> Result<(String, i32), Failure> {
    match command {
        Command::Validate { common } => {
            let loaded = load(&common.source)?;
            let s = &loaded.seed;
            let out = match common.format {
                Format::Text => format!("valid: {} vertices, {} mutable", s.rank(), s.mutable_rank()),
                Format::Structured => json(&serde_json::json!({
                    "valid": true, "rank": s.rank(), "mutable_rank": s.mutable_rank()
                })),
            };
            Ok((out, EXIT_OK))
        }
        Command::Mutate { common, word } => {
            let loaded = load(&common.source)?;
            let w = load_word(&loaded, &word)?;
            let image = apply_word_to_seed(&loaded.seed, &w)?;
            let out = match common.format {
                Format::Text => emit_seed(&image),
                Format::Structured => json(&serde_json::json!({
                    "word": emit_word(&w, &loaded.seed),
                    "seed": SeedDocument::from_seed(&image),
                    "mapping_class": image == loaded.seed,
                })),
            };
            Ok((out, EXIT_OK))
        }
        Command::Orbit { common, word, mode, flavor, steps, point } => {
            let loaded = load(&common.source)?;
            let w = load_word(&loaded, &word)?;
            require_mapping_class(&loaded.seed, &w)?;
            let flavor = Flavor::from(flavor);
            let n = expected_len(&loaded.seed, flavor);
            let table = match mode {
                Mode::Exact => {
                    let c = match &point {
                        Some(p) => coords(p)?,
                        None => vec![BigRational::from_integer(1.into()); n],
                    };
                    let o = orbit(&loaded.seed, &w, &PositivePoint { flavor, coords: c }, steps)?;
                    OrbitTable {
                        flavor,
                        mode: "exact",
                        rows: o
                            .points
                            .iter()
                            .zip(&o.logs)
                            .enumerate()
                            .map(|(step, (p, &l))| OrbitRow { step, coords: p.coords.iter().map(format_rational).collect(), max_abs_log: l })
                            .collect(),
                    }
                }
                Mode::Float => {
                    let c = match &point {
                        Some(p) => float_coords(p)?,
                        None => vec![1.0; n],
                    };
                    let o = orbit(&loaded.seed, &w, &PositivePoint { flavor, coords: c }, steps)?;
                    OrbitTable {
                        flavor,
                        mode: "float",
                        rows: o
                            .points
                            .iter()
                            .enumerate()
                            .map(|(step, p)| OrbitRow {
                                step,
                                coords: p.coords.iter().map(|&x| float17(x)).collect(),
                                max_abs_log: clustermod::positive::max_abs_log(&p.coords),
                            })
                            .collect(),
                    }
                }
            };
            Ok((print_table(&table, common.format), EXIT_OK))
        }
        Command::TropicalOrbit { common, word, mode, flavor, steps, point } => {
            let loaded = load(&common.source)?;
            let w = load_word(&loaded, &word)?;
            require_mapping_class(&loaded.seed, &w)?;
            let flavor = Flavor::from(flavor);
            let n = expected_len(&loaded.seed, flavor);
            let unit = |one: f64| {
                let mut v = vec![0.0; n];
                let first = match flavor {
                    Flavor::A => loaded.seed.mutable_indices()[0],
                    Flavor::X => 0,
                };
                v[first] = one;
                v
            };
            let mut rows = Vec::with_capacity(steps + 1);
            match mode {
                Mode::Exact => {
                    let mut cur = TropicalPoint {
                        flavor,
                        coords: match &point {
                            Some(p) => coords(p)?,
                            None => unit(1.0).iter().map(|&x| BigRational::from_integer((x as i64).into())).collect(),
                        },
                    };
                    for step in 0..=steps {
                        if step > 0 {
                            cur = apply_word_tropical(&loaded.seed, &w, &cur)?;
                        }
                        let m = cur.coords.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY).abs()).fold(0.0, f64::max);
                        rows.push(OrbitRow { step, coords: cur.coords.iter().map(format_rational).collect(), max_abs_log: m });
                    }
                }
                Mode::Float => {
                    let mut cur = TropicalPoint {
                        flavor,
                        coords: match &point {
                            Some(p) => float_coords(p)?,
                            None => unit(1.0),
                        },
                    };
                    for step in 0..=steps {
                        if step > 0 {
                            cur = apply_word_tropical(&loaded.seed, &w, &cur)?;
                        }
                        let m = cur.coords.iter().fold(0.0f64, |a, c| a.max(c.abs()));
                        rows.push(OrbitRow { step, coords: cur.coords.iter().map(|&x| float17(x)).collect(), max_abs_log: m });
                    }
                }
            }
            let table = OrbitTable { flavor, mode: if mode == Mode::Exact { "exact" } else { "float" }, rows };
            Ok((print_table(&table, common.format), EXIT_OK))
        }
        Command::Classify { common, word, budget, rng_seed } => {
            let loaded = load(&common.source)?;
            let w = load_word(&loaded, &word)?;
            let mut b = Budgets::default();
            if let Some(n) = budget {
                b.max_order = n;
                b.max_power = n.min(b.max_power);
            }
            if let Some(r) = rng_seed {
                b.rng_seed = r;
            }
            let report = classify(&loaded.seed, &w, &b)?;
            let code = if report.is_inconclusive() { EXIT_INCONCLUSIVE } else { EXIT_OK };
            let out = match common.format {
                Format::Text => report.to_string(),
                Format::Structured => json(&report),
            };
            Ok((out, code))
        }
        Command::Explore { common, depth, budget } => {
            let loaded = load(&common.source)?;
            let opts = ExploreOptions {
                max_depth: depth,
                node_cap: budget.unwrap_or(ExploreOptions::DEFAULT_NODE_CAP),
                ..ExploreOptions::depth(depth)
            };
            let g = explore_with(ChartState::base(&loaded.seed), &opts)?;
            let code = if g.is_closed() { EXIT_OK } else { EXIT_INCONCLUSIVE };
            let out = match common.format {
                Format::Text if g.is_closed() => format!("finite type: {} clusters", g.nodes.len()),
                Format::Text => format!("not closed within budget: {} clusters explored ({:?})", g.nodes.len(), g.closure),
                Format::Structured => json(&crate::view::graph(&g)),
            };
            Ok((out, code))
        }
        Command::Reduce { common, word, set } => {
            let loaded = load(&common.source)?;
            let w = load_word(&loaded, &word)?;
            let vertices = set
                .split(',')
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| loaded.seed.index_of(l))
                .collect::<Result<Vec<_>, _>>()?;
            let r = reduce(&loaded.seed, &w, &vertices)?;
            let word_text = emit_word(&r.reduced_word, &r.reduced_seed);
            let out = match common.format {
                Format::Text => format!("{}\nword: {word_text}", emit_seed(&r.reduced_seed)),
                Format::Structured => json(&serde_json::json!({
                    "frozen_added": r.frozen_added.iter().map(|&i| loaded.seed.label(i)).collect::<Vec<_>>(),
                    "seed": SeedDocument::from_seed(&r.reduced_seed),
                    "word": word_text,
                })),
            };
            Ok((out, EXIT_OK))
        }
        Command::Catalog { name, format } => {
            let out = match name {
                None => match format {
                    Format::Text => catalog_names().join("\n"),
                    Format::Structured => json(&serde_json::json!({ "names": catalog_names() })),
                },
                Some(name) => {
                    let e = catalog(&name)?;
                    let words: Vec<(String, String)> =
                        e.words.iter().map(|w| (w.name.clone(), emit_word(&w.word, &e.seed))).collect();
                    match format {
                        Format::Text => {
                            let mut s = emit_seed(&e.seed);
                            for (n, w) in &words {
                                s.push_str(&format!("\n{n}: {w}"));
                            }
                            if let Some(t) = &e.triangulation {
                                s.push('\n');
                                s.push_str(&emit_triangulation(t));
                            }
                            s
                        }
                        Format::Structured => json(&serde_json::json!({
                            "name": e.name,
                            "seed": SeedDocument::from_seed(&e.seed),
                            "words": words.iter().map(|(n, w)| serde_json::json!({"name": n, "word": w})).collect::<Vec<_>>(),
                            "triangulation": e.triangulation.as_ref().map(|t| serde_json::from_str::<serde_json::Value>(&emit_triangulation(t)).expect("valid document")),
                        })),
                    }
                }
            };
            Ok((out, EXIT_OK))
        }
        Command::Serve { addr } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| invalid(e.to_string()))?;
            rt.block_on(crate::server::serve(&addr)).map_err(|e| invalid(format!("server: {e}")))?;
            Ok((String::new(), EXIT_OK))
        }
    }
}

/// Runs a parsed command, printing its output, and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    match run_command(cli.command) {
        Ok((out, code)) => {
            if !out.is_empty() {
                println!("{out}");
            }
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
