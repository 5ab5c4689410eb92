//! Command-line entry point.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use confsect_core::builders::{auto_method, build, Method};
use confsect_core::catalog;
use confsect_core::complex::{complex_stats, one_skeleton};
use confsect_core::graph::Graph;
use confsect_core::search::{predict, search_instance, Instance, Prediction, SearchOptions, Verdict, DEFAULT_BUDGET};
use confsect_core::verify::{verify, VerifyOptions};
use serde_json::{json, Value};

use crate::dot::skeleton_dot;
use crate::io::{load_graph, write_output};
use crate::report::{self, SearchSettings};

#[derive(Parser, Debug)]
#[command(name = "confsect", version, about = "Sections of configuration spaces of graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Graph JSON file, or `catalog:<name>`.
    pub graph: String,
    /// Number of tokens.
    #[arg(short, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Merge the two edges at every degree-2 vertex.
    #[arg(long)]
    pub suppress2: bool,
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Euler characteristic, core, classification and prediction.
    Analyze(GraphArgs),
    /// Face counts of the discrete model, or its 1-skeleton as DOT.
    Complex {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long)]
        dot: bool,
    },
    /// Search for a consistent choice of components.
    Search {
        #[command(flatten)]
        g: GraphArgs,
        /// Also require all witnesses of a distinguished pair to agree.
        #[arg(long)]
        pairs: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
    /// Build an identifying function and write its descriptor.
    BuildSection {
        #[command(flatten)]
        g: GraphArgs,
        /// antipode, tree, chi0, wedge, extended; chosen automatically if absent.
        #[arg(long)]
        method: Option<String>,
        /// Wedge vertex.
        #[arg(long)]
        w: Option<String>,
    },
    /// Check a descriptor written by build-section.
    Verify {
        descriptor: PathBuf,
        #[command(flatten)]
        budget: VerifyArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run analysis, search and builders over the built-in catalog.
    Catalog {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        #[command(flatten)]
        verify: VerifyArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub paths: u64,
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub walks: u64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub walk_length: u64,
}

impl VerifyArgs {
    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            samples: self.samples as usize,
            paths: self.paths as usize,
            steps: self.steps as usize,
            walks: self.walks as usize,
            walk_length: self.walk_length as usize,
            seed: self.seed,
        }
    }
}

/// Failures on bad input, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub anyhow::Error);

pub enum Outcome {
    Ok,
    Violations,
}

fn pretty(v: &Value) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn usage<T>(r: Result<T>) -> Result<T, UsageError> {
    r.map_err(UsageError)
}

fn load(a: &GraphArgs) -> Result<Graph, UsageError> {
    usage(load_graph(&a.graph, a.suppress2))
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<(), UsageError> {
    usage(write_output(path.as_deref(), text))
}

pub fn run(cli: Cli) -> Result<Outcome, UsageError> {
    match cli.command {
        Command::Analyze(a) => {
            let g = load(&a)?;
            emit(&a.output, &pretty(&report::analysis(&g, a.n as usize)))?;
        }
        Command::Complex { g: a, dot } => {
            let g = load(&a)?;
            let n = a.n as usize;
            if dot {
                let sk = usage(one_skeleton(&g, n).map_err(Into::into))?;
                emit(&a.output, skeleton_dot(&g, &sk).trim_end())?;
            } else {
                let s = usage(complex_stats(&g, n).map_err(Into::into))?;
                emit(&a.output, &pretty(&report::stats(n, &s)))?;
            }
        }
        Command::Search { g: a, pairs, seed, budget } => {
            let g = load(&a)?;
            let n = a.n as usize;
            let inst = usage(Instance::build(&g, n, pairs).map_err(Into::into))?;
            let c = search_instance(&g, &inst, &SearchOptions { pairs, seed, budget });
            let s = SearchSettings { n, pairs, seed, budget };
            emit(&a.output, &pretty(&report::certificate(&g, &inst.skeleton, &c, &s)))?;
        }
        Command::BuildSection { g: a, method, w } => {
            let g = load(&a)?;
            let n = a.n as usize;
            let method = match method {
                Some(m) => usage(Method::parse(&m).with_context(|| format!("unknown method `{m}`")))?,
                None => usage(auto_method(&g, n).context("no builder applies; pass --method"))?,
            };
            let wv = match &w {
                Some(name) => Some(usage(g.vertex_by_name(name).with_context(|| format!("unknown vertex `{name}`")))?),
                None => None,
            };
            let f = usage(build(&g, n, method, wv).map_err(Into::into))?;
            emit(&a.output, &pretty(&report::descriptor(&g, &f, w.as_deref())))?;
        }
        Command::Verify { descriptor, budget, output } => {
            let text = usage(fs::read_to_string(&descriptor).with_context(|| format!("reading {}", descriptor.display())))?;
            let v: Value = usage(serde_json::from_str(&text).context("parsing descriptor"))?;
            let (g, f) = usage(report::load_descriptor(&v))?;
            let r = verify(&g, &f, &budget.options());
            emit(&output, &pretty(&report::verification(&g, &r, budget.seed)))?;
            if !r.passed() {
                return Ok(Outcome::Violations);
            }
        }
        Command::Catalog { max_n, budget, verify: vargs, output } => {
            let (rows, ok) = run_catalog(max_n as usize, budget, &vargs.options());
            emit(&output, &pretty(&json!({ "results": rows, "passed": ok, "version": report::VERSION })))?;
            if !ok {
                return Ok(Outcome::Violations);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn catalog_graphs() -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = catalog::all().into_iter().map(|(n, g)| (n.to_string(), g)).collect();
    out.extend((0..3).map(|s| (format!("random_tree_{s}"), catalog::random_tree(s, 2))));
    out
}

/// Every catalog graph and token count: prediction, search and, where a
/// builder applies, verification. Fails on a builder violation or a search
/// verdict contradicting a prediction.
pub fn run_catalog(max_n: usize, budget: u64, vopts: &VerifyOptions) -> (Vec<Value>, bool) {
    let mut rows = Vec::new();
    let mut ok = true;
    for (name, g) in catalog_graphs() {
        for n in 1..=max_n {
            let p = predict(&g, n);
            let mut row = json!({ "graph": name, "n": n, "predict": report::prediction_name(&p) });
            if !g.is_circle() {
                if let Ok(s) = complex_stats(&g, n) {
                    row["cells"] = json!(s.cells_per_dim);
                }
                let pairs = true;
                if let Ok(inst) = Instance::build(&g, n, pairs) {
                    let c = search_instance(&g, &inst, &SearchOptions { pairs, seed: None, budget });
                    row["search"] = json!(match &c.verdict {
                        Verdict::Sat(_) => "sat",
                        Verdict::Unsat(_) => "unsat",
                        Verdict::Inconclusive => "inconclusive",
                    });
                    row["flags"] = json!(c.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>());
                    if matches!(p, Prediction::Exists(_)) && matches!(c.verdict, Verdict::Unsat(_)) {
                        ok = false;
                    }
                }
            }
            if let Some(m) = auto_method(&g, n) {
                match build(&g, n, m, None) {
                    Ok(f) => {
                        let r = verify(&g, &f, vopts);
                        row["verify"] = json!({
                            "method": m.as_str(),
                            "violations": r.violations.len(),
                            "max_ratio": r.max_ratio,
                            "envelope": r.envelope,
                            "passed": r.passed(),
                        });
                        ok &= r.passed();
                    }
                    Err(e) => {
                        row["verify"] = json!({ "method": m.as_str(), "error": e.to_string() });
                        ok = false;
                    }
                }
            }
            rows.push(row);
        }
    }
    (rows, ok)
}
