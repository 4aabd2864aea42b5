//! The `mlsieve` command line.
//!
//! Exit codes: 0 on success, 1 when a detector (`mmd`, `depth3-mmd`) finds
//! nothing or a self-test suite fails, 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mlsieve::abp::parse_abp;
use mlsieve::apps::{self, parse_graph, parse_match};
use mlsieve::circuit::{parse_circuit, parse_sps};
use mlsieve::rper::{binom, parse_rect, rper_values, RperBudget};
use mlsieve::selftest;
use mlsieve::solvers::{depth3_mlc, depth3_mmd, mlc_count, mlc_count_abp, mmd, MlcOptions, MlcReport, MmdConfig, MmdScheme};
use mlsieve::{Integers, RingSpec, RperAlgo};
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mlsieve", version, about = "Multilinear monomial counting and detection for arithmetic circuits")]
pub struct Cli {
    /// Emit one JSON object per report (big integers as strings).
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct RingArgs {
    /// Work over F_p (a prime, or `F_p`).
    #[arg(long, value_name = "P", conflicts_with = "int")]
    pub field: Option<RingSpec>,
    /// Work over the integers (the default).
    #[arg(long)]
    pub int: bool,
}

impl RingArgs {
    fn spec(&self) -> RingSpec {
        self.field.unwrap_or(RingSpec::Integer)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sum of the coefficients of the degree-k multilinear monomials.
    Mlc {
        #[arg(long, required_unless_present = "abp", conflicts_with = "abp")]
        circuit: Option<PathBuf>,
        /// Read an algebraic branching program instead of a circuit.
        #[arg(long)]
        abp: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = RperAlgo::Halves)]
        algo: RperAlgo,
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Randomized detection of a degree-k multilinear monomial (one-sided error).
    Mmd {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = MmdScheme::Basic)]
        scheme: MmdScheme,
        /// Miss probability.
        #[arg(long, default_value_t = 0.1)]
        error: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Multilinear coefficient sum of a sum of products of linear forms.
    #[command(name = "depth3-mlc")]
    Depth3Mlc {
        #[arg(long)]
        sps: PathBuf,
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Deterministic detection for a sum of products of linear forms (integers only).
    #[command(name = "depth3-mmd")]
    Depth3Mmd {
        #[arg(long)]
        sps: PathBuf,
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Rectangular permanent of a k x n matrix with scalar or square-matrix entries.
    Rper {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = RperAlgo::Halves)]
        algo: RperAlgo,
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Exact counters reduced to multilinear coefficient sums.
    Apps {
        #[command(subcommand)]
        app: App,
    },
    /// Runs the oracle-equivalence suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run a single suite.
        #[arg(long)]
        suite: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum App {
    /// Simple paths on k vertices.
    Kpath {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = RperAlgo::Halves)]
        algo: RperAlgo,
    },
    /// Subgraphs isomorphic to a given tree.
    Ktree {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = RperAlgo::Halves)]
        algo: RperAlgo,
    },
    /// k-sets of vertices whose closed neighbourhood has at least t vertices.
    Domset {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = RperAlgo::Halves)]
        algo: RperAlgo,
    },
    /// k pairwise disjoint tuples of an m-dimensional matching instance.
    Mdmatch {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = RperAlgo::Halves)]
        algo: RperAlgo,
    },
}

/// What a run printed and how it exited.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A report: the resolved configuration, the results and the wall time.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: Map<String, Value>,
    pub result: Map<String, Value>,
    pub millis: u128,
    pub code: i32,
}

impl Report {
    fn new(command: &str) -> Self {
        Report { command: command.into(), config: Map::new(), result: Map::new(), millis: 0, code: EXIT_OK }
    }

    fn cfg(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.config.insert(key.into(), v.into());
        self
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.result.insert(key.into(), v.into());
    }

    /// Big integers and rationals go out as strings.
    fn big(&mut self, key: &str, v: impl ToString) {
        self.put(key, v.to_string());
    }

    pub fn to_json(&self) -> String {
        json!({
            "command": self.command,
            "config": self.config,
            "result": self.result,
            "millis": self.millis as u64,
        })
        .to_string()
    }

    pub fn to_plain(&self) -> String {
        fn show(v: &Value) -> String {
            match v {
                Value::String(s) => s.clone(),
                Value::Null => "-".into(),
                other => other.to_string(),
            }
        }
        let mut out = String::new();
        for (k, v) in &self.result {
            out.push_str(&format!("{k}: {}\n", show(v)));
        }
        let cfg: Vec<String> = self.config.iter().map(|(k, v)| format!("{k}={}", show(v))).collect();
        out.push_str(&format!("config: {} {}\n", self.command, cfg.join(" ")));
        out.push_str(&format!("time_ms: {}\n", self.millis));
        out
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: "error: --threads must be positive\n".into() };
        }
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let start = Instant::now();
    match pool.install(|| execute(&cli.command)) {
        Ok(mut r) => {
            r.millis = start.elapsed().as_millis();
            if let Some(t) = cli.threads {
                r.config.insert("threads".into(), t.into());
            }
            let stdout = if cli.json { r.to_json() + "\n" } else { r.to_plain() };
            Outcome { code: r.code, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {e:#}\n") },
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// Ring operations the algorithm should stay within, up to a constant, for a `k × n` permanent.
fn op_regime(algo: RperAlgo, k: usize, n: usize) -> (String, String) {
    let k = k.min(n);
    let kn = BigInt::from(k * n);
    match algo {
        RperAlgo::Halves => {
            let h = k.div_ceil(2);
            let v = BigInt::from(binom(n, h)) * (BigInt::from(1) << h) * kn;
            ("C(n,ceil(k/2))*2^ceil(k/2)*k*n".into(), v.to_string())
        }
        RperAlgo::RectRyser => {
            let below: BigInt = (0..=k).map(|i| BigInt::from(binom(n, i))).sum();
            ("C(n,<=k)*k*n".into(), (below * kn).to_string())
        }
        RperAlgo::Brute => {
            let falling: BigInt = (0..k).map(|i| BigInt::from(n - i)).product();
            ("n!/(n-k)!*k".into(), (falling * BigInt::from(k)).to_string())
        }
    }
}

fn mlc_report<E: ToString>(r: MlcReport<E>, algo: RperAlgo, k: usize, n: usize, report: &mut Report) {
    report.big("value", r.value);
    report.put("ops", r.ops);
    report.put("abp_width", r.abp_width);
    report.put("abp_edges", r.abp_edges);
    let (formula, bound) = op_regime(algo, k, n);
    report.put("op_regime", formula);
    report.big("op_regime_value", bound);
}

fn execute(cmd: &Command) -> anyhow::Result<Report> {
    Ok(match cmd {
        Command::Mlc { circuit, abp, k, algo, ring } => {
            let spec = ring.spec();
            let opts = MlcOptions { algo: *algo, ..Default::default() };
            let mut rep = Report::new("mlc").cfg("k", *k).cfg("algo", algo.to_string()).cfg("ring", spec.to_string());
            let n;
            match (circuit, abp) {
                (Some(path), _) => {
                    rep = rep.cfg("circuit", path_str(path));
                    let g = parse_circuit(&read(path)?)?;
                    n = g.nvars();
                    match spec.field()? {
                        Some(f) => mlc_report(mlc_count(&f, &g, *k, &opts)?, *algo, *k, n, &mut rep),
                        None => mlc_report(mlc_count(&Integers, &g, *k, &opts)?, *algo, *k, n, &mut rep),
                    }
                }
                (None, Some(path)) => {
                    rep = rep.cfg("abp", path_str(path));
                    let a = parse_abp(&read(path)?)?;
                    n = a.nvars();
                    match spec.field()? {
                        Some(f) => mlc_report(mlc_count_abp(&f, &a, *k, &opts)?, *algo, *k, n, &mut rep),
                        None => mlc_report(mlc_count_abp(&Integers, &a, *k, &opts)?, *algo, *k, n, &mut rep),
                    }
                }
                (None, None) => bail!("one of --circuit or --abp is required"),
            }
            rep
        }
        Command::Mmd { circuit, k, scheme, error, seed, ring } => {
            let spec = ring.spec();
            let g = parse_circuit(&read(circuit)?)?;
            let cfg = MmdConfig { scheme: *scheme, error: *error, seed: *seed, ring: spec, ..Default::default() };
            let r = mmd(&g, *k, &cfg)?;
            let mut rep = Report::new("mmd")
                .cfg("circuit", path_str(circuit))
                .cfg("k", *k)
                .cfg("scheme", scheme.to_string())
                .cfg("error", *error)
                .cfg("seed", *seed)
                .cfg("ring", spec.to_string());
            rep.put("found", r.found);
            rep.put("trials", r.trials);
            rep.put("found_at", r.found_at);
            rep.put("colors", r.colors);
            rep.put("ops", r.ops);
            if !r.found {
                rep.code = EXIT_NEGATIVE;
            }
            rep
        }
        Command::Depth3Mlc { sps, ring } => {
            let spec = ring.spec();
            let f = parse_sps(&read(sps)?)?;
            let mut rep = Report::new("depth3-mlc").cfg("sps", path_str(sps)).cfg("ring", spec.to_string());
            let (value, ops) = match spec.field()? {
                Some(p) => {
                    let r = depth3_mlc(&p, &f)?;
                    (BigInt::from(r.value), r.ops)
                }
                None => {
                    let r = depth3_mlc(&Integers, &f)?;
                    (r.value, r.ops)
                }
            };
            rep.big("value", value);
            rep.put("ops", ops);
            rep
        }
        Command::Depth3Mmd { sps, ring } => {
            let spec = ring.spec();
            let f = parse_sps(&read(sps)?)?;
            let r = depth3_mmd(&f, spec)?;
            let mut rep = Report::new("depth3-mmd").cfg("sps", path_str(sps)).cfg("ring", spec.to_string());
            rep.put("found", r.found);
            rep.big("value", r.value);
            rep.put("ops", r.ops);
            if !r.found {
                rep.code = EXIT_NEGATIVE;
            }
            rep
        }
        Command::Rper { matrix, algo, ring } => {
            let spec = ring.spec();
            let a = parse_rect(&read(matrix)?, spec)?;
            let r = rper_values(&a, *algo, &RperBudget::default())?;
            let mut rep = Report::new("rper")
                .cfg("matrix", path_str(matrix))
                .cfg("algo", algo.to_string())
                .cfg("ring", spec.to_string());
            rep.big("value", r.value);
            rep.put("ops", r.ops);
            let (formula, bound) = op_regime(*algo, a.k(), a.n());
            rep.put("op_regime", formula);
            rep.big("op_regime_value", bound);
            rep
        }
        Command::Apps { app } => run_app(app)?,
        Command::Selftest { seed, suite } => {
            if let Some(s) = suite {
                if !selftest::suite_names().contains(&s.as_str()) {
                    bail!("unknown suite `{s}` (expected one of {})", selftest::suite_names().join(", "));
                }
            }
            let results = selftest::run(*seed, suite.as_deref());
            let mut rep = Report::new("selftest").cfg("seed", *seed).cfg("suite", suite.clone());
            let passed = results.iter().filter(|r| r.passed()).count();
            for r in &results {
                let status = match &r.failure {
                    None => format!("pass ({} cases)", r.cases),
                    Some(f) => format!("FAIL: {f}"),
                };
                rep.put(r.name, status);
            }
            rep.put("summary", format!("{passed}/{} suites passed", results.len()));
            if passed < results.len() {
                rep.code = EXIT_NEGATIVE;
            }
            rep
        }
    })
}

fn run_app(app: &App) -> anyhow::Result<Report> {
    let opts = |algo: &RperAlgo| MlcOptions { algo: *algo, ..Default::default() };
    Ok(match app {
        App::Kpath { graph, k, algo } => {
            let g = parse_graph(&read(graph)?)?;
            let r = apps::count_kpaths(&g, *k, &opts(algo))?;
            let mut rep = Report::new("apps kpath").cfg("graph", path_str(graph)).cfg("k", *k).cfg("algo", algo.to_string());
            rep.big("ordered", r.ordered);
            rep.put("undirected", r.undirected.map(|v| v.to_string()));
            rep.put("ops", r.ops);
            rep.put("abp_width", r.abp_width);
            rep
        }
        App::Ktree { graph, tree, algo } => {
            let g = parse_graph(&read(graph)?)?;
            let t = parse_graph(&read(tree)?)?;
            let r = apps::count_ktrees(&g, &t, &opts(algo))?;
            let mut rep = Report::new("apps ktree")
                .cfg("graph", path_str(graph))
                .cfg("tree", path_str(tree))
                .cfg("algo", algo.to_string());
            rep.big("count", &r.normalized);
            rep.big("raw", r.raw);
            rep.big("constant", r.constant);
            rep.put("ops", r.ops);
            rep
        }
        App::Domset { graph, k, t, algo } => {
            let g = parse_graph(&read(graph)?)?;
            let r = apps::count_tdomsets(&g, *k, *t, &opts(algo))?;
            let mut rep = Report::new("apps domset")
                .cfg("graph", path_str(graph))
                .cfg("k", *k)
                .cfg("t", *t)
                .cfg("algo", algo.to_string());
            rep.put("exists", !r.raw.is_zero());
            rep.big("raw", r.raw);
            rep.big("constant", r.constant);
            // Calibrated on a complete graph; not exact in general.
            rep.big("normalized", r.normalized);
            rep.put("ops", r.ops);
            rep
        }
        App::Mdmatch { instance, k, algo } => {
            let inst = parse_match(&read(instance)?)?;
            let r = apps::count_mdmatchings(&inst, *k, &opts(algo))?;
            let mut rep = Report::new("apps mdmatch").cfg("instance", path_str(instance)).cfg("k", *k).cfg("algo", algo.to_string());
            rep.big("count", r.count);
            rep.put("ops", r.ops);
            rep.put("abp_width", r.abp_width);
            rep
        }
    })
}
